#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deepgraph/errors.hpp"
#include "deepgraph/graph.hpp"
#include "deepgraph/rng.hpp"

namespace deepgraph {

// Ordered edge stream with non-decreasing timestamps plus the parameters
// needed to regenerate it bit-identically.
struct TemporalEdgeList {
    std::vector<TemporalEdge> edges;
    std::string generator;
    std::uint64_t seed = 0;
    std::string params;  // human-readable parameter summary
};

// Preferential attachment: nodes arrive one at a time and node v attaches
// min(edges_per_node, v) edges to distinct existing nodes picked with
// probability proportional to degree (a repeated-endpoint list). Edge
// timestamps equal the arriving node's index.
inline TemporalEdgeList generate_preferential_attachment(std::size_t n_nodes,
                                                         std::size_t edges_per_node,
                                                         std::uint64_t seed) {
    if (edges_per_node < 1) throw ConfigError("generate_preferential_attachment: edges_per_node must be >= 1");
    if (n_nodes <= edges_per_node)
        throw ConfigError("generate_preferential_attachment: need n_nodes > edges_per_node");
    TemporalEdgeList out;
    out.generator = "ba";
    out.seed = seed;
    out.params = "nodes=" + std::to_string(n_nodes) + " edges_per_node=" + std::to_string(edges_per_node);
    Rng rng(seed);
    std::vector<std::uint64_t> endpoint_pool;  // node id repeated once per incident edge
    endpoint_pool.reserve(2 * n_nodes * edges_per_node);
    std::vector<std::uint64_t> targets;
    for (std::uint64_t v = 1; v < n_nodes; ++v) {
        const std::size_t k = std::min<std::size_t>(edges_per_node, v);
        targets.clear();
        while (targets.size() < k) {
            std::uint64_t t;
            if (endpoint_pool.empty()) {
                t = rng.uniform_below(v);
            } else {
                t = endpoint_pool[rng.uniform_below(endpoint_pool.size())];
            }
            bool dup = false;
            for (std::uint64_t s : targets) dup |= (s == t);
            if (!dup) targets.push_back(t);
        }
        for (std::uint64_t t : targets) {
            out.edges.push_back({v, t, static_cast<double>(v)});
            endpoint_pool.push_back(v);
            endpoint_pool.push_back(t);
        }
    }
    return out;
}

// Erdos-Renyi G(n, p); pairs examined in lexicographic order, accepted edges
// timestamped by insertion index.
inline TemporalEdgeList generate_er(std::size_t n, double p, std::uint64_t seed) {
    if (n < 1) throw ConfigError("generate_er: need n >= 1");
    if (p < 0.0 || p > 1.0) throw ConfigError("generate_er: p outside [0,1]");
    TemporalEdgeList out;
    out.generator = "er";
    out.seed = seed;
    out.params = "nodes=" + std::to_string(n) + " p=" + std::to_string(p);
    Rng rng(seed);
    double ts = 0.0;
    for (std::uint64_t u = 0; u < n; ++u)
        for (std::uint64_t v = u + 1; v < n; ++v)
            if (rng.uniform01() < p) out.edges.push_back({u, v, ts++});
    return out;
}

// Watts-Strogatz: ring lattice with k/2 neighbors on each side, then each
// edge's far endpoint is rewired with probability beta to a uniform random
// node (avoiding self-loops and duplicates). beta = 0 leaves every degree k.
inline TemporalEdgeList generate_ws(std::size_t n, std::size_t k, double beta, std::uint64_t seed) {
    if (k < 2 || k % 2 != 0) throw ConfigError("generate_ws: k must be even and >= 2");
    if (n <= k) throw ConfigError("generate_ws: need n > k");
    if (beta < 0.0 || beta > 1.0) throw ConfigError("generate_ws: beta outside [0,1]");
    TemporalEdgeList out;
    out.generator = "ws";
    out.seed = seed;
    out.params = "nodes=" + std::to_string(n) + " k=" + std::to_string(k) + " beta=" + std::to_string(beta);
    Rng rng(seed);
    std::vector<std::vector<std::uint64_t>> adj(n);
    const auto connected = [&](std::uint64_t a, std::uint64_t b) {
        for (std::uint64_t x : adj[a])
            if (x == b) return true;
        return false;
    };
    double ts = 0.0;
    for (std::size_t j = 1; j <= k / 2; ++j) {
        for (std::uint64_t u = 0; u < n; ++u) {
            std::uint64_t v = (u + j) % n;
            if (beta > 0.0 && rng.uniform01() < beta) {
                // rewire unless the node is already saturated
                if (adj[u].size() < n - 1) {
                    std::uint64_t w;
                    do {
                        w = rng.uniform_below(n);
                    } while (w == u || connected(u, w));
                    v = w;
                }
            }
            if (connected(u, v)) continue;
            adj[u].push_back(v);
            adj[v].push_back(u);
            out.edges.push_back({u, v, ts++});
        }
    }
    return out;
}

}  // namespace deepgraph
