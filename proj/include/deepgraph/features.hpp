#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "deepgraph/graph.hpp"
#include "deepgraph/rng.hpp"

namespace deepgraph {

// Structural feature vector of a graph. Quad counts are the six connected
// 4-node induced-subgraph isomorphism classes; they are exact by enumeration
// up to kExactQuadLimit nodes and seeded uniform-sampling estimates above.
struct FeatureVector {
    double n_nodes = 0;
    double n_edges = 0;
    double closed_triangles = 0;
    double open_triangles = 0;
    double quad_path = 0;      // P4
    double quad_star = 0;      // claw
    double quad_cycle = 0;     // C4
    double quad_tadpole = 0;   // triangle + pendant
    double quad_diamond = 0;   // K4 minus one edge
    double quad_complete = 0;  // K4
    double avg_degree = 0;
    double avg_shortest_path = 0;
    double edge_density = 0;
    double n_leaf_nodes = 0;
    double n_leaf_edges = 0;
    double avg_closeness = 0;
    double clustering_coefficient = 0;  // global transitivity
    double diameter = 0;
    double n_communities = 0;

    static constexpr std::size_t kCount = 19;

    std::array<double, kCount> as_array() const {
        return {n_nodes,       n_edges,      closed_triangles, open_triangles,
                quad_path,     quad_star,    quad_cycle,       quad_tadpole,
                quad_diamond,  quad_complete, avg_degree,      avg_shortest_path,
                edge_density,  n_leaf_nodes, n_leaf_edges,     avg_closeness,
                clustering_coefficient, diameter, n_communities};
    }

    static const std::array<const char*, kCount>& names() {
        static const std::array<const char*, kCount> n = {
            "n_nodes",       "n_edges",      "closed_triangles", "open_triangles",
            "quad_path",     "quad_star",    "quad_cycle",       "quad_tadpole",
            "quad_diamond",  "quad_complete", "avg_degree",      "avg_shortest_path",
            "edge_density",  "n_leaf_nodes", "n_leaf_edges",     "avg_closeness",
            "clustering_coefficient", "diameter", "n_communities"};
        return n;
    }
};

constexpr std::size_t kExactQuadLimit = 300;
constexpr std::size_t kQuadSamples = 100000;
constexpr std::uint64_t kQuadSampleSeed = 0x71ad5eedULL;

namespace detail {

inline std::size_t count_triangles(const Graph& g) {
    std::size_t tri3 = 0;  // each triangle counted once per edge, i.e. 3x
    for (auto [u, v] : g.edges()) {
        const auto& nu = g.neighbors(u);
        const auto& nv = g.neighbors(v);
        std::size_t i = 0, j = 0;
        while (i < nu.size() && j < nv.size()) {
            if (nu[i] < nv[j]) {
                ++i;
            } else if (nu[i] > nv[j]) {
                ++j;
            } else {
                ++tri3;
                ++i;
                ++j;
            }
        }
    }
    return tri3 / 3;
}

// Classify a connected 4-node induced subgraph by edge count and max degree.
// edges: 6-bit adjacency among the four nodes. Returns the index into the
// quad_* fields (0 path, 1 star, 2 cycle, 3 tadpole, 4 diamond, 5 complete).
inline int classify_quad(int edge_count, int max_deg) {
    switch (edge_count) {
        case 3: return max_deg == 3 ? 1 : 0;
        case 4: return max_deg == 3 ? 3 : 2;
        case 5: return 4;
        default: return 5;  // 6 edges
    }
}

inline void quad_profile(const Graph& g, const std::array<NodeId, 4>& nodes, int& edge_count,
                         int& max_deg, bool& connected) {
    std::array<int, 4> deg{0, 0, 0, 0};
    int adj_bits = 0;
    edge_count = 0;
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
            const auto& n = g.neighbors(nodes[a]);
            if (std::binary_search(n.begin(), n.end(), nodes[b])) {
                ++edge_count;
                ++deg[a];
                ++deg[b];
                adj_bits |= (1 << (a * 4 + b)) | (1 << (b * 4 + a));
            }
        }
    max_deg = *std::max_element(deg.begin(), deg.end());
    // connectivity on 4 nodes by bitmask expansion from node 0
    int reach = 1;
    for (int round = 0; round < 3; ++round) {
        int next = reach;
        for (int a = 0; a < 4; ++a)
            if (reach & (1 << a))
                for (int b = 0; b < 4; ++b)
                    if (adj_bits & (1 << (a * 4 + b))) next |= (1 << b);
        reach = next;
    }
    connected = (reach == 0xF);
}

// Wernicke's ESU enumeration of connected induced 4-node subgraphs; each
// subset is visited exactly once.
template <typename Visit>
inline void enumerate_connected_quads(const Graph& g, Visit&& visit) {
    const NodeId n = g.num_nodes();
    std::vector<NodeId> sub;
    std::vector<char> blocked(n, 0);  // in subgraph or already offered as an extension
    std::vector<NodeId> touched;

    const auto extend = [&](auto&& self, NodeId root, std::vector<NodeId>& ext) -> void {
        if (sub.size() == 4) {
            visit(std::array<NodeId, 4>{sub[0], sub[1], sub[2], sub[3]});
            return;
        }
        while (!ext.empty()) {
            const NodeId w = ext.back();
            ext.pop_back();
            std::vector<NodeId> next_ext = ext;
            const std::size_t touched_mark = touched.size();
            for (NodeId u : g.neighbors(w)) {
                if (u > root && !blocked[u]) {
                    next_ext.push_back(u);
                    blocked[u] = 1;
                    touched.push_back(u);
                }
            }
            sub.push_back(w);
            self(self, root, next_ext);
            sub.pop_back();
            while (touched.size() > touched_mark) {
                blocked[touched.back()] = 0;
                touched.pop_back();
            }
        }
    };

    for (NodeId v = 0; v < n; ++v) {
        sub.assign(1, v);
        std::vector<NodeId> ext;
        blocked[v] = 1;
        for (NodeId u : g.neighbors(v)) {
            if (u > v) {
                ext.push_back(u);
                blocked[u] = 1;
                touched.push_back(u);
            }
        }
        extend(extend, v, ext);
        blocked[v] = 0;
        while (!touched.empty()) {
            blocked[touched.back()] = 0;
            touched.pop_back();
        }
    }
}

}  // namespace detail

// Counts of the six connected 4-node induced subgraph classes, in
// quad_* field order. Exact for n <= kExactQuadLimit, sampled estimate above.
inline std::array<double, 6> count_quads(const Graph& g) {
    std::array<double, 6> counts{0, 0, 0, 0, 0, 0};
    const std::size_t n = g.num_nodes();
    if (n < 4) return counts;
    if (n <= kExactQuadLimit) {
        detail::enumerate_connected_quads(g, [&](const std::array<NodeId, 4>& nodes) {
            int edge_count = 0, max_deg = 0;
            bool connected = false;
            detail::quad_profile(g, nodes, edge_count, max_deg, connected);
            counts[detail::classify_quad(edge_count, max_deg)] += 1.0;
        });
        return counts;
    }
    Rng rng(kQuadSampleSeed);
    std::array<std::size_t, 6> hits{0, 0, 0, 0, 0, 0};
    for (std::size_t s = 0; s < kQuadSamples; ++s) {
        std::array<NodeId, 4> nodes;
        for (int i = 0; i < 4;) {
            const auto cand = static_cast<NodeId>(rng.uniform_below(n));
            bool dup = false;
            for (int j = 0; j < i; ++j) dup |= (nodes[j] == cand);
            if (!dup) nodes[i++] = cand;
        }
        int edge_count = 0, max_deg = 0;
        bool connected = false;
        detail::quad_profile(g, nodes, edge_count, max_deg, connected);
        if (connected) ++hits[detail::classify_quad(edge_count, max_deg)];
    }
    const double total_subsets = static_cast<double>(n) * (n - 1.0) * (n - 2.0) * (n - 3.0) / 24.0;
    for (int c = 0; c < 6; ++c)
        counts[c] = static_cast<double>(hits[c]) / static_cast<double>(kQuadSamples) * total_subsets;
    return counts;
}

// Deterministic synchronous label propagation: every node adopts the most
// frequent label among its neighbors, smallest label on ties, for at most
// 100 rounds. Returns the number of distinct surviving labels.
inline std::size_t label_propagation_communities(const Graph& g) {
    const NodeId n = g.num_nodes();
    std::vector<NodeId> labels(n), next(n);
    for (NodeId v = 0; v < n; ++v) labels[v] = v;
    for (int round = 0; round < 100; ++round) {
        bool changed = false;
        for (NodeId v = 0; v < n; ++v) {
            if (g.degree(v) == 0) {
                next[v] = labels[v];
                continue;
            }
            std::vector<NodeId> nb;
            nb.reserve(g.degree(v));
            for (NodeId u : g.neighbors(v)) nb.push_back(labels[u]);
            std::sort(nb.begin(), nb.end());
            NodeId best_label = nb[0];
            std::size_t best_count = 0;
            std::size_t i = 0;
            while (i < nb.size()) {
                std::size_t j = i;
                while (j < nb.size() && nb[j] == nb[i]) ++j;
                if (j - i > best_count) {
                    best_count = j - i;
                    best_label = nb[i];
                }
                i = j;
            }
            next[v] = best_label;
            changed |= (next[v] != labels[v]);
        }
        labels.swap(next);
        if (!changed) break;
    }
    std::sort(labels.begin(), labels.end());
    return static_cast<std::size_t>(std::unique(labels.begin(), labels.end()) - labels.begin());
}

// All structural features of a graph. Shortest-path statistics are computed
// per connected component and averaged weighted by component size; diameter
// is the largest finite eccentricity; closeness of a node is
// (n_c - 1) / sum of distances within its component (0 for isolated nodes).
inline FeatureVector extract_features(const Graph& g) {
    FeatureVector f;
    const NodeId n = g.num_nodes();
    const double nd = static_cast<double>(n);
    f.n_nodes = nd;
    f.n_edges = static_cast<double>(g.num_edges());
    if (n == 0) return f;

    const std::size_t closed = detail::count_triangles(g);
    f.closed_triangles = static_cast<double>(closed);
    double wedges = 0.0;
    for (NodeId v = 0; v < n; ++v) {
        const double d = g.degree(v);
        wedges += d * (d - 1.0) / 2.0;
    }
    f.open_triangles = wedges - 3.0 * static_cast<double>(closed);
    f.clustering_coefficient = wedges > 0.0 ? 3.0 * static_cast<double>(closed) / wedges : 0.0;

    const auto quads = count_quads(g);
    f.quad_path = quads[0];
    f.quad_star = quads[1];
    f.quad_cycle = quads[2];
    f.quad_tadpole = quads[3];
    f.quad_diamond = quads[4];
    f.quad_complete = quads[5];

    f.avg_degree = 2.0 * f.n_edges / nd;
    f.edge_density = n >= 2 ? f.n_edges / (nd * (nd - 1.0) / 2.0) : 0.0;

    std::size_t leaf_nodes = 0;
    for (NodeId v = 0; v < n; ++v) leaf_nodes += g.degree(v) == 1;
    f.n_leaf_nodes = static_cast<double>(leaf_nodes);
    std::size_t leaf_edges = 0;
    for (auto [u, v] : g.edges()) leaf_edges += (g.degree(u) == 1 || g.degree(v) == 1);
    f.n_leaf_edges = static_cast<double>(leaf_edges);

    // component decomposition + all-pairs BFS
    std::vector<NodeId> comp(n, std::numeric_limits<NodeId>::max());
    std::vector<std::size_t> comp_size;
    for (NodeId v = 0; v < n; ++v) {
        if (comp[v] != std::numeric_limits<NodeId>::max()) continue;
        const auto comp_id = static_cast<NodeId>(comp_size.size());
        std::size_t size = 0;
        std::vector<NodeId> stack{v};
        comp[v] = comp_id;
        while (!stack.empty()) {
            const NodeId u = stack.back();
            stack.pop_back();
            ++size;
            for (NodeId w : g.neighbors(u))
                if (comp[w] == std::numeric_limits<NodeId>::max()) {
                    comp[w] = comp_id;
                    stack.push_back(w);
                }
        }
        comp_size.push_back(size);
    }

    std::vector<double> comp_pair_dist(comp_size.size(), 0.0);
    double closeness_sum = 0.0;
    double diameter = 0.0;
    for (NodeId v = 0; v < n; ++v) {
        const auto dist = bfs_distances(g, v);
        double sum_d = 0.0, ecc = 0.0;
        for (NodeId u = 0; u < n; ++u) {
            if (comp[u] != comp[v] || u == v) continue;
            sum_d += static_cast<double>(dist[u]);
            ecc = std::max(ecc, static_cast<double>(dist[u]));
        }
        comp_pair_dist[comp[v]] += sum_d;
        if (comp_size[comp[v]] > 1) closeness_sum += (static_cast<double>(comp_size[comp[v]]) - 1.0) / sum_d;
        diameter = std::max(diameter, ecc);
    }
    f.diameter = diameter;
    f.avg_closeness = closeness_sum / nd;

    double avg_sp = 0.0;
    for (std::size_t c = 0; c < comp_size.size(); ++c) {
        const double sz = static_cast<double>(comp_size[c]);
        if (sz < 2) continue;
        const double pairs = sz * (sz - 1.0) / 2.0;
        avg_sp += (sz / nd) * (comp_pair_dist[c] / 2.0) / pairs;
    }
    f.avg_shortest_path = avg_sp;

    f.n_communities = static_cast<double>(label_propagation_communities(g));
    return f;
}

}  // namespace deepgraph
