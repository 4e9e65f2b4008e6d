#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <utility>
#include <vector>

#include "deepgraph/errors.hpp"

namespace deepgraph {

using NodeId = std::uint32_t;

// One timestamped edge record as it appears in an input stream. Ids are the
// original (arbitrary, possibly sparse) identifiers, not dense graph indices.
struct TemporalEdge {
    std::uint64_t src = 0;
    std::uint64_t dst = 0;
    double timestamp = 0.0;
};

// Immutable undirected simple graph over dense node ids 0..n-1.
// Edges are stored canonically (first < second), sorted, without duplicates
// or self-loops; adjacency lists are built once at construction and sorted.
// All members are read-only after construction, so instances can be shared
// freely across threads.
class Graph {
public:
    Graph() = default;

    // Canonicalizes: swaps endpoints into (min,max), drops self-loops,
    // de-duplicates. Endpoints must be < n.
    Graph(NodeId n, std::vector<std::pair<NodeId, NodeId>> edge_list,
          std::vector<std::uint64_t> node_labels = {})
        : n_(n), labels_(std::move(node_labels)) {
        if (!labels_.empty() && labels_.size() != n_)
            throw ConfigError("Graph: node label count does not match node count");
        edges_.reserve(edge_list.size());
        for (auto [u, v] : edge_list) {
            if (u >= n_ || v >= n_) throw ConfigError("Graph: edge endpoint out of range");
            if (u == v) continue;
            if (u > v) std::swap(u, v);
            edges_.emplace_back(u, v);
        }
        std::sort(edges_.begin(), edges_.end());
        edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
        adj_.assign(n_, {});
        for (auto [u, v] : edges_) {
            adj_[u].push_back(v);
            adj_[v].push_back(u);
        }
        for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
    }

    NodeId num_nodes() const { return n_; }
    std::size_t num_edges() const { return edges_.size(); }
    const std::vector<std::pair<NodeId, NodeId>>& edges() const { return edges_; }
    const std::vector<NodeId>& neighbors(NodeId v) const { return adj_[v]; }
    NodeId degree(NodeId v) const { return static_cast<NodeId>(adj_[v].size()); }

    // Original id of dense node v, when the graph was built from labeled input.
    bool has_labels() const { return !labels_.empty(); }
    std::uint64_t label(NodeId v) const { return labels_.empty() ? v : labels_[v]; }
    const std::vector<std::uint64_t>& labels() const { return labels_; }

    bool operator==(const Graph& o) const { return n_ == o.n_ && edges_ == o.edges_; }

private:
    NodeId n_ = 0;
    std::vector<std::pair<NodeId, NodeId>> edges_;
    std::vector<std::vector<NodeId>> adj_;
    std::vector<std::uint64_t> labels_;  // dense id -> original id
};

// Builds the undirected snapshot graph from all records with
// timestamp <= snapshot_time. Reverse duplicates merge into one edge,
// self-loops are dropped, and surviving original ids are re-indexed densely
// in sorted order. Nodes with no retained edge do not appear.
inline Graph from_edge_list(const std::vector<TemporalEdge>& records, double snapshot_time) {
    std::vector<std::uint64_t> ids;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> kept;
    for (const auto& e : records) {
        if (!(e.timestamp <= snapshot_time)) continue;
        if (!std::isfinite(e.timestamp)) throw DataError("from_edge_list: non-finite timestamp");
        if (e.src == e.dst) continue;
        kept.emplace_back(std::min(e.src, e.dst), std::max(e.src, e.dst));
        ids.push_back(e.src);
        ids.push_back(e.dst);
    }
    if (kept.empty()) throw DataError("from_edge_list: empty snapshot (no edges at or before snapshot time)");
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    const auto dense = [&ids](std::uint64_t original) {
        return static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), original) - ids.begin());
    };
    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(kept.size());
    for (auto [u, v] : kept) edges.emplace_back(dense(u), dense(v));
    return Graph(static_cast<NodeId>(ids.size()), std::move(edges), std::move(ids));
}

inline std::vector<NodeId> degree_vector(const Graph& g) {
    std::vector<NodeId> d(g.num_nodes());
    for (NodeId v = 0; v < g.num_nodes(); ++v) d[v] = g.degree(v);
    return d;
}

// Shortest-path distances from src; unreachable nodes get max().
inline std::vector<NodeId> bfs_distances(const Graph& g, NodeId src) {
    constexpr NodeId kUnreached = std::numeric_limits<NodeId>::max();
    std::vector<NodeId> dist(g.num_nodes(), kUnreached);
    std::queue<NodeId> q;
    dist[src] = 0;
    q.push(src);
    while (!q.empty()) {
        const NodeId u = q.front();
        q.pop();
        for (NodeId w : g.neighbors(u)) {
            if (dist[w] == kUnreached) {
                dist[w] = dist[u] + 1;
                q.push(w);
            }
        }
    }
    return dist;
}

// Induced subgraph on all nodes within k hops of center (center included),
// re-indexed densely. Original labels are carried through.
inline Graph k_hop_ego_net(const Graph& g, NodeId center, unsigned k) {
    if (center >= g.num_nodes()) throw ConfigError("k_hop_ego_net: center out of range");
    constexpr NodeId kUnreached = std::numeric_limits<NodeId>::max();
    std::vector<NodeId> dist(g.num_nodes(), kUnreached);
    std::vector<NodeId> members;
    std::queue<NodeId> q;
    dist[center] = 0;
    q.push(center);
    members.push_back(center);
    while (!q.empty()) {
        const NodeId u = q.front();
        q.pop();
        if (dist[u] == k) continue;
        for (NodeId w : g.neighbors(u)) {
            if (dist[w] == kUnreached) {
                dist[w] = dist[u] + 1;
                q.push(w);
                members.push_back(w);
            }
        }
    }
    std::sort(members.begin(), members.end());
    std::vector<NodeId> dense(g.num_nodes(), kUnreached);
    std::vector<std::uint64_t> labels(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
        dense[members[i]] = static_cast<NodeId>(i);
        labels[i] = g.label(members[i]);
    }
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (auto [u, v] : g.edges())
        if (dense[u] != kUnreached && dense[v] != kUnreached) edges.emplace_back(dense[u], dense[v]);
    return Graph(static_cast<NodeId>(members.size()), std::move(edges), std::move(labels));
}

// Relabels node v as perm[v]. perm must be a bijection on 0..n-1.
inline Graph permute(const Graph& g, const std::vector<NodeId>& perm) {
    if (perm.size() != g.num_nodes()) throw ConfigError("permute: permutation size mismatch");
    std::vector<bool> seen(perm.size(), false);
    for (NodeId t : perm) {
        if (t >= perm.size() || seen[t]) throw ConfigError("permute: not a bijection");
        seen[t] = true;
    }
    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(g.num_edges());
    for (auto [u, v] : g.edges()) edges.emplace_back(perm[u], perm[v]);
    std::vector<std::uint64_t> labels;
    if (g.has_labels()) {
        labels.resize(g.num_nodes());
        for (NodeId v = 0; v < g.num_nodes(); ++v) labels[perm[v]] = g.label(v);
    }
    return Graph(g.num_nodes(), std::move(edges), std::move(labels));
}

inline std::vector<NodeId> inverse_permutation(const std::vector<NodeId>& perm) {
    std::vector<NodeId> inv(perm.size());
    for (NodeId v = 0; v < perm.size(); ++v) inv[perm[v]] = v;
    return inv;
}

}  // namespace deepgraph
