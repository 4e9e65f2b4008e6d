#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "deepgraph/errors.hpp"
#include "deepgraph/generators.hpp"
#include "deepgraph/graph.hpp"
#include "deepgraph/rng.hpp"

namespace deepgraph {

// Which network property the growth label measures.
enum class GrowthTarget : std::uint8_t {
    kEgoDegree = 0,  // new neighbors of the ego node
    kEgoNetSize = 1, // new nodes inside the k-hop ego-net
};

inline const char* growth_target_name(GrowthTarget t) {
    return t == GrowthTarget::kEgoDegree ? "ego-degree" : "ego-size";
}

inline GrowthTarget growth_target_from_name(const std::string& s) {
    if (s == "ego-degree") return GrowthTarget::kEgoDegree;
    if (s == "ego-size") return GrowthTarget::kEgoNetSize;
    throw ConfigError("unknown growth target '" + s + "'");
}

// One supervised example: the ego-net snapshot at graph_time and the scaled
// growth of the target property measured at growth_time.
struct LabeledInstance {
    Graph graph;
    std::uint64_t origin = 0;  // original id of the ego node
    double raw_growth = 0.0;
    double scaled_label = 0.0;  // log2(raw_growth + 1)
    double graph_time = 0.0;
    double growth_time = 0.0;
};

inline double scale_label(double raw_growth) { return std::log2(raw_growth + 1.0); }

struct InstanceParams {
    unsigned k_hop = 1;
    GrowthTarget target = GrowthTarget::kEgoDegree;
};

// Builds one instance per node present in the snapshot at graph_time
// (restricted to `origins` when non-null). The growth is the target property
// at growth_time minus at graph_time, floored at zero. Nodes absent at
// graph_time are skipped. Output is sorted by origin id.
inline std::vector<LabeledInstance> build_instances(const TemporalEdgeList& el, double graph_time,
                                                    double growth_time, const InstanceParams& params,
                                                    const std::vector<std::uint64_t>* origins = nullptr) {
    if (!(growth_time > graph_time))
        throw ConfigError("build_instances: growth_time must be after graph_time");
    const Graph now = from_edge_list(el.edges, graph_time);
    const Graph later = from_edge_list(el.edges, growth_time);

    std::map<std::uint64_t, NodeId> later_index;
    for (NodeId v = 0; v < later.num_nodes(); ++v) later_index[later.label(v)] = v;

    std::vector<char> wanted;
    std::map<std::uint64_t, NodeId> now_index;
    for (NodeId v = 0; v < now.num_nodes(); ++v) now_index[now.label(v)] = v;

    std::vector<std::uint64_t> origin_list;
    if (origins) {
        origin_list = *origins;
        std::sort(origin_list.begin(), origin_list.end());
    } else {
        origin_list.reserve(now.num_nodes());
        for (NodeId v = 0; v < now.num_nodes(); ++v) origin_list.push_back(now.label(v));
    }

    std::vector<LabeledInstance> out;
    out.reserve(origin_list.size());
    for (std::uint64_t origin : origin_list) {
        const auto it_now = now_index.find(origin);
        if (it_now == now_index.end()) continue;  // not yet created at graph_time
        LabeledInstance inst;
        inst.origin = origin;
        inst.graph_time = graph_time;
        inst.growth_time = growth_time;
        inst.graph = k_hop_ego_net(now, it_now->second, params.k_hop);

        double before = 0.0, after = 0.0;
        const auto it_later = later_index.find(origin);
        if (params.target == GrowthTarget::kEgoDegree) {
            before = static_cast<double>(now.degree(it_now->second));
            after = it_later == later_index.end() ? before
                                                  : static_cast<double>(later.degree(it_later->second));
        } else {
            before = static_cast<double>(inst.graph.num_nodes());
            after = it_later == later_index.end()
                        ? before
                        : static_cast<double>(
                              k_hop_ego_net(later, it_later->second, params.k_hop).num_nodes());
        }
        inst.raw_growth = std::max(0.0, after - before);
        inst.scaled_label = scale_label(inst.raw_growth);
        out.push_back(std::move(inst));
    }
    return out;
}

// Split layout: per-split snapshot and growth times plus origin-assignment
// fractions. Times must satisfy the forward-prediction ordering: graph times
// strictly increase train -> val -> test, growth times likewise, and every
// split's growth time is after its graph time.
struct SplitSpec {
    std::array<double, 3> fractions{0.8, 0.05, 0.15};
    std::array<double, 3> graph_times{};
    std::array<double, 3> growth_times{};
    std::uint64_t seed = 0;

    void validate() const {
        double sum = 0.0;
        for (double f : fractions) {
            if (f < 0.0) throw ConfigError("SplitSpec: negative fraction");
            sum += f;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("SplitSpec: fractions must sum to 1");
        for (int s = 0; s < 3; ++s)
            if (!(growth_times[s] > graph_times[s]))
                throw ConfigError("SplitSpec: growth_time must exceed graph_time in every split");
        for (int s = 0; s + 1 < 3; ++s) {
            if (!(graph_times[s] < graph_times[s + 1]))
                throw ConfigError("SplitSpec: graph times must strictly increase train->val->test");
            if (!(growth_times[s] < growth_times[s + 1]))
                throw ConfigError("SplitSpec: growth times must strictly increase train->val->test");
        }
    }
};

struct SplitBenchmark {
    std::vector<LabeledInstance> train, val, test;

    const std::vector<LabeledInstance>& split(int s) const {
        return s == 0 ? train : (s == 1 ? val : test);
    }
    std::vector<LabeledInstance>& split(int s) { return s == 0 ? train : (s == 1 ? val : test); }
};

inline const char* split_name(int s) { return s == 0 ? "train" : (s == 1 ? "val" : "test"); }

inline void verify_split(const SplitBenchmark& bench);

// Assigns each origin to exactly one split with a keyed coin (independent of
// processing order), then builds every split's instances at that split's own
// (graph_time, growth_time). The ordering inequalities of the spec'd
// forward-prediction protocol are re-verified on the result.
inline SplitBenchmark temporal_split(const TemporalEdgeList& el, const SplitSpec& spec,
                                     const InstanceParams& params) {
    spec.validate();
    // universe of origins: nodes present at the latest graph time
    const Graph latest = from_edge_list(el.edges, spec.graph_times[2]);
    std::array<std::vector<std::uint64_t>, 3> assigned;
    for (NodeId v = 0; v < latest.num_nodes(); ++v) {
        const std::uint64_t origin = latest.label(v);
        const double u = keyed_uniform01(spec.seed, origin);
        int s;
        if (u < spec.fractions[0])
            s = 0;
        else if (u < spec.fractions[0] + spec.fractions[1])
            s = 1;
        else
            s = 2;
        assigned[s].push_back(origin);
    }
    SplitBenchmark bench;
    for (int s = 0; s < 3; ++s)
        bench.split(s) =
            build_instances(el, spec.graph_times[s], spec.growth_times[s], params, &assigned[s]);
    verify_split(bench);
    return bench;
}

// Machine check of the split hygiene contract: per-instance time ordering,
// cross-split time inequalities, and origin disjointness.
inline void verify_split(const SplitBenchmark& bench) {
    for (int s = 0; s < 3; ++s)
        for (const auto& inst : bench.split(s)) {
            if (!(inst.growth_time > inst.graph_time))
                throw DataError(std::string("verify_split: growth_time <= graph_time in ") + split_name(s));
            const double expect = scale_label(inst.raw_growth);
            if (inst.scaled_label != expect)
                throw DataError("verify_split: scaled label mismatch");
        }
    for (int s = 0; s + 1 < 3; ++s) {
        const auto& a = bench.split(s);
        const auto& b = bench.split(s + 1);
        if (a.empty() || b.empty()) continue;
        double max_graph_a = a.front().graph_time, max_growth_a = a.front().growth_time;
        double min_graph_b = b.front().graph_time, min_growth_b = b.front().growth_time;
        for (const auto& i : a) {
            max_graph_a = std::max(max_graph_a, i.graph_time);
            max_growth_a = std::max(max_growth_a, i.growth_time);
        }
        for (const auto& i : b) {
            min_graph_b = std::min(min_graph_b, i.graph_time);
            min_growth_b = std::min(min_growth_b, i.growth_time);
        }
        if (!(max_graph_a < min_graph_b) || !(max_growth_a < min_growth_b))
            throw DataError("verify_split: temporal ordering violated between splits");
    }
    std::array<std::vector<std::uint64_t>, 3> origins;
    for (int s = 0; s < 3; ++s) {
        for (const auto& i : bench.split(s)) origins[s].push_back(i.origin);
        std::sort(origins[s].begin(), origins[s].end());
    }
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
            std::vector<std::uint64_t> common;
            std::set_intersection(origins[a].begin(), origins[a].end(), origins[b].begin(),
                                  origins[b].end(), std::back_inserter(common));
            if (!common.empty()) throw DataError("verify_split: origin appears in two splits");
        }
}

// Independently drops each zero-growth instance with probability `fraction`
// (keyed on origin id, so the outcome does not depend on list order).
// Instances with nonzero growth are untouched.
inline std::vector<LabeledInstance> downsample_zero_growth(std::vector<LabeledInstance> split,
                                                           double fraction, std::uint64_t seed) {
    if (fraction < 0.0 || fraction > 1.0) throw ConfigError("downsample_zero_growth: fraction outside [0,1]");
    std::vector<LabeledInstance> out;
    out.reserve(split.size());
    for (auto& inst : split) {
        if (inst.raw_growth == 0.0 && keyed_bernoulli(seed, inst.origin, fraction)) continue;
        out.push_back(std::move(inst));
    }
    return out;
}

inline double mse(const std::vector<double>& predictions, const std::vector<double>& truths) {
    if (predictions.size() != truths.size() || truths.empty())
        throw ConfigError("mse: length mismatch or empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        const double d = predictions[i] - truths[i];
        sum += d * d;
    }
    return sum / static_cast<double>(truths.size());
}

}  // namespace deepgraph
