#pragma once

// Plan-to-plan random walks. Each step proposes a neighbouring plan and keeps
// it only if it is valid; otherwise the walk stays put (a self-loop, which
// still counts as a step).

#include <set>

#include "core.hpp"
#include "ensemble.hpp"
#include "rng.hpp"

namespace redistlab {

enum class StepKind { flip, swap, recombination };

inline const char* to_string(StepKind kind) {
    switch (kind) {
        case StepKind::flip: return "flip";
        case StepKind::swap: return "swap";
        case StepKind::recombination: return "recom";
    }
    return "?";
}

inline StepKind parse_step_kind(const std::string& name) {
    if (name == "flip") return StepKind::flip;
    if (name == "swap") return StepKind::swap;
    if (name == "recom" || name == "recombination") return StepKind::recombination;
    throw ConfigError("unknown step kind '" + name + "' (expected flip, swap or recom)");
}

inline constexpr int kDefaultRecomRetries = 100;

namespace detail {

inline bool populations_feasible(const std::vector<Population>& pops, const PopulationBounds& bounds) {
    return std::all_of(pops.begin(), pops.end(), [&](Population p) { return bounds.admits(p); });
}

/// Districts adjacent to u other than its own, ascending.
inline std::vector<District> neighbor_districts(const Plan& plan, const UnitGraph& graph, UnitId u) {
    std::vector<District> out;
    for (UnitId v : graph.neighbors(u))
        if (plan[v] != plan[u]) out.push_back(plan[v]);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Would moving u to `to` keep the plan valid? Assumes the plan is valid now.
inline bool flip_ok(const Plan& plan, const UnitGraph& graph, const Constraints& constraints,
                    const PopulationBounds& bounds, const std::vector<Population>& pops, UnitId u, District to) {
    const District from = plan[u];
    const Population p = graph.population(u);
    if (!bounds.admits(pops[from] - p) || !bounds.admits(pops[to] + p)) return false;
    if (constraints.require_contiguity) return stays_connected_without(plan, graph, u);
    for (UnitId v = 0; v < plan.size(); ++v)
        if (v != u && plan[v] == from) return true;
    return false;
}

}  // namespace detail

struct FlipMove {
    UnitId unit;
    District to;
    bool operator==(const FlipMove&) const = default;
};

/// Every valid single-unit flip from a valid plan.
inline std::vector<FlipMove> flip_moves(const Plan& plan, const UnitGraph& graph, const Constraints& constraints) {
    detail::require_complete(plan, graph);
    const auto bounds = constraints.bounds(graph.total_population());
    const auto pops = district_populations(plan, graph);
    std::vector<FlipMove> out;
    for (UnitId u = 0; u < graph.size(); ++u)
        for (District d : detail::neighbor_districts(plan, graph, u))
            if (detail::flip_ok(plan, graph, constraints, bounds, pops, u, d)) out.push_back({u, d});
    return out;
}

/// Indices of cut edges whose endpoint swap yields a valid plan.
inline std::vector<int> swap_moves(const Plan& plan, const UnitGraph& graph, const Constraints& constraints) {
    detail::require_complete(plan, graph);
    std::vector<int> out;
    Plan work = plan;
    for (int i = 0; i < graph.edge_count(); ++i) {
        const Edge& e = graph.edges()[i];
        if (plan[e.a] == plan[e.b]) continue;
        work.assign(e.a, plan[e.b]);
        work.assign(e.b, plan[e.a]);
        if (is_valid(work, graph, constraints)) out.push_back(i);
        work.assign(e.a, plan[e.a]);
        work.assign(e.b, plan[e.b]);
    }
    return out;
}

/// Flip proposal: uniform boundary unit, uniform neighbouring district.
inline std::optional<Plan> propose_flip(const Plan& plan, const UnitGraph& graph, const Constraints& constraints,
                                        Rng& rng) {
    const auto boundary = boundary_units(plan, graph);
    if (boundary.empty()) return std::nullopt;
    const UnitId u = boundary[rng.index(boundary.size())];
    const auto options = detail::neighbor_districts(plan, graph, u);
    const District to = options[rng.index(options.size())];
    const auto pops = district_populations(plan, graph);
    if (!detail::flip_ok(plan, graph, constraints, constraints.bounds(graph.total_population()), pops, u, to))
        return std::nullopt;
    Plan next = plan;
    next.assign(u, to);
    return next;
}

/// Swap proposal: uniform cut edge, endpoints exchange labels.
inline std::optional<Plan> propose_swap(const Plan& plan, const UnitGraph& graph, const Constraints& constraints,
                                        Rng& rng) {
    std::vector<int> cut;
    for (int i = 0; i < graph.edge_count(); ++i)
        if (plan[graph.edges()[i].a] != plan[graph.edges()[i].b]) cut.push_back(i);
    if (cut.empty()) return std::nullopt;
    const Edge& e = graph.edges()[cut[rng.index(cut.size())]];
    Plan next = plan;
    next.assign(e.a, plan[e.b]);
    next.assign(e.b, plan[e.a]);
    if (!is_valid(next, graph, constraints)) return std::nullopt;
    return next;
}

namespace detail {

/// Uniform spanning tree of the subgraph induced by `units` (Wilson's
/// algorithm). Returns parent indices into `units`, root has parent -1.
/// The induced subgraph must be connected.
inline std::vector<int> random_spanning_tree(const UnitGraph& graph, const std::vector<UnitId>& units,
                                             const std::vector<int>& local, Rng& rng) {
    const int n = static_cast<int>(units.size());
    std::vector<int> next(n, -1);
    std::vector<char> in_tree(n, 0);
    std::vector<int> nbrs;
    const int root = static_cast<int>(rng.index(n));
    in_tree[root] = 1;
    for (int i = 0; i < n; ++i) {
        int u = i;
        while (!in_tree[u]) {
            nbrs.clear();
            for (UnitId v : graph.neighbors(units[u]))
                if (local[v] >= 0) nbrs.push_back(local[v]);
            next[u] = nbrs[rng.index(nbrs.size())];
            u = next[u];
        }
        for (u = i; !in_tree[u]; u = next[u]) in_tree[u] = 1;
    }
    next[root] = -1;
    return next;
}

/// Splits the union of districts a and b into two feasible connected halves.
inline bool recombine(Plan& plan, const UnitGraph& graph, const PopulationBounds& bounds, District a, District b,
                      int retries, Rng& rng) {
    std::vector<UnitId> units;
    std::vector<int> local(graph.size(), -1);
    Population total = 0;
    for (UnitId u = 0; u < graph.size(); ++u) {
        if (plan[u] == a || plan[u] == b) {
            local[u] = static_cast<int>(units.size());
            units.push_back(u);
            total += graph.population(u);
        }
    }
    const int n = static_cast<int>(units.size());
    for (int attempt = 0; attempt < retries; ++attempt) {
        const auto parent = random_spanning_tree(graph, units, local, rng);
        // Subtree populations via a children-first order.
        std::vector<std::vector<int>> children(n);
        int root = -1;
        for (int i = 0; i < n; ++i) {
            if (parent[i] < 0)
                root = i;
            else
                children[parent[i]].push_back(i);
        }
        std::vector<int> order{root};
        for (std::size_t i = 0; i < order.size(); ++i)
            for (int c : children[order[i]]) order.push_back(c);
        std::vector<Population> below(n, 0);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            below[*it] += graph.population(units[*it]);
            if (parent[*it] >= 0) below[parent[*it]] += below[*it];
        }
        std::vector<int> cuttable;
        for (int i = 0; i < n; ++i)
            if (parent[i] >= 0 && bounds.admits(below[i]) && bounds.admits(total - below[i])) cuttable.push_back(i);
        if (cuttable.empty()) continue;
        const int cut = cuttable[rng.index(cuttable.size())];
        const bool flip = rng.bernoulli(0.5);
        // Mark the subtree hanging below `cut`.
        std::vector<char> side(n, 0);
        side[cut] = 1;
        for (int v : order)
            if (parent[v] >= 0 && side[parent[v]]) side[v] = 1;
        for (int i = 0; i < n; ++i) plan.assign(units[i], (side[i] != 0) != flip ? a : b);
        return true;
    }
    return false;
}

}  // namespace detail

/// Recombination proposal: uniform pair of adjacent districts, merged and
/// re-split along a uniform spanning tree edge with feasible halves.
inline std::optional<Plan> propose_recom(const Plan& plan, const UnitGraph& graph, const Constraints& constraints,
                                         Rng& rng, int retries = kDefaultRecomRetries) {
    if (plan.district_count() < 2) return std::nullopt;
    std::set<std::pair<District, District>> pairs;
    for (const Edge& e : graph.edges()) {
        const District x = plan[e.a], y = plan[e.b];
        if (x != y) pairs.insert({std::min(x, y), std::max(x, y)});
    }
    if (pairs.empty()) return std::nullopt;
    auto it = pairs.begin();
    std::advance(it, static_cast<long>(rng.index(pairs.size())));
    Plan next = plan;
    if (!detail::recombine(next, graph, constraints.bounds(graph.total_population()), it->first, it->second, retries,
                           rng))
        return std::nullopt;
    return next;
}

inline std::optional<Plan> propose_step(StepKind kind, const Plan& plan, const UnitGraph& graph,
                                        const Constraints& constraints, Rng& rng,
                                        int recom_retries = kDefaultRecomRetries) {
    switch (kind) {
        case StepKind::flip: return propose_flip(plan, graph, constraints, rng);
        case StepKind::swap: return propose_swap(plan, graph, constraints, rng);
        case StepKind::recombination: return propose_recom(plan, graph, constraints, rng, recom_retries);
    }
    return std::nullopt;
}

inline Plan flip_step(const Plan& plan, const UnitGraph& graph, const Constraints& constraints, Rng& rng) {
    return propose_flip(plan, graph, constraints, rng).value_or(plan);
}

inline Plan swap_step(const Plan& plan, const UnitGraph& graph, const Constraints& constraints, Rng& rng) {
    return propose_swap(plan, graph, constraints, rng).value_or(plan);
}

inline Plan recom_step(const Plan& plan, const UnitGraph& graph, const Constraints& constraints, Rng& rng,
                       int retries = kDefaultRecomRetries) {
    return propose_recom(plan, graph, constraints, rng, retries).value_or(plan);
}

// ---------------------------------------------------------------------------

struct ChainConfig {
    std::int64_t steps = 1000;
    StepKind kind = StepKind::flip;
    Constraints constraints;
    std::uint64_t seed = 0;
    std::int64_t record_every = 1;
    int recom_retries = kDefaultRecomRetries;

    void check() const {
        constraints.check();
        if (steps < 0) throw ConfigError("steps must be nonnegative");
        if (record_every < 1) throw ConfigError("record_every must be at least 1");
        if (steps > 0 && record_every > steps) throw ConfigError("record_every must not exceed steps");
        if (recom_retries < 1) throw ConfigError("recom retry budget must be positive");
    }
};

inline int hamming_distance(const Plan& a, const Plan& b) {
    int d = 0;
    for (UnitId u = 0; u < a.size(); ++u) d += a[u] != b[u];
    return d;
}

/// Runs the walk, recording the start and every record_every-th state.
/// Acceptance counts and a lag-1 Hamming summary go into the statistics.
inline Ensemble run_chain(const Plan& start, const ChainConfig& config, const UnitGraph& graph) {
    config.check();
    detail::require_sized(start, graph);
    if (start.district_count() != config.constraints.k) throw ConfigError("start plan has the wrong district count");
    if (!is_valid(start, graph, config.constraints)) throw DataError("chain start plan is not valid");

    Rng rng(config.seed);
    Ensemble ens(graph, std::string(to_string(config.kind)) + "-chain", config.seed);
    ens.parameters["kind"] = to_string(config.kind);
    ens.parameters["steps"] = std::to_string(config.steps);
    ens.parameters["record_every"] = std::to_string(config.record_every);
    ens.parameters["districts"] = std::to_string(config.constraints.k);
    ens.parameters["deviation"] = std::to_string(config.constraints.deviation);
    ens.parameters["contiguity"] = config.constraints.require_contiguity ? "required" : "not required";
    ens.parameters["convergence"] = "not assessed; see lag-1 hamming and acceptance";
    if (config.kind == StepKind::recombination) ens.parameters["recom_retries"] = std::to_string(config.recom_retries);

    Plan state = start;
    ens.add(state, graph, 0);
    std::int64_t accepted = 0;
    for (std::int64_t step = 1; step <= config.steps; ++step) {
        if (auto next = propose_step(config.kind, state, graph, config.constraints, rng, config.recom_retries)) {
            state = std::move(*next);
            ++accepted;
        }
        if (step % config.record_every == 0) ens.add(state, graph, step);
    }
    double hamming = 0;
    for (std::size_t i = 1; i < ens.size(); ++i) hamming += hamming_distance(ens.plans[i - 1], ens.plans[i]);
    ens.statistics["accepted"] = static_cast<double>(accepted);
    ens.statistics["self_loops"] = static_cast<double>(config.steps - accepted);
    ens.statistics["acceptance_rate"] = config.steps ? static_cast<double>(accepted) / config.steps : 0.0;
    ens.statistics["mean_hamming_lag1"] = ens.size() > 1 ? hamming / (ens.size() - 1) : 0.0;
    return ens;
}

}  // namespace redistlab
