#pragma once

// Plan optimisation: local-search metaheuristics over the chain
// neighbourhoods, an exact branch-and-bound for minimum cut edges, and the
// deviation / cut-edge Pareto sweep built on it.

#include <chrono>
#include <deque>
#include <unordered_set>

#include "chains.hpp"
#include "core.hpp"
#include "rng.hpp"
#include "samplers.hpp"

namespace redistlab {

// ---------------------------------------------------------------------------
// Objectives

/// Number of counties whose units fall in more than one district.
inline int county_splits(const Plan& plan, const UnitGraph& graph) {
    detail::require_complete(plan, graph);
    if (!graph.has_counties()) throw ConfigError("county splits need county labels");
    std::vector<District> first(graph.county_count(), kUnassigned);
    std::vector<char> split(graph.county_count(), 0);
    for (UnitId u = 0; u < graph.size(); ++u) {
        District& f = first[graph.county(u)];
        if (f == kUnassigned)
            f = plan[u];
        else if (f != plan[u])
            split[graph.county(u)] = 1;
    }
    return static_cast<int>(std::count(split.begin(), split.end(), 1));
}

struct Objective {
    enum class Kind { cut_edges, weighted_sum };
    Kind kind = Kind::cut_edges;
    double cut_weight = 1.0;
    double deviation_weight = 0.0;
    double county_weight = 0.0;

    static Objective cut() { return {}; }
    static Objective weighted(double cut, double deviation, double county) {
        Objective o{Kind::weighted_sum, cut, deviation, county};
        o.check();
        return o;
    }

    void check() const {
        if (kind == Kind::cut_edges) return;
        if (cut_weight < 0 || deviation_weight < 0 || county_weight < 0)
            throw ConfigError("objective weights must be nonnegative");
        if (cut_weight + deviation_weight + county_weight <= 0)
            throw ConfigError("at least one objective weight must be positive");
    }

    double operator()(const Plan& plan, const UnitGraph& graph) const {
        if (kind == Kind::cut_edges) return cut_edges(plan, graph);
        double v = 0;
        if (cut_weight > 0) v += cut_weight * cut_edges(plan, graph);
        if (deviation_weight > 0) v += deviation_weight * max_deviation(plan, graph);
        if (county_weight > 0) v += county_weight * county_splits(plan, graph);
        return v;
    }
};

struct OptimizationResult {
    Plan plan;
    double value = 0;
    double start_value = 0;
    std::vector<double> trace;  // see each optimiser
    std::int64_t steps = 0;
    std::int64_t accepted = 0;
    bool local_optimum = false;  // hill climbing: a full scan found no improving move
};

namespace detail {

inline void require_valid_start(const Plan& start, const UnitGraph& graph, const Constraints& constraints) {
    detail::require_sized(start, graph);
    if (start.district_count() != constraints.k) throw ConfigError("start plan has the wrong district count");
    if (!is_valid(start, graph, constraints)) throw DataError("start plan is not valid");
}

/// All valid neighbours for the enumerable neighbourhoods; empty for recom.
inline std::vector<Plan> all_neighbors(StepKind kind, const Plan& plan, const UnitGraph& graph,
                                       const Constraints& constraints) {
    std::vector<Plan> out;
    if (kind == StepKind::flip) {
        for (const FlipMove& m : flip_moves(plan, graph, constraints)) {
            out.push_back(plan);
            out.back().assign(m.unit, m.to);
        }
    } else if (kind == StepKind::swap) {
        for (int i : swap_moves(plan, graph, constraints)) {
            const Edge& e = graph.edges()[i];
            out.push_back(plan);
            out.back().assign(e.a, plan[e.b]);
            out.back().assign(e.b, plan[e.a]);
        }
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Hill climbing

struct HillClimbOptions {
    StepKind neighborhood = StepKind::flip;
    std::int64_t max_steps = 10000;
    int patience = -1;  // failed proposals before a full scan; < 0: 2 * unit count
};

/// Accepts strictly improving proposals only. After `patience` failures in a
/// row the whole flip/swap neighbourhood is scanned; if nothing improves the
/// plan is a local optimum and the climb stops. Recombination has no full
/// scan, so there the climb stops after `patience` failures.
/// trace: objective of the start and after each accepted move.
inline OptimizationResult hill_climb(const Plan& start, const UnitGraph& graph, const Constraints& constraints,
                                     const Objective& objective, const HillClimbOptions& options, Rng& rng) {
    detail::require_valid_start(start, graph, constraints);
    objective.check();
    const int patience = options.patience < 0 ? 2 * graph.size() : options.patience;
    OptimizationResult r{start, objective(start, graph), 0, {}, 0, 0, false};
    r.start_value = r.value;
    r.trace.push_back(r.value);
    int failures = 0;
    while (r.steps < options.max_steps) {
        ++r.steps;
        if (auto next = propose_step(options.neighborhood, r.plan, graph, constraints, rng)) {
            const double v = objective(*next, graph);
            if (v < r.value) {
                r.plan = std::move(*next);
                r.value = v;
                r.trace.push_back(v);
                ++r.accepted;
                failures = 0;
                continue;
            }
        }
        if (++failures < patience) continue;
        if (options.neighborhood == StepKind::recombination) break;
        std::vector<std::pair<double, Plan>> better;
        for (auto& n : detail::all_neighbors(options.neighborhood, r.plan, graph, constraints)) {
            const double v = objective(n, graph);
            if (v < r.value) better.emplace_back(v, std::move(n));
        }
        if (better.empty()) {
            r.local_optimum = true;
            break;
        }
        auto& pick = better[rng.index(better.size())];
        r.plan = std::move(pick.second);
        r.value = pick.first;
        r.trace.push_back(r.value);
        ++r.accepted;
        failures = 0;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Simulated annealing

struct AnnealSchedule {
    double initial_temperature = 2.0;
    double cooling = 0.99;
    int steps_per_temperature = 100;
    int epochs = 200;

    void check() const {
        if (!(initial_temperature > 0)) throw ConfigError("initial temperature must be positive");
        if (!(cooling > 0 && cooling < 1)) throw ConfigError("cooling factor must lie in (0,1)");
        if (steps_per_temperature < 1) throw ConfigError("steps per temperature must be at least 1");
        if (epochs < 1) throw ConfigError("epochs must be at least 1");
    }
};

/// Metropolis acceptance exp(-delta/T) under geometric cooling; returns the
/// best plan visited. trace: objective of the current state after each epoch.
inline OptimizationResult simulated_annealing(const Plan& start, const UnitGraph& graph, const Constraints& constraints,
                                              const Objective& objective, const AnnealSchedule& schedule,
                                              StepKind neighborhood, Rng& rng) {
    detail::require_valid_start(start, graph, constraints);
    objective.check();
    schedule.check();
    OptimizationResult best{start, objective(start, graph), 0, {}, 0, 0, false};
    best.start_value = best.value;
    Plan current = start;
    double value = best.value;
    double temperature = schedule.initial_temperature;
    for (int epoch = 0; epoch < schedule.epochs; ++epoch) {
        for (int s = 0; s < schedule.steps_per_temperature; ++s) {
            ++best.steps;
            auto next = propose_step(neighborhood, current, graph, constraints, rng);
            if (!next) continue;
            const double v = objective(*next, graph);
            const double delta = v - value;
            if (delta <= 0 || rng.uniform() < std::exp(-delta / temperature)) {
                current = std::move(*next);
                value = v;
                ++best.accepted;
                if (value < best.value) {
                    best.value = value;
                    best.plan = current;
                }
            }
        }
        best.trace.push_back(value);
        temperature *= schedule.cooling;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Tabu search

struct TabuOptions {
    StepKind neighborhood = StepKind::flip;
    int tenure = 50;
    std::int64_t max_steps = 1000;
    int samples = 32;  // proposals per step for recombination
};

struct TabuResult : OptimizationResult {
    std::vector<std::uint64_t> trajectory;  // canonical plan hashes, start first
};

/// Moves to the best non-tabu neighbour each step, even when that is worse.
/// The last `tenure` states (canonical hashes) are tabu. Flip and swap scan
/// the full neighbourhood; recombination samples `samples` proposals. Ends
/// early when every candidate is tabu. Returns the best plan visited.
inline TabuResult tabu_search(const Plan& start, const UnitGraph& graph, const Constraints& constraints,
                              const Objective& objective, const TabuOptions& options, Rng& rng) {
    detail::require_valid_start(start, graph, constraints);
    objective.check();
    if (options.tenure < 1) throw ConfigError("tabu tenure must be at least 1");
    if (options.samples < 1) throw ConfigError("tabu sample count must be at least 1");
    TabuResult r;
    r.plan = start;
    r.value = r.start_value = objective(start, graph);
    Plan current = start;
    std::deque<std::uint64_t> recent;
    std::unordered_set<std::uint64_t> tabu;
    auto remember = [&](const Plan& p) {
        const std::uint64_t h = plan_hash(canonical(p));
        r.trajectory.push_back(h);
        recent.push_back(h);
        tabu.insert(h);
        if (static_cast<int>(recent.size()) > options.tenure) {
            tabu.erase(recent.front());
            recent.pop_front();
        }
    };
    remember(current);
    r.trace.push_back(r.value);
    for (; r.steps < options.max_steps; ++r.steps) {
        std::vector<Plan> candidates;
        if (options.neighborhood == StepKind::recombination) {
            for (int i = 0; i < options.samples; ++i)
                if (auto p = propose_recom(current, graph, constraints, rng)) candidates.push_back(std::move(*p));
        } else {
            candidates = detail::all_neighbors(options.neighborhood, current, graph, constraints);
        }
        std::vector<std::size_t> best_idx;
        double best_v = std::numeric_limits<double>::infinity();
        std::unordered_set<std::uint64_t> seen;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            const std::uint64_t h = plan_hash(canonical(candidates[i]));
            if (tabu.count(h) || !seen.insert(h).second) continue;
            const double v = objective(candidates[i], graph);
            if (v < best_v) {
                best_v = v;
                best_idx.clear();
            }
            if (v == best_v) best_idx.push_back(i);
        }
        if (best_idx.empty()) break;
        current = std::move(candidates[best_idx[rng.index(best_idx.size())]]);
        ++r.accepted;
        remember(current);
        r.trace.push_back(best_v);
        if (best_v < r.value) {
            r.value = best_v;
            r.plan = current;
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Evolutionary search

/// Connected components of the units sharing both parents' labels.
inline std::pair<std::vector<int>, int> common_refinement(const Plan& a, const Plan& b, const UnitGraph& graph) {
    detail::require_complete(a, graph);
    detail::require_complete(b, graph);
    std::vector<int> region(graph.size(), -1);
    int count = 0;
    std::vector<UnitId> stack;
    for (UnitId s = 0; s < graph.size(); ++s) {
        if (region[s] >= 0) continue;
        region[s] = count;
        stack.assign(1, s);
        while (!stack.empty()) {
            const UnitId u = stack.back();
            stack.pop_back();
            for (UnitId v : graph.neighbors(u)) {
                if (region[v] < 0 && a[v] == a[s] && b[v] == b[s]) {
                    region[v] = count;
                    stack.push_back(v);
                }
            }
        }
        ++count;
    }
    return {region, count};
}

namespace detail {

/// Relabels `plan` to agree with `reference` as much as possible (greedy on
/// overlap counts, ties to lower labels).
inline Plan align_labels(const Plan& plan, const Plan& reference, const UnitGraph& graph) {
    const int k = plan.district_count();
    std::vector<Population> overlap(static_cast<std::size_t>(k) * k, 0);
    for (UnitId u = 0; u < graph.size(); ++u) ++overlap[static_cast<std::size_t>(plan[u]) * k + reference[u]];
    std::vector<District> map(k, kUnassigned);
    std::vector<char> taken(k, 0);
    for (int round = 0; round < k; ++round) {
        Population best = -1;
        int bi = 0, bj = 0;
        for (int i = 0; i < k; ++i) {
            if (map[i] != kUnassigned) continue;
            for (int j = 0; j < k; ++j) {
                if (taken[j]) continue;
                if (overlap[static_cast<std::size_t>(i) * k + j] > best) {
                    best = overlap[static_cast<std::size_t>(i) * k + j];
                    bi = i;
                    bj = j;
                }
            }
        }
        map[bi] = bj;
        taken[bj] = 1;
    }
    std::vector<District> labels(graph.size());
    for (UnitId u = 0; u < graph.size(); ++u) labels[u] = map[plan[u]];
    return Plan(std::move(labels), k);
}

}  // namespace detail

/// Common refinement of the parents, merged back to k regions and rebalanced.
/// Labels follow parent A where they overlap it most. nullopt on failure.
inline std::optional<Plan> crossover(const Plan& a, const Plan& b, const UnitGraph& graph,
                                     const Constraints& constraints, Rng& rng) {
    if (a.district_count() != b.district_count() || a.district_count() != constraints.k)
        throw ConfigError("crossover parents must share the district count");
    auto [region, count] = common_refinement(a, b, graph);
    auto labels = detail::merge_regions(graph, region, count, constraints.k, graph.has_centroids(), rng);
    if (!labels) return std::nullopt;
    Plan child = detail::align_labels(Plan(std::move(*labels), constraints.k), a, graph);
    if (!is_valid(child, graph, constraints)) {
        auto balanced = rebalance(child, graph, constraints, 4 * graph.size(), rng);
        if (!balanced.success) return std::nullopt;
        child = std::move(balanced.plan);
    }
    if (!is_valid(child, graph, constraints)) return std::nullopt;
    return child;
}

struct EvolutionOptions {
    int generations = 50;
    int children = -1;  // per generation; < 0: population size
    bool mutate = true;
    bool crossover = true;
    StepKind mutation = StepKind::flip;
};

/// Each generation breeds children (crossover of two random parents, then one
/// mutation step) and keeps the best `population.size()` of parents and
/// children. trace: best objective in the population after each generation.
inline OptimizationResult evolutionary(std::vector<Plan> population, const UnitGraph& graph,
                                       const Constraints& constraints, const Objective& objective,
                                       const EvolutionOptions& options, Rng& rng) {
    if (population.size() < 2) throw ConfigError("evolutionary search needs a population of at least 2");
    for (const Plan& p : population) detail::require_valid_start(p, graph, constraints);
    objective.check();
    const std::size_t size = population.size();
    const std::size_t children = options.children < 0 ? size : static_cast<std::size_t>(options.children);

    std::vector<std::pair<double, Plan>> pool;
    for (auto& p : population) pool.emplace_back(objective(p, graph), std::move(p));
    auto by_value = [](const auto& x, const auto& y) { return x.first < y.first; };
    std::stable_sort(pool.begin(), pool.end(), by_value);

    OptimizationResult r{pool.front().second, pool.front().first, 0, {}, 0, 0, false};
    r.start_value = r.value;
    for (int g = 0; g < options.generations; ++g) {
        const std::size_t parents = pool.size();
        for (std::size_t c = 0; c < children; ++c) {
            const std::size_t i = rng.index(parents);
            std::size_t j = rng.index(parents - 1);
            if (j >= i) ++j;
            Plan child = pool[i].second;
            if (options.crossover)
                if (auto x = crossover(pool[i].second, pool[j].second, graph, constraints, rng)) child = std::move(*x);
            if (options.mutate) child = propose_step(options.mutation, child, graph, constraints, rng).value_or(child);
            const double v = objective(child, graph);
            pool.emplace_back(v, std::move(child));
            ++r.steps;
        }
        std::stable_sort(pool.begin(), pool.end(), by_value);
        pool.resize(size);
        if (pool.front().first < r.value) {
            r.value = pool.front().first;
            r.plan = pool.front().second;
            ++r.accepted;
        }
        r.trace.push_back(pool.front().first);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Exact minimum cut edges

enum class SolveStatus { proven_optimal, incumbent, infeasible, unknown };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::proven_optimal: return "proven_optimal";
        case SolveStatus::incumbent: return "incumbent";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unknown: return "unknown";
    }
    return "?";
}

struct ExactOptions {
    double time_budget = 300.0;  // seconds
    std::uint64_t node_budget = 0;  // 0: unlimited
    std::optional<Plan> warm_start;
    bool heuristic_warm_start = true;
    bool allow_discontiguous = false;
    std::uint64_t seed = 1;
};

struct ExactResult {
    std::optional<Plan> plan;
    SolveStatus status = SolveStatus::unknown;
    int lower_bound = 0;
    std::uint64_t nodes = 0;
    double seconds = 0;

    std::optional<int> cut_edges;
};

namespace detail {

/// Best plan found by flood fill / merging followed by a short recombination walk.
inline std::optional<Plan> heuristic_incumbent(const UnitGraph& graph, const Constraints& constraints,
                                               std::uint64_t seed) {
    Rng rng(seed);
    std::optional<Plan> start;
    const auto gen = flood_fill_generator(graph, constraints, FloodFillPolicy{});
    for (int i = 0; i < 2000 && !start; ++i) start = gen(rng);
    for (int i = 0; i < 200 && !start; ++i) start = iterative_merge(graph, constraints, rng, {graph.has_centroids(), -1});
    if (!start) return std::nullopt;
    Plan best = *start, current = *start;
    int best_cut = redistlab::cut_edges(best, graph);
    for (int step = 0; step < 2000; ++step) {
        current = recom_step(current, graph, constraints, rng);
        const int c = redistlab::cut_edges(current, graph);
        if (c < best_cut) {
            best_cut = c;
            best = current;
        }
    }
    HillClimbOptions hc;
    hc.neighborhood = StepKind::flip;
    hc.max_steps = 5000;
    return hill_climb(best, graph, constraints, Objective::cut(), hc, rng).plan;
}

class BranchAndBound {
public:
    BranchAndBound(const UnitGraph& graph, const Constraints& constraints, const ExactOptions& options)
        : g_(graph), k_(constraints.k), n_(graph.size()), bounds_(constraints.bounds(graph.total_population())),
          contiguity_(constraints.require_contiguity && !options.allow_discontiguous), options_(options),
          constraints_(constraints) {
        if (k_ > 64) throw ConfigError("exact solver supports at most 64 districts");
        // Breadth-first order from unit 0, then any unreached units.
        std::vector<char> seen(n_, 0);
        for (UnitId s = 0; s < n_; ++s) {
            if (seen[s]) continue;
            seen[s] = 1;
            const std::size_t head = order_.size();
            order_.push_back(s);
            for (std::size_t i = head; i < order_.size(); ++i)
                for (UnitId v : g_.neighbors(order_[i]))
                    if (!seen[v]) {
                        seen[v] = 1;
                        order_.push_back(v);
                    }
        }
        label_.assign(n_, kUnassigned);
        pop_.assign(k_, 0);
        count_.assign(static_cast<std::size_t>(n_) * k_, 0);
        assigned_nbrs_.assign(n_, 0);
        stamp_.assign(n_, 0);
    }

    ExactResult solve(std::optional<Plan> incumbent) {
        start_ = std::chrono::steady_clock::now();
        if (incumbent) {
            best_ = redistlab::cut_edges(*incumbent, g_);
            best_plan_ = std::move(incumbent);
        }
        remaining_ = g_.total_population();
        if (n_ > 0 && k_ <= n_) search(0, 0, 0);
        ExactResult r;
        r.nodes = nodes_;
        r.seconds = elapsed();
        r.plan = best_plan_;
        if (best_plan_) r.cut_edges = best_;
        if (!aborted_) {
            r.status = best_plan_ ? SolveStatus::proven_optimal : SolveStatus::infeasible;
            r.lower_bound = best_plan_ ? best_ : 0;
        } else {
            r.status = best_plan_ ? SolveStatus::incumbent : SolveStatus::unknown;
            const int open_bound = abort_bound_ == std::numeric_limits<int>::max() ? 0 : abort_bound_;
            r.lower_bound = best_plan_ ? std::min(best_, open_bound) : open_bound;
        }
        return r;
    }

private:
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

    bool out_of_budget() {
        if (aborted_) return true;
        if (options_.node_budget && nodes_ >= options_.node_budget) aborted_ = true;
        if ((nodes_ & 0xfff) == 0 && elapsed() > options_.time_budget) aborted_ = true;
        return aborted_;
    }

    void place(UnitId u, District d, int sign) {
        label_[u] = sign > 0 ? d : kUnassigned;
        pop_[d] += sign * g_.population(u);
        remaining_ -= sign * g_.population(u);
        for (UnitId v : g_.neighbors(u)) {
            count_[static_cast<std::size_t>(v) * k_ + d] += sign;
            assigned_nbrs_[v] += sign;
        }
    }

    /// Lower bound on cut edges of any completion, or -1 if none exists.
    int bound(int decided, int used) const {
        Population need = static_cast<Population>(k_ - used) * bounds_.lower;
        Population room = static_cast<Population>(k_ - used) * bounds_.upper;
        for (District d = 0; d < used; ++d) {
            need += std::max<Population>(0, bounds_.lower - pop_[d]);
            room += bounds_.upper - pop_[d];
        }
        if (need > remaining_ || room < remaining_) return -1;
        int lb = decided;
        for (UnitId u = 0; u < n_; ++u) {
            if (label_[u] != kUnassigned || assigned_nbrs_[u] == 0) continue;
            int keep = -1;
            const Population p = g_.population(u);
            if (used < k_) keep = 0;
            for (District d = 0; d < used; ++d)
                if (pop_[d] + p <= bounds_.upper) keep = std::max(keep, count_[static_cast<std::size_t>(u) * k_ + d]);
            if (keep < 0) return -1;
            lb += assigned_nbrs_[u] - keep;
        }
        return lb;
    }

    /// Every opened district must still be able to become connected and
    /// reach the lower population bound through unassigned units.
    bool districts_can_close(int used) {
        for (District d = 0; d < used; ++d) {
            UnitId seed = -1;
            int members = 0;
            for (UnitId u = 0; u < n_; ++u)
                if (label_[u] == d) {
                    if (seed < 0) seed = u;
                    ++members;
                }
            ++tick_;
            std::vector<UnitId>& stack = stack_;
            stack.assign(1, seed);
            stamp_[seed] = tick_;
            int reached = 0;
            Population reach_pop = 0;
            while (!stack.empty()) {
                const UnitId u = stack.back();
                stack.pop_back();
                reached += label_[u] == d;
                reach_pop += g_.population(u);
                for (UnitId v : g_.neighbors(u)) {
                    if (stamp_[v] == tick_ || (label_[v] != d && label_[v] != kUnassigned)) continue;
                    stamp_[v] = tick_;
                    stack.push_back(v);
                }
            }
            if (reached < members || reach_pop < bounds_.lower) return false;
        }
        return true;
    }

    void search(int depth, int decided, int used) {
        ++nodes_;
        if (out_of_budget()) return;
        if (depth == n_) {
            if (used < k_) return;
            Plan plan(label_, k_);
            if (!is_valid(plan, g_, Constraints{k_, constraints_.deviation, contiguity_})) return;
            if (!best_plan_ || decided < best_) {
                best_ = decided;
                best_plan_ = std::move(plan);
            }
            return;
        }
        const UnitId u = order_[depth];
        const Population p = g_.population(u);
        // Candidate labels ordered by the cut edges they add now.
        struct Choice {
            int added;
            District d;
        };
        Choice choices[64];
        int nc = 0;
        const int limit = std::min(used + 1, k_);
        for (District d = 0; d < limit && nc < 64; ++d) {
            if (pop_[d] + p > bounds_.upper) continue;
            const int added = assigned_nbrs_[u] - count_[static_cast<std::size_t>(u) * k_ + d];
            choices[nc++] = {added, d};
        }
        std::stable_sort(choices, choices + nc, [](const Choice& a, const Choice& b) { return a.added < b.added; });
        for (int i = 0; i < nc; ++i) {
            const District d = choices[i].d;
            const int now = decided + choices[i].added;
            const int next_used = d == used ? used + 1 : used;
            place(u, d, +1);
            const int lb = bound(now, next_used);
            const bool open = lb >= 0 && (!best_plan_ || lb < best_) && (!contiguity_ || districts_can_close(next_used));
            if (open) {
                search(depth + 1, now, next_used);
                if (aborted_) abort_bound_ = std::min(abort_bound_, lb);
            }
            place(u, d, -1);
            if (aborted_) {
                // Unvisited siblings are bounded below by this node's bound.
                for (int j = i + 1; j < nc; ++j) abort_bound_ = std::min(abort_bound_, decided + choices[j].added);
                return;
            }
        }
    }

    const UnitGraph& g_;
    int k_, n_;
    PopulationBounds bounds_;
    bool contiguity_;
    ExactOptions options_;
    Constraints constraints_;
    std::vector<UnitId> order_;
    std::vector<District> label_;
    std::vector<Population> pop_;
    Population remaining_ = 0;
    std::vector<int> count_;
    std::vector<int> assigned_nbrs_;
    std::vector<unsigned> stamp_;
    unsigned tick_ = 0;
    std::vector<UnitId> stack_;

    std::uint64_t nodes_ = 0;
    bool aborted_ = false;
    int abort_bound_ = std::numeric_limits<int>::max();
    int best_ = std::numeric_limits<int>::max();
    std::optional<Plan> best_plan_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// Branch-and-bound over unit labels minimising cut edges under the
/// population bounds. Contiguity is required of every accepted plan unless
/// `allow_discontiguous` is set or the constraints do not ask for it.
inline ExactResult exact_min_cut_edges(const UnitGraph& graph, const Constraints& constraints,
                                       const ExactOptions& options = {}) {
    constraints.check();
    if (graph.total_population() <= 0) throw DataError("degenerate instance");
    const Constraints check{constraints.k, constraints.deviation,
                            constraints.require_contiguity && !options.allow_discontiguous};
    std::optional<Plan> incumbent;
    if (options.warm_start && options.warm_start->size() == graph.size() &&
        options.warm_start->district_count() == constraints.k && is_valid(*options.warm_start, graph, check))
        incumbent = options.warm_start;
    if (options.heuristic_warm_start && check.require_contiguity) {
        if (auto h = detail::heuristic_incumbent(graph, check, options.seed))
            if (!incumbent || cut_edges(*h, graph) < cut_edges(*incumbent, graph)) incumbent = std::move(h);
    }
    detail::BranchAndBound bb(graph, constraints, options);
    return bb.solve(std::move(incumbent));
}

/// Interface for plugging in an external integer-programming solver. No
/// implementation ships with the library.
class CutEdgeSolver {
public:
    virtual ~CutEdgeSolver() = default;
    virtual ExactResult solve(const UnitGraph& graph, const Constraints& constraints, const ExactOptions& options) = 0;
};

// ---------------------------------------------------------------------------
// Pareto sweep

struct ParetoPoint {
    double deviation = 0;  // allowance
    int cut_edges = 0;     // incumbent value, or the lower bound when no plan is known
    SolveStatus status = SolveStatus::unknown;
    int lower_bound = 0;
    std::optional<double> achieved_deviation;
    std::optional<Plan> plan;

    const char* status_name() const {
        switch (status) {
            case SolveStatus::proven_optimal: return "proven_optimal";
            case SolveStatus::incumbent: return "incumbent";
            default: return "lower_bound";
        }
    }
};

/// a dominates b: no worse in achieved deviation and cut edges, better in one.
inline bool dominates(const ParetoPoint& a, const ParetoPoint& b) {
    if (!a.plan || !b.plan) return false;
    const double da = *a.achieved_deviation, db = *b.achieved_deviation;
    return da <= db && a.cut_edges <= b.cut_edges && (da < db || a.cut_edges < b.cut_edges);
}

inline std::vector<ParetoPoint> pareto_frontier(const std::vector<ParetoPoint>& points) {
    std::vector<ParetoPoint> out;
    for (const auto& p : points) {
        if (!p.plan) continue;
        bool dominated = false;
        for (const auto& q : points) dominated = dominated || dominates(q, p);
        if (!dominated) out.push_back(p);
    }
    return out;
}

/// Exact solve per deviation allowance (ascending), each warm-started with the
/// previous incumbent. Plans found at one allowance are feasible at any larger
/// one, so a point dominated by another adopts the dominating plan.
inline std::vector<ParetoPoint> pareto_sweep(const UnitGraph& graph, int k, const std::vector<double>& deviations,
                                             ExactOptions options, bool require_contiguity = true) {
    if (!std::is_sorted(deviations.begin(), deviations.end()))
        throw ConfigError("pareto deviations must be sorted ascending");
    std::vector<ParetoPoint> points;
    std::optional<Plan> previous = options.warm_start;
    for (double dev : deviations) {
        const Constraints c{k, dev, require_contiguity};
        options.warm_start = previous;
        const ExactResult r = exact_min_cut_edges(graph, c, options);
        ParetoPoint pt;
        pt.deviation = dev;
        pt.status = r.status;
        pt.lower_bound = r.lower_bound;
        if (r.plan) {
            pt.plan = r.plan;
            pt.cut_edges = *r.cut_edges;
            pt.achieved_deviation = max_deviation(*r.plan, graph);
            previous = r.plan;
        } else {
            pt.cut_edges = r.lower_bound;
        }
        points.push_back(std::move(pt));
    }
    for (bool changed = true; changed;) {
        changed = false;
        for (auto& p : points)
            for (const auto& q : points)
                if (&p != &q && dominates(q, p)) {
                    p.plan = q.plan;
                    p.cut_edges = q.cut_edges;
                    p.achieved_deviation = q.achieved_deviation;
                    changed = true;
                }
    }
    return points;
}

}  // namespace redistlab
