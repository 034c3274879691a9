#pragma once

// Plan generators that start from a blank map: independent random labels,
// flood fill (one district at a time or all at once), and iterative merging
// followed by population rebalancing.

#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <set>

#include "core.hpp"
#include "rng.hpp"

namespace redistlab {

// ---------------------------------------------------------------------------
// Random assignment and rejection

inline Plan random_assignment(const UnitGraph& graph, int k, Rng& rng) {
    if (k < 1) throw ConfigError("district count must be at least 1");
    std::vector<District> labels(graph.size());
    for (auto& d : labels) d = static_cast<District>(rng.index(static_cast<std::size_t>(k)));
    return Plan(std::move(labels), k);
}

struct SampleRun {
    std::uint64_t seed = 0;
    std::uint64_t attempts = 0;
    std::uint64_t successes = 0;
    std::vector<Plan> plans;

    double acceptance_rate() const {
        return attempts ? static_cast<double>(successes) / static_cast<double>(attempts) : 0.0;
    }
    bool exhausted() const { return successes == 0; }
};

/// A generator returns a plan or nullopt when it rejects internally.
using PlanGenerator = std::function<std::optional<Plan>(Rng&)>;

/// Draws until `target` valid plans are kept or `max_attempts` draws are spent.
/// Zero successes is reported through the run, not thrown.
inline SampleRun rejection_sample(const UnitGraph& graph, const Constraints& constraints,
                                  const PlanGenerator& generator, std::uint64_t max_attempts, Rng& rng,
                                  std::uint64_t target = 1) {
    if (max_attempts < 1) throw ConfigError("max_attempts must be at least 1");
    SampleRun run;
    run.seed = rng.seed();
    while (run.attempts < max_attempts && run.successes < target) {
        ++run.attempts;
        auto plan = generator(rng);
        if (plan && is_valid(*plan, graph, constraints)) {
            ++run.successes;
            run.plans.push_back(std::move(*plan));
        }
    }
    return run;
}

// ---------------------------------------------------------------------------
// Flood fill

enum class FloodMode { district_by_district, whole_plan };
enum class SpreadRule { uniform, bounding_box, county_preserving };
enum class SeedRule { uniform, boundary, zones };

struct FloodFillPolicy {
    FloodMode mode = FloodMode::district_by_district;
    SpreadRule spread = SpreadRule::uniform;
    SeedRule seed = SeedRule::uniform;
    int max_restarts = 1;
    // District-by-district only: when false the last district is not grown
    // but simply takes whatever is left.
    bool grow_last = true;
};

namespace detail {

inline std::vector<UnitId> convex_hull_units(const UnitGraph& graph) {
    const auto& pts = graph.centroids();
    std::vector<UnitId> idx(graph.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](UnitId a, UnitId b) {
        return pts[a].x < pts[b].x || (pts[a].x == pts[b].x && pts[a].y < pts[b].y);
    });
    auto cross = [&](UnitId o, UnitId a, UnitId b) {
        return (pts[a].x - pts[o].x) * (pts[b].y - pts[o].y) - (pts[a].y - pts[o].y) * (pts[b].x - pts[o].x);
    };
    // Monotone chain keeping collinear boundary points.
    std::vector<UnitId> hull;
    for (int pass = 0; pass < 2; ++pass) {
        const std::size_t base = hull.size();
        for (UnitId u : idx) {
            while (hull.size() >= base + 2 && cross(hull[hull.size() - 2], hull.back(), u) < 0) hull.pop_back();
            hull.push_back(u);
        }
        std::reverse(idx.begin(), idx.end());
    }
    std::sort(hull.begin(), hull.end());
    hull.erase(std::unique(hull.begin(), hull.end()), hull.end());
    return hull;
}

/// Units on the outer edge of the map: explicit flags when the instance has
/// them, else the convex hull of the centroids.
inline std::vector<UnitId> outer_units(const UnitGraph& graph) {
    if (graph.has_outer_flags()) {
        std::vector<UnitId> out;
        for (UnitId u = 0; u < graph.size(); ++u)
            if (graph.outer_flags()[u]) out.push_back(u);
        return out;
    }
    if (graph.has_centroids()) return convex_hull_units(graph);
    throw ConfigError("boundary seeding needs outer-boundary flags or centroids");
}

/// Zone index 0..k-1 per unit (zone values sorted ascending).
inline std::vector<int> zone_index(const UnitGraph& graph, int k) {
    const auto& zones = graph.zones();
    std::vector<int> distinct(zones.begin(), zones.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (static_cast<int>(distinct.size()) != k)
        throw ConfigError("zone seeding needs exactly k=" + std::to_string(k) + " nonempty zones, instance has " +
                          std::to_string(distinct.size()));
    std::vector<int> out(zones.size());
    for (std::size_t u = 0; u < zones.size(); ++u)
        out[u] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), zones[u]) - distinct.begin());
    return out;
}

class FloodFill {
public:
    FloodFill(const UnitGraph& graph, const Constraints& constraints, const FloodFillPolicy& policy)
        : graph_(graph), policy_(policy), k_(constraints.k), bounds_(constraints.bounds(graph.total_population())) {
        if (policy.max_restarts < 1) throw ConfigError("max_restarts must be positive");
        if (policy.spread == SpreadRule::bounding_box && !graph.has_centroids())
            throw ConfigError("bounding-box spread needs unit centroids");
        if (policy.spread == SpreadRule::county_preserving && !graph.has_counties())
            throw ConfigError("county-preserving spread needs county labels");
        if (policy.seed == SeedRule::zones) zone_ = zone_index(graph, k_);
        if (policy.seed == SeedRule::boundary) {
            outer_.assign(graph.size(), false);
            for (UnitId u : outer_units(graph)) outer_[u] = true;
        }
    }

    std::optional<Plan> run(Rng& rng) {
        for (int attempt = 0; attempt < policy_.max_restarts; ++attempt) {
            reset();
            const bool ok = policy_.mode == FloodMode::district_by_district ? grow_one_at_a_time(rng)
                                                                            : grow_all(rng);
            if (!ok) continue;
            Plan plan(label_, k_);
            if (valid_with_bounds(plan)) return plan;
        }
        return std::nullopt;
    }

private:
    void reset() {
        label_.assign(graph_.size(), kUnassigned);
        members_.assign(k_, {});
        pop_.assign(k_, 0);
        unassigned_ = graph_.size();
    }

    bool valid_with_bounds(const Plan& plan) const {
        auto pops = district_populations(plan, graph_);
        for (District d = 0; d < k_; ++d) {
            if (members_[d].empty() || !bounds_.admits(pops[d])) return false;
            if (!is_contiguous(plan, graph_, d)) return false;
        }
        return true;
    }

    void annex(District d, UnitId u) {
        label_[u] = d;
        members_[d].push_back(u);
        pop_[d] += graph_.population(u);
        --unassigned_;
    }

    std::optional<UnitId> pick_seed(District d, Rng& rng) const {
        std::vector<UnitId> pool;
        for (UnitId u = 0; u < graph_.size(); ++u) {
            if (label_[u] != kUnassigned) continue;
            if (policy_.seed == SeedRule::zones && zone_[u] != d) continue;
            if (policy_.seed == SeedRule::boundary && !outer_[u]) continue;
            pool.push_back(u);
        }
        if (pool.empty() && policy_.seed == SeedRule::boundary) {
            for (UnitId u = 0; u < graph_.size(); ++u)
                if (label_[u] == kUnassigned) pool.push_back(u);
        }
        if (pool.empty()) return std::nullopt;
        return pool[rng.index(pool.size())];
    }

    /// Unassigned neighbours of district d that fit under the upper bound.
    std::vector<UnitId> annexable(District d) {
        ++stamp_;
        if (seen_.size() != static_cast<std::size_t>(graph_.size())) seen_.assign(graph_.size(), 0);
        std::vector<UnitId> out;
        for (UnitId m : members_[d]) {
            for (UnitId v : graph_.neighbors(m)) {
                if (label_[v] != kUnassigned || seen_[v] == stamp_) continue;
                seen_[v] = stamp_;
                if (pop_[d] + graph_.population(v) <= bounds_.upper) out.push_back(v);
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    UnitId choose_spread(District d, const std::vector<UnitId>& options, Rng& rng) const {
        std::vector<UnitId> preferred;
        if (policy_.spread == SpreadRule::bounding_box) {
            double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
            for (UnitId m : members_[d]) {
                const Point& p = graph_.centroid(m);
                x0 = std::min(x0, p.x);
                x1 = std::max(x1, p.x);
                y0 = std::min(y0, p.y);
                y1 = std::max(y1, p.y);
            }
            constexpr double eps = 1e-9;
            for (UnitId u : options) {
                const Point& p = graph_.centroid(u);
                if (p.x >= x0 - eps && p.x <= x1 + eps && p.y >= y0 - eps && p.y <= y1 + eps) preferred.push_back(u);
            }
        } else if (policy_.spread == SpreadRule::county_preserving) {
            std::set<int> counties;
            for (UnitId m : members_[d]) counties.insert(graph_.county(m));
            for (UnitId u : options)
                if (counties.count(graph_.county(u))) preferred.push_back(u);
        }
        const auto& pool = preferred.empty() ? options : preferred;
        return pool[rng.index(pool.size())];
    }

    bool grow_one_at_a_time(Rng& rng) {
        for (District d = 0; d < k_; ++d) {
            if (d == k_ - 1 && !policy_.grow_last) {
                for (UnitId u = 0; u < graph_.size(); ++u)
                    if (label_[u] == kUnassigned) annex(d, u);
                break;
            }
            auto seed = pick_seed(d, rng);
            if (!seed) return false;
            annex(d, *seed);
            for (auto options = annexable(d); !options.empty(); options = annexable(d))
                annex(d, choose_spread(d, options, rng));
            if (pop_[d] < bounds_.lower) return false;
        }
        return unassigned_ == 0;
    }

    bool grow_all(Rng& rng) {
        for (District d = 0; d < k_; ++d) {
            auto seed = pick_seed(d, rng);
            if (!seed) return false;
            annex(d, *seed);
        }
        while (true) {
            std::vector<District> under;
            for (District d = 0; d < k_; ++d)
                if (pop_[d] < bounds_.lower) under.push_back(d);
            if (under.empty()) break;
            const District d = under[rng.index(under.size())];
            auto options = annexable(d);
            if (options.empty()) return false;
            annex(d, choose_spread(d, options, rng));
        }
        // Every district is within bounds; hand out leftovers while room remains.
        while (unassigned_ > 0) {
            std::vector<District> growable;
            for (District d = 0; d < k_; ++d)
                if (!annexable(d).empty()) growable.push_back(d);
            if (growable.empty()) return false;
            const District d = growable[rng.index(growable.size())];
            annex(d, choose_spread(d, annexable(d), rng));
        }
        return true;
    }

    const UnitGraph& graph_;
    FloodFillPolicy policy_;
    int k_;
    PopulationBounds bounds_;
    std::vector<int> zone_;
    std::vector<bool> outer_;
    std::vector<District> label_;
    std::vector<std::vector<UnitId>> members_;
    std::vector<Population> pop_;
    int unassigned_ = 0;
    std::vector<unsigned> seen_;
    unsigned stamp_ = 0;
};

}  // namespace detail

/// One flood-fill draw. Returns nullopt (rejection) when the fill gets stuck or
/// leaves units that cannot form valid districts.
inline std::optional<Plan> flood_fill(const UnitGraph& graph, const Constraints& constraints,
                                      const FloodFillPolicy& policy, Rng& rng) {
    constraints.check();
    detail::FloodFill fill(graph, constraints, policy);
    return fill.run(rng);
}

/// Reusable generator bound to one graph/policy (validates the policy once).
inline PlanGenerator flood_fill_generator(const UnitGraph& graph, const Constraints& constraints,
                                          const FloodFillPolicy& policy) {
    auto fill = std::make_shared<detail::FloodFill>(graph, constraints, policy);
    return [fill](Rng& rng) { return fill->run(rng); };
}

// ---------------------------------------------------------------------------
// Rebalancing

struct RebalanceResult {
    Plan plan;  // best effort on failure
    bool success = false;
    int moves = 0;
};

/// Single-unit, contiguity-preserving moves along district boundaries, always
/// taking the move that lowers the sum of squared deviations from the ideal
/// the most (ties broken at random); zero-gain moves are allowed to cross
/// plateaus. Stops when every district is within bounds or after `budget` moves.
inline RebalanceResult rebalance(const Plan& start, const UnitGraph& graph, const Constraints& constraints,
                                 int budget, Rng& rng) {
    detail::require_complete(start, graph);
    const PopulationBounds bounds = constraints.bounds(graph.total_population());
    RebalanceResult result{start, false, 0};
    Plan& plan = result.plan;
    auto pops = district_populations(plan, graph);
    auto feasible = [&] { return std::all_of(pops.begin(), pops.end(), [&](Population p) { return bounds.admits(p); }); };

    struct Move {
        UnitId unit;
        District to;
        long double gain;  // change in sum of squared deviations (negative is better)
    };
    while (!feasible()) {
        if (result.moves >= budget) return result;
        std::vector<Move> moves;
        for (UnitId u = 0; u < graph.size(); ++u) {
            const District from = plan[u];
            const Population p = graph.population(u);
            District seen_to[16];
            int seen_count = 0;
            for (UnitId v : graph.neighbors(u)) {
                const District to = plan[v];
                if (to == from) continue;
                if (std::find(seen_to, seen_to + seen_count, to) != seen_to + seen_count) continue;
                if (seen_count < 16) seen_to[seen_count++] = to;
                const long double gain = 2.0L * p * (static_cast<long double>(p) + pops[to] - pops[from]);
                if (gain <= 0 && p > 0) moves.push_back({u, to, gain});
            }
        }
        // Random order, then stable sort by gain: ties are broken at random.
        shuffle(std::span<Move>(moves), rng);
        std::stable_sort(moves.begin(), moves.end(), [](const Move& a, const Move& b) { return a.gain < b.gain; });
        bool moved = false;
        for (const Move& m : moves) {
            if (!stays_connected_without(plan, graph, m.unit)) continue;
            pops[plan[m.unit]] -= graph.population(m.unit);
            pops[m.to] += graph.population(m.unit);
            plan.assign(m.unit, m.to);
            ++result.moves;
            moved = true;
            break;
        }
        if (!moved) return result;
    }
    result.success = true;
    return result;
}

// ---------------------------------------------------------------------------
// Iterative merging

namespace detail {

/// Merges regions (connected unit groups labelled 0..R-1) pairwise until k
/// remain: a uniformly random region absorbs its adjacent region with the
/// closest population-weighted centroid (ties: smaller smallest-unit id), or a
/// random adjacent region when `closest` is false. Returns district labels in
/// smallest-unit-id order, or nullopt when fewer merges are possible.
inline std::optional<std::vector<District>> merge_regions(const UnitGraph& graph, const std::vector<int>& region,
                                                          int region_count, int k, bool closest, Rng& rng) {
    if (closest && !graph.has_centroids()) throw ConfigError("closest-neighbour merging needs unit centroids");
    struct Aggregate {
        UnitId first = std::numeric_limits<UnitId>::max();
        Population pop = 0;
        double wx = 0, wy = 0, x = 0, y = 0;
        int count = 0;
        std::set<int> adjacent;
        bool alive = true;
        Point centroid() const {
            if (pop > 0) return {wx / static_cast<double>(pop), wy / static_cast<double>(pop)};
            return {x / count, y / count};
        }
    };
    std::vector<Aggregate> agg(region_count);
    for (UnitId u = 0; u < graph.size(); ++u) {
        Aggregate& a = agg[region[u]];
        a.first = std::min(a.first, u);
        a.pop += graph.population(u);
        ++a.count;
        if (graph.has_centroids()) {
            const Point& p = graph.centroid(u);
            a.wx += p.x * static_cast<double>(graph.population(u));
            a.wy += p.y * static_cast<double>(graph.population(u));
            a.x += p.x;
            a.y += p.y;
        }
    }
    for (const Edge& e : graph.edges()) {
        const int ra = region[e.a], rb = region[e.b];
        if (ra != rb) {
            agg[ra].adjacent.insert(rb);
            agg[rb].adjacent.insert(ra);
        }
    }
    std::vector<int> parent(region_count);
    std::iota(parent.begin(), parent.end(), 0);
    int alive = region_count;
    while (alive > k) {
        std::vector<int> candidates;
        for (int r = 0; r < region_count; ++r)
            if (agg[r].alive && !agg[r].adjacent.empty()) candidates.push_back(r);
        if (candidates.empty()) return std::nullopt;
        const int a = candidates[rng.index(candidates.size())];
        int b = -1;
        if (closest) {
            const Point ca = agg[a].centroid();
            double best = std::numeric_limits<double>::infinity();
            for (int r : agg[a].adjacent) {
                const double d = squared_distance(ca, agg[r].centroid());
                if (d < best || (d == best && agg[r].first < agg[b].first)) {
                    best = d;
                    b = r;
                }
            }
        } else {
            auto it = agg[a].adjacent.begin();
            std::advance(it, static_cast<long>(rng.index(agg[a].adjacent.size())));
            b = *it;
        }
        // Absorb b into a.
        Aggregate& A = agg[a];
        Aggregate& B = agg[b];
        A.first = std::min(A.first, B.first);
        A.pop += B.pop;
        A.wx += B.wx;
        A.wy += B.wy;
        A.x += B.x;
        A.y += B.y;
        A.count += B.count;
        for (int r : B.adjacent) {
            agg[r].adjacent.erase(b);
            if (r != a) {
                agg[r].adjacent.insert(a);
                A.adjacent.insert(r);
            }
        }
        A.adjacent.erase(b);
        B.adjacent.clear();
        B.alive = false;
        parent[b] = a;
        --alive;
    }
    auto find = [&](int r) {
        while (parent[r] != r) r = parent[r] = parent[parent[r]];
        return r;
    };
    // Canonical labels: by smallest unit id.
    std::vector<District> label_of(region_count, kUnassigned);
    std::vector<District> labels(graph.size());
    District next = 0;
    for (UnitId u = 0; u < graph.size(); ++u) {
        const int root = find(region[u]);
        if (label_of[root] == kUnassigned) label_of[root] = next++;
        labels[u] = label_of[root];
    }
    if (next != k) return std::nullopt;
    return labels;
}

}  // namespace detail

struct MergeOptions {
    bool closest = true;  // merge with the centroid-closest neighbour; random neighbour otherwise
    int rebalance_budget = -1;  // < 0: 4 * unit count
};

/// Iterative merging from single units down to k aggregates, then rebalance.
inline std::optional<Plan> iterative_merge(const UnitGraph& graph, const Constraints& constraints, Rng& rng,
                                           const MergeOptions& options = {}) {
    constraints.check();
    if (constraints.k > graph.size()) return std::nullopt;
    std::vector<int> region(graph.size());
    std::iota(region.begin(), region.end(), 0);
    auto labels = detail::merge_regions(graph, region, graph.size(), constraints.k, options.closest, rng);
    if (!labels) return std::nullopt;
    Plan plan(std::move(*labels), constraints.k);
    const int budget = options.rebalance_budget < 0 ? 4 * graph.size() : options.rebalance_budget;
    auto balanced = rebalance(plan, graph, constraints, budget, rng);
    if (!balanced.success || !is_valid(balanced.plan, graph, constraints)) return std::nullopt;
    return std::move(balanced.plan);
}

}  // namespace redistlab
