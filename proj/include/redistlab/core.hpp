#pragma once

// Geography, plans, constraints and the scoring/validity predicates that
// every generator and optimizer in the library is measured against.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace redistlab {

// ---------------------------------------------------------------------------
// Errors

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed geography or file contents.
struct DataError : Error {
    using Error::Error;
};

/// Caller asked for something the inputs cannot support (e.g. a bounding-box
/// policy on a graph without centroids).
struct ConfigError : Error {
    using Error::Error;
};

/// A guard (node budget, time budget) stopped the computation.
struct BudgetExceeded : Error {
    using Error::Error;
};

using UnitId = int;
using District = int;
using Population = std::int64_t;

inline constexpr District kUnassigned = -1;

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline double squared_distance(const Point& a, const Point& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

/// Unordered adjacency pair, stored with a < b.
struct Edge {
    UnitId a = 0;
    UnitId b = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

// ---------------------------------------------------------------------------
// UnitGraph

/// Immutable geography: units 0..n-1 with populations, adjacency, and
/// optional centroids and county labels. Safe to share across threads.
class UnitGraph {
public:
    struct Attributes {
        std::optional<std::vector<Point>> centroids;
        std::optional<std::vector<std::string>> counties;
        std::vector<std::string> unit_names;       // empty or size n
        std::optional<std::vector<int>> zones;     // seed zones, any ints
        std::optional<std::vector<bool>> outer;    // units on the outer boundary
    };

    UnitGraph() = default;

    UnitGraph(std::string name, std::vector<Population> population, std::vector<Edge> edges,
              Attributes attributes = {})
        : name_(std::move(name)), population_(std::move(population)),
          centroids_(std::move(attributes.centroids)), unit_names_(std::move(attributes.unit_names)),
          zones_(std::move(attributes.zones)), outer_(std::move(attributes.outer)) {
        const int n = static_cast<int>(population_.size());
        for (int u = 0; u < n; ++u) {
            if (population_[u] < 0)
                throw DataError("unit " + std::to_string(u) + ": negative population");
        }
        if (centroids_ && static_cast<int>(centroids_->size()) != n)
            throw DataError("centroids must be given for all units or none");
        if (centroids_) {
            for (const Point& p : *centroids_)
                if (!std::isfinite(p.x) || !std::isfinite(p.y))
                    throw DataError("non-finite centroid coordinate");
        }
        if (!unit_names_.empty() && static_cast<int>(unit_names_.size()) != n)
            throw DataError("unit names must be given for all units or none");
        if (zones_ && static_cast<int>(zones_->size()) != n)
            throw DataError("zones must be given for all units or none");
        if (outer_ && static_cast<int>(outer_->size()) != n)
            throw DataError("outer flags must be given for all units or none");

        if (attributes.counties) {
            if (static_cast<int>(attributes.counties->size()) != n)
                throw DataError("county labels must be given for all units or none");
            std::map<std::string, int> ids;
            county_.emplace();
            county_->reserve(n);
            for (const auto& c : *attributes.counties) {
                auto [it, inserted] = ids.try_emplace(c, static_cast<int>(county_names_.size()));
                if (inserted) county_names_.push_back(c);
                county_->push_back(it->second);
            }
        }

        edges_.reserve(edges.size());
        for (Edge e : edges) {
            if (e.a < 0 || e.a >= n || e.b < 0 || e.b >= n)
                throw DataError("edge (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                                ") references an unknown unit");
            if (e.a == e.b) throw DataError("self-loop edge at unit " + std::to_string(e.a));
            if (e.a > e.b) std::swap(e.a, e.b);
            edges_.push_back(e);
        }
        std::sort(edges_.begin(), edges_.end());
        if (auto dup = std::adjacent_find(edges_.begin(), edges_.end()); dup != edges_.end())
            throw DataError("duplicate edge (" + std::to_string(dup->a) + "," +
                            std::to_string(dup->b) + ")");

        // CSR adjacency; each slot remembers which edge it came from.
        offsets_.assign(n + 1, 0);
        for (const Edge& e : edges_) {
            ++offsets_[e.a + 1];
            ++offsets_[e.b + 1];
        }
        std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
        adjacency_.resize(offsets_[n]);
        incident_.resize(offsets_[n]);
        std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
        for (int i = 0; i < static_cast<int>(edges_.size()); ++i) {
            const Edge& e = edges_[i];
            adjacency_[fill[e.a]] = e.b;
            incident_[fill[e.a]++] = i;
            adjacency_[fill[e.b]] = e.a;
            incident_[fill[e.b]++] = i;
        }
        total_population_ = std::accumulate(population_.begin(), population_.end(), Population{0});
    }

    const std::string& name() const noexcept { return name_; }
    int size() const noexcept { return static_cast<int>(population_.size()); }
    int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    std::span<const UnitId> neighbors(UnitId u) const {
        return {adjacency_.data() + offsets_[u], adjacency_.data() + offsets_[u + 1]};
    }
    /// Edge indices parallel to neighbors(u).
    std::span<const int> incident_edges(UnitId u) const {
        return {incident_.data() + offsets_[u], incident_.data() + offsets_[u + 1]};
    }
    int degree(UnitId u) const { return offsets_[u + 1] - offsets_[u]; }

    Population population(UnitId u) const { return population_[u]; }
    const std::vector<Population>& populations() const noexcept { return population_; }
    Population total_population() const noexcept { return total_population_; }

    bool has_centroids() const noexcept { return centroids_.has_value(); }
    const Point& centroid(UnitId u) const { return (*centroids_)[u]; }
    const std::vector<Point>& centroids() const {
        if (!centroids_) throw ConfigError("instance '" + name_ + "' has no centroids");
        return *centroids_;
    }

    bool has_counties() const noexcept { return county_.has_value(); }
    int county(UnitId u) const { return (*county_)[u]; }
    int county_count() const noexcept { return static_cast<int>(county_names_.size()); }
    const std::vector<std::string>& county_names() const noexcept { return county_names_; }

    const std::vector<std::string>& unit_names() const noexcept { return unit_names_; }

    bool has_zones() const noexcept { return zones_.has_value(); }
    const std::vector<int>& zones() const {
        if (!zones_) throw ConfigError("instance '" + name_ + "' has no zones");
        return *zones_;
    }

    bool has_outer_flags() const noexcept { return outer_.has_value(); }
    const std::vector<bool>& outer_flags() const {
        if (!outer_) throw ConfigError("instance '" + name_ + "' has no outer-boundary flags");
        return *outer_;
    }

    /// FNV-1a over populations and edges; identifies an instance in output files.
    std::uint64_t content_hash() const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        auto mix = [&h](std::uint64_t v) {
            for (int i = 0; i < 8; ++i) {
                h ^= (v >> (8 * i)) & 0xff;
                h *= 0x100000001b3ULL;
            }
        };
        mix(static_cast<std::uint64_t>(size()));
        for (Population p : population_) mix(static_cast<std::uint64_t>(p));
        for (const Edge& e : edges_) mix((static_cast<std::uint64_t>(e.a) << 32) | e.b);
        return h;
    }

private:
    std::string name_;
    std::vector<Population> population_;
    std::vector<Edge> edges_;
    std::vector<int> offsets_;
    std::vector<UnitId> adjacency_;
    std::vector<int> incident_;
    std::optional<std::vector<Point>> centroids_;
    std::optional<std::vector<int>> county_;
    std::vector<std::string> county_names_;
    std::vector<std::string> unit_names_;
    std::optional<std::vector<int>> zones_;
    std::optional<std::vector<bool>> outer_;
    Population total_population_ = 0;
};

// ---------------------------------------------------------------------------
// Plan

/// Assignment of units to districts 0..k-1 (kUnassigned while under
/// construction). A value type.
class Plan {
public:
    Plan() = default;
    Plan(int unit_count, int k) : labels_(unit_count, kUnassigned), k_(k) {
        if (k < 1) throw ConfigError("district count must be at least 1");
    }
    Plan(std::vector<District> labels, int k) : labels_(std::move(labels)), k_(k) {
        if (k < 1) throw ConfigError("district count must be at least 1");
        for (District d : labels_)
            if (d != kUnassigned && (d < 0 || d >= k_))
                throw DataError("district label " + std::to_string(d) + " out of range for k=" +
                                std::to_string(k_));
    }

    int size() const noexcept { return static_cast<int>(labels_.size()); }
    int district_count() const noexcept { return k_; }

    District operator[](UnitId u) const { return labels_[u]; }
    void assign(UnitId u, District d) { labels_[u] = d; }
    const std::vector<District>& labels() const noexcept { return labels_; }

    bool complete() const {
        return std::none_of(labels_.begin(), labels_.end(),
                            [](District d) { return d == kUnassigned; });
    }

    friend bool operator==(const Plan&, const Plan&) = default;

private:
    std::vector<District> labels_;
    int k_ = 1;
};

/// Relabel districts in order of their smallest unit id, giving one
/// representative per unlabeled partition.
inline Plan canonical(const Plan& plan) {
    std::vector<District> map(plan.district_count(), kUnassigned);
    std::vector<District> out(plan.size(), kUnassigned);
    District next = 0;
    for (UnitId u = 0; u < plan.size(); ++u) {
        District d = plan[u];
        if (d == kUnassigned) continue;
        if (map[d] == kUnassigned) map[d] = next++;
        out[u] = map[d];
    }
    return Plan(std::move(out), plan.district_count());
}

inline std::uint64_t plan_hash(const Plan& plan) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (District d : plan.labels()) {
        h ^= static_cast<std::uint64_t>(d + 1);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// ---------------------------------------------------------------------------
// Constraints

/// Integer population window a district must fall in.
struct PopulationBounds {
    Population lower = 0;
    Population upper = 0;

    bool admits(Population p) const noexcept { return p >= lower && p <= upper; }
};

struct Constraints {
    int k = 1;
    double deviation = 0.0;  // max fractional deviation from the ideal district population
    bool require_contiguity = true;

    double ideal(Population total) const { return static_cast<double>(total) / k; }

    /// |p - ideal| <= deviation * ideal, evaluated once into integer bounds.
    PopulationBounds bounds(Population total) const {
        const double ideal_pop = ideal(total);
        const double slack = deviation * ideal_pop;
        const double eps = 1e-9 * std::max(1.0, ideal_pop);
        return {static_cast<Population>(std::ceil(ideal_pop - slack - eps)),
                static_cast<Population>(std::floor(ideal_pop + slack + eps))};
    }

    void check() const {
        if (k < 1) throw ConfigError("district count must be at least 1");
        if (!(deviation >= 0.0)) throw ConfigError("deviation must be nonnegative");
    }
};

// ---------------------------------------------------------------------------
// Scoring

namespace detail {

inline void require_sized(const Plan& plan, const UnitGraph& graph) {
    if (plan.size() != graph.size())
        throw DataError("plan has " + std::to_string(plan.size()) + " units but instance has " +
                        std::to_string(graph.size()));
}

inline void require_complete(const Plan& plan, const UnitGraph& graph) {
    require_sized(plan, graph);
    if (!plan.complete()) throw DataError("incomplete plan");
}

}  // namespace detail

inline int cut_edges(const Plan& plan, const UnitGraph& graph) {
    detail::require_complete(plan, graph);
    int cut = 0;
    for (const Edge& e : graph.edges()) cut += plan[e.a] != plan[e.b];
    return cut;
}

/// Per-edge cut indicator, parallel to graph.edges().
inline std::vector<bool> cut_edge_mask(const Plan& plan, const UnitGraph& graph) {
    detail::require_complete(plan, graph);
    std::vector<bool> mask(graph.edge_count());
    for (int i = 0; i < graph.edge_count(); ++i) {
        const Edge& e = graph.edges()[i];
        mask[i] = plan[e.a] != plan[e.b];
    }
    return mask;
}

inline std::vector<Population> district_populations(const Plan& plan, const UnitGraph& graph) {
    detail::require_complete(plan, graph);
    std::vector<Population> pops(plan.district_count(), 0);
    for (UnitId u = 0; u < graph.size(); ++u) pops[plan[u]] += graph.population(u);
    return pops;
}

inline double max_deviation(std::span<const Population> pops, Population total) {
    if (total <= 0) throw DataError("degenerate instance: total population is zero");
    const double ideal = static_cast<double>(total) / static_cast<double>(pops.size());
    double worst = 0.0;
    for (Population p : pops) worst = std::max(worst, std::abs(static_cast<double>(p) - ideal) / ideal);
    return worst;
}

inline double max_deviation(const Plan& plan, const UnitGraph& graph) {
    auto pops = district_populations(plan, graph);
    return max_deviation(pops, graph.total_population());
}

inline double max_deviation(const Plan& plan, const UnitGraph& graph, const Constraints& constraints) {
    if (constraints.k != plan.district_count())
        throw ConfigError("plan and constraints disagree on the district count");
    return max_deviation(plan, graph);
}

/// Units labelled `label` (assigned ones only) induce a connected subgraph.
inline bool is_contiguous(const Plan& plan, const UnitGraph& graph, District label) {
    detail::require_sized(plan, graph);
    UnitId start = -1;
    int members = 0;
    for (UnitId u = 0; u < plan.size(); ++u) {
        if (plan[u] == label) {
            if (start < 0) start = u;
            ++members;
        }
    }
    if (start < 0) throw DataError("empty district " + std::to_string(label));
    std::vector<char> seen(plan.size(), 0);
    std::vector<UnitId> stack{start};
    seen[start] = 1;
    int reached = 1;
    while (!stack.empty()) {
        UnitId u = stack.back();
        stack.pop_back();
        for (UnitId v : graph.neighbors(u)) {
            if (!seen[v] && plan[v] == label) {
                seen[v] = 1;
                ++reached;
                stack.push_back(v);
            }
        }
    }
    return reached == members;
}

inline std::vector<UnitId> boundary_units(const Plan& plan, const UnitGraph& graph) {
    detail::require_complete(plan, graph);
    std::vector<UnitId> out;
    for (UnitId u = 0; u < graph.size(); ++u) {
        for (UnitId v : graph.neighbors(u)) {
            if (plan[v] != plan[u]) {
                out.push_back(u);
                break;
            }
        }
    }
    return out;
}

/// True when the district containing `unit` stays nonempty and connected once
/// `unit` leaves it. Assumes that district is connected now; then it suffices
/// that the unit's same-district neighbours still reach each other.
inline bool stays_connected_without(const Plan& plan, const UnitGraph& graph, UnitId unit) {
    const District home = plan[unit];
    thread_local std::vector<unsigned> mark;
    thread_local unsigned stamp = 0;
    if (mark.size() < static_cast<std::size_t>(graph.size())) mark.assign(graph.size(), 0);
    if (stamp >= std::numeric_limits<unsigned>::max() - 2) {
        std::fill(mark.begin(), mark.end(), 0);
        stamp = 0;
    }
    ++stamp;

    int targets = 0;
    UnitId start = -1;
    for (UnitId v : graph.neighbors(unit)) {
        if (plan[v] == home && mark[v] != stamp) {
            mark[v] = stamp;  // marks "target not yet reached"
            ++targets;
            start = v;
        }
    }
    if (targets == 0) return false;  // unit was the whole district
    if (targets == 1) return true;

    const unsigned visited = ++stamp;
    std::vector<UnitId> stack{start};
    const unsigned target_stamp = visited - 1;
    int reached = 1;
    mark[start] = visited;
    mark[unit] = visited;
    while (!stack.empty() && reached < targets) {
        UnitId u = stack.back();
        stack.pop_back();
        for (UnitId v : graph.neighbors(u)) {
            if (plan[v] != home || mark[v] == visited) continue;
            if (mark[v] == target_stamp) ++reached;
            mark[v] = visited;
            stack.push_back(v);
        }
    }
    return reached == targets;
}

struct ScoreReport {
    bool complete = false;
    std::optional<int> cut_edges;  // absent for incomplete plans
    std::vector<Population> district_populations;
    double max_deviation = 0.0;
    std::vector<bool> contiguous;
    bool valid = false;
};

/// Never throws on an invalid plan: invalidity is reported in the result.
inline ScoreReport validate(const Plan& plan, const UnitGraph& graph, const Constraints& constraints) {
    ScoreReport report;
    const int k = plan.district_count();
    report.district_populations.assign(k, 0);
    report.contiguous.assign(k, false);
    if (plan.size() != graph.size() || k != constraints.k) return report;

    report.complete = plan.complete();
    std::vector<int> members(k, 0);
    for (UnitId u = 0; u < plan.size(); ++u) {
        if (plan[u] == kUnassigned) continue;
        report.district_populations[plan[u]] += graph.population(u);
        ++members[plan[u]];
    }
    for (District d = 0; d < k; ++d)
        report.contiguous[d] = members[d] > 0 && is_contiguous(plan, graph, d);
    if (graph.total_population() > 0)
        report.max_deviation = max_deviation(report.district_populations, graph.total_population());
    if (!report.complete) return report;

    report.cut_edges = cut_edges(plan, graph);
    const PopulationBounds bounds = constraints.bounds(graph.total_population());
    bool ok = graph.total_population() > 0;
    for (District d = 0; d < k; ++d) {
        ok = ok && members[d] > 0 && bounds.admits(report.district_populations[d]);
        if (constraints.require_contiguity) ok = ok && report.contiguous[d];
    }
    report.valid = ok;
    return report;
}

inline bool is_valid(const Plan& plan, const UnitGraph& graph, const Constraints& constraints) {
    return validate(plan, graph, constraints).valid;
}

}  // namespace redistlab
