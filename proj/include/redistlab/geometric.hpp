#pragma once

// Partitioners driven by unit centroids: recursive splitlines, Lloyd's
// k-means (Voronoi cells), power diagrams balanced by hub weights, and the
// step back from a cell partition to a plan on units.

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>

#include "core.hpp"
#include "rng.hpp"

namespace redistlab {

struct Hub {
    Point position;
    double weight = 0.0;
};

struct GeometricPartition {
    std::vector<Hub> hubs;
    Plan assignment{0, 1};
    std::vector<double> objective_trace;  // lloyd: weighted SSE after each assignment
    std::vector<double> deviation_trace;  // power: max deviation after each assignment
    int iterations = 0;
    bool converged = false;
    bool balanced = false;
};

/// Power distance d(x,h)^2 - w_h; the nearest hub (lowest index on ties) wins.
inline Plan assign_to_hubs(const UnitGraph& graph, const std::vector<Hub>& hubs) {
    const auto& pts = graph.centroids();
    std::vector<District> labels(graph.size());
    for (UnitId u = 0; u < graph.size(); ++u) {
        District best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t h = 0; h < hubs.size(); ++h) {
            const double d = squared_distance(pts[u], hubs[h].position) - hubs[h].weight;
            if (d < best_d) {
                best_d = d;
                best = static_cast<District>(h);
            }
        }
        labels[u] = best;
    }
    return Plan(std::move(labels), static_cast<int>(hubs.size()));
}

/// Population-weighted sum of squared distances from each unit to its hub.
inline double kmeans_objective(const UnitGraph& graph, const Plan& plan, const std::vector<Hub>& hubs) {
    double total = 0;
    for (UnitId u = 0; u < graph.size(); ++u)
        total += static_cast<double>(graph.population(u)) * squared_distance(graph.centroid(u), hubs[plan[u]].position);
    return total;
}

namespace detail {

inline int distinct_centroid_count(const UnitGraph& graph) {
    std::vector<std::pair<double, double>> pts;
    for (const Point& p : graph.centroids()) pts.emplace_back(p.x, p.y);
    std::sort(pts.begin(), pts.end());
    return static_cast<int>(std::unique(pts.begin(), pts.end()) - pts.begin());
}

/// Population-weighted centroid of each cell; plain mean when a cell has no
/// population; nullopt entries for empty cells.
inline std::vector<std::optional<Point>> cell_centroids(const UnitGraph& graph, const Plan& plan) {
    const int k = plan.district_count();
    std::vector<double> wx(k, 0), wy(k, 0), w(k, 0), x(k, 0), y(k, 0);
    std::vector<int> count(k, 0);
    for (UnitId u = 0; u < graph.size(); ++u) {
        const District d = plan[u];
        const Point& p = graph.centroid(u);
        const double pop = static_cast<double>(graph.population(u));
        wx[d] += pop * p.x;
        wy[d] += pop * p.y;
        w[d] += pop;
        x[d] += p.x;
        y[d] += p.y;
        ++count[d];
    }
    std::vector<std::optional<Point>> out(k);
    for (int d = 0; d < k; ++d) {
        if (count[d] == 0) continue;
        out[d] = w[d] > 0 ? Point{wx[d] / w[d], wy[d] / w[d]} : Point{x[d] / count[d], y[d] / count[d]};
    }
    return out;
}

}  // namespace detail

/// k distinct unit centroids drawn uniformly.
inline std::vector<Hub> random_hubs(const UnitGraph& graph, int k, Rng& rng) {
    if (k < 1) throw ConfigError("k must be at least 1");
    if (k > detail::distinct_centroid_count(graph)) throw ConfigError("k exceeds the number of distinct centroids");
    std::vector<UnitId> order(graph.size());
    std::iota(order.begin(), order.end(), 0);
    shuffle(std::span<UnitId>(order), rng);
    std::vector<Hub> hubs;
    for (UnitId u : order) {
        const Point& p = graph.centroid(u);
        bool dup = false;
        for (const Hub& h : hubs) dup = dup || (h.position.x == p.x && h.position.y == p.y);
        if (!dup) hubs.push_back({p, 0.0});
        if (static_cast<int>(hubs.size()) == k) break;
    }
    return hubs;
}

/// Lloyd's algorithm on population-weighted centroids. An empty cell has its
/// hub moved to the unit farthest from its own hub.
inline GeometricPartition lloyd_kmeans(const UnitGraph& graph, std::vector<Hub> hubs, int max_iters, double tol) {
    const int k = static_cast<int>(hubs.size());
    if (k < 1) throw ConfigError("at least one hub is required");
    if (k > detail::distinct_centroid_count(graph)) throw ConfigError("k exceeds the number of distinct centroids");
    for (const Hub& h : hubs)
        if (!std::isfinite(h.position.x) || !std::isfinite(h.position.y)) throw ConfigError("hub coordinates must be finite");
    for (Hub& h : hubs) h.weight = 0;

    GeometricPartition out;
    for (int it = 0;; ++it) {
        Plan plan = assign_to_hubs(graph, hubs);
        // Re-seed empty cells one at a time.
        for (auto cells = detail::cell_centroids(graph, plan);;) {
            auto empty = std::find_if(cells.begin(), cells.end(), [](const auto& c) { return !c.has_value(); });
            if (empty == cells.end()) break;
            UnitId far = 0;
            double far_d = -1;
            for (UnitId u = 0; u < graph.size(); ++u) {
                const double d = squared_distance(graph.centroid(u), hubs[plan[u]].position);
                if (d > far_d) {
                    far_d = d;
                    far = u;
                }
            }
            hubs[empty - cells.begin()].position = graph.centroid(far);
            plan = assign_to_hubs(graph, hubs);
            cells = detail::cell_centroids(graph, plan);
        }
        out.objective_trace.push_back(kmeans_objective(graph, plan, hubs));
        out.assignment = plan;
        if (it >= max_iters) break;

        const auto cells = detail::cell_centroids(graph, plan);
        double moved = 0;
        for (int h = 0; h < k; ++h) {
            moved = std::max(moved, std::sqrt(squared_distance(hubs[h].position, *cells[h])));
            hubs[h].position = *cells[h];
        }
        if (moved < tol) {
            out.converged = true;
            break;
        }
        ++out.iterations;
    }
    out.hubs = std::move(hubs);
    return out;
}

// ---------------------------------------------------------------------------
// Power diagrams

struct PowerOptions {
    int max_iters = 500;
    double step = 1.0;        // initial weight step, in units of (area / k)
    double decay = 0.01;      // step_t = step / (1 + decay * t)
    bool move_hubs = true;    // Lloyd update of hub positions between weight updates
};

/// Alternates power-cell assignment, hub recentring and weight updates
///   w_h += step_t * S * (ideal - pop_h) / ideal,  S = bounding-box area / k
/// until every cell is within the deviation bound. Returns the best iterate
/// (smallest max deviation), flagged unbalanced if none met the bound.
inline GeometricPartition balance_power_diagram(const UnitGraph& graph, const Constraints& constraints,
                                                std::vector<Hub> hubs, const PowerOptions& options = {}) {
    constraints.check();
    if (static_cast<int>(hubs.size()) != constraints.k) throw ConfigError("hub count must equal k");
    if (graph.total_population() <= 0) throw DataError("degenerate instance");
    const auto& pts = graph.centroids();
    double x0 = pts[0].x, x1 = pts[0].x, y0 = pts[0].y, y1 = pts[0].y;
    for (const Point& p : pts) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    const double scale = std::max((x1 - x0 + 1e-9) * (y1 - y0 + 1e-9), 1e-9) / constraints.k;
    const double ideal = constraints.ideal(graph.total_population());
    const auto bounds = constraints.bounds(graph.total_population());

    GeometricPartition best;
    double best_dev = std::numeric_limits<double>::infinity();
    std::vector<double> trace;
    for (int it = 0; it <= options.max_iters; ++it) {
        Plan plan = assign_to_hubs(graph, hubs);
        const auto pops = district_populations(plan, graph);
        const double dev = max_deviation(pops, graph.total_population());
        trace.push_back(dev);
        const bool ok = std::all_of(pops.begin(), pops.end(), [&](Population p) { return p > 0 && bounds.admits(p); });
        if (ok || dev < best_dev) {
            best_dev = dev;
            best.hubs = hubs;
            best.assignment = plan;
            best.iterations = it;
            best.balanced = ok;
        }
        if (ok) break;
        const double step = options.step / (1.0 + options.decay * it);
        if (options.move_hubs) {
            const auto cells = detail::cell_centroids(graph, plan);
            for (std::size_t h = 0; h < hubs.size(); ++h)
                if (cells[h]) hubs[h].position = *cells[h];
        }
        for (std::size_t h = 0; h < hubs.size(); ++h)
            hubs[h].weight += step * scale * (ideal - static_cast<double>(pops[h])) / ideal;
    }
    best.deviation_trace = std::move(trace);
    best.converged = best.balanced;
    return best;
}

inline GeometricPartition balance_power_diagram(const UnitGraph& graph, const Constraints& constraints, Rng& rng,
                                                const PowerOptions& options = {}) {
    return balance_power_diagram(graph, constraints, random_hubs(graph, constraints.k, rng), options);
}

/// Units are atomic, so each goes to the cell holding its centroid; the plan
/// is returned only if it is valid.
inline std::optional<Plan> snap_to_units(const GeometricPartition& partition, const UnitGraph& graph,
                                         const Constraints& constraints) {
    if (partition.assignment.size() != graph.size()) throw DataError("partition does not match the instance");
    if (!partition.assignment.complete()) throw DataError("incomplete partition");
    if (partition.assignment.district_count() != constraints.k) throw ConfigError("partition has the wrong cell count");
    if (!is_valid(partition.assignment, graph, constraints)) return std::nullopt;
    return partition.assignment;
}

// ---------------------------------------------------------------------------
// Splitline

enum class SplitlineMode { shortest, sample };

struct SplitlineOptions {
    int angles = 180;
    SplitlineMode mode = SplitlineMode::shortest;
};

namespace detail {

inline double cross(const Point& o, const Point& a, const Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline std::vector<Point> convex_hull(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Point> hull(2 * pts.size());
    std::size_t m = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (m >= 2 && cross(hull[m - 2], hull[m - 1], pts[i]) <= 0) --m;
        hull[m++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, lower = m + 1; i-- > 0;) {
        while (m >= lower && cross(hull[m - 2], hull[m - 1], pts[i]) <= 0) --m;
        hull[m++] = pts[i];
    }
    hull.resize(m - 1);
    return hull;
}

/// Length of the chord {p : n.p = t} inside a convex polygon (or segment/point).
inline double chord_length(const std::vector<Point>& hull, double nx, double ny, double t) {
    std::vector<Point> hits;
    const std::size_t m = hull.size();
    for (std::size_t i = 0; i < m; ++i) {
        const Point& a = hull[i];
        const Point& b = hull[(i + 1) % m];
        const double fa = nx * a.x + ny * a.y - t, fb = nx * b.x + ny * b.y - t;
        if ((fa <= 0 && fb >= 0) || (fa >= 0 && fb <= 0)) {
            if (fa == fb) {
                hits.push_back(a);
                hits.push_back(b);
            } else {
                const double s = fa / (fa - fb);
                hits.push_back({a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)});
            }
        }
    }
    double best = 0;
    for (std::size_t i = 0; i < hits.size(); ++i)
        for (std::size_t j = i + 1; j < hits.size(); ++j) best = std::max(best, squared_distance(hits[i], hits[j]));
    return std::sqrt(best);
}

struct SplitCandidate {
    std::vector<UnitId> first, second;
    double length;
};

/// Splits `units` into groups destined for k1 and k2 districts.
inline std::optional<SplitCandidate> best_split(const UnitGraph& graph, const std::vector<UnitId>& units, int k1,
                                                int k2, const PopulationBounds& bounds,
                                                const SplitlineOptions& options, Rng* rng) {
    std::vector<Point> pts;
    for (UnitId u : units) pts.push_back(graph.centroid(u));
    const auto hull = convex_hull(pts);
    constexpr double eps = 1e-9;
    std::vector<SplitCandidate> feasible;
    std::optional<SplitCandidate> best;
    std::vector<std::pair<double, UnitId>> proj(units.size());
    for (int a = 0; a < options.angles; ++a) {
        const double theta = std::numbers::pi * a / options.angles;
        const double nx = std::cos(theta), ny = std::sin(theta);
        for (std::size_t i = 0; i < units.size(); ++i) proj[i] = {nx * pts[i].x + ny * pts[i].y, units[i]};
        std::sort(proj.begin(), proj.end());
        Population prefix = 0;
        Population total = 0;
        for (UnitId u : units) total += graph.population(u);
        for (std::size_t i = 0; i + 1 < proj.size(); ++i) {
            prefix += graph.population(proj[i].second);
            if (proj[i + 1].first - proj[i].first <= eps) continue;  // the line must pass between centroids
            // Either side may take the larger share.
            for (int flip = 0; flip < (k1 == k2 ? 1 : 2); ++flip) {
                const int low_k = flip ? k2 : k1, high_k = flip ? k1 : k2;
                const Population lo_pop = prefix, hi_pop = total - prefix;
                if (lo_pop < low_k * bounds.lower || lo_pop > low_k * bounds.upper) continue;
                if (hi_pop < high_k * bounds.lower || hi_pop > high_k * bounds.upper) continue;
                const double t = 0.5 * (proj[i].first + proj[i + 1].first);
                SplitCandidate c;
                c.length = chord_length(hull, nx, ny, t);
                for (std::size_t j = 0; j < proj.size(); ++j) (j <= i ? c.first : c.second).push_back(proj[j].second);
                if (flip) std::swap(c.first, c.second);
                if (options.mode == SplitlineMode::sample) {
                    feasible.push_back(std::move(c));
                } else if (!best || c.length < best->length - eps) {
                    best = std::move(c);
                }
            }
        }
    }
    if (options.mode == SplitlineMode::sample) {
        if (feasible.empty()) return std::nullopt;
        if (!rng) throw ConfigError("sampling splitline needs a random source");
        return std::move(feasible[rng->index(feasible.size())]);
    }
    return best;
}

inline bool splitline_recurse(const UnitGraph& graph, const std::vector<UnitId>& units, int k, District first_label,
                              const PopulationBounds& bounds, const SplitlineOptions& options, Rng* rng,
                              std::vector<District>& labels) {
    if (k == 1) {
        for (UnitId u : units) labels[u] = first_label;
        return true;
    }
    const int k1 = (k + 1) / 2, k2 = k / 2;
    auto split = best_split(graph, units, k1, k2, bounds, options, rng);
    if (!split) return false;
    std::sort(split->first.begin(), split->first.end());
    std::sort(split->second.begin(), split->second.end());
    return splitline_recurse(graph, split->first, k1, first_label, bounds, options, rng, labels) &&
           splitline_recurse(graph, split->second, k2, first_label + k1, bounds, options, rng, labels);
}

}  // namespace detail

/// Recursive bisection by straight lines splitting population ceil(k/2):floor(k/2).
/// Returns nullopt when some region has no feasible line at the angular
/// resolution, or when the result is not a valid plan.
inline std::optional<Plan> splitline(const UnitGraph& graph, const Constraints& constraints,
                                     const SplitlineOptions& options = {}, Rng* rng = nullptr) {
    constraints.check();
    if (!graph.has_centroids()) throw ConfigError("splitline needs unit centroids");
    if (options.angles < 1) throw ConfigError("splitline needs at least one angle");
    const auto bounds = constraints.bounds(graph.total_population());
    std::vector<UnitId> all(graph.size());
    std::iota(all.begin(), all.end(), 0);
    std::vector<District> labels(graph.size(), kUnassigned);
    if (!detail::splitline_recurse(graph, all, constraints.k, 0, bounds, options, rng, labels)) return std::nullopt;
    Plan plan(std::move(labels), constraints.k);
    if (!is_valid(plan, graph, constraints)) return std::nullopt;
    return plan;
}

}  // namespace redistlab
