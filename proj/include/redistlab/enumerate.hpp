#pragma once

// Exhaustive enumeration of every contiguous, population-feasible partition
// of a graph into k unlabeled districts.
//
// Districts are emitted in canonical form: district d is the one holding the
// smallest unit not covered by districts 0..d-1. The search fixes that unit as
// the root of district d and enumerates every connected unit set containing
// it exactly once (candidate-extension with banning), pruning when the
// population window is exceeded or when the still-unassigned remainder splits
// into pieces that cannot be tiled by the remaining districts.

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <thread>
#include <vector>

#include "core.hpp"

namespace redistlab {

/// 6x6 into 4 districts needs ~2.1e7 nodes and into 6 needs ~7.7e6; 10x10
/// into 4 trips this guard.
inline constexpr std::uint64_t kDefaultEnumerationNodeBudget = 100'000'000ULL;

struct EnumerationOptions {
    std::uint64_t node_budget = kDefaultEnumerationNodeBudget;
    bool collect = false;  // keep every plan in EnumerationResult::plans
    int threads = 1;
};

struct EnumerationResult {
    std::uint64_t count = 0;
    std::vector<Plan> plans;  // filled only when collecting
    std::map<int, std::uint64_t> cut_edge_histogram;
    std::uint64_t nodes = 0;
    std::uint64_t instance_hash = 0;
    Constraints constraints;
};

/// Thrown when the node budget runs out; carries the partial (invalid) count.
struct EnumerationBudgetExceeded : BudgetExceeded {
    std::uint64_t partial_count;
    std::uint64_t nodes;
    EnumerationBudgetExceeded(std::uint64_t partial, std::uint64_t nodes_visited)
        : BudgetExceeded("combinatorial explosion guard: node budget exhausted after " +
                         std::to_string(nodes_visited) + " nodes (partial count " +
                         std::to_string(partial) + " is incomplete)"),
          partial_count(partial), nodes(nodes_visited) {}
};

namespace detail {

class PartitionEnumerator {
public:
    using Emit = std::function<void(const std::vector<District>&)>;

    PartitionEnumerator(const UnitGraph& graph, const Constraints& constraints,
                        std::atomic<std::uint64_t>& nodes, std::uint64_t budget)
        : graph_(graph), k_(constraints.k), bounds_(constraints.bounds(graph.total_population())),
          label_(graph.size(), kUnassigned),
          in_cand_(constraints.k, std::vector<char>(graph.size(), 0)),
          banned_(constraints.k, std::vector<int>(graph.size(), 0)),
          seen_(graph.size(), 0), remaining_units_(graph.size()),
          remaining_pop_(graph.total_population()), nodes_(nodes), budget_(budget) {}

    /// Full search; calls emit for every plan.
    void run(Emit emit) {
        emit_ = std::move(emit);
        descend(0);
    }

    /// Lists every feasible first district (the one containing unit 0).
    std::vector<std::vector<UnitId>> first_districts() {
        std::vector<std::vector<UnitId>> out;
        collect_roots_ = &out;
        descend(0);
        collect_roots_ = nullptr;
        return out;
    }

    /// Search below a fixed first district.
    void run_below(const std::vector<UnitId>& first, Emit emit) {
        emit_ = std::move(emit);
        for (UnitId u : first) take(u, 0);
        descend(1);
        for (UnitId u : first) release(u);
    }

private:
    void take(UnitId u, District d) {
        label_[u] = d;
        --remaining_units_;
        remaining_pop_ -= graph_.population(u);
    }
    void release(UnitId u) {
        label_[u] = kUnassigned;
        ++remaining_units_;
        remaining_pop_ += graph_.population(u);
    }

    void tick() {
        if (++local_nodes_ == 4096) {
            const auto total = nodes_.fetch_add(local_nodes_) + local_nodes_;
            local_nodes_ = 0;
            if (total > budget_) throw BudgetExceeded("node budget");
        }
    }

    UnitId smallest_unassigned() const {
        for (UnitId u = 0; u < graph_.size(); ++u)
            if (label_[u] == kUnassigned) return u;
        return -1;
    }

    void descend(District d) {
        if (remaining_units_ == 0) {
            if (d == k_) emit_(label_);
            return;
        }
        if (d == k_) return;
        const UnitId root = smallest_unassigned();
        if (d == k_ - 1) {
            finish_last(d, root);
            return;
        }
        take(root, d);
        members_.push_back(root);
        auto& in_cand = in_cand_[d];
        std::vector<UnitId> cand;
        for (UnitId w : graph_.neighbors(root)) {
            if (label_[w] == kUnassigned && !in_cand[w]) {
                in_cand[w] = 1;
                cand.push_back(w);
            }
        }
        extend(d, graph_.population(root), cand);
        for (UnitId w : cand) in_cand[w] = 0;
        members_.pop_back();
        release(root);
    }

    // Remaining units must form exactly one feasible connected district.
    void finish_last(District d, UnitId root) {
        tick();
        if (!bounds_.admits(remaining_pop_)) return;
        std::vector<UnitId> stack{root}, region;
        seen_[root] = ++stamp_;
        while (!stack.empty()) {
            UnitId u = stack.back();
            stack.pop_back();
            region.push_back(u);
            for (UnitId w : graph_.neighbors(u)) {
                if (label_[w] == kUnassigned && seen_[w] != stamp_) {
                    seen_[w] = stamp_;
                    stack.push_back(w);
                }
            }
        }
        if (static_cast<int>(region.size()) != remaining_units_) return;
        for (UnitId u : region) take(u, d);
        emit_(label_);
        for (UnitId u : region) release(u);
    }

    void extend(District d, Population pop, const std::vector<UnitId>& cand) {
        tick();
        if (pop >= bounds_.lower && remainder_feasible(k_ - d - 1)) {
            if (collect_roots_ && d == 0)
                collect_roots_->push_back(members_);
            else
                descend(d + 1);
        }
        auto& in_cand = in_cand_[d];
        auto& banned = banned_[d];
        std::vector<UnitId> newly_banned;
        for (std::size_t i = 0; i < cand.size(); ++i) {
            const UnitId c = cand[i];
            if (pop + graph_.population(c) > bounds_.upper) {
                ++banned[c];
                newly_banned.push_back(c);
                continue;
            }
            take(c, d);
            members_.push_back(c);
            std::vector<UnitId> next(cand.begin() + static_cast<std::ptrdiff_t>(i) + 1, cand.end());
            const std::size_t inherited = next.size();
            for (UnitId w : graph_.neighbors(c)) {
                if (label_[w] == kUnassigned && !in_cand[w] && !banned[w]) {
                    in_cand[w] = 1;
                    next.push_back(w);
                }
            }
            extend(d, pop + graph_.population(c), next);
            for (std::size_t j = inherited; j < next.size(); ++j) in_cand[next[j]] = 0;
            members_.pop_back();
            release(c);
            ++banned[c];
            newly_banned.push_back(c);
        }
        for (UnitId c : newly_banned) --banned[c];
    }

    // Every connected piece of the unassigned remainder must be tileable by a
    // whole number of districts, and those numbers must add up to `left`.
    bool remainder_feasible(int left) {
        if (left == 0) return remaining_units_ == 0;
        if (remaining_units_ < left) return false;
        ++stamp_;
        int min_total = 0;
        long long max_total = 0;
        std::vector<UnitId> stack;
        for (UnitId s = 0; s < graph_.size(); ++s) {
            if (label_[s] != kUnassigned || seen_[s] == stamp_) continue;
            Population piece = 0;
            stack.push_back(s);
            seen_[s] = stamp_;
            while (!stack.empty()) {
                UnitId u = stack.back();
                stack.pop_back();
                piece += graph_.population(u);
                for (UnitId w : graph_.neighbors(u)) {
                    if (label_[w] == kUnassigned && seen_[w] != stamp_) {
                        seen_[w] = stamp_;
                        stack.push_back(w);
                    }
                }
            }
            const long long lo_count = std::max<long long>(
                1, bounds_.upper > 0 ? (piece + bounds_.upper - 1) / bounds_.upper : 1);
            const long long hi_count = bounds_.lower > 0 ? piece / bounds_.lower : left;
            if (lo_count > hi_count) return false;
            min_total += static_cast<int>(lo_count);
            max_total += hi_count;
            if (min_total > left) return false;
        }
        return max_total >= left;
    }

    const UnitGraph& graph_;
    int k_;
    PopulationBounds bounds_;
    std::vector<District> label_;
    std::vector<std::vector<char>> in_cand_;  // per district level
    std::vector<std::vector<int>> banned_;
    std::vector<unsigned> seen_;
    unsigned stamp_ = 0;
    std::vector<UnitId> members_;
    int remaining_units_;
    Population remaining_pop_;
    std::atomic<std::uint64_t>& nodes_;
    std::uint64_t local_nodes_ = 0;
    std::uint64_t budget_;
    Emit emit_;
    std::vector<std::vector<UnitId>>* collect_roots_ = nullptr;

public:
    void flush_nodes() {
        nodes_.fetch_add(local_nodes_);
        local_nodes_ = 0;
    }
};

inline void check_enumerable(const UnitGraph& graph, const Constraints& constraints) {
    constraints.check();
    if (graph.total_population() <= 0) throw DataError("degenerate instance: total population is zero");
    if (graph.size() == 0) throw DataError("empty instance");
}

}  // namespace detail

/// Streams every plan to `visit` in deterministic order (single-threaded).
/// Returns the number of plans; throws EnumerationBudgetExceeded on the guard.
inline std::uint64_t enumerate_plans(const UnitGraph& graph, const Constraints& constraints,
                                     const std::function<void(const Plan&)>& visit,
                                     std::uint64_t node_budget = kDefaultEnumerationNodeBudget) {
    detail::check_enumerable(graph, constraints);
    std::atomic<std::uint64_t> nodes{0};
    std::uint64_t count = 0;
    detail::PartitionEnumerator search(graph, constraints, nodes, node_budget);
    try {
        search.run([&](const std::vector<District>& labels) {
            ++count;
            visit(Plan(labels, constraints.k));
        });
    } catch (const BudgetExceeded&) {
        throw EnumerationBudgetExceeded(count, nodes.load());
    }
    return count;
}

inline EnumerationResult enumerate_plans(const UnitGraph& graph, const Constraints& constraints,
                                         const EnumerationOptions& options = {}) {
    detail::check_enumerable(graph, constraints);
    EnumerationResult result;
    result.instance_hash = graph.content_hash();
    result.constraints = constraints;

    struct Branch {
        std::uint64_t count = 0;
        std::vector<Plan> plans;
        std::map<int, std::uint64_t> histogram;
    };
    auto record = [&](Branch& branch, const std::vector<District>& labels) {
        ++branch.count;
        int cut = 0;
        for (const Edge& e : graph.edges()) cut += labels[e.a] != labels[e.b];
        ++branch.histogram[cut];
        if (options.collect) branch.plans.emplace_back(labels, constraints.k);
    };
    auto merge = [&](Branch& branch) {
        result.count += branch.count;
        for (auto [score, n] : branch.histogram) result.cut_edge_histogram[score] += n;
        for (auto& p : branch.plans) result.plans.push_back(std::move(p));
    };

    std::atomic<std::uint64_t> nodes{0};
    if (options.threads <= 1 || constraints.k == 1) {
        Branch all;
        detail::PartitionEnumerator search(graph, constraints, nodes, options.node_budget);
        try {
            search.run([&](const std::vector<District>& labels) { record(all, labels); });
        } catch (const BudgetExceeded&) {
            throw EnumerationBudgetExceeded(all.count, nodes.load());
        }
        search.flush_nodes();
        merge(all);
        result.nodes = nodes.load();
        return result;
    }

    // Parallel: one task per feasible first district, merged in branch order so
    // the output does not depend on the thread count.
    std::vector<std::vector<UnitId>> roots;
    {
        detail::PartitionEnumerator lister(graph, constraints, nodes, options.node_budget);
        try {
            roots = lister.first_districts();
        } catch (const BudgetExceeded&) {
            throw EnumerationBudgetExceeded(0, nodes.load());
        }
        lister.flush_nodes();
    }
    std::vector<Branch> branches(roots.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> exhausted{false};
    auto worker = [&] {
        detail::PartitionEnumerator search(graph, constraints, nodes, options.node_budget);
        try {
            for (std::size_t i = next++; i < roots.size() && !exhausted; i = next++)
                search.run_below(roots[i], [&](const std::vector<District>& labels) {
                    record(branches[i], labels);
                });
        } catch (const BudgetExceeded&) {
            exhausted = true;
        }
        search.flush_nodes();
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < options.threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (exhausted) {
        std::uint64_t partial = 0;
        for (const auto& b : branches) partial += b.count;
        throw EnumerationBudgetExceeded(partial, nodes.load());
    }
    for (auto& b : branches) merge(b);
    result.nodes = nodes.load();
    return result;
}

inline std::map<int, std::uint64_t> cut_edge_distribution(const EnumerationResult& result) {
    return result.cut_edge_histogram;
}

}  // namespace redistlab
