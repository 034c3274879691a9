#pragma once

// Brute-force references used to check the library on tiny instances.
// Deliberately naive: every labelling is visited.

#include <functional>
#include <map>
#include <set>
#include <vector>

#include <redistlab/core.hpp>

namespace oracle {

using redistlab::Plan;
using redistlab::UnitGraph;

inline bool connected_subset(const UnitGraph& g, const std::vector<int>& labels, int d) {
    std::vector<int> members;
    for (int u = 0; u < g.size(); ++u)
        if (labels[u] == d) members.push_back(u);
    if (members.empty()) return false;
    std::set<int> seen{members[0]};
    std::vector<int> stack{members[0]};
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (const auto& e : g.edges()) {
            int v = e.a == u ? e.b : (e.b == u ? e.a : -1);
            if (v >= 0 && labels[v] == d && seen.insert(v).second) stack.push_back(v);
        }
    }
    return seen.size() == members.size();
}

inline bool valid_labels(const UnitGraph& g, const std::vector<int>& labels, int k, double dev) {
    double total = 0;
    for (int u = 0; u < g.size(); ++u) total += g.population(u);
    const double ideal = total / k;
    std::vector<double> pop(k, 0);
    for (int u = 0; u < g.size(); ++u) pop[labels[u]] += g.population(u);
    for (int d = 0; d < k; ++d) {
        if (std::abs(pop[d] - ideal) > dev * ideal + 1e-9) return false;
        if (!connected_subset(g, labels, d)) return false;
    }
    return true;
}

inline int cut(const UnitGraph& g, const std::vector<int>& labels) {
    int c = 0;
    for (const auto& e : g.edges()) c += labels[e.a] != labels[e.b];
    return c;
}

/// Calls f on every labelling in {0..k-1}^n.
inline void each_labelling(int n, int k, const std::function<void(const std::vector<int>&)>& f) {
    std::vector<int> labels(n, 0);
    while (true) {
        f(labels);
        int i = 0;
        while (i < n && ++labels[i] == k) labels[i++] = 0;
        if (i == n) break;
    }
}

struct Census {
    std::uint64_t labelled = 0;    // valid labelled plans
    std::uint64_t unlabelled = 0;  // up to permutation of labels
    std::map<int, std::uint64_t> histogram;  // over unlabelled plans
};

inline Census census(const UnitGraph& g, int k, double dev) {
    Census c;
    oracle::each_labelling(g.size(), k, [&](const std::vector<int>& labels) {
        if (!valid_labels(g, labels, k, dev)) return;
        ++c.labelled;
        // canonical iff labels first appear in order 0,1,2,...
        int next = 0;
        for (int l : labels) {
            if (l > next) return;
            if (l == next) ++next;
        }
        ++c.unlabelled;
        ++c.histogram[cut(g, labels)];
    });
    return c;
}

}  // namespace oracle
