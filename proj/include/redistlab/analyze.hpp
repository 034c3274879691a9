#pragma once

// Ensemble statistics: cut-edge histograms, per-edge cut frequencies,
// comparison against an exhaustive enumeration, and CSV export.

#include <cmath>
#include <cstdio>
#include <map>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "core.hpp"
#include "ensemble.hpp"
#include "enumerate.hpp"

namespace redistlab {

using Histogram = std::map<int, std::uint64_t>;

inline Histogram cut_edge_histogram(const Ensemble& ensemble) {
    if (ensemble.empty()) throw DataError("empty ensemble");
    Histogram h;
    for (int c : ensemble.cut_edges) ++h[c];
    return h;
}

inline Histogram cut_edge_histogram(const std::vector<Plan>& plans, const UnitGraph& graph) {
    if (plans.empty()) throw DataError("empty ensemble");
    Histogram h;
    for (const Plan& p : plans) ++h[cut_edges(p, graph)];
    return h;
}

inline double histogram_mean(const Histogram& h) {
    double sum = 0, n = 0;
    for (auto [score, count] : h) {
        sum += static_cast<double>(score) * static_cast<double>(count);
        n += static_cast<double>(count);
    }
    return n > 0 ? sum / n : 0.0;
}

/// Fraction of plans cutting each edge, indexed like graph.edges().
struct EdgeFrequency {
    std::vector<double> values;
    std::uint64_t plans = 0;
};

inline EdgeFrequency edge_frequency(const std::vector<Plan>& plans, const UnitGraph& graph) {
    if (plans.empty()) throw DataError("empty ensemble");
    std::vector<std::uint64_t> counts(graph.edge_count(), 0);
    for (const Plan& p : plans) {
        detail::require_complete(p, graph);
        for (int i = 0; i < graph.edge_count(); ++i) counts[i] += p[graph.edges()[i].a] != p[graph.edges()[i].b];
    }
    EdgeFrequency f;
    f.plans = plans.size();
    for (auto c : counts) f.values.push_back(static_cast<double>(c) / static_cast<double>(plans.size()));
    return f;
}

inline EdgeFrequency edge_frequency(const Ensemble& ensemble, const UnitGraph& graph) {
    return edge_frequency(ensemble.plans, graph);
}

// ---------------------------------------------------------------------------

struct ChiSquare {
    double statistic = 0;
    int dof = 0;
    double p_value = 1;
    int bins = 0;  // after pooling
};

struct OracleComparison {
    double total_variation = 0;
    ChiSquare chi_square;
    std::uint64_t sample_size = 0;
    std::uint64_t oracle_count = 0;
};

/// Goodness of fit of observed counts to expected proportions. Adjacent
/// bins (in score order) are pooled until each expects at least 5; an
/// observation where the reference has no mass makes the statistic infinite.
inline ChiSquare chi_square_test(const Histogram& observed, const Histogram& reference) {
    double n = 0, total_ref = 0;
    for (auto [s, c] : observed) n += static_cast<double>(c);
    for (auto [s, c] : reference) total_ref += static_cast<double>(c);
    if (n <= 0 || total_ref <= 0) throw DataError("chi-square test needs nonempty histograms");
    ChiSquare out;
    for (auto [s, c] : observed) {
        if (c > 0 && !reference.count(s)) {
            out.statistic = std::numeric_limits<double>::infinity();
            out.p_value = 0;
            out.bins = static_cast<int>(reference.size()) + 1;
            out.dof = out.bins - 1;
            return out;
        }
    }
    std::vector<std::pair<double, double>> bins;  // expected, observed
    double exp_acc = 0, obs_acc = 0;
    for (auto [s, c] : reference) {
        exp_acc += n * static_cast<double>(c) / total_ref;
        auto it = observed.find(s);
        obs_acc += it == observed.end() ? 0.0 : static_cast<double>(it->second);
        if (exp_acc >= 5) {
            bins.emplace_back(exp_acc, obs_acc);
            exp_acc = obs_acc = 0;
        }
    }
    if (exp_acc > 0 || obs_acc > 0) {
        if (bins.empty()) {
            bins.emplace_back(exp_acc, obs_acc);
        } else {
            bins.back().first += exp_acc;
            bins.back().second += obs_acc;
        }
    }
    for (auto [e, o] : bins) out.statistic += (o - e) * (o - e) / e;
    out.bins = static_cast<int>(bins.size());
    out.dof = out.bins - 1;
    out.p_value = out.dof > 0 ? boost::math::gamma_q(out.dof / 2.0, out.statistic / 2.0) : 1.0;
    return out;
}

inline double total_variation(const Histogram& a, const Histogram& b) {
    double na = 0, nb = 0;
    for (auto [s, c] : a) na += static_cast<double>(c);
    for (auto [s, c] : b) nb += static_cast<double>(c);
    if (na <= 0 || nb <= 0) throw DataError("total variation needs nonempty histograms");
    std::map<int, double> diff;
    for (auto [s, c] : a) diff[s] += static_cast<double>(c) / na;
    for (auto [s, c] : b) diff[s] -= static_cast<double>(c) / nb;
    double tv = 0;
    for (auto [s, d] : diff) tv += std::abs(d);
    return tv / 2;
}

inline OracleComparison compare_to_oracle(const Histogram& sample, const EnumerationResult& oracle) {
    if (oracle.count == 0) throw DataError("oracle has no plans");
    OracleComparison r;
    for (auto [s, c] : sample) r.sample_size += c;
    r.oracle_count = oracle.count;
    r.total_variation = total_variation(sample, oracle.cut_edge_histogram);
    r.chi_square = chi_square_test(sample, oracle.cut_edge_histogram);
    return r;
}

inline OracleComparison compare_to_oracle(const Ensemble& ensemble, const EnumerationResult& oracle) {
    if (ensemble.instance_hash && oracle.instance_hash && ensemble.instance_hash != oracle.instance_hash)
        throw DataError("ensemble and oracle come from different instances");
    if (!ensemble.empty() && oracle.constraints.k != ensemble.plans.front().district_count())
        throw DataError("ensemble and oracle use different district counts");
    return compare_to_oracle(cut_edge_histogram(ensemble), oracle);
}

// ---------------------------------------------------------------------------

struct WelchTest {
    double mean_a = 0, mean_b = 0;
    double t = 0;
    double dof = 0;
    double p_less = 1;       // H1: mean_a < mean_b
    double p_two_sided = 1;
};

template <class T>
WelchTest welch_t_test(const std::vector<T>& a, const std::vector<T>& b) {
    if (a.size() < 2 || b.size() < 2) throw DataError("Welch test needs at least two values per sample");
    auto moments = [](const std::vector<T>& v) {
        double m = 0;
        for (T x : v) m += static_cast<double>(x);
        m /= static_cast<double>(v.size());
        double s = 0;
        for (T x : v) s += (static_cast<double>(x) - m) * (static_cast<double>(x) - m);
        return std::pair{m, s / static_cast<double>(v.size() - 1)};
    };
    const auto [ma, va] = moments(a);
    const auto [mb, vb] = moments(b);
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    WelchTest w{ma, mb, 0, 0, 1, 1};
    const double se2 = va / na + vb / nb;
    if (se2 <= 0) {
        // Both samples constant.
        w.t = ma == mb ? 0 : (ma < mb ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity());
        w.p_less = ma < mb ? 0.0 : 1.0;
        w.p_two_sided = ma == mb ? 1.0 : 0.0;
        return w;
    }
    w.t = (ma - mb) / std::sqrt(se2);
    w.dof = se2 * se2 / ((va / na) * (va / na) / (na - 1) + (vb / nb) * (vb / nb) / (nb - 1));
    boost::math::students_t dist(w.dof);
    w.p_less = boost::math::cdf(dist, w.t);
    w.p_two_sided = 2 * boost::math::cdf(boost::math::complement(dist, std::abs(w.t)));
    return w;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string format_histogram_csv(const Histogram& h, const std::string& header_comment = "") {
    std::string out = header_comment.empty() ? "" : "# " + header_comment + "\n";
    out += "score,count\n";
    for (auto [s, c] : h) out += std::to_string(s) + ',' + std::to_string(c) + '\n';
    return out;
}

inline std::string format_edge_frequency_csv(const EdgeFrequency& f, const UnitGraph& graph,
                                             const std::string& header_comment = "") {
    if (f.values.size() != static_cast<std::size_t>(graph.edge_count()))
        throw DataError("edge frequency does not match the instance");
    std::string out = header_comment.empty() ? "" : "# " + header_comment + "\n";
    out += "unit_a,unit_b,frequency\n";
    char buf[64];
    for (int i = 0; i < graph.edge_count(); ++i) {
        std::snprintf(buf, sizeof buf, "%.10g", f.values[i]);
        out += std::to_string(graph.edges()[i].a) + ',' + std::to_string(graph.edges()[i].b) + ',' + buf + '\n';
    }
    return out;
}

}  // namespace redistlab
