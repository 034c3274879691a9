#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include <redistlab/enumerate.hpp>
#include <redistlab/instances.hpp>
#include <redistlab/optimize.hpp>

#include "oracle.hpp"

using namespace redistlab;

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

// 4x4 with two counties: left half "A", right half "B"
UnitGraph county_grid() {
    const auto g = make_grid(4, 4);
    UnitGraph::Attributes a;
    a.centroids = std::vector<Point>();
    std::vector<std::string> counties;
    for (UnitId u = 0; u < 16; ++u) {
        a.centroids->push_back(g.centroid(u));
        counties.push_back(u % 4 < 2 ? "A" : "B");
    }
    a.counties = counties;
    return UnitGraph("counties", g.populations(), g.edges(), a);
}

// row-major snake: district d takes units [d*n/k, (d+1)*n/k)
Plan snake_plan(int n, int k) {
    std::vector<District> labels(n);
    for (int u = 0; u < n; ++u) labels[u] = u * k / n;
    return Plan(labels, k);
}

}  // namespace

TEST(Objective, CountySplits) {
    const auto g = county_grid();
    EXPECT_EQ(county_splits(block_plan(4, 4, 1, 2), g), 0);   // columns halves match counties
    EXPECT_EQ(county_splits(block_plan(4, 4, 2, 1), g), 2);   // row halves split both
    EXPECT_THROW(county_splits(block_plan(4, 4, 2, 2), make_grid(4, 4)), ConfigError);
}

TEST(Objective, WeightedSum) {
    const auto g = county_grid();
    const Plan p = block_plan(4, 4, 2, 1);
    const auto o = Objective::weighted(1.0, 10.0, 3.0);
    EXPECT_DOUBLE_EQ(o(p, g), cut_edges(p, g) + 10.0 * max_deviation(p, g) + 3.0 * 2);
    EXPECT_THROW(Objective::weighted(-1, 0, 0), ConfigError);
    EXPECT_THROW(Objective::weighted(0, 0, 0), ConfigError);
}

TEST(HillClimb, GlobalOptimumIsUnchanged) {
    const auto g = make_grid(6, 6);
    const Constraints c{4, 0.0, true};
    Rng rng(1);
    const auto r = hill_climb(block_plan(6, 6, 2, 2), g, c, Objective::cut(), HillClimbOptions{}, rng);
    EXPECT_EQ(r.plan, block_plan(6, 6, 2, 2));
    EXPECT_EQ(r.value, 12);
    EXPECT_EQ(r.accepted, 0);
}

TEST(HillClimb, ThreeByThreeAlwaysSix) {
    const auto g = make_grid(3, 3);
    const Constraints c{3, 0.0, true};
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Rng rng(seed);
        const auto r = hill_climb(snake_plan(9, 3), g, c, Objective::cut(), HillClimbOptions{StepKind::recombination, 100, 20}, rng);
        EXPECT_EQ(r.value, 6);
    }
}

TEST(HillClimb, TraceStrictlyDecreasesAndEndsLocal) {
    const auto g = make_grid(6, 6);
    const Constraints c{4, 0.2, true};
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Rng rng(seed);
        auto start = flood_fill(g, c, FloodFillPolicy{}, rng);
        for (int tries = 0; !start && tries < 1000; ++tries) start = flood_fill(g, c, FloodFillPolicy{}, rng);
        ASSERT_TRUE(start);
        const auto r = hill_climb(*start, g, c, Objective::cut(), HillClimbOptions{}, rng);
        for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LT(r.trace[i], r.trace[i - 1]);
        EXPECT_LE(r.value, r.start_value);
        EXPECT_TRUE(is_valid(r.plan, g, c));
        if (r.local_optimum)
            for (const Plan& n : detail::all_neighbors(StepKind::flip, r.plan, g, c)) EXPECT_GE(cut_edges(n, g), r.value);
    }
}

TEST(HillClimb, InvalidStartRejected) {
    const auto g = make_grid(4, 4);
    Rng rng(1);
    EXPECT_THROW(hill_climb(block_plan(4, 4, 1, 2), g, Constraints{4, 0.0, true}, Objective::cut(), {}, rng), ConfigError);
    Plan bad = block_plan(4, 4, 2, 2);
    bad.assign(0, 3);
    EXPECT_THROW(hill_climb(bad, g, Constraints{4, 0.0, true}, Objective::cut(), {}, rng), DataError);
}

TEST(Annealing, NeverWorseThanStart) {
    const auto g = make_grid(6, 6);
    const Constraints c{4, 0.0, true};
    const Plan start = snake_plan(36, 4);
    AnnealSchedule s;
    s.epochs = 40;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(seed);
        const auto r = simulated_annealing(start, g, c, Objective::cut(), s, StepKind::swap, rng);
        EXPECT_LE(r.value, r.start_value);
        EXPECT_EQ(r.trace.size(), 40u);
        EXPECT_TRUE(is_valid(r.plan, g, c));
        EXPECT_EQ(r.value, cut_edges(r.plan, g));
    }
}

TEST(Annealing, ScheduleChecked) {
    AnnealSchedule s;
    s.cooling = 1.0;
    EXPECT_THROW(s.check(), ConfigError);
    s = {};
    s.initial_temperature = 0;
    EXPECT_THROW(s.check(), ConfigError);
}

TEST(Annealing, MedianNoWorseThanHillClimbing) {
    // at zero deviation on 6x6 no single flip keeps balance, so both use swaps
    const auto g = make_grid(6, 6);
    const Constraints c{4, 0.0, true};
    std::vector<double> hc, sa;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Rng rng(seed);
        ChainConfig mix;
        mix.steps = 500;
        mix.kind = StepKind::recombination;
        mix.constraints = c;
        mix.seed = seed;
        mix.record_every = 500;
        const Plan start = run_chain(snake_plan(36, 4), mix, g).plans.back();
        hc.push_back(hill_climb(start, g, c, Objective::cut(), HillClimbOptions{StepKind::swap, 10000, -1}, rng).value);
        sa.push_back(simulated_annealing(start, g, c, Objective::cut(), AnnealSchedule{}, StepKind::swap, rng).value);
    }
    EXPECT_LE(median(sa), median(hc));
}

TEST(Tabu, NoRevisitWithinTenure) {
    const auto g = make_grid(6, 6);
    const Constraints c{4, 0.12, true};
    TabuOptions o;
    o.tenure = 20;
    o.max_steps = 300;
    Rng rng(2);
    const auto r = tabu_search(block_plan(6, 6, 2, 2), g, c, Objective::cut(), o, rng);
    ASSERT_GT(r.trajectory.size(), 1u);
    for (std::size_t i = 0; i < r.trajectory.size(); ++i)
        for (std::size_t j = i + 1; j < r.trajectory.size() && j <= i + o.tenure; ++j)
            EXPECT_NE(r.trajectory[i], r.trajectory[j]) << i << " " << j;
    EXPECT_LE(r.value, r.start_value);
}

TEST(Tabu, ExploresAllTenThreeByThreePlans) {
    const auto g = make_grid(3, 3);
    const Constraints c{3, 0.0, true};
    TabuOptions o;
    o.neighborhood = StepKind::recombination;
    o.tenure = 100;
    o.max_steps = 100;
    o.samples = 200;
    Rng rng(3);
    const auto r = tabu_search(snake_plan(9, 3), g, c, Objective::cut(), o, rng);
    const std::set<std::uint64_t> distinct(r.trajectory.begin(), r.trajectory.end());
    EXPECT_EQ(distinct.size(), r.trajectory.size());
    EXPECT_EQ(distinct.size(), 10u);
}

TEST(CommonRefinement, AtLeastKRegions) {
    const auto g = make_grid(6, 6);
    const Plan a = block_plan(6, 6, 2, 2);
    const Plan b = block_plan(6, 6, 4, 1);
    auto [region, count] = common_refinement(a, b, g);
    EXPECT_GE(count, 4);
    EXPECT_EQ(count, 8);
    for (const Edge& e : g.edges())
        if (a[e.a] == a[e.b] && b[e.a] == b[e.b]) EXPECT_EQ(region[e.a], region[e.b]);
    EXPECT_EQ(common_refinement(a, a, g).second, 4);
}

TEST(Crossover, IdenticalParentsReproduce) {
    const auto g = make_grid(6, 6);
    const Constraints c{4, 0.0, true};
    Rng rng(4);
    const Plan q = block_plan(6, 6, 2, 2);
    const auto child = crossover(q, q, g, c, rng);
    ASSERT_TRUE(child);
    EXPECT_EQ(*child, q);
}

TEST(Crossover, ChildrenValid) {
    const auto g = make_grid(6, 6);
    const Constraints c{4, 0.1, true};
    Rng rng(5);
    int made = 0;
    for (int i = 0; i < 50; ++i) {
        const auto child = crossover(block_plan(6, 6, 2, 2), snake_plan(36, 4), g, c, rng);
        if (!child) continue;
        ++made;
        EXPECT_TRUE(is_valid(*child, g, c));
    }
    EXPECT_GT(made, 0);
}

TEST(Evolutionary, BestNeverGetsWorse) {
    const auto g = make_grid(6, 6);
    const Constraints c{4, 0.1, true};
    Rng rng(6);
    std::vector<Plan> pop;
    while (pop.size() < 8)
        if (auto p = flood_fill(g, c, FloodFillPolicy{}, rng)) pop.push_back(*p);
    EvolutionOptions o;
    o.generations = 30;
    const auto r = evolutionary(pop, g, c, Objective::cut(), o, rng);
    ASSERT_EQ(r.trace.size(), 30u);
    for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LE(r.trace[i], r.trace[i - 1]);
    EXPECT_LE(r.value, r.start_value);
    EXPECT_TRUE(is_valid(r.plan, g, c));
}

TEST(Evolutionary, ClonesWithoutMutationStayPut) {
    const auto g = make_grid(6, 6);
    const Constraints c{4, 0.0, true};
    Rng rng(7);
    const Plan q = snake_plan(36, 4);
    EvolutionOptions o;
    o.generations = 5;
    o.mutate = false;
    const auto r = evolutionary({q, q, q}, g, c, Objective::cut(), o, rng);
    EXPECT_EQ(r.plan, q);
    for (double v : r.trace) EXPECT_EQ(v, cut_edges(q, g));
}

TEST(Exact, MatchesBruteForceOnTinyGrids) {
    struct Case {
        int rows, cols, k;
        double dev;
    };
    for (const Case& cs : {Case{2, 2, 2, 0.0}, Case{2, 3, 3, 0.0}, Case{3, 3, 3, 0.0}, Case{3, 3, 2, 0.15},
                           Case{3, 4, 3, 0.0}, Case{3, 4, 4, 0.34}, Case{2, 4, 2, 0.5}}) {
        const auto g = make_grid(cs.rows, cs.cols);
        const auto truth = oracle::census(g, cs.k, cs.dev);
        ASSERT_FALSE(truth.histogram.empty());
        const auto r = exact_min_cut_edges(g, Constraints{cs.k, cs.dev, true});
        EXPECT_EQ(r.status, SolveStatus::proven_optimal);
        ASSERT_TRUE(r.plan);
        EXPECT_EQ(cut_edges(*r.plan, g), truth.histogram.begin()->first) << cs.rows << "x" << cs.cols << " k=" << cs.k;
        EXPECT_EQ(r.lower_bound, cut_edges(*r.plan, g));
        EXPECT_TRUE(is_valid(*r.plan, g, Constraints{cs.k, cs.dev, true}));
    }
}

TEST(Exact, MatchesEnumerationMinimum) {
    for (int n = 4; n <= 6; ++n) {
        const auto g = make_grid(n, n);
        for (double dev : {0.0, 0.12}) {
            if (n == 6 && dev > 0) continue;  // beyond the enumeration budget
            const Constraints c{4, dev, true};
            const auto e = enumerate_plans(g, c, EnumerationOptions{});
            const auto r = exact_min_cut_edges(g, c);
            if (e.count == 0) {
                EXPECT_EQ(r.status, SolveStatus::infeasible) << n << "x" << n << " dev=" << dev;
                continue;
            }
            ASSERT_EQ(r.status, SolveStatus::proven_optimal);
            EXPECT_EQ(cut_edges(*r.plan, g), e.cut_edge_histogram.begin()->first) << n << "x" << n << " dev=" << dev;
        }
    }
}

TEST(Exact, WithoutWarmStartStillOptimal) {
    const auto g = make_grid(5, 5);
    ExactOptions o;
    o.heuristic_warm_start = false;
    const auto r = exact_min_cut_edges(g, Constraints{5, 0.0, true}, o);
    EXPECT_EQ(r.status, SolveStatus::proven_optimal);
    EXPECT_EQ(cut_edges(*r.plan, g), 16);
}

TEST(Exact, InfeasibleInstance) {
    // populations 1 and 5 cannot be split into two equal halves
    const auto g = make_grid(GridSpec{1, 2, Adjacency::rook, {{1, 5}}, 0, 0});
    const auto r = exact_min_cut_edges(g, Constraints{2, 0.0, true});
    EXPECT_EQ(r.status, SolveStatus::infeasible);
    EXPECT_FALSE(r.plan);
}

TEST(Exact, NodeBudgetKeepsBoundBelowIncumbent) {
    const auto g = make_grid(8, 8);
    ExactOptions o;
    o.node_budget = 2000;
    const auto r = exact_min_cut_edges(g, Constraints{4, 0.0, true}, o);
    ASSERT_TRUE(r.plan);
    EXPECT_LE(r.lower_bound, cut_edges(*r.plan, g));
    EXPECT_TRUE(r.status == SolveStatus::incumbent || r.status == SolveStatus::proven_optimal);
}

TEST(Pareto, MonotoneAndNonDominated) {
    for (int n : {4, 6}) {
        const auto g = make_grid(n, n);
        const auto pts = pareto_sweep(g, 4, {0.0, 0.1, 0.25}, ExactOptions{});
        ASSERT_EQ(pts.size(), 3u);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            EXPECT_EQ(pts[i].status, SolveStatus::proven_optimal);
            ASSERT_TRUE(pts[i].plan);
            EXPECT_LE(*pts[i].achieved_deviation, pts[i].deviation + 1e-12);
            if (i) EXPECT_LE(pts[i].cut_edges, pts[i - 1].cut_edges);
        }
        for (const auto& p : pts)
            for (const auto& q : pts) EXPECT_FALSE(dominates(q, p));
        EXPECT_EQ(pts.front().cut_edges, n == 4 ? 8 : 12);
    }
}

TEST(Pareto, UnsortedDeviationsRejected) {
    EXPECT_THROW(pareto_sweep(make_grid(4, 4), 4, {0.2, 0.1}, ExactOptions{}), ConfigError);
}

TEST(Pareto, FrontierDropsDominated) {
    ParetoPoint a, b;
    a.plan = b.plan = block_plan(2, 2, 1, 2);
    a.achieved_deviation = 0.0;
    a.cut_edges = 2;
    b.achieved_deviation = 0.1;
    b.cut_edges = 3;
    EXPECT_TRUE(dominates(a, b));
    EXPECT_FALSE(dominates(b, a));
    EXPECT_FALSE(dominates(a, a));
    const auto f = pareto_frontier({a, b});
    ASSERT_EQ(f.size(), 1u);
    EXPECT_EQ(f[0].cut_edges, 2);
}
