#include <gtest/gtest.h>

#include <redistlab/analyze.hpp>
#include <redistlab/instances.hpp>
#include <redistlab/samplers.hpp>

#include "oracle.hpp"

using namespace redistlab;

namespace {

const Constraints kFour{4, 0.0, true};

bool is_stripe(const Plan& p) {
    const auto c = canonical(p).labels();
    return c == std::vector<District>{0, 0, 1, 1} || c == std::vector<District>{0, 1, 0, 1};
}

/// 3x3 grid with a county label per column.
UnitGraph grid_with_counties() {
    const auto g = make_grid(3, 3);
    UnitGraph::Attributes a;
    a.centroids = g.centroids();
    a.counties = std::vector<std::string>{"A", "B", "C", "A", "B", "C", "A", "B", "C"};
    return UnitGraph("counties", g.populations(), g.edges(), a);
}

}  // namespace

TEST(RandomAssignment, SingleDistrict) {
    const auto g = make_grid(4, 4);
    Rng rng(3);
    const Plan p = random_assignment(g, 1, rng);
    EXPECT_EQ(p.labels(), std::vector<District>(16, 0));
    EXPECT_TRUE(is_valid(p, g, Constraints{1, 0.0, true}));
}

TEST(RandomAssignment, SeedReplay) {
    const auto g = make_grid(5, 5);
    Rng a(99), b(99);
    EXPECT_EQ(random_assignment(g, 4, a), random_assignment(g, 4, b));
}

TEST(RandomAssignment, RejectsBadK) {
    Rng rng(1);
    EXPECT_THROW(random_assignment(make_grid(2, 2), 0, rng), ConfigError);
}

TEST(RejectionSample, TwoByTwoAcceptanceMatchesExactProbability) {
    const auto g = make_grid(2, 2);
    const Constraints c{2, 0.0, true};
    // exact: valid labelled plans over all 2^4 labellings
    const double exact = static_cast<double>(oracle::census(g, 2, 0.0).labelled) / 16.0;
    EXPECT_DOUBLE_EQ(exact, 0.25);
    Rng rng(2024);
    const PlanGenerator gen = [&](Rng& r) { return std::optional<Plan>(random_assignment(g, 2, r)); };
    const auto run = rejection_sample(g, c, gen, 40000, rng, 40000);
    EXPECT_EQ(run.attempts, 40000u);
    // 4 standard errors of a binomial proportion at n = 40000
    EXPECT_NEAR(run.acceptance_rate(), exact, 4 * std::sqrt(exact * (1 - exact) / 40000));
    for (const Plan& p : run.plans) EXPECT_TRUE(is_valid(p, g, c));
}

TEST(RejectionSample, ZeroSuccessesIsReportedNotThrown) {
    const auto g = make_grid(3, 3);
    const Constraints c{3, 0.0, true};
    const PlanGenerator never = [](Rng&) { return std::optional<Plan>(); };
    Rng rng(1);
    SampleRun run;
    EXPECT_NO_THROW(run = rejection_sample(g, c, never, 50, rng));
    EXPECT_TRUE(run.exhausted());
    EXPECT_EQ(run.attempts, 50u);
    EXPECT_THROW(rejection_sample(g, c, never, 0, rng), ConfigError);
}

TEST(RejectionSample, SeedDeterminism) {
    const auto g = make_grid(6, 6);
    const auto gen = flood_fill_generator(g, kFour, FloodFillPolicy{});
    Rng a(5), b(5);
    const auto ra = rejection_sample(g, kFour, gen, 5000, a, 50);
    const auto rb = rejection_sample(g, kFour, gen, 5000, b, 50);
    EXPECT_EQ(ra.attempts, rb.attempts);
    EXPECT_EQ(ra.plans, rb.plans);
}

TEST(FloodFill, TwoByTwoAlwaysAStripe) {
    const auto g = make_grid(2, 2);
    const Constraints c{2, 0.0, true};
    Rng rng(8);
    for (int i = 0; i < 500; ++i) {
        const auto p = flood_fill(g, c, FloodFillPolicy{}, rng);
        ASSERT_TRUE(p.has_value());
        EXPECT_TRUE(is_stripe(*p));
    }
}

TEST(FloodFill, PolicyDataMismatch) {
    const auto g = make_grid(3, 3);
    UnitGraph bare("bare", g.populations(), g.edges());
    Rng rng(1);
    FloodFillPolicy bbox;
    bbox.spread = SpreadRule::bounding_box;
    EXPECT_THROW(flood_fill(bare, Constraints{3, 0.0, true}, bbox, rng), ConfigError);
    FloodFillPolicy county;
    county.spread = SpreadRule::county_preserving;
    EXPECT_THROW(flood_fill(g, Constraints{3, 0.0, true}, county, rng), ConfigError);
    FloodFillPolicy zones;
    zones.seed = SeedRule::zones;
    EXPECT_THROW(flood_fill(g, Constraints{3, 0.0, true}, zones, rng), ConfigError);
    const auto zoned = make_grid(GridSpec{6, 6, Adjacency::rook, {}, 2, 2});
    EXPECT_THROW(flood_fill(zoned, Constraints{3, 0.0, true}, zones, rng), ConfigError);
    EXPECT_NO_THROW(flood_fill(zoned, kFour, zones, rng));
    FloodFillPolicy restarts;
    restarts.max_restarts = 0;
    EXPECT_THROW(flood_fill(g, Constraints{3, 0.0, true}, restarts, rng), ConfigError);
}

TEST(FloodFill, EveryVariantReturnsValidPlans) {
    const auto g = make_grid(GridSpec{6, 6, Adjacency::rook, {}, 2, 2});
    std::vector<FloodFillPolicy> policies;
    for (auto mode : {FloodMode::district_by_district, FloodMode::whole_plan})
        for (auto spread : {SpreadRule::uniform, SpreadRule::bounding_box})
            for (auto seed : {SeedRule::uniform, SeedRule::boundary, SeedRule::zones})
                policies.push_back(FloodFillPolicy{mode, spread, seed, 2, true});
    FloodFillPolicy leftovers;
    leftovers.grow_last = false;
    policies.push_back(leftovers);
    Rng rng(17);
    for (const auto& policy : policies) {
        int ok = 0;
        for (int i = 0; i < 400; ++i) {
            if (auto p = flood_fill(g, kFour, policy, rng)) {
                ++ok;
                ASSERT_TRUE(is_valid(*p, g, kFour));
                const int c = cut_edges(*p, g);
                EXPECT_GE(c, 12);
                EXPECT_LE(c, 28);
            }
        }
        EXPECT_GT(ok, 0);
    }
}

TEST(FloodFill, CountyPreservingStaysValid) {
    const auto g = grid_with_counties();
    const Constraints c{3, 0.0, true};
    FloodFillPolicy p;
    p.spread = SpreadRule::county_preserving;
    Rng rng(4);
    int ok = 0;
    for (int i = 0; i < 300; ++i)
        if (auto plan = flood_fill(g, c, p, rng)) {
            ++ok;
            EXPECT_TRUE(is_valid(*plan, g, c));
        }
    EXPECT_GT(ok, 0);
}

TEST(FloodFill, BoundingBoxIsMoreCompact) {
    const auto g = make_grid(6, 6);
    FloodFillPolicy bbox;
    bbox.spread = SpreadRule::bounding_box;
    Rng a(31), b(31);
    const auto uniform = rejection_sample(g, kFour, flood_fill_generator(g, kFour, {}), 200000, a, 2000);
    const auto compact = rejection_sample(g, kFour, flood_fill_generator(g, kFour, bbox), 200000, b, 2000);
    EXPECT_LT(histogram_mean(cut_edge_histogram(compact.plans, g)), histogram_mean(cut_edge_histogram(uniform.plans, g)));
    EXPECT_GT(compact.acceptance_rate(), uniform.acceptance_rate());
}

TEST(FloodFill, ZoneSeedsConcentrateCutsOnZoneBoundaries) {
    const auto g = make_grid(GridSpec{6, 6, Adjacency::rook, {}, 2, 2});
    FloodFillPolicy p{FloodMode::whole_plan, SpreadRule::uniform, SeedRule::zones, 1, true};
    Rng rng(12);
    const auto run = rejection_sample(g, kFour, flood_fill_generator(g, kFour, p), 200000, rng, 2000);
    ASSERT_EQ(run.successes, 2000u);
    const auto f = edge_frequency(run.plans, g);
    double on = 0, off = 0;
    int n_on = 0, n_off = 0;
    for (int i = 0; i < g.edge_count(); ++i) {
        const Edge& e = g.edges()[i];
        if (g.zones()[e.a] != g.zones()[e.b]) {
            on += f.values[i];
            ++n_on;
        } else {
            off += f.values[i];
            ++n_off;
        }
    }
    EXPECT_GT(on / n_on, 1.5 * off / n_off);
}

TEST(Rebalance, FeasiblePlanUnchanged) {
    const auto g = make_grid(6, 6);
    const Plan q = block_plan(6, 6, 2, 2);
    Rng rng(1);
    const auto r = rebalance(q, g, kFour, 100, rng);
    EXPECT_TRUE(r.success);
    EXPECT_EQ(r.moves, 0);
    EXPECT_EQ(r.plan, q);
}

TEST(Rebalance, PathExample) {
    // 1x4 path, populations 1 1 1 3: the only balanced 2-split is {0,1,2} | {3}
    const auto g = make_grid(GridSpec{1, 4, Adjacency::rook, {{1, 1, 1, 3}}, 0, 0});
    const Constraints c{2, 0.0, true};
    int balanced = 0;
    for (int cut = 1; cut < 4; ++cut) {
        std::vector<District> labels(4);
        for (int u = 0; u < 4; ++u) labels[u] = u < cut ? 0 : 1;
        balanced += is_valid(Plan(labels, 2), g, c);
    }
    EXPECT_EQ(balanced, 1);
    Rng rng(1);
    const auto r = rebalance(Plan({0, 0, 1, 1}, 2), g, c, 10, rng);
    EXPECT_TRUE(r.success);
    EXPECT_EQ(r.plan.labels(), (std::vector<District>{0, 0, 0, 1}));
}

TEST(Rebalance, StuckWhenEveryMoveBreaksContiguity) {
    // star: centre 0 with leaves 1, 2, 3. District A = {0,1,2} (pop 3), B = {3} (pop 5).
    const UnitGraph star("star", {1, 1, 1, 5}, {{0, 1}, {0, 2}, {0, 3}});
    const Plan start({0, 0, 0, 1}, 2);
    Rng rng(1);
    const auto r = rebalance(start, star, Constraints{2, 0.0, true}, 50, rng);
    EXPECT_FALSE(r.success);
    EXPECT_EQ(r.plan, start);
}

TEST(Rebalance, NeverBreaksContiguity) {
    const auto g = make_grid(8, 8);
    const Constraints c{4, 0.02, true};
    Rng rng(77);
    for (int i = 0; i < 50; ++i) {
        std::vector<int> region(64);
        std::iota(region.begin(), region.end(), 0);
        auto labels = detail::merge_regions(g, region, 64, 4, true, rng);
        ASSERT_TRUE(labels);
        const Plan start(*labels, 4);
        const auto r = rebalance(start, g, c, 200, rng);
        for (District d = 0; d < 4; ++d) EXPECT_TRUE(is_contiguous(r.plan, g, d));
        if (r.success) EXPECT_TRUE(is_valid(r.plan, g, c));
    }
}

TEST(IterativeMerge, KEqualsNKeepsUnits) {
    const auto g = make_grid(3, 3);
    Rng rng(2);
    const auto p = iterative_merge(g, Constraints{9, 0.0, true}, rng);
    ASSERT_TRUE(p);
    EXPECT_EQ(p->labels(), (std::vector<District>{0, 1, 2, 3, 4, 5, 6, 7, 8}));
}

TEST(IterativeMerge, DisconnectedGraphRejects) {
    const UnitGraph two("two", {1, 1, 1, 1}, {{0, 1}, {2, 3}}, {{std::vector<Point>{{0, 0}, {1, 0}, {5, 0}, {6, 0}}}});
    Rng rng(2);
    EXPECT_FALSE(iterative_merge(two, Constraints{1, 0.0, true}, rng).has_value());
    EXPECT_TRUE(iterative_merge(two, Constraints{2, 0.0, true}, rng).has_value());
}

TEST(IterativeMerge, ReturnsValidPlans) {
    const auto g = make_grid(6, 6);
    Rng rng(9);
    int ok = 0;
    for (int i = 0; i < 300; ++i)
        if (auto p = iterative_merge(g, kFour, rng)) {
            ++ok;
            EXPECT_TRUE(is_valid(*p, g, kFour));
        }
    EXPECT_GT(ok, 150);
}

TEST(IterativeMerge, ClosestMergingNeedsCentroids) {
    const auto g = make_grid(2, 2);
    UnitGraph bare("bare", g.populations(), g.edges());
    Rng rng(1);
    EXPECT_THROW(iterative_merge(bare, Constraints{2, 0.0, true}, rng), ConfigError);
    MergeOptions random_neighbour;
    random_neighbour.closest = false;
    EXPECT_NO_THROW(iterative_merge(bare, Constraints{2, 0.0, true}, rng, random_neighbour));
}
