#include <gtest/gtest.h>

#include <redistlab/core.hpp>
#include <redistlab/instances.hpp>

#include "oracle.hpp"

using namespace redistlab;

namespace {

Plan quadrants6() { return block_plan(6, 6, 2, 2); }

Plan stripes3x3() { return Plan({0, 1, 2, 0, 1, 2, 0, 1, 2}, 3); }

}  // namespace

TEST(CutEdges, QuadrantPlanOnSixBySix) {
    EXPECT_EQ(cut_edges(quadrants6(), make_grid(6, 6)), 12);
}

TEST(CutEdges, SingleDistrictCutsNothing) {
    const auto g = make_grid(5, 3);
    EXPECT_EQ(cut_edges(Plan(std::vector<District>(15, 0), 1), g), 0);
}

TEST(CutEdges, IncompletePlanIsAnError) {
    const auto g = make_grid(2, 2);
    Plan p(4, 2);
    p.assign(0, 0);
    try {
        cut_edges(p, g);
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("incomplete plan"), std::string::npos);
    }
}

TEST(CutEdges, SizeMismatchIsAnError) {
    EXPECT_THROW(cut_edges(Plan(std::vector<District>(4, 0), 1), make_grid(3, 3)), DataError);
}

TEST(CutEdges, InvariantUnderRelabelling) {
    const auto g = make_grid(6, 6);
    const Plan p = quadrants6();
    std::vector<District> permuted(p.labels());
    for (auto& d : permuted) d = (d + 2) % 4;
    EXPECT_EQ(cut_edges(Plan(permuted, 4), g), cut_edges(p, g));
}

TEST(CutEdges, SingleFlipChangesAtMostDegree) {
    const auto g = make_grid(6, 6);
    const Plan p = quadrants6();
    for (UnitId u = 0; u < g.size(); ++u) {
        for (District d = 0; d < 4; ++d) {
            Plan q = p;
            q.assign(u, d);
            EXPECT_LE(std::abs(cut_edges(q, g) - cut_edges(p, g)), g.degree(u));
        }
    }
}

TEST(DistrictPopulations, BasicCases) {
    const auto g3 = make_grid(3, 3);
    EXPECT_EQ(district_populations(stripes3x3(), g3), (std::vector<Population>{3, 3, 3}));
    EXPECT_EQ(district_populations(Plan(std::vector<District>(9, 0), 1), g3), (std::vector<Population>{9}));
    EXPECT_EQ(district_populations(block_plan(4, 4, 2, 2), make_grid(4, 4)), (std::vector<Population>{4, 4, 4, 4}));
}

TEST(MaxDeviation, Examples) {
    EXPECT_DOUBLE_EQ(max_deviation(quadrants6(), make_grid(6, 6)), 0.0);
    std::vector<Population> pops{6, 4};
    EXPECT_DOUBLE_EQ(max_deviation(pops, 10), 0.2);
    EXPECT_DOUBLE_EQ(max_deviation(stripes3x3(), make_grid(3, 3)), 0.0);
}

TEST(MaxDeviation, ZeroPopulationIsDegenerate) {
    GridSpec spec{2, 2, Adjacency::rook, {{0, 0}, {0, 0}}, 0, 0};
    const auto g = make_grid(spec);
    try {
        max_deviation(Plan({0, 0, 1, 1}, 2), g);
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("degenerate instance"), std::string::npos);
    }
}

TEST(Contiguity, Examples) {
    const auto g6 = make_grid(6, 6);
    for (District d = 0; d < 4; ++d) EXPECT_TRUE(is_contiguous(quadrants6(), g6, d));

    const auto g3 = make_grid(3, 3);
    Plan corners({0, 1, 1, 1, 1, 1, 1, 1, 0}, 2);
    EXPECT_FALSE(is_contiguous(corners, g3, 0));
    EXPECT_TRUE(is_contiguous(Plan(std::vector<District>(9, 0), 1), g3, 0));
}

TEST(Contiguity, EmptyDistrictIsAnError) {
    try {
        is_contiguous(Plan(std::vector<District>(9, 0), 2), make_grid(3, 3), 1);
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("empty district"), std::string::npos);
    }
}

TEST(Validate, QuadrantsAreValid) {
    const auto r = validate(quadrants6(), make_grid(6, 6), Constraints{4, 0.0, true});
    EXPECT_TRUE(r.valid);
    EXPECT_EQ(r.cut_edges, 12);
    EXPECT_EQ(r.district_populations, (std::vector<Population>{9, 9, 9, 9}));
}

TEST(Validate, IncompletePlanReportedNotThrown) {
    const auto g = make_grid(2, 2);
    Plan p(4, 2);
    p.assign(0, 0);
    ScoreReport r;
    EXPECT_NO_THROW(r = validate(p, g, Constraints{2, 0.0, true}));
    EXPECT_FALSE(r.valid);
    EXPECT_FALSE(r.complete);
    EXPECT_FALSE(r.cut_edges.has_value());
}

TEST(Validate, DiscontiguousAndUnbalancedAreInvalid) {
    const auto g = make_grid(3, 3);
    EXPECT_FALSE(validate(Plan({0, 1, 1, 1, 1, 1, 1, 1, 0}, 2), g, Constraints{2, 1.0, true}).valid);
    EXPECT_TRUE(validate(Plan({0, 1, 1, 1, 1, 1, 1, 1, 0}, 2), g, Constraints{2, 1.0, false}).valid);
    EXPECT_FALSE(validate(Plan({0, 0, 0, 1, 1, 1, 1, 1, 1}, 2), g, Constraints{2, 0.2, true}).valid);
}

TEST(Validate, AgreesWithBruteForceOn2x3) {
    const auto g = make_grid(2, 3);
    for (double dev : {0.0, 0.34, 1.0}) {
        oracle::each_labelling(6, 2, [&](const std::vector<int>& labels) {
            Plan p(labels, 2);
            EXPECT_EQ(is_valid(p, g, Constraints{2, dev, true}), oracle::valid_labels(g, labels, 2, dev));
        });
    }
}

TEST(BoundaryUnits, Examples) {
    const auto g6 = make_grid(6, 6);
    EXPECT_TRUE(boundary_units(Plan(std::vector<District>(36, 0), 1), g6).empty());

    // reference: endpoints of the cut edges
    const Plan q = quadrants6();
    std::set<UnitId> ends;
    for (const Edge& e : g6.edges())
        if (q[e.a] != q[e.b]) ends.insert({e.a, e.b});
    const auto b = boundary_units(q, g6);
    EXPECT_EQ(b.size(), 20u);
    EXPECT_EQ(std::set<UnitId>(b.begin(), b.end()), ends);

    EXPECT_EQ(boundary_units(stripes3x3(), make_grid(3, 3)).size(), 9u);
}

TEST(StaysConnected, MatchesFullCheck) {
    const auto g = make_grid(4, 4);
    const Plan p({0, 0, 1, 1, 0, 0, 1, 1, 0, 2, 2, 1, 3, 3, 2, 2}, 4);
    for (UnitId u = 0; u < g.size(); ++u) {
        Plan without = p;
        // move the unit to some other label and check its old district directly
        const District home = p[u];
        without.assign(u, (home + 1) % 4);
        bool expect = false;
        for (UnitId v = 0; v < g.size(); ++v) expect = expect || (v != u && p[v] == home);
        if (expect) expect = is_contiguous(without, g, home);
        EXPECT_EQ(stays_connected_without(p, g, u), expect) << "unit " << u;
    }
}

TEST(UnitGraphInvariants, Rejections) {
    EXPECT_THROW(UnitGraph("x", {1, 1}, {{0, 0}}), DataError);
    EXPECT_THROW(UnitGraph("x", {1, 1}, {{0, 1}, {1, 0}}), DataError);
    EXPECT_THROW(UnitGraph("x", {1, 1}, {{0, 2}}), DataError);
    EXPECT_THROW(UnitGraph("x", {1, -1}, {{0, 1}}), DataError);
}

TEST(PlanInvariants, LabelOutOfRange) {
    EXPECT_THROW(Plan({0, 3}, 2), DataError);
    Plan p({0, kUnassigned}, 2);
    EXPECT_FALSE(p.complete());
}

TEST(Canonical, RelabelsBySmallestUnit) {
    const Plan p({2, 2, 0, 1}, 3);
    EXPECT_EQ(canonical(p).labels(), (std::vector<District>{0, 0, 1, 2}));
    EXPECT_EQ(plan_hash(canonical(p)), plan_hash(canonical(Plan({1, 1, 2, 0}, 3))));
}

TEST(Constraints, IntegerBounds) {
    const Constraints c{4, 0.1, true};
    const auto b = c.bounds(36);
    EXPECT_EQ(b.lower, 9);  // ceil(8.1)
    EXPECT_EQ(b.upper, 9);  // floor(9.9)
    const auto b2 = Constraints{2, 0.2, true}.bounds(10);
    EXPECT_EQ(b2.lower, 4);
    EXPECT_EQ(b2.upper, 6);
}
