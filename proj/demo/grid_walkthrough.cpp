// A short tour of the library on the 6x6 grid: enumerate, sample, walk,
// optimise, compare.

#include <cstdio>

#include <redistlab/redistlab.hpp>

using namespace redistlab;

int main() {
    const UnitGraph grid = make_grid(6, 6);
    const Constraints four{4, 0.0, true};

    const auto all = enumerate_plans(grid, four, EnumerationOptions{});
    std::printf("6x6 into 4 districts of 9: %llu plans\n", static_cast<unsigned long long>(all.count));

    Rng rng(7);
    const auto fill = flood_fill_generator(grid, four, FloodFillPolicy{});
    const SampleRun run = rejection_sample(grid, four, fill, 200000, rng, 2000);
    std::printf("flood fill: %llu accepted of %llu draws\n", static_cast<unsigned long long>(run.successes),
                static_cast<unsigned long long>(run.attempts));

    const auto cmp = compare_to_oracle(cut_edge_histogram(run.plans, grid), all);
    std::printf("  vs uniform: TV %.3f, chi-square p = %.3g\n", cmp.total_variation, cmp.chi_square.p_value);

    ChainConfig cfg;
    cfg.steps = 5000;
    cfg.kind = StepKind::recombination;
    cfg.constraints = four;
    cfg.seed = 11;
    cfg.record_every = 10;
    const Ensemble walk = run_chain(run.plans.front(), cfg, grid);
    std::printf("recom walk: mean cut edges %.2f over %zu records\n", histogram_mean(cut_edge_histogram(walk)),
                walk.size());

    const ExactResult best = exact_min_cut_edges(grid, four);
    std::printf("exact: %d cut edges (%s)\n", *best.cut_edges, to_string(best.status));
    return 0;
}
