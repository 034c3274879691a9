// redistlab command-line tool.
//
// Exit codes: 0 success, 1 usage/configuration, 2 data, 3 budget exceeded
// (partial result printed).

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include <redistlab/redistlab.hpp>

#ifndef REDISTLAB_DATA_DIR
#define REDISTLAB_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace redistlab;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Common {
    std::string instance;
    std::string grid;
    bool queen = false;
    int districts = 0;
    double deviation = 0.0;
    bool no_contiguity = false;
    std::uint64_t seed = 1;
    std::string out;
    double budget = 0;  // meaning depends on the subcommand
    int threads = 1;
};

void add_instance_options(CLI::App* cmd, Common& c) {
    cmd->add_option("--instance", c.instance, "instance file, or a name resolved as data/<name>.json");
    cmd->add_option("--grid", c.grid, "rook grid RxC instead of an instance file");
    cmd->add_flag("--queen", c.queen, "queen adjacency for --grid");
}

void add_constraint_options(CLI::App* cmd, Common& c, bool districts_required = true) {
    auto* k = cmd->add_option("--districts,-k", c.districts, "number of districts")->check(CLI::PositiveNumber);
    if (districts_required) k->required();
    cmd->add_option("--deviation", c.deviation, "allowed fractional population deviation")->check(CLI::NonNegativeNumber);
    cmd->add_flag("--no-contiguity", c.no_contiguity, "do not require contiguous districts");
}

void add_run_options(CLI::App* cmd, Common& c) {
    cmd->add_option("--seed", c.seed, "random seed");
    cmd->add_option("--out,-o", c.out, "output file (stdout when omitted)");
}

Instance resolve_instance(const Common& c) {
    if (!c.grid.empty()) {
        if (!c.instance.empty()) throw ConfigError("give either --instance or --grid, not both");
        auto [r, cols] = parse_grid_dims(c.grid);
        return Instance{make_grid(r, cols, c.queen ? Adjacency::queen : Adjacency::rook), {}};
    }
    if (c.instance.empty()) throw ConfigError("an instance is required (--instance or --grid)");
    fs::path p(c.instance);
    if (fs::exists(p)) return load_instance(p);
    for (const fs::path& dir : {fs::path("data"), fs::path(REDISTLAB_DATA_DIR)}) {
        const fs::path candidate = dir / (c.instance + ".json");
        if (fs::exists(candidate)) return load_instance(candidate);
    }
    throw DataError("instance '" + c.instance + "' not found (tried the path and data/" + c.instance + ".json)");
}

Constraints constraints_of(const Common& c) {
    Constraints k{c.districts, c.deviation, !c.no_contiguity};
    k.check();
    return k;
}

/// A named reference plan from the instance, or a plan file.
Plan resolve_plan(const std::string& name, const Instance& inst) {
    if (auto it = inst.plans.find(name); it != inst.plans.end()) return it->second;
    if (fs::exists(name)) return load_plan(name, inst.graph.size());
    throw DataError("plan '" + name + "' is neither a reference plan of the instance nor a file");
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

/// FNV-1a of the effective configuration of one subcommand.
std::string config_hash(const CLI::App& app, const CLI::App* cmd) {
    std::string text = cmd->get_name() + "\n" + app.config_to_str(true, false);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return hex64(h);
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << text;
}

std::string header(const std::string& command, const std::string& hash, const UnitGraph& g, std::uint64_t seed) {
    return "# redistlab " + std::string(kVersion) + " " + command + " config=" + hash + " instance=" + g.name() +
           " instance_hash=" + hex64(g.content_hash()) + " seed=" + std::to_string(seed) + "\n";
}

FloodFillPolicy parse_policy(const std::string& mode, const std::string& spread, const std::string& seed_rule,
                             int restarts, bool take_leftovers) {
    FloodFillPolicy p;
    if (mode == "district") p.mode = FloodMode::district_by_district;
    else if (mode == "whole") p.mode = FloodMode::whole_plan;
    else throw ConfigError("unknown flood mode '" + mode + "'");
    if (spread == "uniform") p.spread = SpreadRule::uniform;
    else if (spread == "bbox") p.spread = SpreadRule::bounding_box;
    else if (spread == "county") p.spread = SpreadRule::county_preserving;
    else throw ConfigError("unknown spread rule '" + spread + "'");
    if (seed_rule == "uniform") p.seed = SeedRule::uniform;
    else if (seed_rule == "boundary") p.seed = SeedRule::boundary;
    else if (seed_rule == "zones") p.seed = SeedRule::zones;
    else throw ConfigError("unknown seed rule '" + seed_rule + "'");
    p.max_restarts = restarts;
    p.grow_last = !take_leftovers;
    return p;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"redistlab: districting plan generation, sampling and optimisation on graphs"};
    app.set_config("--config", "", "TOML/INI file supplying option values (command-line flags win)");
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Common c;

    // gen-grid
    auto* gen = app.add_subcommand("gen-grid", "write a grid instance file");
    int zone_r = 0, zone_c = 0;
    std::string zones, blocks;
    gen->add_option("--grid", c.grid, "RxC")->required();
    gen->add_flag("--queen", c.queen, "queen adjacency");
    gen->add_option("--zones", zones, "attach a block zoning ZRxZC for zone seeding");
    gen->add_option("--blocks", blocks, "store a BRxBC block plan as reference plan 'blocks'");
    gen->add_option("--out,-o", c.out, "output file (stdout when omitted)");

    // enumerate
    auto* en = app.add_subcommand("enumerate", "count all valid plans exactly");
    add_instance_options(en, c);
    add_constraint_options(en, c);
    std::string plans_out, hist_out;
    std::uint64_t node_budget = kDefaultEnumerationNodeBudget;
    en->add_option("--budget", node_budget, "search-node budget");
    en->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
    en->add_option("--plans-out", plans_out, "write every plan as an ensemble file");
    en->add_option("--histogram-out", hist_out, "write the cut-edge histogram CSV");

    // sample
    auto* sm = app.add_subcommand("sample", "draw plans from a from-scratch generator with rejection");
    add_instance_options(sm, c);
    add_constraint_options(sm, c);
    add_run_options(sm, c);
    std::string method = "flood", mode = "district", spread = "uniform", seed_rule = "uniform";
    int restarts = 1;
    bool take_leftovers = false, random_merge = false;
    std::uint64_t count = 100, attempts = 0;
    sm->add_option("--method", method, "random | flood | merge")->check(CLI::IsMember({"random", "flood", "merge"}));
    sm->add_option("--mode", mode, "flood mode: district | whole");
    sm->add_option("--spread", spread, "flood spread rule: uniform | bbox | county");
    sm->add_option("--seed-rule", seed_rule, "flood seed rule: uniform | boundary | zones");
    sm->add_option("--max-restarts", restarts, "flood restarts per draw")->check(CLI::PositiveNumber);
    sm->add_flag("--take-leftovers", take_leftovers, "last district takes the leftovers instead of growing");
    sm->add_flag("--random-merge", random_merge, "merge with a random neighbour instead of the closest");
    sm->add_option("--count,-n", count, "valid plans wanted");
    sm->add_option("--max-attempts", attempts, "draw limit (default 1000 x count)");

    // chain
    auto* ch = app.add_subcommand("chain", "run a flip / swap / recombination walk");
    add_instance_options(ch, c);
    add_constraint_options(ch, c);
    add_run_options(ch, c);
    std::string kind = "flip", start = "flood";
    std::int64_t steps = 1000, record_every = 1;
    int retries = kDefaultRecomRetries;
    ch->add_option("--kind", kind, "flip | swap | recom");
    ch->add_option("--start", start, "reference plan name, plan file, or 'flood' to draw one");
    ch->add_option("--steps", steps, "chain length");
    ch->add_option("--record-every", record_every, "thinning interval");
    ch->add_option("--retries", retries, "recombination spanning-tree attempts per step");

    // geo
    auto* geo = app.add_subcommand("geo", "geometric partitioners on centroids");
    add_instance_options(geo, c);
    add_constraint_options(geo, c);
    add_run_options(geo, c);
    std::string geo_method = "power", split_mode = "shortest", log_path;
    int runs = 1, iters = 500, angles = 180;
    geo->add_option("--method", geo_method, "splitline | voronoi | power")
        ->check(CLI::IsMember({"splitline", "voronoi", "power"}));
    geo->add_option("--runs", runs, "independent random starts")->check(CLI::PositiveNumber);
    geo->add_option("--iters", iters, "iteration cap (voronoi, power)");
    geo->add_option("--angles", angles, "splitline angle grid");
    geo->add_option("--split-mode", split_mode, "splitline: shortest | sample");
    geo->add_option("--log", log_path, "per-iteration convergence log CSV");

    // optimize
    auto* op = app.add_subcommand("optimize", "improve a plan or solve exactly");
    add_instance_options(op, c);
    add_constraint_options(op, c);
    add_run_options(op, c);
    std::string opt_method = "hill", neighborhood = "flip", objective_name = "cut";
    double w_cut = 1, w_dev = 0, w_county = 0, t0 = 2.0, cooling = 0.99;
    int tenure = 50, steps_per_t = 100, epochs = 200, generations = 50, population = 10;
    std::int64_t opt_steps = 10000;
    bool allow_discontiguous = false;
    op->add_option("--method", opt_method, "hill | anneal | tabu | evolve | exact")
        ->check(CLI::IsMember({"hill", "anneal", "tabu", "evolve", "exact"}));
    op->add_option("--neighborhood", neighborhood, "flip | swap | recom");
    op->add_option("--objective", objective_name, "cut | weighted")->check(CLI::IsMember({"cut", "weighted"}));
    op->add_option("--w-cut", w_cut, "weight on cut edges");
    op->add_option("--w-dev", w_dev, "weight on population deviation");
    op->add_option("--w-county", w_county, "weight on county splits");
    op->add_option("--start", start, "reference plan name, plan file, or 'flood'");
    op->add_option("--steps", opt_steps, "step cap (hill, tabu)");
    op->add_option("--tenure", tenure, "tabu tenure");
    op->add_option("--t0", t0, "annealing initial temperature");
    op->add_option("--cooling", cooling, "annealing cooling factor");
    op->add_option("--steps-per-temp", steps_per_t, "annealing steps per temperature");
    op->add_option("--epochs", epochs, "annealing temperature levels");
    op->add_option("--generations", generations, "evolutionary generations");
    op->add_option("--population", population, "evolutionary population size");
    op->add_option("--budget", c.budget, "exact: time budget in seconds (default 300)");
    op->add_flag("--allow-discontiguous", allow_discontiguous, "exact: accept discontiguous optima");

    // pareto
    auto* pa = app.add_subcommand("pareto", "exact minimum cut edges across deviation allowances");
    add_instance_options(pa, c);
    add_constraint_options(pa, c);
    add_run_options(pa, c);
    std::vector<double> deviations{0.0, 0.1, 0.25};
    pa->add_option("--deviations", deviations, "ascending deviation allowances")->delimiter(',');
    pa->add_option("--budget", c.budget, "time budget per point in seconds (default 300)");

    // analyze
    auto* an = app.add_subcommand("analyze", "histograms, edge frequencies and oracle comparison");
    add_instance_options(an, c);
    std::string ensemble_path, freq_out;
    bool oracle = false;
    an->add_option("--ensemble", ensemble_path, "ensemble file")->required();
    an->add_option("--histogram-out", hist_out, "cut-edge histogram CSV");
    an->add_option("--frequency-out", freq_out, "edge cut-frequency CSV");
    an->add_flag("--oracle", oracle, "compare against exhaustive enumeration");
    an->add_option("--deviation", c.deviation, "deviation for the oracle (default: ensemble metadata)");
    an->add_option("--budget", node_budget, "oracle search-node budget");

    // validate
    auto* va = app.add_subcommand("validate", "score a plan and check its validity");
    add_instance_options(va, c);
    std::string plan_name;
    va->add_option("--plan", plan_name, "reference plan name or plan file")->required();
    va->add_option("--districts,-k", c.districts, "district count (default: the plan's)");
    va->add_option("--deviation", c.deviation, "allowed deviation for validity")->check(CLI::NonNegativeNumber);
    va->add_flag("--no-contiguity", c.no_contiguity, "do not require contiguity");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    const CLI::App* cmd = app.get_subcommands().front();
    const std::string hash = config_hash(app, cmd);
    try {
        if (cmd == gen) {
            auto [r, cols] = parse_grid_dims(c.grid);
            GridSpec spec{r, cols, c.queen ? Adjacency::queen : Adjacency::rook, {}, 0, 0};
            if (!zones.empty()) std::tie(zone_r, zone_c) = parse_grid_dims(zones);
            spec.zone_rows = zone_r;
            spec.zone_cols = zone_c;
            const UnitGraph g = make_grid(spec);
            std::map<std::string, Plan> plans;
            if (!blocks.empty()) {
                auto [br, bc] = parse_grid_dims(blocks);
                plans.emplace("blocks", block_plan(r, cols, br, bc));
            }
            emit(c.out, format_instance(g, plans));
            return 0;
        }

        const Instance inst = resolve_instance(c);
        const UnitGraph& g = inst.graph;

        if (cmd == en) {
            EnumerationOptions opts;
            opts.node_budget = node_budget;
            opts.threads = c.threads;
            opts.collect = !plans_out.empty();
            const Constraints k = constraints_of(c);
            std::string head = header("enumerate", hash, g, 0);
            try {
                const auto res = enumerate_plans(g, k, opts);
                std::cout << head << "count: " << res.count << "\nnodes: " << res.nodes << "\n";
                std::cout << format_histogram_csv(res.cut_edge_histogram);
                if (!hist_out.empty()) emit(hist_out, head + format_histogram_csv(res.cut_edge_histogram));
                if (!plans_out.empty()) {
                    Ensemble ens(g, "enumeration", 0);
                    ens.parameters["districts"] = std::to_string(k.k);
                    ens.parameters["deviation"] = num(k.deviation);
                    for (const Plan& p : res.plans) ens.add(p, g);
                    save_ensemble(plans_out, ens, hash);
                }
            } catch (const EnumerationBudgetExceeded& e) {
                std::cout << head << "count: " << e.partial_count << " (partial, invalid)\nnodes: " << e.nodes << "\n";
                std::cerr << "error: " << e.what() << "\n";
                return 3;
            }
            return 0;
        }

        if (cmd == sm) {
            const Constraints k = constraints_of(c);
            Rng rng(c.seed);
            PlanGenerator generator;
            if (method == "random") {
                generator = [&](Rng& r) { return std::optional<Plan>(random_assignment(g, k.k, r)); };
            } else if (method == "flood") {
                generator = flood_fill_generator(g, k, parse_policy(mode, spread, seed_rule, restarts, take_leftovers));
            } else {
                MergeOptions mo;
                mo.closest = !random_merge;
                generator = [&, mo](Rng& r) { return iterative_merge(g, k, r, mo); };
            }
            const std::uint64_t limit = attempts ? attempts : 1000 * std::max<std::uint64_t>(count, 1);
            const SampleRun run = rejection_sample(g, k, generator, limit, rng, count);
            Ensemble ens(g, method == "flood" ? "flood-fill" : method, c.seed);
            ens.parameters["districts"] = std::to_string(k.k);
            ens.parameters["deviation"] = num(k.deviation);
            if (method == "flood") {
                ens.parameters["mode"] = mode;
                ens.parameters["spread"] = spread;
                ens.parameters["seed_rule"] = seed_rule;
            }
            for (const Plan& p : run.plans) ens.add(p, g);
            ens.statistics["attempts"] = static_cast<double>(run.attempts);
            ens.statistics["successes"] = static_cast<double>(run.successes);
            ens.statistics["acceptance_rate"] = run.acceptance_rate();
            if (!c.out.empty()) save_ensemble(c.out, ens, hash);
            std::cout << header("sample", hash, g, c.seed) << "attempts: " << run.attempts
                      << "\nsuccesses: " << run.successes << "\nacceptance_rate: " << num(run.acceptance_rate())
                      << "\nmean_cut_edges: " << (run.plans.empty() ? "nan" : num(histogram_mean(cut_edge_histogram(ens))))
                      << "\n";
            if (c.out.empty() && !run.plans.empty()) std::cout << format_ensemble(ens, hash);
            return run.successes == 0 ? 2 : 0;
        }

        auto draw_start = [&](const Constraints& k, Rng& rng) -> Plan {
            if (start != "flood") return resolve_plan(start, inst);
            const auto gen_fn = flood_fill_generator(g, k, FloodFillPolicy{});
            auto run = rejection_sample(g, k, gen_fn, 100000, rng);
            if (run.plans.empty()) throw DataError("could not draw a valid start plan by flood fill");
            return run.plans.front();
        };

        if (cmd == ch) {
            const Constraints k = constraints_of(c);
            Rng start_rng(c.seed ^ 0x5bd1e995ULL);
            ChainConfig cfg;
            cfg.steps = steps;
            cfg.kind = parse_step_kind(kind);
            cfg.constraints = k;
            cfg.seed = c.seed;
            cfg.record_every = record_every;
            cfg.recom_retries = retries;
            const Ensemble ens = run_chain(draw_start(k, start_rng), cfg, g);
            std::cout << header("chain", hash, g, c.seed);
            for (auto [name, v] : ens.statistics) std::cout << name << ": " << num(v) << "\n";
            if (c.out.empty())
                std::cout << format_ensemble(ens, hash);
            else
                save_ensemble(c.out, ens, hash);
            return 0;
        }

        if (cmd == geo) {
            const Constraints k = constraints_of(c);
            Rng rng(c.seed);
            Ensemble ens(g, geo_method, c.seed);
            ens.parameters["districts"] = std::to_string(k.k);
            ens.parameters["deviation"] = num(k.deviation);
            std::string log = "run,iteration,value\n";
            int rejected = 0;
            for (int run = 0; run < runs; ++run) {
                std::optional<Plan> plan;
                if (geo_method == "splitline") {
                    SplitlineOptions so;
                    so.angles = angles;
                    so.mode = split_mode == "sample" ? SplitlineMode::sample : SplitlineMode::shortest;
                    plan = splitline(g, k, so, &rng);
                } else {
                    GeometricPartition part;
                    if (geo_method == "voronoi") {
                        part = lloyd_kmeans(g, random_hubs(g, k.k, rng), iters, 1e-9);
                        for (std::size_t i = 0; i < part.objective_trace.size(); ++i)
                            log += std::to_string(run) + ',' + std::to_string(i) + ',' + num(part.objective_trace[i]) + '\n';
                    } else {
                        PowerOptions po;
                        po.max_iters = iters;
                        part = balance_power_diagram(g, k, rng, po);
                        for (std::size_t i = 0; i < part.deviation_trace.size(); ++i)
                            log += std::to_string(run) + ',' + std::to_string(i) + ',' + num(part.deviation_trace[i]) + '\n';
                    }
                    plan = snap_to_units(part, g, k);
                }
                if (plan)
                    ens.add(*plan, g, run);
                else
                    ++rejected;
            }
            ens.statistics["runs"] = runs;
            ens.statistics["rejected"] = rejected;
            if (!log_path.empty()) emit(log_path, header("geo", hash, g, c.seed) + log);
            std::cout << header("geo", hash, g, c.seed) << "runs: " << runs << "\nvalid: " << ens.size()
                      << "\nrejected: " << rejected << "\n";
            if (c.out.empty())
                std::cout << format_ensemble(ens, hash);
            else
                save_ensemble(c.out, ens, hash);
            return ens.empty() ? 2 : 0;
        }

        if (cmd == op) {
            const Constraints k = constraints_of(c);
            Rng rng(c.seed);
            const Objective obj = objective_name == "cut" ? Objective::cut() : Objective::weighted(w_cut, w_dev, w_county);
            const StepKind nb = parse_step_kind(neighborhood);
            std::cout << header("optimize", hash, g, c.seed) << "method: " << opt_method << "\n";
            Plan result{0, 1};
            if (opt_method == "exact") {
                if (objective_name != "cut") throw ConfigError("the exact solver supports the cut-edge objective only");
                ExactOptions eo;
                eo.time_budget = c.budget > 0 ? c.budget : 300.0;
                eo.seed = c.seed;
                eo.allow_discontiguous = allow_discontiguous;
                if (start != "flood") eo.warm_start = resolve_plan(start, inst);
                const ExactResult r = exact_min_cut_edges(g, k, eo);
                std::cout << "status: " << to_string(r.status) << "\nlower_bound: " << r.lower_bound
                          << "\nnodes: " << r.nodes << "\n";
                if (!r.plan) {
                    std::cout << "cut_edges: none\n";
                    return r.status == SolveStatus::infeasible ? 2 : 3;
                }
                std::cout << "cut_edges: " << *r.cut_edges << "\n";
                result = *r.plan;
                if (!c.out.empty()) save_plan(c.out, result);
                return r.status == SolveStatus::proven_optimal ? 0 : 3;
            }
            const Plan s = draw_start(k, rng);
            OptimizationResult r;
            if (opt_method == "hill") {
                r = hill_climb(s, g, k, obj, HillClimbOptions{nb, opt_steps, -1}, rng);
            } else if (opt_method == "anneal") {
                r = simulated_annealing(s, g, k, obj, AnnealSchedule{t0, cooling, steps_per_t, epochs}, nb, rng);
            } else if (opt_method == "tabu") {
                r = tabu_search(s, g, k, obj, TabuOptions{nb, tenure, opt_steps, 32}, rng);
            } else {
                std::vector<Plan> pop{s};
                while (static_cast<int>(pop.size()) < population) pop.push_back(draw_start(k, rng));
                EvolutionOptions eo;
                eo.generations = generations;
                eo.mutation = nb;
                r = evolutionary(pop, g, k, obj, eo, rng);
            }
            std::cout << "start_value: " << num(r.start_value) << "\nvalue: " << num(r.value)
                      << "\ncut_edges: " << cut_edges(r.plan, g) << "\nsteps: " << r.steps << "\n";
            if (c.out.empty())
                std::cout << format_plan(r.plan);
            else
                save_plan(c.out, r.plan);
            return 0;
        }

        if (cmd == pa) {
            ExactOptions eo;
            eo.time_budget = c.budget > 0 ? c.budget : 300.0;
            eo.seed = c.seed;
            const auto points = pareto_sweep(g, c.districts, deviations, eo, !c.no_contiguity);
            std::string csv = header("pareto", hash, g, c.seed) + "deviation,cut_edges,status,lower_bound\n";
            for (const auto& p : points)
                csv += num(p.deviation) + ',' + std::to_string(p.cut_edges) + ',' + p.status_name() + ',' +
                       std::to_string(p.lower_bound) + '\n';
            emit(c.out, csv);
            return 0;
        }

        if (cmd == an) {
            const Ensemble ens = load_ensemble(ensemble_path);
            if (ens.instance_hash && ens.instance_hash != g.content_hash())
                throw DataError("ensemble was produced on a different instance");
            std::cout << header("analyze", hash, g, ens.seed) << "plans: " << ens.size() << "\n";
            const Histogram h = cut_edge_histogram(ens);
            std::cout << "mean_cut_edges: " << num(histogram_mean(h)) << "\n";
            if (!hist_out.empty()) emit(hist_out, header("analyze", hash, g, ens.seed) + format_histogram_csv(h));
            if (!freq_out.empty())
                emit(freq_out, header("analyze", hash, g, ens.seed) +
                                   format_edge_frequency_csv(edge_frequency(ens, g), g));
            if (oracle) {
                Constraints k{ens.plans.front().district_count(), c.deviation, true};
                if (!an->count("--deviation"))
                    if (auto it = ens.parameters.find("deviation"); it != ens.parameters.end()) k.deviation = std::stod(it->second);
                EnumerationOptions eo;
                eo.node_budget = node_budget;
                try {
                    const auto res = enumerate_plans(g, k, eo);
                    const auto cmp = compare_to_oracle(ens, res);
                    std::cout << "oracle_count: " << res.count << "\ntotal_variation: " << num(cmp.total_variation)
                              << "\nchi_square: " << num(cmp.chi_square.statistic) << "\nchi_square_dof: "
                              << cmp.chi_square.dof << "\np_value: " << num(cmp.chi_square.p_value) << "\n";
                } catch (const EnumerationBudgetExceeded& e) {
                    std::cerr << "error: " << e.what() << "\n";
                    return 3;
                }
            }
            if (hist_out.empty()) std::cout << format_histogram_csv(h);
            return 0;
        }

        if (cmd == va) {
            Plan plan = resolve_plan(plan_name, inst);
            if (c.districts > 0 && c.districts != plan.district_count()) plan = Plan(plan.labels(), c.districts);
            const Constraints k{plan.district_count(), c.deviation, !c.no_contiguity};
            const ScoreReport r = validate(plan, g, k);
            std::cout << header("validate", hash, g, 0) << "complete: " << (r.complete ? "true" : "false") << "\n";
            std::cout << "cut_edges: " << (r.cut_edges ? std::to_string(*r.cut_edges) : "n/a") << "\n";
            std::cout << "district_populations:";
            for (Population p : r.district_populations) std::cout << ' ' << p;
            std::cout << "\nmax_deviation: " << num(r.max_deviation) << "\ncontiguous:";
            for (bool b : r.contiguous) std::cout << ' ' << (b ? "yes" : "no");
            std::cout << "\nvalid: " << (r.valid ? "true" : "false") << "\n";
            return 0;
        }
    } catch (const BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
