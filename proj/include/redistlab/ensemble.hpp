#pragma once

// A collection of plans with provenance, and its text file format:
//
//   # redistlab-ensemble version=1
//   # {"algorithm": ..., "seed": ..., "instance": ..., "instance_hash": ..., ...}
//   record,step,cut_edges,max_deviation,assignment
//   0,0,12,0,1 1 1 2 2 2 ...
//
// Assignments are space-separated 1-based district labels in unit-id order.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "core.hpp"

namespace redistlab {

struct Ensemble {
    std::string instance_name;
    std::uint64_t instance_hash = 0;
    std::string algorithm;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> parameters;
    std::map<std::string, double> statistics;

    std::vector<Plan> plans;
    std::vector<std::int64_t> steps;
    std::vector<int> cut_edges;
    std::vector<double> deviations;

    Ensemble() = default;
    Ensemble(const UnitGraph& graph, std::string algorithm_name, std::uint64_t rng_seed)
        : instance_name(graph.name()), instance_hash(graph.content_hash()),
          algorithm(std::move(algorithm_name)), seed(rng_seed) {}

    std::size_t size() const noexcept { return plans.size(); }
    bool empty() const noexcept { return plans.empty(); }

    void add(const Plan& plan, const UnitGraph& graph, std::int64_t step = -1) {
        if (!plans.empty() && plan.size() != plans.front().size())
            throw DataError("ensemble plans must share one instance");
        plans.push_back(plan);
        steps.push_back(step < 0 ? static_cast<std::int64_t>(plans.size()) - 1 : step);
        cut_edges.push_back(cut_edges_of(plan, graph));
        deviations.push_back(graph.total_population() > 0 ? max_deviation(plan, graph) : 0.0);
    }

private:
    static int cut_edges_of(const Plan& plan, const UnitGraph& graph) {
        return redistlab::cut_edges(plan, graph);
    }
};

inline std::string format_ensemble(const Ensemble& ensemble, const std::string& config_hash = "") {
    nlohmann::json meta;
    meta["algorithm"] = ensemble.algorithm;
    meta["seed"] = ensemble.seed;
    meta["instance"] = ensemble.instance_name;
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(ensemble.instance_hash));
    meta["instance_hash"] = hash;
    meta["parameters"] = ensemble.parameters;
    meta["statistics"] = ensemble.statistics;
    if (!config_hash.empty()) meta["config_hash"] = config_hash;
    meta["records"] = ensemble.size();

    std::string out = "# redistlab-ensemble version=1\n# " + meta.dump() + "\n";
    out += "record,step,cut_edges,max_deviation,assignment\n";
    char dev[64];
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
        std::snprintf(dev, sizeof dev, "%.17g", ensemble.deviations[i]);
        out += std::to_string(i) + ',' + std::to_string(ensemble.steps[i]) + ',' +
               std::to_string(ensemble.cut_edges[i]) + ',' + dev + ',';
        const auto& labels = ensemble.plans[i].labels();
        for (std::size_t u = 0; u < labels.size(); ++u) {
            if (u) out += ' ';
            out += std::to_string(labels[u] == kUnassigned ? 0 : labels[u] + 1);
        }
        out += '\n';
    }
    return out;
}

inline void save_ensemble(const std::filesystem::path& path, const Ensemble& ensemble,
                          const std::string& config_hash = "") {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << format_ensemble(ensemble, config_hash);
}

/// Reads an ensemble file. District count per plan comes from the metadata
/// ("districts" parameter) or, failing that, the largest label seen.
inline Ensemble parse_ensemble(const std::string& text, const std::string& origin = "<memory>") {
    Ensemble ens;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    int k = -1;
    std::vector<std::vector<District>> rows;
    auto fail = [&](const std::string& what) {
        return DataError(origin + ":" + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("# {", 0) == 0) {
            nlohmann::json meta;
            try {
                meta = nlohmann::json::parse(line.substr(2));
            } catch (const nlohmann::json::exception&) {
                throw fail("malformed metadata line");
            }
            ens.algorithm = meta.value("algorithm", "");
            ens.seed = meta.value("seed", std::uint64_t{0});
            ens.instance_name = meta.value("instance", "");
            ens.instance_hash = std::stoull(meta.value("instance_hash", std::string("0")), nullptr, 16);
            if (meta.contains("parameters"))
                ens.parameters = meta["parameters"].get<std::map<std::string, std::string>>();
            if (meta.contains("statistics"))
                ens.statistics = meta["statistics"].get<std::map<std::string, double>>();
            if (auto it = ens.parameters.find("districts"); it != ens.parameters.end()) k = std::stoi(it->second);
            continue;
        }
        if (line[0] == '#' || line.rfind("record,", 0) == 0) continue;
        std::istringstream row(line);
        std::string record, step, cut, dev, assignment;
        if (!std::getline(row, record, ',') || !std::getline(row, step, ',') || !std::getline(row, cut, ',') ||
            !std::getline(row, dev, ',') || !std::getline(row, assignment))
            throw fail("expected record,step,cut_edges,max_deviation,assignment");
        std::vector<District> labels;
        std::istringstream as(assignment);
        int label;
        while (as >> label) {
            if (label < 0) throw fail("negative district label");
            labels.push_back(label == 0 ? kUnassigned : label - 1);
        }
        if (!rows.empty() && labels.size() != rows.front().size()) throw fail("plan size differs from earlier records");
        try {
            ens.steps.push_back(std::stoll(step));
            ens.cut_edges.push_back(std::stoi(cut));
            ens.deviations.push_back(std::stod(dev));
        } catch (const std::exception&) {
            throw fail("bad numeric field");
        }
        rows.push_back(std::move(labels));
    }
    if (k < 0) {
        k = 1;
        for (const auto& r : rows)
            for (District d : r) k = std::max(k, d + 1);
    }
    for (auto& r : rows) ens.plans.emplace_back(std::move(r), k);
    return ens;
}

inline Ensemble load_ensemble(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_ensemble(buf.str(), path.string());
}

}  // namespace redistlab
