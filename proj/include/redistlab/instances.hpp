#pragma once

// Grid generators plus the on-disk instance (JSON) and plan (CSV) formats.
//
// Instance file, version 1:
//   {
//     "format": "redistlab-instance", "version": 1, "name": "...",
//     "units": [{"id": 0, "population": 12, "x": 0.5, "y": 1.0,
//                "county": "Polk", "name": "...", "zone": 2, "outer": true}, ...],
//     "edges": [[0, 1], [0, 5], ...],
//     "plans": {"enacted": {"districts": 4, "assignment": [1, 1, 3, ...]}}
//   }
// Unit ids are 0-based and must be dense. x/y, county, name, zone and outer are
// optional but all-or-nothing across units. Plan assignments are listed in unit
// id order with 1-based district labels; 0 marks an unassigned unit.
//
// Plan file (CSV):
//   # redistlab-plan districts=4 units=36
//   unit,district
//   0,1
//   1,
// Empty district cell = unassigned.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "core.hpp"

namespace redistlab {

enum class Adjacency { rook, queen };

struct GridSpec {
    int rows = 1;
    int cols = 1;
    Adjacency adjacency = Adjacency::rook;
    std::vector<std::vector<Population>> populations;  // empty = every cell population 1
    int zone_rows = 0;  // > 0 attaches a zone_rows x zone_cols block zoning (seed zones)
    int zone_cols = 0;
};

inline UnitGraph make_grid(const GridSpec& spec) {
    if (spec.rows < 1 || spec.cols < 1)
        throw ConfigError("grid dimensions must be positive, got " + std::to_string(spec.rows) +
                          "x" + std::to_string(spec.cols));
    if (!spec.populations.empty()) {
        if (static_cast<int>(spec.populations.size()) != spec.rows)
            throw ConfigError("population matrix row count does not match the grid");
        for (const auto& row : spec.populations)
            if (static_cast<int>(row.size()) != spec.cols)
                throw ConfigError("population matrix column count does not match the grid");
    }
    const int n = spec.rows * spec.cols;
    auto id = [&](int r, int c) { return r * spec.cols + c; };

    std::vector<Population> pop(n, 1);
    std::vector<Point> centroids(n);
    std::vector<bool> outer(n);
    std::vector<Edge> edges;
    for (int r = 0; r < spec.rows; ++r) {
        for (int c = 0; c < spec.cols; ++c) {
            const int u = id(r, c);
            if (!spec.populations.empty()) pop[u] = spec.populations[r][c];
            centroids[u] = {static_cast<double>(c), static_cast<double>(r)};
            outer[u] = r == 0 || c == 0 || r == spec.rows - 1 || c == spec.cols - 1;
            if (c + 1 < spec.cols) edges.push_back({u, id(r, c + 1)});
            if (r + 1 < spec.rows) edges.push_back({u, id(r + 1, c)});
            if (spec.adjacency == Adjacency::queen && r + 1 < spec.rows) {
                if (c + 1 < spec.cols) edges.push_back({u, id(r + 1, c + 1)});
                if (c > 0) edges.push_back({u, id(r + 1, c - 1)});
            }
        }
    }

    UnitGraph::Attributes attrs;
    attrs.centroids = std::move(centroids);
    attrs.outer = std::move(outer);
    if (spec.zone_rows > 0 && spec.zone_cols > 0) {
        std::vector<int> zones(n);
        for (int r = 0; r < spec.rows; ++r)
            for (int c = 0; c < spec.cols; ++c)
                zones[id(r, c)] = (r * spec.zone_rows / spec.rows) * spec.zone_cols +
                                  c * spec.zone_cols / spec.cols;
        attrs.zones = std::move(zones);
    }
    std::string name = "grid-" + std::to_string(spec.rows) + "x" + std::to_string(spec.cols);
    if (spec.adjacency == Adjacency::queen) name += "-queen";
    return UnitGraph(std::move(name), std::move(pop), std::move(edges), std::move(attrs));
}

inline UnitGraph make_grid(int rows, int cols, Adjacency adjacency = Adjacency::rook) {
    GridSpec spec;
    spec.rows = rows;
    spec.cols = cols;
    spec.adjacency = adjacency;
    return make_grid(spec);
}

/// Parses "6x6" (or "6X6").
inline std::pair<int, int> parse_grid_dims(std::string_view text) {
    const auto x = text.find_first_of("xX");
    int rows = 0, cols = 0;
    auto parse = [](std::string_view s, int& out) {
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc{} && p == s.data() + s.size();
    };
    if (x == std::string_view::npos || !parse(text.substr(0, x), rows) ||
        !parse(text.substr(x + 1), cols))
        throw ConfigError("grid must look like RxC, got '" + std::string(text) + "'");
    return {rows, cols};
}

/// Plan built from a rows x cols block layout, e.g. quadrants for 2x2 blocks.
inline Plan block_plan(int rows, int cols, int block_rows, int block_cols) {
    std::vector<District> labels(rows * cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            labels[r * cols + c] = (r * block_rows / rows) * block_cols + c * block_cols / cols;
    return Plan(std::move(labels), block_rows * block_cols);
}

// ---------------------------------------------------------------------------
// Instance files

struct Instance {
    UnitGraph graph;
    std::map<std::string, Plan> plans;
};

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::string line_col(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

inline Instance parse_instance(const std::string& text, const std::string& origin = "<memory>") {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(origin + ": " + detail::line_col(text, e.byte) + ": malformed JSON");
    }
    auto fail = [&](const std::string& field, const std::string& what) -> DataError {
        return DataError(origin + ": " + field + ": " + what);
    };
    if (!doc.is_object()) throw fail("<root>", "expected an object");
    if (doc.value("format", "") != "redistlab-instance")
        throw fail("format", "expected \"redistlab-instance\"");
    if (!doc.contains("version") || !doc["version"].is_number_integer() || doc["version"] != 1)
        throw fail("version", "unsupported schema version (expected 1)");
    if (!doc.contains("units") || !doc["units"].is_array()) throw fail("units", "expected an array");
    if (!doc.contains("edges") || !doc["edges"].is_array()) throw fail("edges", "expected an array");

    const auto& units = doc["units"];
    const int n = static_cast<int>(units.size());
    std::vector<Population> pop(n, -1);
    std::vector<Point> centroids(n);
    std::vector<std::string> counties(n), names(n);
    std::vector<int> zones(n);
    std::vector<bool> outer(n);
    std::vector<char> seen(n, 0);
    int with_xy = 0, with_county = 0, with_name = 0, with_zone = 0, with_outer = 0;

    for (int i = 0; i < n; ++i) {
        const auto& u = units[i];
        const std::string where = "units[" + std::to_string(i) + "]";
        if (!u.is_object()) throw fail(where, "expected an object");
        if (!u.contains("id") || !u["id"].is_number_integer())
            throw fail(where + ".id", "expected an integer");
        const auto id = u["id"].get<long long>();
        if (id < 0 || id >= n) throw fail(where + ".id", "unit ids must be dense 0.." + std::to_string(n - 1));
        if (seen[id]) throw fail(where + ".id", "duplicate unit id " + std::to_string(id));
        seen[id] = 1;
        if (!u.contains("population") || !u["population"].is_number_integer() ||
            u["population"].get<long long>() < 0)
            throw fail(where + ".population", "expected a nonnegative integer");
        pop[id] = u["population"].get<Population>();
        if (u.contains("x") || u.contains("y")) {
            if (!u.contains("x") || !u.contains("y") || !u["x"].is_number() || !u["y"].is_number())
                throw fail(where, "x and y must both be numbers");
            centroids[id] = {u["x"].get<double>(), u["y"].get<double>()};
            ++with_xy;
        }
        if (u.contains("county")) {
            if (!u["county"].is_string()) throw fail(where + ".county", "expected a string");
            counties[id] = u["county"].get<std::string>();
            ++with_county;
        }
        if (u.contains("name")) {
            if (!u["name"].is_string()) throw fail(where + ".name", "expected a string");
            names[id] = u["name"].get<std::string>();
            ++with_name;
        }
        if (u.contains("zone")) {
            if (!u["zone"].is_number_integer()) throw fail(where + ".zone", "expected an integer");
            zones[id] = u["zone"].get<int>();
            ++with_zone;
        }
        if (u.contains("outer")) {
            if (!u["outer"].is_boolean()) throw fail(where + ".outer", "expected a boolean");
            outer[id] = u["outer"].get<bool>();
            ++with_outer;
        }
    }
    auto all_or_none = [&](int count, const char* field) {
        if (count != 0 && count != n)
            throw fail("units", std::string("'") + field + "' must be present on all units or none");
    };
    all_or_none(with_xy, "x/y");
    all_or_none(with_county, "county");
    all_or_none(with_name, "name");
    all_or_none(with_zone, "zone");
    all_or_none(with_outer, "outer");

    std::vector<Edge> edges;
    const auto& edge_list = doc["edges"];
    for (std::size_t i = 0; i < edge_list.size(); ++i) {
        const auto& e = edge_list[i];
        const std::string where = "edges[" + std::to_string(i) + "]";
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
            throw fail(where, "expected a pair of unit ids");
        const auto a = e[0].get<long long>(), b = e[1].get<long long>();
        if (a < 0 || a >= n || b < 0 || b >= n)
            throw fail(where, "references unknown unit id " + std::to_string(a < 0 || a >= n ? a : b));
        edges.push_back({static_cast<UnitId>(a), static_cast<UnitId>(b)});
    }

    UnitGraph::Attributes attrs;
    if (with_xy) attrs.centroids = std::move(centroids);
    if (with_county) attrs.counties = std::move(counties);
    if (with_name) attrs.unit_names = std::move(names);
    if (with_zone) attrs.zones = std::move(zones);
    if (with_outer) attrs.outer = std::move(outer);

    Instance inst;
    try {
        inst.graph = UnitGraph(doc.value("name", std::string("unnamed")), std::move(pop),
                               std::move(edges), std::move(attrs));
    } catch (const DataError& e) {
        throw DataError(origin + ": " + e.what());
    }

    if (doc.contains("plans")) {
        if (!doc["plans"].is_object()) throw fail("plans", "expected an object");
        for (const auto& [plan_name, body] : doc["plans"].items()) {
            const std::string where = "plans." + plan_name;
            if (!body.is_object() || !body.contains("districts") || !body["districts"].is_number_integer() ||
                !body.contains("assignment") || !body["assignment"].is_array())
                throw fail(where, "expected {\"districts\": k, \"assignment\": [...]}");
            const int k = body["districts"].get<int>();
            if (k < 1) throw fail(where + ".districts", "must be at least 1");
            const auto& a = body["assignment"];
            if (static_cast<int>(a.size()) != n)
                throw fail(where + ".assignment", "has " + std::to_string(a.size()) +
                                                      " entries, instance has " + std::to_string(n) + " units");
            std::vector<District> labels(n);
            for (int u = 0; u < n; ++u) {
                if (!a[u].is_number_integer()) throw fail(where + ".assignment", "expected integers");
                const int label = a[u].get<int>();
                if (label < 0 || label > k)
                    throw fail(where + ".assignment[" + std::to_string(u) + "]",
                               "district " + std::to_string(label) + " out of range 1.." + std::to_string(k));
                labels[u] = label == 0 ? kUnassigned : label - 1;
            }
            inst.plans.emplace(plan_name, Plan(std::move(labels), k));
        }
    }
    return inst;
}

inline Instance load_instance(const std::filesystem::path& path) {
    return parse_instance(detail::read_file(path), path.string());
}

inline std::string format_instance(const UnitGraph& graph, const std::map<std::string, Plan>& plans = {}) {
    using nlohmann::json;
    json doc;
    doc["format"] = "redistlab-instance";
    doc["version"] = 1;
    doc["name"] = graph.name();
    json units = json::array();
    for (UnitId u = 0; u < graph.size(); ++u) {
        json unit;
        unit["id"] = u;
        unit["population"] = graph.population(u);
        if (graph.has_centroids()) {
            unit["x"] = graph.centroid(u).x;
            unit["y"] = graph.centroid(u).y;
        }
        if (graph.has_counties()) unit["county"] = graph.county_names()[graph.county(u)];
        if (!graph.unit_names().empty()) unit["name"] = graph.unit_names()[u];
        if (graph.has_zones()) unit["zone"] = graph.zones()[u];
        if (graph.has_outer_flags()) unit["outer"] = static_cast<bool>(graph.outer_flags()[u]);
        units.push_back(std::move(unit));
    }
    doc["units"] = std::move(units);
    json edges = json::array();
    for (const Edge& e : graph.edges()) edges.push_back({e.a, e.b});
    doc["edges"] = std::move(edges);
    if (!plans.empty()) {
        json pj = json::object();
        for (const auto& [plan_name, plan] : plans) {
            if (plan.size() != graph.size())
                throw DataError("plan '" + plan_name + "' is not sized to the instance");
            json assignment = json::array();
            for (District d : plan.labels()) assignment.push_back(d == kUnassigned ? 0 : d + 1);
            pj[plan_name] = {{"districts", plan.district_count()}, {"assignment", std::move(assignment)}};
        }
        doc["plans"] = std::move(pj);
    }
    return doc.dump(1) + "\n";
}

inline void save_instance(const std::filesystem::path& path, const UnitGraph& graph,
                          const std::map<std::string, Plan>& plans = {}) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << format_instance(graph, plans);
}

// ---------------------------------------------------------------------------
// Plan files

inline std::string format_plan(const Plan& plan) {
    std::string out = "# redistlab-plan districts=" + std::to_string(plan.district_count()) +
                      " units=" + std::to_string(plan.size()) + "\nunit,district\n";
    for (UnitId u = 0; u < plan.size(); ++u) {
        out += std::to_string(u);
        out += ',';
        if (plan[u] != kUnassigned) out += std::to_string(plan[u] + 1);
        out += '\n';
    }
    return out;
}

inline void save_plan(const std::filesystem::path& path, const Plan& plan) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << format_plan(plan);
}

/// `expected_units` < 0 skips the size check.
inline Plan parse_plan(const std::string& text, int expected_units = -1,
                       const std::string& origin = "<memory>") {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    int k = -1, declared_units = -1;
    std::map<int, int> rows;  // unit -> 1-based label (0 = unassigned)
    bool header_seen = false;
    auto fail = [&](const std::string& what) {
        return DataError(origin + ":" + std::to_string(line_no) + ": " + what);
    };
    auto to_int = [](std::string_view s, int& out) {
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc{} && p == s.data() + s.size();
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream meta(line.substr(1));
            std::string tok;
            while (meta >> tok) {
                if (tok.rfind("districts=", 0) == 0 && !to_int(std::string_view(tok).substr(10), k))
                    throw fail("bad districts= value");
                if (tok.rfind("units=", 0) == 0 && !to_int(std::string_view(tok).substr(6), declared_units))
                    throw fail("bad units= value");
            }
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            if (line == "unit,district") continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw fail("expected 'unit,district'");
        int unit = 0, label = 0;
        if (!to_int(std::string_view(line).substr(0, comma), unit) || unit < 0)
            throw fail("bad unit id");
        const auto label_text = std::string_view(line).substr(comma + 1);
        if (!label_text.empty() && (!to_int(label_text, label) || label < 1))
            throw fail("bad district label '" + std::string(label_text) + "'");
        if (!rows.emplace(unit, label).second) throw fail("duplicate unit " + std::to_string(unit));
    }
    const int n = rows.empty() ? 0 : rows.rbegin()->first + 1;
    if (static_cast<int>(rows.size()) != n) throw DataError(origin + ": unit ids must be dense 0..n-1");
    if (declared_units >= 0 && declared_units != n)
        throw DataError(origin + ": header declares " + std::to_string(declared_units) + " units, file has " +
                        std::to_string(n));
    if (expected_units >= 0 && n != expected_units)
        throw DataError(origin + ": plan has " + std::to_string(n) + " units, instance has " +
                        std::to_string(expected_units));
    int max_label = 0;
    for (const auto& [u, label] : rows) max_label = std::max(max_label, label);
    if (k < 0) k = std::max(1, max_label);
    if (max_label > k)
        throw DataError(origin + ": district label " + std::to_string(max_label) + " out of range 1.." +
                        std::to_string(k));
    std::vector<District> labels(n);
    for (const auto& [u, label] : rows) labels[u] = label == 0 ? kUnassigned : label - 1;
    return Plan(std::move(labels), k);
}

inline Plan load_plan(const std::filesystem::path& path, int expected_units = -1) {
    return parse_plan(detail::read_file(path), expected_units, path.string());
}

}  // namespace redistlab
