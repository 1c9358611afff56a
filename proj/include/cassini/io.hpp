#pragma once

// File formats.
//
//   cloud CSV     optional header row `label,x1,...,xd` (label column optional), one point per row
//   cloud JSON    {"dim": d, "points": [{"label": "...", "coords": [...]}]}
//                 (a point may also be a bare coordinate array; dim defaults to the first point's)
//   matrix JSON   {"n": n, "entries": [[...]], "labels": [...]}   (labels optional)
//   matrix CSV    header row of labels, then n rows of n numbers
//   spec JSON     {"base": <cloud|matrix|path>, "metric": "...", "punctures": [...],
//                  "variant": "...", "anchor": i}
//
// Numbers are written in shortest round-trip form so files re-read losslessly.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "cassinian.hpp"
#include "errors.hpp"
#include "gromov_delta.hpp"
#include "metric_core.hpp"
#include "scenarios.hpp"
#include "verify.hpp"

namespace cassini {

using nlohmann::json;

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split_csv_line(std::string_view line)
{
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return cells;
}

inline std::optional<double> parse_double(std::string_view s)
{
    double value = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        return std::nullopt;
    }
    return value;
}

inline double require_double(std::string_view s, std::size_t line)
{
    const auto v = parse_double(s);
    if (!v) {
        throw InputError("line " + std::to_string(line) + ": '" + std::string(s) + "' is not a number");
    }
    if (!std::isfinite(*v)) {
        throw InputError("line " + std::to_string(line) + ": non-finite value");
    }
    return *v;
}

inline std::vector<std::vector<std::string>> read_csv_rows(std::istream& in)
{
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        rows.push_back(split_csv_line(line));
    }
    return rows;
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline json parse_json_text(const std::string& text, const std::string& origin)
{
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw InputError("invalid JSON in " + origin + ": " + e.what());
    }
}

inline bool has_extension(const std::filesystem::path& path, std::string_view ext)
{
    auto e = path.extension().string();
    for (auto& c : e) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return e == ext;
}

} // namespace detail

inline std::string format_double(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// ---- point clouds -------------------------------------------------------

inline PointCloud parse_cloud_csv(std::istream& in)
{
    const auto rows = detail::read_csv_rows(in);
    if (rows.empty()) {
        throw InputError("cloud CSV has no points");
    }
    // The header is optional; a first row of numbers is data.
    const auto& first = rows.front();
    const bool has_header = std::any_of(first.begin(), first.end(),
                                        [](const std::string& cell) { return !detail::parse_double(cell); });
    const bool labelled = has_header && first.front() == "label";
    const std::size_t width = first.size();
    const std::size_t dim = width - (labelled ? 1 : 0);
    if (dim == 0) {
        throw InputError("cloud CSV header declares no coordinate columns");
    }
    if (has_header && rows.size() < 2) {
        throw InputError("cloud CSV has no points");
    }
    std::vector<double> flat;
    std::vector<std::string> labels;
    for (std::size_t r = has_header ? 1 : 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != width) {
            throw InputError("line " + std::to_string(r + 1) + ": expected " + std::to_string(width)
                             + " columns, got " + std::to_string(row.size()));
        }
        std::size_t c = 0;
        if (labelled) {
            labels.push_back(row[c++]);
        }
        for (; c < row.size(); ++c) {
            flat.push_back(detail::require_double(row[c], r + 1));
        }
    }
    return PointCloud(dim, std::move(flat), std::move(labels));
}

inline PointCloud cloud_from_json(const json& j)
{
    try {
        const auto& points = j.at("points");
        if (points.empty()) {
            throw InputError("cloud JSON has no points");
        }
        auto coords_of = [](const json& p) {
            return (p.is_array() ? p : p.at("coords")).get<std::vector<double>>();
        };
        const auto dim = j.contains("dim") ? j.at("dim").get<std::size_t>() : coords_of(points.front()).size();
        std::vector<double> flat;
        std::vector<std::string> labels;
        bool any_label = false;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto& p = points[i];
            const auto coords = coords_of(p);
            if (coords.size() != dim) {
                throw InputError("point " + std::to_string(i) + " has " + std::to_string(coords.size())
                                 + " coordinates, expected " + std::to_string(dim));
            }
            flat.insert(flat.end(), coords.begin(), coords.end());
            if (p.is_object() && p.contains("label")) {
                any_label = true;
                labels.push_back(p.at("label").get<std::string>());
            } else {
                labels.push_back(std::to_string(i));
            }
        }
        if (!any_label) {
            labels.clear();
        }
        return PointCloud(dim, std::move(flat), std::move(labels));
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed cloud JSON: ") + e.what());
    }
}

inline json to_json(const PointCloud& cloud)
{
    json points = json::array();
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto p = cloud.point(i);
        json entry = {{"coords", std::vector<double>(p.begin(), p.end())}};
        if (cloud.has_labels()) {
            entry["label"] = cloud.labels()[i];
        }
        points.push_back(std::move(entry));
    }
    return {{"dim", cloud.dim()}, {"points", std::move(points)}};
}

inline std::string to_csv(const PointCloud& cloud)
{
    std::string out = "label";
    for (std::size_t k = 1; k <= cloud.dim(); ++k) {
        out += ",x" + std::to_string(k);
    }
    out += '\n';
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        out += cloud.label(i);
        for (double c : cloud.point(i)) {
            out += ',' + format_double(c);
        }
        out += '\n';
    }
    return out;
}

inline PointCloud load_cloud(const std::filesystem::path& path)
{
    if (detail::has_extension(path, ".json")) {
        return cloud_from_json(detail::parse_json_text(detail::read_file(path), path.string()));
    }
    std::istringstream in(detail::read_file(path));
    return parse_cloud_csv(in);
}

// ---- distance matrices ---------------------------------------------------

inline json to_json(const DistanceMatrix& m)
{
    json rows = json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
        const auto r = m.row(i);
        rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    json j = {{"n", m.size()}, {"entries", std::move(rows)}};
    if (m.has_labels()) {
        j["labels"] = m.labels();
    }
    return j;
}

inline DistanceMatrix matrix_from_json(const json& j)
{
    try {
        const auto n = j.at("n").get<std::size_t>();
        const auto rows = j.at("entries").get<std::vector<std::vector<double>>>();
        if (rows.size() != n) {
            throw InputError("matrix JSON declares n = " + std::to_string(n) + " but has "
                             + std::to_string(rows.size()) + " rows");
        }
        std::vector<std::string> labels;
        if (j.contains("labels")) {
            labels = j.at("labels").get<std::vector<std::string>>();
        }
        return DistanceMatrix::from_rows(rows, std::move(labels));
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed matrix JSON: ") + e.what());
    }
}

inline std::string to_csv(const DistanceMatrix& m)
{
    std::string out;
    for (std::size_t i = 0; i < m.size(); ++i) {
        out += (i ? "," : "") + m.label(i);
    }
    out += '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.size(); ++j) {
            out += (j ? "," : "") + format_double(m(i, j));
        }
        out += '\n';
    }
    return out;
}

inline DistanceMatrix parse_matrix_csv(std::istream& in)
{
    auto rows = detail::read_csv_rows(in);
    if (rows.empty()) {
        throw InputError("matrix CSV is empty");
    }
    std::vector<std::string> labels;
    // A square matrix with one extra row has a label header, numeric or not.
    if (rows.size() == rows.front().size() + 1) {
        labels = rows.front();
        rows.erase(rows.begin());
    }
    std::vector<std::vector<double>> values;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::vector<double> row;
        for (const auto& cell : rows[r]) {
            row.push_back(detail::require_double(cell, r + 1 + (labels.empty() ? 0 : 1)));
        }
        values.push_back(std::move(row));
    }
    return DistanceMatrix::from_rows(values, std::move(labels));
}

inline DistanceMatrix load_matrix(const std::filesystem::path& path)
{
    if (detail::has_extension(path, ".csv")) {
        std::istringstream in(detail::read_file(path));
        return parse_matrix_csv(in);
    }
    return matrix_from_json(detail::parse_json_text(detail::read_file(path), path.string()));
}

// ---- punctured specs -------------------------------------------------------

/// Parses a spec. A string `base` is a path resolved against `relative_to`.
/// Puncture entries are either indices into the base or coordinate arrays
/// (cloud bases only), which are appended to the cloud.
inline PuncturedSpec spec_from_json(const json& j, const std::filesystem::path& relative_to = {})
{
    try {
        const auto& b = j.at("base");
        std::variant<CloudBase, DistanceMatrix> base;
        if (b.is_string()) {
            const std::filesystem::path path = relative_to / b.get<std::string>();
            if (detail::has_extension(path, ".csv")) {
                base = CloudBase{load_cloud(path), BaseMetric::euclidean};
            } else {
                const auto doc = detail::parse_json_text(detail::read_file(path), path.string());
                if (doc.contains("entries")) {
                    base = matrix_from_json(doc);
                } else {
                    base = CloudBase{cloud_from_json(doc), BaseMetric::euclidean};
                }
            }
        } else if (b.contains("entries")) {
            base = matrix_from_json(b);
        } else {
            base = CloudBase{cloud_from_json(b), BaseMetric::euclidean};
        }

        if (auto* cb = std::get_if<CloudBase>(&base)) {
            cb->metric = parse_base_metric(j.value("metric", std::string("euclidean")));
        } else if (j.contains("metric")) {
            throw InputError("a matrix base does not take a metric selector");
        }

        PuncturedSpec spec;
        std::vector<double> extra;
        std::size_t appended = 0;
        const std::size_t base_size = std::holds_alternative<CloudBase>(base)
                                          ? std::get<CloudBase>(base).cloud.size()
                                          : std::get<DistanceMatrix>(base).size();
        for (const auto& p : j.at("punctures")) {
            if (p.is_number_integer()) {
                const auto idx = p.get<long long>();
                if (idx < 0) {
                    throw InputError("puncture index must be nonnegative");
                }
                spec.punctures.push_back(static_cast<std::size_t>(idx));
            } else if (p.is_array()) {
                auto* cb = std::get_if<CloudBase>(&base);
                if (!cb) {
                    throw InputError("coordinate punctures need a point-cloud base");
                }
                const auto coords = p.get<std::vector<double>>();
                if (coords.size() != cb->cloud.dim()) {
                    throw InputError("puncture coordinates have the wrong dimension");
                }
                extra.insert(extra.end(), coords.begin(), coords.end());
                spec.punctures.push_back(base_size + appended++);
            } else {
                throw InputError("punctures must be indices or coordinate arrays");
            }
        }
        if (!extra.empty()) {
            auto& cb = std::get<CloudBase>(base);
            std::vector<std::string> labels;
            if (cb.cloud.has_labels()) {
                for (std::size_t i = 0; i < appended; ++i) {
                    labels.push_back("puncture" + std::to_string(i));
                }
            }
            cb.cloud = cb.cloud.concat(PointCloud(cb.cloud.dim(), std::move(extra), std::move(labels)));
        }
        spec.base = std::move(base);
        spec.variant = parse_variant(j.value("variant", std::string("avg_tau")));
        spec.anchor = j.value("anchor", std::size_t{0});
        return spec;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed spec JSON: ") + e.what());
    }
}

inline json to_json(const PuncturedSpec& spec)
{
    json j;
    if (const auto* cb = std::get_if<CloudBase>(&spec.base)) {
        j["base"] = to_json(cb->cloud);
        j["metric"] = std::string(to_string(cb->metric));
    } else {
        j["base"] = to_json(std::get<DistanceMatrix>(spec.base));
    }
    j["punctures"] = spec.punctures;
    j["variant"] = std::string(to_string(spec.variant));
    j["anchor"] = spec.anchor;
    return j;
}

inline PuncturedSpec load_spec(const std::filesystem::path& path)
{
    return spec_from_json(detail::parse_json_text(detail::read_file(path), path.string()), path.parent_path());
}

// ---- reports ---------------------------------------------------------------

inline json to_json(const DeltaReport& r)
{
    json j = {{"delta", r.delta},
              {"witness", r.witness},
              {"mode", std::string(to_string(r.mode))},
              {"quadruples", r.quadruples},
              {"seed", nullptr},
              {"elapsed_ms", r.elapsed_ms}};
    if (r.seed) {
        j["seed"] = *r.seed;
    }
    return j;
}

inline json to_json(const ViolationReport& r)
{
    json violations = json::array();
    for (const auto& v : r.violations) {
        violations.push_back({{"check", v.check}, {"tuple", v.tuple}, {"lhs", v.lhs}, {"rhs", v.rhs}, {"slack", v.slack}});
    }
    json j = {{"name", r.name},
              {"checked", r.checked},
              {"violation_count", r.violation_count},
              {"violations", std::move(violations)},
              {"tolerance", r.tolerance},
              {"worst_slack", std::isfinite(r.worst_slack) ? json(r.worst_slack) : json(nullptr)},
              {"skipped", r.skipped},
              {"zero_off_diagonal", r.zero_off_diagonal},
              {"passed", r.passed()}};
    if (r.hypothesis_satisfied) {
        j["hypothesis_satisfied"] = *r.hypothesis_satisfied;
    }
    if (r.max_ratio) {
        j["max_ratio"] = *r.max_ratio;
    }
    if (r.seed) {
        j["seed"] = *r.seed;
    }
    return j;
}

inline json to_json(const ScenarioResult& r)
{
    json comparisons = json::array();
    for (const auto& c : r.comparisons) {
        comparisons.push_back({{"name", c.name},
                               {"measured", c.measured},
                               {"bound", c.bound},
                               {"relation", c.relation},
                               {"tolerance", c.tolerance},
                               {"holds", c.holds}});
    }
    return {{"scenario", r.id},
            {"inputs", r.inputs},
            {"measured", r.measured},
            {"comparisons", std::move(comparisons)},
            {"pass", r.pass}};
}

inline std::string render_table(const std::vector<ViolationReport>& reports)
{
    std::ostringstream out;
    out << std::left << std::setw(28) << "check" << std::right << std::setw(12) << "checked" << std::setw(12)
        << "violations" << std::setw(10) << "skipped" << std::setw(16) << "worst slack" << std::setw(14)
        << "max ratio" << '\n';
    for (const auto& r : reports) {
        out << std::left << std::setw(28) << r.name << std::right << std::setw(12) << r.checked << std::setw(12)
            << r.violation_count << std::setw(10) << r.skipped << std::setw(16) << std::setprecision(6)
            << r.worst_slack << std::setw(14);
        if (r.max_ratio) {
            out << *r.max_ratio;
        } else {
            out << "-";
        }
        out << '\n';
    }
    return out.str();
}

inline std::string render_table(const ScenarioResult& r)
{
    std::ostringstream out;
    out << "scenario " << r.id << ": " << (r.pass ? "PASS" : "FAIL") << '\n';
    for (const auto& c : r.comparisons) {
        out << "  " << (c.holds ? "ok  " : "FAIL") << "  " << std::left << std::setw(48) << c.name << std::right
            << std::setprecision(10) << std::setw(18) << c.measured << ' ' << c.relation << ' ' << std::setw(18)
            << c.bound << '\n';
    }
    return out.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write '" + path.string() + "'");
    }
    out << text;
    if (!out) {
        throw InputError("failed writing '" + path.string() + "'");
    }
}

} // namespace cassini
