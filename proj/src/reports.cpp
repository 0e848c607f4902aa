#include "hamhom/reports.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <system_error>

#include "json.hpp"

#include "hamhom/errors.hpp"

namespace hamhom {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

const char* method_name(ErgodicMethod m) {
    return m == ErgodicMethod::discount ? "discount" : "longtime";
}

ordered_json config_node(const std::string& resolved_config) {
    if (resolved_config.empty()) return ordered_json::object();
    return ordered_json::parse(resolved_config);
}

ordered_json ergodic_node(const ErgodicResult& r) {
    ordered_json j;
    j["method"] = method_name(r.method);
    j["lambda"] = r.lambda;
    j["parameter"] = r.parameter;
    j["oscillation"] = r.oscillation;
    j["residual"] = r.residual;
    ordered_json hist = ordered_json::array();
    for (const auto& [param, estimate] : r.history)
        hist.push_back(ordered_json{{"parameter", param}, {"estimate", estimate}});
    j["history"] = std::move(hist);
    return j;
}

std::string finish(ordered_json&& report) {
    std::string text = report.dump(2);
    text.push_back('\n');
    return text;
}

} // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw NumericsError("number formatting failed");
    return std::string(buf, ptr);
}

CsvBuilder::CsvBuilder(std::span<const std::string> columns) : columns_(columns.size()) {
    if (columns.empty()) throw ConfigError("a CSV needs at least one column");
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) text_ += ',';
        text_ += csv_escape(columns[i]);
    }
    text_ += '\n';
}

void CsvBuilder::row(std::span<const std::string> cells) {
    if (cells.size() != columns_)
        throw ConfigError("CSV row has " + std::to_string(cells.size()) + " cells, expected " +
                          std::to_string(columns_));
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) text_ += ',';
        text_ += csv_escape(cells[i]);
    }
    text_ += '\n';
}

void CsvBuilder::row(std::initializer_list<std::string> cells) {
    row(std::span<const std::string>(cells.begin(), cells.size()));
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw ConfigError("cannot create directory " + path.parent_path().string() +
                                  ": " + ec.message());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp.string());
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) throw ConfigError("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw ConfigError("cannot move " + tmp.string() + " into place: " + ec.message());
}

std::string csv_assumptions(const AssumptionReport& r) {
    static const std::string cols[] = {"constant", "value"};
    CsvBuilder csv(cols);
    csv.row({"C0", format_double(r.C0)});
    csv.row({"C1", format_double(r.C1)});
    csv.row({"C2", format_double(r.C2)});
    csv.row({"C3", format_double(r.C3)});
    csv.row({"C4", format_double(r.C4)});
    csv.row({"C5", format_double(r.C5)});
    csv.row({"l", format_double(r.l)});
    csv.row({"eta", format_double(r.eta)});
    csv.row({"scaling_defect", format_double(r.scaling_defect)});
    csv.row({"coercive_ok", r.coercive_ok ? "true" : "false"});
    csv.row({"lipschitz_ok", r.lipschitz_ok ? "true" : "false"});
    csv.row({"graph_scaling_ok", r.graph_scaling_ok ? "true" : "false"});
    csv.row({"samples_used", std::to_string(r.samples_used)});
    return csv.text();
}

std::string csv_ergodic(std::span<const ErgodicResult> results) {
    static const std::string cols[] = {"method", "parameter", "estimate", "final"};
    CsvBuilder csv(cols);
    for (const ErgodicResult& r : results) {
        for (const auto& [param, estimate] : r.history)
            csv.row({method_name(r.method), format_double(param), format_double(estimate),
                     "false"});
        csv.row({method_name(r.method), format_double(r.parameter), format_double(r.lambda),
                 "true"});
    }
    return csv.text();
}

std::string csv_effective(const EffectiveTable& table) {
    const std::size_t dims = table.p_grid.axes.size();
    std::vector<std::string> cols;
    for (std::size_t d = 0; d < dims; ++d) cols.push_back("p" + std::to_string(d));
    cols.insert(cols.end(), {"value", "discount", "longtime", "residual", "flagged"});
    CsvBuilder csv(cols);
    std::vector<std::string> cells(cols.size());
    for (std::size_t i = 0; i < table.values.size(); ++i) {
        std::vector<double> P = table.p_grid.point(i);
        for (std::size_t d = 0; d < dims; ++d) cells[d] = format_double(P[d]);
        const PointMeta& m = table.meta[i];
        cells[dims + 0] = format_double(table.values[i]);
        cells[dims + 1] = format_double(m.discount);
        cells[dims + 2] = format_double(m.longtime);
        cells[dims + 3] = format_double(m.residual);
        cells[dims + 4] = m.flagged ? "true" : "false";
        csv.row(cells);
    }
    return csv.text();
}

std::string csv_convergence(const ConvergenceReport& r) {
    static const std::string cols[] = {"epsilon", "fine_cells", "error", "decay_factor"};
    CsvBuilder csv(cols);
    for (std::size_t i = 0; i < r.epsilons.size(); ++i) {
        std::string factor = i == 0 ? "" : format_double(r.decay_factors[i - 1]);
        csv.row({format_double(r.epsilons[i]), std::to_string(r.fine_cells[i]),
                 format_double(r.errors[i]), factor});
    }
    return csv.text();
}

std::string csv_graph(std::span<const GraphResult> results) {
    static const std::string cols[] = {"num", "den", "p", "effective_value",
                                       "longtime_slope", "discrepancy"};
    CsvBuilder csv(cols);
    for (const GraphResult& r : results)
        csv.row({std::to_string(r.p.num), std::to_string(r.p.den), format_double(r.p.value()),
                 format_double(r.H_bar_lifted), format_double(r.slope_longtime),
                 format_double(r.discrepancy)});
    return csv.text();
}

std::string json_assumptions(const AssumptionReport& r, const std::string& resolved_config) {
    ordered_json report;
    report["kind"] = "verify";
    report["constants"] = {{"C0", r.C0}, {"C1", r.C1}, {"C2", r.C2},
                           {"C3", r.C3}, {"C4", r.C4}, {"C5", r.C5}};
    report["l"] = r.l;
    report["eta"] = r.eta;
    report["scaling_defect"] = r.scaling_defect;
    report["coercive_ok"] = r.coercive_ok;
    report["lipschitz_ok"] = r.lipschitz_ok;
    report["graph_scaling_ok"] = r.graph_scaling_ok;
    report["admitted"] = r.admitted();
    report["samples_used"] = r.samples_used;
    report["basis"] = "finite sampling lattice; a heuristic admission check, not a certificate";
    report["config"] = config_node(resolved_config);
    return finish(std::move(report));
}

std::string json_ergodic(std::span<const ErgodicResult> results,
                         const std::string& resolved_config) {
    ordered_json report;
    report["kind"] = "ergodic";
    ordered_json arr = ordered_json::array();
    for (const ErgodicResult& r : results) arr.push_back(ergodic_node(r));
    report["estimates"] = std::move(arr);
    if (results.size() == 2)
        report["method_gap"] = std::fabs(results[0].lambda - results[1].lambda);
    report["config"] = config_node(resolved_config);
    return finish(std::move(report));
}

std::string json_effective(const EffectiveTable& table, const std::string& resolved_config) {
    ordered_json report;
    report["kind"] = "effective";
    ordered_json axes = ordered_json::array();
    for (const PAxis& a : table.p_grid.axes)
        axes.push_back(ordered_json{{"min", a.min}, {"max", a.max}, {"count", a.count}});
    report["p_axes"] = std::move(axes);
    report["spec_digest"] = table.spec_digest;
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < table.values.size(); ++i) {
        const PointMeta& m = table.meta[i];
        rows.push_back(ordered_json{{"p", table.p_grid.point(i)},
                                    {"value", table.values[i]},
                                    {"discount", m.discount},
                                    {"longtime", m.longtime},
                                    {"residual", m.residual},
                                    {"flagged", m.flagged}});
    }
    report["points"] = std::move(rows);
    report["warnings"] = table.warnings;
    report["config"] = config_node(resolved_config);
    return finish(std::move(report));
}

std::string json_convergence(const ConvergenceReport& r, const std::string& resolved_config) {
    ordered_json report;
    report["kind"] = "homogenize";
    report["horizon"] = r.horizon;
    report["epsilons"] = r.epsilons;
    report["fine_cells"] = r.fine_cells;
    report["errors"] = r.errors;
    report["decay_factors"] = r.decay_factors;
    report["coarse_cells"] = r.coarse_cells;
    report["reference_cells"] = r.reference_cells;
    report["notes"] = r.notes;
    report["config"] = config_node(resolved_config);
    return finish(std::move(report));
}

std::string json_graph(std::span<const GraphResult> results, const std::string& resolved_config) {
    ordered_json report;
    report["kind"] = "graph";
    ordered_json rows = ordered_json::array();
    for (const GraphResult& r : results)
        rows.push_back(ordered_json{{"num", r.p.num},
                                    {"den", r.p.den},
                                    {"p", r.p.value()},
                                    {"effective_value", r.H_bar_lifted},
                                    {"longtime_slope", r.slope_longtime},
                                    {"discrepancy", r.discrepancy}});
    report["slopes"] = std::move(rows);
    report["config"] = config_node(resolved_config);
    return finish(std::move(report));
}

std::string json_error(const std::string& stage, const std::string& message,
                       const std::string& resolved_config) {
    ordered_json report;
    report["kind"] = "error";
    report["stage"] = stage;
    report["message"] = message;
    report["config"] = config_node(resolved_config);
    return finish(std::move(report));
}

std::string csv_acceptance(std::span<const CriterionResult> results) {
    static const std::string cols[] = {"criterion", "pass", "detail"};
    CsvBuilder csv(cols);
    for (const CriterionResult& r : results)
        csv.row({r.name, r.pass ? "true" : "false", r.detail});
    return csv.text();
}

std::string json_acceptance(std::span<const CriterionResult> results) {
    ordered_json report;
    report["kind"] = "acceptance";
    ordered_json rows = ordered_json::array();
    int failures = 0;
    for (const CriterionResult& r : results) {
        rows.push_back(ordered_json{{"criterion", r.name}, {"pass", r.pass},
                                    {"detail", r.detail}});
        if (!r.pass) ++failures;
    }
    report["criteria"] = std::move(rows);
    report["failures"] = failures;
    return finish(std::move(report));
}

} // namespace hamhom
