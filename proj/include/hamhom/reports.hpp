#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hamhom/acceptance.hpp"
#include "hamhom/assumptions.hpp"
#include "hamhom/effective.hpp"
#include "hamhom/ergodic.hpp"
#include "hamhom/multiscale.hpp"

namespace hamhom {

// Shortest decimal text that parses back to exactly v. Locale-independent:
// '.' decimal point, no grouping. Infinities and NaN render as inf/-inf/nan.
std::string format_double(double v);

// Deterministic CSV assembly: fixed column set, one header row, every row
// newline-terminated. Cells containing separators are quoted per RFC 4180.
class CsvBuilder {
public:
    explicit CsvBuilder(std::span<const std::string> columns);

    void row(std::span<const std::string> cells);
    void row(std::initializer_list<std::string> cells);

    const std::string& text() const { return text_; }

private:
    std::size_t columns_ = 0;
    std::string text_;
};

// Writes via a temporary sibling plus rename, so readers never observe a
// partially written report. Creates missing parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);

// CSV renderings of the result types. Column sets are part of the output
// contract; goldens compare these byte for byte.
std::string csv_assumptions(const AssumptionReport& report);
std::string csv_ergodic(std::span<const ErgodicResult> results);
std::string csv_effective(const EffectiveTable& table);
std::string csv_convergence(const ConvergenceReport& report);
std::string csv_graph(std::span<const GraphResult> results);

// JSON renderings. resolved_config is the canonical config text produced by
// the parser; it is embedded under "config" so every report identifies the
// run that wrote it. Output ends with a newline.
std::string json_assumptions(const AssumptionReport& report, const std::string& resolved_config);
std::string json_ergodic(std::span<const ErgodicResult> results, const std::string& resolved_config);
std::string json_effective(const EffectiveTable& table, const std::string& resolved_config);
std::string json_convergence(const ConvergenceReport& report, const std::string& resolved_config);
std::string json_graph(std::span<const GraphResult> results, const std::string& resolved_config);

// Failure report: written when a run aborts so the directory still explains
// what was attempted and why it stopped.
std::string json_error(const std::string& stage, const std::string& message,
                       const std::string& resolved_config);

// Acceptance battery aggregates. Timings are deliberately excluded so the
// same outcome always renders to the same bytes.
std::string csv_acceptance(std::span<const CriterionResult> results);
std::string json_acceptance(std::span<const CriterionResult> results);

} // namespace hamhom
