#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hamhom {

// One end-to-end acceptance check. detail is deterministic (margins and
// counts, never timings) so aggregate reports are bit-stable across runs.
struct CriterionResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;  // informational; kept out of detail and reports
};

// Battery-wide adjustments for robustness reruns. The defaults run the
// shipped settings; a tolerance scale above one loosens every solver
// stopping tolerance, and a cells divisor above one shrinks every lattice,
// eventually tripping the per-axis resolution floors.
struct AcceptanceTuning {
    double residual_tol_scale = 1.0;  // multiplies each solver residual_tol; > 0
    int cells_divisor = 1;            // divides each lattice resolution; >= 1

    void validate() const;
};

// Runs the acceptance battery in a fixed order. Entries are independent: a
// failure (including an escaped exception) records its reason and the battery
// moves on. This is the slow suite; expect minutes, not seconds.
std::vector<CriterionResult> run_acceptance(const AcceptanceTuning& tuning = {});

// One PASS/FAIL line per entry plus a tally; returns the failure count.
int report_acceptance(const std::vector<CriterionResult>& results, std::ostream& out);

} // namespace hamhom
