#pragma once

#include <string>
#include <vector>

#include "hamhom/config.hpp"

namespace hamhom {

struct RunOutcome {
    int exit_code = 0;               // 0 success, 1 invalid configuration, 2 numerics failure
    std::vector<std::string> files;  // report paths written, in write order
    std::string message;             // one-line summary, or the failure text
};

// Executes the configured experiment and writes its reports into
// output.directory in the configured formats. Failures still produce an
// error report naming the stage that died, so the output directory always
// explains the run; the exit code separates configuration mistakes (1) from
// numerical non-convergence (2).
RunOutcome run_experiment(const ExperimentConfig& cfg);

} // namespace hamhom
