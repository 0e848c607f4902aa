// Runs the full acceptance battery and reports one line per criterion.
// Exit status is the number of failing criteria (0 = all pass).

#include <iostream>

#include "hamhom/acceptance.hpp"

int main() {
    const auto results = hamhom::run_acceptance();
    const int failures = hamhom::report_acceptance(results, std::cout);
    return failures;
}
