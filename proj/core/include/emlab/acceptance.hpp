#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace emlab {

struct AcceptanceResult {
    int number = 0;
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
    double seconds = 0.0;
    double budget_seconds = 0.0;
    std::string detail;
};

// Runs the whole 16-point battery in order, writing run artifacts under
// `scratch_dir`.  Never throws: exceptions inside a check fail that check
// and land in its detail text.
std::vector<AcceptanceResult> run_acceptance(const std::string& scratch_dir);

// One line per criterion plus a summary line; returns the number of failures.
int print_acceptance(const std::vector<AcceptanceResult>& results,
                     std::ostream& out);

}  // namespace emlab
