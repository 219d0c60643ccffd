#pragma once

#include <string>
#include <vector>

namespace plaq {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string details;
    double seconds = 0;
};

// Run the verification suite. `quick` trims Monte Carlo chain lengths (the
// checks themselves are identical).
std::vector<CriterionResult> run_acceptance(bool quick);

// Print one line per criterion; returns 0 when everything passed, 1 otherwise.
int acceptance_main(bool quick);

}  // namespace plaq
