#pragma once

// Acceptance criteria with their tolerances pinned in code. Each criterion
// returns a pass/fail verdict, a one-line detail and its runtime.

#include <string>
#include <vector>

#include "seaz/simulate.hpp"

namespace seaz::acceptance {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    bool substantive_pass = false;  // verdict before the runtime budget is applied
    double seconds = 0.0;
    double budget_seconds = 0.0;
    std::string detail;
};

inline constexpr int kCriteria = 10;

std::string title(int id);
double budget_seconds(int id);

CriterionResult run_criterion(int id);
std::vector<CriterionResult> run_all();

// "[PASS] 3 title (0.12 s / 1 s): detail"
std::string format_line(const CriterionResult& r);

// Lossless environment that makes the coupled loop marginal at the frequency
// where Re{Z_l} is smallest: a spring when Im{Z_l} > 0 there, else a mass.
sim::EnvironmentModel tuned_environment(const model::SeaConfig& cfg_at_limit,
                                        const metrics::StiffnessOptions& opt = {});

}  // namespace seaz::acceptance
