#pragma once

#include <string>
#include <vector>

#include "shjb/pde.hpp"

namespace shjb {

struct SuiteResult {
    std::string name;
    bool pass = false;
    double worst = 0.0;  // worst margin / error observed, suite-specific units
    std::string detail;
};

struct VerifyOptions {
    // Negative-control hook: run the comparison suite with the drift
    // upwinding disabled, which is expected to break it.
    bool break_upwinding = false;
};

/// Verification suites, one per acceptance-style property. Tolerances are
/// fixed here, not configurable.
SuiteResult verify_closed_form_match();   // finite-N fields vs the two closed forms
SuiteResult verify_riccati_oracle();      // random constant specs vs the ODE oracle
SuiteResult verify_m_independence();      // truncation level does not matter
SuiteResult verify_singular_uhat();       // singular limit vs Lambda*coth(T-t)
SuiteResult verify_barriers();            // y-dependent singular fields vs barriers
SuiteResult verify_comparison(const VerifyOptions& opts = {});
SuiteResult verify_mc_value();            // feedback / TWAP value consistency
SuiteResult verify_state_decay();         // pathwise inventory decay bound
SuiteResult verify_monotonization();      // cost dominance of the transform
SuiteResult verify_determinism();         // worker count never changes results
SuiteResult verify_convergence();         // temporal/spatial orders + domain test

/// All suite names in acceptance order.
std::vector<std::string> suite_names();

/// Run a named suite (see suite_names). Throws on unknown names.
SuiteResult run_suite(const std::string& name, const VerifyOptions& opts = {});

}  // namespace shjb
