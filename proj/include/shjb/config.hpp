#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shjb/model.hpp"
#include "shjb/value_field.hpp"

namespace shjb {

/// Full run configuration, one JSON file per experiment. Unknown keys fault,
/// so typos never silently fall back to defaults.
struct RunConfig {
    ModelSpec model;

    Grid1D grid;

    struct Singular {
        double delta = 0.05;
        double tol = 1e-4;
        double N0 = 160.0;
    } singular;

    struct Solve {
        double N = 0.0;  // > 0 selects a finite-terminal solve, else singular
    } solve;

    struct Mc {
        std::size_t paths = 10000;
        std::uint64_t seed = 42;
        double x0 = 1.0;
        double y0 = 0.0;
        int n_steps = 1000;
        std::string policy = "feedback";  // feedback | twap | uhat
    } mc;

    struct Verify {
        std::vector<std::string> suites{"all"};  // "all" expands to every suite
        bool break_upwinding = false;
    } verify;

    std::string output_dir = "out";
};

/// Parse a JSON config file. Throws std::runtime_error with a path-qualified
/// message on malformed input.
RunConfig load_config(const std::string& path);

/// Parse a coefficient description: a bare number (constant), the string
/// "inf", or an object {"family": ..., ...}.
CoefficientField parse_coefficient_json(const std::string& json_text);

}  // namespace shjb
