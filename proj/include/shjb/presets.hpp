#pragma once

#include <string>

#include "shjb/model.hpp"

namespace shjb {

/// Named constant-coefficient models used by verification runs:
///  - "uhat_benchmark": lambda = eta = sigma_bar = 1, no dark pool.
///  - "envelope_upper": (lambda, gamma, eta) = (1, +inf, 1), one unit-mass atom.
///  - "envelope_lower": (lambda, gamma, eta) = (0, 0, 1), one unit-mass atom.
/// Throws on unknown names.
ModelSpec make_preset(const std::string& name);

bool is_preset(const std::string& name);

}  // namespace shjb
