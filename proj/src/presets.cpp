#include "shjb/presets.hpp"

#include <stdexcept>

namespace shjb {

ModelSpec make_preset(const std::string& name) {
    ModelSpec m;
    m.b = CoefficientField::constant(0.0);
    m.sigma = CoefficientField::constant(0.0);
    m.sigma_bar = CoefficientField::constant(1.0);
    m.T = 1.0;
    if (name == "uhat_benchmark") {
        m.eta = CoefficientField::constant(1.0);
        m.lambda = CoefficientField::constant(1.0);
        return m;
    }
    if (name == "envelope_upper") {
        m.eta = CoefficientField::constant(1.0);
        m.lambda = CoefficientField::constant(1.0);
        m.dark_pool.atoms.push_back({0, CoefficientField::infinite(), 1.0});
        return m;
    }
    if (name == "envelope_lower") {
        m.eta = CoefficientField::constant(1.0);
        m.lambda = CoefficientField::constant(0.0);
        m.dark_pool.atoms.push_back({0, CoefficientField::constant(0.0), 1.0});
        return m;
    }
    throw std::invalid_argument("unknown model preset: " + name);
}

bool is_preset(const std::string& name) {
    return name == "uhat_benchmark" || name == "envelope_upper" || name == "envelope_lower";
}

}  // namespace shjb
