#include "shjb/model.hpp"

#include <sstream>
#include <stdexcept>

namespace shjb {

double ModelSpec::Lambda() const {
    double lam = 0.0;
    for (const CoefficientField* f : {&b, &sigma, &sigma_bar, &eta, &lambda})
        lam = std::max(lam, f->sup_abs());
    return lam;
}

double ModelSpec::kappa() const {
    const double lo = sigma_bar.inf(), hi = sigma_bar.sup();
    double min_sq = 0.0;
    if (lo > 0.0 || hi < 0.0) min_sq = std::min(lo * lo, hi * hi);
    return 0.5 * min_sq;
}

double ModelSpec::kappa0() const { return eta.inf(); }

double ModelSpec::lipschitz() const {
    return std::max({b.lipschitz_y(), sigma.lipschitz_y(), sigma_bar.lipschitz_y()});
}

AssumptionReport validate_assumptions(const ModelSpec& spec) {
    AssumptionReport rep;
    rep.Lambda = spec.Lambda();
    rep.kappa = spec.kappa();
    rep.kappa0 = spec.kappa0();
    rep.L = spec.lipschitz();

    // (A1): common finite bound, nonnegative eta/lambda, finite measure,
    // nonnegative gamma and weights.
    rep.a1.pass = std::isfinite(rep.Lambda) && rep.Lambda > 0.0 && spec.eta.inf() >= 0.0 &&
                  spec.lambda.inf() >= 0.0 && std::isfinite(spec.mu_total());
    for (const auto& at : spec.dark_pool.atoms) {
        if (at.mu < 0.0 || (!at.gamma.is_infinite() && at.gamma.inf() < 0.0)) rep.a1.pass = false;
    }
    if (!rep.a1.pass) rep.a1.detail = "(A1) bound/nonnegativity violated";

    // (A2): finite Lipschitz constant of (b, sigma, sigma_bar); automatic for
    // the parametric families, recorded for completeness.
    rep.a2.pass = std::isfinite(rep.L);
    if (!rep.a2.pass) rep.a2.detail = "(A2) Lipschitz constant not finite";

    // (A3): uniform ellipticity and impact floor, strictly positive.
    rep.a3.pass = rep.kappa > 0.0 && rep.kappa0 > 0.0;
    if (!rep.a3.pass) {
        std::ostringstream os;
        os << "(A3) violated: kappa=" << rep.kappa << " kappa0=" << rep.kappa0;
        rep.a3.detail = os.str();
    }
    return rep;
}

namespace {

// Absorption contribution of one atom, mu * phi^2 / (gamma + phi) with the
// gamma = +inf and gamma = 0 limits.
double atom_term(const DarkPoolAtom& atom, double t, double y, double phi) {
    if (phi == 0.0) return 0.0;
    if (atom.gamma.is_infinite()) return 0.0;
    const double g = atom.gamma(t, y);
    if (std::isinf(g)) return 0.0;
    return atom.mu * phi * phi / (g + phi);
}

}  // namespace

double eval_F(const ModelSpec& spec, double t, double y, double phi) {
    if (phi < 0.0) throw std::invalid_argument("eval_F: phi must be nonnegative");
    double f = spec.lambda(t, y);
    for (const auto& at : spec.dark_pool.atoms) f -= atom_term(at, t, y, phi);
    f -= phi * phi / spec.eta(t, y);
    return f;
}

double eval_F_hat(const ModelSpec& spec, double t, double y, double phi) {
    return eval_F(spec, t, y, std::abs(phi));
}

double eval_F_truncated(const ModelSpec& spec, double t, double y, double phi_old,
                        double phi_new, double M) {
    if (M <= 0.0) throw std::invalid_argument("eval_F_truncated: M must be positive");
    if (phi_old < 0.0) throw std::invalid_argument("eval_F_truncated: phi_old must be nonnegative");
    double f = spec.lambda(t, y);
    if (phi_old > 0.0) {
        for (const auto& at : spec.dark_pool.atoms) {
            if (at.gamma.is_infinite()) continue;
            const double g = at.gamma(t, y);
            if (std::isinf(g)) continue;
            f -= at.mu * phi_old * phi_new / (g + phi_old);
        }
    }
    f -= std::min(M, phi_old) * phi_new / spec.eta(t, y);
    return f;
}

double theta_weight(int q, double y) { return std::pow(1.0 + y * y, -q); }

WeightedCoefficients weighted_coefficients(const ModelSpec& spec, int q, double t, double y) {
    const double a = spec.a(t, y);
    const double bv = spec.b(t, y);
    const double sv = spec.sigma(t, y);
    const double w = 1.0 + y * y;

    WeightedCoefficients out;
    out.b_tilde = bv + 4.0 * q * a * y / w;
    out.beta = 2.0 * q * sv * y / w;
    out.c = (2.0 * q / w) * (a + y * bv + 2.0 * (q - 1) * a * y * y / w);
    out.theta = theta_weight(q, y);
    return out;
}

}  // namespace shjb
