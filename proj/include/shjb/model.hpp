#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace shjb {

/// Parametric coefficient families. The parametrization is deliberately
/// restricted so that global bounds and Lipschitz constants are available in
/// closed form; assumption validation never samples.
enum class CoeffFamily { Constant, TanhAffine, BoundedSin };

struct CoefficientField {
    CoeffFamily family = CoeffFamily::Constant;
    // Constant:   value = p0
    // TanhAffine: value = p0 + p1 * (1 + tanh(p2 * y)) / 2, range (p0, p0 + p1)
    // BoundedSin: value = p0 + p1 * sin(p2 * y)
    double p0 = 0.0, p1 = 0.0, p2 = 0.0;

    static CoefficientField constant(double v) { return {CoeffFamily::Constant, v, 0.0, 0.0}; }
    static CoefficientField tanh_affine(double base, double amplitude, double slope) {
        return {CoeffFamily::TanhAffine, base, amplitude, slope};
    }
    static CoefficientField bounded_sin(double base, double amplitude, double frequency) {
        return {CoeffFamily::BoundedSin, base, amplitude, frequency};
    }
    /// Sentinel for gamma = +inf (disables a dark-pool atom's absorption term).
    static CoefficientField infinite() {
        return constant(std::numeric_limits<double>::infinity());
    }

    double operator()(double /*t*/, double y) const {
        switch (family) {
            case CoeffFamily::Constant: return p0;
            case CoeffFamily::TanhAffine: return p0 + p1 * 0.5 * (1.0 + std::tanh(p2 * y));
            case CoeffFamily::BoundedSin: return p0 + p1 * std::sin(p2 * y);
        }
        return p0;
    }

    /// Infimum over (t, y). For TanhAffine this is approached but not attained.
    double inf() const {
        switch (family) {
            case CoeffFamily::Constant: return p0;
            case CoeffFamily::TanhAffine: return p0 + std::min(0.0, p1);
            case CoeffFamily::BoundedSin: return p0 - std::abs(p1);
        }
        return p0;
    }
    double sup() const {
        switch (family) {
            case CoeffFamily::Constant: return p0;
            case CoeffFamily::TanhAffine: return p0 + std::max(0.0, p1);
            case CoeffFamily::BoundedSin: return p0 + std::abs(p1);
        }
        return p0;
    }
    double sup_abs() const { return std::max(std::abs(inf()), std::abs(sup())); }

    /// Global Lipschitz constant in y, from the closed-form derivative bound of
    /// each family (tanh' <= 1, cos <= 1).
    double lipschitz_y() const {
        switch (family) {
            case CoeffFamily::Constant: return 0.0;
            case CoeffFamily::TanhAffine: return 0.5 * std::abs(p1 * p2);
            case CoeffFamily::BoundedSin: return std::abs(p1 * p2);
        }
        return 0.0;
    }

    bool is_constant() const { return family == CoeffFamily::Constant || p1 == 0.0; }
    bool is_infinite() const {
        return family == CoeffFamily::Constant && std::isinf(p0) && p0 > 0;
    }
};

struct DarkPoolAtom {
    int z_id = 0;
    CoefficientField gamma;  // slippage coefficient, values in [0, +inf]
    double mu = 0.0;         // nonnegative atom weight
};

/// Finite characteristic measure of the dark-pool mark space, represented as
/// a finite list of atoms.
struct DarkPoolMeasure {
    std::vector<DarkPoolAtom> atoms;

    double total_mass() const {
        double m = 0.0;
        for (const auto& a : atoms) m += a.mu;
        return m;
    }
};

/// Liquidation model: factor dynamics (b, sigma, sigma_bar), cost coefficients
/// (eta, lambda, dark-pool gamma/mu) and horizon T. One-dimensional factor.
struct ModelSpec {
    CoefficientField b = CoefficientField::constant(0.0);
    CoefficientField sigma = CoefficientField::constant(0.0);
    CoefficientField sigma_bar = CoefficientField::constant(1.0);
    CoefficientField eta = CoefficientField::constant(1.0);
    CoefficientField lambda = CoefficientField::constant(1.0);
    DarkPoolMeasure dark_pool;
    double T = 1.0;

    /// a = (sigma^2 + sigma_bar^2) / 2.
    double a(double t, double y) const {
        const double s = sigma(t, y), sb = sigma_bar(t, y);
        return 0.5 * (s * s + sb * sb);
    }

    /// Common bound Lambda over (b, sigma, sigma_bar, eta, lambda).
    double Lambda() const;
    /// Ellipticity constant: sigma_bar^2 >= 2*kappa everywhere.
    double kappa() const;
    /// Lower bound of eta.
    double kappa0() const;
    /// Common Lipschitz constant of (b, sigma, sigma_bar).
    double lipschitz() const;

    double mu_total() const { return dark_pool.total_mass(); }

    bool has_constant_coefficients() const {
        bool c = b.is_constant() && sigma.is_constant() && sigma_bar.is_constant() &&
                 eta.is_constant() && lambda.is_constant();
        for (const auto& at : dark_pool.atoms) c = c && at.gamma.is_constant();
        return c;
    }
};

struct AssumptionVerdict {
    bool pass = false;
    std::string detail;
};

struct AssumptionReport {
    AssumptionVerdict a1, a2, a3;
    double Lambda = 0.0, kappa = 0.0, kappa0 = 0.0, L = 0.0;
    bool pass() const { return a1.pass && a2.pass && a3.pass; }
};

/// Closed-form validation of the standing assumptions (boundedness, Lipschitz
/// continuity, uniform ellipticity / impact floor). Failures are report
/// entries, never faults.
AssumptionReport validate_assumptions(const ModelSpec& spec);

/// Nonlinearity F(t, y, phi) = lambda - sum_k mu_k phi^2/(gamma_k + phi) - phi^2/eta
/// for phi >= 0. An atom with gamma = +inf contributes 0, one with gamma = 0
/// contributes mu_k * phi. Throws on phi < 0.
double eval_F(const ModelSpec& spec, double t, double y, double phi);

/// F_hat(t, y, phi) = F(t, y, |phi|); even in phi.
double eval_F_hat(const ModelSpec& spec, double t, double y, double phi);

/// Semi-implicit linearization of F used by the truncated scheme:
///   lambda - sum_k mu_k phi_old phi_new/(gamma_k + phi_old) - (M ^ phi_old) phi_new/eta.
/// Linear in phi_new; equals eval_F when phi_new = phi_old <= M. Throws on
/// M <= 0 or phi_old < 0.
double eval_F_truncated(const ModelSpec& spec, double t, double y, double phi_old,
                        double phi_new, double M);

/// Coefficients of the theta-conjugated operator (d = 1 specialization) and the
/// weight itself. The conjugation is exact: a*theta'' + b_tilde*theta' + c*theta = 0.
struct WeightedCoefficients {
    double b_tilde = 0.0;
    double beta = 0.0;
    double c = 0.0;
    double theta = 1.0;
};

WeightedCoefficients weighted_coefficients(const ModelSpec& spec, int q, double t, double y);

/// theta(y) = (1 + y^2)^(-q).
double theta_weight(int q, double y);

}  // namespace shjb
