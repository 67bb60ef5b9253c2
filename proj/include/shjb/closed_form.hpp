#pragma once

#include <Eigen/Core>
#include <string>

#include "shjb/model.hpp"

namespace shjb {

/// Two-sided growth bounds c0/(T-t) <= u <= c1/(T-t) for the singular solution.
struct BarrierPair {
    double c0 = 0.0;
    double c1 = 0.0;
    double T = 0.0;

    double lower(double t) const { return c0 / (T - t); }
    double upper(double t) const { return c1 / (T - t); }
};

/// Backward ODE solution w(t) on a descending time grid with w(T) = N.
struct OdeSolution {
    Eigen::VectorXd times;   // descending from T
    Eigen::VectorXd values;  // nonnegative
    double N = 0.0;
    bool clamped = false;    // true if any stage had to be clamped at 0

    /// Linear interpolation in t (clamped at the grid ends).
    double at(double t) const;
    void write_csv(const std::string& path) const;
};

/// Singular closed form for the constant triple (Lambda, +inf, Lambda):
/// u_hat(t) = Lambda * coth(T - t). Throws at t >= T.
double u_hat(double Lambda, double T, double t);

/// Finite-terminal solution for (Lambda, +inf, Lambda):
/// 2 Lambda / (1 - ((N-Lambda)/(N+Lambda)) e^{-2(T-t)}) - Lambda; equals N at T.
double u_tilde_N(double Lambda, double N, double T, double t);

/// Finite-terminal solution for (0, {gamma=0}, kappa0):
/// k0 m / (1 - (N/(N + k0 m)) e^{-m (T-t)}) - k0 m with m = mu(Z); equals N at T.
/// The mu_total = 0 branch degenerates to the pure-Riccati limit
/// N k0 / (k0 + N (T - t)).
double u_bar_N(double kappa0, double mu_total, double N, double T, double t);

/// Barrier constants c0 = kappa0 e^{-mu(Z) T}, c1 = Lambda e^{2T}. Throws if
/// the spec fails assumption validation.
BarrierPair barriers(const ModelSpec& spec);

/// Classical 4-stage one-step integration of -w' = F_hat(t, w) backward from
/// w(T) = N on the given descending-from-T grid. Requires y-independent
/// coefficients (throws otherwise); stages are clamped at 0 if they undershoot.
OdeSolution riccati_solve(const ModelSpec& spec, double N, const Eigen::VectorXd& time_grid);

/// Convenience: uniform descending grid from T to 0 with the given step.
Eigen::VectorXd descending_grid(double T, double step);

}  // namespace shjb
