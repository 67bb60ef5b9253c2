#pragma once

#include <vector>

#include "shjb/closed_form.hpp"
#include "shjb/model.hpp"
#include "shjb/value_field.hpp"

namespace shjb {

struct BarrierReport {
    bool pass = false;
    double lower_margin = 0.0;  // min over nodes of u (T-t) / c0 - 1
    double upper_margin = 0.0;  // min over nodes of 1 - u (T-t) / c1
    double tolerance = 0.02;
};

struct LadderRung {
    double N = 0.0;
    double delta = 0.0;  // sup relative change against the previous rung
};

struct SingularSolveReport {
    std::vector<LadderRung> ladder;
    ValueField field;      // restricted to t <= T - delta
    double delta = 0.0;    // terminal-layer cutoff
    double tol = 0.0;
    bool converged = false;
    BarrierReport barrier;
    bool kappa_flag = false;  // kappa < 1e-6: outside the validated regime
};

struct ComparisonReport {
    bool pass = false;
    double worst_gap = 0.0;  // min over nodes of u_high - u_low
};

struct SolveOptions {
    // Test hook: drop drift upwinding (central drift) to break the discrete
    // comparison principle; used by the negative-control suite only.
    bool disable_upwinding = false;
};

/// Backward semi-implicit finite-difference solve of the finite-terminal
/// equation with explicit truncation level M. Terminal value u(T) = N;
/// homogeneous Neumann boundaries. The absorption terms are linearized about
/// the previous time level, giving a tridiagonal M-matrix system per step.
ValueField solve_finite_terminal(const ModelSpec& spec, double N, double M, const Grid1D& grid,
                                 const SolveOptions& opts = {});

/// solve_finite_terminal with the truncation made inactive: M = N + Lambda*T + 1.
/// Asserts the a-priori bound 0 <= u <= N + Lambda*T.
ValueField solve_finite(const ModelSpec& spec, double N, const Grid1D& grid,
                        const SolveOptions& opts = {});

/// Increasing-terminal-value construction of the singular solution: solve for
/// N = N0 * 2^k until the sup relative change on t <= T - delta drops below
/// tol, then certify barriers. Throws after 40 rungs or on a monotonicity
/// violation of the ladder.
SingularSolveReport solve_singular(const ModelSpec& spec, const Grid1D& grid, double delta,
                                   double tol, double N0, const SolveOptions& opts = {});

/// Certify c0/(T-t)(1 - tol_b) <= u <= c1/(T-t)(1 + tol_b) on all nodes of a
/// singular field (tol_b = 2%).
BarrierReport check_barriers(const ValueField& field, const BarrierPair& pair);

/// Comparison principle check: spec_high must dominate spec_low componentwise
/// in (lambda, gamma, eta) with identical (b, sigma, sigma_bar). Throws if the
/// domination cannot be verified from the parametric families.
ComparisonReport check_comparison(const ModelSpec& spec_low, const ModelSpec& spec_high, double N,
                                  const Grid1D& grid, const SolveOptions& opts = {});

/// True when high >= low pointwise, decided analytically from the families.
bool dominates(const CoefficientField& high, const CoefficientField& low);

}  // namespace shjb
