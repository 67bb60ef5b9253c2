#include "shjb/pde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace shjb {

namespace {

// Tridiagonal solve (Thomas), diagonally dominant by construction.
void thomas_solve(Eigen::VectorXd& lower, Eigen::VectorXd& diag, Eigen::VectorXd& upper,
                  Eigen::VectorXd& rhs) {
    const Eigen::Index n = diag.size();
    for (Eigen::Index i = 1; i < n; ++i) {
        const double m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (Eigen::Index i = n - 2; i >= 0; --i) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

}  // namespace

ValueField solve_finite_terminal(const ModelSpec& spec, double N, double M, const Grid1D& grid,
                                 const SolveOptions& opts) {
    if (!(N >= 0.0) || !(M > 0.0))
        throw std::invalid_argument("solve_finite_terminal: need N >= 0 and M > 0");
    grid.validate();
    const auto rep = validate_assumptions(spec);
    if (!rep.pass())
        throw std::invalid_argument("solve_finite_terminal: spec fails assumption validation");

    const int nt = grid.n_steps();
    const int ny = grid.n_nodes();
    const double dt = grid.dt, dy = grid.dy();
    const double inv_dy2 = 1.0 / (dy * dy);

    ValueField f;
    f.T = grid.T;
    f.N = N;
    f.times.resize(nt + 1);
    for (int i = 0; i <= nt; ++i) f.times[i] = i * dt;
    f.ys.resize(ny);
    for (int j = 0; j < ny; ++j) f.ys[j] = grid.y_at(j);
    f.u.resize(nt + 1, ny);
    f.u.row(nt).setConstant(N);

    Eigen::VectorXd lower(ny), diag(ny), upper(ny), rhs(ny);

    for (int i = nt - 1; i >= 0; --i) {
        const double t = f.times[i];
        for (int j = 0; j < ny; ++j) {
            const double y = f.ys[j];
            const double u_old = f.u(i + 1, j);
            const double a = spec.a(t, y);
            const double bv = spec.b(t, y);

            // Absorption coefficient of the linearized nonlinearity.
            double absorb = std::min(M, u_old) / spec.eta(t, y);
            if (u_old > 0.0) {
                for (const auto& at : spec.dark_pool.atoms) {
                    if (at.gamma.is_infinite()) continue;
                    const double g = at.gamma(t, y);
                    if (std::isinf(g)) continue;
                    absorb += at.mu * u_old / (g + u_old);
                }
            }

            double lo = -dt * a * inv_dy2;
            double up = -dt * a * inv_dy2;
            double dg = 1.0 + dt * absorb + 2.0 * dt * a * inv_dy2;
            if (opts.disable_upwinding) {
                lo += dt * bv / (2.0 * dy);
                up -= dt * bv / (2.0 * dy);
            } else {
                const double bp = std::max(bv, 0.0), bm = std::max(-bv, 0.0);
                lo -= dt * bm / dy;
                up -= dt * bp / dy;
                dg += dt * (bp + bm) / dy;
            }
            // Homogeneous Neumann: reflect the ghost node into the diagonal.
            if (j == 0) {
                dg += lo;
                lo = 0.0;
            }
            if (j == ny - 1) {
                dg += up;
                up = 0.0;
            }
            lower[j] = lo;
            diag[j] = dg;
            upper[j] = up;
            rhs[j] = u_old + dt * spec.lambda(t, y);
        }
        thomas_solve(lower, diag, upper, rhs);
        const double min_v = rhs.minCoeff();
        if (min_v < -1e-12) {
            std::ostringstream os;
            os << "solve_finite_terminal: negative value " << min_v << " at t=" << t;
            throw std::runtime_error(os.str());
        }
        f.u.row(i) = rhs.cwiseMax(0.0).transpose();
    }
    return f;
}

ValueField solve_finite(const ModelSpec& spec, double N, const Grid1D& grid,
                        const SolveOptions& opts) {
    const double Lambda = spec.Lambda();
    ValueField f = solve_finite_terminal(spec, N, N + Lambda * grid.T + 1.0, grid, opts);
    const double bound = N + Lambda * grid.T;
    if (f.u.maxCoeff() > bound * (1.0 + 1e-12) + 1e-12)
        throw std::runtime_error("solve_finite: a-priori bound N + Lambda*T violated");
    return f;
}

namespace {

ValueField restrict_times(const ValueField& f, double t_cut) {
    Eigen::Index keep = 0;
    while (keep < f.times.size() && f.times[keep] <= t_cut + 1e-12) ++keep;
    ValueField r;
    r.times = f.times.head(keep);
    r.ys = f.ys;
    r.u = f.u.topRows(keep);
    r.T = f.T;
    r.N = f.N;
    return r;
}

}  // namespace

SingularSolveReport solve_singular(const ModelSpec& spec, const Grid1D& grid, double delta,
                                   double tol, double N0, const SolveOptions& opts) {
    if (!(delta > 0.0) || delta >= grid.T)
        throw std::invalid_argument("solve_singular: delta must lie in (0, T)");
    if (!(tol > 0.0)) throw std::invalid_argument("solve_singular: tol must be positive");
    if (!(N0 > 0.0)) throw std::invalid_argument("solve_singular: N0 must be positive");

    SingularSolveReport report;
    report.delta = delta;
    report.tol = tol;
    report.kappa_flag = spec.kappa() < 1e-6;

    const double t_cut = grid.T - delta;
    Eigen::Index n_keep = 0;

    ValueField prev = solve_finite(spec, N0, grid, opts);
    while (n_keep < prev.times.size() && prev.times[n_keep] <= t_cut + 1e-12) ++n_keep;
    report.ladder.push_back({N0, std::numeric_limits<double>::infinity()});

    double N = N0;
    for (int rung = 1; std::isfinite(tol);  // tol = inf: degenerate single-rung ladder
         ++rung) {
        if (rung > 40)
            throw std::runtime_error("solve_singular: N-ladder exceeded 40 rungs");
        N *= 2.0;
        ValueField next = solve_finite(spec, N, grid, opts);

        double delta_rel = 0.0;
        for (Eigen::Index i = 0; i < n_keep; ++i) {
            for (Eigen::Index j = 0; j < prev.ys.size(); ++j) {
                const double lo = prev.u(i, j), hi = next.u(i, j);
                if (hi < lo - 1e-8)
                    throw std::runtime_error("solve_singular: N-monotonicity violated");
                delta_rel = std::max(delta_rel, (hi - lo) / std::max(lo, 1e-300));
            }
        }
        report.ladder.push_back({N, delta_rel});
        prev = std::move(next);
        if (delta_rel < tol) {
            report.converged = true;
            break;
        }
    }
    if (!std::isfinite(tol)) report.converged = true;

    report.field = restrict_times(prev, t_cut);
    report.field.N = std::numeric_limits<double>::infinity();
    report.barrier = check_barriers(report.field, barriers(spec));
    return report;
}

BarrierReport check_barriers(const ValueField& field, const BarrierPair& pair) {
    BarrierReport rep;
    double lower = std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < field.times.size(); ++i) {
        const double tt = pair.T - field.times[i];
        for (Eigen::Index j = 0; j < field.ys.size(); ++j) {
            const double scaled = field.u(i, j) * tt;
            lower = std::min(lower, scaled / pair.c0 - 1.0);
            upper = std::min(upper, 1.0 - scaled / pair.c1);
        }
    }
    rep.lower_margin = lower;
    rep.upper_margin = upper;
    rep.pass = lower >= -rep.tolerance && upper >= -rep.tolerance;
    return rep;
}

bool dominates(const CoefficientField& high, const CoefficientField& low) {
    if (high.is_infinite()) return true;
    if (high.inf() >= low.sup()) return true;
    // Same shape shifted in the base parameter.
    if (high.family == low.family && high.p1 == low.p1 && high.p2 == low.p2)
        return high.p0 >= low.p0;
    return false;
}

namespace {

bool same_field(const CoefficientField& x, const CoefficientField& y) {
    return x.family == y.family && x.p0 == y.p0 && x.p1 == y.p1 && x.p2 == y.p2;
}

void require_domination(const ModelSpec& lo, const ModelSpec& hi) {
    if (!same_field(lo.b, hi.b) || !same_field(lo.sigma, hi.sigma) ||
        !same_field(lo.sigma_bar, hi.sigma_bar))
        throw std::invalid_argument("check_comparison: dynamics (b, sigma, sigma_bar) must match");
    if (!dominates(hi.lambda, lo.lambda) || !dominates(hi.eta, lo.eta))
        throw std::invalid_argument("check_comparison: (lambda, eta) domination unverifiable");
    if (lo.dark_pool.atoms.size() != hi.dark_pool.atoms.size())
        throw std::invalid_argument("check_comparison: dark pools must share the atom structure");
    for (std::size_t k = 0; k < lo.dark_pool.atoms.size(); ++k) {
        const auto& al = lo.dark_pool.atoms[k];
        const auto& ah = hi.dark_pool.atoms[k];
        if (al.mu != ah.mu || !dominates(ah.gamma, al.gamma))
            throw std::invalid_argument("check_comparison: gamma domination unverifiable");
    }
}

}  // namespace

ComparisonReport check_comparison(const ModelSpec& spec_low, const ModelSpec& spec_high, double N,
                                  const Grid1D& grid, const SolveOptions& opts) {
    require_domination(spec_low, spec_high);
    const ValueField lo = solve_finite(spec_low, N, grid, opts);
    const ValueField hi = solve_finite(spec_high, N, grid, opts);
    ComparisonReport rep;
    rep.worst_gap = (hi.u - lo.u).minCoeff();
    rep.pass = rep.worst_gap >= -1e-6;
    return rep;
}

}  // namespace shjb
