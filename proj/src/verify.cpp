#include "shjb/verify.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "shjb/presets.hpp"
#include "shjb/rng.hpp"
#include "shjb/sim.hpp"

namespace shjb {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

double uniform_in(PathRng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

// Max relative error of a (spatially constant) field against a reference
// function of time, over all grid nodes.
double max_rel_err(const ValueField& f, const std::function<double(double)>& ref) {
    double err = 0.0;
    for (Eigen::Index i = 0; i < f.times.size(); ++i) {
        const double r = ref(f.times[i]);
        for (Eigen::Index j = 0; j < f.ys.size(); ++j)
            err = std::max(err, std::abs(f.u(i, j) - r) / std::abs(r));
    }
    return err;
}

Grid1D small_grid(double dt) {
    Grid1D g;
    g.y_min = -2.0;
    g.y_max = 2.0;
    g.n_y = 14;
    g.dt = dt;
    g.T = 1.0;
    return g;
}

// Random constant-coefficient spec inside the envelope constants.
ModelSpec random_constant_spec(PathRng& rng) {
    ModelSpec m;
    m.b = CoefficientField::constant(uniform_in(rng, -0.5, 0.5));
    m.sigma = CoefficientField::constant(uniform_in(rng, 0.0, 0.3));
    m.sigma_bar = CoefficientField::constant(uniform_in(rng, 0.8, 1.2));
    m.eta = CoefficientField::constant(uniform_in(rng, 0.6, 1.0));
    m.lambda = CoefficientField::constant(uniform_in(rng, 0.0, 1.0));
    m.dark_pool.atoms.push_back(
        {0, CoefficientField::constant(uniform_in(rng, 0.3, 2.0)), uniform_in(rng, 0.2, 1.0)});
    m.T = 1.0;
    return m;
}

// Random y-dependent spec with strictly positive eta and ellipticity.
ModelSpec random_spatial_spec(PathRng& rng) {
    ModelSpec m;
    m.b = CoefficientField::bounded_sin(0.0, uniform_in(rng, 0.0, 0.4), uniform_in(rng, 0.5, 1.5));
    m.sigma = CoefficientField::constant(0.2);
    m.sigma_bar = CoefficientField::bounded_sin(uniform_in(rng, 1.0, 1.5),
                                                uniform_in(rng, 0.1, 0.3),
                                                uniform_in(rng, 0.5, 1.0));
    m.eta = CoefficientField::tanh_affine(uniform_in(rng, 0.6, 0.9), uniform_in(rng, 0.1, 0.4),
                                          uniform_in(rng, 0.5, 1.5));
    m.lambda = CoefficientField::tanh_affine(uniform_in(rng, 0.2, 0.8), uniform_in(rng, 0.2, 1.0),
                                             uniform_in(rng, 0.5, 1.5));
    m.dark_pool.atoms.push_back({0,
                                 CoefficientField::bounded_sin(uniform_in(rng, 0.5, 1.5),
                                                               uniform_in(rng, 0.0, 0.3), 1.0),
                                 uniform_in(rng, 0.2, 0.8)});
    m.T = 1.0;
    return m;
}

}  // namespace

SuiteResult verify_closed_form_match() {
    SuiteResult r{"closed_form_match"};
    const Grid1D grid = small_grid(1e-3);
    const ModelSpec upper = make_preset("envelope_upper");
    const ModelSpec lower = make_preset("envelope_lower");
    double worst = 0.0;
    for (double N : {1.0, 10.0, 100.0}) {
        const ValueField fu = solve_finite(upper, N, grid);
        worst = std::max(worst,
                         max_rel_err(fu, [&](double t) { return u_tilde_N(1.0, N, 1.0, t); }));
        const ValueField fl = solve_finite(lower, N, grid);
        worst = std::max(worst,
                         max_rel_err(fl, [&](double t) { return u_bar_N(1.0, 1.0, N, 1.0, t); }));
    }
    r.worst = worst;
    r.pass = worst < 1e-3;
    r.detail = "max rel err vs closed forms = " + fmt(worst);
    return r;
}

SuiteResult verify_riccati_oracle() {
    SuiteResult r{"riccati_oracle"};
    const Eigen::VectorXd tg = descending_grid(1.0, 1e-3);

    // Oracle against the closed forms.
    double oracle_err = 0.0;
    for (double N : {1.0, 3.0}) {
        const OdeSolution su = riccati_solve(make_preset("envelope_upper"), N, tg);
        const OdeSolution sl = riccati_solve(make_preset("envelope_lower"), N, tg);
        for (Eigen::Index i = 0; i < tg.size(); ++i) {
            const double a = u_tilde_N(1.0, N, 1.0, tg[i]);
            const double b = u_bar_N(1.0, 1.0, N, 1.0, tg[i]);
            oracle_err = std::max(oracle_err, std::abs(su.values[i] - a) / a);
            if (b > 1e-12) oracle_err = std::max(oracle_err, std::abs(sl.values[i] - b) / b);
        }
    }

    // Solver against the oracle on random constant specs.
    PathRng rng(20240501, 2);
    const Grid1D grid = small_grid(1e-3);
    double solver_err = 0.0;
    for (int s = 0; s < 5; ++s) {
        const ModelSpec m = random_constant_spec(rng);
        const double N = uniform_in(rng, 1.0, 5.0);
        const OdeSolution ode = riccati_solve(m, N, descending_grid(1.0, 2.5e-4));
        const ValueField f = solve_finite(m, N, grid);
        for (Eigen::Index i = 0; i < f.times.size(); ++i) {
            const double w = ode.at(f.times[i]);
            solver_err = std::max(solver_err, std::abs(f.u(i, 0) - w) / std::abs(w));
        }
    }
    r.worst = std::max(solver_err, oracle_err);
    r.pass = oracle_err < 1e-8 && solver_err < 1e-3;
    r.detail = "oracle-vs-closed-form=" + fmt(oracle_err) + " solver-vs-oracle=" + fmt(solver_err);
    return r;
}

SuiteResult verify_m_independence() {
    SuiteResult r{"m_independence"};
    ModelSpec m;
    m.b = CoefficientField::constant(0.3);
    m.sigma_bar = CoefficientField::constant(1.0);
    m.eta = CoefficientField::constant(2.0);
    m.lambda = CoefficientField::constant(1.0);
    m.dark_pool.atoms.push_back({0, CoefficientField::constant(1.0), 0.5});
    m.T = 1.0;
    const double N = 10.0, Lambda = m.Lambda();
    const Grid1D grid = small_grid(1e-3);
    const ValueField f1 = solve_finite_terminal(m, N, N + Lambda * m.T + 1.0, grid);
    const ValueField f2 = solve_finite_terminal(m, N, 10.0 * (N + Lambda * m.T), grid);
    r.worst = ValueField::sup_diff(f1, f2);
    r.pass = r.worst <= 1e-10;
    r.detail = "sup diff over M = " + fmt(r.worst);
    return r;
}

SuiteResult verify_singular_uhat() {
    SuiteResult r{"singular_uhat"};
    const ModelSpec m = make_preset("uhat_benchmark");
    const Grid1D grid = small_grid(1e-3);
    const SingularSolveReport rep = solve_singular(m, grid, 0.05, 1e-4, 160.0);
    const double err = max_rel_err(rep.field, [&](double t) { return u_hat(1.0, 1.0, t); });
    bool decreasing = true;
    for (std::size_t k = 2; k < rep.ladder.size(); ++k)
        decreasing = decreasing && rep.ladder[k].delta < rep.ladder[k - 1].delta;
    r.worst = err;
    r.pass = rep.converged && err < 1e-3 && decreasing;
    r.detail = "rel err vs coth = " + fmt(err) + ", rungs=" + std::to_string(rep.ladder.size()) +
               (decreasing ? "" : ", ladder deltas not decreasing");
    return r;
}

SuiteResult verify_barriers() {
    SuiteResult r{"barriers"};
    PathRng rng(20240505, 5);
    Grid1D grid;
    grid.y_min = -3.0;
    grid.y_max = 3.0;
    grid.n_y = 46;
    grid.dt = 1e-3;
    grid.T = 1.0;
    double worst = std::numeric_limits<double>::infinity();
    bool pass = true;
    for (int s = 0; s < 5; ++s) {
        const ModelSpec m = random_spatial_spec(rng);
        const SingularSolveReport rep = solve_singular(m, grid, 0.05, 1e-4, 160.0);
        pass = pass && rep.barrier.pass;
        worst = std::min({worst, rep.barrier.lower_margin, rep.barrier.upper_margin});
    }
    r.worst = worst;
    r.pass = pass;
    r.detail = "worst barrier margin = " + fmt(worst) + " (tolerance -0.02)";
    return r;
}

SuiteResult verify_comparison(const VerifyOptions& opts) {
    SuiteResult r{"comparison"};
    SolveOptions sopts;
    sopts.disable_upwinding = opts.break_upwinding;
    PathRng rng(20240506, 6);
    Grid1D grid = small_grid(2e-3);
    grid.n_y = 30;
    double worst = std::numeric_limits<double>::infinity();
    bool pass = true;
    for (int s = 0; s < 10; ++s) {
        const ModelSpec lo = random_spatial_spec(rng);
        ModelSpec hi = lo;
        switch (s % 3) {
            case 0: hi.lambda.p0 += uniform_in(rng, 0.1, 0.6); break;
            case 1: hi.eta.p0 += uniform_in(rng, 0.1, 0.4); break;
            default: hi.dark_pool.atoms[0].gamma.p0 += uniform_in(rng, 0.2, 1.0); break;
        }
        const ComparisonReport rep = check_comparison(lo, hi, 5.0, grid, sopts);
        pass = pass && rep.pass;
        worst = std::min(worst, rep.worst_gap);
    }
    // Identical pair: fields must coincide exactly.
    const ModelSpec m = random_spatial_spec(rng);
    const double ident = ValueField::sup_diff(solve_finite(m, 5.0, grid, sopts),
                                              solve_finite(m, 5.0, grid, sopts));
    pass = pass && ident == 0.0;

    if (opts.break_upwinding) {
        // Drift-dominated pair (cell Peclet ~ 50): the low spec carries a
        // subgrid-sharp source step that central drift differencing advects
        // with spurious overshoot past the constant-source envelope of the
        // high spec, so the discrete comparison principle fails.
        ModelSpec lo;
        lo.b = CoefficientField::constant(5.0);
        lo.sigma_bar = CoefficientField::constant(0.2);
        lo.eta = CoefficientField::constant(1.0);
        lo.lambda = CoefficientField::tanh_affine(0.0, 2.0, 25.0);
        lo.T = 1.0;
        ModelSpec hi = lo;
        hi.lambda = CoefficientField::constant(2.0);
        Grid1D coarse;
        coarse.y_min = -2.0;
        coarse.y_max = 2.0;
        coarse.n_y = 9;
        coarse.dt = 2e-3;
        coarse.T = 1.0;
        try {
            const ComparisonReport rep = check_comparison(lo, hi, 5.0, coarse, sopts);
            pass = pass && rep.pass;
            worst = std::min(worst, rep.worst_gap);
        } catch (const std::exception&) {
            pass = false;  // positivity fault counts as a broken scheme too
        }
    }
    r.worst = worst;
    r.pass = pass;
    r.detail = "worst comparison gap = " + fmt(worst) + ", identical-pair diff = " + fmt(ident);
    return r;
}

namespace {

constexpr std::uint64_t kMcSeed = 20240707;

McEstimate benchmark_estimate(bool feedback, std::size_t paths) {
    const ModelSpec m = make_preset("uhat_benchmark");
    const TimeGrid tg{1.0, 1000};
    const Policy p = feedback ? make_uhat_policy(1.0, 1.0) : make_twap_policy(1.0);
    return mc_value_estimate(m, p, 1.0, 0.0, tg, paths, kMcSeed);
}

}  // namespace

SuiteResult verify_mc_value() {
    SuiteResult r{"mc_value"};
    const McEstimate fb = benchmark_estimate(true, 10000);
    const McEstimate tw = benchmark_estimate(false, 10000);
    const double coth1 = 1.0 / std::tanh(1.0);
    const double twap_ref = 4.0 / 3.0;

    const double fb_err = std::abs(fb.mean - coth1);
    const double tw_err = std::abs(tw.mean - twap_ref);
    const bool fb_ok = fb_err <= 2.0 * fb.se + 0.01 * coth1;
    const bool tw_ok = tw_err <= 2.0 * tw.se + 1e-9;  // slack for rounding only
    const double gap_se = std::sqrt(fb.se * fb.se + tw.se * tw.se);
    const bool gap_ok = tw.mean - fb.mean >= 3.0 * gap_se;
    r.pass = fb_ok && tw_ok && gap_ok;
    r.worst = std::max(fb_err, tw_err);
    r.detail = "feedback " + fb.format() + " (target " + fmt(coth1) + "); twap " + tw.format() +
               " (target " + fmt(twap_ref) + ")";
    return r;
}

SuiteResult verify_state_decay() {
    SuiteResult r{"state_decay"};
    PathRng spec_rng(20240505, 5);
    const ModelSpec m = random_spatial_spec(spec_rng);
    Grid1D grid;
    grid.y_min = -3.0;
    grid.y_max = 3.0;
    grid.n_y = 46;
    grid.dt = 1e-3;
    grid.T = 1.0;
    const SingularSolveReport rep = solve_singular(m, grid, 0.05, 1e-4, 160.0);
    if (!rep.barrier.pass) {
        r.detail = "prerequisite barrier certificate failed";
        return r;
    }
    const Policy policy = make_feedback_policy(rep.field);
    const BarrierPair pair = barriers(m);
    const TimeGrid tg{1.0, 1000};
    double worst = 0.0;
    bool pass = true;
    for (std::uint64_t p = 0; p < 1000; ++p) {
        const Trajectory traj = simulate_liquidation(m, policy, 1.0, 0.0, tg, 20240808, p);
        const DecayReport d = check_state_decay(traj, m, pair);
        pass = pass && d.pass;
        worst = std::max(worst, d.worst_ratio);
    }
    r.worst = worst;
    r.pass = pass;
    r.detail = "worst |x|/bound ratio = " + fmt(worst);
    return r;
}

SuiteResult verify_monotonization() {
    SuiteResult r{"monotonization"};
    ModelSpec m;
    m.b = CoefficientField::constant(0.0);
    m.sigma_bar = CoefficientField::constant(1.0);
    m.eta = CoefficientField::constant(1.0);
    m.lambda = CoefficientField::constant(0.5);
    m.dark_pool.atoms.push_back({0, CoefficientField::constant(0.5), 0.6});
    m.dark_pool.atoms.push_back({1, CoefficientField::constant(2.0), 0.4});
    m.T = 1.0;
    const TimeGrid tg{1.0, 400};

    double worst_excess = 0.0, worst_C = 0.0;
    bool pass = true;
    for (std::uint64_t p = 0; p < 1000; ++p) {
        PathRng rng(20240909, p);
        // Rates stay above x0/T so every monotone path liquidates before T;
        // fill requests stay small so no single jump empties a large position
        // (which would make the per-path surrogate of the admissibility
        // constant degenerate).
        const double base = uniform_in(rng, 1.5, 3.0);
        const double amp = uniform_in(rng, 0.0, 1.0) * (base - 1.2);
        const double omega = uniform_in(rng, 1.0, 6.0);
        const double phase = uniform_in(rng, 0.0, 6.28318);
        const double c0f = uniform_in(rng, -0.1, 0.1);
        const double c1f = uniform_in(rng, -0.1, 0.1);
        const double x0 = uniform_in(rng, 0.0, 1.0);
        CustomControl ctl;
        ctl.rate = [=](double t) { return base + amp * std::sin(omega * t + phase); };
        ctl.fill = [=](double t, int atom) {
            const double c = atom == 0 ? c0f : c1f;
            return c * (0.5 + 0.5 * std::sin(3.0 * t + phase));
        };
        const MonotonizeResult res = monotonize_control(m, ctl, x0, 0.0, tg, 20240910, p);
        const double excess = res.monotone.cost.total() - res.raw.cost.total();
        worst_excess = std::max(worst_excess, excess);
        pass = pass && excess <= 1e-12;
        // Monotone trajectory must be nonincreasing and nonnegative.
        for (Eigen::Index i = 0; i + 1 < res.monotone.times.size(); ++i) {
            pass = pass && res.monotone.x_post[i] >= 0.0 &&
                   res.monotone.x_post[i + 1] <= res.monotone.x_post[i] + 1e-12;
        }
        const AdmissibilityReport adm = check_admissibility_estimate(res.monotone, m);
        worst_C = std::max(worst_C, adm.C_hat);
        pass = pass && !adm.flagged;
    }
    r.worst = worst_excess;
    r.pass = pass;
    r.detail = "worst cost excess = " + fmt(worst_excess) + ", worst C_hat = " + fmt(worst_C);
    return r;
}

SuiteResult verify_determinism() {
    SuiteResult r{"determinism"};
    const char* saved = std::getenv("SINGULAR_HJB_THREADS");
    const std::string saved_val = saved ? saved : "";

    ::setenv("SINGULAR_HJB_THREADS", "1", 1);
    const std::string s1 = benchmark_estimate(true, 10000).format();
    ::setenv("SINGULAR_HJB_THREADS", "8", 1);
    const std::string s8 = benchmark_estimate(true, 10000).format();
    if (saved)
        ::setenv("SINGULAR_HJB_THREADS", saved_val.c_str(), 1);
    else
        ::unsetenv("SINGULAR_HJB_THREADS");

    r.pass = s1 == s8;
    r.worst = r.pass ? 0.0 : 1.0;
    r.detail = r.pass ? ("identical outputs: " + s1) : ("1 thread: " + s1 + " vs 8: " + s8);
    return r;
}

SuiteResult verify_convergence() {
    SuiteResult r{"convergence"};

    // Temporal order against the ODE oracle.
    ModelSpec mc;
    mc.sigma_bar = CoefficientField::constant(1.0);
    mc.eta = CoefficientField::constant(2.0);
    mc.lambda = CoefficientField::constant(1.0);
    mc.dark_pool.atoms.push_back({0, CoefficientField::constant(1.0), 0.5});
    mc.T = 1.0;
    const double N = 4.0;
    const OdeSolution oracle = riccati_solve(mc, N, descending_grid(1.0, 2.5e-4));
    std::vector<double> errs;
    for (double dt : {4e-3, 2e-3, 1e-3}) {
        const ValueField f = solve_finite(mc, N, small_grid(dt));
        double e = 0.0;
        for (Eigen::Index i = 0; i + 1 < f.times.size(); ++i) {
            const double w = oracle.at(f.times[i]);
            e = std::max(e, std::abs(f.u(i, 0) - w) / w);
        }
        errs.push_back(e);
    }
    const double ot1 = std::log2(errs[0] / errs[1]);
    const double ot2 = std::log2(errs[1] / errs[2]);
    const bool temporal_ok = std::abs(ot1 - 1.0) <= 0.2 && std::abs(ot2 - 1.0) <= 0.2;

    // Spatial self-convergence on a drift-free y-dependent model.
    ModelSpec ms;
    ms.sigma_bar = CoefficientField::constant(1.0);
    ms.eta = CoefficientField::constant(1.0);
    ms.lambda = CoefficientField::tanh_affine(0.5, 1.0, 1.0);
    ms.T = 1.0;
    const auto spatial_field = [&](double y_min, double y_max, int n_y) {
        Grid1D g;
        g.y_min = y_min;
        g.y_max = y_max;
        g.n_y = n_y;
        g.dt = 5e-4;
        g.T = 1.0;
        return solve_finite(ms, 5.0, g);
    };
    const ValueField c1 = spatial_field(-4.0, 4.0, 31);
    const ValueField c2 = spatial_field(-4.0, 4.0, 63);
    const ValueField c3 = spatial_field(-4.0, 4.0, 127);
    const auto coarse_diff = [](const ValueField& coarse, const ValueField& fine) {
        double e = 0.0;
        for (Eigen::Index i = 0; i < coarse.times.size(); ++i)
            for (Eigen::Index j = 0; j < coarse.ys.size(); ++j)
                e = std::max(e, std::abs(coarse.u(i, j) - fine.u(i, 2 * j)));
        return e;
    };
    const double e12 = coarse_diff(c1, c2), e23 = coarse_diff(c2, c3);
    const double os = std::log2(e12 / e23);
    const bool spatial_ok = std::abs(os - 2.0) <= 0.3;

    // Domain-truncation insensitivity on the inner half.
    Grid1D gd;
    gd.y_min = -4.0;
    gd.y_max = 4.0;
    gd.n_y = 63;
    gd.dt = 1e-3;
    gd.T = 1.0;
    const ValueField d1 = solve_finite(ms, 5.0, gd);
    gd.y_min = -8.0;
    gd.y_max = 8.0;
    gd.n_y = 127;
    const ValueField d2 = solve_finite(ms, 5.0, gd);
    double dom = 0.0;
    for (Eigen::Index i = 0; i < d1.times.size(); ++i) {
        for (Eigen::Index j = 0; j < d1.ys.size(); ++j) {
            if (std::abs(d1.ys[j]) > 2.0 + 1e-12) continue;
            const double a = d1.u(i, j), b = d2.u(i, j + 32);
            dom = std::max(dom, std::abs(a - b) / std::abs(a));
        }
    }
    const bool domain_ok = dom < 1e-4;

    r.pass = temporal_ok && spatial_ok && domain_ok;
    r.worst = dom;
    r.detail = "temporal orders = " + fmt(ot1) + "/" + fmt(ot2) + ", spatial order = " + fmt(os) +
               ", domain-doubling rel change = " + fmt(dom);
    return r;
}

std::vector<std::string> suite_names() {
    return {"closed_form_match", "riccati_oracle", "m_independence", "singular_uhat",
            "barriers",          "comparison",     "mc_value",       "state_decay",
            "monotonization",    "determinism",    "convergence"};
}

SuiteResult run_suite(const std::string& name, const VerifyOptions& opts) {
    if (name == "closed_form_match") return verify_closed_form_match();
    if (name == "riccati_oracle") return verify_riccati_oracle();
    if (name == "m_independence") return verify_m_independence();
    if (name == "singular_uhat") return verify_singular_uhat();
    if (name == "barriers") return verify_barriers();
    if (name == "comparison") return verify_comparison(opts);
    if (name == "mc_value") return verify_mc_value();
    if (name == "state_decay") return verify_state_decay();
    if (name == "monotonization") return verify_monotonization();
    if (name == "determinism") return verify_determinism();
    if (name == "convergence") return verify_convergence();
    throw std::invalid_argument("unknown verification suite: " + name);
}

}  // namespace shjb
