#include "shjb/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

#include "shjb/rng.hpp"

namespace shjb {

Policy make_feedback_policy(const ValueField& field) {
    Policy p;
    p.kind = Policy::Kind::Feedback;
    const double T = field.T;
    const double t_edge = field.t_max();
    p.u = [field, T, t_edge](double t, double y) {
        if (t <= t_edge) return field.interpolate(t, y);
        // Terminal layer: analytic asymptote c(y)/(T-t), matched at the edge.
        const double c = field.interpolate(t_edge, y) * (T - t_edge);
        return c / (T - t);
    };
    return p;
}

Policy make_uhat_policy(double Lambda, double T) {
    Policy p;
    p.kind = Policy::Kind::Feedback;
    p.u = [Lambda, T](double t, double) { return u_hat(Lambda, T, t); };
    return p;
}

Policy make_twap_policy(double x0) {
    Policy p;
    p.kind = Policy::Kind::Twap;
    p.twap_x0 = x0;
    return p;
}

Policy make_custom_policy(std::function<double(double, double, double)> rate,
                          std::function<double(double, double, double, int)> fill) {
    Policy p;
    p.kind = Policy::Kind::Custom;
    p.rate = std::move(rate);
    p.fill = std::move(fill);
    return p;
}

Eigen::VectorXd simulate_factor_path(const ModelSpec& spec, double y0, const TimeGrid& grid,
                                     std::uint64_t seed, std::uint64_t path_index) {
    PathRng rng(seed, path_index);
    const double dt = grid.dt(), sq = std::sqrt(dt);
    Eigen::VectorXd y(grid.n_steps + 1);
    y[0] = y0;
    for (int i = 0; i < grid.n_steps; ++i) {
        const double t = i * dt, yi = y[i];
        const double n1 = rng.normal(), n2 = rng.normal();
        y[i + 1] = yi + spec.b(t, yi) * dt + spec.sigma_bar(t, yi) * sq * n1 +
                   spec.sigma(t, yi) * sq * n2;
    }
    return y;
}

namespace {

// integral of x^2 over a step of length tau where x decays exponentially at
// rate k from x0.
double exp_x2_integral(double x0, double k, double tau) {
    if (k * tau < 1e-12) return x0 * x0 * tau;
    return x0 * x0 * (1.0 - std::exp(-2.0 * k * tau)) / (2.0 * k);
}

// integral of x^2 over a step of length tau where x moves linearly a -> b.
double lin_x2_integral(double a, double b, double tau) {
    return tau / 3.0 * (a * a + a * b + b * b);
}

struct SimMode {
    const Policy* policy = nullptr;          // feedback / twap / custom
    const CustomControl* control = nullptr;  // open-loop control
    bool monotone = false;                   // apply the monotonizing transform
};

Trajectory simulate_impl(const ModelSpec& spec, const SimMode& mode, double x0, double y0,
                         const TimeGrid& grid, std::uint64_t seed, std::uint64_t path_index) {
    const int n = grid.n_steps;
    const double dt = grid.dt(), sq = std::sqrt(dt);
    const double mu_total = spec.mu_total();
    const auto& atoms = spec.dark_pool.atoms;

    if (mode.monotone && x0 < 0.0)
        throw std::invalid_argument("monotonize: x0 must be nonnegative (apply the sign flip)");

    const bool feedback = mode.policy && mode.policy->kind == Policy::Kind::Feedback;
    const bool twap = mode.policy && mode.policy->kind == Policy::Kind::Twap;
    const bool forces_terminal = feedback || twap;

    Trajectory traj;
    traj.times.resize(n + 1);
    traj.y.resize(n + 1);
    traj.x_pre.resize(n + 1);
    traj.x_post.resize(n + 1);
    traj.xi = Eigen::VectorXd::Zero(n + 1);
    traj.step_tau = Eigen::VectorXd::Zero(n);
    traj.cum_impact = Eigen::VectorXd::Zero(n + 1);
    traj.cum_risk = Eigen::VectorXd::Zero(n + 1);
    traj.cum_slippage = Eigen::VectorXd::Zero(n + 1);
    traj.fill_atom = Eigen::VectorXi::Constant(n + 1, -1);
    traj.fill_size = Eigen::VectorXd::Zero(n + 1);
    traj.terminal_forced = forces_terminal;

    PathRng rng(seed, path_index);
    double y = y0, x = x0;
    traj.times[0] = 0.0;
    traj.y[0] = y0;
    traj.x_pre[0] = x0;
    traj.x_post[0] = x0;

    double next_jump = std::numeric_limits<double>::infinity();
    bool jump_armed = false;
    double impact = 0.0, risk = 0.0, slippage = 0.0;

    for (int i = 0; i < n; ++i) {
        const double t = i * dt;
        const double t1 = (i + 1) * dt;
        const double tm = t + 0.5 * dt;

        // Fixed draw order: diffusion first, then jump arrivals for the step.
        const double n1 = rng.normal(), n2 = rng.normal();
        const double y_next = y + spec.b(t, y) * dt + spec.sigma_bar(t, y) * sq * n1 +
                              spec.sigma(t, y) * sq * n2;

        std::vector<int> pending;
        if (mu_total > 0.0) {
            if (!jump_armed) {
                next_jump = rng.exponential(mu_total);
                jump_armed = true;
            }
            while (next_jump <= t1) {
                const double u = rng.uniform() * mu_total;
                double acc = 0.0;
                int pick = static_cast<int>(atoms.size()) - 1;
                for (std::size_t k = 0; k < atoms.size(); ++k) {
                    acc += atoms[k].mu;
                    if (u <= acc) {
                        pick = static_cast<int>(k);
                        break;
                    }
                }
                pending.push_back(pick);
                next_jump += rng.exponential(mu_total);
            }
        }

        const double eta_m = spec.eta(tm, y);
        const double lam_m = spec.lambda(tm, y);
        double x_end = x;
        double tau = dt;

        if (forces_terminal && i == n - 1) {
            // Terminal forcing: liquidate the remainder at rate x/dt.
            const double rate = x / dt;
            traj.xi[i] = rate;
            impact += eta_m * rate * rate * dt;
            risk += lam_m * lin_x2_integral(x, 0.0, dt);
            x_end = 0.0;
        } else if (feedback) {
            const double u_mid = mode.policy->u(tm, y);
            const double k = u_mid / eta_m;
            const double I2 = exp_x2_integral(x, k, dt);
            impact += eta_m * k * k * I2;
            risk += lam_m * I2;
            for (const auto& at : atoms) {
                if (at.gamma.is_infinite()) continue;
                const double g = at.gamma(tm, y);
                if (std::isinf(g)) continue;
                const double rho = u_mid * x / (g + u_mid);
                slippage += g * rho * rho * at.mu * dt;
            }
            traj.xi[i] = u_mid * x / eta_m;
            x_end = x * std::exp(-k * dt);
        } else if (twap) {
            const double rate = mode.policy->twap_x0 / grid.T;
            traj.xi[i] = rate;
            x_end = x - rate * dt;
            impact += eta_m * rate * rate * dt;
            risk += lam_m * lin_x2_integral(x, x_end, dt);
        } else {
            // Open-loop or state-dependent custom rate, held over the step.
            double rate = mode.control ? mode.control->rate(t) : mode.policy->rate(t, y, x);
            if (mode.monotone) {
                rate = std::max(rate, 0.0);
                if (x <= 0.0) {
                    rate = 0.0;
                    tau = 0.0;
                    x_end = x;
                } else if (rate * dt <= x) {
                    x_end = x - rate * dt;
                } else {
                    tau = x / rate;  // inventory hits zero inside the step
                    x_end = 0.0;
                }
                impact += eta_m * rate * rate * tau;
                risk += lam_m * lin_x2_integral(x, x_end, tau);
            } else {
                x_end = x - rate * dt;
                impact += eta_m * rate * rate * dt;
                risk += lam_m * lin_x2_integral(x, x_end, dt);
            }
            traj.xi[i] = rate;
            // Compensator slippage for the fill schedule.
            for (std::size_t k = 0; k < atoms.size(); ++k) {
                const auto& at = atoms[k];
                if (at.gamma.is_infinite()) continue;
                const double g = at.gamma(tm, y);
                if (std::isinf(g)) continue;
                double rho = 0.0;
                if (mode.control) {
                    rho = mode.control->fill(tm, static_cast<int>(k));
                    if (mode.monotone) rho = std::min(std::max(rho, 0.0), std::max(x, 0.0));
                } else if (mode.policy->fill) {
                    rho = mode.policy->fill(tm, y, x, static_cast<int>(k));
                }
                slippage += g * rho * rho * at.mu * dt;
            }
        }
        traj.step_tau[i] = tau;

        // Node i+1: continuous endpoint, then fills from this step's arrivals.
        double xc = x_end;
        if (!pending.empty() && i + 1 < n) {
            for (int k : pending) {
                const auto& at = atoms[static_cast<std::size_t>(k)];
                double size = 0.0;
                if (feedback) {
                    if (!at.gamma.is_infinite()) {
                        const double g = at.gamma(t1, y_next);
                        if (!std::isinf(g)) {
                            const double u_node = mode.policy->u(t1, y_next);
                            size = u_node * xc / (g + u_node);
                        }
                    }
                    if (std::abs(size) > std::abs(xc) + 1e-9)
                        throw std::runtime_error("simulate_liquidation: fill overshoots inventory");
                } else if (twap) {
                    size = 0.0;
                } else if (mode.control) {
                    size = mode.control->fill(t1, k);
                    if (mode.monotone) size = std::min(std::max(size, 0.0), std::max(xc, 0.0));
                } else if (mode.policy->fill) {
                    size = mode.policy->fill(t1, y_next, xc, k);
                }
                xc -= size;
                traj.jumps.push_back({t1, k, size});
                traj.fill_atom[i + 1] = k;
                traj.fill_size[i + 1] += size;
            }
        }

        traj.times[i + 1] = t1;
        traj.y[i + 1] = y_next;
        traj.x_pre[i + 1] = x_end;
        traj.x_post[i + 1] = xc;
        traj.cum_impact[i + 1] = impact;
        traj.cum_risk[i + 1] = risk;
        traj.cum_slippage[i + 1] = slippage;
        x = xc;
        y = y_next;
    }

    traj.cost.impact = impact;
    traj.cost.risk = risk;
    traj.cost.slippage = slippage;
    traj.terminal_met = traj.x_post[n] == 0.0;
    return traj;
}

}  // namespace

Trajectory simulate_liquidation(const ModelSpec& spec, const Policy& policy, double x0, double y0,
                                const TimeGrid& grid, std::uint64_t seed,
                                std::uint64_t path_index) {
    SimMode mode;
    mode.policy = &policy;
    return simulate_impl(spec, mode, x0, y0, grid, seed, path_index);
}

CostBreakdown evaluate_cost(const Trajectory& traj) { return traj.cost; }

McEstimate mc_value_estimate(const ModelSpec& spec, const Policy& policy, double x0, double y0,
                             const TimeGrid& grid, std::size_t paths, std::uint64_t seed) {
    if (paths < 1) throw std::invalid_argument("mc_value_estimate: need at least one path");

    std::size_t workers = 1;
    if (const char* env = std::getenv("SINGULAR_HJB_THREADS")) {
        const long v = std::atol(env);
        if (v > 0) workers = static_cast<std::size_t>(v);
    } else {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = std::min(workers, paths);

    std::vector<double> costs(paths);
    const auto run_range = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
            const Trajectory t = simulate_liquidation(spec, policy, x0, y0, grid, seed, p);
            costs[p] = t.cost.total();
        }
    };

    if (workers == 1) {
        run_range(0, paths);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (paths + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t lo = w * chunk, hi = std::min(paths, lo + chunk);
            if (lo < hi) pool.emplace_back(run_range, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    // Reduction in path-index order for bit-stable results.
    double sum = 0.0;
    for (double c : costs) sum += c;
    const double mean = sum / static_cast<double>(paths);
    double ss = 0.0;
    for (double c : costs) ss += (c - mean) * (c - mean);
    const double sd = paths > 1 ? std::sqrt(ss / static_cast<double>(paths - 1)) : 0.0;

    McEstimate est;
    est.mean = mean;
    est.se = sd / std::sqrt(static_cast<double>(paths));
    est.paths = paths;
    est.seed = seed;
    return est;
}

std::string McEstimate::format() const {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "mean=%.12g se=%.12g n=%zu seed=%llu", mean, se, paths,
                  static_cast<unsigned long long>(seed));
    return buf;
}

MonotonizeResult monotonize_control(const ModelSpec& spec, const CustomControl& control, double x0,
                                    double y0, const TimeGrid& grid, std::uint64_t seed,
                                    std::uint64_t path_index) {
    MonotonizeResult res;
    SimMode raw;
    raw.control = &control;
    res.raw = simulate_impl(spec, raw, x0, y0, grid, seed, path_index);
    SimMode mono = raw;
    mono.monotone = true;
    res.monotone = simulate_impl(spec, mono, x0, y0, grid, seed, path_index);
    return res;
}

DecayReport check_state_decay(const Trajectory& traj, const ModelSpec& spec,
                              const BarrierPair& pair) {
    DecayReport rep;
    const double T = pair.T;
    const double p = pair.c0 / spec.Lambda();
    const double x0 = std::abs(traj.x_post[0]);
    double worst = 0.0;
    const Eigen::Index n = traj.times.size();
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        const double bound = x0 * std::pow((T - traj.times[i]) / T, p) * 1.05;
        if (bound <= 0.0) continue;
        worst = std::max(worst, std::abs(traj.x_post[i]) / bound);
    }
    rep.worst_ratio = worst;
    rep.terminal_zero = traj.x_post[n - 1] == 0.0;
    rep.pass = worst <= 1.0 && rep.terminal_zero;
    return rep;
}

AdmissibilityReport check_admissibility_estimate(const Trajectory& traj, const ModelSpec& spec) {
    AdmissibilityReport rep;
    rep.threshold = 10.0 * std::exp(spec.mu_total() * traj.times[traj.times.size() - 1]);

    const Eigen::Index n = traj.step_tau.size();
    // Suffix sums of the realized forward integral of xi^2.
    Eigen::VectorXd fwd = Eigen::VectorXd::Zero(n + 1);
    for (Eigen::Index i = n - 1; i >= 0; --i)
        fwd[i] = fwd[i + 1] + traj.xi[i] * traj.xi[i] * traj.step_tau[i];

    const double T = traj.times[n];
    double c_hat = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x2 = traj.x_post[i] * traj.x_post[i];
        if (x2 == 0.0) continue;
        const double denom = (T - traj.times[i]) * fwd[i];
        c_hat = denom > 0.0 ? std::max(c_hat, x2 / denom)
                            : std::numeric_limits<double>::infinity();
    }
    rep.C_hat = c_hat;
    rep.flagged = !(c_hat <= rep.threshold);
    return rep;
}

void Trajectory::write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "t,y,x_pre,x_post,xi,fill_atom,fill_size,cost_impact,cost_risk,cost_slippage\n";
    os.precision(17);
    for (Eigen::Index i = 0; i < times.size(); ++i) {
        os << times[i] << "," << y[i] << "," << x_pre[i] << "," << x_post[i] << "," << xi[i] << ","
           << fill_atom[i] << "," << fill_size[i] << "," << cum_impact[i] << "," << cum_risk[i]
           << "," << cum_slippage[i] << "\n";
    }
}

}  // namespace shjb
