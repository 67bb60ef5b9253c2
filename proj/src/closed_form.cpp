#include "shjb/closed_form.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace shjb {

double u_hat(double Lambda, double T, double t) {
    if (t >= T) throw std::invalid_argument("u_hat: t must be below the singular time T");
    return 2.0 * Lambda / (1.0 - std::exp(-2.0 * (T - t))) - Lambda;
}

double u_tilde_N(double Lambda, double N, double T, double t) {
    const double k = (N - Lambda) / (N + Lambda);
    return 2.0 * Lambda / (1.0 - k * std::exp(-2.0 * (T - t))) - Lambda;
}

double u_bar_N(double kappa0, double mu_total, double N, double T, double t) {
    if (mu_total == 0.0) {
        // Pure-Riccati limit -w' = -w^2/kappa0.
        return N * kappa0 / (kappa0 + N * (T - t));
    }
    const double km = kappa0 * mu_total;
    const double k = N / (N + km);
    return km / (1.0 - k * std::exp(-mu_total * (T - t))) - km;
}

BarrierPair barriers(const ModelSpec& spec) {
    const auto rep = validate_assumptions(spec);
    if (!rep.pass()) throw std::invalid_argument("barriers: spec fails assumption validation");
    BarrierPair p;
    p.c0 = rep.kappa0 * std::exp(-spec.mu_total() * spec.T);
    p.c1 = rep.Lambda * std::exp(2.0 * spec.T);
    p.T = spec.T;
    return p;
}

double OdeSolution::at(double t) const {
    const Eigen::Index n = times.size();
    if (t >= times[0]) return values[0];
    if (t <= times[n - 1]) return values[n - 1];
    // times descending: find bracketing pair.
    Eigen::Index lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        const Eigen::Index mid = (lo + hi) / 2;
        (times[mid] >= t ? lo : hi) = mid;
    }
    const double w = (times[lo] - t) / (times[lo] - times[hi]);
    return (1.0 - w) * values[lo] + w * values[hi];
}

void OdeSolution::write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "t,w\n";
    os.precision(17);
    for (Eigen::Index i = 0; i < times.size(); ++i) os << times[i] << "," << values[i] << "\n";
}

OdeSolution riccati_solve(const ModelSpec& spec, double N, const Eigen::VectorXd& time_grid) {
    if (!spec.has_constant_coefficients())
        throw std::invalid_argument("riccati_solve: coefficients must be y-independent");
    if (time_grid.size() < 2 || std::abs(time_grid[0] - spec.T) > 1e-12)
        throw std::invalid_argument("riccati_solve: grid must descend from T");

    OdeSolution sol;
    sol.times = time_grid;
    sol.values.resize(time_grid.size());
    sol.N = N;
    sol.values[0] = N;

    const auto f = [&](double t, double w) { return eval_F_hat(spec, t, 0.0, w); };
    double w = N;
    for (Eigen::Index i = 1; i < time_grid.size(); ++i) {
        const double t = time_grid[i - 1];
        const double h = time_grid[i - 1] - time_grid[i];
        const double k1 = f(t, w);
        const double k2 = f(t - 0.5 * h, w + 0.5 * h * k1);
        const double k3 = f(t - 0.5 * h, w + 0.5 * h * k2);
        const double k4 = f(t - h, w + h * k3);
        w += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (w < 0.0) {
            w = 0.0;
            sol.clamped = true;
        }
        sol.values[i] = w;
    }
    return sol;
}

Eigen::VectorXd descending_grid(double T, double step) {
    const auto n = static_cast<Eigen::Index>(std::llround(T / step));
    Eigen::VectorXd g(n + 1);
    for (Eigen::Index i = 0; i <= n; ++i) g[i] = T - static_cast<double>(i) * step;
    g[n] = 0.0;
    return g;
}

}  // namespace shjb
