#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "shjb/closed_form.hpp"
#include "shjb/model.hpp"
#include "shjb/value_field.hpp"

namespace shjb {

/// u(t, y) supplier for the feedback rule.
using UFunction = std::function<double(double, double)>;

/// Uniform simulation time grid.
struct TimeGrid {
    double T = 1.0;
    int n_steps = 1000;
    double dt() const { return T / n_steps; }
};

struct Policy {
    enum class Kind { Feedback, Twap, Custom };
    Kind kind = Kind::Twap;

    UFunction u;      // Feedback: xi = u x / eta, rho_k = u x- / (gamma_k + u)
    double twap_x0 = 0.0;

    // Custom: rate xi(t, y, x) held on a step, fills rho(t, y, x-, atom).
    std::function<double(double, double, double)> rate;
    std::function<double(double, double, double, int)> fill;
};

/// Feedback policy backed by a solved field. Inside the field's time range the
/// interpolant is used; in the terminal layer beyond it, the analytic
/// asymptote c(y)/(T - t) with c(y) matched by continuity at the field edge.
Policy make_feedback_policy(const ValueField& field);
/// Feedback policy from the constant-coefficient closed form Lambda*coth(T-t).
Policy make_uhat_policy(double Lambda, double T);
Policy make_twap_policy(double x0);
Policy make_custom_policy(std::function<double(double, double, double)> rate,
                          std::function<double(double, double, double, int)> fill);

/// Open-loop control pair (path functions of t only), the input of the
/// monotonizing transform.
struct CustomControl {
    std::function<double(double)> rate;            // xi(t), any sign
    std::function<double(double, int)> fill;       // rho(t, atom), any sign
};

struct JumpEvent {
    double t = 0.0;
    int atom = -1;
    double size = 0.0;
};

struct CostBreakdown {
    double impact = 0.0;     // integral eta xi^2
    double risk = 0.0;       // integral lambda x^2
    double slippage = 0.0;   // compensator integral sum_k gamma_k rho_k^2 mu_k
    double total() const { return impact + risk + slippage; }
};

struct Trajectory {
    Eigen::VectorXd times;
    Eigen::VectorXd y;
    Eigen::VectorXd x_pre, x_post;   // cadlag inventory around node fills
    Eigen::VectorXd xi;              // applied rate on the step starting at each node
    Eigen::VectorXd step_tau;        // effective rate duration per step (clamped steps)
    Eigen::VectorXd cum_impact, cum_risk, cum_slippage;  // running cost at each node
    Eigen::VectorXi fill_atom;       // atom filled at this node, -1 if none
    Eigen::VectorXd fill_size;       // total executed size at this node
    std::vector<JumpEvent> jumps;
    CostBreakdown cost;
    bool terminal_forced = false;
    bool terminal_met = false;       // x(T) == 0

    void write_csv(const std::string& path) const;
};

struct McEstimate {
    double mean = 0.0;
    double se = 0.0;
    std::size_t paths = 0;
    std::uint64_t seed = 0;

    std::string format() const;  // "mean=... se=... n=... seed=..."
};

/// Euler-Maruyama factor path on the grid nodes, both drivers simulated.
Eigen::VectorXd simulate_factor_path(const ModelSpec& spec, double y0, const TimeGrid& grid,
                                     std::uint64_t seed, std::uint64_t path_index);

/// One controlled liquidation path. Between nodes the inventory follows the
/// exact exponential (feedback) or linear (constant-rate) integrator with
/// coefficients frozen at the step midpoint; dark-pool fills execute at the
/// first node after their Poisson arrival. Feedback and TWAP trajectories are
/// forced to x(T) = 0 by a final rate x/dt whose cost is included.
Trajectory simulate_liquidation(const ModelSpec& spec, const Policy& policy, double x0, double y0,
                                const TimeGrid& grid, std::uint64_t seed,
                                std::uint64_t path_index);

/// Cost breakdown of a completed trajectory; components sum to the total.
CostBreakdown evaluate_cost(const Trajectory& traj);

/// Mean and standard error of the trajectory cost over independent paths.
/// Deterministic for fixed (seed, paths); worker count (SINGULAR_HJB_THREADS)
/// never changes the result.
McEstimate mc_value_estimate(const ModelSpec& spec, const Policy& policy, double x0, double y0,
                             const TimeGrid& grid, std::size_t paths, std::uint64_t seed);

struct MonotonizeResult {
    Trajectory raw;
    Trajectory monotone;
};

/// Control monotonization: simulate the raw open-loop control and its
/// transformed version (positive-part rate stopped at zero inventory, fills
/// clipped at the remaining inventory) on the same random stream. The
/// monotone trajectory is nonincreasing, nonnegative, and never costs more.
MonotonizeResult monotonize_control(const ModelSpec& spec, const CustomControl& control, double x0,
                                    double y0, const TimeGrid& grid, std::uint64_t seed,
                                    std::uint64_t path_index);

struct DecayReport {
    bool pass = false;
    double worst_ratio = 0.0;  // max over nodes of |x| / bound
    bool terminal_zero = false;
};

/// Pathwise decay bound |x_t| <= |x0| ((T-t)/T)^(c0/Lambda) * 1.05 for
/// feedback trajectories.
DecayReport check_state_decay(const Trajectory& traj, const ModelSpec& spec,
                              const BarrierPair& pair);

struct AdmissibilityReport {
    double C_hat = 0.0;
    double threshold = 0.0;  // 10 e^{mu(Z) T}
    bool flagged = false;
};

/// Fits the smallest C with |x_t|^2 <= C (T-t) * (realized forward integral of
/// xi^2) over the grid nodes; the conditional expectation in the continuous
/// estimate is replaced by the per-path realized integral.
AdmissibilityReport check_admissibility_estimate(const Trajectory& traj, const ModelSpec& spec);

}  // namespace shjb
