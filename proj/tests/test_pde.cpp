#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "shjb/pde.hpp"
#include "shjb/presets.hpp"

using namespace shjb;

namespace {

Grid1D test_grid(double dt = 1e-3) {
    Grid1D g;
    g.y_min = -2.0;
    g.y_max = 2.0;
    g.n_y = 14;
    g.dt = dt;
    g.T = 1.0;
    return g;
}

}  // namespace

TEST_CASE("zero terminal value and zero sources give the zero solution") {
    ModelSpec m;
    m.sigma_bar = CoefficientField::constant(1.0);
    m.eta = CoefficientField::constant(1.0);
    m.lambda = CoefficientField::constant(0.0);
    const ValueField f = solve_finite(m, 0.0, test_grid(1e-2));
    CHECK(f.u.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fields are nonnegative and respect the a-priori bound") {
    ModelSpec m = make_preset("uhat_benchmark");
    m.b = CoefficientField::bounded_sin(0.0, 0.3, 1.0);
    m.lambda = CoefficientField::tanh_affine(0.5, 1.0, 1.0);
    const double N = 3.0;
    const ValueField f = solve_finite(m, N, test_grid());
    CHECK(f.u.minCoeff() >= 0.0);
    const double Lambda = m.Lambda();
    for (Eigen::Index i = 0; i < f.times.size(); ++i)
        CHECK(f.u.row(i).maxCoeff() <= N + Lambda * (1.0 - f.times[i]) + 1e-9);
}

TEST_CASE("constant-coefficient solves are spatially constant") {
    const ValueField f = solve_finite(make_preset("envelope_upper"), 5.0, test_grid(1e-2));
    for (Eigen::Index i = 0; i < f.times.size(); ++i)
        CHECK(f.u.row(i).maxCoeff() - f.u.row(i).minCoeff() < 1e-12);
}

TEST_CASE("M-independence above the a-priori bound") {
    const ModelSpec m = make_preset("envelope_upper");
    const double N = 10.0, Lambda = 1.0, T = 1.0;
    const Grid1D g = test_grid();
    const ValueField f1 = solve_finite_terminal(m, N, N + Lambda * T + 2.0, g);
    const ValueField f2 = solve_finite_terminal(m, N, 50.0, g);
    CHECK(ValueField::sup_diff(f1, f2) <= 1e-10);
}

TEST_CASE("singular solve reproduces the benchmark closed form") {
    const SingularSolveReport rep =
        solve_singular(make_preset("uhat_benchmark"), test_grid(), 0.05, 1e-4, 160.0);
    CHECK(rep.converged);
    CHECK(rep.field.is_singular());
    CHECK(rep.field.t_max() <= 0.95 + 1e-12);
    double err = 0.0;
    for (Eigen::Index i = 0; i < rep.field.times.size(); ++i) {
        const double ref = u_hat(1.0, 1.0, rep.field.times[i]);
        for (Eigen::Index j = 0; j < rep.field.ys.size(); ++j)
            err = std::max(err, std::abs(rep.field.u(i, j) - ref) / ref);
    }
    CHECK(err < 1e-3);
    CHECK(rep.barrier.pass);
}

TEST_CASE("infinite tolerance returns the first rung") {
    const double inf = std::numeric_limits<double>::infinity();
    const SingularSolveReport rep =
        solve_singular(make_preset("uhat_benchmark"), test_grid(1e-2), 0.05, inf, 160.0);
    CHECK(rep.ladder.size() == 1);
    CHECK(rep.ladder[0].N == doctest::Approx(160.0));
    CHECK(rep.converged);
    // Equals the finite solve restricted to t <= T - delta.
    const ValueField fin = solve_finite(make_preset("uhat_benchmark"), 160.0, test_grid(1e-2));
    for (Eigen::Index i = 0; i < rep.field.times.size(); ++i)
        for (Eigen::Index j = 0; j < rep.field.ys.size(); ++j)
            CHECK(rep.field.u(i, j) == fin.u(i, j));
}

TEST_CASE("barrier checker flags a field scaled past the upper barrier") {
    const SingularSolveReport rep =
        solve_singular(make_preset("uhat_benchmark"), test_grid(1e-2), 0.05, 1e-3, 160.0);
    const BarrierPair pair = barriers(make_preset("uhat_benchmark"));
    ValueField scaled = rep.field;
    scaled.u *= 10.0 * std::exp(2.0);
    const BarrierReport bad = check_barriers(scaled, pair);
    CHECK(!bad.pass);
    CHECK(bad.upper_margin < 0.0);
}

TEST_CASE("comparison holds for dominated constant specs") {
    ModelSpec lo = make_preset("uhat_benchmark");
    lo.dark_pool.atoms.push_back({0, CoefficientField::constant(0.0), 1.0});
    ModelSpec hi = lo;
    hi.lambda = CoefficientField::constant(1.5);
    hi.dark_pool.atoms[0].gamma = CoefficientField::infinite();
    const ComparisonReport rep = check_comparison(lo, hi, 5.0, test_grid(1e-2));
    CHECK(rep.pass);
    CHECK(rep.worst_gap >= 0.0);
}

TEST_CASE("comparison faults when domination is unverifiable") {
    ModelSpec lo = make_preset("uhat_benchmark");
    ModelSpec hi = lo;
    hi.b = CoefficientField::constant(0.5);  // dynamics differ
    CHECK_THROWS(check_comparison(lo, hi, 5.0, test_grid(1e-2)));
}

TEST_CASE("dominates handles the parametric families") {
    CHECK(dominates(CoefficientField::infinite(), CoefficientField::constant(3.0)));
    CHECK(dominates(CoefficientField::constant(2.0), CoefficientField::constant(1.0)));
    CHECK(!dominates(CoefficientField::constant(1.0), CoefficientField::constant(2.0)));
    CHECK(dominates(CoefficientField::tanh_affine(1.0, 0.5, 2.0),
                    CoefficientField::tanh_affine(0.5, 0.5, 2.0)));
    CHECK(dominates(CoefficientField::constant(2.1),
                    CoefficientField::bounded_sin(1.0, 1.0, 3.0)));
}

TEST_CASE("y-monotone lambda produces a y-monotone field (diagnostic)") {
    ModelSpec m = make_preset("uhat_benchmark");
    m.lambda = CoefficientField::tanh_affine(1.0, 0.5, 1.0);
    const ValueField f = solve_finite(m, 2.0, test_grid(1e-2));
    // Interior check away from the Neumann boundaries.
    for (Eigen::Index j = 3; j + 4 < f.ys.size(); ++j)
        CHECK(f.u(0, j + 1) >= f.u(0, j) - 1e-9);
}
