#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "shjb/model.hpp"
#include "shjb/rng.hpp"

using namespace shjb;

namespace {

ModelSpec unit_atom_spec() {
    ModelSpec m;
    m.eta = CoefficientField::constant(1.0);
    m.lambda = CoefficientField::constant(1.0);
    m.dark_pool.atoms.push_back({0, CoefficientField::constant(1.0), 1.0});
    return m;
}

}  // namespace

TEST_CASE("assumption constants for constant coefficients") {
    ModelSpec m;
    m.sigma_bar = CoefficientField::constant(1.0);
    m.eta = CoefficientField::constant(0.5);
    m.lambda = CoefficientField::constant(1.0);
    const AssumptionReport rep = validate_assumptions(m);
    CHECK(rep.pass());
    CHECK(rep.kappa == doctest::Approx(0.5));
    CHECK(rep.kappa0 == doctest::Approx(0.5));
}

TEST_CASE("eta with infimum zero fails the ellipticity assumption") {
    ModelSpec m;
    m.eta = CoefficientField::tanh_affine(0.0, 1.0, 1.0);
    const AssumptionReport rep = validate_assumptions(m);
    CHECK(!rep.a3.pass);
    CHECK(rep.kappa0 == doctest::Approx(0.0));
    CHECK(rep.a3.detail.find("(A3)") != std::string::npos);
}

TEST_CASE("bounded_sin Lipschitz constant is amplitude times frequency") {
    const CoefficientField f = CoefficientField::bounded_sin(2.0, 1.0, 3.0);
    CHECK(f.lipschitz_y() == doctest::Approx(3.0));
    CHECK(f.inf() == doctest::Approx(1.0));
    CHECK(f.sup() == doctest::Approx(3.0));
}

TEST_CASE("eval_F hand values") {
    const ModelSpec m = unit_atom_spec();
    CHECK(eval_F(m, 0.0, 0.0, 0.0) == doctest::Approx(1.0));
    CHECK(eval_F(m, 0.0, 0.0, 2.0) == doctest::Approx(1.0 - 4.0 / 3.0 - 4.0));

    ModelSpec inf_atom = m;
    inf_atom.dark_pool.atoms[0].gamma = CoefficientField::infinite();
    CHECK(eval_F(inf_atom, 0.0, 0.0, 5.0) == doctest::Approx(-24.0));

    ModelSpec zero_gamma = m;
    zero_gamma.dark_pool.atoms[0].gamma = CoefficientField::constant(0.0);
    // gamma = 0 contributes mu * phi
    CHECK(eval_F(zero_gamma, 0.0, 0.0, 2.0) == doctest::Approx(1.0 - 2.0 - 4.0));

    CHECK_THROWS(eval_F(m, 0.0, 0.0, -1.0));
}

TEST_CASE("eval_F_hat is even and matches eval_F on the positive axis") {
    const ModelSpec m = unit_atom_spec();
    CHECK(eval_F_hat(m, 0.0, 0.0, -2.0) == doctest::Approx(1.0 - 4.0 / 3.0 - 4.0));
    CHECK(eval_F_hat(m, 0.0, 0.0, 3.0) == doctest::Approx(eval_F(m, 0.0, 0.0, 3.0)));
    PathRng rng(7, 0);
    for (int i = 0; i < 100; ++i) {
        const double phi = 10.0 * (rng.uniform() - 0.5);
        CHECK(eval_F_hat(m, 0.0, 0.0, phi) == doctest::Approx(eval_F_hat(m, 0.0, 0.0, -phi)));
    }
}

TEST_CASE("F is monotone in the data") {
    PathRng rng(11, 0);
    for (int i = 0; i < 50; ++i) {
        const double phi = 5.0 * rng.uniform();
        ModelSpec lo = unit_atom_spec();
        ModelSpec hi = lo;
        hi.lambda = CoefficientField::constant(lo.lambda.p0 + rng.uniform());
        hi.eta = CoefficientField::constant(lo.eta.p0 + rng.uniform());
        hi.dark_pool.atoms[0].gamma =
            CoefficientField::constant(lo.dark_pool.atoms[0].gamma.p0 + rng.uniform());
        CHECK(eval_F(hi, 0.0, 0.0, phi) >= eval_F(lo, 0.0, 0.0, phi) - 1e-14);
    }
}

TEST_CASE("eval_F_truncated") {
    const ModelSpec m = unit_atom_spec();
    CHECK(eval_F_truncated(m, 0.0, 0.0, 2.0, 2.0, 10.0) == doctest::Approx(1.0 - 4.0 / 3.0 - 4.0));

    ModelSpec plain;
    plain.eta = CoefficientField::constant(1.0);
    plain.lambda = CoefficientField::constant(0.0);
    CHECK(eval_F_truncated(plain, 0.0, 0.0, 5.0, 1.0, 3.0) == doctest::Approx(-3.0));
    CHECK(eval_F_truncated(m, 0.0, 0.0, 0.0, 4.0, 10.0) == doctest::Approx(1.0));
    CHECK_THROWS(eval_F_truncated(m, 0.0, 0.0, 1.0, 1.0, 0.0));
    CHECK_THROWS(eval_F_truncated(m, 0.0, 0.0, -1.0, 1.0, 1.0));

    // Consistency with eval_F on the diagonal below M.
    PathRng rng(13, 0);
    for (int i = 0; i < 50; ++i) {
        const double phi = 3.0 * rng.uniform();
        CHECK(eval_F_truncated(m, 0.0, 0.0, phi, phi, 5.0) ==
              doctest::Approx(eval_F(m, 0.0, 0.0, phi)));
    }
}

TEST_CASE("weighted coefficients at y = 0") {
    ModelSpec m;
    m.b = CoefficientField::constant(0.7);
    m.sigma = CoefficientField::constant(0.3);
    m.sigma_bar = CoefficientField::constant(1.1);
    const int q = 2;
    const WeightedCoefficients w = weighted_coefficients(m, q, 0.0, 0.0);
    CHECK(w.b_tilde == doctest::Approx(0.7));
    CHECK(w.beta == doctest::Approx(0.0));
    CHECK(w.c == doctest::Approx(2.0 * q * m.a(0.0, 0.0)));
    CHECK(w.theta == doctest::Approx(1.0));
}

TEST_CASE("weighted coefficients vanish without dynamics") {
    ModelSpec m;
    m.sigma_bar = CoefficientField::constant(0.0);
    const WeightedCoefficients w = weighted_coefficients(m, 3, 0.0, 1.7);
    CHECK(w.b_tilde == doctest::Approx(0.0));
    CHECK(w.beta == doctest::Approx(0.0));
    CHECK(w.c == doctest::Approx(0.0));
}

TEST_CASE("theta weight values") {
    CHECK(theta_weight(2, 0.0) == doctest::Approx(1.0));
    CHECK(theta_weight(2, 1.0) == doctest::Approx(0.25));
    CHECK(theta_weight(3, 1.0) == doctest::Approx(0.125));
}

TEST_CASE("conjugation identity a theta'' + b_tilde theta' + c theta = 0") {
    ModelSpec m;
    m.b = CoefficientField::bounded_sin(0.2, 0.5, 1.3);
    m.sigma = CoefficientField::constant(0.4);
    m.sigma_bar = CoefficientField::tanh_affine(1.0, 0.5, 0.8);
    for (int q : {2, 3, 5}) {
        for (double y : {-2.0, -0.7, 0.0, 0.31, 1.9}) {
            const double h = 1e-5;
            const double tp = theta_weight(q, y + h), tm = theta_weight(q, y - h);
            const double t0 = theta_weight(q, y);
            const double d1 = (tp - tm) / (2 * h);
            const double d2 = (tp - 2 * t0 + tm) / (h * h);
            const WeightedCoefficients w = weighted_coefficients(m, q, 0.0, y);
            const double resid = m.a(0.0, y) * d2 + w.b_tilde * d1 + w.c * t0;
            // finite differencing limits the achievable residual here
            CHECK(std::abs(resid) < 1e-5);

            // Exact identity with analytic derivatives of theta.
            const double s = 1.0 + y * y;
            const double dth = -2.0 * q * y * std::pow(s, -q - 1);
            const double d2th = -2.0 * q * std::pow(s, -q - 1) +
                                4.0 * q * (q + 1) * y * y * std::pow(s, -q - 2);
            const double exact = m.a(0.0, y) * d2th + w.b_tilde * dth + w.c * t0;
            CHECK(std::abs(exact) < 1e-12);
        }
    }
}

TEST_CASE("gamma = infinity sentinel") {
    const CoefficientField g = CoefficientField::infinite();
    CHECK(g.is_infinite());
    CHECK(!CoefficientField::constant(3.0).is_infinite());
}
