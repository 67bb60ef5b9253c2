#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "shjb/config.hpp"

using namespace shjb;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << text;
    return path.string();
}

}  // namespace

TEST_CASE("preset model config") {
    const std::string path = write_temp("cfg_preset.json", R"({
        "model": {"preset": "uhat_benchmark"},
        "mc": {"paths": 500, "seed": 9, "policy": "twap"},
        "output_dir": "run1"
    })");
    const RunConfig cfg = load_config(path);
    CHECK(cfg.model.lambda.p0 == doctest::Approx(1.0));
    CHECK(cfg.model.dark_pool.atoms.empty());
    CHECK(cfg.mc.paths == 500);
    CHECK(cfg.mc.seed == 9);
    CHECK(cfg.mc.policy == "twap");
    CHECK(cfg.output_dir == "run1");
    CHECK(cfg.verify.suites == std::vector<std::string>{"all"});
}

TEST_CASE("inline model with families and dark pool") {
    const std::string path = write_temp("cfg_inline.json", R"({
        "model": {
            "T": 2.0,
            "coefficients": {
                "b": {"family": "bounded_sin", "base": 0.0, "amplitude": 0.3, "frequency": 1.5},
                "sigma_bar": 1.2,
                "eta": {"family": "tanh_affine", "base": 0.7, "amplitude": 0.2, "slope": 1.0},
                "lambda": 0.5
            },
            "dark_pool": [
                {"gamma": 1.5, "mu": 0.4},
                {"gamma": "inf", "mu": 0.1}
            ]
        },
        "grid": {"y_min": -3.0, "y_max": 3.0, "n_y": 30, "dt": 0.001},
        "singular": {"delta": 0.1, "tol": 1e-3, "N0": 64}
    })");
    const RunConfig cfg = load_config(path);
    CHECK(cfg.model.T == doctest::Approx(2.0));
    CHECK(cfg.model.b.family == CoeffFamily::BoundedSin);
    CHECK(cfg.model.b.p1 == doctest::Approx(0.3));
    CHECK(cfg.model.eta.family == CoeffFamily::TanhAffine);
    CHECK(cfg.model.sigma_bar.p0 == doctest::Approx(1.2));
    REQUIRE(cfg.model.dark_pool.atoms.size() == 2);
    CHECK(cfg.model.dark_pool.atoms[0].gamma.p0 == doctest::Approx(1.5));
    CHECK(cfg.model.dark_pool.atoms[1].gamma.is_infinite());
    CHECK(cfg.model.mu_total() == doctest::Approx(0.5));
    CHECK(cfg.grid.n_y == 30);
    CHECK(cfg.grid.T == doctest::Approx(2.0));
    CHECK(cfg.singular.N0 == doctest::Approx(64.0));
}

TEST_CASE("malformed configs are rejected with located messages") {
    CHECK_THROWS(load_config(write_temp("cfg_bad1.json", R"({"grid": {}})")));  // no model
    CHECK_THROWS(load_config(
        write_temp("cfg_bad2.json", R"({"model": {"preset": "nope"}})")));
    CHECK_THROWS(load_config(write_temp(
        "cfg_bad3.json", R"({"model": {"preset": "uhat_benchmark"}, "grid": {"typo": 1}})")));
    CHECK_THROWS(load_config(write_temp(
        "cfg_bad4.json",
        R"({"model": {"preset": "uhat_benchmark"}, "mc": {"policy": "vwap"}})")));
    CHECK_THROWS(load_config(write_temp("cfg_bad5.json", "not json at all")));
    CHECK_THROWS(load_config("/nonexistent/path.json"));
}

TEST_CASE("coefficient snippets") {
    CHECK(parse_coefficient_json("2.5").p0 == doctest::Approx(2.5));
    CHECK(parse_coefficient_json(R"("inf")").is_infinite());
    const CoefficientField f = parse_coefficient_json(
        R"({"family": "tanh_affine", "base": 0.1, "amplitude": 0.9, "slope": 2.0})");
    CHECK(f.family == CoeffFamily::TanhAffine);
    CHECK(f.p2 == doctest::Approx(2.0));
    CHECK_THROWS(parse_coefficient_json(R"({"family": "spline"})"));
}
