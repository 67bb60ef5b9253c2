#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "shjb/value_field.hpp"

using namespace shjb;

namespace {

ValueField make_field() {
    ValueField f;
    f.times = Eigen::VectorXd::LinSpaced(5, 0.0, 0.8);
    f.ys = Eigen::VectorXd::LinSpaced(4, -1.0, 2.0);
    f.u.resize(5, 4);
    for (Eigen::Index i = 0; i < 5; ++i)
        for (Eigen::Index j = 0; j < 4; ++j) f.u(i, j) = 1.0 + 0.25 * i + 0.5 * j;
    f.T = 1.0;
    f.N = 7.0;
    return f;
}

}  // namespace

TEST_CASE("grid accessors") {
    Grid1D g;
    g.y_min = -2.0;
    g.y_max = 2.0;
    g.n_y = 15;
    g.dt = 1e-2;
    g.T = 1.0;
    CHECK(g.dy() == doctest::Approx(0.25));
    CHECK(g.n_nodes() == 17);
    CHECK(g.n_steps() == 100);
    CHECK(g.y_at(0) == doctest::Approx(-2.0));
    CHECK(g.y_at(16) == doctest::Approx(2.0));
    g.validate();

    Grid1D bad = g;
    bad.dt = 3e-3;  // does not divide T
    CHECK_THROWS(bad.validate());
}

TEST_CASE("interpolation is exact on nodes and bilinear between") {
    const ValueField f = make_field();
    CHECK(f.interpolate(0.4, 0.0) == doctest::Approx(f.u(2, 1)));
    // midpoints average
    const double mid = f.interpolate(0.3, -0.5);
    CHECK(mid == doctest::Approx(0.25 * (f.u(1, 0) + f.u(1, 1) + f.u(2, 0) + f.u(2, 1))));
    // clamped outside the y range
    CHECK(f.interpolate(0.0, -9.0) == doctest::Approx(f.u(0, 0)));
}

TEST_CASE("value_at") {
    const ValueField f = make_field();
    CHECK(f.value_at(0.0, -1.0, 0.0) == doctest::Approx(0.0));
    CHECK(f.value_at(0.0, -1.0, 2.0) == doctest::Approx(4.0 * f.u(0, 0)));
    CHECK(f.value_at(0.0, -1.0, -2.0) == doctest::Approx(f.value_at(0.0, -1.0, 2.0)));
    CHECK_THROWS(f.value_at(0.9, 0.0, 1.0));  // beyond the stored time range

    ValueField c = make_field();
    c.u.setConstant(1.0 / std::tanh(1.0));
    CHECK(c.value_at(0.0, 0.0, 2.0) == doctest::Approx(5.252141).epsilon(1e-6));
}

TEST_CASE("binary round trip preserves the field exactly") {
    const ValueField f = make_field();
    const std::string path = (std::filesystem::temp_directory_path() / "vf_test.shjb").string();
    f.write_binary(path);
    const ValueField g = ValueField::read_binary(path);
    CHECK(g.T == f.T);
    CHECK(g.N == f.N);
    CHECK(ValueField::sup_diff(f, g) == 0.0);
    CHECK((g.times - f.times).cwiseAbs().maxCoeff() == 0.0);
    CHECK((g.ys - f.ys).cwiseAbs().maxCoeff() == 0.0);
    std::remove(path.c_str());
}

TEST_CASE("binary reader rejects a bad magic header") {
    const std::string path = (std::filesystem::temp_directory_path() / "vf_bad.shjb").string();
    {
        std::ofstream out(path, std::ios::binary);
        out << "NOTAFIELD";
    }
    CHECK_THROWS(ValueField::read_binary(path));
    std::remove(path.c_str());
}

TEST_CASE("csv writer emits one row per node") {
    const ValueField f = make_field();
    const std::string path = (std::filesystem::temp_directory_path() / "vf_test.csv").string();
    f.write_csv(path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,y,u");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 20);
    std::remove(path.c_str());
}
