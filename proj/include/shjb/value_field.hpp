#pragma once

#include <Eigen/Core>
#include <string>

namespace shjb {

/// Uniform space-time grid for the backward solver. n_y counts interior
/// points; the stored fields carry n_y + 2 nodes including the Neumann
/// boundary nodes. dt must divide T within 1e-12.
struct Grid1D {
    double y_min = -4.0;
    double y_max = 4.0;
    int n_y = 63;
    double dt = 1e-3;
    double T = 1.0;

    double dy() const { return (y_max - y_min) / (n_y + 1); }
    int n_nodes() const { return n_y + 2; }
    int n_steps() const;
    double y_at(int j) const { return y_min + j * dy(); }

    void validate() const;  // throws on malformed grids
};

/// u sampled on a time-space grid, bilinear interpolation clamped at the
/// edges. N is the finite terminal level; singular fields carry N = inf and a
/// time axis truncated at T - delta.
struct ValueField {
    Eigen::VectorXd times;  // ascending
    Eigen::VectorXd ys;
    Eigen::MatrixXd u;      // times.size() x ys.size(), nonnegative
    double T = 0.0;
    double N = 0.0;         // +inf marks a singular-limit field

    bool is_singular() const { return std::isinf(N); }
    double t_max() const { return times[times.size() - 1]; }

    double interpolate(double t, double y) const;

    /// V(t, y, x) = u(t, y) * x^2. Throws outside the field's time range.
    double value_at(double t, double y, double x) const;

    void write_csv(const std::string& path) const;
    void write_binary(const std::string& path) const;  // "SHJB1" dump
    static ValueField read_binary(const std::string& path);

    /// Sup-norm of the difference on the common (identical) grid.
    static double sup_diff(const ValueField& f1, const ValueField& f2);
};

}  // namespace shjb
