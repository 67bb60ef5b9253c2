#include "shjb/value_field.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace shjb {

int Grid1D::n_steps() const { return static_cast<int>(std::llround(T / dt)); }

void Grid1D::validate() const {
    if (!(y_min < y_max)) throw std::invalid_argument("Grid1D: y_min must be below y_max");
    if (n_y < 3) throw std::invalid_argument("Grid1D: need at least 3 interior points");
    if (!(dt > 0.0) || !(T > 0.0)) throw std::invalid_argument("Grid1D: dt and T must be positive");
    const double r = std::abs(n_steps() * dt - T);
    if (r > 1e-12 * std::max(1.0, T))
        throw std::invalid_argument("Grid1D: dt must divide T");
}

namespace {

// Index of the left neighbor in an ascending uniform-ish axis, clamped so that
// [i, i+1] is always a valid bracket.
Eigen::Index bracket(const Eigen::VectorXd& axis, double v) {
    Eigen::Index lo = 0, hi = axis.size() - 1;
    if (v <= axis[0]) return 0;
    if (v >= axis[hi]) return hi - 1;
    while (hi - lo > 1) {
        const Eigen::Index mid = (lo + hi) / 2;
        (axis[mid] <= v ? lo : hi) = mid;
    }
    return lo;
}

double clamp01(double w) { return w < 0.0 ? 0.0 : (w > 1.0 ? 1.0 : w); }

}  // namespace

double ValueField::interpolate(double t, double y) const {
    const Eigen::Index i = bracket(times, t);
    const Eigen::Index j = bracket(ys, y);
    const double wt = clamp01((t - times[i]) / (times[i + 1] - times[i]));
    const double wy = clamp01((y - ys[j]) / (ys[j + 1] - ys[j]));
    return (1.0 - wt) * ((1.0 - wy) * u(i, j) + wy * u(i, j + 1)) +
           wt * ((1.0 - wy) * u(i + 1, j) + wy * u(i + 1, j + 1));
}

double ValueField::value_at(double t, double y, double x) const {
    if (t < times[0] - 1e-12 || t > t_max() + 1e-12)
        throw std::invalid_argument("value_at: t outside the field's time range");
    return interpolate(t, y) * x * x;
}

void ValueField::write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "t,y,u\n";
    os.precision(17);
    for (Eigen::Index i = 0; i < times.size(); ++i)
        for (Eigen::Index j = 0; j < ys.size(); ++j)
            os << times[i] << "," << ys[j] << "," << u(i, j) << "\n";
}

namespace {
constexpr char kMagic[5] = {'S', 'H', 'J', 'B', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

void put_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}
}  // namespace

void ValueField::write_binary(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    os.write(kMagic, 5);
    put_u32(os, static_cast<std::uint32_t>(times.size()));
    put_u32(os, static_cast<std::uint32_t>(ys.size()));
    put_f64(os, T);
    put_f64(os, N);
    for (Eigen::Index i = 0; i < times.size(); ++i) put_f64(os, times[i]);
    for (Eigen::Index j = 0; j < ys.size(); ++j) put_f64(os, ys[j]);
    for (Eigen::Index i = 0; i < times.size(); ++i)
        for (Eigen::Index j = 0; j < ys.size(); ++j) put_f64(os, u(i, j));
}

ValueField ValueField::read_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    char magic[5];
    is.read(magic, 5);
    if (!is || std::memcmp(magic, kMagic, 5) != 0)
        throw std::runtime_error("bad field file (magic mismatch): " + path);
    ValueField f;
    const std::uint32_t nt = get_u32(is), ny = get_u32(is);
    f.T = get_f64(is);
    f.N = get_f64(is);
    f.times.resize(nt);
    f.ys.resize(ny);
    f.u.resize(nt, ny);
    for (std::uint32_t i = 0; i < nt; ++i) f.times[i] = get_f64(is);
    for (std::uint32_t j = 0; j < ny; ++j) f.ys[j] = get_f64(is);
    for (std::uint32_t i = 0; i < nt; ++i)
        for (std::uint32_t j = 0; j < ny; ++j) f.u(i, j) = get_f64(is);
    if (!is) throw std::runtime_error("truncated field file: " + path);
    return f;
}

double ValueField::sup_diff(const ValueField& f1, const ValueField& f2) {
    if (f1.times.size() != f2.times.size() || f1.ys.size() != f2.ys.size())
        throw std::invalid_argument("sup_diff: fields on different grids");
    return (f1.u - f2.u).cwiseAbs().maxCoeff();
}

}  // namespace shjb
