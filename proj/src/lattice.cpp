#include "kconv/lattice.hpp"

#include "kconv/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace kconv {

Grid::Grid(int level, double half_width)
    : level_(level),
      half_width_(half_width),
      spacing_(std::ldexp(half_width, -level)),
      size_(std::size_t{1} << (level + 1)) {}

std::vector<double> Grid::points() const {
    std::vector<double> xs(size_);
    for (std::size_t j = 0; j < size_; ++j) xs[j] = point(j);
    return xs;
}

bool Grid::nests_in(const Grid& fine) const noexcept {
    return fine.level_ >= level_ && fine.half_width_ == half_width_;
}

Grid build_grid(int m, double half_width, std::size_t max_dim) {
    if (!(half_width > 0.0) || !std::isfinite(half_width)) {
        throw ConfigError("grid half-width L must be positive and finite, got " +
                          std::to_string(half_width));
    }
    if (m < 0) throw ConfigError("grid level must be nonnegative, got " + std::to_string(m));
    if (m >= 62 || (std::size_t{1} << (m + 1)) > max_dim) {
        throw ConfigError("resource guard: level " + std::to_string(m) +
                          " exceeds the maximum dimension " + std::to_string(max_dim));
    }
    return Grid(m, half_width);
}

double periodic_distance(double x, double y, double half_width) {
    const double period = 2.0 * half_width;
    const double d = std::fmod(std::abs(x - y), period);
    return std::min(d, period - d);
}

MomentumSet momentum_set(const Grid& grid) {
    const auto n = static_cast<long long>(grid.size());
    const double dp = std::numbers::pi / grid.half_width();
    MomentumSet set{{}, dp};
    set.momenta.reserve(grid.size());
    for (long long k = -n / 2; k < n / 2; ++k) set.momenta.push_back(dp * static_cast<double>(k));
    return set;
}

namespace {

void require_size(const Grid& grid, std::size_t n) {
    if (n != grid.size()) {
        throw ConfigError("grid function has " + std::to_string(n) + " values, grid has " +
                          std::to_string(grid.size()));
    }
}

// exp(i p x_j) with p = pi k / L and x_j = -L + j h reduces to a root of unity
// times a sign; using integer phases keeps the transform exact to rounding.
std::complex<double> plane_wave(long long k, std::size_t j, std::size_t n) {
    const long long phase = (k * static_cast<long long>(j)) % static_cast<long long>(n);
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(phase) / static_cast<double>(n);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;  // e^{-i pi k}
    return sign * std::complex<double>(std::cos(angle), std::sin(angle));
}

}  // namespace

std::vector<std::complex<double>> fourier_transform(const Grid& grid,
                                                    std::span<const std::complex<double>> f) {
    require_size(grid, f.size());
    const std::size_t n = grid.size();
    const auto half = static_cast<long long>(n / 2);
    std::vector<std::complex<double>> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const long long k = static_cast<long long>(i) - half;
        std::complex<double> acc{};
        for (std::size_t j = 0; j < n; ++j) acc += f[j] * std::conj(plane_wave(k, j, n));
        out[i] = grid.spacing() * acc;
    }
    return out;
}

std::vector<std::complex<double>> inverse_fourier_transform(
    const Grid& grid, std::span<const std::complex<double>> f_hat) {
    require_size(grid, f_hat.size());
    const std::size_t n = grid.size();
    const auto half = static_cast<long long>(n / 2);
    std::vector<std::complex<double>> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::complex<double> acc{};
        for (std::size_t i = 0; i < n; ++i) {
            acc += f_hat[i] * plane_wave(static_cast<long long>(i) - half, j, n);
        }
        out[j] = acc / (2.0 * grid.half_width());
    }
    return out;
}

}  // namespace kconv
