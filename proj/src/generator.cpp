#include "kconv/generator.hpp"

#include "kconv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kconv {

namespace {

void require_size(const Grid& grid, std::size_t n) {
    if (n != grid.size()) {
        throw ConfigError("dimension mismatch: grid function has " + std::to_string(n) +
                          " values, grid has " + std::to_string(grid.size()));
    }
}

}  // namespace

std::vector<double> apply_nabla(const Grid& grid, std::span<const double> f) {
    require_size(grid, f.size());
    const std::size_t n = f.size();
    const double inv = 1.0 / (2.0 * grid.spacing());
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = (f[(j + 1) % n] - f[(j + n - 1) % n]) * inv;
    return out;
}

std::vector<double> apply_delta(const Grid& grid, std::span<const double> f) {
    require_size(grid, f.size());
    const std::size_t n = f.size();
    const double h = grid.spacing();
    const double inv = 1.0 / (h * h);
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        out[j] = (f[(j + 1) % n] + f[(j + n - 1) % n] - 2.0 * f[j]) * inv;
    }
    return out;
}

PeriodicTridiagonalOperator::PeriodicTridiagonalOperator(Grid grid, std::vector<double> diag,
                                                         std::vector<double> up, std::vector<double> down)
    : grid_(grid), diag_(std::move(diag)), up_(std::move(up)), down_(std::move(down)) {
    if (diag_.size() != grid_.size() || up_.size() != grid_.size() || down_.size() != grid_.size()) {
        throw ConfigError("operator bands do not match the grid dimension");
    }
}

double PeriodicTridiagonalOperator::entry(std::size_t i, std::size_t j) const {
    const std::size_t n = size();
    double v = 0.0;
    if (i == j) v += diag_[i];
    if (j == (i + 1) % n) v += up_[i];
    if (j == (i + n - 1) % n) v += down_[i];
    return v;
}

double PeriodicTridiagonalOperator::max_abs_diag() const {
    double m = 0.0;
    for (double d : diag_) m = std::max(m, std::abs(d));
    return m;
}

double PeriodicTridiagonalOperator::max_row_sum() const {
    double m = 0.0;
    for (std::size_t j = 0; j < size(); ++j) m = std::max(m, std::abs(diag_[j] + up_[j] + down_[j]));
    return m;
}

bool PeriodicTridiagonalOperator::markov() const {
    for (std::size_t j = 0; j < size(); ++j) {
        if (!(up_[j] > 0.0) || !(down_[j] > 0.0)) return false;
    }
    return true;
}

void PeriodicTridiagonalOperator::check_dims(std::size_t in, std::size_t out) const {
    if (in != size() || out != size()) {
        throw ConfigError("dimension mismatch applying operator of size " + std::to_string(size()));
    }
}

std::vector<double> PeriodicTridiagonalOperator::apply(std::span<const double> f) const {
    std::vector<double> out(f.size());
    apply<double>(f, out);
    return out;
}

std::vector<std::complex<double>> PeriodicTridiagonalOperator::apply(
    std::span<const std::complex<double>> f) const {
    std::vector<std::complex<double>> out(f.size());
    apply<std::complex<double>>(f, out);
    return out;
}

PeriodicTridiagonalOperator build_generator(const CoefficientField& field, const Grid& grid) {
    const std::size_t n = grid.size();
    const double h = grid.spacing();
    std::vector<double> diag(n), up(n), down(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = grid.point(j);
        const double diffusion = field.vol_squared(x) / (2.0 * h * h);
        const double advection = field.drift(x) / (2.0 * h);
        up[j] = diffusion + advection;
        down[j] = diffusion - advection;
        // -(up + down) rather than -sigma^2/h^2 keeps each row sum an exact zero
        diag[j] = -(up[j] + down[j]);
    }
    return PeriodicTridiagonalOperator(grid, std::move(diag), std::move(up), std::move(down));
}

PeriodicTridiagonalOperator adjoint(const PeriodicTridiagonalOperator& op) {
    const std::size_t n = op.size();
    std::vector<double> diag(op.diag().begin(), op.diag().end());
    std::vector<double> up(n), down(n);
    for (std::size_t j = 0; j < n; ++j) {
        up[j] = op.down()[(j + 1) % n];
        down[j] = op.up()[(j + n - 1) % n];
    }
    return PeriodicTridiagonalOperator(op.grid(), std::move(diag), std::move(up), std::move(down));
}

}  // namespace kconv
