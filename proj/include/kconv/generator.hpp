#pragma once

#include "kconv/coefficients.hpp"
#include "kconv/lattice.hpp"

#include <complex>
#include <span>
#include <vector>

namespace kconv {

/// Central first difference (f(x+h) - f(x-h)) / 2h with periodic wrap.
std::vector<double> apply_nabla(const Grid& grid, std::span<const double> f);
/// Second difference (f(x+h) + f(x-h) - 2f(x)) / h^2 with periodic wrap.
std::vector<double> apply_delta(const Grid& grid, std::span<const double> f);

/// Banded-cyclic operator: row j couples j to j+1 (up) and j-1 (down), mod N.
class PeriodicTridiagonalOperator {
public:
    PeriodicTridiagonalOperator(Grid grid, std::vector<double> diag, std::vector<double> up,
                                std::vector<double> down);

    const Grid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return diag_.size(); }
    int level() const noexcept { return grid_.level(); }
    double spacing() const noexcept { return grid_.spacing(); }

    std::span<const double> diag() const noexcept { return diag_; }
    std::span<const double> up() const noexcept { return up_; }
    std::span<const double> down() const noexcept { return down_; }

    /// Matrix entry (i, j); sums both bands when N = 2 and they land on one column.
    double entry(std::size_t i, std::size_t j) const;
    double max_abs_diag() const;
    /// Largest |diag + up + down| over rows.
    double max_row_sum() const;
    /// All off-diagonal rates strictly positive (a Markov generator).
    bool markov() const;

    template <class T>
    void apply(std::span<const T> f, std::span<T> out) const {
        check_dims(f.size(), out.size());
        const std::size_t n = size();
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t jp = (j + 1) % n;
            const std::size_t jm = (j + n - 1) % n;
            out[j] = diag_[j] * f[j] + up_[j] * f[jp] + down_[j] * f[jm];
        }
    }
    std::vector<double> apply(std::span<const double> f) const;
    std::vector<std::complex<double>> apply(std::span<const std::complex<double>> f) const;

private:
    void check_dims(std::size_t in, std::size_t out) const;

    Grid grid_;
    std::vector<double> diag_;
    std::vector<double> up_;
    std::vector<double> down_;
};

/// up = sigma^2/2h^2 + mu/2h, down = sigma^2/2h^2 - mu/2h, diag = -sigma^2/h^2 at each grid point.
/// Levels below m_zero still assemble; markov() then reports false.
PeriodicTridiagonalOperator build_generator(const CoefficientField& field, const Grid& grid);

/// Matrix transpose: the forward-equation operator acting on the y index.
PeriodicTridiagonalOperator adjoint(const PeriodicTridiagonalOperator& op);

}  // namespace kconv
