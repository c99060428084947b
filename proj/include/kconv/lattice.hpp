#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace kconv {

/// Largest lattice dimension accepted unless the caller raises it.
inline constexpr std::size_t kDefaultMaxDim = 2048;

/// Dyadic periodic lattice on [-L, L) with the endpoints identified.
///
/// Level m has 2^(m+1) points spaced h = L 2^-m. Points are computed from
/// their integer index, x_j = -L + j h, so refinement never accumulates
/// rounding drift, and index arithmetic wraps modulo the dimension.
class Grid {
public:
    Grid(int level, double half_width);

    int level() const noexcept { return level_; }
    double half_width() const noexcept { return half_width_; }
    double spacing() const noexcept { return spacing_; }
    std::size_t size() const noexcept { return size_; }

    double point(std::size_t j) const noexcept {
        return -half_width_ + static_cast<double>(j) * spacing_;
    }
    std::vector<double> points() const;

    /// Index j reduced modulo size(); accepts negative offsets.
    std::size_t wrap(long long j) const noexcept {
        const auto n = static_cast<long long>(size_);
        return static_cast<std::size_t>(((j % n) + n) % n);
    }

    /// True when `fine` refines this grid by an exact dyadic factor.
    bool nests_in(const Grid& fine) const noexcept;

private:
    int level_;
    double half_width_;
    double spacing_;
    std::size_t size_;
};

/// Builds level m on [-L, L); rejects L <= 0, m < 0 and grids over `max_dim` points.
Grid build_grid(int m, double half_width, std::size_t max_dim = kDefaultMaxDim);

/// min_n |x - y - 2Ln|, always in [0, L].
double periodic_distance(double x, double y, double half_width);

/// Momenta pi k / L for k = -N/2 .. N/2-1, N the grid dimension.
struct MomentumSet {
    std::vector<double> momenta;
    double spacing;
};

MomentumSet momentum_set(const Grid& grid);

// Discrete Fourier pair:  f^(p) = h sum_x f(x) e^{-ipx},  f(x) = (1/2L) sum_p f^(p) e^{ipx}.
std::vector<std::complex<double>> fourier_transform(const Grid& grid,
                                                    std::span<const std::complex<double>> f);
std::vector<std::complex<double>> inverse_fourier_transform(
    const Grid& grid, std::span<const std::complex<double>> f_hat);

}  // namespace kconv
