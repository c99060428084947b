#pragma once

#include "kconv/lattice.hpp"
#include "kconv/propagator.hpp"

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace kconv {

/// Fourier symbol of the constant-coefficient generator,
///   l(p) = -i mu sin(hp)/h + sigma^2 (cos hp - 1)/h^2,
/// the eigenvalue of L on the plane wave e^{-ipx}.
std::complex<double> symbol(double p, double h, double sigma, double mu);

/// h -> 0 limit of symbol(): -i mu p - sigma^2 p^2 / 2.
std::complex<double> continuum_symbol(double p, double sigma, double mu);

/// A series-evaluated kernel and the largest imaginary part discarded when taking its real part.
struct SpectralKernel {
    KernelMatrix kernel;
    double imag_residue = 0.0;
};

/// u(x,y;t) = (1/2L) sum_p e^{t l(p)} e^{ip(y-x)}, summed in ascending p.
SpectralKernel fourier_kernel(double sigma, double mu, const Grid& grid, double t);

/// (1/2L) sum_p (1 + dt l(p))^n e^{ip(y-x)}; requires 1 - dt sigma^2/h^2 > 0.
SpectralKernel fourier_kernel_discrete(double sigma, double mu, const Grid& grid, double t,
                                       const EulerStep& step);

/// Continuum kernel (periodized drifted Gaussian) sampled on the grid. The
/// momentum sum is cut where e^{-sigma^2 p^2 t/2} < 1e-13.
SpectralKernel continuum_kernel(double sigma, double mu, const Grid& grid, double t);

/// Discrete first and second x-differences of fourier_kernel, from the series
/// multiplied by the stencil eigenvalues -i sin(ph)/h and 2(cos ph - 1)/h^2.
std::pair<DenseMatrix, DenseMatrix> kernel_space_derivatives(double sigma, double mu, const Grid& grid,
                                                             double t);

/// Result of sampling the trigonometric inequalities that control symbol differences.
struct TrigCheck {
    std::string name;
    std::size_t samples = 0;
    std::size_t violations = 0;
    double worst_excess = 0.0;  // largest lhs - rhs seen (negative when all hold)
    double worst_h = 0.0;
    double worst_p = 0.0;
};

struct TrigReport {
    std::vector<TrigCheck> checks;
    bool ok() const;
};

/// Samples `samples` (h, p) pairs per inequality with h in (0, h_max] and p in
/// the inequality's domain, plus the p = 0 endpoint:
///   sine pair     h^2p^3/2 - h^4p^5/8 <= sin(hp)/h - sin(2hp)/2h <= h^2p^3/2,   0 <= p <= sqrt2/h
///   cosine pair   -h^2p^4/8 <= (cos hp-1)/h^2 - (cos 2hp-1)/4h^2 <= -h^2p^4/8 + h^4p^6/48,  |p| <= sqrt2/h
///   quadratic     -p^2/2 <= (cos hp-1)/h^2 <= -p^2/2 + h^2p^4/24,   |p| <= pi/h
///   gaussian      (cos hp-1)/h^2 <= -p^2/4,   |p| <= sqrt(2/3)/h
TrigReport trig_inequality_suite(double h_max, std::size_t samples, std::uint64_t seed);

}  // namespace kconv
