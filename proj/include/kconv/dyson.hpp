#pragma once

#include "kconv/coefficients.hpp"
#include "kconv/generator.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace kconv {

/// Nearest-neighbour jump sequence gamma_0 .. gamma_q on a cyclic grid.
struct SymbolicPath {
    std::vector<std::size_t> sites;

    std::size_t jumps() const noexcept { return sites.empty() ? 0 : sites.size() - 1; }
};

/// Throws ConfigError unless every site is in range and each step moves to a cyclic neighbour.
void validate_path(const SymbolicPath& path, std::size_t grid_size);

struct PathWeight {
    double value = 0.0;
    double error_estimate = 0.0;
};

/// Number of +-1 walks of q steps with net displacement k on the integer line:
/// binom(q, (q+k)/2), zero when q+k is odd or |k| > q.
std::uint64_t count_paths(int q, long long k);

/// Time-ordered path weight
///   W = int_{0<s_1<..<s_q<t} e^{(t-s_q) L(g_q,g_q)} prod_j e^{(s_{j+1}-s_j) L(g_j,g_j)} 2 L(g_j,g_{j+1}),
/// normalized so that h^-1 sum_q 2^-q sum_paths W reproduces h^-1 exp(tL) off the
/// diagonal. The time integral is the divided difference of exp at the diagonal
/// rates, evaluated by a positive series (see hypoexponential()), so confluent
/// rates need no special treatment.
PathWeight path_weight(const PeriodicTridiagonalOperator& op, const SymbolicPath& path, double t);

/// int_{0<s_1<..<s_q<t} prod_j e^{rate_j (s_{j+1}-s_j)}, s_0 = 0, s_{q+1} = t, for q+1 rates.
/// Shifting by the smallest rate turns it into a series of nonnegative terms,
///   e^{t r_min} sum_{n>=q} t^n/n! h_{n-q}(r_0 - r_min, .., r_q - r_min),
/// with h the complete homogeneous symmetric polynomial.
double hypoexponential(std::span<const double> rates, double t);

/// The same integral by iterated trapezoidal convolution on `intervals` steps,
/// Richardson-extrapolated against half as many. Independent cross-check.
double hypoexponential_quadrature(std::span<const double> rates, double t, int intervals = 4096);

/// path_weight() with the time integral done by hypoexponential_quadrature().
double path_weight_quadrature(const PeriodicTridiagonalOperator& op, const SymbolicPath& path, double t,
                              int intervals = 4096);

/// q-fold self-convolution of phi(s) = (Sigma_1^2/2h^2) e^{-Sigma_0^2 s/2h^2} 1(s>=0):
///   (Sigma_1^2/2h^2)^q t^{q-1}/(q-1)! e^{-Sigma_0^2 t/2h^2}.
double conv_power(int q, double t, const FieldStats& stats, double h);

/// conv_power by numerical convolution; independent cross-check.
double conv_power_quadrature(int q, double t, const FieldStats& stats, double h, int intervals = 4096);

/// Stirling-step tail bound valid for q >= e^2 Sigma_1^2 t / 2h^2:
///   conv_power(q, t) <= sqrt(q/2pi) / t * exp(-Sigma_0^2 t/2h^2 - q).
double conv_power_tail_bound(int q, double t, const FieldStats& stats, double h);

/// ceil(e^2 Sigma_1^2 t / 2h^2), at least 1.
int q_max(const FieldStats& stats, double t, double h);

struct ResumResult {
    double value = 0.0;
    double last_order = 0.0;   // contribution of q = q_cap (truncation diagnostic)
    std::uint64_t paths = 0;   // paths enumerated
};

/// Upper limit on the number of paths resum_kernel will enumerate.
inline constexpr std::uint64_t kMaxResumPaths = 10'000'000;

/// Truncated path expansion of the semidiscrete kernel,
///   h^-1 [ delta_xy e^{t L(x,x)} + sum_{q=1}^{q_cap} 2^-q sum_{paths x->y} W ].
/// Paths wrap cyclically. Requires 3 <= N <= 16.
ResumResult resum_kernel(const PeriodicTridiagonalOperator& op, std::size_t x, std::size_t y, double t,
                         int q_cap);

/// Sweep of every cyclic path with 1 <= q <= q_limit jumps against conv_power at the given times.
struct WeightBoundReport {
    std::uint64_t paths = 0;
    std::uint64_t comparisons = 0;
    std::uint64_t violations = 0;               // W > conv_power
    double max_ratio = 0.0;                     // max W / conv_power
    std::uint64_t contribution_violations = 0;  // 2^-q W > conv_power
    double max_contribution_ratio = 0.0;
    int worst_q = 0;
    double worst_t = 0.0;
};

WeightBoundReport weight_bound_sweep(const PeriodicTridiagonalOperator& op, const FieldStats& stats,
                                     int q_limit, std::span<const double> times);

/// Residual of the exact split Lbar(x;h) = h^-2 Lbar0 + h^-1 Lbar1 + Lbar2 + h Lbar3,
/// where Lbar is the generator restricted to {x+h, x, x-h} and the split uses the
/// discrete derivatives of sigma^2 and mu at x.
struct LbarResidual {
    double max_residual = 0.0;
    double norm = 0.0;  // max |entry| of Lbar
    std::array<std::array<double, 3>, 3> lbar{};
};

LbarResidual lbar_decomposition_check(const CoefficientField& field, const Grid& grid, std::size_t x_index);

/// max over grid points of |f(x+-h) - f(x) -+ h nabla f(x) - h^2/2 Delta f(x)|.
double discrete_taylor_check(std::span<const double> f, const Grid& grid);

}  // namespace kconv
