#include "kconv/spectral.hpp"

#include "kconv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

namespace kconv {

std::complex<double> symbol(double p, double h, double sigma, double mu) {
    const double hp = h * p;
    return {sigma * sigma * (std::cos(hp) - 1.0) / (h * h), -mu * std::sin(hp) / h};
}

std::complex<double> continuum_symbol(double p, double sigma, double mu) {
    return {-0.5 * sigma * sigma * p * p, -mu * p};
}

namespace {

using Coefficient = std::function<std::complex<double>(long long k, double p)>;

// Circulant matrix (1/2L) sum_k c(k) e^{i p_k (x_j - x_i)} over k in [k_lo, k_hi],
// with p_k = pi k / L; the phase p_k (j - i) h = 2 pi k (j - i) / N is reduced in integers.
std::pair<DenseMatrix, double> circulant_series(const Grid& grid, long long k_lo, long long k_hi,
                                                const Coefficient& coefficient) {
    const std::size_t n = grid.size();
    const auto nn = static_cast<long long>(n);
    const double dp = std::numbers::pi / grid.half_width();
    std::vector<std::complex<double>> c;
    c.reserve(static_cast<std::size_t>(k_hi - k_lo + 1));
    for (long long k = k_lo; k <= k_hi; ++k) c.push_back(coefficient(k, dp * static_cast<double>(k)));

    std::vector<double> row(n);
    double imag = 0.0;
    const double norm = 1.0 / (2.0 * grid.half_width());
    for (std::size_t d = 0; d < n; ++d) {
        std::complex<double> acc{};
        for (long long k = k_lo; k <= k_hi; ++k) {
            const long long phase = ((k % nn) * static_cast<long long>(d)) % nn;
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(phase) / static_cast<double>(n);
            acc += c[static_cast<std::size_t>(k - k_lo)] * std::complex<double>(std::cos(angle), std::sin(angle));
        }
        acc *= norm;
        row[d] = acc.real();
        imag = std::max(imag, std::abs(acc.imag()));
    }
    DenseMatrix values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < n; ++d) {
            values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>((i + d) % n)) = row[d];
        }
    }
    return {std::move(values), imag};
}

KernelMatrix kernel_shell(const Grid& grid, double t, Scheme scheme) {
    KernelMatrix k;
    k.level = grid.level();
    k.half_width = grid.half_width();
    k.time = t;
    k.scheme = scheme;
    return k;
}

void require_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("time must be finite and nonnegative");
}

long long half_band(const Grid& grid) { return static_cast<long long>(grid.size() / 2); }

}  // namespace

SpectralKernel fourier_kernel(double sigma, double mu, const Grid& grid, double t) {
    require_time(t);
    const double h = grid.spacing();
    const long long half = half_band(grid);
    auto [values, imag] = circulant_series(grid, -half, half - 1, [&](long long, double p) {
        return std::exp(t * symbol(p, h, sigma, mu));
    });
    SpectralKernel out{kernel_shell(grid, t, Scheme::Spectral), imag};
    out.kernel.values = std::move(values);
    return out;
}

SpectralKernel fourier_kernel_discrete(double sigma, double mu, const Grid& grid, double t,
                                       const EulerStep& step) {
    require_time(t);
    const double h = grid.spacing();
    if (!(step.delta_t > 0.0) || step.n_steps < 0) throw ConfigError("euler step must have dt > 0");
    if (std::abs(step.delta_t * static_cast<double>(step.n_steps) - t) > 1e-12 * std::max(1.0, t)) {
        throw ConfigError("euler step: n_steps * delta_t differs from t");
    }
    if (!(1.0 - step.delta_t * sigma * sigma / (h * h) > 0.0)) {
        throw ConfigError("euler step unstable: dt must be below h^2 / sigma^2");
    }
    const long long half = half_band(grid);
    auto [values, imag] = circulant_series(grid, -half, half - 1, [&](long long, double p) {
        const std::complex<double> factor = 1.0 + step.delta_t * symbol(p, h, sigma, mu);
        // binary powering keeps the relative error near log2(n) ulps per factor
        std::complex<double> result{1.0, 0.0};
        std::complex<double> base = factor;
        for (long long n = step.n_steps; n > 0; n >>= 1) {
            if (n & 1) result *= base;
            base *= base;
        }
        return result;
    });
    SpectralKernel out{kernel_shell(grid, t, Scheme::SpectralEuler), imag};
    out.kernel.delta_t = step.delta_t;
    out.kernel.n_steps = step.n_steps;
    out.kernel.values = std::move(values);
    return out;
}

SpectralKernel continuum_kernel(double sigma, double mu, const Grid& grid, double t) {
    require_time(t);
    if (!(t > 0.0)) throw ConfigError("continuum kernel needs t > 0");
    const double p_max = std::sqrt(2.0 * std::log(1e13) / (sigma * sigma * t));
    const auto k_max = static_cast<long long>(std::ceil(p_max * grid.half_width() / std::numbers::pi));
    auto [values, imag] = circulant_series(grid, -k_max, k_max, [&](long long, double p) {
        return std::exp(t * continuum_symbol(p, sigma, mu));
    });
    SpectralKernel out{kernel_shell(grid, t, Scheme::Continuum), imag};
    out.kernel.values = std::move(values);
    return out;
}

std::pair<DenseMatrix, DenseMatrix> kernel_space_derivatives(double sigma, double mu, const Grid& grid,
                                                             double t) {
    require_time(t);
    const double h = grid.spacing();
    const long long half = half_band(grid);
    auto first = circulant_series(grid, -half, half - 1, [&](long long, double p) {
        return std::exp(t * symbol(p, h, sigma, mu)) * std::complex<double>(0.0, -std::sin(p * h) / h);
    });
    auto second = circulant_series(grid, -half, half - 1, [&](long long, double p) {
        return std::exp(t * symbol(p, h, sigma, mu)) * (2.0 * (std::cos(p * h) - 1.0) / (h * h));
    });
    return {std::move(first.first), std::move(second.first)};
}

bool TrigReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const TrigCheck& c) { return c.violations == 0; });
}

namespace {

// Differences of trigonometric functions are evaluated through half-angle
// identities so that small hp does not cancel catastrophically:
//   cos x - 1                     = -2 sin^2(x/2)
//   sin x - sin(2x)/2             = 2 sin x sin^2(x/2)
//   (cos x - 1) - (cos 2x - 1)/4  = -2 sin^4(x/2)
struct Inequality {
    const char* name;
    double p_lo_factor;  // p range, in units of 1/h
    double p_hi_factor;
    // returns {lower - middle, middle - upper}; each must be <= 0 (NaN for an absent side)
    std::function<std::pair<double, double>(double h, double p)> excess;
};

void record(TrigCheck& check, double h, double p, double excess, double scale) {
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() * scale;
    if (excess > check.worst_excess || check.samples == 0) {
        check.worst_excess = excess;
        check.worst_h = h;
        check.worst_p = p;
    }
    if (excess > slack) ++check.violations;
}

}  // namespace

TrigReport trig_inequality_suite(double h_max, std::size_t samples, std::uint64_t seed) {
    if (!(h_max > 0.0)) throw ConfigError("trig_inequality_suite: h_max must be positive");
    const double sqrt2 = std::numbers::sqrt2;
    const double pi = std::numbers::pi;

    const std::vector<Inequality> inequalities{
        {"sine-difference", 0.0, sqrt2,
         [](double h, double p) {
             const double x = h * p;
             const double s = std::sin(0.5 * x);
             const double mid = 2.0 * std::sin(x) * s * s / h;
             const double h2p3 = h * h * p * p * p;
             const double lo = 0.5 * h2p3 - 0.125 * h2p3 * h * h * p * p;
             return std::pair{lo - mid, mid - 0.5 * h2p3};
         }},
        {"cosine-difference", -sqrt2, sqrt2,
         [](double h, double p) {
             const double x = h * p;
             const double s = std::sin(0.5 * x);
             const double mid = -2.0 * s * s * s * s / (h * h);
             const double h2p4 = h * h * p * p * p * p;
             return std::pair{-0.125 * h2p4 - mid, mid - (-0.125 * h2p4 + h2p4 * h * h * p * p / 48.0)};
         }},
        {"cosine-quadratic", -pi, pi,
         [](double h, double p) {
             const double s = std::sin(0.5 * h * p);
             const double mid = -2.0 * s * s / (h * h);
             const double p2 = p * p;
             return std::pair{-0.5 * p2 - mid, mid - (-0.5 * p2 + h * h * p2 * p2 / 24.0)};
         }},
        {"cosine-gaussian", -std::sqrt(2.0 / 3.0), std::sqrt(2.0 / 3.0),
         [](double h, double p) {
             const double s = std::sin(0.5 * h * p);
             const double mid = -2.0 * s * s / (h * h);
             return std::pair{std::numeric_limits<double>::quiet_NaN(), mid + 0.25 * p * p};
         }},
    };

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    TrigReport report;
    for (const auto& ineq : inequalities) {
        TrigCheck check;
        check.name = ineq.name;
        for (std::size_t i = 0; i <= samples; ++i) {
            const double h = h_max * (1.0 - unit(rng));  // (0, h_max]
            const double u = unit(rng);
            // the last sample pins the p = 0 endpoint
            const double p =
                (i == samples) ? 0.0 : (ineq.p_lo_factor + u * (ineq.p_hi_factor - ineq.p_lo_factor)) / h;
            const auto [lower, upper] = ineq.excess(h, p);
            const double scale = p * p * (1.0 + h * h * p * p) + std::abs(p * p * p) * h * h;
            if (!std::isnan(lower)) record(check, h, p, lower, scale);
            record(check, h, p, upper, scale);
            ++check.samples;
        }
        report.checks.push_back(check);
    }
    return report;
}

}  // namespace kconv
