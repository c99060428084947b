#pragma once

#include "kconv/coefficients.hpp"
#include "kconv/propagator.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kconv {

/// max over coarse pairs (x, y) of |u_coarse(x,y) - u_fine(x', y')|, where x', y' are the
/// same points on the fine grid (indices scaled by 2^(m'-m)). Throws ConfigError unless
/// both kernels share L and t and the fine grid strictly refines the coarse one.
double sup_diff(const KernelMatrix& coarse, const KernelMatrix& fine);

/// sup_diff of the two time-derivative matrices.
double derivative_sup_diff(const PeriodicTridiagonalOperator& coarse_op, const KernelMatrix& coarse,
                           const PeriodicTridiagonalOperator& fine_op, const KernelMatrix& fine);

struct RateFit {
    double gamma_hat = 0.0;
    double residual = 0.0;  // max |log diff - fitted line|
};

/// Least-squares slope of log(diff) against log(h). Needs >= 3 points and positive diffs.
RateFit fit_rate(std::span<const double> h, std::span<const double> diffs);

struct CampaignOptions {
    int m_min = 4;
    int m_max = 7;
    double time = -1.0;  // < 0 selects 0.25 L^2 / Sigma_0^2
    bool euler = false;
    bool spectral = false;  // expm vs Fourier series per level; constant fields only
    std::size_t max_dim = kDefaultMaxDim;
};

struct LevelResult {
    int level = 0;
    double h = 0.0;
    std::string status = "ok";
    double kernel_norm = 0.0;
    std::optional<double> euler_diff;             // sup |u_m - u_m^dt|
    std::optional<double> euler_derivative_diff;  // sup |d/dt u_m - difference quotient of u_m^dt|
    std::optional<double> spectral_diff;          // sup |expm kernel - Fourier kernel|
    double delta_t = 0.0;
    long long n_steps = 0;
};

struct PairDiff {
    int coarse = 0;
    int fine = 0;
    double h = 0.0;  // coarse spacing
    double kernel = 0.0;
    double derivative = 0.0;
    std::optional<double> kernel_over_rho;  // modulus fields: diff / rho(h)
    std::optional<double> derivative_over_rho;
};

struct ConvergenceReport {
    std::string field;  // descriptor
    double half_width = 1.0;
    double time = 0.0;
    std::vector<std::string> schemes;
    std::vector<LevelResult> levels;
    std::vector<PairDiff> pairs;
    std::optional<RateFit> kernel_rate;
    std::optional<RateFit> derivative_rate;
    std::optional<RateFit> euler_rate;
    std::optional<RateFit> euler_derivative_rate;
    std::optional<double> theoretical_gamma;  // empty for modulus-of-continuity fields
    bool modulus = false;
    std::optional<double> rho_ratio_spread;   // max/min of kernel diff/rho(h)
    std::vector<std::string> notes;

    bool complete() const;
};

/// One line describing a field, e.g. "sigma2=trig(...) mu=constant(0)".
std::string describe(const FieldSpec& spec);

/// Kernels at every level, pairwise (m, m+1) differences, optional Euler comparisons and rate
/// fits. Per-level errors are recorded in the level status and the remaining levels continue.
ConvergenceReport run_campaign(const CoefficientField& field, const CampaignOptions& options);

/// 0.25 L^2 / Sigma_0^2 with Sigma_0 taken on the finest level.
double default_time(const CoefficientField& field, int level);

}  // namespace kconv
