#include "kconv/harness.hpp"

#include "kconv/errors.hpp"
#include "kconv/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace kconv {

namespace {

// Fine-grid index of coarse point j: x_j = -L + j h sits at j * 2^(m'-m).
std::size_t nesting_stride(const KernelMatrix& coarse, const KernelMatrix& fine) {
    if (coarse.half_width != fine.half_width) throw ConfigError("sup_diff: kernels on different domains");
    if (coarse.time != fine.time) throw ConfigError("sup_diff: kernels at different times");
    if (fine.level <= coarse.level) throw ConfigError("sup_diff: fine level must exceed coarse level");
    const std::size_t stride = std::size_t{1} << (fine.level - coarse.level);
    if (coarse.size() * stride != fine.size()) throw ConfigError("sup_diff: grids are not dyadically nested");
    return stride;
}

double restricted_diff(const DenseMatrix& coarse, const DenseMatrix& fine, std::size_t stride) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < coarse.rows(); ++i) {
        const auto fi = static_cast<Eigen::Index>(static_cast<std::size_t>(i) * stride);
        for (Eigen::Index j = 0; j < coarse.cols(); ++j) {
            const auto fj = static_cast<Eigen::Index>(static_cast<std::size_t>(j) * stride);
            worst = std::max(worst, std::abs(coarse(i, j) - fine(fi, fj)));
        }
    }
    return worst;
}

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

std::string describe_profile(const ProfileSpec& p) {
    std::string s = family_name(p.family) + "(";
    auto list = [](const std::vector<double>& v) {
        std::string out = "[";
        for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_number(v[i]);
        return out + "]";
    };
    switch (p.family) {
    case ProfileFamily::Constant:
        s += format_number(p.value);
        break;
    case ProfileFamily::Trig:
        s += "mean=" + format_number(p.mean) + ",cos=" + list(p.cos_coeffs) + ",sin=" + list(p.sin_coeffs);
        break;
    case ProfileFamily::HoelderBump:
        s += "a=" + format_number(p.a) + ",b=" + format_number(p.b) + ",alpha=" + format_number(p.alpha) +
             ",k=" + std::to_string(p.k);
        break;
    case ProfileFamily::LogModulus:
        s += "a=" + format_number(p.a) + ",b=" + format_number(p.b);
        break;
    case ProfileFamily::Tabulated:
        s += std::to_string(p.samples.size()) + " samples";
        break;
    }
    return s + ")";
}

std::optional<RateFit> try_fit(const std::vector<double>& h, const std::vector<double>& diffs) {
    if (h.size() < 3) return std::nullopt;
    return fit_rate(h, diffs);
}

}  // namespace

double sup_diff(const KernelMatrix& coarse, const KernelMatrix& fine) {
    const std::size_t stride = nesting_stride(coarse, fine);
    return restricted_diff(coarse.values, fine.values, stride);
}

double derivative_sup_diff(const PeriodicTridiagonalOperator& coarse_op, const KernelMatrix& coarse,
                           const PeriodicTridiagonalOperator& fine_op, const KernelMatrix& fine) {
    const std::size_t stride = nesting_stride(coarse, fine);
    const KernelMatrix dc = time_derivative(coarse_op, coarse);
    const KernelMatrix df = time_derivative(fine_op, fine);
    return restricted_diff(dc.values, df.values, stride);
}

RateFit fit_rate(std::span<const double> h, std::span<const double> diffs) {
    if (h.size() != diffs.size()) throw ConfigError("fit_rate: h and diff counts differ");
    if (h.size() < 3) throw ConfigError("fit_rate: rate fit needs at least 3 points");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!(h[i] > 0.0)) throw ConfigError("fit_rate: spacing must be positive");
        if (!(diffs[i] > 0.0)) {
            throw ConfigError("fit_rate: nonpositive difference at point " + std::to_string(i) +
                              " (converged to roundoff; drop the level)");
        }
        lx.push_back(std::log(h[i]));
        ly.push_back(std::log(diffs[i]));
    }
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw ConfigError("fit_rate: spacings must not all coincide");
    RateFit fit;
    fit.gamma_hat = sxy / sxx;
    const double intercept = my - fit.gamma_hat * mx;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        fit.residual = std::max(fit.residual, std::abs(ly[i] - intercept - fit.gamma_hat * lx[i]));
    }
    return fit;
}

bool ConvergenceReport::complete() const {
    return std::all_of(levels.begin(), levels.end(), [](const LevelResult& l) { return l.status == "ok"; });
}

std::string describe(const FieldSpec& spec) {
    return "sigma2=" + describe_profile(spec.vol_squared) + " mu=" + describe_profile(spec.drift);
}

double default_time(const CoefficientField& field, int level) {
    const Grid grid = build_grid(level, field.half_width(), std::numeric_limits<std::size_t>::max());
    const FieldStats s = stats(field, grid);
    return 0.25 * field.half_width() * field.half_width() / (s.sigma0 * s.sigma0);
}

ConvergenceReport run_campaign(const CoefficientField& field, const CampaignOptions& options) {
    if (options.m_min > options.m_max) throw ConfigError("campaign: m_min exceeds m_max");
    const double L = field.half_width();
    // resource guard before any work
    build_grid(options.m_max, L, options.max_dim);
    build_grid(options.m_min, L, options.max_dim);
    const int m0 = m_zero(field, L);
    if (options.m_min < m0) {
        throw ConfigError("campaign: m_min = " + std::to_string(options.m_min) + " is below m_zero = " +
                          std::to_string(m0) + " (off-diagonal rates not positive)");
    }
    if (options.spectral && !field.constant()) {
        throw ConfigError("spectral-oracle scheme needs constant coefficients");
    }

    ConvergenceReport report;
    report.field = describe(field.spec());
    report.half_width = L;
    report.time = options.time >= 0.0 ? options.time : default_time(field, options.m_max);
    report.schemes.push_back(scheme_name(Scheme::Semidiscrete));
    if (options.euler) report.schemes.push_back(scheme_name(Scheme::Euler));
    if (options.spectral) report.schemes.push_back("spectral-oracle");
    if (const double gamma = field.theoretical_rate(); std::isnan(gamma)) {
        report.modulus = true;
    } else {
        report.theoretical_gamma = gamma;
    }
    const double t = report.time;

    struct Computed {
        std::optional<PeriodicTridiagonalOperator> op;
        std::optional<KernelMatrix> kernel;
    };
    std::vector<Computed> computed;
    for (int m = options.m_min; m <= options.m_max; ++m) {
        LevelResult level;
        level.level = m;
        level.h = std::ldexp(L, -m);
        Computed c;
        try {
            const Grid grid = build_grid(m, L, options.max_dim);
            PeriodicTridiagonalOperator op = build_generator(field, grid);
            KernelMatrix u = expm_kernel(op, t);
            level.kernel_norm = u.values.cwiseAbs().maxCoeff();
            if (options.euler) {
                const EulerStep step = choose_euler_step(op, t);
                level.delta_t = step.delta_t;
                level.n_steps = step.n_steps;
                const KernelMatrix ue = euler_kernel(op, t, step);
                level.euler_diff = (u.values - ue.values).cwiseAbs().maxCoeff();
                if (t > 0.0) {
                    const KernelMatrix du = time_derivative(op, u);
                    const KernelMatrix due = euler_time_derivative(op, t, step);
                    level.euler_derivative_diff = (du.values - due.values).cwiseAbs().maxCoeff();
                }
            }
            if (options.spectral) {
                const double sigma = std::sqrt(field.vol_squared(0.0));
                const SpectralKernel sk = fourier_kernel(sigma, field.drift(0.0), grid, t);
                level.spectral_diff = (u.values - sk.kernel.values).cwiseAbs().maxCoeff();
            }
            c.op = std::move(op);
            c.kernel = std::move(u);
        } catch (const Error& e) {
            level.status = e.what();
        }
        report.levels.push_back(level);
        computed.push_back(std::move(c));
    }

    const double eps = std::numeric_limits<double>::epsilon();
    std::vector<double> hk, dk, hd, dd;
    for (std::size_t i = 0; i + 1 < computed.size(); ++i) {
        const Computed& a = computed[i];
        const Computed& b = computed[i + 1];
        if (!a.kernel || !b.kernel) continue;
        PairDiff pair;
        pair.coarse = report.levels[i].level;
        pair.fine = report.levels[i + 1].level;
        pair.h = report.levels[i].h;
        pair.kernel = sup_diff(*a.kernel, *b.kernel);
        try {
            pair.derivative = derivative_sup_diff(*a.op, *a.kernel, *b.op, *b.kernel);
        } catch (const Error& e) {
            report.levels[i + 1].status = e.what();
            continue;
        }
        if (report.modulus) {
            const double rho = log_modulus_rho(pair.h);
            pair.kernel_over_rho = pair.kernel / rho;
            pair.derivative_over_rho = pair.derivative / rho;
        }
        const double floor = 1e3 * eps * report.levels[i + 1].kernel_norm;
        if (pair.kernel > floor) {
            hk.push_back(pair.h);
            dk.push_back(pair.kernel);
        } else {
            report.notes.push_back("kernel diff " + std::to_string(pair.coarse) + "-" + std::to_string(pair.fine) +
                                   " below roundoff floor; dropped from fit");
        }
        if (pair.derivative > floor) {
            hd.push_back(pair.h);
            dd.push_back(pair.derivative);
        }
        report.pairs.push_back(pair);
    }
    report.kernel_rate = try_fit(hk, dk);
    report.derivative_rate = try_fit(hd, dd);
    if (!report.kernel_rate) report.notes.push_back("kernel rate fit needs at least 3 usable differences");

    if (options.euler) {
        std::vector<double> he, de, hed, ded;
        for (const LevelResult& l : report.levels) {
            const double floor = 1e3 * eps * l.kernel_norm;
            if (l.euler_diff && *l.euler_diff > floor) {
                he.push_back(l.h);
                de.push_back(*l.euler_diff);
            }
            if (l.euler_derivative_diff && *l.euler_derivative_diff > floor) {
                hed.push_back(l.h);
                ded.push_back(*l.euler_derivative_diff);
            }
        }
        report.euler_rate = try_fit(he, de);
        report.euler_derivative_rate = try_fit(hed, ded);
    }

    if (report.modulus) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const PairDiff& p : report.pairs) {
            lo = std::min(lo, *p.kernel_over_rho);
            hi = std::max(hi, *p.kernel_over_rho);
        }
        if (!report.pairs.empty() && lo > 0.0) report.rho_ratio_spread = hi / lo;
    }
    return report;
}

}  // namespace kconv
