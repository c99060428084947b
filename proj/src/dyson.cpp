#include "kconv/dyson.hpp"

#include "kconv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

namespace kconv {

void validate_path(const SymbolicPath& path, std::size_t grid_size) {
    if (path.sites.empty()) throw ConfigError("symbolic path has no sites");
    if (grid_size < 3) throw ConfigError("symbolic paths need at least 3 grid points");
    for (std::size_t i = 0; i < path.sites.size(); ++i) {
        if (path.sites[i] >= grid_size) {
            throw ConfigError("path site " + std::to_string(path.sites[i]) + " is outside the grid");
        }
        if (i == 0) continue;
        const std::size_t a = path.sites[i - 1];
        const std::size_t b = path.sites[i];
        if (b != (a + 1) % grid_size && b != (a + grid_size - 1) % grid_size) {
            throw ConfigError("path step " + std::to_string(a) + " -> " + std::to_string(b) +
                              " is not a nearest-neighbour jump");
        }
    }
}

std::uint64_t count_paths(int q, long long k) {
    if (q < 0 || q > 62) throw ConfigError("count_paths: q must lie in [0, 62]");
    const long long ak = k < 0 ? -k : k;
    if (ak > q || (q + ak) % 2 != 0) return 0;
    const auto up = static_cast<std::uint64_t>((q + ak) / 2);
    const auto r = std::min(up, static_cast<std::uint64_t>(q) - up);
    std::uint64_t c = 1;
    for (std::uint64_t i = 1; i <= r; ++i) c = c * (static_cast<std::uint64_t>(q) - r + i) / i;
    return c;
}

double hypoexponential(std::span<const double> rates, double t) {
    if (rates.empty()) throw ConfigError("hypoexponential: need at least one rate");
    if (!(t >= 0.0)) throw ConfigError("hypoexponential: t must be nonnegative");
    const std::size_t q = rates.size() - 1;
    if (t == 0.0) return q == 0 ? 1.0 : 0.0;

    const double r_min = *std::min_element(rates.begin(), rates.end());
    std::vector<double> d(rates.size());
    double d_max = 0.0;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        d[i] = rates[i] - r_min;
        d_max = std::max(d_max, d[i]);
    }

    // w_n = t^n/n! T^n e_q with T upper bidiagonal (diag d, superdiagonal 1); the
    // series is sum_n w_n[0]. Every quantity is nonnegative.
    std::vector<double> w(q + 1, 0.0);
    w[q] = 1.0;
    double sum = (q == 0) ? 1.0 : 0.0;
    constexpr long long kMaxTerms = 1'000'000;
    for (long long n = 1;; ++n) {
        if (n > kMaxTerms) throw NumericError("hypoexponential: series did not converge");
        const double scale = t / static_cast<double>(n);
        double mass = 0.0;
        for (std::size_t i = 0; i <= q; ++i) {
            const double next = (i < q) ? w[i + 1] : 0.0;
            w[i] = scale * (d[i] * w[i] + next);
            mass += w[i];
        }
        sum += w[0];
        const bool past_peak = static_cast<double>(n) > t * d_max + 1.0 && n >= static_cast<long long>(q);
        if (past_peak && (mass == 0.0 || mass <= 1e-18 * sum)) break;
    }
    if (sum == 0.0) return 0.0;
    const double result = std::exp(r_min * t + std::log(sum));
    if (!std::isfinite(result)) throw NumericError("hypoexponential: overflow");
    return result;
}

namespace {

double trapezoid_chain(std::span<const double> rates, double t, int intervals) {
    const auto m = static_cast<std::size_t>(intervals);
    const double ds = t / static_cast<double>(intervals);
    std::vector<double> g(m + 1), next(m + 1), kernel(m + 1);
    for (std::size_t i = 0; i <= m; ++i) g[i] = std::exp(rates[0] * ds * static_cast<double>(i));
    for (std::size_t j = 1; j < rates.size(); ++j) {
        for (std::size_t i = 0; i <= m; ++i) kernel[i] = std::exp(rates[j] * ds * static_cast<double>(i));
        next[0] = 0.0;
        for (std::size_t i = 1; i <= m; ++i) {
            double acc = 0.5 * (g[0] * kernel[i] + g[i] * kernel[0]);
            for (std::size_t l = 1; l < i; ++l) acc += g[l] * kernel[i - l];
            next[i] = ds * acc;
        }
        std::swap(g, next);
    }
    return g[m];
}

}  // namespace

double hypoexponential_quadrature(std::span<const double> rates, double t, int intervals) {
    if (rates.empty()) throw ConfigError("hypoexponential_quadrature: need at least one rate");
    if (intervals < 4 || intervals % 2 != 0) throw ConfigError("quadrature needs an even interval count >= 4");
    if (t == 0.0) return rates.size() == 1 ? 1.0 : 0.0;
    const double fine = trapezoid_chain(rates, t, intervals);
    const double coarse = trapezoid_chain(rates, t, intervals / 2);
    return (4.0 * fine - coarse) / 3.0;
}

namespace {

struct PathFactors {
    std::vector<double> rates;
    double jump_product = 1.0;  // prod_j 2 L(g_j, g_{j+1})
};

PathFactors path_factors(const PeriodicTridiagonalOperator& op, const SymbolicPath& path) {
    validate_path(path, op.size());
    PathFactors f;
    f.rates.reserve(path.sites.size());
    for (std::size_t i = 0; i < path.sites.size(); ++i) {
        f.rates.push_back(op.diag()[path.sites[i]]);
        if (i + 1 < path.sites.size()) {
            const double rate = op.entry(path.sites[i], path.sites[i + 1]);
            if (!(rate > 0.0)) {
                throw ConfigError("path weight needs positive jump rates (level below m_zero): L(" +
                                  std::to_string(path.sites[i]) + "," + std::to_string(path.sites[i + 1]) +
                                  ") = " + std::to_string(rate));
            }
            f.jump_product *= 2.0 * rate;
        }
    }
    return f;
}

}  // namespace

PathWeight path_weight(const PeriodicTridiagonalOperator& op, const SymbolicPath& path, double t) {
    const PathFactors f = path_factors(op, path);
    const double value = f.jump_product * hypoexponential(f.rates, t);
    const double eps = std::numeric_limits<double>::epsilon();
    return {value, 8.0 * static_cast<double>(f.rates.size()) * eps * value};
}

double path_weight_quadrature(const PeriodicTridiagonalOperator& op, const SymbolicPath& path, double t,
                              int intervals) {
    const PathFactors f = path_factors(op, path);
    return f.jump_product * hypoexponential_quadrature(f.rates, t, intervals);
}

namespace {

double phi_height(const FieldStats& s, double h) { return s.sigma1 * s.sigma1 / (2.0 * h * h); }
double phi_decay(const FieldStats& s, double h) { return s.sigma0 * s.sigma0 / (2.0 * h * h); }

}  // namespace

double conv_power(int q, double t, const FieldStats& stats, double h) {
    if (q < 1) throw ConfigError("conv_power: q must be >= 1");
    if (!(t >= 0.0)) throw ConfigError("conv_power: t must be nonnegative");
    const double a = phi_height(stats, h);
    const double b = phi_decay(stats, h);
    if (t == 0.0) return q == 1 ? a : 0.0;
    const double log_value = q * std::log(a) + (q - 1) * std::log(t) - std::lgamma(static_cast<double>(q)) - b * t;
    return std::exp(log_value);
}

double conv_power_quadrature(int q, double t, const FieldStats& stats, double h, int intervals) {
    if (q < 1) throw ConfigError("conv_power_quadrature: q must be >= 1");
    const std::vector<double> rates(static_cast<std::size_t>(q), -phi_decay(stats, h));
    return std::pow(phi_height(stats, h), q) * hypoexponential_quadrature(rates, t, intervals);
}

double conv_power_tail_bound(int q, double t, const FieldStats& stats, double h) {
    if (q < 1 || !(t > 0.0)) throw ConfigError("conv_power_tail_bound: need q >= 1 and t > 0");
    return std::sqrt(q / (2.0 * std::numbers::pi)) / t * std::exp(-phi_decay(stats, h) * t - q);
}

int q_max(const FieldStats& stats, double t, double h) {
    const double x = std::exp(2.0) * stats.sigma1 * stats.sigma1 * t / (2.0 * h * h);
    // absorb the rounding of the product so exact integers are not pushed up by one
    const double shrunk = x * (1.0 - 8.0 * std::numeric_limits<double>::epsilon());
    return std::max(1, static_cast<int>(std::ceil(shrunk)));
}

namespace {

// Paths grouped by jump count and site multiplicities: the time integral only
// depends on the multiset of diagonal rates visited.
struct PathClass {
    int q;
    std::vector<std::uint8_t> visits;
    bool operator<(const PathClass& o) const { return q != o.q ? q < o.q : visits < o.visits; }
};

std::vector<double> class_rates(const PeriodicTridiagonalOperator& op, const std::vector<std::uint8_t>& visits) {
    std::vector<double> rates;
    for (std::size_t s = 0; s < visits.size(); ++s) {
        for (int c = 0; c < visits[s]; ++c) rates.push_back(op.diag()[s]);
    }
    return rates;
}

template <class Visit>
void walk(const PeriodicTridiagonalOperator& op, std::size_t site, int depth, int depth_limit,
          std::vector<std::uint8_t>& visits, double jump_product, Visit& visit) {
    if (depth >= 1) visit(site, depth, visits, jump_product);
    if (depth == depth_limit) return;
    const std::size_t n = op.size();
    // down neighbour first, then up: lexicographic order for a fixed starting site
    for (std::size_t next : {(site + n - 1) % n, (site + 1) % n}) {
        const double rate = op.entry(site, next);
        if (!(rate > 0.0)) {
            throw ConfigError("path expansion needs positive jump rates (level below m_zero)");
        }
        ++visits[next];
        walk(op, next, depth + 1, depth_limit, visits, jump_product * 2.0 * rate, visit);
        --visits[next];
    }
}

void require_small_grid(const PeriodicTridiagonalOperator& op) {
    if (op.size() < 3 || op.size() > 16) {
        throw ConfigError("path expansion is limited to grids of 3..16 points, got " + std::to_string(op.size()));
    }
}

}  // namespace

ResumResult resum_kernel(const PeriodicTridiagonalOperator& op, std::size_t x, std::size_t y, double t,
                         int q_cap) {
    require_small_grid(op);
    if (x >= op.size() || y >= op.size()) throw ConfigError("resum_kernel: site out of range");
    if (q_cap < 0) throw ConfigError("resum_kernel: q_cap must be nonnegative");
    if (!(t >= 0.0)) throw ConfigError("resum_kernel: t must be nonnegative");
    if (q_cap >= 60 || (std::uint64_t{1} << (q_cap + 1)) - 2 > kMaxResumPaths) {
        throw ConfigError("resum_kernel: q_cap = " + std::to_string(q_cap) + " would enumerate more than " +
                          std::to_string(kMaxResumPaths) + " paths");
    }

    std::map<PathClass, double> classes;
    ResumResult result;
    auto visit = [&](std::size_t site, int depth, const std::vector<std::uint8_t>& visits, double product) {
        ++result.paths;
        if (site == y) classes[PathClass{depth, visits}] += product;
    };
    std::vector<std::uint8_t> visits(op.size(), 0);
    visits[x] = 1;
    if (q_cap > 0) walk(op, x, 0, q_cap, visits, 1.0, visit);

    const double inv_h = 1.0 / op.spacing();
    double total = (x == y) ? std::exp(t * op.diag()[x]) : 0.0;
    std::vector<double> by_order(static_cast<std::size_t>(q_cap) + 1, 0.0);
    for (const auto& [cls, product] : classes) {
        const std::vector<double> rates = class_rates(op, cls.visits);
        by_order[static_cast<std::size_t>(cls.q)] += std::ldexp(product, -cls.q) * hypoexponential(rates, t);
    }
    for (int q = 1; q <= q_cap; ++q) total += by_order[static_cast<std::size_t>(q)];
    result.value = total * inv_h;
    result.last_order = (q_cap > 0 ? by_order[static_cast<std::size_t>(q_cap)] : 0.0) * inv_h;
    return result;
}

WeightBoundReport weight_bound_sweep(const PeriodicTridiagonalOperator& op, const FieldStats& stats,
                                     int q_limit, std::span<const double> times) {
    require_small_grid(op);
    if (q_limit < 1 || q_limit > 20) throw ConfigError("weight_bound_sweep: q_limit must lie in [1, 20]");

    std::map<PathClass, double> worst_product;
    WeightBoundReport report;
    auto visit = [&](std::size_t, int depth, const std::vector<std::uint8_t>& visits, double product) {
        ++report.paths;
        double& slot = worst_product[PathClass{depth, visits}];
        slot = std::max(slot, product);
    };
    for (std::size_t start = 0; start < op.size(); ++start) {
        std::vector<std::uint8_t> visits(op.size(), 0);
        visits[start] = 1;
        walk(op, start, 0, q_limit, visits, 1.0, visit);
    }

    const double h = op.spacing();
    for (const auto& [cls, product] : worst_product) {
        const std::vector<double> rates = class_rates(op, cls.visits);
        for (double t : times) {
            const double w = product * hypoexponential(rates, t);
            const double bound = conv_power(cls.q, t, stats, h);
            const double contribution = std::ldexp(w, -cls.q);
            ++report.comparisons;
            const double ratio = bound > 0.0 ? w / bound : (w > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
            const double c_ratio = bound > 0.0 ? contribution / bound : ratio;
            if (w > bound) ++report.violations;
            if (contribution > bound) ++report.contribution_violations;
            if (ratio > report.max_ratio) {
                report.max_ratio = ratio;
                report.worst_q = cls.q;
                report.worst_t = t;
            }
            report.max_contribution_ratio = std::max(report.max_contribution_ratio, c_ratio);
        }
    }
    return report;
}

LbarResidual lbar_decomposition_check(const CoefficientField& field, const Grid& grid, std::size_t x_index) {
    const std::size_t n = grid.size();
    if (n < 3) throw ConfigError("lbar_decomposition_check needs at least 3 grid points");
    if (x_index >= n) throw ConfigError("lbar_decomposition_check: x index out of range");

    std::vector<double> v(n), mu(n);
    for (std::size_t j = 0; j < n; ++j) {
        v[j] = field.vol_squared(grid.point(j));
        mu[j] = field.drift(grid.point(j));
    }
    const auto dv = apply_nabla(grid, v);
    const auto ddv = apply_delta(grid, v);
    const auto dmu = apply_nabla(grid, mu);
    const auto ddmu = apply_delta(grid, mu);

    const PeriodicTridiagonalOperator op = build_generator(field, grid);
    const std::size_t xp = (x_index + 1) % n;
    const std::size_t xm = (x_index + n - 1) % n;
    const std::size_t x = x_index;

    LbarResidual r;
    // rows and columns ordered (x+h, x, x-h)
    r.lbar = {{{op.entry(xp, xp), op.entry(xp, x), 0.0},
               {op.entry(x, xp), op.entry(x, x), op.entry(x, xm)},
               {0.0, op.entry(xm, x), op.entry(xm, xm)}}};

    const double vx = v[x], mx = mu[x];
    const double d1 = dv[x], d2 = ddv[x], m1 = dmu[x], m2 = ddmu[x];
    using M3 = std::array<std::array<double, 3>, 3>;
    const M3 l0{{{-vx, 0.5 * vx, 0.0}, {0.5 * vx, -vx, 0.5 * vx}, {0.0, 0.5 * vx, -vx}}};
    const M3 l1{{{-d1, 0.5 * d1 - 0.5 * mx, 0.0}, {0.5 * mx, 0.0, -0.5 * mx}, {0.0, -0.5 * d1 + 0.5 * mx, d1}}};
    const M3 l2{{{-0.5 * d2, 0.25 * d2 - 0.5 * m1, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.25 * d2 - 0.5 * m1, -0.5 * d2}}};
    const M3 l3{{{0.0, -0.25 * m2, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.25 * m2, 0.0}}};

    const double h = grid.spacing();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const double split = l0[i][j] / (h * h) + l1[i][j] / h + l2[i][j] + h * l3[i][j];
            r.max_residual = std::max(r.max_residual, std::abs(r.lbar[i][j] - split));
            r.norm = std::max(r.norm, std::abs(r.lbar[i][j]));
        }
    }
    return r;
}

double discrete_taylor_check(std::span<const double> f, const Grid& grid) {
    const auto nabla = apply_nabla(grid, f);
    const auto delta = apply_delta(grid, f);
    const std::size_t n = f.size();
    const double h = grid.spacing();
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double curvature = 0.5 * h * h * delta[j];
        const double plus = f[j] + h * nabla[j] + curvature;
        const double minus = f[j] - h * nabla[j] + curvature;
        worst = std::max(worst, std::abs(f[(j + 1) % n] - plus));
        worst = std::max(worst, std::abs(f[(j + n - 1) % n] - minus));
    }
    return worst;
}

}  // namespace kconv
