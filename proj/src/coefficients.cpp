#include "kconv/coefficients.hpp"

#include "kconv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace kconv {

double Smoothness::order() const {
    switch (kind) {
        case Kind::Smooth: return 2.0;
        case Kind::Hoelder: return std::min(2.0, derivatives + exponent);
        case Kind::Modulus: return std::numeric_limits<double>::quiet_NaN();
    }
    return std::numeric_limits<double>::quiet_NaN();
}

ProfileSpec ProfileSpec::constant(double v) {
    ProfileSpec s;
    s.family = ProfileFamily::Constant;
    s.value = v;
    return s;
}

ProfileSpec ProfileSpec::trig(double mean, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs) {
    ProfileSpec s;
    s.family = ProfileFamily::Trig;
    s.mean = mean;
    s.cos_coeffs = std::move(cos_coeffs);
    s.sin_coeffs = std::move(sin_coeffs);
    return s;
}

ProfileSpec ProfileSpec::hoelder_bump(double a, double b, double alpha, int k) {
    ProfileSpec s;
    s.family = ProfileFamily::HoelderBump;
    s.a = a;
    s.b = b;
    s.alpha = alpha;
    s.k = k;
    return s;
}

ProfileSpec ProfileSpec::log_modulus(double a, double b) {
    ProfileSpec s;
    s.family = ProfileFamily::LogModulus;
    s.a = a;
    s.b = b;
    return s;
}

ProfileSpec ProfileSpec::tabulated(std::vector<double> samples) {
    ProfileSpec s;
    s.family = ProfileFamily::Tabulated;
    s.samples = std::move(samples);
    return s;
}

std::string family_name(ProfileFamily family) {
    switch (family) {
        case ProfileFamily::Constant: return "constant";
        case ProfileFamily::Trig: return "trig";
        case ProfileFamily::HoelderBump: return "hoelder";
        case ProfileFamily::LogModulus: return "logmod";
        case ProfileFamily::Tabulated: return "tabulated";
    }
    return "unknown";
}

ProfileFamily parse_family(const std::string& name) {
    for (auto f : {ProfileFamily::Constant, ProfileFamily::Trig, ProfileFamily::HoelderBump,
                   ProfileFamily::LogModulus, ProfileFamily::Tabulated}) {
        if (family_name(f) == name) return f;
    }
    throw ConfigError("unknown coefficient family '" + name + "'");
}

double Profile::PowerShape::eval(double x) const {
    const double ax = std::abs(x);
    double v = coef * std::pow(ax, power);
    if (odd && x < 0.0) v = -v;
    double xp = 1.0;
    for (double c : poly) {
        v += c * xp;
        xp *= x;
    }
    return v;
}

// Starts from |x|^alpha - L^alpha/(alpha+1) (zero mean on [-L, L]) and integrates
// from 0 k times. Odd results have zero mean automatically; even ones are re-centered.
// Each integrand has zero mean, so every antiderivative stays periodic.
Profile::PowerShape Profile::antiderivative_shape(double alpha, int k, double half_width) {
    const double L = half_width;
    PowerShape s;
    s.coef = 1.0;
    s.power = alpha;
    s.odd = false;
    s.poly = {-std::pow(L, alpha) / (alpha + 1.0)};
    for (int step = 0; step < k; ++step) {
        s.coef /= s.power + 1.0;
        s.power += 1.0;
        s.odd = !s.odd;
        std::vector<double> next(s.poly.size() + 1, 0.0);
        for (std::size_t i = 0; i < s.poly.size(); ++i) next[i + 1] = s.poly[i] / static_cast<double>(i + 1);
        s.poly = std::move(next);
        if (!s.odd) {
            double mean = s.coef * std::pow(L, s.power) / (s.power + 1.0);
            double lp = 1.0;
            for (std::size_t i = 0; i < s.poly.size(); ++i, lp *= L) {
                if (i % 2 == 0) mean += s.poly[i] * lp / static_cast<double>(i + 1);
            }
            s.poly[0] -= mean;
        }
    }
    return s;
}

Profile::Profile(ProfileSpec spec, double half_width) : spec_(std::move(spec)), half_width_(half_width) {
    if (spec_.family == ProfileFamily::HoelderBump) {
        if (!(spec_.alpha > 0.0 && spec_.alpha <= 1.0)) {
            throw ConfigError("hoelder exponent alpha must lie in (0, 1]");
        }
        if (spec_.k < 0 || spec_.k > 8) throw ConfigError("hoelder derivative count k must lie in [0, 8]");
        if (spec_.k == 0) {
            shape_.coef = 1.0;
            shape_.power = spec_.alpha;
        } else {
            shape_ = antiderivative_shape(spec_.alpha, spec_.k, half_width_);
        }
    }
    if (spec_.family == ProfileFamily::Tabulated && spec_.samples.empty()) {
        throw ConfigError("tabulated profile needs at least one sample");
    }
}

double Profile::operator()(double x) const {
    const double L = half_width_;
    const double period = 2.0 * L;
    // reduce into [-L, L)
    double xr = x - period * std::floor((x + L) / period);
    if (xr >= L) xr -= period;
    switch (spec_.family) {
        case ProfileFamily::Constant:
            return spec_.value;
        case ProfileFamily::Trig: {
            double v = spec_.mean;
            const double w = std::numbers::pi / L;
            for (std::size_t i = 0; i < spec_.cos_coeffs.size(); ++i) {
                v += spec_.cos_coeffs[i] * std::cos(static_cast<double>(i + 1) * w * xr);
            }
            for (std::size_t i = 0; i < spec_.sin_coeffs.size(); ++i) {
                v += spec_.sin_coeffs[i] * std::sin(static_cast<double>(i + 1) * w * xr);
            }
            return v;
        }
        case ProfileFamily::HoelderBump:
            return spec_.a + spec_.b * shape_.eval(xr);
        case ProfileFamily::LogModulus: {
            const double d = periodic_distance(xr, 0.0, L);
            if (d == 0.0) return spec_.a;
            return spec_.a + spec_.b / std::max(1.0, -std::log(d / period));
        }
        case ProfileFamily::Tabulated: {
            const auto n = spec_.samples.size();
            const double u = (xr + L) / period * static_cast<double>(n);
            const double base = std::floor(u);
            const double frac = u - base;
            const auto i0 = static_cast<std::size_t>(base) % n;
            const auto i1 = (i0 + 1) % n;
            if (frac == 0.0) return spec_.samples[i0];
            return (1.0 - frac) * spec_.samples[i0] + frac * spec_.samples[i1];
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

Smoothness Profile::smoothness() const {
    switch (spec_.family) {
        case ProfileFamily::Constant:
        case ProfileFamily::Trig: return Smoothness::smooth();
        case ProfileFamily::HoelderBump: return Smoothness::hoelder(spec_.k, spec_.alpha);
        case ProfileFamily::LogModulus: return Smoothness::modulus();
        case ProfileFamily::Tabulated: return Smoothness::hoelder(0, 1.0);
    }
    return Smoothness::modulus();
}

double Profile::shape_bound() const {
    const double b = std::abs(spec_.b);
    if (spec_.family == ProfileFamily::LogModulus) return b;
    if (spec_.family != ProfileFamily::HoelderBump) return 0.0;
    if (spec_.k == 0) return b * std::pow(half_width_, spec_.alpha);
    double sup = 0.0;
    constexpr int kSamples = 8192;
    for (int i = 0; i <= kSamples; ++i) {
        const double x = -half_width_ + 2.0 * half_width_ * i / kSamples;
        sup = std::max(sup, std::abs(shape_.eval(x)));
    }
    return b * sup;
}

CoefficientField::CoefficientField(FieldSpec spec, double half_width)
    : spec_(std::move(spec)),
      half_width_(half_width),
      vol_squared_(spec_.vol_squared, half_width),
      drift_(spec_.drift, half_width) {}

bool CoefficientField::constant() const {
    return spec_.vol_squared.family == ProfileFamily::Constant &&
           spec_.drift.family == ProfileFamily::Constant;
}

double CoefficientField::theoretical_rate() const {
    return std::min(vol_smoothness().order(), drift_smoothness().order());
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void check_finite(const ProfileSpec& s, const char* which) {
    auto bad = [](double v) { return !std::isfinite(v); };
    bool any = bad(s.value) || bad(s.mean) || bad(s.a) || bad(s.b) || bad(s.alpha);
    for (double c : s.cos_coeffs) any = any || bad(c);
    for (double c : s.sin_coeffs) any = any || bad(c);
    for (double c : s.samples) any = any || bad(c);
    if (any) throw ConfigError(std::string(which) + " profile has non-finite parameters");
}

}  // namespace

CoefficientField make_family(const FieldSpec& spec, double half_width) {
    if (!(half_width > 0.0)) throw ConfigError("half-width L must be positive");
    check_finite(spec.vol_squared, "vol_squared");
    check_finite(spec.drift, "drift");
    CoefficientField field(spec, half_width);

    const ProfileSpec& v = spec.vol_squared;
    const Profile probe(v, half_width);
    switch (v.family) {
        case ProfileFamily::Constant:
            if (!(v.value > 0.0)) {
                throw ConfigError("ellipticity violated: constant sigma^2 = " + fmt(v.value) + " must be > 0");
            }
            break;
        case ProfileFamily::HoelderBump:
        case ProfileFamily::LogModulus:
            if (!(v.a > probe.shape_bound())) {
                throw ConfigError("ellipticity violated: a = " + fmt(v.a) + " must exceed |b| * sup shape = " +
                                  fmt(probe.shape_bound()));
            }
            break;
        case ProfileFamily::Trig:
        case ProfileFamily::Tabulated: {
            constexpr int kSamples = 4096;
            for (int i = 0; i < kSamples; ++i) {
                const double x = -half_width + 2.0 * half_width * i / kSamples;
                if (!(probe(x) > 0.0)) {
                    throw ConfigError("ellipticity violated: sigma^2(" + fmt(x) + ") = " + fmt(probe(x)) +
                                      " is not positive");
                }
            }
            for (double s : v.samples) {
                if (!(s > 0.0)) throw ConfigError("ellipticity violated: tabulated sigma^2 sample " + fmt(s));
            }
            break;
        }
    }
    return field;
}

FieldStats stats(const CoefficientField& field, const Grid& grid) {
    const double h = grid.spacing();
    FieldStats s{std::numeric_limits<double>::infinity(), 0.0, 0.0};
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double x = grid.point(j);
        const double v = field.vol_squared(x);
        const double mu = field.drift(x);
        if (!(v > 0.0)) {
            throw ConfigError("ellipticity violated at x = " + fmt(x) + ": sigma^2 = " + fmt(v));
        }
        s.sigma0 = std::min(s.sigma0, std::sqrt(v));
        s.sigma1 = std::max(s.sigma1, std::sqrt(v + h * std::abs(mu)));
        s.big_m = std::max(s.big_m, std::abs(mu));
    }
    return s;
}

int m_zero(const CoefficientField& field, double half_width) {
    constexpr int kMaxLevel = 20;
    constexpr int kOversample = 4;  // 2^4 = 16x
    for (int m = 0; m <= kMaxLevel; ++m) {
        const double h = std::ldexp(half_width, -m);
        const double h_fine = std::ldexp(half_width, -(m + kOversample));
        const auto n_fine = std::size_t{1} << (m + kOversample + 1);
        bool ok = true;
        for (std::size_t j = 0; j < n_fine && ok; ++j) {
            const double x = -half_width + static_cast<double>(j) * h_fine;
            ok = field.vol_squared(x) / (2.0 * h * h) > std::abs(field.drift(x)) / (2.0 * h);
        }
        if (ok) return m;
    }
    throw NumericError("no stability level found up to m = " + std::to_string(kMaxLevel));
}

double log_modulus_rho(double d) { return 1.0 / std::abs(std::log(d)); }

}  // namespace kconv
