#pragma once

#include "kconv/lattice.hpp"

#include <string>
#include <vector>

namespace kconv {

/// Regularity class of a coefficient profile.
struct Smoothness {
    enum class Kind { Smooth, Hoelder, Modulus };
    Kind kind = Kind::Smooth;
    int derivatives = 0;  // k in C^{k,alpha}
    double exponent = 1;  // alpha

    static Smoothness smooth() { return {Kind::Smooth, 0, 1.0}; }
    static Smoothness hoelder(int k, double alpha) { return {Kind::Hoelder, k, alpha}; }
    static Smoothness modulus() { return {Kind::Modulus, 0, 0.0}; }

    /// k + alpha, capped at 2 (the best rate the schemes can achieve); NaN for Modulus.
    double order() const;
};

enum class ProfileFamily { Constant, Trig, HoelderBump, LogModulus, Tabulated };

/// Parameters of one scalar profile. Fields unused by a family are ignored.
///   Constant     value
///   Trig         mean + sum_k cos[k-1] cos(k pi x/L) + sin[k-1] sin(k pi x/L)
///   HoelderBump  a + b d(x,0)^alpha, or for k > 0 a + b * (k-fold zero-mean
///                periodic antiderivative of d(x,0)^alpha - mean)
///   LogModulus   a + b / max(1, -ln(d(x,0) / 2L))
///   Tabulated    periodic samples at -L + j 2L/n, linear interpolation
struct ProfileSpec {
    ProfileFamily family = ProfileFamily::Constant;
    double value = 0.0;
    double mean = 0.0;
    std::vector<double> cos_coeffs;
    std::vector<double> sin_coeffs;
    double a = 1.0;
    double b = 0.0;
    double alpha = 1.0;
    int k = 0;
    std::vector<double> samples;

    static ProfileSpec constant(double v);
    static ProfileSpec trig(double mean, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs);
    static ProfileSpec hoelder_bump(double a, double b, double alpha, int k = 0);
    static ProfileSpec log_modulus(double a, double b);
    static ProfileSpec tabulated(std::vector<double> samples);
};

struct FieldSpec {
    ProfileSpec vol_squared;
    ProfileSpec drift;
};

std::string family_name(ProfileFamily family);
ProfileFamily parse_family(const std::string& name);

/// One periodic scalar profile on [-L, L), evaluable anywhere on the real line.
class Profile {
public:
    Profile(ProfileSpec spec, double half_width);

    double operator()(double x) const;
    const ProfileSpec& spec() const noexcept { return spec_; }
    Smoothness smoothness() const;

    /// sup |profile - a| for HoelderBump/LogModulus shapes (|b| times the unit shape bound).
    double shape_bound() const;

private:
    // c * |x|^power (times sgn x when odd) + sum_i poly[i] x^i on [-L, L].
    struct PowerShape {
        double coef = 1.0;
        double power = 0.0;
        bool odd = false;
        std::vector<double> poly;
        double eval(double x) const;
    };
    static PowerShape antiderivative_shape(double alpha, int k, double half_width);

    ProfileSpec spec_;
    double half_width_;
    PowerShape shape_;
};

/// sigma^2(x) and mu(x) with their declared regularity.
class CoefficientField {
public:
    CoefficientField(FieldSpec spec, double half_width);

    double vol_squared(double x) const { return vol_squared_(x); }
    double drift(double x) const { return drift_(x); }
    double half_width() const noexcept { return half_width_; }
    const FieldSpec& spec() const noexcept { return spec_; }

    Smoothness vol_smoothness() const { return vol_squared_.smoothness(); }
    Smoothness drift_smoothness() const { return drift_.smoothness(); }
    bool constant() const;

    /// min{2, k+alpha, j+beta}; NaN when either profile only has a modulus of continuity.
    double theoretical_rate() const;

private:
    FieldSpec spec_;
    double half_width_;
    Profile vol_squared_;
    Profile drift_;
};

/// Validates ellipticity and periodic setup; throws ConfigError naming the violated invariant.
CoefficientField make_family(const FieldSpec& spec, double half_width);

/// Sigma_0 = inf sigma, Sigma_1 = sup sqrt(sigma^2 + h|mu|), M = sup |mu| over grid points.
struct FieldStats {
    double sigma0;
    double sigma1;
    double big_m;
};

FieldStats stats(const CoefficientField& field, const Grid& grid);

/// Least level m with sigma^2(x) > h_m |mu(x)| on A_m and a 16x oversampling of it.
int m_zero(const CoefficientField& field, double half_width);

/// rho(d) = 1/|ln d|, the modulus realized by LogModulus near the origin.
double log_modulus_rho(double d);

}  // namespace kconv
