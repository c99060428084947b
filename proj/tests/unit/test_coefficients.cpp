#include "kconv/coefficients.hpp"
#include "kconv/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace kconv;

namespace {

CoefficientField constant(double v, double mu, double L = 1.0) {
    return make_family({ProfileSpec::constant(v), ProfileSpec::constant(mu)}, L);
}

}  // namespace

TEST_CASE("constant family") {
    const CoefficientField f = constant(1.0, 0.0);
    CHECK(f.vol_squared(0.3) == 1.0);
    CHECK(f.drift(-0.7) == 0.0);
    CHECK(f.constant());
    CHECK(f.vol_smoothness().kind == Smoothness::Kind::Smooth);
    CHECK(f.theoretical_rate() == 2.0);
}

TEST_CASE("hoelder bump values") {
    const CoefficientField f =
        make_family({ProfileSpec::hoelder_bump(1.0, 0.5, 0.5), ProfileSpec::constant(0.0)}, 1.0);
    CHECK(f.vol_squared(0.0) == 1.0);
    CHECK(f.vol_squared(0.25) == doctest::Approx(1.0 + 0.5 * std::sqrt(0.25)).epsilon(1e-14));
    CHECK(f.vol_squared(-0.25) == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(f.vol_squared(0.5) == doctest::Approx(1.3535533906).epsilon(1e-10));
    CHECK(f.vol_squared(1.5) == doctest::Approx(1.3535533906).epsilon(1e-10));  // d(1.5, 0) = 0.5
    CHECK(f.theoretical_rate() == 0.5);
    CHECK_FALSE(f.constant());
}

TEST_CASE("ellipticity violations are rejected with a named invariant") {
    CHECK_THROWS_AS(constant(0.0, 0.0), ConfigError);
    CHECK_THROWS_AS(constant(-1.0, 0.0), ConfigError);
    // a <= |b| L^alpha
    CHECK_THROWS_AS(make_family({ProfileSpec::hoelder_bump(0.5, -0.5, 0.5), ProfileSpec::constant(0.0)}, 1.0),
                    ConfigError);
    try {
        constant(0.0, 0.0);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("ellipticity") != std::string::npos);
    }
}

TEST_CASE("hoelder quotient is bounded by b") {
    const double b = 0.5;
    for (double alpha : {0.25, 0.5, 1.0}) {
        const CoefficientField f =
            make_family({ProfileSpec::hoelder_bump(1.0, b, alpha), ProfileSpec::constant(0.0)}, 1.0);
        for (int m = 2; m <= 6; ++m) {
            const Grid g = build_grid(m, 1.0);
            double worst = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                for (std::size_t j = 0; j < g.size(); ++j) {
                    if (i == j) continue;
                    const double d = periodic_distance(g.point(i), g.point(j), 1.0);
                    worst = std::max(worst, std::abs(f.vol_squared(g.point(i)) - f.vol_squared(g.point(j))) /
                                                std::pow(d, alpha));
                }
            }
            CHECK(worst <= b * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("C^{k,alpha} antiderivatives: periodic, differentiable, and zero mean") {
    for (int k : {1, 2}) {
        const ProfileSpec spec = ProfileSpec::hoelder_bump(2.0, 0.5, 0.5, k);
        const Profile p(spec, 1.0);
        CHECK(p.smoothness().derivatives == k);
        CHECK(p(-1.0) == doctest::Approx(p(1.0)).epsilon(1e-12));
        // mean of the shape is zero: trapezoid average of p - a over a fine grid
        const Grid g = build_grid(12, 1.0, 1 << 13);
        double mean = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) mean += p(g.point(j)) - spec.a;
        CHECK(std::abs(mean / g.size()) < 1e-6);
        // first derivative (by central difference) is continuous across x = +-L
        const double e = 1e-5;
        const double left = (p(1.0 - e) - p(1.0 - 2 * e)) / e;
        const double right = (p(-1.0 + 2 * e) - p(-1.0 + e)) / e;
        CHECK(std::abs(left - right) < 1e-3);
    }
    const CoefficientField f =
        make_family({ProfileSpec::hoelder_bump(2.0, 0.5, 0.5, 1), ProfileSpec::constant(0.0)}, 1.0);
    CHECK(f.theoretical_rate() == doctest::Approx(1.5));
}

TEST_CASE("antiderivative differentiates back to the lower class") {
    // d/dx of the k = 1 shape equals d(x,0)^alpha - mean, the k = 0 shape minus its mean
    const double alpha = 0.5;
    const Profile p1(ProfileSpec::hoelder_bump(0.0, 1.0, alpha, 1), 1.0);
    const double mean = 1.0 / (alpha + 1.0);  // (1/L) int_0^L x^alpha dx, L = 1
    for (double x : {-0.8, -0.3, 0.2, 0.6}) {
        const double e = 1e-6;
        const double derivative = (p1(x + e) - p1(x - e)) / (2 * e);
        CHECK(derivative == doctest::Approx(std::pow(std::abs(x), alpha) - mean).epsilon(1e-6));
    }
}

TEST_CASE("log modulus family") {
    const double L = 1.0;
    const Profile p(ProfileSpec::log_modulus(1.0, 0.5), L);
    CHECK(p(0.0) == 1.0);
    CHECK(p(0.01) == doctest::Approx(1.0 + 0.5 / -std::log(0.01 / 2.0)));
    CHECK(p(0.9) == doctest::Approx(1.5));  // -ln(0.45) < 1
    CHECK(std::isnan(p.smoothness().order()));
    const CoefficientField f = make_family({ProfileSpec::log_modulus(1.0, 0.5), ProfileSpec::constant(0.0)}, L);
    CHECK(std::isnan(f.theoretical_rate()));
    CHECK(log_modulus_rho(std::exp(-2.0)) == doctest::Approx(0.5));
}

TEST_CASE("trig and tabulated families") {
    const Profile t(ProfileSpec::trig(1.5, {0.0}, {0.5}), 1.0);
    CHECK(t(0.5) == doctest::Approx(2.0));
    CHECK(t(-0.5) == doctest::Approx(1.0));
    const Profile tab(ProfileSpec::tabulated({1.0, 2.0, 3.0, 4.0}), 1.0);
    CHECK(tab(-1.0) == 1.0);
    CHECK(tab(-0.5) == 2.0);
    CHECK(tab(-0.75) == doctest::Approx(1.5));
    CHECK(tab(0.75) == doctest::Approx(2.5));  // interpolates back toward sample 0
}

TEST_CASE("all families are 2L periodic") {
    const std::vector<ProfileSpec> specs{ProfileSpec::constant(2.0), ProfileSpec::trig(1.0, {0.2, 0.1}, {0.3}),
                                         ProfileSpec::hoelder_bump(1.0, 0.5, 0.7),
                                         ProfileSpec::hoelder_bump(1.0, 0.5, 0.7, 2), ProfileSpec::log_modulus(1.0, 0.5),
                                         ProfileSpec::tabulated({1.0, 1.2, 0.9})};
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const ProfileSpec& s : specs) {
        const Profile p(s, 1.0);
        for (int i = 0; i < 50; ++i) {
            const double x = u(rng);
            CHECK(p(x + 2.0) == doctest::Approx(p(x)).epsilon(1e-12));
            CHECK(p(x - 4.0) == doctest::Approx(p(x)).epsilon(1e-12));
        }
    }
}

TEST_CASE("stats examples") {
    const FieldStats s = stats(constant(1.0, 0.0), build_grid(3, 1.0));
    CHECK(s.sigma0 == 1.0);
    CHECK(s.sigma1 == 1.0);
    CHECK(s.big_m == 0.0);
    const FieldStats s2 = stats(constant(1.0, 2.0), build_grid(2, 1.0));
    CHECK(s2.sigma1 == doctest::Approx(1.2247448714).epsilon(1e-10));
    CHECK(s2.big_m == 2.0);
    const CoefficientField trig = make_family({ProfileSpec::trig(1.5, {0.0}, {0.5}), ProfileSpec::constant(0.0)}, 1.0);
    CHECK(stats(trig, build_grid(6, 1.0)).sigma0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(stats(trig, build_grid(6, 1.0)).sigma0 <= stats(trig, build_grid(6, 1.0)).sigma1);
}

TEST_CASE("m_zero examples and monotonicity") {
    CHECK(m_zero(constant(1.0, 0.0), 1.0) == 0);
    CHECK(m_zero(constant(1.0, 10.0), 1.0) == 4);
    CHECK(m_zero(constant(0.25, 1.0), 1.0) == 3);
    const FieldSpec base{ProfileSpec::trig(1.5, {0.0}, {0.5}), ProfileSpec::trig(0.0, {3.0}, {})};
    int previous = 0;
    for (double scale : {1.0, 2.0, 4.0, 8.0}) {
        FieldSpec s = base;
        s.drift.cos_coeffs[0] *= scale;
        const int m0 = m_zero(make_family(s, 1.0), 1.0);
        CHECK(m0 >= previous);
        previous = m0;
    }
}
