#include "kconv/errors.hpp"
#include "kconv/generator.hpp"
#include "kconv/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

using namespace kconv;

namespace {

CoefficientField constant(double v, double mu) {
    return make_family({ProfileSpec::constant(v), ProfileSpec::constant(mu)}, 1.0);
}

CoefficientField trig() {
    return make_family({ProfileSpec::trig(1.5, {0.0}, {0.5}), ProfileSpec::trig(0.0, {0.5}, {})}, 1.0);
}

std::vector<std::complex<double>> wave(const Grid& g, double p) {
    std::vector<std::complex<double>> f(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) f[j] = std::polar(1.0, p * g.point(j));
    return f;
}

}  // namespace

TEST_CASE("stencils annihilate constants") {
    const Grid g = build_grid(4, 1.0);
    const std::vector<double> c(g.size(), 3.7);
    for (double v : apply_nabla(g, c)) CHECK(v == 0.0);
    for (double v : apply_delta(g, c)) CHECK(v == 0.0);
}

TEST_CASE("stencil eigenvalues on plane waves") {
    const Grid g = build_grid(4, 1.0);
    const double h = g.spacing();
    for (double p : momentum_set(g).momenta) {
        const auto f = wave(g, p);
        std::vector<double> re(g.size()), im(g.size());
        for (std::size_t j = 0; j < g.size(); ++j) {
            re[j] = f[j].real();
            im[j] = f[j].imag();
        }
        const auto nr = apply_nabla(g, re), ni = apply_nabla(g, im);
        const auto dr = apply_delta(g, re), di = apply_delta(g, im);
        const std::complex<double> nabla_eig(0.0, std::sin(h * p) / h);
        const double delta_eig = 2.0 * (std::cos(h * p) - 1.0) / (h * h);
        for (std::size_t j = 0; j < g.size(); ++j) {
            CHECK(std::abs(std::complex<double>(nr[j], ni[j]) - nabla_eig * f[j]) < 1e-12);
            CHECK(std::abs(std::complex<double>(dr[j], di[j]) - delta_eig * f[j]) < 1e-10);
        }
    }
}

TEST_CASE("stencil closed forms") {
    const Grid g = build_grid(3, 1.0);
    const double pi = std::numbers::pi;
    std::vector<double> s(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) s[j] = std::sin(pi * g.point(j));
    const auto ns = apply_nabla(g, s);
    for (std::size_t j = 0; j < g.size(); ++j) {
        CHECK(ns[j] == doctest::Approx(std::cos(pi * g.point(j)) * std::sin(pi * g.spacing()) / g.spacing()));
    }
    const Grid unit = build_grid(2, 4.0);  // h = 1
    std::vector<double> e(unit.size(), 0.0);
    e[3] = 1.0;
    const auto de = apply_delta(unit, e);
    CHECK(de[2] == 1.0);
    CHECK(de[3] == -2.0);
    CHECK(de[4] == 1.0);
    CHECK(de[0] == 0.0);
}

TEST_CASE("stencil dimension mismatch") {
    const Grid g = build_grid(3, 1.0);
    const std::vector<double> f(5, 0.0);
    CHECK_THROWS_AS(apply_nabla(g, f), ConfigError);
    CHECK_THROWS_AS(apply_delta(g, f), ConfigError);
}

TEST_CASE("generator entries") {
    const Grid g = build_grid(2, 1.0);  // h = 0.25
    const Grid g1 = build_grid(1, 1.0); // h = 0.5
    const PeriodicTridiagonalOperator a = build_generator(constant(1.0, 0.0), g1);
    CHECK(a.up()[0] == 2.0);
    CHECK(a.down()[0] == 2.0);
    CHECK(a.diag()[0] == -4.0);
    const PeriodicTridiagonalOperator b = build_generator(constant(1.0, 0.5), g1);
    CHECK(b.up()[1] == 2.5);
    CHECK(b.down()[1] == 1.5);
    CHECK(b.diag()[1] == -4.0);
    CHECK(b.entry(1, 2) == 2.5);
    CHECK(b.entry(1, 0) == 1.5);
    CHECK(b.entry(0, 3) == 1.5);  // wraps
    CHECK(b.entry(0, 2) == 0.0);
    const PeriodicTridiagonalOperator c = build_generator(trig(), g);
    CHECK(c.max_row_sum() <= 1e-12 * c.max_abs_diag());
}

TEST_CASE("generator annihilates constants and is Markov above m_zero") {
    const CoefficientField f = trig();
    for (int m = m_zero(f, 1.0); m <= 8; ++m) {
        const PeriodicTridiagonalOperator op = build_generator(f, build_grid(m, 1.0));
        const std::vector<double> ones(op.size(), 1.0);
        for (double v : op.apply(ones)) CHECK(std::abs(v) <= 1e-13 * op.max_abs_diag());
        CHECK(op.markov());
    }
}

TEST_CASE("below m_zero the operator builds but is not Markov") {
    const CoefficientField f = constant(1.0, 10.0);
    CHECK_FALSE(build_generator(f, build_grid(2, 1.0)).markov());
    CHECK(build_generator(f, build_grid(4, 1.0)).markov());
}

TEST_CASE("constant generator is diagonalized by plane waves") {
    for (double sigma : {0.5, 1.0, 2.0}) {
        for (double mu : {0.0, 0.5, -1.0}) {
            const CoefficientField f = constant(sigma * sigma, mu);
            const Grid g = build_grid(std::max(3, m_zero(f, 1.0)), 1.0);
            const PeriodicTridiagonalOperator op = build_generator(f, g);
            for (double p : momentum_set(g).momenta) {
                // the symbol is the eigenvalue on e^{-ipx}
                const auto fp = wave(g, -p);
                const auto lf = op.apply(std::span<const std::complex<double>>(fp));
                const auto lambda = symbol(p, g.spacing(), sigma, mu);
                for (std::size_t j = 0; j < g.size(); ++j) CHECK(std::abs(lf[j] - lambda * fp[j]) < 1e-10);
            }
        }
    }
}

TEST_CASE("adjoint") {
    const Grid g = build_grid(3, 1.0);
    const PeriodicTridiagonalOperator sym = build_generator(constant(1.0, 0.0), g);
    const PeriodicTridiagonalOperator sa = adjoint(sym);
    for (std::size_t j = 0; j < g.size(); ++j) {
        CHECK(sa.up()[j] == sym.up()[j]);
        CHECK(sa.down()[j] == sym.down()[j]);
    }
    const PeriodicTridiagonalOperator op = build_generator(trig(), g);
    const PeriodicTridiagonalOperator t = adjoint(op);
    const PeriodicTridiagonalOperator tt = adjoint(t);
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) {
            CHECK(t.entry(i, j) == op.entry(j, i));
            CHECK(tt.entry(i, j) == op.entry(i, j));
        }
    }
    const PeriodicTridiagonalOperator d = build_generator(constant(1.0, 0.5), g);
    const PeriodicTridiagonalOperator da = adjoint(d);
    for (std::size_t j = 0; j < g.size(); ++j) {
        double column = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) column += d.entry(i, j);
        CHECK(column == doctest::Approx(da.diag()[j] + da.up()[j] + da.down()[j]));
    }
}

TEST_CASE("two-point grid sums both bands") {
    const PeriodicTridiagonalOperator op = build_generator(constant(1.0, 0.5), build_grid(0, 1.0));
    CHECK(op.entry(0, 1) == doctest::Approx(op.up()[0] + op.down()[0]));
}
