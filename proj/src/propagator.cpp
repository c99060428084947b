#include "kconv/propagator.hpp"

#include "kconv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kconv {

std::string scheme_name(Scheme scheme) {
    switch (scheme) {
        case Scheme::Semidiscrete: return "semidiscrete";
        case Scheme::Euler: return "euler";
        case Scheme::Spectral: return "spectral";
        case Scheme::SpectralEuler: return "spectral-euler";
        case Scheme::Continuum: return "continuum";
    }
    return "unknown";
}

Scheme parse_scheme(const std::string& name) {
    for (auto s : {Scheme::Semidiscrete, Scheme::Euler, Scheme::Spectral, Scheme::SpectralEuler,
                   Scheme::Continuum}) {
        if (scheme_name(s) == name) return s;
    }
    if (name == "spectral-oracle") return Scheme::Spectral;
    throw ConfigError("unknown scheme '" + name + "'");
}

DenseMatrix to_dense(const PeriodicTridiagonalOperator& op) {
    const auto n = static_cast<Eigen::Index>(op.size());
    DenseMatrix m = DenseMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        m(j, j) += op.diag()[uj];
        m(j, (j + 1) % n) += op.up()[uj];
        m(j, (j + n - 1) % n) += op.down()[uj];
    }
    return m;
}

namespace {

KernelMatrix make_kernel(const PeriodicTridiagonalOperator& op, double t, Scheme scheme) {
    KernelMatrix k;
    k.level = op.level();
    k.half_width = op.grid().half_width();
    k.time = t;
    k.scheme = scheme;
    return k;
}

void require_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("time must be finite and nonnegative");
}

}  // namespace

KernelMatrix expm_kernel(const PeriodicTridiagonalOperator& op, double t) {
    require_time(t);
    KernelMatrix k = make_kernel(op, t, Scheme::Semidiscrete);
    const auto n = static_cast<Eigen::Index>(op.size());
    const double inv_h = 1.0 / op.spacing();
    if (t == 0.0) {
        k.values = DenseMatrix::Identity(n, n) * inv_h;
        return k;
    }
    k.values = expm(to_dense(op) * t) * inv_h;
    return k;
}

double derivative_tolerance(const PeriodicTridiagonalOperator& op, const KernelMatrix& kernel) {
    const double op_norm = 2.0 * op.max_abs_diag();
    const double u_norm = kernel.values.cwiseAbs().rowwise().sum().maxCoeff() * kernel.spacing();
    return std::max(1e-9, 1e-11 * op_norm * u_norm);
}

KernelMatrix time_derivative(const PeriodicTridiagonalOperator& op, const KernelMatrix& kernel) {
    if (kernel.size() != op.size() || kernel.level != op.level()) {
        throw ConfigError("time_derivative: kernel and operator live on different grids");
    }
    const DenseMatrix l = to_dense(op);
    KernelMatrix out = kernel;
    out.values = kernel.values * l;
    const DenseMatrix backward = l * kernel.values;
    const double mismatch = (out.values - backward).cwiseAbs().maxCoeff();
    const double tol = derivative_tolerance(op, kernel);
    if (!(mismatch <= tol)) {
        throw NumericError("time_derivative: backward and forward products differ by " +
                           std::to_string(mismatch) + " (tolerance " + std::to_string(tol) + ")");
    }
    return out;
}

double max_stable_dt(const PeriodicTridiagonalOperator& op, double safety) {
    const double d = op.max_abs_diag();
    if (!(d > 0.0)) throw ConfigError("max_stable_dt: operator has a zero diagonal");
    return safety / d;
}

EulerStep choose_euler_step(const PeriodicTridiagonalOperator& op, double t, double safety) {
    require_time(t);
    if (t == 0.0) return {max_stable_dt(op, safety), 0};
    const double dt_max = max_stable_dt(op, safety);
    const auto n = static_cast<long long>(std::ceil(t / dt_max * (1.0 - 1e-15)));
    const long long steps = std::max<long long>(1, n);
    return {t / static_cast<double>(steps), steps};
}

namespace {

void validate_step(const PeriodicTridiagonalOperator& op, double t, const EulerStep& step) {
    require_time(t);
    if (!(step.delta_t > 0.0) || step.n_steps < 0) throw ConfigError("euler step must have dt > 0");
    const double product = step.delta_t * static_cast<double>(step.n_steps);
    if (std::abs(product - t) > 1e-12 * std::max(1.0, t)) {
        throw ConfigError("euler step: n_steps * delta_t = " + std::to_string(product) + " differs from t");
    }
    for (double d : op.diag()) {
        if (!(1.0 + step.delta_t * d > 0.0)) {
            throw ConfigError("euler step unstable: 1 + dt L(x,x) = " + std::to_string(1.0 + step.delta_t * d) +
                              " <= 0");
        }
    }
}

DenseMatrix euler_factor(const PeriodicTridiagonalOperator& op, double dt) {
    DenseMatrix p = to_dense(op) * dt;
    p.diagonal().array() += 1.0;
    return p;
}

}  // namespace

KernelMatrix euler_kernel(const PeriodicTridiagonalOperator& op, double t, const EulerStep& step) {
    validate_step(op, t, step);
    KernelMatrix k = make_kernel(op, t, Scheme::Euler);
    k.delta_t = step.delta_t;
    k.n_steps = step.n_steps;
    k.values = matrix_power(euler_factor(op, step.delta_t), step.n_steps) / op.spacing();
    return k;
}

KernelMatrix euler_time_derivative(const PeriodicTridiagonalOperator& op, double t, const EulerStep& step) {
    const KernelMatrix u = euler_kernel(op, t, step);
    KernelMatrix out = u;
    out.values = u.values * to_dense(op);
    const DenseMatrix next = u.values * euler_factor(op, step.delta_t);
    const DenseMatrix quotient = (next - u.values) / step.delta_t;
    // the quotient cannot beat the rounding of next - u, about eps ||u|| / dt
    const double eps = std::numeric_limits<double>::epsilon();
    const double floor = 64.0 * eps * u.values.cwiseAbs().maxCoeff() / step.delta_t;
    const double scale = std::max(1.0, out.values.cwiseAbs().maxCoeff());
    const double mismatch = (quotient - out.values).cwiseAbs().maxCoeff();
    if (!(mismatch <= 1e-10 * scale + floor)) {
        throw NumericError("euler_time_derivative: difference quotient differs from u L by " +
                           std::to_string(mismatch));
    }
    return out;
}

MarkovDiagnostics markov_diagnostics(const KernelMatrix& kernel) {
    const double h = kernel.spacing();
    MarkovDiagnostics d{kernel.values.minCoeff(), 0.0};
    for (Eigen::Index i = 0; i < kernel.values.rows(); ++i) {
        d.max_mass_error = std::max(d.max_mass_error, std::abs(h * kernel.values.row(i).sum() - 1.0));
    }
    return d;
}

double semigroup_defect(const KernelMatrix& u_s, const KernelMatrix& u_t, const KernelMatrix& u_sum) {
    if (u_s.size() != u_t.size() || u_s.size() != u_sum.size()) {
        throw ConfigError("semigroup_defect: kernels on different grids");
    }
    const DenseMatrix composed = u_s.values * u_t.values * u_s.spacing();
    return (composed - u_sum.values).cwiseAbs().maxCoeff();
}

}  // namespace kconv
