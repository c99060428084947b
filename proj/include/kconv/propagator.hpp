#pragma once

#include "kconv/expm.hpp"
#include "kconv/generator.hpp"

#include <string>

namespace kconv {

enum class Scheme {
    Semidiscrete,   // h^-1 exp(tL)
    Euler,          // h^-1 (1 + dt L)^(t/dt)
    Spectral,       // constant-coefficient Fourier series of the semidiscrete kernel
    SpectralEuler,  // Fourier series of the Euler kernel
    Continuum,      // Fourier series with the exact continuum symbol
};

std::string scheme_name(Scheme scheme);
Scheme parse_scheme(const std::string& name);

/// Dense kernel values at one level and time. Row index = source x, column = target y;
/// entry (x, y) is a density in y (units 1/length).
struct KernelMatrix {
    int level = 0;
    double half_width = 1.0;
    double time = 0.0;
    Scheme scheme = Scheme::Semidiscrete;
    double delta_t = 0.0;   // Euler schemes only
    long long n_steps = 0;  // Euler schemes only
    DenseMatrix values;

    double spacing() const { return std::ldexp(half_width, -level); }
    std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
};

/// Time step of the explicit scheme; n_steps * delta_t reproduces t.
struct EulerStep {
    double delta_t;
    long long n_steps;
};

DenseMatrix to_dense(const PeriodicTridiagonalOperator& op);

/// h^-1 exp(tL). t = 0 returns the lattice delta exactly.
KernelMatrix expm_kernel(const PeriodicTridiagonalOperator& op, double t);

/// d/dt of the semidiscrete kernel as the forward product u L (L* on the y index).
/// The backward product L u is formed as well; if the two disagree by more than
/// derivative_tolerance() the kernel does not belong to the operator and
/// NumericError is thrown.
KernelMatrix time_derivative(const PeriodicTridiagonalOperator& op, const KernelMatrix& kernel);

/// Largest |Lu - uL| accepted by time_derivative: max(1e-9, 1e-11 ||L||_inf ||u||_inf h).
/// Both products round at about eps ||L|| ||u||, which exceeds 1e-9 on fine grids.
double derivative_tolerance(const PeriodicTridiagonalOperator& op, const KernelMatrix& kernel);

/// safety * sup{dt : 1 + dt L(x,x) > 0} = safety / max |L(x,x)|.
double max_stable_dt(const PeriodicTridiagonalOperator& op, double safety = 0.9);

/// Step policy: start from max_stable_dt and shrink to t / ceil(t / dt) so t/dt is an integer.
EulerStep choose_euler_step(const PeriodicTridiagonalOperator& op, double t, double safety = 0.9);

/// h^-1 (1 + dt L)^n by binary powering. Rejects steps with some 1 + dt L(x,x) <= 0
/// or n dt != t.
KernelMatrix euler_kernel(const PeriodicTridiagonalOperator& op, double t, const EulerStep& step);

/// (u^dt(t + dt) - u^dt(t)) / dt, returned as u^dt(t) L; the explicit difference
/// quotient is cross-checked to 1e-10 relative.
KernelMatrix euler_time_derivative(const PeriodicTridiagonalOperator& op, double t, const EulerStep& step);

struct MarkovDiagnostics {
    double min_entry;        // most negative kernel value
    double max_mass_error;   // max_x |h sum_y u(x,y) - 1|
};

MarkovDiagnostics markov_diagnostics(const KernelMatrix& kernel);

/// max |h u(s) u(t) - u(s+t)| over all entries.
double semigroup_defect(const KernelMatrix& u_s, const KernelMatrix& u_t, const KernelMatrix& u_sum);

}  // namespace kconv
