// Acceptance suite: one PASS/FAIL line per criterion, followed by the measured values.

#include "kconv/dyson.hpp"
#include "kconv/experiment.hpp"
#include "kconv/harness.hpp"
#include "kconv/serialize.hpp"
#include "kconv/spectral.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace kconv;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> lines;

    void note(const std::string& s) { lines.push_back(s); }
    void require(bool ok, const std::string& s) {
        pass = pass && ok;
        lines.push_back(std::string(ok ? "ok    " : "FAIL  ") + s);
    }
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double max_abs(const DenseMatrix& m) { return m.cwiseAbs().maxCoeff(); }

CoefficientField constant(double sigma, double mu) {
    return make_family({ProfileSpec::constant(sigma * sigma), ProfileSpec::constant(mu)}, 1.0);
}

CoefficientField trig() { return make_family(preset_field("trig"), 1.0); }

CoefficientField hoelder(double alpha) {
    return make_family({ProfileSpec::hoelder_bump(1.0, 0.5, alpha), ProfileSpec::constant(0.0)}, 1.0);
}

ConvergenceReport campaign(const CoefficientField& f, bool euler) {
    CampaignOptions o;
    o.m_min = 4;
    o.m_max = 8;
    o.time = 0.25;
    o.euler = euler;
    return run_campaign(f, o);
}

std::string diffs_line(const ConvergenceReport& r) {
    std::string s = "kernel diffs:";
    for (const PairDiff& p : r.pairs) s += fmt(" %.4e", p.kernel);
    return s;
}

bool strictly_decreasing(const ConvergenceReport& r) {
    for (std::size_t i = 1; i < r.pairs.size(); ++i) {
        if (!(r.pairs[i].kernel < r.pairs[i - 1].kernel)) return false;
    }
    return true;
}

// 1
Outcome oracle_equivalence() {
    Outcome o;
    double expm_err = 0.0, euler_err = 0.0;
    int configs = 0;
    for (double sigma : {0.5, 1.0, 2.0}) {
        for (double mu : {0.0, 0.5, -1.0}) {
            const CoefficientField f = constant(sigma, mu);
            for (int m = 3; m <= 7; ++m) {
                const Grid g = build_grid(m, 1.0);
                const PeriodicTridiagonalOperator op = build_generator(f, g);
                for (double t : {0.05, 0.25}) {
                    expm_err = std::max(expm_err, max_abs(expm_kernel(op, t).values - fourier_kernel(sigma, mu, g, t).kernel.values));
                    const EulerStep s = choose_euler_step(op, t);
                    euler_err = std::max(euler_err, max_abs(euler_kernel(op, t, s).values -
                                                            fourier_kernel_discrete(sigma, mu, g, t, s).kernel.values));
                    ++configs;
                }
            }
        }
    }
    o.note(std::to_string(configs) + " configurations");
    o.require(expm_err < 1e-10, fmt("max |expm - fourier| = %.3e (< 1e-10)", expm_err));
    o.require(euler_err < 1e-10, fmt("max |euler - fourier_discrete| = %.3e (< 1e-10)", euler_err));
    return o;
}

// 2
Outcome markov_invariants() {
    Outcome o;
    double negative = 0.0, mass = 0.0, semigroup = 0.0;
    std::size_t kernels = 0;
    auto visit = [&](const PeriodicTridiagonalOperator& op, bool with_euler) {
        const KernelMatrix a = expm_kernel(op, 0.05);
        const KernelMatrix b = expm_kernel(op, 0.2);
        const KernelMatrix c = expm_kernel(op, 0.25);
        std::vector<KernelMatrix> ks{a, b, c};
        if (with_euler) {
            for (double t : {0.05, 0.25}) ks.push_back(euler_kernel(op, t, choose_euler_step(op, t)));
        }
        for (const KernelMatrix& k : ks) {
            const MarkovDiagnostics d = markov_diagnostics(k);
            negative = std::max(negative, -d.min_entry);
            mass = std::max(mass, d.max_mass_error);
            ++kernels;
        }
        semigroup = std::max(semigroup, semigroup_defect(a, b, c));
    };
    for (double sigma : {0.5, 1.0, 2.0}) {
        for (double mu : {0.0, 0.5, -1.0}) {
            for (int m = 3; m <= 7; ++m) visit(build_generator(constant(sigma, mu), build_grid(m, 1.0)), true);
        }
    }
    for (const CoefficientField& f : {trig(), hoelder(0.5), hoelder(1.0)}) {
        for (int m = std::max(3, m_zero(f, 1.0)); m <= 8; ++m) visit(build_generator(f, build_grid(m, 1.0)), true);
    }
    o.note(std::to_string(kernels) + " kernels");
    o.require(negative <= 1e-12, fmt("most negative entry = %.3e (>= -1e-12)", -negative));
    o.require(mass <= 1e-10, fmt("max |h sum_y u - 1| = %.3e (<= 1e-10)", mass));
    o.require(semigroup <= 1e-9, fmt("max semigroup defect = %.3e (<= 1e-9)", semigroup));
    return o;
}

// 3
Outcome smooth_rate() {
    Outcome o;
    const ConvergenceReport r = campaign(trig(), false);
    o.note(diffs_line(r));
    o.require(r.complete() && r.kernel_rate && r.derivative_rate, "campaign complete with both fits");
    if (!r.kernel_rate || !r.derivative_rate) return o;
    o.require(r.kernel_rate->gamma_hat >= 1.8 && r.kernel_rate->residual < 0.25,
              fmt("kernel gamma_hat = %.4f", r.kernel_rate->gamma_hat) +
                  fmt(", residual %.4f", r.kernel_rate->residual));
    o.require(r.derivative_rate->gamma_hat >= 1.8 && r.derivative_rate->residual < 0.25,
              fmt("derivative gamma_hat = %.4f", r.derivative_rate->gamma_hat) +
                  fmt(", residual %.4f", r.derivative_rate->residual));
    return o;
}

// 4
Outcome hoelder_rate() {
    Outcome o;
    for (auto [alpha, floor] : {std::pair{0.5, 0.35}, std::pair{1.0, 0.8}}) {
        const ConvergenceReport r = campaign(hoelder(alpha), false);
        o.note(fmt("alpha = %.1f: ", alpha) + diffs_line(r));
        o.require(strictly_decreasing(r), fmt("alpha = %.1f: pairwise diffs strictly decreasing", alpha));
        const double g = r.kernel_rate ? r.kernel_rate->gamma_hat : NAN;
        o.require(g >= floor, fmt("alpha = %.1f: ", alpha) + fmt("gamma_hat = %.4f", g) + fmt(" (>= %.2f)", floor));
    }
    return o;
}

// 5
Outcome modulus_bound() {
    Outcome o;
    const ConvergenceReport r = campaign(make_family(preset_field("logmod"), 1.0), false);
    std::string seq = "diff/rho(h):";
    bool nonincreasing = true;
    for (std::size_t i = 0; i < r.pairs.size(); ++i) {
        seq += fmt(" %.4e", *r.pairs[i].kernel_over_rho);
        if (i > 0 && *r.pairs[i].kernel_over_rho > *r.pairs[i - 1].kernel_over_rho) nonincreasing = false;
    }
    o.note(seq);
    o.note(std::string("sequence nonincreasing (bounded by its first term): ") + (nonincreasing ? "yes" : "no"));
    const double spread = r.rho_ratio_spread.value_or(INFINITY);
    o.require(spread < 5.0, fmt("max/min of diff/rho = %.3f (< 5)", spread));
    return o;
}

// 6
Outcome euler_rate() {
    Outcome o;
    const ConvergenceReport r = campaign(trig(), true);
    std::string s = "euler diffs:";
    for (const LevelResult& l : r.levels) s += fmt(" %.4e", l.euler_diff.value_or(NAN));
    o.note(s);
    const double k = r.euler_rate ? r.euler_rate->gamma_hat : NAN;
    const double d = r.euler_derivative_rate ? r.euler_derivative_rate->gamma_hat : NAN;
    o.require(k >= 1.8, fmt("kernel gamma_hat = %.4f (>= 1.8)", k));
    o.require(d >= 1.8, fmt("derivative gamma_hat = %.4f (>= 1.8)", d));
    return o;
}

std::uint64_t enumerate(int q, long long k) {
    std::uint64_t count = 0;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << q); ++bits) {
        long long pos = 0;
        for (int i = 0; i < q; ++i) pos += ((bits >> i) & 1) ? 1 : -1;
        count += pos == k;
    }
    return count;
}

// Trapezoid self-convolution of phi, Richardson-extrapolated; independent of the library.
double numeric_conv_power(int q, double t, double a, double b, int n) {
    auto run = [&](int steps) {
        const double ds = t / steps;
        std::vector<double> phi(steps + 1), g(steps + 1), next(steps + 1);
        for (int i = 0; i <= steps; ++i) phi[i] = a * std::exp(-b * ds * i);
        g = phi;
        for (int j = 1; j < q; ++j) {
            for (int i = 0; i <= steps; ++i) {
                double acc = 0.0;
                for (int l = 0; l <= i; ++l) acc += (l == 0 || l == i ? 0.5 : 1.0) * g[l] * phi[i - l];
                next[i] = i == 0 ? 0.0 : ds * acc;
            }
            std::swap(g, next);
        }
        return g[steps];
    };
    return (4.0 * run(n) - run(n / 2)) / 3.0;
}

// 7
Outcome dyson_suite() {
    Outcome o;
    std::uint64_t mismatches = 0;
    for (int q = 1; q <= 12; ++q) {
        for (long long k = -q; k <= q; ++k) mismatches += count_paths(q, k) != enumerate(q, k);
    }
    o.require(mismatches == 0, "count_paths = enumeration for q <= 12 (" + std::to_string(mismatches) + " mismatches)");

    double conv_err = 0.0;
    for (double h : {0.5, 0.25}) {
        const FieldStats s = stats(trig(), build_grid(h == 0.5 ? 1 : 2, 1.0));
        const double a = s.sigma1 * s.sigma1 / (2 * h * h), b = s.sigma0 * s.sigma0 / (2 * h * h);
        for (int q = 1; q <= 14; ++q) {
            for (double t : {0.1, 0.5, 1.5}) {
                const double exact = conv_power(q, t, s, h);
                conv_err = std::max(conv_err, std::abs(numeric_conv_power(q, t, a, b, 4096) - exact) / exact);
            }
        }
    }
    o.require(conv_err < 1e-8, fmt("conv_power vs numerical convolution: max rel err %.3e (< 1e-8)", conv_err));

    double resum_err = 0.0;
    int cap_used = 0;
    for (int m : {1, 2}) {
        for (const CoefficientField& f : {constant(1.0, 0.0), trig()}) {
            const Grid g = build_grid(m, 1.0);
            const PeriodicTridiagonalOperator op = build_generator(f, g);
            const double t = m == 1 ? 0.05 : 0.02;
            const int cap = std::max(20, q_max(stats(f, g), t, g.spacing()));
            cap_used = std::max(cap_used, cap);
            const KernelMatrix u = expm_kernel(op, t);
            for (std::size_t x = 0; x < g.size(); x += 3) {
                for (std::size_t y = 0; y < g.size(); ++y) {
                    resum_err = std::max(resum_err, std::abs(resum_kernel(op, x, y, t, cap).value - u.values(x, y)));
                }
            }
        }
    }
    o.require(resum_err < 1e-6, fmt("resum_kernel vs expm: max err %.3e (< 1e-6)", resum_err) +
                                    " at q_cap up to " + std::to_string(cap_used));

    std::uint64_t violations = 0, comparisons = 0, contribution_violations = 0;
    double worst = 0.0, worst_contribution = 0.0;
    for (int m : {1, 2}) {
        for (const CoefficientField& f : {constant(1.0, 0.0), trig()}) {
            const Grid g = build_grid(m, 1.0);
            std::vector<double> times;
            for (int i = 1; i <= 64; ++i) times.push_back(2.0 * i / 64.0);
            const WeightBoundReport r = weight_bound_sweep(build_generator(f, g), stats(f, g), 14, times);
            violations += r.violations;
            comparisons += r.comparisons;
            contribution_violations += r.contribution_violations;
            worst = std::max(worst, r.max_ratio);
            worst_contribution = std::max(worst_contribution, r.max_contribution_ratio);
        }
    }
    o.note("2^-q W <= conv_power: " + std::to_string(contribution_violations) + " violations, max ratio " +
           fmt("%.4f", worst_contribution));
    o.require(violations == 0, "W <= conv_power: " + std::to_string(violations) + " violations in " +
                                   std::to_string(comparisons) + " comparisons, max W/conv_power " +
                                   fmt("%.4f", worst));
    return o;
}

// 8
Outcome exact_identities() {
    Outcome o;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> vol(0.5, 2.0), drift(-1.0, 1.0);
    std::normal_distribution<double> normal;
    double lbar = 0.0, taylor = 0.0;
    for (int m = 3; m <= 6; ++m) {
        const Grid g = build_grid(m, 1.0);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> v(g.size()), mu(g.size()), f(g.size());
            for (std::size_t j = 0; j < g.size(); ++j) {
                v[j] = vol(rng);
                mu[j] = drift(rng);
                f[j] = normal(rng);
            }
            const CoefficientField field = make_family({ProfileSpec::tabulated(v), ProfileSpec::tabulated(mu)}, 1.0);
            for (std::size_t x = 0; x < g.size(); ++x) {
                const LbarResidual r = lbar_decomposition_check(field, g, x);
                lbar = std::max(lbar, r.max_residual / r.norm);
            }
            double norm = 0.0;
            for (double fj : f) norm = std::max(norm, std::abs(fj));
            taylor = std::max(taylor, discrete_taylor_check(f, g) / norm);
        }
    }
    o.require(lbar < 1e-12, fmt("lbar decomposition: max relative residual %.3e (< 1e-12)", lbar));
    o.require(taylor < 1e-12, fmt("discrete Taylor: max relative residual %.3e (< 1e-12)", taylor));
    return o;
}

// 9
Outcome trig_inequalities() {
    Outcome o;
    const TrigReport r = trig_inequality_suite(1.0, 10000, 99);
    for (const TrigCheck& c : r.checks) {
        o.require(c.violations == 0, c.name + ": " + std::to_string(c.violations) + " violations in " +
                                         std::to_string(c.samples) + " samples" +
                                         fmt(", max lhs-rhs %.3e", c.worst_excess));
    }
    return o;
}

// 10
Outcome determinism() {
    Outcome o;
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "kconv-acceptance-determinism";
    fs::remove_all(root);
    ExperimentConfig c;
    c.field = preset_field("trig");
    c.m_min = 4;
    c.m_max = 7;
    c.schemes = {Scheme::Semidiscrete, Scheme::Euler};
    c.seed = 17;
    std::ostringstream log;
    c.out_dir = (root / "a").string();
    cmd_converge(c, log);
    c.out_dir = (root / "b").string();
    cmd_converge(c, log);
    for (const char* name : {"converge_t0.json", "converge_t0.csv"}) {
        const std::string a = read_text((root / "a" / name).string());
        const std::string b = read_text((root / "b" / name).string());
        o.require(!a.empty() && a == b, std::string(name) + " byte-identical (" + std::to_string(a.size()) + " bytes)");
    }
    const ConvergenceReport back = report_from_json(nlohmann::json::parse(read_text((root / "a/converge_t0.json").string())));
    o.require(report_to_json(back).dump(2) + "\n" == read_text((root / "a/converge_t0.json").string()),
              "report JSON re-parses and re-serializes identically");
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"oracle equivalence (constant coefficients)", oracle_equivalence},
        {"Markov invariants", markov_invariants},
        {"smooth-coefficient rate", smooth_rate},
        {"Hoelder-coefficient rate", hoelder_rate},
        {"modulus-of-continuity bound", modulus_bound},
        {"explicit Euler rate", euler_rate},
        {"path expansion suite", dyson_suite},
        {"exact discrete identities", exact_identities},
        {"trigonometric inequalities", trig_inequalities},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s  criterion %zu: %s  (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs);
        for (const std::string& line : o.lines) std::printf("        %s\n", line.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
