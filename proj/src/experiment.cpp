#include "kconv/experiment.hpp"

#include "kconv/errors.hpp"
#include "kconv/harness.hpp"
#include "kconv/serialize.hpp"
#include "kconv/spectral.hpp"

#include <cmath>
#include <filesystem>
#include <ostream>
#include <set>

namespace kconv {

using nlohmann::json;

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"constant", "trig", "hoelder", "logmod"};
    return names;
}

FieldSpec preset_field(const std::string& name) {
    if (name == "constant") return {ProfileSpec::constant(1.0), ProfileSpec::constant(0.0)};
    if (name == "trig") return {ProfileSpec::trig(1.5, {0.0}, {0.5}), ProfileSpec::trig(0.0, {0.5}, {})};
    if (name == "hoelder") return {ProfileSpec::hoelder_bump(1.0, 0.5, 0.5), ProfileSpec::constant(0.0)};
    if (name == "logmod") return {ProfileSpec::log_modulus(1.0, 0.5), ProfileSpec::constant(0.0)};
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown field family '" + name + "' (known: " + known + ")");
}

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key())) throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
}

template <class T>
T read(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

std::string time_tag(std::size_t index) { return "t" + std::to_string(index); }

}  // namespace

ProfileSpec profile_from_json(const json& j) {
    if (j.is_number()) return ProfileSpec::constant(j.get<double>());
    reject_unknown_keys(j, {"family", "value", "mean", "cos", "sin", "a", "b", "alpha", "k", "samples"}, "profile");
    ProfileSpec p;
    p.family = parse_family(read<std::string>(j, "family", "constant"));
    p.value = read(j, "value", 0.0);
    p.mean = read(j, "mean", 0.0);
    p.cos_coeffs = read(j, "cos", std::vector<double>{});
    p.sin_coeffs = read(j, "sin", std::vector<double>{});
    p.a = read(j, "a", 1.0);
    p.b = read(j, "b", 0.0);
    p.alpha = read(j, "alpha", 1.0);
    p.k = read(j, "k", 0);
    p.samples = read(j, "samples", std::vector<double>{});
    return p;
}

json profile_to_json(const ProfileSpec& p) {
    json j{{"family", family_name(p.family)}};
    switch (p.family) {
    case ProfileFamily::Constant:
        j["value"] = p.value;
        break;
    case ProfileFamily::Trig:
        j["mean"] = p.mean;
        j["cos"] = p.cos_coeffs;
        j["sin"] = p.sin_coeffs;
        break;
    case ProfileFamily::HoelderBump:
        j["a"] = p.a;
        j["b"] = p.b;
        j["alpha"] = p.alpha;
        j["k"] = p.k;
        break;
    case ProfileFamily::LogModulus:
        j["a"] = p.a;
        j["b"] = p.b;
        break;
    case ProfileFamily::Tabulated:
        j["samples"] = p.samples;
        break;
    }
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    reject_unknown_keys(j,
                        {"field", "L", "t", "m_min", "m_max", "schemes", "out", "seed", "max_dim", "only",
                         "tolerance_scale"},
                        "config");
    ExperimentConfig c;
    if (j.contains("field")) {
        const json& f = j.at("field");
        if (f.is_string()) {
            c.field = preset_field(f.get<std::string>());
        } else {
            reject_unknown_keys(f, {"sigma2", "mu"}, "field");
            if (!f.contains("sigma2")) throw ConfigError("field: missing 'sigma2'");
            c.field.vol_squared = profile_from_json(f.at("sigma2"));
            c.field.drift = f.contains("mu") ? profile_from_json(f.at("mu")) : ProfileSpec::constant(0.0);
        }
    }
    c.half_width = read(j, "L", c.half_width);
    if (j.contains("t")) {
        c.times = j.at("t").is_array() ? read(j, "t", std::vector<double>{}) : std::vector<double>{read(j, "t", 0.0)};
    }
    c.m_min = read(j, "m_min", c.m_min);
    c.m_max = read(j, "m_max", c.m_max);
    if (j.contains("schemes")) {
        c.schemes.clear();
        for (const auto& s : read(j, "schemes", std::vector<std::string>{})) c.schemes.push_back(parse_scheme(s));
    }
    c.out_dir = read(j, "out", c.out_dir);
    c.seed = read(j, "seed", c.seed);
    c.max_dim = read(j, "max_dim", c.max_dim);
    c.only = read(j, "only", c.only);
    c.tolerance_scale = read(j, "tolerance_scale", c.tolerance_scale);
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    std::vector<std::string> schemes;
    for (Scheme s : c.schemes) schemes.push_back(scheme_name(s));
    return json{{"field", {{"sigma2", profile_to_json(c.field.vol_squared)}, {"mu", profile_to_json(c.field.drift)}}},
                {"L", c.half_width},
                {"t", c.times},
                {"m_min", c.m_min},
                {"m_max", c.m_max},
                {"schemes", schemes},
                {"out", c.out_dir},
                {"seed", c.seed},
                {"max_dim", c.max_dim},
                {"only", c.only},
                {"tolerance_scale", c.tolerance_scale}};
}

CoefficientField validate(const ExperimentConfig& c) {
    if (!(c.half_width > 0.0) || !std::isfinite(c.half_width)) throw ConfigError("L must be a positive number");
    if (c.m_min < 0 || c.m_max < c.m_min) {
        throw ConfigError("level range [" + std::to_string(c.m_min) + ", " + std::to_string(c.m_max) + "] is empty");
    }
    build_grid(c.m_max, c.half_width, c.max_dim);
    for (double t : c.times) {
        if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("t must be a nonnegative number");
    }
    if (c.schemes.empty()) throw ConfigError("at least one scheme is required");
    if (c.tolerance_scale < 0.0) throw ConfigError("tolerance_scale must be nonnegative");
    return make_family(c.field, c.half_width);
}

std::vector<std::string> cmd_kernel(const ExperimentConfig& config, std::ostream& log) {
    const CoefficientField field = validate(config);
    const std::vector<double> times = config.times.empty() ? std::vector<double>{default_time(field, config.m_max)}
                                                           : config.times;
    const bool constant = field.constant();
    const double sigma = std::sqrt(field.vol_squared(0.0));
    const double mu = field.drift(0.0);
    std::vector<std::string> written;
    for (int m = config.m_min; m <= config.m_max; ++m) {
        const Grid grid = build_grid(m, config.half_width, config.max_dim);
        const PeriodicTridiagonalOperator op = build_generator(field, grid);
        for (std::size_t ti = 0; ti < times.size(); ++ti) {
            const double t = times[ti];
            for (Scheme scheme : config.schemes) {
                KernelMatrix k;
                switch (scheme) {
                case Scheme::Semidiscrete:
                    k = expm_kernel(op, t);
                    break;
                case Scheme::Euler:
                    k = euler_kernel(op, t, choose_euler_step(op, t));
                    break;
                default:
                    if (!constant) {
                        throw ConfigError("scheme " + scheme_name(scheme) + " needs constant coefficients");
                    }
                    if (scheme == Scheme::Spectral) {
                        k = fourier_kernel(sigma, mu, grid, t).kernel;
                    } else if (scheme == Scheme::SpectralEuler) {
                        k = fourier_kernel_discrete(sigma, mu, grid, t, choose_euler_step(op, t)).kernel;
                    } else {
                        k = continuum_kernel(sigma, mu, grid, t).kernel;
                    }
                }
                const std::string stem = (std::filesystem::path(config.out_dir) /
                                          ("kernel_" + scheme_name(scheme) + "_m" + std::to_string(m) + "_" +
                                           time_tag(ti)))
                                             .string();
                write_text(stem + ".csv", kernel_csv(k));
                write_text(stem + ".json", kernel_sidecar(k).dump(2) + "\n");
                written.push_back(stem + ".csv");
                written.push_back(stem + ".json");
                log << "wrote " << stem << ".{csv,json}\n";
            }
        }
    }
    return written;
}

int cmd_converge(const ExperimentConfig& config, std::ostream& log) {
    const CoefficientField field = validate(config);
    if (config.m_max - config.m_min + 1 < 4) {
        throw ConfigError("rate fit needs at least 3 pairwise differences, i.e. 4 levels; got [" +
                          std::to_string(config.m_min) + ", " + std::to_string(config.m_max) + "]");
    }
    CampaignOptions options;
    options.m_min = config.m_min;
    options.m_max = config.m_max;
    options.max_dim = config.max_dim;
    for (Scheme s : config.schemes) {
        if (s == Scheme::Euler) options.euler = true;
        if (s == Scheme::Spectral) options.spectral = true;
        if (s == Scheme::SpectralEuler || s == Scheme::Continuum) {
            throw ConfigError("converge supports the schemes semidiscrete, euler and spectral-oracle");
        }
    }
    const std::vector<double> times = config.times.empty() ? std::vector<double>{-1.0} : config.times;
    int status = 0;
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        options.time = times[ti];
        const ConvergenceReport report = run_campaign(field, options);
        const std::string stem =
            (std::filesystem::path(config.out_dir) / ("converge_" + time_tag(ti))).string();
        write_text(stem + ".json", report_to_json(report).dump(2) + "\n");
        write_text(stem + ".csv", report_csv(report));
        log << "t = " << format_double(report.time) << ": ";
        if (report.kernel_rate) {
            log << "gamma_hat = " << format_double(report.kernel_rate->gamma_hat);
        } else {
            log << "no rate fit";
        }
        if (report.theoretical_gamma) log << " (theory " << *report.theoretical_gamma << ")";
        if (report.rho_ratio_spread) log << ", diff/rho spread " << *report.rho_ratio_spread;
        log << "\nwrote " << stem << ".{json,csv}\n";
        for (const LevelResult& l : report.levels) {
            if (l.status != "ok") {
                log << "level " << l.level << " failed: " << l.status << "\n";
                status = 3;
            }
        }
    }
    return status;
}

int cmd_verify(const ExperimentConfig& config, std::ostream& log) {
    VerifyOptions options;
    options.only = config.only;
    options.seed = config.seed;
    options.tolerance_scale = config.tolerance_scale;
    const std::vector<CheckResult> results = run_verify(options);
    for (const CheckResult& r : results) {
        const char* tag = r.pass ? "PASS" : (r.gating ? "FAIL" : "INFO");
        log << tag << "  " << r.suite << "/" << r.name << "  value=" << format_double(r.value)
            << " tol=" << format_double(r.tolerance);
        if (!r.detail.empty()) log << "  " << r.detail;
        log << "\n";
    }
    const std::string path = (std::filesystem::path(config.out_dir) / "verify.json").string();
    write_text(path, verify_json(results, options).dump(2) + "\n");
    log << "wrote " << path << "\n";
    return all_passed(results) ? 0 : 1;
}

}  // namespace kconv
