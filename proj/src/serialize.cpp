#include "kconv/serialize.hpp"

#include "kconv/errors.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace kconv {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string kernel_csv(const KernelMatrix& kernel) {
    std::string out = "x_index,y_index,value\n";
    for (Eigen::Index i = 0; i < kernel.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < kernel.values.cols(); ++j) {
            out += std::to_string(i) + "," + std::to_string(j) + "," + format_double(kernel.values(i, j)) + "\n";
        }
    }
    return out;
}

json kernel_sidecar(const KernelMatrix& kernel) {
    return json{{"m", kernel.level},
                {"L", kernel.half_width},
                {"t", kernel.time},
                {"scheme", scheme_name(kernel.scheme)},
                {"delta_t", kernel.delta_t},
                {"n_steps", kernel.n_steps},
                {"N", kernel.size()}};
}

namespace {

double parse_double(const std::string& field, std::size_t line) {
    // strtod, unlike stod, accepts subnormal values
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (field.empty() || end != field.c_str() + field.size()) {
        throw ConfigError("kernel csv line " + std::to_string(line) + ": bad number '" + field + "'");
    }
    return v;
}

template <class T>
T get_field(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return get_field<double>(j, key);
}

json fit_json(const std::optional<RateFit>& fit) {
    if (!fit) return nullptr;
    return json{{"gamma_hat", fit->gamma_hat}, {"residual", fit->residual}};
}

std::optional<RateFit> fit_from(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    const json& f = j.at(key);
    return RateFit{get_field<double>(f, "gamma_hat"), get_field<double>(f, "residual")};
}

std::string csv_cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

KernelMatrix parse_kernel(const std::string& csv, const json& sidecar) {
    KernelMatrix k;
    k.level = get_field<int>(sidecar, "m");
    k.half_width = get_field<double>(sidecar, "L");
    k.time = get_field<double>(sidecar, "t");
    k.scheme = parse_scheme(get_field<std::string>(sidecar, "scheme"));
    k.delta_t = get_field<double>(sidecar, "delta_t");
    k.n_steps = get_field<long long>(sidecar, "n_steps");
    if (k.level < 0 || k.level > 30) throw ConfigError("kernel sidecar: level out of range");
    const auto n = static_cast<Eigen::Index>(std::size_t{2} << k.level);
    k.values = DenseMatrix::Zero(n, n);

    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line != "x_index,y_index,value") throw ConfigError("kernel csv: bad header");
    std::size_t count = 0;
    for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            throw ConfigError("kernel csv line " + std::to_string(lineno) + ": expected 3 fields");
        }
        long long i = 0, j = 0;
        const auto ri = std::from_chars(line.data(), line.data() + c1, i);
        const auto rj = std::from_chars(line.data() + c1 + 1, line.data() + c2, j);
        if (ri.ec != std::errc() || rj.ec != std::errc() || i < 0 || j < 0 || i >= n || j >= n) {
            throw ConfigError("kernel csv line " + std::to_string(lineno) + ": bad index");
        }
        k.values(i, j) = parse_double(line.substr(c2 + 1), lineno);
        ++count;
    }
    if (count != static_cast<std::size_t>(n * n)) {
        throw ConfigError("kernel csv: expected " + std::to_string(n * n) + " rows, got " + std::to_string(count));
    }
    return k;
}

json report_to_json(const ConvergenceReport& r) {
    json levels = json::array();
    for (const LevelResult& l : r.levels) {
        levels.push_back(json{{"level", l.level},
                              {"h", l.h},
                              {"status", l.status},
                              {"kernel_norm", l.kernel_norm},
                              {"euler_diff", optional_number(l.euler_diff)},
                              {"euler_derivative_diff", optional_number(l.euler_derivative_diff)},
                              {"spectral_diff", optional_number(l.spectral_diff)},
                              {"delta_t", l.delta_t},
                              {"n_steps", l.n_steps}});
    }
    json pairs = json::array();
    for (const PairDiff& p : r.pairs) {
        pairs.push_back(json{{"coarse", p.coarse},
                             {"fine", p.fine},
                             {"h", p.h},
                             {"kernel", p.kernel},
                             {"derivative", p.derivative},
                             {"kernel_over_rho", optional_number(p.kernel_over_rho)},
                             {"derivative_over_rho", optional_number(p.derivative_over_rho)}});
    }
    return json{{"field", r.field},
                {"L", r.half_width},
                {"t", r.time},
                {"schemes", r.schemes},
                {"levels", levels},
                {"pairs", pairs},
                {"kernel_rate", fit_json(r.kernel_rate)},
                {"derivative_rate", fit_json(r.derivative_rate)},
                {"euler_rate", fit_json(r.euler_rate)},
                {"euler_derivative_rate", fit_json(r.euler_derivative_rate)},
                {"theoretical_gamma", optional_number(r.theoretical_gamma)},
                {"modulus", r.modulus},
                {"rho_ratio_spread", optional_number(r.rho_ratio_spread)},
                {"notes", r.notes}};
}

ConvergenceReport report_from_json(const json& j) {
    ConvergenceReport r;
    r.field = get_field<std::string>(j, "field");
    r.half_width = get_field<double>(j, "L");
    r.time = get_field<double>(j, "t");
    r.schemes = get_field<std::vector<std::string>>(j, "schemes");
    for (const json& l : get_field<json>(j, "levels")) {
        LevelResult level;
        level.level = get_field<int>(l, "level");
        level.h = get_field<double>(l, "h");
        level.status = get_field<std::string>(l, "status");
        level.kernel_norm = get_field<double>(l, "kernel_norm");
        level.euler_diff = read_optional(l, "euler_diff");
        level.euler_derivative_diff = read_optional(l, "euler_derivative_diff");
        level.spectral_diff = read_optional(l, "spectral_diff");
        level.delta_t = get_field<double>(l, "delta_t");
        level.n_steps = get_field<long long>(l, "n_steps");
        r.levels.push_back(level);
    }
    for (const json& p : get_field<json>(j, "pairs")) {
        PairDiff pair;
        pair.coarse = get_field<int>(p, "coarse");
        pair.fine = get_field<int>(p, "fine");
        pair.h = get_field<double>(p, "h");
        pair.kernel = get_field<double>(p, "kernel");
        pair.derivative = get_field<double>(p, "derivative");
        pair.kernel_over_rho = read_optional(p, "kernel_over_rho");
        pair.derivative_over_rho = read_optional(p, "derivative_over_rho");
        r.pairs.push_back(pair);
    }
    r.kernel_rate = fit_from(j, "kernel_rate");
    r.derivative_rate = fit_from(j, "derivative_rate");
    r.euler_rate = fit_from(j, "euler_rate");
    r.euler_derivative_rate = fit_from(j, "euler_derivative_rate");
    r.theoretical_gamma = read_optional(j, "theoretical_gamma");
    r.modulus = get_field<bool>(j, "modulus");
    r.rho_ratio_spread = read_optional(j, "rho_ratio_spread");
    r.notes = get_field<std::vector<std::string>>(j, "notes");
    return r;
}

std::string report_csv(const ConvergenceReport& r) {
    std::string out = "level,h,sup_diff_kernel,sup_diff_derivative,euler_diff,gamma_hat\n";
    const std::optional<double> gamma =
        r.kernel_rate ? std::optional<double>(r.kernel_rate->gamma_hat) : std::nullopt;
    for (const LevelResult& l : r.levels) {
        std::optional<double> kd, dd;
        for (const PairDiff& p : r.pairs) {
            if (p.coarse == l.level) {
                kd = p.kernel;
                dd = p.derivative;
            }
        }
        out += std::to_string(l.level) + "," + format_double(l.h) + "," + csv_cell(kd) + "," + csv_cell(dd) + "," +
               csv_cell(l.euler_diff) + "," + csv_cell(gamma) + "\n";
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    const std::filesystem::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
    if (ec) throw ConfigError("cannot create directory " + p.parent_path().string() + ": " + ec.message());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot open " + path + " for writing");
    out << text;
    if (!out) throw ConfigError("write to " + path + " failed");
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace kconv
