// kconv: periodic diffusion kernels, convergence campaigns and verification suites.

#include "kconv/errors.hpp"
#include "kconv/experiment.hpp"
#include "kconv/serialize.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

struct Overrides {
    std::string config;
    std::optional<std::string> out;
    std::optional<int> m_min;
    std::optional<int> m_max;
    std::vector<double> times;
    std::optional<std::string> family;
    std::vector<std::string> schemes;
    std::vector<std::string> only;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> max_dim;
    std::optional<double> tolerance_scale;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON experiment config");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--m-min", o.m_min, "coarsest level");
    cmd->add_option("--m-max", o.m_max, "finest level");
    cmd->add_option("--t", o.times, "time(s), comma separated")->delimiter(',');
    cmd->add_option("--family", o.family, "preset field: constant, trig, hoelder, logmod");
    cmd->add_option("--schemes", o.schemes, "semidiscrete, euler, spectral-oracle, spectral-euler, continuum")
        ->delimiter(',');
    cmd->add_option("--seed", o.seed, "seed for randomized suites");
    cmd->add_option("--max-dim", o.max_dim, "largest grid dimension accepted (default 2048)");
}

kconv::ExperimentConfig resolve(const Overrides& o) {
    kconv::ExperimentConfig c;
    if (!o.config.empty()) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(kconv::read_text(o.config));
        } catch (const nlohmann::json::exception& e) {
            throw kconv::ConfigError("config " + o.config + ": " + e.what());
        }
        c = kconv::config_from_json(j);
    }
    if (o.out) c.out_dir = *o.out;
    if (o.m_min) c.m_min = *o.m_min;
    if (o.m_max) c.m_max = *o.m_max;
    if (!o.times.empty()) c.times = o.times;
    if (o.family) c.field = kconv::preset_field(*o.family);
    if (!o.schemes.empty()) {
        c.schemes.clear();
        for (const auto& s : o.schemes) c.schemes.push_back(kconv::parse_scheme(s));
    }
    if (!o.only.empty()) c.only = o.only;
    if (o.seed) c.seed = *o.seed;
    if (o.max_dim) c.max_dim = *o.max_dim;
    if (o.tolerance_scale) c.tolerance_scale = *o.tolerance_scale;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Periodic diffusion kernels by semidiscrete and explicit Euler schemes"};
    app.require_subcommand(1);
    Overrides o;

    auto* kernel = app.add_subcommand("kernel", "write kernel CSV and JSON sidecars");
    auto* converge = app.add_subcommand("converge", "run a multi-level convergence campaign");
    auto* verify = app.add_subcommand("verify", "run the verification suites");
    for (auto* cmd : {kernel, converge, verify}) add_common(cmd, o);
    verify->add_option("--only", o.only, "suites to run: oracle, markov, dyson, identities, trig, generator")
        ->delimiter(',');
    verify->add_option("--tolerance-scale", o.tolerance_scale, "multiply every tolerance (0 = fault injection)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const kconv::ExperimentConfig config = resolve(o);
        if (kernel->parsed()) {
            kconv::cmd_kernel(config, std::cout);
            return 0;
        }
        if (converge->parsed()) return kconv::cmd_converge(config, std::cout);
        return kconv::cmd_verify(config, std::cout);
    } catch (const kconv::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == kconv::ErrorKind::Config ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
