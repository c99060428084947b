#pragma once

#include "kconv/coefficients.hpp"
#include "kconv/propagator.hpp"
#include "kconv/verify.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace kconv {

/// Named coefficient fields selectable with --family:
///   constant  sigma^2 = 1, mu = 0
///   trig      sigma^2 = 1.5 + 0.5 sin(pi x/L), mu = 0.5 cos(pi x/L)
///   hoelder   sigma^2 = 1 + 0.5 d(x,0)^0.5, mu = 0
///   logmod    sigma^2 = 1 + 0.5 / max(1, -ln(d(x,0)/2L)), mu = 0
FieldSpec preset_field(const std::string& name);
const std::vector<std::string>& preset_names();

ProfileSpec profile_from_json(const nlohmann::json& j);
nlohmann::json profile_to_json(const ProfileSpec& p);

struct ExperimentConfig {
    FieldSpec field = preset_field("trig");
    double half_width = 1.0;
    std::vector<double> times;  // empty: the campaign default 0.25 L^2 / Sigma_0^2
    int m_min = 4;
    int m_max = 7;
    std::vector<Scheme> schemes{Scheme::Semidiscrete};
    std::string out_dir = "kconv-out";
    std::uint64_t seed = 1;
    std::size_t max_dim = kDefaultMaxDim;
    std::vector<std::string> only;
    double tolerance_scale = 1.0;
};

/// Reads a JSON config. Unknown keys are rejected. Keys:
///   field (preset name or {"sigma2": profile, "mu": profile}), L, t (number or list),
///   m_min, m_max, schemes, out, seed, max_dim, only, tolerance_scale.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);

/// Checks ellipticity, the resource guard and the level range; throws ConfigError.
CoefficientField validate(const ExperimentConfig& config);

/// Kernel CSV plus JSON sidecar for every (m, t, scheme). Returns the written paths.
std::vector<std::string> cmd_kernel(const ExperimentConfig& config, std::ostream& log);

/// Convergence report JSON + CSV per t. Returns an exit status: 0, or 3 when a level failed.
int cmd_converge(const ExperimentConfig& config, std::ostream& log);

/// Runs the verification suites, writes verify.json. Returns 0 when every gating check passes, else 1.
int cmd_verify(const ExperimentConfig& config, std::ostream& log);

}  // namespace kconv
