#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace kconv {

struct CheckResult {
    std::string suite;
    std::string name;
    double value = 0.0;      // measured defect, violation count, ...
    double tolerance = 0.0;  // already multiplied by the tolerance scale
    bool gating = true;      // informational checks never fail the run
    bool pass = true;
    std::string detail;
};

struct VerifyOptions {
    std::vector<std::string> only;  // empty: every suite
    std::uint64_t seed = 1;
    double tolerance_scale = 1.0;   // 0 tightens every tolerance to zero (fault injection)
};

/// oracle, markov, dyson, identities, trig, generator
const std::vector<std::string>& suite_names();

std::vector<CheckResult> run_verify(const VerifyOptions& options);

bool all_passed(const std::vector<CheckResult>& results);

nlohmann::json verify_json(const std::vector<CheckResult>& results, const VerifyOptions& options);

}  // namespace kconv
