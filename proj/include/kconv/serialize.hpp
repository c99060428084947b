#pragma once

#include "kconv/harness.hpp"
#include "kconv/propagator.hpp"

#include <json.hpp>

#include <string>

namespace kconv {

/// "x_index,y_index,value" rows in row-major order, values with 17 significant digits.
std::string kernel_csv(const KernelMatrix& kernel);
/// {m, L, t, scheme, delta_t, n_steps}
nlohmann::json kernel_sidecar(const KernelMatrix& kernel);
/// Inverse of kernel_csv + kernel_sidecar; throws ConfigError on malformed input.
KernelMatrix parse_kernel(const std::string& csv, const nlohmann::json& sidecar);

nlohmann::json report_to_json(const ConvergenceReport& report);
ConvergenceReport report_from_json(const nlohmann::json& j);

/// One row per level: level,h,sup_diff_kernel,sup_diff_derivative,euler_diff,gamma_hat.
/// The pairwise columns hold the (m, m+1) difference on row m; absent values are empty.
std::string report_csv(const ConvergenceReport& report);

/// Writes `text` to `path`, creating parent directories. Throws ConfigError on I/O failure.
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

/// %.17g
std::string format_double(double v);

}  // namespace kconv
