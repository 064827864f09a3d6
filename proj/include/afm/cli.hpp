#pragma once

#include <Eigen/Core>

#include <ostream>
#include <string>

namespace afm::cli {

enum ExitCode : int { ok = 0, usage_error = 1, numerical_failure = 2 };

/// Entry point of the `afm` tool. Results go to `out` (or --output), help text
/// and structured error records to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Reads a series from a single-column CSV (optional header line) or from
/// JSON / JSON lines. "path#field" selects a JSON array field; without a
/// field, "values" then "predictions" is used. JSON nulls read as NaN.
Eigen::VectorXd read_series_file(const std::string& spec);

} // namespace afm::cli
