#pragma once

#include <string>

#include <json.hpp>

#include "corrchange/test_runner.hpp"

namespace corrchange::cli {

/// Stable JSON view of a test report. Top-level keys: q_raw, q_std, d,
/// critical_value, p_value, reject, changepoint_k, process, e_hat, config.
nlohmann::ordered_json report_to_json(const TestReport& report);

/// Two-space indented dump with a trailing newline; byte-stable for a
/// fixed report.
std::string report_to_string(const TestReport& report);

}  // namespace corrchange::cli
