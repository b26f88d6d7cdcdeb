#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace cnp {

inline constexpr const char* kReportSchema = "cnplab.report/1";
inline constexpr const char* kVersion = "0.1.0";

enum class SuiteVerdict { Pass, Fail, Skipped, Error };

struct SuiteEntry {
  std::string name;
  SuiteVerdict verdict = SuiteVerdict::Skipped;
  std::string outcome;   ///< what the suite observed, e.g. "admits"
  std::string expected;  ///< the outcome that counts as a pass
  std::map<std::string, double> residuals;
  std::map<std::string, double> tolerances;
  std::string message;
  double wall_time = 0.0;  ///< seconds

  friend bool operator==(const SuiteEntry&, const SuiteEntry&) = default;
};

struct VerificationReport {
  std::string label;
  std::string version = kVersion;
  nlohmann::json config;
  std::string timestamp;
  std::vector<SuiteEntry> suites;
  bool overall = false;

  friend bool operator==(const VerificationReport&, const VerificationReport&) = default;
};

const char* to_string(SuiteVerdict v);
SuiteVerdict suite_verdict_from(const std::string& s);

/// Shortest decimal form that reads back to the same double (17 digits).
std::string format_real(double x);
double parse_real(const std::string& s);

nlohmann::json to_json(const VerificationReport& r);
/// Throws ParseError on schema violations.
VerificationReport report_from_json(const nlohmann::json& j);

/// The report with timing fields cleared, for run-to-run comparisons.
VerificationReport without_timing(VerificationReport r);

}  // namespace cnp
