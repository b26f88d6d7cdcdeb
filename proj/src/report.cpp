#include "cnplab/report.hpp"

#include <cstdio>
#include <cstdlib>

#include "cnplab/error.hpp"

namespace cnp {

using nlohmann::json;

const char* to_string(SuiteVerdict v) {
  switch (v) {
    case SuiteVerdict::Pass:
      return "pass";
    case SuiteVerdict::Fail:
      return "fail";
    case SuiteVerdict::Skipped:
      return "skipped";
    default:
      return "error";
  }
}

SuiteVerdict suite_verdict_from(const std::string& s) {
  if (s == "pass") return SuiteVerdict::Pass;
  if (s == "fail") return SuiteVerdict::Fail;
  if (s == "skipped") return SuiteVerdict::Skipped;
  if (s == "error") return SuiteVerdict::Error;
  throw ParseError("report: unknown verdict '" + s + "'");
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_real(const std::string& s) {
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw ParseError("report: bad real '" + s + "'");
  return x;
}

namespace {

json real_map(const std::map<std::string, double>& m) {
  json out = json::object();
  for (const auto& [k, v] : m) out[k] = format_real(v);
  return out;
}

std::map<std::string, double> read_real_map(const json& j) {
  std::map<std::string, double> out;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_string()) throw ParseError("report: residual '" + k + "' must be a string");
    out[k] = parse_real(v.get<std::string>());
  }
  return out;
}

}  // namespace

json to_json(const VerificationReport& r) {
  json suites = json::array();
  for (const auto& s : r.suites) {
    suites.push_back({{"name", s.name},
                      {"verdict", to_string(s.verdict)},
                      {"outcome", s.outcome},
                      {"expected", s.expected},
                      {"residuals", real_map(s.residuals)},
                      {"tolerances", real_map(s.tolerances)},
                      {"message", s.message},
                      {"wall_time", s.wall_time}});
  }
  return {{"schema", kReportSchema},
          {"label", r.label},
          {"provenance", {{"version", r.version}, {"config", r.config}}},
          {"timestamp", r.timestamp},
          {"suites", suites},
          {"overall", r.overall ? "pass" : "fail"}};
}

VerificationReport report_from_json(const json& j) {
  try {
    if (j.at("schema").get<std::string>() != kReportSchema)
      throw ParseError("report: unsupported schema");
    VerificationReport r;
    r.label = j.at("label").get<std::string>();
    r.version = j.at("provenance").at("version").get<std::string>();
    r.config = j.at("provenance").at("config");
    r.timestamp = j.at("timestamp").get<std::string>();
    for (const auto& s : j.at("suites")) {
      SuiteEntry e;
      e.name = s.at("name").get<std::string>();
      e.verdict = suite_verdict_from(s.at("verdict").get<std::string>());
      e.outcome = s.at("outcome").get<std::string>();
      e.expected = s.at("expected").get<std::string>();
      e.residuals = read_real_map(s.at("residuals"));
      e.tolerances = read_real_map(s.at("tolerances"));
      e.message = s.at("message").get<std::string>();
      e.wall_time = s.at("wall_time").get<double>();
      r.suites.push_back(std::move(e));
    }
    const auto overall = j.at("overall").get<std::string>();
    if (overall != "pass" && overall != "fail") throw ParseError("report: bad overall verdict");
    r.overall = overall == "pass";
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
}

VerificationReport without_timing(VerificationReport r) {
  r.timestamp.clear();
  for (auto& s : r.suites) s.wall_time = 0.0;
  return r;
}

}  // namespace cnp
