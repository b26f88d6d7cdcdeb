#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "cnplab/error.hpp"
#include "cnplab/run.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitError = 2;

// --out, then the config's output field, then $CNPLAB_OUTPUT_DIR, else stdout.
std::optional<std::filesystem::path> report_path(const std::string& out,
                                                 const cnp::RunConfig& cfg) {
  if (!out.empty()) return out;
  if (!cfg.output.empty()) return cfg.output;
  if (const char* dir = std::getenv("CNPLAB_OUTPUT_DIR"); dir && *dir)
    return std::filesystem::path(dir) / (cfg.label + "-report.json");
  return std::nullopt;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw cnp::Error("cannot write '" + out + "'");
  f << text;
}

int cmd_run(const std::string& config_path, const std::optional<double>& tol,
            const std::optional<std::uint64_t>& seed, const std::string& out) {
  cnp::RunConfig cfg = cnp::load_config(config_path);
  if (tol) {
    cfg.truncation.tol = *tol;
    cfg.truncation.validate();
    cfg.source["truncation"]["tol"] = *tol;
  }
  if (seed) {
    cfg.seed = *seed;
    cfg.source["seed"] = *seed;
  }
  const cnp::VerificationReport rep = cnp::run(cfg);

  const std::string body = cnp::to_json(rep).dump(2) + "\n";
  if (const auto path = report_path(out, cfg)) {
    if (path->has_parent_path()) std::filesystem::create_directories(path->parent_path());
    std::ofstream f(*path);
    if (!f) throw cnp::Error("cannot write report '" + path->string() + "'");
    f << body;
    std::cerr << "report: " << path->string() << "\n";
  } else {
    std::cout << body;
  }

  bool errored = false;
  for (const auto& s : rep.suites) {
    std::cerr << s.name << ": " << cnp::to_string(s.verdict);
    if (!s.outcome.empty()) std::cerr << " (" << s.outcome << ")";
    if (!s.message.empty()) std::cerr << " - " << s.message;
    std::cerr << "\n";
    errored = errored || s.verdict == cnp::SuiteVerdict::Error;
  }
  std::cerr << "overall: " << (rep.overall ? "pass" : "fail") << "\n";
  if (errored) return kExitError;
  return rep.overall ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cnplab: unitarily invariant kernels, 1/k-contractions and characteristic functions"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::string out;
  app.add_option("--tol", tol, "numerical tolerance (overrides the config)");
  app.add_option("--seed", seed, "sampling seed (overrides the config)");
  app.add_option("--out", out, "output file");

  auto* run = app.add_subcommand("run", "run verification suites from a JSON config");
  std::string config_path;
  run->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);

  auto* info = app.add_subcommand("kernel-info", "print a_n, b_n and the CNP verdict");
  std::string rule;
  int info_n = 0;
  std::size_t info_d = 1;
  int info_m = 2;
  double info_t = 1.0;
  std::vector<double> info_coeffs;
  info->add_option("--rule", rule, "szego | drury_arveson | bergman | dirichlet_t | custom")
      ->required();
  info->add_option("--N", info_n, "last degree printed")->required();
  info->add_option("--d", info_d, "ball dimension");
  info->add_option("--m", info_m, "bergman exponent");
  info->add_option("--t", info_t, "dirichlet_t parameter");
  info->add_option("--coeffs", info_coeffs, "custom a_0, a_1, ...");

  auto* cex = app.add_subcommand("counterexample", "Bergman quadratic form table");
  int cex_m = 2;
  std::vector<int> cex_n{0, 1, 2, 3};
  std::size_t cex_d = 1;
  cex->add_option("--m", cex_m, "bergman exponent (>= 2)")->required();
  cex->add_option("--N", cex_n, "truncation degrees");
  cex->add_option("--d", cex_d, "ball dimension");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, tol, seed, out);

    if (info->parsed()) {
      nlohmann::json params = {{"m", info_m}, {"t", info_t}};
      if (!info_coeffs.empty()) params["coefficients"] = info_coeffs;
      const cnp::KernelSpec spec = cnp::make_kernel_spec(rule, info_d, params);
      emit(cnp::kernel_info_text(spec, info_n), out);
      return kExitPass;
    }

    cnp::TruncationParams p;
    if (tol) p.tol = *tol;
    p.validate();
    const auto rows = cnp::counterexample_cmd(cex_m, cex_n, cex_d, p);
    emit(cnp::counterexample_text(rows), out);
    for (const auto& r : rows)
      if (r.match_error > 1e-12 || r.closed_form >= 0.0) return kExitFail;
    return kExitPass;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
