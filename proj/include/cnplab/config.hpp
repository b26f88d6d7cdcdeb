#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cnplab/coeffs.hpp"
#include "cnplab/tuples.hpp"

namespace cnp {

/// Suites in dependency order.
inline const std::vector<std::string> kSuiteOrder = {
    "coeffs", "contraction", "purity", "dilation", "existence", "charfn", "identities",
    "counterexample"};

/// Where the operator tuple comes from.
struct TupleSource {
  enum class Kind { None, Inline, File, Zero, CompressedShift };
  Kind kind = Kind::None;
  std::size_t h = 0;
  std::size_t d = 0;
  std::vector<Matrix> matrices;
  std::filesystem::path path;
  int shift_degree = 0;  ///< for CompressedShift
};

struct CounterexampleSettings {
  int m = 2;
  std::vector<int> N = {0, 1, 2, 3};
  std::size_t d = 1;
};

struct RunConfig {
  std::string label;
  KernelSpec kernel;
  int N_max = 0;  ///< 0 = derived from the truncation degree
  TupleSource tuple;
  TruncationParams truncation;
  std::vector<std::string> suites;
  std::map<std::string, std::string> expect;
  std::optional<CounterexampleSettings> counterexample;
  std::uint64_t seed = 20240101;
  int points = 5;
  std::string output;
  nlohmann::json source;  ///< the config as read, echoed into reports
};

/// Parses a config document. Relative tuple paths resolve against base_dir.
/// Throws ParseError with a field path on malformed input.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// KernelSpec from a rule name and its parameters.
KernelSpec make_kernel_spec(const std::string& rule, std::size_t d, const nlohmann::json& params);

/// Reads a tuple document {"h", "d", "matrices"}; entries are [re, im] pairs.
OperatorTuple parse_tuple(const nlohmann::json& j);

/// Materializes the tuple source (files are read, shifts are built).
OperatorTuple load_tuple(const TupleSource& src, const KernelSpec& kernel);

/// The coefficient degree a run needs.
int effective_n_max(const RunConfig& cfg);

}  // namespace cnp
