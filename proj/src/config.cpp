#include "cnplab/config.hpp"

#include <algorithm>
#include <fstream>

#include "cnplab/error.hpp"

namespace cnp {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

template <class T>
T get_as(const json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    fail(where, e.what());
  }
}

template <class T>
T field_or(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return get_as<T>(obj.at(key), where + "." + key);
}

Matrix parse_matrix(const json& j, std::size_t h, const std::string& where) {
  if (!j.is_array() || j.size() != h) fail(where, "expected " + std::to_string(h) + " rows");
  const auto n = static_cast<Index>(h);
  Matrix m(n, n);
  for (std::size_t r = 0; r < h; ++r) {
    const json& row = j[r];
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (!row.is_array() || row.size() != h) fail(rw, "expected " + std::to_string(h) + " entries");
    for (std::size_t c = 0; c < h; ++c) {
      const json& e = row[c];
      const std::string ew = rw + "[" + std::to_string(c) + "]";
      if (e.is_number()) {
        m(static_cast<Index>(r), static_cast<Index>(c)) = get_as<double>(e, ew);
      } else if (e.is_array() && e.size() == 2) {
        m(static_cast<Index>(r), static_cast<Index>(c)) = {get_as<double>(e[0], ew),
                                                           get_as<double>(e[1], ew)};
      } else {
        fail(ew, "entry must be [re, im]");
      }
    }
  }
  return m;
}

std::vector<Matrix> parse_matrices(const json& j, std::size_t h, std::size_t d,
                                   const std::string& where) {
  if (!j.is_array() || j.size() != d) fail(where, "expected " + std::to_string(d) + " matrices");
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < d; ++i)
    out.push_back(parse_matrix(j[i], h, where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::string> parse_suites(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "all") fail("suites", "expected \"all\" or a list");
    return kSuiteOrder;
  }
  if (!j.is_array() || j.empty()) fail("suites", "must be a non-empty list");
  std::vector<std::string> out;
  for (const auto& s : j) {
    const auto name = get_as<std::string>(s, "suites");
    if (std::find(kSuiteOrder.begin(), kSuiteOrder.end(), name) == kSuiteOrder.end())
      fail("suites", "unknown suite '" + name + "'");
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  }
  return out;
}

}  // namespace

KernelSpec make_kernel_spec(const std::string& rule, std::size_t d, const json& params) {
  KernelSpec spec;
  spec.d = d;
  spec.label = rule;
  const json p = params.is_null() ? json::object() : params;
  if (rule == "szego") {
    spec.rule = Szego{};
  } else if (rule == "drury_arveson") {
    spec.rule = DruryArveson{};
  } else if (rule == "bergman") {
    spec.rule = Bergman{field_or<int>(p, "m", 2, "kernel.params")};
  } else if (rule == "dirichlet_t") {
    spec.rule = DirichletT{field_or<double>(p, "t", 1.0, "kernel.params")};
  } else if (rule == "custom") {
    if (!p.contains("coefficients")) fail("kernel.params", "custom rule needs 'coefficients'");
    spec.rule = Custom{get_as<std::vector<double>>(p.at("coefficients"), "kernel.params")};
  } else {
    fail("kernel.rule", "unknown rule '" + rule + "'");
  }
  return spec;
}

OperatorTuple parse_tuple(const json& j) {
  if (!j.is_object()) fail("tuple", "expected an object");
  const auto h = field_or<std::size_t>(j, "h", 0, "tuple");
  const auto d = field_or<std::size_t>(j, "d", 0, "tuple");
  if (h == 0 || d == 0) fail("tuple", "'h' and 'd' must be positive");
  if (!j.contains("matrices")) fail("tuple", "missing 'matrices'");
  return OperatorTuple(parse_matrices(j.at("matrices"), h, d, "tuple.matrices"));
}

RunConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) fail("config", "expected a JSON object");
  RunConfig cfg;
  cfg.source = j;
  cfg.label = field_or<std::string>(j, "label", "run", "config");

  if (!j.contains("kernel")) fail("config", "missing 'kernel'");
  const json& k = j.at("kernel");
  const auto rule = field_or<std::string>(k, "rule", "", "kernel");
  const auto d = field_or<std::size_t>(k, "d", 1, "kernel");
  if (d == 0) fail("kernel.d", "must be positive");
  cfg.kernel = make_kernel_spec(rule, d, k.value("params", json::object()));
  cfg.kernel.label = field_or<std::string>(k, "label", rule, "kernel");
  cfg.N_max = field_or<int>(k, "N_max", 0, "kernel");

  if (j.contains("truncation")) {
    const json& t = j.at("truncation");
    cfg.truncation.N = field_or<int>(t, "N", cfg.truncation.N, "truncation");
    cfg.truncation.tol = field_or<double>(t, "tol", cfg.truncation.tol, "truncation");
    cfg.truncation.tail_window =
        field_or<int>(t, "tail_window", cfg.truncation.tail_window, "truncation");
  }
  try {
    cfg.truncation.validate();
  } catch (const Error& e) {
    fail("truncation", e.what());
  }

  if (j.contains("tuple")) {
    const json& t = j.at("tuple");
    const auto kind = field_or<std::string>(t, "kind", "inline", "tuple");
    TupleSource& src = cfg.tuple;
    if (kind == "inline") {
      src.kind = TupleSource::Kind::Inline;
      const OperatorTuple tuple = parse_tuple(t);
      src.h = tuple.h();
      src.d = tuple.d();
      src.matrices = tuple.matrices();
    } else if (kind == "file") {
      src.kind = TupleSource::Kind::File;
      const auto path = field_or<std::string>(t, "path", "", "tuple");
      if (path.empty()) fail("tuple.path", "required for kind 'file'");
      src.path = std::filesystem::path(path).is_absolute() ? std::filesystem::path(path)
                                                           : base_dir / path;
    } else if (kind == "zero") {
      src.kind = TupleSource::Kind::Zero;
      src.h = field_or<std::size_t>(t, "h", 1, "tuple");
      src.d = field_or<std::size_t>(t, "d", d, "tuple");
      if (src.h == 0) fail("tuple.h", "must be positive");
    } else if (kind == "compressed_shift") {
      src.kind = TupleSource::Kind::CompressedShift;
      src.shift_degree = field_or<int>(t, "N", 1, "tuple");
      src.d = d;
      if (src.shift_degree < 0) fail("tuple.N", "must be >= 0");
    } else {
      fail("tuple.kind", "unknown kind '" + kind + "'");
    }
  }

  cfg.suites = j.contains("suites") ? parse_suites(j.at("suites")) : kSuiteOrder;
  if (j.contains("expect")) {
    for (const auto& [name, value] : j.at("expect").items()) {
      if (std::find(kSuiteOrder.begin(), kSuiteOrder.end(), name) == kSuiteOrder.end())
        fail("expect", "unknown suite '" + name + "'");
      cfg.expect[name] = get_as<std::string>(value, "expect." + name);
    }
  }
  if (j.contains("counterexample")) {
    const json& c = j.at("counterexample");
    CounterexampleSettings s;
    s.m = field_or<int>(c, "m", s.m, "counterexample");
    if (c.contains("N")) {
      const json& n = c.at("N");
      s.N = n.is_array() ? get_as<std::vector<int>>(n, "counterexample.N")
                         : std::vector<int>{get_as<int>(n, "counterexample.N")};
    }
    s.d = field_or<std::size_t>(c, "d", s.d, "counterexample");
    cfg.counterexample = s;
  }
  cfg.seed = field_or<std::uint64_t>(j, "seed", cfg.seed, "config");
  cfg.points = field_or<int>(j, "points", cfg.points, "config");
  if (cfg.points < 2) fail("points", "at least 2 sample points are required");
  cfg.output = field_or<std::string>(j, "output", "", "config");

  const bool needs_tuple = std::any_of(cfg.suites.begin(), cfg.suites.end(), [](const auto& s) {
    return s != "coeffs" && s != "counterexample";
  });
  if (needs_tuple && cfg.tuple.kind == TupleSource::Kind::None)
    fail("tuple", "required by the selected suites");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

OperatorTuple load_tuple(const TupleSource& src, const KernelSpec& kernel) {
  switch (src.kind) {
    case TupleSource::Kind::Inline:
      return OperatorTuple(src.matrices);
    case TupleSource::Kind::File: {
      std::ifstream in(src.path);
      if (!in) throw ParseError("cannot open tuple file '" + src.path.string() + "'");
      try {
        return parse_tuple(json::parse(in));
      } catch (const json::parse_error& e) {
        throw ParseError(src.path.string() + ": " + e.what());
      }
    }
    case TupleSource::Kind::Zero:
      return OperatorTuple::zero(src.d, src.h);
    case TupleSource::Kind::CompressedShift: {
      const CoeffTable table = generate_coeffs(kernel, src.shift_degree + 1);
      return shift_matrices(table, src.shift_degree, kernel.d).tuple;
    }
    default:
      throw ParseError("tuple: no tuple configured");
  }
}

int effective_n_max(const RunConfig& cfg) {
  if (cfg.N_max > 0) return cfg.N_max;
  int n = std::max(2 * cfg.truncation.N + 2, 200);
  if (const auto* c = std::get_if<Custom>(&cfg.kernel.rule))
    n = static_cast<int>(c->coefficients.size()) - 1;
  return n;
}

}  // namespace cnp
