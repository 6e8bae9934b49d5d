#include <cmath>
#include <cstdlib>
#include <initializer_list>
#include <set>

#include "clipmu/sweep.hpp"
#include "json.hpp"

namespace clipmu {
namespace {

using nlohmann::json;

std::string child(const std::string& at, const std::string& key) { return at + "/" + key; }

std::string child(const std::string& at, std::size_t index) {
  return at + "/" + std::to_string(index);
}

[[noreturn]] void fail(const std::string& key, const std::string& at, const std::string& why) {
  throw ConfigError(key, at, why);
}

void check_keys(const json& obj, const std::string& at, std::initializer_list<const char*> allowed,
                const std::string& name) {
  if (!obj.is_object()) fail(name, at, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, _] : obj.items()) {
    if (!ok.contains(k)) fail(k, child(at, k), "unknown key");
  }
}

const json& require(const json& obj, const std::string& key, const std::string& at) {
  if (!obj.contains(key)) fail(key, child(at, key), "missing required key");
  return obj.at(key);
}

double number(const json& v, const std::string& key, const std::string& at) {
  if (!v.is_number()) fail(key, at, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(key, at, "expected a finite number");
  return d;
}

double positive(const json& v, const std::string& key, const std::string& at) {
  const double d = number(v, key, at);
  if (!(d > 0.0)) fail(key, at, "must be positive");
  return d;
}

long long integer(const json& v, const std::string& key, const std::string& at) {
  if (!v.is_number_integer()) fail(key, at, "expected an integer");
  return v.get<long long>();
}

bool boolean(const json& v, const std::string& key, const std::string& at) {
  if (!v.is_boolean()) fail(key, at, "expected true or false");
  return v.get<bool>();
}

std::string string(const json& v, const std::string& key, const std::string& at) {
  if (!v.is_string()) fail(key, at, "expected a string");
  return v.get<std::string>();
}

const json& nonempty_array(const json& v, const std::string& key, const std::string& at) {
  if (!v.is_array()) fail(key, at, "expected an array");
  if (v.empty()) fail(key, at, "must not be empty");
  return v;
}

std::vector<double> reals(const json& v, const std::string& key, const std::string& at) {
  std::vector<double> out;
  for (std::size_t i = 0; i < nonempty_array(v, key, at).size(); ++i) {
    out.push_back(number(v[i], key, child(at, i)));
  }
  return out;
}

// A complex entry is a number or a [re, im] pair.
Complex complex_value(const json& v, const std::string& key, const std::string& at) {
  if (v.is_array()) {
    if (v.size() != 2) fail(key, at, "complex values are [re, im]");
    return {number(v[0], key, child(at, 0)), number(v[1], key, child(at, 1))};
  }
  return {number(v, key, at), 0.0};
}

std::vector<Complex> complexes(const json& v, const std::string& key, const std::string& at) {
  std::vector<Complex> out;
  for (std::size_t i = 0; i < nonempty_array(v, key, at).size(); ++i) {
    out.push_back(complex_value(v[i], key, child(at, i)));
  }
  return out;
}

ObservationModel parse_model(const json& m, const std::string& at) {
  if (!m.is_object()) fail("model", at, "expected an object");
  const std::string type = string(require(m, "type", at), "type", child(at, "type"));
  try {
    if (type == "linear") {
      check_keys(m, at, {"type", "c"}, "model");
      return ObservationModel::linear(reals(require(m, "c", at), "c", child(at, "c")));
    }
    if (type == "complex_exponential") {
      check_keys(m, at, {"type", "omega", "alpha"}, "model");
      auto omega = reals(require(m, "omega", at), "omega", child(at, "omega"));
      auto alpha = complexes(require(m, "alpha", at), "alpha", child(at, "alpha"));
      if (alpha.size() != omega.size()) {
        fail("alpha", child(at, "alpha"), "must have the same length as omega");
      }
      return ObservationModel::complex_exponential(std::move(omega), std::move(alpha));
    }
    if (type == "polynomial") {
      check_keys(m, at, {"type", "coeffs"}, "model");
      const std::string cat = child(at, "coeffs");
      const json& rows = nonempty_array(require(m, "coeffs", at), "coeffs", cat);
      std::vector<std::vector<Complex>> coeffs;
      for (std::size_t k = 0; k < rows.size(); ++k) {
        coeffs.push_back(complexes(rows[k], "coeffs", child(cat, k)));
      }
      return ObservationModel::polynomial(std::move(coeffs));
    }
  } catch (const DomainError& e) {
    fail("model", at, e.what());
  }
  fail("type", child(at, "type"),
       "unknown model type '" + type + "' (linear, complex_exponential, polynomial)");
}

ProblemSpec parse_problem(const json& p, const std::string& at) {
  check_keys(p, at, {"sigma_x", "sigma_v", "model", "n_y"}, "problem");
  const double sx = positive(require(p, "sigma_x", at), "sigma_x", child(at, "sigma_x"));
  const double sv = positive(require(p, "sigma_v", at), "sigma_v", child(at, "sigma_v"));
  ObservationModel model = parse_model(require(p, "model", at), child(at, "model"));
  if (p.contains("n_y")) {
    const long long n_y = integer(p.at("n_y"), "n_y", child(at, "n_y"));
    if (n_y < 1 || static_cast<std::size_t>(n_y) != model.output_dim()) {
      fail("n_y", child(at, "n_y"),
           "must equal the model output dimension " + std::to_string(model.output_dim()));
    }
  }
  return ProblemSpec(sx, sv, std::move(model));
}

Family parse_family(const json& v, const std::string& at) {
  const std::string f = string(v, "family", at);
  if (f == "joint") return Family::kJoint;
  if (f == "conditional") return Family::kConditional;
  if (f == "prior") return Family::kPrior;
  fail("family", at, "unknown family '" + f + "' (joint, conditional, prior)");
}

std::vector<SPair> parse_s_pairs(const json& v, const std::string& at) {
  std::vector<SPair> out;
  for (std::size_t i = 0; i < nonempty_array(v, "s_pairs", at).size(); ++i) {
    const std::string el = child(at, i);
    if (!v[i].is_array() || v[i].size() != 2) fail("s_pairs", el, "expected [s1, s2]");
    const long long a = integer(v[i][0], "s_pairs", child(el, 0));
    const long long b = integer(v[i][1], "s_pairs", child(el, 1));
    constexpr long long kLimit = 1'000'000;
    if (std::llabs(a) > kLimit || std::llabs(b) > kLimit) fail("s_pairs", el, "out of range");
    out.emplace_back(static_cast<int>(a), static_cast<int>(b));
  }
  return out;
}

// Entries are [h1, h2] or a single h meaning h1 = h2 = h.
std::vector<std::pair<double, double>> parse_h_grid(const json& v, const std::string& at) {
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < nonempty_array(v, "h_grid", at).size(); ++i) {
    const std::string el = child(at, i);
    if (v[i].is_array()) {
      if (v[i].size() != 2) fail("h_grid", el, "expected [h1, h2] or a number");
      out.emplace_back(number(v[i][0], "h_grid", child(el, 0)),
                       number(v[i][1], "h_grid", child(el, 1)));
    } else {
      const double h = number(v[i], "h_grid", el);
      out.emplace_back(h, h);
    }
  }
  return out;
}

void parse_mc(const json& v, const std::string& at, McConfig& mc) {
  check_keys(v, at, {"seed", "n_samples", "antithetic", "threads"}, "mc");
  if (v.contains("seed")) {
    if (!v.at("seed").is_number_unsigned()) {
      fail("seed", child(at, "seed"), "expected a non-negative integer");
    }
    mc.seed = v.at("seed").get<std::uint64_t>();
  }
  if (v.contains("n_samples")) {
    const long long n = integer(v.at("n_samples"), "n_samples", child(at, "n_samples"));
    if (n < 2) fail("n_samples", child(at, "n_samples"), "must be at least 2");
    mc.n_samples = static_cast<std::uint64_t>(n);
  }
  if (v.contains("antithetic")) {
    mc.antithetic = boolean(v.at("antithetic"), "antithetic", child(at, "antithetic"));
  }
  if (v.contains("threads")) {
    const long long t = integer(v.at("threads"), "threads", child(at, "threads"));
    if (t < 0 || t > 4096) fail("threads", child(at, "threads"), "must lie in [0, 4096]");
    mc.threads = static_cast<unsigned>(t);
  }
}

void parse_quadrature(const json& v, const std::string& at, QuadratureRule& q) {
  check_keys(v, at, {"kind", "order", "adaptive", "target_abs_tol", "max_order"}, "quadrature");
  if (v.contains("kind") && string(v.at("kind"), "kind", child(at, "kind")) != "gauss_hermite") {
    fail("kind", child(at, "kind"), "only gauss_hermite is supported");
  }
  if (v.contains("order")) {
    q.order = static_cast<int>(integer(v.at("order"), "order", child(at, "order")));
    if (q.order < 1 || q.order > 512) fail("order", child(at, "order"), "must lie in [1, 512]");
    q.max_order = std::max(q.max_order, q.order);
  }
  if (v.contains("adaptive")) q.adaptive = boolean(v.at("adaptive"), "adaptive", child(at, "adaptive"));
  if (v.contains("target_abs_tol")) {
    q.target_abs_tol =
        positive(v.at("target_abs_tol"), "target_abs_tol", child(at, "target_abs_tol"));
  }
  if (v.contains("max_order")) {
    q.max_order = static_cast<int>(integer(v.at("max_order"), "max_order", child(at, "max_order")));
    if (q.max_order < q.order || q.max_order > 512) {
      fail("max_order", child(at, "max_order"), "must lie in [order, 512]");
    }
  }
}

void parse_output(const json& v, const std::string& at, SweepConfig& cfg) {
  check_keys(v, at, {"path", "format"}, "output");
  if (v.contains("path")) cfg.output_path = string(v.at("path"), "path", child(at, "path"));
  if (v.contains("format")) {
    try {
      cfg.output_format = parse_format(string(v.at("format"), "format", child(at, "format")));
    } catch (const std::invalid_argument& e) {
      fail("format", child(at, "format"), e.what());
    }
  }
}

}  // namespace

ConfigError::ConfigError(std::string key, std::string location, const std::string& what)
    : std::runtime_error("config error at " + location + " (key \"" + key + "\"): " + what),
      key_(std::move(key)),
      location_(std::move(location)) {}

const char* to_string(SweepMethod m) noexcept {
  switch (m) {
    case SweepMethod::kAnalytic:
      return "analytic";
    case SweepMethod::kMc:
      return "mc";
    case SweepMethod::kBoth:
      return "both";
  }
  return "?";
}

SweepMethod parse_method(std::string_view name) {
  if (name == "analytic") return SweepMethod::kAnalytic;
  if (name == "mc") return SweepMethod::kMc;
  if (name == "both") return SweepMethod::kBoth;
  throw std::invalid_argument("unknown method '" + std::string(name) + "' (analytic, mc, both)");
}

OutputFormat parse_format(std::string_view name) {
  if (name == "csv") return OutputFormat::kCsv;
  if (name == "json") return OutputFormat::kJson;
  throw std::invalid_argument("unknown output format '" + std::string(name) + "' (csv, json)");
}

SweepConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", "", std::string("malformed JSON: ") + e.what());
  }
  const std::string at;
  check_keys(root, at,
             {"problem", "family", "s_pairs", "h_grid", "x_grid", "method", "mc", "quadrature",
              "output"},
             "config");

  SweepConfig cfg(parse_problem(require(root, "problem", at), "/problem"));
  cfg.family = parse_family(require(root, "family", at), "/family");
  cfg.s_pairs = parse_s_pairs(require(root, "s_pairs", at), "/s_pairs");
  cfg.h_grid = parse_h_grid(require(root, "h_grid", at), "/h_grid");
  if (root.contains("x_grid")) cfg.x_grid = reals(root.at("x_grid"), "x_grid", "/x_grid");
  if (cfg.family == Family::kConditional && cfg.x_grid.empty()) {
    fail("x_grid", "/x_grid", "the conditional family requires a non-empty x_grid");
  }
  if (root.contains("method")) {
    try {
      cfg.method = parse_method(string(root.at("method"), "method", "/method"));
    } catch (const std::invalid_argument& e) {
      fail("method", "/method", e.what());
    }
  }
  if (root.contains("mc")) parse_mc(root.at("mc"), "/mc", cfg.mc);
  if (root.contains("quadrature")) parse_quadrature(root.at("quadrature"), "/quadrature", cfg.quadrature);
  if (root.contains("output")) parse_output(root.at("output"), "/output", cfg);
  return cfg;
}

}  // namespace clipmu
