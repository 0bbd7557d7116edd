#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <json.hpp>

#include "asymptotica/experiments.hpp"

namespace asymptotica {

using nlohmann::json;

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::orbit: return "orbit";
    case ExperimentKind::classify: return "classify";
    case ExperimentKind::gram: return "gram";
    case ExperimentKind::decompose: return "decompose";
    case ExperimentKind::kerchy: return "kerchy";
    case ExperimentKind::backward: return "backward";
    case ExperimentKind::mt_membership: return "mt-membership";
    case ExperimentKind::inverse_growth: return "inverse-growth";
    case ExperimentKind::verify: return "verify";
  }
  return "orbit";
}

Vec VectorSpec::materialize(std::size_t dim) const {
  switch (kind) {
    case Kind::basis:
      if (index == 0 || index > dim) {
        throw DimensionError("basis vector e" + std::to_string(index) + " outside dimension " +
                             std::to_string(dim));
      }
      return basis_vector(dim, index);
    case Kind::random:
      return random_unit_vector(dim, seed);
    case Kind::entries: {
      if (entries.size() != dim) {
        throw DimensionError("vector " + id + " has " + std::to_string(entries.size()) +
                             " entries, operator dimension is " + std::to_string(dim));
      }
      Vec v(static_cast<Eigen::Index>(dim));
      for (std::size_t i = 0; i < dim; ++i) v(static_cast<Eigen::Index>(i)) = entries[i];
      return v;
    }
  }
  return {};
}

namespace {

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, _] : obj.items()) {
    if (!allowed.count(k)) {
      throw ConfigError(path + "." + k, "unknown key");
    }
  }
}

const json& require(const json& obj, const std::string& path, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ConfigError(path + "." + key, "missing required key");
  }
  return *it;
}

std::size_t as_size(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ConfigError(path, "expected a nonnegative integer");
  }
  return v.get<std::size_t>();
}

double as_real(const json& v, const std::string& path) {
  if (!v.is_number()) {
    throw ConfigError(path, "expected a number");
  }
  return v.get<double>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) {
    throw ConfigError(path, "expected a string");
  }
  return v.get<std::string>();
}

// A number, or [re, im].
Complex as_complex(const json& v, const std::string& path) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw ConfigError(path, "expected a number or [re, im]");
}

const json& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) {
    throw ConfigError(path, "expected an array");
  }
  return v;
}

std::size_t size_or(const json& obj, const std::string& path, const char* key,
                    std::optional<std::size_t> fallback) {
  if (obj.contains(key)) return as_size(obj.at(key), path + "." + key);
  if (fallback) return *fallback;
  throw ConfigError(path + "." + key, "missing and no top-level dim to fall back on");
}

QuadratureScheme scheme_of(const json& obj, const std::string& path) {
  if (!obj.contains("scheme")) return QuadratureScheme::midpoint;
  try {
    return parse_scheme(as_string(obj.at("scheme"), path + ".scheme"));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path + ".scheme", e.what());
  }
}

// "name" or "name(a, b)" with integer arguments.
json expand_shorthand(const std::string& text, const std::string& path) {
  const auto open = text.find('(');
  std::string name = text.substr(0, open);
  std::vector<std::size_t> args;
  if (open != std::string::npos) {
    if (text.back() != ')') {
      throw ConfigError(path, "malformed call '" + text + "'");
    }
    std::stringstream ss(text.substr(open + 1, text.size() - open - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        const long long v = std::stoll(item, &used);
        const auto rest = item.find_first_not_of(" \t", used);
        if (v < 0 || rest != std::string::npos) throw std::invalid_argument(item);
        args.push_back(static_cast<std::size_t>(v));
      } catch (const std::logic_error&) {
        throw ConfigError(path, "argument '" + item + "' is not a nonnegative integer");
      }
    }
  }
  json obj{{"op", name}};
  auto put = [&](std::initializer_list<const char*> keys) {
    if (args.size() > keys.size()) {
      throw ConfigError(path, name + " takes at most " + std::to_string(keys.size()) +
                                  " arguments");
    }
    auto k = keys.begin();
    for (std::size_t a : args) obj[*k++] = a;
  };
  if (name == "example3") {
    put({"blocks", "block_dim"});
  } else if (name == "volterra" || name == "mult_exp" || name == "projection_constants") {
    put({"M"});
  } else if (name == "diag_unitary") {
    put({"dim", "seed"});
  } else if (name == "identity" || name == "example1" || name == "example2" ||
             name == "jordan" || name == "forward_shift" || name == "backward_shift") {
    put({"dim"});
  } else {
    throw ConfigError(path, "'" + name + "' cannot be written in call form");
  }
  return obj;
}

WeightSchedule weights_of(const json& obj, const std::string& path) {
  if (!obj.contains("weights")) return constant_weights(1.0);
  const json& w = obj.at("weights");
  const std::string wp = path + ".weights";
  if (w.is_array()) {
    std::vector<double> vals;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double v = as_real(w[i], wp + "[" + std::to_string(i) + "]");
      if (!(v > 0.0)) throw ConfigError(wp + "[" + std::to_string(i) + "]", "weights must be positive");
      vals.push_back(v);
    }
    return list_weights(std::move(vals));
  }
  if (w.is_string() && w.get<std::string>() == "example1") return example1_weights();
  if (w.is_object()) {
    only_keys(w, wp, {"constant", "example3"});
    if (w.contains("constant")) {
      const double c = as_real(w.at("constant"), wp + ".constant");
      if (!(c > 0.0)) throw ConfigError(wp + ".constant", "weights must be positive");
      return constant_weights(c);
    }
    if (w.contains("example3")) {
      const std::size_t n = as_size(w.at("example3"), wp + ".example3");
      if (n == 0) throw ConfigError(wp + ".example3", "block index starts at 1");
      return example3_weights(n);
    }
  }
  throw ConfigError(wp, "expected a list, \"example1\", {\"constant\": c} or {\"example3\": n}");
}

Mat matrix_of(const json& rows, const std::string& path) {
  as_array(rows, path);
  if (rows.empty()) throw ConfigError(path, "matrix must have at least one row");
  const std::size_t r = rows.size();
  const std::size_t c = as_array(rows[0], path + "[0]").size();
  Mat m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  for (std::size_t i = 0; i < r; ++i) {
    const std::string rp = path + "[" + std::to_string(i) + "]";
    if (as_array(rows[i], rp).size() != c) throw ConfigError(rp, "ragged matrix row");
    for (std::size_t j = 0; j < c; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          as_complex(rows[i][j], rp + "[" + std::to_string(j) + "]");
    }
  }
  return m;
}

Operator build(const json& node, const std::string& path, std::optional<std::size_t> dim);

std::vector<Operator> build_list(const json& arr, const std::string& path,
                                 std::optional<std::size_t> dim) {
  as_array(arr, path);
  if (arr.empty()) throw ConfigError(path, "expected at least one operator");
  std::vector<Operator> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(build(arr[i], path + "[" + std::to_string(i) + "]", dim));
  }
  return out;
}

Operator build_object(const json& node, const std::string& path, std::optional<std::size_t> dim) {
  const std::string op = as_string(require(node, path, "op"), path + ".op");
  if (op == "identity" || op == "example1" || op == "example2" || op == "jordan") {
    only_keys(node, path, {"op", "dim"});
    const std::size_t d = size_or(node, path, "dim", dim);
    if (op == "identity") return identity(d);
    if (op == "example1") return example1(d);
    if (op == "example2") return example2_op(d);
    return jordan_nilpotent(d);
  }
  if (op == "forward_shift" || op == "backward_shift") {
    only_keys(node, path, {"op", "dim", "weights"});
    const std::size_t d = size_or(node, path, "dim", dim);
    const WeightSchedule w = weights_of(node, path);
    return op == "forward_shift" ? forward_shift(w, d) : backward_shift(w, d);
  }
  if (op == "example3") {
    only_keys(node, path, {"op", "blocks", "block_dim"});
    const std::size_t b = node.contains("blocks") ? as_size(node.at("blocks"), path + ".blocks") : 64;
    const std::size_t d =
        node.contains("block_dim") ? as_size(node.at("block_dim"), path + ".block_dim") : 64;
    return example3(b, d);
  }
  if (op == "volterra" || op == "mult_exp") {
    only_keys(node, path, {"op", "M", "scheme"});
    const std::size_t m = size_or(node, path, "M", dim);
    const QuadratureScheme s = scheme_of(node, path);
    return op == "volterra" ? volterra(m, s) : mult_exp(m, s);
  }
  if (op == "projection_constants") {
    only_keys(node, path, {"op", "M"});
    return projection_constants(size_or(node, path, "M", dim));
  }
  if (op == "diag_unitary") {
    only_keys(node, path, {"op", "dim", "seed"});
    const std::size_t seed = node.contains("seed") ? as_size(node.at("seed"), path + ".seed") : 0;
    return diag_unitary(size_or(node, path, "dim", dim), seed);
  }
  if (op == "diagonal") {
    only_keys(node, path, {"op", "entries"});
    const json& e = as_array(require(node, path, "entries"), path + ".entries");
    Vec v(static_cast<Eigen::Index>(e.size()));
    for (std::size_t i = 0; i < e.size(); ++i) {
      v(static_cast<Eigen::Index>(i)) = as_complex(e[i], path + ".entries[" + std::to_string(i) + "]");
    }
    return diagonal(std::move(v));
  }
  if (op == "matrix") {
    only_keys(node, path, {"op", "rows"});
    return dense_op(matrix_of(require(node, path, "rows"), path + ".rows"), "matrix");
  }
  if (op == "sum") {
    only_keys(node, path, {"op", "terms"});
    return sum(build_list(require(node, path, "terms"), path + ".terms", dim));
  }
  if (op == "compose") {
    only_keys(node, path, {"op", "factors"});
    return compose(build_list(require(node, path, "factors"), path + ".factors", dim));
  }
  if (op == "direct_sum") {
    only_keys(node, path, {"op", "blocks"});
    return direct_sum(build_list(require(node, path, "blocks"), path + ".blocks", dim));
  }
  if (op == "inverse" || op == "adjoint") {
    only_keys(node, path, {"op", "of"});
    const Operator inner_op = build(require(node, path, "of"), path + ".of", dim);
    return op == "inverse" ? inverse_op(inner_op) : adjoint_op(inner_op);
  }
  if (op == "scale") {
    only_keys(node, path, {"op", "factor", "of"});
    const Complex c = as_complex(require(node, path, "factor"), path + ".factor");
    return scale(build(require(node, path, "of"), path + ".of", dim), c);
  }
  if (op == "similarity") {
    only_keys(node, path, {"op", "s", "t"});
    return similarity(build(require(node, path, "s"), path + ".s", dim),
                      build(require(node, path, "t"), path + ".t", dim));
  }
  if (op == "block_lower_2x2") {
    only_keys(node, path, {"op", "t11", "t21", "t22"});
    const Operator t11 = build(require(node, path, "t11"), path + ".t11", dim);
    const Operator t22 = build(require(node, path, "t22"), path + ".t22", dim);
    const auto r = static_cast<Eigen::Index>(t22.dim());
    const auto c = static_cast<Eigen::Index>(t11.dim());
    const json& t21 = require(node, path, "t21");
    const std::string tp = path + ".t21";
    Mat coupling = Mat::Zero(r, c);
    if (t21.is_string() && t21.get<std::string>() == "zero") {
    } else if (t21.is_object()) {
      only_keys(t21, tp, {"random", "scale", "rows"});
      if (t21.contains("rows")) {
        coupling = matrix_of(t21.at("rows"), tp + ".rows");
        if (coupling.rows() != r || coupling.cols() != c) {
          throw ConfigError(tp + ".rows", "expected a " + std::to_string(r) + "x" +
                                              std::to_string(c) + " matrix");
        }
      } else if (t21.contains("random")) {
        const double s = t21.contains("scale") ? as_real(t21.at("scale"), tp + ".scale") : 1.0;
        coupling = s * random_matrix(static_cast<std::size_t>(r), static_cast<std::size_t>(c),
                                     as_size(t21.at("random"), tp + ".random"));
      } else {
        throw ConfigError(tp, "expected \"rows\" or \"random\"");
      }
    } else {
      throw ConfigError(tp, "expected \"zero\" or an object");
    }
    return block_lower_2x2(t11, std::move(coupling), t22);
  }
  throw ConfigError(path + ".op", "unknown operator '" + op + "'");
}

Operator build(const json& node, const std::string& path, std::optional<std::size_t> dim) {
  try {
    if (node.is_string()) {
      return build_object(expand_shorthand(node.get<std::string>(), path), path, dim);
    }
    if (node.is_object()) {
      return build_object(node, path, dim);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    // Dimension and invertibility failures surface with the node path.
    throw ConfigError(path, e.what());
  }
  throw ConfigError(path, "expected an operator name or object");
}

VectorSpec vector_of(const json& v, const std::string& path) {
  VectorSpec spec;
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.size() < 2 || s[0] != 'e' || s.find_first_not_of("0123456789", 1) != std::string::npos) {
      throw ConfigError(path, "expected a basis name like \"e3\"");
    }
    spec.kind = VectorSpec::Kind::basis;
    spec.index = std::stoull(s.substr(1));
    spec.id = s;
    return spec;
  }
  if (!v.is_object()) throw ConfigError(path, "expected a vector spec");
  only_keys(v, path, {"basis", "random", "entries", "id"});
  if (v.size() - (v.contains("id") ? 1 : 0) != 1) {
    throw ConfigError(path, "exactly one of basis, random, entries");
  }
  if (v.contains("basis")) {
    spec.kind = VectorSpec::Kind::basis;
    spec.index = as_size(v.at("basis"), path + ".basis");
    spec.id = "e" + std::to_string(spec.index);
  } else if (v.contains("random")) {
    spec.kind = VectorSpec::Kind::random;
    spec.seed = as_size(v.at("random"), path + ".random");
    spec.id = "random:" + std::to_string(spec.seed);
  } else {
    spec.kind = VectorSpec::Kind::entries;
    const json& e = as_array(v.at("entries"), path + ".entries");
    for (std::size_t i = 0; i < e.size(); ++i) {
      spec.entries.push_back(as_complex(e[i], path + ".entries[" + std::to_string(i) + "]"));
    }
    spec.id = "entries";
  }
  if (v.contains("id")) spec.id = as_string(v.at("id"), path + ".id");
  return spec;
}

void tolerances_of(const json& t, const std::string& path, Tolerances& tol) {
  if (!t.is_object()) throw ConfigError(path, "expected an object");
  only_keys(t, path,
            {"decay_tol", "floor_frac", "growth_factor", "chain_tol_rel", "rank_tol",
             "growth_slope", "flat_slope", "flat_deviation", "bound_cap_rel", "gram_split_tol"});
  auto set = [&](const char* key, double& out) {
    if (t.contains(key)) {
      out = as_real(t.at(key), path + "." + key);
      if (!(out >= 0.0)) throw ConfigError(path + "." + key, "must be nonnegative");
    }
  };
  set("decay_tol", tol.verdict.decay_tol);
  set("floor_frac", tol.verdict.floor_frac);
  set("growth_factor", tol.verdict.growth_factor);
  set("chain_tol_rel", tol.chain.chain_tol_rel);
  set("rank_tol", tol.chain.rank_tol);
  set("growth_slope", tol.chain.growth_slope);
  set("flat_slope", tol.chain.flat_slope);
  set("flat_deviation", tol.chain.flat_deviation);
  set("bound_cap_rel", tol.chain.bound_cap_rel);
  set("gram_split_tol", tol.gram_split_tol);
}

ExperimentKind experiment_of(const std::string& s, const std::string& path) {
  for (auto k : {ExperimentKind::orbit, ExperimentKind::classify, ExperimentKind::gram,
                 ExperimentKind::decompose, ExperimentKind::kerchy, ExperimentKind::backward,
                 ExperimentKind::mt_membership, ExperimentKind::inverse_growth,
                 ExperimentKind::verify}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError(path, "unknown experiment '" + s + "'");
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("$", "expected an object");
  only_keys(doc, "$",
            {"schema", "experiment", "operator", "dim", "case", "vectors", "horizon",
             "direction", "mode", "tolerances", "seed", "output"});
  const json& schema = require(doc, "$", "schema");
  if (!schema.is_number_integer() || schema.get<int>() != 1) {
    throw ConfigError("$.schema", "unsupported schema version (expected 1)");
  }

  ExperimentConfig cfg;
  cfg.experiment = experiment_of(as_string(require(doc, "$", "experiment"), "$.experiment"),
                                 "$.experiment");
  if (doc.contains("dim")) cfg.dim = as_size(doc.at("dim"), "$.dim");
  if (doc.contains("horizon")) {
    cfg.horizon = as_size(doc.at("horizon"), "$.horizon");
    if (*cfg.horizon == 0) throw ConfigError("$.horizon", "must be at least 1");
  }
  if (doc.contains("seed")) cfg.seed = as_size(doc.at("seed"), "$.seed");
  if (doc.contains("output")) cfg.output = as_string(doc.at("output"), "$.output");
  if (doc.contains("direction")) {
    cfg.direction = as_string(doc.at("direction"), "$.direction");
    if (cfg.direction != "forward" && cfg.direction != "adjoint" && cfg.direction != "both") {
      throw ConfigError("$.direction", "expected forward, adjoint or both");
    }
  }
  if (doc.contains("mode")) {
    cfg.mode = as_string(doc.at("mode"), "$.mode");
    if (cfg.mode != "stepwise" && cfg.mode != "joint" && cfg.mode != "both") {
      throw ConfigError("$.mode", "expected stepwise, joint or both");
    }
  }
  if (doc.contains("tolerances")) tolerances_of(doc.at("tolerances"), "$.tolerances", cfg.tol);
  if (doc.contains("vectors")) {
    const json& vs = as_array(doc.at("vectors"), "$.vectors");
    for (std::size_t i = 0; i < vs.size(); ++i) {
      cfg.vectors.push_back(vector_of(vs[i], "$.vectors[" + std::to_string(i) + "]"));
    }
  }
  if (doc.contains("case")) cfg.verify_case = as_string(doc.at("case"), "$.case");

  if (cfg.experiment == ExperimentKind::verify) {
    if (cfg.verify_case.empty()) throw ConfigError("$.case", "verify needs a case");
    const auto& known = verify_cases();
    if (std::find(known.begin(), known.end(), cfg.verify_case) == known.end()) {
      throw ConfigError("$.case", "unknown case '" + cfg.verify_case + "'");
    }
  } else if (doc.contains("case")) {
    throw ConfigError("$.case", "only valid for the verify experiment");
  }
  if (doc.contains("operator")) {
    cfg.op = build(doc.at("operator"), "$.operator", cfg.dim);
    cfg.operator_echo = doc.at("operator").dump();
    for (std::size_t i = 0; i < cfg.vectors.size(); ++i) {
      try {
        (void)cfg.vectors[i].materialize(cfg.op->dim());
      } catch (const Error& e) {
        throw ConfigError("$.vectors[" + std::to_string(i) + "]", e.what());
      }
    }
  } else if (cfg.experiment != ExperimentKind::verify) {
    throw ConfigError("$.operator", "missing required key");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot open config file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Operator parse_operator(std::string_view expression, std::optional<std::size_t> default_dim) {
  const std::string text(expression);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '"')) {
    json node;
    try {
      node = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError("$", std::string("invalid JSON: ") + e.what());
    }
    return build(node, "$", default_dim);
  }
  return build(json(text), "$", default_dim);
}

}  // namespace asymptotica
