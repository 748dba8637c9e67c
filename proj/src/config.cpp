#include "rinv/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "rinv/errors.hpp"

namespace rinv {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path + "/" + key; }

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
  if (!obj.is_object()) throw ConfigError("config: " + (path.empty() ? "/" : path) + " must be an object");
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw ConfigError("config: unknown key '" + k + "' at " + (path.empty() ? "/" : path) + " (allowed: " + list +
                        ")");
    }
  }
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError("config: " + path + " must be a number");
  return v.get<double>();
}

int sign_value(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError("config: " + path + " must be an integer");
  return v.get<int>();
}

std::size_t count(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    throw ConfigError("config: " + path + " must be a non-negative integer");
  return v.get<std::size_t>();
}

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError("config: " + path + " must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

template <std::size_t N>
std::array<double, N> fixed(const json& v, const std::string& path) {
  const auto xs = numbers(v, path);
  if (xs.size() != N) throw ConfigError("config: " + path + " must have " + std::to_string(N) + " entries");
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = xs[i];
  return out;
}

ProfileFunction parse_function(const json& j, const std::string& path) {
  check_keys(j, {"kind", "coefficients", "modulus", "weights"}, path);
  if (!j.contains("kind") || !j["kind"].is_string()) throw ConfigError("config: " + path + "/kind must be a string");
  ProfileFunction f;
  try {
    f.kind = profile_kind_from_string(j["kind"].get<std::string>());
  } catch (const ConfigError& e) {
    throw ConfigError("config: " + path + "/kind: " + e.what());
  }
  if (!j.contains("coefficients")) throw ConfigError("config: " + path + "/coefficients is required");
  f.coefficients = numbers(j["coefficients"], join(path, "coefficients"));
  if (j.contains("modulus")) f.modulus = number(j["modulus"], join(path, "modulus"));
  if (j.contains("weights")) f.weights = fixed<2>(j["weights"], join(path, "weights"));
  try {
    f.validate();
  } catch (const ConfigError& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return f;
}

json function_json(const ProfileFunction& f) {
  json j{{"kind", std::string(to_string(f.kind))}, {"coefficients", f.coefficients}};
  if (f.kind == ProfileKind::jacobi_sn || f.kind == ProfileKind::jacobi_cn || f.kind == ProfileKind::jacobi_dn)
    j["modulus"] = f.modulus;
  j["weights"] = f.weights;
  return j;
}

FigureSlice parse_slice(const json& j, const std::string& path, FigureSlice s) {
  check_keys(j, {"times", "origin", "axes", "range", "n"}, path);
  if (j.contains("times")) s.times = numbers(j["times"], join(path, "times"));
  if (j.contains("origin")) s.origin = fixed<3>(j["origin"], join(path, "origin"));
  if (j.contains("axes")) {
    const auto& a = j["axes"];
    if (!a.is_array() || a.size() != 2) throw ConfigError("config: " + path + "/axes must list two of x, y, z");
    for (std::size_t i = 0; i < 2; ++i) {
      if (!a[i].is_string()) throw ConfigError("config: " + path + "/axes entries must be \"x\", \"y\" or \"z\"");
      const std::string name = a[i].get<std::string>();
      if (name == "x") s.axes[i] = 0;
      else if (name == "y") s.axes[i] = 1;
      else if (name == "z") s.axes[i] = 2;
      else throw ConfigError("config: " + path + "/axes entries must be \"x\", \"y\" or \"z\"");
    }
    if (s.axes[0] == s.axes[1]) throw ConfigError("config: " + path + "/axes must be distinct");
  }
  if (j.contains("range")) {
    const auto& r = j["range"];
    if (!r.is_array() || r.size() != 2) throw ConfigError("config: " + path + "/range must be [[lo, hi], [lo, hi]]");
    for (std::size_t i = 0; i < 2; ++i) s.range[i] = fixed<2>(r[i], path + "/range[" + std::to_string(i) + "]");
  }
  if (j.contains("n")) s.n = count(j["n"], join(path, "n"));
  if (s.n < 2) throw ConfigError("config: " + path + "/n must be at least 2");
  return s;
}

json slice_json(const FigureSlice& s) {
  static const char* names[] = {"x", "y", "z"};
  json j{{"origin", s.origin},
         {"axes", {names[s.axes[0]], names[s.axes[1]]}},
         {"range", {s.range[0], s.range[1]}},
         {"n", s.n}};
  if (s.times) j["times"] = *s.times;
  return j;
}

}  // namespace

RunConfig parse_config(const json& j) {
  check_keys(j, {"family", "external", "params", "functions", "samples", "tolerances", "eval", "oracle",
                 "catastrophe", "figure", "output"},
             "");
  RunConfig cfg;
  cfg.density.axes = {0, 2};
  cfg.quiver.axes = {0, 1};
  cfg.quiver.n = 41;

  if (!j.contains("family") || !j["family"].is_string()) throw ConfigError("config: /family must be a string");
  try {
    cfg.instance.family = family_from_string(j["family"].get<std::string>());
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config: /family: ") + e.what());
  }

  if (!j.contains("external")) throw ConfigError("config: /external is required");
  {
    const auto& e = j["external"];
    check_keys(e, {"g", "omega", "kappa"}, "/external");
    auto& x = cfg.instance.external;
    if (e.contains("g")) x.g = fixed<3>(e["g"], "/external/g");
    if (e.contains("omega")) x.omega = fixed<3>(e["omega"], "/external/omega");
    if (e.contains("kappa")) x.kappa = number(e["kappa"], "/external/kappa");
  }
  if (j.contains("params")) {
    const auto& p = j["params"];
    check_keys(p, {"c0", "c1", "c2", "A", "C1", "p0", "rho0", "eps", "eps1", "lambda1", "lambda0"}, "/params");
    auto& P = cfg.instance.params;
    auto num = [&](const char* k, double& dst) {
      if (p.contains(k)) dst = number(p[k], std::string("/params/") + k);
    };
    num("c0", P.c0);
    num("c1", P.c1);
    num("c2", P.c2);
    num("A", P.A);
    num("C1", P.C1);
    num("p0", P.p0);
    num("rho0", P.rho0);
    if (p.contains("eps")) P.eps = sign_value(p["eps"], "/params/eps");
    if (p.contains("eps1")) P.eps1 = sign_value(p["eps1"], "/params/eps1");
    if (p.contains("lambda1")) P.lambda1 = fixed<3>(p["lambda1"], "/params/lambda1");
    if (p.contains("lambda0")) P.lambda0 = fixed<3>(p["lambda0"], "/params/lambda0");
  }
  if (j.contains("functions")) {
    const auto& f = j["functions"];
    std::set<std::string> slots;
    for (const auto& s : required_slots(cfg.instance.family)) slots.insert(s);
    check_keys(f, slots, "/functions");
    for (const auto& [k, v] : f.items()) cfg.instance.functions[k] = parse_function(v, "/functions/" + k);
  }
  if (j.contains("samples")) {
    const auto& s = j["samples"];
    check_keys(s, {"lo", "hi", "count", "seed"}, "/samples");
    if (s.contains("lo")) cfg.samples.lo = fixed<4>(s["lo"], "/samples/lo");
    if (s.contains("hi")) cfg.samples.hi = fixed<4>(s["hi"], "/samples/hi");
    if (s.contains("count")) cfg.samples.count = count(s["count"], "/samples/count");
    if (s.contains("seed")) cfg.samples.seed = count(s["seed"], "/samples/seed");
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    check_keys(t, {"residual", "audit", "constraint", "rank_fraction"}, "/tolerances");
    auto& T = cfg.tolerances;
    if (t.contains("residual")) T.residual = number(t["residual"], "/tolerances/residual");
    if (t.contains("audit")) T.audit = number(t["audit"], "/tolerances/audit");
    if (t.contains("constraint")) T.constraint = number(t["constraint"], "/tolerances/constraint");
    if (t.contains("rank_fraction")) T.rank_fraction = number(t["rank_fraction"], "/tolerances/rank_fraction");
  }
  if (j.contains("eval")) {
    const auto& e = j["eval"];
    check_keys(e, {"times", "lo", "hi", "n"}, "/eval");
    if (e.contains("times")) cfg.eval.times = numbers(e["times"], "/eval/times");
    if (e.contains("lo")) cfg.eval.lo = fixed<3>(e["lo"], "/eval/lo");
    if (e.contains("hi")) cfg.eval.hi = fixed<3>(e["hi"], "/eval/hi");
    if (e.contains("n")) {
      const auto n = fixed<3>(e["n"], "/eval/n");
      for (std::size_t i = 0; i < 3; ++i) {
        if (!(n[i] >= 1.0) || n[i] != static_cast<double>(static_cast<std::size_t>(n[i])))
          throw ConfigError("config: /eval/n entries must be positive integers");
        cfg.eval.n[i] = static_cast<std::size_t>(n[i]);
      }
    }
  }
  if (j.contains("oracle")) {
    const auto& o = j["oracle"];
    check_keys(o, {"lo", "hi", "resolution", "t_end", "steps", "nu", "cfl", "compare_lo", "compare_hi"}, "/oracle");
    auto& O = cfg.oracle;
    if (o.contains("lo")) O.lo = fixed<3>(o["lo"], "/oracle/lo");
    if (o.contains("hi")) O.hi = fixed<3>(o["hi"], "/oracle/hi");
    if (o.contains("resolution")) O.resolution = count(o["resolution"], "/oracle/resolution");
    if (o.contains("t_end")) O.t_end = number(o["t_end"], "/oracle/t_end");
    if (o.contains("steps")) O.steps = count(o["steps"], "/oracle/steps");
    if (o.contains("nu")) O.nu = number(o["nu"], "/oracle/nu");
    if (o.contains("cfl")) O.cfl = number(o["cfl"], "/oracle/cfl");
    if (o.contains("compare_lo")) O.compare_lo = fixed<3>(o["compare_lo"], "/oracle/compare_lo");
    if (o.contains("compare_hi")) O.compare_hi = fixed<3>(o["compare_hi"], "/oracle/compare_hi");
  }
  if (j.contains("catastrophe")) {
    const auto& c = j["catastrophe"];
    check_keys(c, {"positions", "half_width", "line_count", "t_max_factor", "n_scan"}, "/catastrophe");
    auto& C = cfg.catastrophe;
    if (c.contains("positions")) {
      if (!c["positions"].is_array()) throw ConfigError("config: /catastrophe/positions must be an array");
      for (std::size_t i = 0; i < c["positions"].size(); ++i)
        C.positions.push_back(fixed<3>(c["positions"][i], "/catastrophe/positions[" + std::to_string(i) + "]"));
    }
    if (c.contains("half_width")) C.half_width = number(c["half_width"], "/catastrophe/half_width");
    if (c.contains("line_count")) C.line_count = count(c["line_count"], "/catastrophe/line_count");
    if (c.contains("t_max_factor")) C.t_max_factor = number(c["t_max_factor"], "/catastrophe/t_max_factor");
    if (c.contains("n_scan")) C.n_scan = count(c["n_scan"], "/catastrophe/n_scan");
  }
  if (j.contains("figure")) {
    const auto& f = j["figure"];
    check_keys(f, {"density", "quiver"}, "/figure");
    if (f.contains("density")) cfg.density = parse_slice(f["density"], "/figure/density", cfg.density);
    if (f.contains("quiver")) cfg.quiver = parse_slice(f["quiver"], "/figure/quiver", cfg.quiver);
  }
  if (j.contains("output")) {
    if (!j["output"].is_string()) throw ConfigError("config: /output must be a string");
    cfg.output = j["output"].get<std::string>();
  }
  return cfg;
}

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json to_json(const RunConfig& cfg) {
  const auto& I = cfg.instance;
  const auto& P = I.params;
  json params{{"c0", P.c0}, {"c1", P.c1}, {"c2", P.c2}, {"A", P.A},     {"C1", P.C1},
              {"p0", P.p0}, {"rho0", P.rho0}, {"eps", P.eps}, {"eps1", P.eps1}, {"lambda1", P.lambda1}};
  if (P.lambda0) params["lambda0"] = *P.lambda0;
  json functions = json::object();
  for (const auto& [k, f] : I.functions) functions[k] = function_json(f);

  json oracle{{"lo", cfg.oracle.lo},   {"hi", cfg.oracle.hi}, {"resolution", cfg.oracle.resolution},
              {"t_end", cfg.oracle.t_end}, {"nu", cfg.oracle.nu}, {"cfl", cfg.oracle.cfl}};
  if (cfg.oracle.steps) oracle["steps"] = *cfg.oracle.steps;
  if (cfg.oracle.compare_lo) oracle["compare_lo"] = *cfg.oracle.compare_lo;
  if (cfg.oracle.compare_hi) oracle["compare_hi"] = *cfg.oracle.compare_hi;

  json cat{{"half_width", cfg.catastrophe.half_width},
           {"line_count", cfg.catastrophe.line_count},
           {"t_max_factor", cfg.catastrophe.t_max_factor},
           {"n_scan", cfg.catastrophe.n_scan}};
  if (!cfg.catastrophe.positions.empty()) cat["positions"] = cfg.catastrophe.positions;

  json j{{"family", std::string(to_string(I.family))},
         {"external", {{"g", I.external.g}, {"omega", I.external.omega}, {"kappa", I.external.kappa}}},
         {"params", params},
         {"functions", functions},
         {"samples",
          {{"lo", cfg.samples.lo}, {"hi", cfg.samples.hi}, {"count", cfg.samples.count}, {"seed", cfg.samples.seed}}},
         {"tolerances",
          {{"residual", cfg.tolerances.residual},
           {"audit", cfg.tolerances.audit},
           {"constraint", cfg.tolerances.constraint},
           {"rank_fraction", cfg.tolerances.rank_fraction}}},
         {"eval", {{"times", cfg.eval.times}, {"lo", cfg.eval.lo}, {"hi", cfg.eval.hi}, {"n", cfg.eval.n}}},
         {"oracle", oracle},
         {"catastrophe", cat},
         {"figure", {{"density", slice_json(cfg.density)}, {"quiver", slice_json(cfg.quiver)}}}};
  if (cfg.output) j["output"] = *cfg.output;
  return j;
}

}  // namespace rinv
