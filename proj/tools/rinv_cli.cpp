// rinv: catalog listing, grid evaluation, verification, audits, catastrophe
// scans and oracle runs for the rank-2 Riemann-invariant solutions.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rinv/config.hpp"
#include "rinv/csv.hpp"
#include "rinv/errors.hpp"
#include "rinv/euler_model.hpp"
#include "rinv/fvm_oracle.hpp"
#include "rinv/invariant_core.hpp"
#include "rinv/solutions.hpp"
#include "rinv/verify.hpp"

namespace fs = std::filesystem;
using namespace rinv;

namespace {

constexpr int kPass = 0;
constexpr int kGateFailure = 1;
constexpr int kUsageError = 2;

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string fmt(double v) { return format_double(v); }

std::string fmt_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt_list(const double* v, std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += (i ? " " : "") + fmt(v[i]);
  return s;
}

template <class A>
std::string fmt_list(const A& a) {
  return fmt_list(a.data(), a.size());
}

// --tolerance accepts "key=value" or a bare number for the subcommand's primary gate.
struct ToleranceOverrides {
  std::map<std::string, double> values;

  static ToleranceOverrides parse(const std::vector<std::string>& raw, const std::string& primary) {
    ToleranceOverrides out;
    for (const auto& item : raw) {
      const auto eq = item.find('=');
      const std::string key = eq == std::string::npos ? primary : item.substr(0, eq);
      const std::string val = eq == std::string::npos ? item : item.substr(eq + 1);
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(val, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != val.size() || val.empty() || !(v >= 0.0))
        throw UsageError("--tolerance: '" + item + "' is not a non-negative number");
      out.values[key] = v;
    }
    return out;
  }

  void require_known(const std::vector<std::string>& known) const {
    for (const auto& [k, v] : values) {
      bool ok = false;
      for (const auto& n : known) ok = ok || n == k;
      if (!ok) {
        std::string list;
        for (const auto& n : known) list += (list.empty() ? "" : ", ") + n;
        throw UsageError("--tolerance: unknown key '" + k + "' (this subcommand accepts: " + list + ")");
      }
    }
  }

  double get(const std::string& key, double fallback) const {
    const auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
  }

  void apply(Tolerances& t) const {
    t.residual = get("residual", t.residual);
    t.audit = get("audit", t.audit);
    t.constraint = get("constraint", t.constraint);
    t.rank_fraction = get("rank_fraction", t.rank_fraction);
  }
};

struct Common {
  std::string config;
  std::string out;
  std::vector<std::string> tolerance;
};

void add_common(CLI::App* sub, Common& c, bool needs_config) {
  auto* opt = sub->add_option("--config", c.config, "run configuration (JSON)");
  if (needs_config) opt->required();
  sub->add_option("--out", c.out, "output directory (default: $RINV_OUTPUT_DIR or .)");
  sub->add_option("--tolerance", c.tolerance, "gate override: VALUE or KEY=VALUE (repeatable)");
}

fs::path output_dir(const Common& c) {
  fs::path dir = c.out;
  if (dir.empty()) {
    const char* env = std::getenv("RINV_OUTPUT_DIR");
    dir = env && *env ? fs::path(env) : fs::path(".");
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

RunConfig load_validated(const Common& c) {
  RunConfig cfg = load_config(c.config);
  try {
    cfg.instance.external.validate();
  } catch (const DomainError& e) {
    throw ConfigError(c.config + ": /external: " + e.what());
  }
  require_valid(cfg.instance);
  return cfg;
}

// Prints the effective configuration on stdout and writes it beside the CSV.
void echo_config(const nlohmann::json& effective, const fs::path& sidecar) {
  std::cout << "# effective configuration: " << effective.dump() << "\n";
  if (!sidecar.empty()) {
    std::ofstream os(sidecar, std::ios::binary);
    os << effective.dump(2) << "\n";
    if (!os) throw Error("cannot write '" + sidecar.string() + "'");
  }
}

nlohmann::json effective(const RunConfig& cfg, const std::string& command, const ToleranceOverrides& tol) {
  nlohmann::json j = to_json(cfg);
  j["command"] = command;
  if (!tol.values.empty()) j["tolerance_overrides"] = tol.values;
  return j;
}

std::string stem(const RunConfig& cfg, const std::string& fallback) { return cfg.output ? *cfg.output : fallback; }

std::ofstream open_csv(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write '" + path.string() + "'");
  write_csv_header(os);
  return os;
}

std::vector<double> span_points(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

void kv(const std::string& key, const std::string& value) { std::cout << key << " = " << value << "\n"; }

void gate_line(const std::string& name, bool pass, const std::string& detail) {
  std::cout << "gate." << name << " = " << (pass ? "pass" : "FAIL") << " (" << detail << ")\n";
}

// ---------------------------------------------------------------------------
// catalog

int cmd_catalog() {
  struct Entry {
    const char* name;
    const char* waves;
    const char* slots;
    std::vector<const char*> constraints;
  };
  const std::vector<Entry> entries{
      {"E0E", "inhomogeneous entropic + entropic", "p(r0), v3(r0, r1)",
       {"g.Omega = 0", "Omega3 != 0", "g1 != 0", "g3 != 0", "lambda1.Omega = 0", "lambda1 != 0"}},
      {"E0Aplus", "inhomogeneous entropic + acoustic (eps = +1)", "B(r1)",
       {"kappa must equal 1", "g.Omega = 0", "lambda1 x Omega = 0", "lambda1 != 0", "A > 0", "Omega1*Omega3 != 0"}},
      {"A0eE", "inhomogeneous acoustic + entropic", "F1(r1), F2(r1)",
       {"|Omega| = 1", "g.Omega = 0", "eps = +/-1", "eps1 = +/-1", "lambda0 = eps1|lambda0|Omega", "p0 > 0",
        "rho0 > 0", "Omega3 != 0", "Omega2^2+Omega3^2 != 0"}},
      {"H0E", "inhomogeneous hydrodynamic + entropic", "F1(r1), F2(r1), rho(r1)",
       {"Omega = (0,0,1)", "c1²+c2² = 1", "c2 != 0", "c0+c1g2-c2g1 != 0", "p0 > 0"}},
  };
  std::cout << "families:\n";
  for (const auto& e : entries) {
    std::cout << "  " << e.name << "  waves: " << e.waves << "  slots: " << e.slots << "\n";
    for (const auto* c : e.constraints) std::cout << "      - " << c << "\n";
  }
  std::cout << "\nrank-2 superposition (inhomogeneous, homogeneous):\n";
  const std::pair<InhomTag, const char*> inhom[] = {
      {InhomTag::E0, "E⁰"}, {InhomTag::A0eps, "A⁰ε"}, {InhomTag::H0, "H⁰"}};
  const std::pair<HomTag, const char*> hom[] = {{HomTag::E, "E"}, {HomTag::Aeps, "A_ε"}};
  for (const auto& [it, iname] : inhom)
    for (const auto& [ht, hname] : hom)
      std::cout << "  (" << iname << ", " << hname << "): "
                << (superposition_admissible(it, ht) ? "admissible" : "absent") << "\n";
  return kPass;
}

// ---------------------------------------------------------------------------
// eval

int cmd_eval(const Common& c) {
  const auto tol = ToleranceOverrides::parse(c.tolerance, "singularity");
  tol.require_known({"singularity"});
  const RunConfig cfg = load_validated(c);
  const fs::path dir = output_dir(c);
  const std::string name = stem(cfg, "eval");
  echo_config(effective(cfg, "eval", tol), dir / (name + ".config.json"));

  EvaluateOptions opts;
  opts.singularity_threshold = tol.get("singularity", opts.singularity_threshold);
  const auto xs = span_points(cfg.eval.lo[0], cfg.eval.hi[0], cfg.eval.n[0]);
  const auto ys = span_points(cfg.eval.lo[1], cfg.eval.hi[1], cfg.eval.n[1]);
  const auto zs = span_points(cfg.eval.lo[2], cfg.eval.hi[2], cfg.eval.n[2]);
  auto os = open_csv(dir / (name + ".csv"));
  std::size_t rows = 0, inside = 0;
  for (double t : cfg.eval.times)
    for (double x : xs)
      for (double y : ys)
        for (double z : zs) {
          const Vec3 p{x, y, z};
          const auto e = evaluate(cfg.instance, t, p, opts);
          write_csv_row(os, t, p, e);
          ++rows;
          if (e.in_domain) ++inside;
        }
  kv("csv", (dir / (name + ".csv")).string());
  kv("rows", std::to_string(rows));
  kv("in_domain", std::to_string(inside));
  return kPass;
}

// ---------------------------------------------------------------------------
// verify

void print_report(const ResidualReport& r) {
  kv("family", r.family);
  kv("status", r.status());
  kv("samples", std::to_string(r.samples));
  kv("in_domain", std::to_string(r.in_domain));
  kv("out_of_domain", std::to_string(r.out_of_domain));
  kv("one_sided_stencils", std::to_string(r.one_sided));
  kv("domain_too_small", r.domain_too_small ? "yes" : "no");
  kv("max_relative_residual", fmt(r.max_residual()));
  for (std::size_t k = 0; k < 5; ++k) {
    kv("residual.eq" + std::to_string(k + 1) + ".max", fmt(r.eq_max[k]));
    kv("residual.eq" + std::to_string(k + 1) + ".l2", fmt(r.eq_rms[k]));
  }
  std::string hist;
  for (std::size_t k = 0; k < r.rank_histogram.size(); ++k)
    hist += (k ? " " : "") + std::to_string(k) + ":" + std::to_string(r.rank_histogram[k]);
  kv("rank_histogram", hist);
  kv("rank2_fraction", fmt(r.rank2_fraction()));
  kv("min_abs_detM1", fmt(r.min_abs_det_m1));
  kv("audit.a", fmt(r.audit_a));
  kv("audit.b", fmt(r.audit_b));
  kv("audit.c_offdiag", fmt(r.audit_c_offdiag));
  kv("audit.c_diag", fmt(r.audit_c_diag));
  kv("audit.d", fmt(r.audit_d));
  kv("constraint_max", fmt(r.constraint_max));
  const auto& t = r.tolerances;
  gate_line("residual", r.residual_pass, "max " + fmt(r.max_residual()) + " <= " + fmt_short(t.residual));
  gate_line("rank", r.rank_pass, "fraction " + fmt(r.rank2_fraction()) + " >= " + fmt_short(t.rank_fraction));
  gate_line("audit", r.audit_pass, "max " + fmt(r.audit_max()) + " <= " + fmt_short(t.audit));
  gate_line("constraint", r.constraint_pass, "max " + fmt(r.constraint_max) + " <= " + fmt_short(t.constraint));
}

ResidualReport run_report(const Common& c, const std::string& command, const std::string& primary, RunConfig& cfg,
                          fs::path& dir, std::string& name) {
  const auto tol = ToleranceOverrides::parse(c.tolerance, primary);
  tol.require_known({"residual", "audit", "constraint", "rank_fraction"});
  cfg = load_validated(c);
  tol.apply(cfg.tolerances);
  dir = output_dir(c);
  name = stem(cfg, command);
  echo_config(effective(cfg, command, tol), dir / (name + ".config.json"));
  return residual_report(cfg.instance, cfg.samples, cfg.tolerances);
}

int cmd_verify(const Common& c) {
  RunConfig cfg;
  fs::path dir;
  std::string name;
  const ResidualReport rep = run_report(c, "verify", "residual", cfg, dir, name);
  {
    auto os = open_csv(dir / (name + ".csv"));
    for (const auto& row : rep.rows) write_csv_row(os, row.point[0], {row.point[1], row.point[2], row.point[3]}, row.eval);
  }
  std::cout << "# verification report\n";
  print_report(rep);
  kv("csv", (dir / (name + ".csv")).string());
  return rep.verified() ? kPass : kGateFailure;
}

// ---------------------------------------------------------------------------
// audit

// Constant wave covectors, a smooth nonlinear profile, eta = 0.
InvariantChart constant_wave_chart(std::size_t k, std::uint64_t seed, const ExternalParams& params) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<Covector> waves(k);
  for (auto& w : waves)
    for (auto& c : w) c = U(rng);
  SmallMatrix lin(5, k), quad(5, k);
  for (std::size_t a = 0; a < 5; ++a)
    for (std::size_t j = 0; j < k; ++j) {
      lin(a, j) = U(rng);
      quad(a, j) = 0.3 * U(rng);
    }
  const std::array<double, 5> base{0.2, -0.1, 0.3, 1.5, 2.0};
  InvariantChart chart;
  chart.params = params;
  chart.wave_vectors.reserve(k);
  for (const auto& w : waves) chart.wave_vectors.push_back([w](const FluidState&) { return w; });
  chart.profile = [=](std::span<const double> r) {
    std::array<double, 5> u = base;
    for (std::size_t a = 0; a < 5; ++a)
      for (std::size_t j = 0; j < k; ++j) u[a] += lin(a, j) * r[j] + quad(a, j) * std::sin(r[j]);
    return FluidState::from_array(u);
  };
  chart.profile_jacobian = [=](std::span<const double> r) {
    SmallMatrix d(5, k);
    for (std::size_t a = 0; a < 5; ++a)
      for (std::size_t j = 0; j < k; ++j) d(a, j) = lin(a, j) + quad(a, j) * std::cos(r[j]);
    return d;
  };
  chart.eta = [k](const FluidState&) {
    std::array<SmallMatrix, 4> eta;
    for (auto& e : eta) e = SmallMatrix(k, 5);
    return eta;
  };
  return chart;
}

int cmd_audit(const Common& c, bool rank3, std::size_t points, std::uint64_t seed) {
  if (!rank3) {
    RunConfig cfg;
    fs::path dir;
    std::string name;
    const ResidualReport rep = run_report(c, "audit", "audit", cfg, dir, name);
    std::cout << "# rank-2 condition audit\n";
    kv("family", rep.family);
    kv("samples_in_domain", std::to_string(rep.in_domain));
    kv("audit.a", fmt(rep.audit_a));
    kv("audit.b", fmt(rep.audit_b));
    kv("audit.c_offdiag", fmt(rep.audit_c_offdiag));
    kv("audit.c_diag", fmt(rep.audit_c_diag));
    kv("audit.d", fmt(rep.audit_d));
    gate_line("audit", rep.audit_pass, "max " + fmt(rep.audit_max()) + " <= " + fmt_short(rep.tolerances.audit));
    return rep.audit_pass && rep.in_domain > 0 ? kPass : kGateFailure;
  }

  const auto tol = ToleranceOverrides::parse(c.tolerance, "rank3");
  tol.require_known({"rank3"});
  const double gate = tol.get("rank3", 1e-13);
  ExternalParams params{{0.1, -0.2, 0.3}, {0.0, 0.2, 0.5}, 1.4};
  if (!c.config.empty()) params = load_config(c.config).instance.external;
  nlohmann::json eff{{"command", "audit"},
                     {"rank3_synthetic", {{"points", points}, {"seed", seed}}},
                     {"external", {{"g", params.g}, {"omega", params.omega}, {"kappa", params.kappa}}},
                     {"tolerance", gate}};
  echo_config(eff, {});
  const InvariantChart chart = constant_wave_chart(3, seed, params);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double b = 0, cc = 0, d = 0, e = 0;
  for (std::size_t n = 0; n < points; ++n) {
    const std::array<double, 3> r{U(rng), U(rng), U(rng)};
    const auto res = rank3_condition_residuals(chart, r);
    b = std::max(b, res.max_b());
    cc = std::max(cc, res.max_c());
    d = std::max(d, res.max_d());
    e = std::max(e, res.max_e());
  }
  std::cout << "# rank-3 condition audit, constant wave vectors\n";
  kv("points", std::to_string(points));
  kv("audit3.b", fmt(b));
  kv("audit3.c", fmt(cc));
  kv("audit3.d", fmt(d));
  kv("audit3.e", fmt(e));
  const double worst = std::max({b, cc, d, e});
  gate_line("rank3", worst <= gate, "max " + fmt(worst) + " <= " + fmt_short(gate));
  return worst <= gate ? kPass : kGateFailure;
}

// ---------------------------------------------------------------------------
// dispersion

WaveFamily wave_from_string(const std::string& s) {
  static const std::map<std::string, WaveFamily> names{
      {"entropic", WaveFamily::Entropic},          {"acoustic+", WaveFamily::AcousticPlus},
      {"acoustic-", WaveFamily::AcousticMinus},    {"inhom-entropic", WaveFamily::InhomEntropic},
      {"inhom-acoustic", WaveFamily::InhomAcoustic}, {"hydrodynamic", WaveFamily::Hydrodynamic}};
  const auto it = names.find(s);
  if (it == names.end())
    throw UsageError("--wave: unknown family '" + s +
                     "' (entropic, acoustic+, acoustic-, inhom-entropic, inhom-acoustic, hydrodynamic)");
  return it->second;
}

struct DispersionArgs {
  std::vector<double> state;
  std::string wave;
  std::vector<double> direction{1.0, 0.0, 0.0};
  std::optional<double> lambda0;
  int epsilon = 1;
  std::vector<double> g{0.0, 0.0, 0.0};
  std::vector<double> omega{0.0, 0.0, 0.0};
  double kappa = 1.4;
};

int cmd_dispersion(const Common& c, const DispersionArgs& a) {
  const auto tol = ToleranceOverrides::parse(c.tolerance, "dispersion");
  tol.require_known({"dispersion"});
  const double gate = tol.get("dispersion", 1e-10);
  ExternalParams params{{a.g[0], a.g[1], a.g[2]}, {a.omega[0], a.omega[1], a.omega[2]}, a.kappa};
  if (!c.config.empty()) params = load_config(c.config).instance.external;
  const FluidState u{{a.state[0], a.state[1], a.state[2]}, a.state[3], a.state[4]};
  if (!u.physical()) throw UsageError("--state: rho and p must be positive and finite");
  const WaveFamily fam = wave_from_string(a.wave);
  WaveVector wv;
  try {
    params.validate();
    wv = make_wave_vector(fam, {a.direction[0], a.direction[1], a.direction[2]}, u, params, a.epsilon, a.lambda0);
  } catch (const DomainError& e) {
    throw UsageError(std::string("dispersion: ") + e.what());
  }

  nlohmann::json eff{{"command", "dispersion"},
                     {"state", a.state},
                     {"wave", a.wave},
                     {"direction", a.direction},
                     {"epsilon", a.epsilon},
                     {"external", {{"g", params.g}, {"omega", params.omega}, {"kappa", params.kappa}}},
                     {"tolerance", gate}};
  if (a.lambda0) eff["lambda0"] = *a.lambda0;
  echo_config(eff, {});

  const double scale = characteristic_scale(wv, u, params);
  const double disp = dispersion_value(wv, u, params);
  const double det = characteristic_det(wv, u, params);
  kv("family", std::string(to_string(wv.family)));
  kv("lambda0", fmt(wv.lambda0));
  kv("lambda", fmt_list(wv.lambda));
  kv("dispersion", fmt(disp));
  kv("characteristic_det", fmt(det));
  kv("scale", fmt(scale));
  kv("inhom_rank_condition", inhom_rank_condition(wv, u, params) ? "holds" : "fails");
  if (fam == WaveFamily::Hydrodynamic) {
    const bool ok = std::abs(det) > gate * scale;
    gate_line("non_characteristic", ok, "|det| " + fmt(std::abs(det)) + " > " + fmt_short(gate * scale));
    return ok ? kPass : kGateFailure;
  }
  const bool ok = std::abs(disp) <= gate * scale && std::abs(det) <= gate * scale;
  gate_line("characteristic", ok,
            "max(|dispersion|, |det|) " + fmt(std::max(std::abs(disp), std::abs(det))) + " <= " + fmt_short(gate * scale));
  return ok ? kPass : kGateFailure;
}

// ---------------------------------------------------------------------------
// catastrophe

double reference_time(const SolutionInstance& inst, bool& exact) {
  exact = inst.fn("B").kind == ProfileKind::affine;
  return exact ? catastrophe_time(inst) : linearized_catastrophe_time(inst);
}

int cmd_catastrophe(const Common& c) {
  const auto tol = ToleranceOverrides::parse(c.tolerance, "catastrophe");
  tol.require_known({"catastrophe"});
  const RunConfig cfg = load_validated(c);
  if (cfg.instance.family != Family::E0Aplus) throw ConfigError("catastrophe: only the E0Aplus family has a T0 formula");
  bool exact = false;
  const double t0 = reference_time(cfg.instance, exact);
  const double gate = tol.get("catastrophe", exact ? 1e-4 : 0.25);
  echo_config(effective(cfg, "catastrophe", tol), {});

  std::vector<Vec3> positions = cfg.catastrophe.positions;
  if (positions.empty()) {
    // With affine B the blow-up is uniform in x; the centre point keeps r1 bounded.
    positions = exact ? blowup_scan_line(cfg.instance, 1, 0.0)
                      : blowup_scan_line(cfg.instance, cfg.catastrophe.line_count, cfg.catastrophe.half_width);
  }
  const double t_max = cfg.catastrophe.t_max_factor * t0;
  const auto hit = empirical_blowup_time(cfg.instance, positions, t_max, cfg.catastrophe.n_scan);
  const double rel = std::abs(hit.time - t0) / t0;
  kv("B", std::string(to_string(cfg.instance.fn("B").kind)));
  kv("T0", fmt(t0));
  kv("T0_kind", exact ? "closed form (affine B)" : "first-order estimate with B'(0)");
  kv("positions", std::to_string(positions.size()));
  kv("empirical_time", fmt(hit.time));
  kv("empirical_x", fmt_list(hit.x));
  kv("relative_difference", fmt(rel));
  gate_line("catastrophe", rel <= gate, "relative " + fmt(rel) + " <= " + fmt_short(gate));
  return rel <= gate ? kPass : kGateFailure;
}

// ---------------------------------------------------------------------------
// oracle

void write_grid_csv(const fs::path& path, const GridField& f) {
  auto os = open_csv(path);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const GridSpec& g = f.grid;
  for (std::size_t i = 0; i < g.n[0]; ++i)
    for (std::size_t j = 0; j < g.n[1]; ++j)
      for (std::size_t k = 0; k < g.n[2]; ++k) {
        EvaluationResult e;
        e.state = f.at(g.index(i, j, k));
        e.r = {nan, nan};
        e.detM1 = nan;
        e.in_domain = true;
        write_csv_row(os, f.t, g.node(i, j, k), e);
      }
}

int cmd_oracle(const Common& c, std::optional<std::size_t> resolution, std::optional<std::size_t> steps,
               bool refine) {
  auto tol = ToleranceOverrides::parse(c.tolerance, "linf");
  tol.require_known({"linf", "ratio_lo", "ratio_hi"});
  RunConfig cfg = load_validated(c);
  if (resolution) cfg.oracle.resolution = *resolution;
  if (steps) cfg.oracle.steps = *steps;
  const auto& O = cfg.oracle;
  if (O.resolution < 5) throw UsageError("oracle: resolution must be at least 5");
  if (!(O.t_end > 0.0)) throw ConfigError("oracle: t_end must be positive");

  const std::size_t n_coarse = O.resolution;
  const std::size_t n_fine = refine ? 2 * O.resolution : O.resolution;
  const GridSpec fine{{n_fine, n_fine, n_fine}, O.lo, O.hi};
  const GridField fine0 = sample_exact(cfg.instance, fine, 0.0);
  const double speed = max_wave_speed(fine0, cfg.instance.external);
  const double h_fine = std::min({fine.spacing(0), fine.spacing(1), fine.spacing(2)});
  std::size_t k = O.steps.value_or(0);
  if (k == 0) k = static_cast<std::size_t>(std::ceil(O.t_end * speed / (O.cfl * h_fine)));
  const double dt = O.t_end / static_cast<double>(k);
  cfg.oracle.steps = k;

  Vec3 box_lo{}, box_hi{};
  for (std::size_t a = 0; a < 3; ++a) {
    const double w = O.hi[a] - O.lo[a];
    box_lo[a] = O.compare_lo ? (*O.compare_lo)[a] : O.lo[a] + 0.25 * w;
    box_hi[a] = O.compare_hi ? (*O.compare_hi)[a] : O.hi[a] - 0.25 * w;
  }
  const fs::path dir = output_dir(c);
  const std::string name = stem(cfg, "oracle");
  echo_config(effective(cfg, "oracle", tol), dir / (name + ".config.json"));

  kv("hyperviscosity_nu", fmt(O.nu));
  kv("dt", fmt(dt));
  kv("steps", std::to_string(k));
  kv("t_end", fmt(O.t_end));
  kv("max_wave_speed", fmt(speed));
  kv("compare_box", "[" + fmt_list(box_lo) + "] .. [" + fmt_list(box_hi) + "]");

  const auto start = std::chrono::steady_clock::now();
  std::vector<double> linf;
  for (std::size_t n : refine ? std::vector<std::size_t>{n_coarse, n_fine} : std::vector<std::size_t>{n_coarse}) {
    const GridSpec g{{n, n, n}, O.lo, O.hi};
    const double h = std::min({g.spacing(0), g.spacing(1), g.spacing(2)});
    std::size_t cells = std::numeric_limits<std::size_t>::max();
    for (std::size_t a = 0; a < 3; ++a) {
      const double gap = std::min(box_lo[a] - O.lo[a], O.hi[a] - box_hi[a]);
      cells = std::min(cells, static_cast<std::size_t>(std::max(0.0, std::floor(gap / g.spacing(a) + 1e-9))));
    }
    const std::size_t need = minimum_margin(dt, k, speed, h);
    if (cells < need)
      throw ConfigError("oracle: comparison box is " + std::to_string(cells) + " cells from the boundary, " +
                        std::to_string(need) + " needed on the " + std::to_string(n) + "^3 grid");
    const GridField start_field = n == n_fine ? fine0 : sample_exact(cfg.instance, g, 0.0);
    const GridField out = integrate(start_field, cfg.instance.external, dt, k, {O.nu, O.cfl});
    const FieldErrors err = compare_box(cfg.instance, out, box_lo, box_hi);
    const std::string p = "grid" + std::to_string(n);
    kv(p + ".nodes_compared", std::to_string(err.nodes));
    kv(p + ".margin_cells", std::to_string(cells) + " (required " + std::to_string(need) + ")");
    kv(p + ".linf", fmt_list(err.linf));
    kv(p + ".l2", fmt_list(err.l2));
    kv(p + ".linf_max", fmt(err.max_linf()));
    if (n == n_coarse) write_grid_csv(dir / (name + ".csv"), out);
    linf.push_back(err.max_linf());
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  kv("runtime_seconds", fmt(seconds));
  kv("csv", (dir / (name + ".csv")).string());

  bool ok = true;
  if (tol.values.count("linf")) {
    const bool pass = linf.back() <= tol.values.at("linf");
    gate_line("linf", pass, fmt(linf.back()) + " <= " + fmt_short(tol.values.at("linf")));
    ok = ok && pass;
  }
  if (refine) {
    const double ratio = linf[0] / linf[1];
    const double lo = tol.get("ratio_lo", 3.2), hi = tol.get("ratio_hi", 4.8);
    kv("refinement_ratio", fmt(ratio));
    const bool pass = ratio >= lo && ratio <= hi;
    gate_line("refinement", pass, fmt(ratio) + " in [" + fmt_short(lo) + ", " + fmt_short(hi) + "]");
    ok = ok && pass;
  }
  return ok ? kPass : kGateFailure;
}

// ---------------------------------------------------------------------------
// figure-data

int cmd_figure(const Common& c, const std::string& kind) {
  const auto tol = ToleranceOverrides::parse(c.tolerance, "singularity");
  tol.require_known({"singularity"});
  const RunConfig cfg = load_validated(c);
  const FigureSlice& s = kind == "density" ? cfg.density : cfg.quiver;
  std::vector<double> times;
  if (s.times) {
    times = *s.times;
  } else if (kind == "quiver") {
    times = {0.0, 1.0};
  } else {
    if (cfg.instance.family != Family::E0Aplus)
      throw ConfigError("figure-data: /figure/density/times is required outside the E0Aplus family");
    bool exact = false;
    const double t0 = reference_time(cfg.instance, exact);
    times = {0.0, 0.9 * t0};
  }
  const fs::path dir = output_dir(c);
  const std::string name = stem(cfg, kind);
  auto eff = effective(cfg, "figure-data", tol);
  eff["figure_kind"] = kind;
  eff["figure_times"] = times;
  echo_config(eff, dir / (name + ".config.json"));

  EvaluateOptions opts;
  opts.singularity_threshold = tol.get("singularity", opts.singularity_threshold);
  const auto as = span_points(s.range[0][0], s.range[0][1], s.n);
  const auto bs = span_points(s.range[1][0], s.range[1][1], s.n);
  auto os = open_csv(dir / (name + ".csv"));
  std::size_t inside = 0, rows = 0;
  for (double t : times)
    for (double a : as)
      for (double b : bs) {
        Vec3 x = s.origin;
        x[static_cast<std::size_t>(s.axes[0])] += a;
        x[static_cast<std::size_t>(s.axes[1])] += b;
        const auto e = evaluate(cfg.instance, t, x, opts);
        write_csv_row(os, t, x, e);
        ++rows;
        if (e.in_domain) ++inside;
      }
  kv("figure", kind);
  kv("times", fmt_list(times));
  kv("grid", std::to_string(s.n) + "x" + std::to_string(s.n));
  kv("rows", std::to_string(rows));
  kv("in_domain", std::to_string(inside));
  kv("csv", (dir / (name + ".csv")).string());
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rank-2 Riemann-invariant solutions of the rotating Euler equations: evaluation and verification"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  Common common;
  auto* catalog = app.add_subcommand("catalog", "list families, constraints and the superposition table");
  catalog->add_option("--out", common.out, "accepted for uniformity; unused");
  catalog->add_option("--tolerance", common.tolerance, "accepted for uniformity; unused");

  auto* eval = app.add_subcommand("eval", "evaluate on a grid and write CSV");
  add_common(eval, common, true);

  auto* verify = app.add_subcommand("verify", "PDE residual, rank and audit gates");
  add_common(verify, common, true);

  bool rank3 = false;
  std::size_t rank3_points = 1000;
  std::uint64_t rank3_seed = 1;
  auto* audit = app.add_subcommand("audit", "trace-condition residuals");
  add_common(audit, common, false);
  audit->add_flag("--rank3", rank3, "audit synthetic rank-3 charts with constant wave vectors");
  audit->add_option("--points", rank3_points, "rank-3 sample count");
  audit->add_option("--seed", rank3_seed, "rank-3 seed");

  DispersionArgs disp;
  auto* dispersion = app.add_subcommand("dispersion", "check a wave vector against the dispersion relation");
  add_common(dispersion, common, false);
  dispersion->add_option("--state", disp.state, "v1 v2 v3 rho p")->expected(5)->required();
  dispersion->add_option("--wave", disp.wave, "wave family")->required();
  dispersion->add_option("--direction", disp.direction, "lambda (3 components)")->expected(3);
  dispersion->add_option("--lambda0", disp.lambda0, "lambda0 for hydrodynamic waves");
  dispersion->add_option("--epsilon", disp.epsilon, "sign for inhom-acoustic waves");
  dispersion->add_option("--g", disp.g, "gravity")->expected(3);
  dispersion->add_option("--omega", disp.omega, "rotation vector")->expected(3);
  dispersion->add_option("--kappa", disp.kappa, "polytropic coefficient");

  auto* catastrophe = app.add_subcommand("catastrophe", "T0 formula against the empirical det M1 root");
  add_common(catastrophe, common, true);

  std::optional<std::size_t> resolution, steps;
  bool no_refine = false;
  auto* oracle = app.add_subcommand("oracle", "integrate the Euler system and compare with the exact solution");
  add_common(oracle, common, true);
  oracle->add_option("--resolution", resolution, "nodes per axis on the coarse grid");
  oracle->add_option("--steps", steps, "RK4 steps to t_end");
  oracle->add_flag("--no-refine", no_refine, "single grid, no refinement ratio");

  std::string figure_kind;
  auto* figure = app.add_subcommand("figure-data", "grids for the density and velocity-field figures");
  add_common(figure, common, true);
  figure->add_option("--figure", figure_kind, "density or quiver")
      ->required()
      ->check(CLI::IsMember({"density", "quiver"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsageError;
  }

  try {
    if (*catalog) return cmd_catalog();
    if (*eval) return cmd_eval(common);
    if (*verify) return cmd_verify(common);
    if (*audit) return cmd_audit(common, rank3, rank3_points, rank3_seed);
    if (*dispersion) return cmd_dispersion(common, disp);
    if (*catastrophe) return cmd_catastrophe(common);
    if (*oracle) return cmd_oracle(common, resolution, steps, !no_refine);
    if (*figure) return cmd_figure(common, figure_kind);
  } catch (const ConfigError& e) {
    std::cerr << "rinv: config error: " << e.what() << "\n";
    return kUsageError;
  } catch (const UsageError& e) {
    std::cerr << "rinv: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    std::cerr << "rinv: " << e.what() << "\n";
    return kGateFailure;
  }
  return kUsageError;
}
