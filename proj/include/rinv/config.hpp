#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rinv/sampling.hpp"
#include "rinv/solutions.hpp"
#include "rinv/verify.hpp"

namespace rinv {

/// Regular (t, x, y, z) grid for `eval`: every time in `times` crossed with
/// n[0] x n[1] x n[2] nodes spanning [lo, hi] inclusively.
struct EvalGridSpec {
  std::vector<double> times{0.0};
  Vec3 lo{-1.0, -1.0, -1.0};
  Vec3 hi{1.0, 1.0, 1.0};
  std::array<std::size_t, 3> n{11, 11, 1};
};

struct OracleSpec {
  Vec3 lo{-3.14159265358979323846, -3.14159265358979323846, -3.14159265358979323846};
  Vec3 hi{3.14159265358979323846, 3.14159265358979323846, 3.14159265358979323846};
  std::size_t resolution = 16;
  double t_end = 0.02;
  /// Default: the fewest steps satisfying the CFL bound on the finest grid.
  std::optional<std::size_t> steps;
  double nu = 0.05;
  double cfl = 0.25;
  /// Physical box compared on every grid; default is the central half of [lo, hi].
  std::optional<Vec3> compare_lo;
  std::optional<Vec3> compare_hi;
};

struct CatastropheSpec {
  /// Explicit scan positions; empty selects a line along lambda1 through the
  /// characteristic that carries r1 = 0.
  std::vector<Vec3> positions;
  double half_width = 3.0;
  std::size_t line_count = 121;
  double t_max_factor = 2.0;
  std::size_t n_scan = 400;
};

/// Planar slice for figure data: origin + a e_{axes[0]} + b e_{axes[1]}.
struct FigureSlice {
  std::optional<std::vector<double>> times;
  Vec3 origin{0.0, 0.0, 0.0};
  std::array<int, 2> axes{0, 1};
  std::array<std::array<double, 2>, 2> range{{{-1.0, 1.0}, {-1.0, 1.0}}};
  std::size_t n = 201;
};

struct RunConfig {
  SolutionInstance instance;
  SampleSpec samples;
  Tolerances tolerances;
  EvalGridSpec eval;
  OracleSpec oracle;
  CatastropheSpec catastrophe;
  FigureSlice density;
  FigureSlice quiver;
  std::optional<std::string> output;
};

/// Schema-checked parse. Unknown keys, wrong types and malformed JSON all
/// throw ConfigError naming the offending key path (or line and column).
RunConfig parse_config(const nlohmann::json& j);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

/// The effective configuration, defaults filled in.
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace rinv
