#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "rinv/config.hpp"
#include "rinv/csv.hpp"

using namespace rinv;

namespace {

const char* kMinimal = R"({
  "family": "E0E",
  "external": { "g": [1.0, 0.0, -1.0], "omega": [1.0, 0.5, 1.0], "kappa": 1.4 },
  "params": { "c0": 0.7, "lambda1": [1.0, 0.0, -1.0] },
  "functions": {
    "p":  { "kind": "polynomial", "coefficients": [2.0, 1.0] },
    "v3": { "kind": "sine", "coefficients": [1.0, 1.0, 0.0, 0.0], "weights": [1.0, 1.0] }
  }
})";

std::string message_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("config parse and defaults") {
  const auto cfg = parse_config_text(kMinimal);
  CHECK(cfg.instance.family == Family::E0E);
  CHECK(cfg.instance.params.c0 == 0.7);
  CHECK(cfg.instance.fn("v3").weights[1] == 1.0);
  CHECK(cfg.samples.count == 100);
  CHECK(cfg.tolerances.residual == 1e-6);
  CHECK(cfg.tolerances.audit == 1e-8);
  CHECK(cfg.oracle.resolution == 16);
  CHECK_FALSE(cfg.output.has_value());
}

TEST_CASE("effective configuration round-trips") {
  const auto cfg = parse_config_text(kMinimal);
  const auto j = to_json(cfg);
  const auto again = parse_config(j);
  CHECK(to_json(again) == j);
  CHECK(j.contains("tolerances"));
  CHECK(j.contains("samples"));
}

TEST_CASE("config errors name the problem") {
  CHECK(message_of("{ \"family\": ").find("malformed JSON") != std::string::npos);

  auto j = nlohmann::json::parse(kMinimal);
  j["params"]["c9"] = 1.0;
  const auto unknown = message_of(j.dump());
  CHECK(unknown.find("unknown key 'c9'") != std::string::npos);
  CHECK(unknown.find("/params") != std::string::npos);

  j = nlohmann::json::parse(kMinimal);
  j["family"] = "E7E";
  CHECK(message_of(j.dump()).find("E7E") != std::string::npos);

  j = nlohmann::json::parse(kMinimal);
  j["functions"]["B"] = {{"kind", "affine"}, {"coefficients", {0.0, 1.0}}};
  CHECK(message_of(j.dump()).find("'B'") != std::string::npos);

  j = nlohmann::json::parse(kMinimal);
  j["external"]["kappa"] = "high";
  CHECK_FALSE(message_of(j.dump()).empty());

  j = nlohmann::json::parse(kMinimal);
  j["samples"] = {{"count", -3}};
  CHECK_FALSE(message_of(j.dump()).empty());

  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("csv formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);

  std::ostringstream os;
  write_csv_header(os);
  EvaluationResult in;
  in.in_domain = true;
  in.state = FluidState{{1, 2, 3}, 4, 5};
  in.r = {0.5, -0.5};
  in.detM1 = 0.75;
  write_csv_row(os, 0.25, {1, 2, 3}, in);
  EvaluationResult out;
  write_csv_row(os, 0.0, {0, 0, 0}, out);
  std::istringstream is(os.str());
  std::string header, row1, row2;
  std::getline(is, header);
  std::getline(is, row1);
  std::getline(is, row2);
  CHECK(header == kCsvHeader);
  CHECK(row1 == "0.25,1,2,3,0.5,-0.5,1,2,3,4,5,0.75,1");
  CHECK(row2 == "0,0,0,0,nan,nan,nan,nan,nan,nan,nan,nan,0");
}
