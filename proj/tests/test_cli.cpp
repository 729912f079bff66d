#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "scmimo/config.hpp"
#include "scmimo/errors.hpp"
#include "scmimo/sweep.hpp"

using namespace scmimo;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = "{M: 64, K: 4, P: 8, d0: 4, p_u_dB: 10, axis: M, values: [32, 64, 128]}";

std::string config_error_key(const std::string& text) {
  try {
    parse_config_string(text);
  } catch (const ConfigError& e) {
    return e.key_path();
  }
  return "<none>";
}

SweepSpec small_spec(const std::string& extra = "") {
  return parse_config_string("M: 16\nK: 2\nP: 4\nd0: 4\np_u_dB: 10\naxis: M\nvalues: [8, 16]\ntrials: 200\n" +
                             extra);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("scmimo_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("minimal config takes defaults") {
  const auto spec = parse_config_string(kMinimal);
  CHECK(spec.trials == 10000);
  CHECK(spec.receivers == std::vector<Receiver>{Receiver::kMrc, Receiver::kZf, Receiver::kMmse});
  CHECK(spec.analytics == AnalyticsSelection{});
  CHECK(spec.axis == SweepAxis::kM);
  CHECK(spec.values == std::vector<double>{32, 64, 128});
  CHECK(spec.random_doas());
  CHECK(spec.base.fading == FadingMode::kUnit);
  CHECK(spec.base.p_u == doctest::Approx(10.0));
  CHECK(spec.base.seed == 1);
}

TEST_CASE("constraint violations name the key") {
  CHECK(config_error_key("{M: 64, K: 10, P: 8, d0: 4, p_u_dB: 10, axis: M, values: [32]}") == "K");
  CHECK(config_error_key("{M: 64, K: 4, P: 8, d0: 4, p_u_dB: 10, axis: M, values: [32, 4]}") == "values[1]");
  CHECK(config_error_key("{K: 4, P: 8, d0: 4, p_u_dB: 10, axis: M, values: [32]}") == "M");
  CHECK(config_error_key("{M: 64, K: 4, P: 8, d0: 4, p_u_dB: 10, axis: M, values: [32], colour: red}") ==
        "colour");
  CHECK(config_error_key(
            "{M: 64, K: 4, P: 8, d0: 4, p_u_dB: 10, axis: M, values: [32], cell: {r_min: 3}}") ==
        "cell.r_min");
  CHECK(config_error_key("{M: 64, K: 4, P: 8, d0: 4, p_u_dB: 10, axis: Q, values: [32]}") == "axis");
  CHECK(config_error_key("{M: 64, K: 4, P: 8, d0: 4, p_u_dB: 10, axis: M, values: [32], trials: 10}") ==
        "trials");
  CHECK(config_error_key("{M: 64, K: 4, P: 3, d0: 4, p_u_dB: 10, axis: K, values: [2]}") == "<none>");
  CHECK_THROWS_AS(parse_config_string("M: [unclosed"), ConfigError);
}

TEST_CASE("serialize then parse is the identity") {
  const std::vector<std::string> docs{
      kMinimal,
      "{M: 100, K: 6, P: 12, d0: 2.5, p_u_dB: 7.3, axis: d0, values: [1, 2, 4, 8], receivers: [ZF],"
      " fading: pathloss_shadowing, zeta: per_trial, seed: 99, trials: 500, workers: 2, output: res,"
      " analytics: {mrc_approx: false}, cell: {radius_m: 500, r_min_m: 35}}",
      "{M: 8, K: 1, P: 2, d0: 1, p_u_dB: -3, axis: p_u_dB, values: [-10, 0.1], doas: [0.3, -1.1]}"};
  for (const auto& doc : docs) {
    const auto a = parse_config_string(doc);
    const auto b = parse_config_string(serialize_config(a));
    CHECK(a == b);
    CHECK(serialize_config(a) == serialize_config(b));
  }
}

TEST_CASE("scenario at each axis value") {
  const auto spec = parse_config_string("{M: 64, K: 2, P: 8, d0: 4, p_u_dB: 10, axis: p_u_dB, values: [0, 20]}");
  CHECK(scenario_at(spec, 20).p_u == doctest::Approx(100.0));
  CHECK(scenario_at(spec, 0).doas.size() == 8);
  CHECK(scenario_at(spec, 0).doas == scenario_at(spec, 20).doas);
}

TEST_CASE("CSV layout") {
  const auto spec = small_spec();
  const auto rows = run_sweep(spec);
  CHECK(rows.size() == 6);
  const auto csv = format_csv(rows);
  CHECK(csv.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  CHECK(csv.find("8,MRC,") != std::string::npos);
  CHECK(csv.find("16,MMSE,") != std::string::npos);
  for (const auto& r : rows) CHECK(r.se_mc.has_value());
}

TEST_CASE("empty analytics keep the header") {
  const auto spec = small_spec(
      "analytics: {mrc_approx: false, zf_lower: false, zf_upper: false, mmse_exact: false}\n");
  const auto rows = run_sweep(spec);
  for (const auto& r : rows) {
    CHECK_FALSE(r.mrc_approx.has_value());
    CHECK_FALSE(r.zf_lower.has_value());
    CHECK_FALSE(r.zf_upper.has_value());
    CHECK_FALSE(r.mmse_exact.has_value());
  }
  const auto csv = format_csv(rows);
  CHECK(csv.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) CHECK(line.find(",,,,") != std::string::npos);
}

TEST_CASE("repeated runs are byte-identical") {
  auto spec = small_spec("fading: pathloss_shadowing\nzeta: per_trial\n");
  const auto a = format_csv(run_sweep(spec));
  spec.workers = 3;
  CHECK(format_csv(run_sweep(spec)) == a);
  CHECK(spec_hash(spec).size() == 64);
}

TEST_CASE("single-point plot has markers only") {
  const auto spec = parse_config_string("{M: 16, K: 2, P: 4, d0: 4, p_u_dB: 10, axis: M, values: [16], trials: 200}");
  const auto svg = render_svg(run_sweep(spec), spec);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("<polyline") == std::string::npos);
  CHECK(svg.find("<circle") != std::string::npos);
}

TEST_CASE("outputs are written") {
  auto spec = small_spec();
  spec.output = scratch_dir("emit").string();
  const auto rows = run_sweep(spec);
  const auto files = emit_outputs(rows, spec);
  CHECK(read_file(files.csv) == format_csv(rows));
  CHECK(read_file(files.svg).find("</svg>") != std::string::npos);
  const auto manifest = read_file(files.manifest);
  CHECK(manifest.find(spec_hash(spec)) != std::string::npos);
  CHECK(manifest.find(version_string()) != std::string::npos);
  fs::remove_all(spec.output);
}

TEST_CASE("unwritable output directory") {
  const auto dir = scratch_dir("blocked");
  fs::create_directories(dir);
  std::ofstream(dir / "file") << "x";
  CHECK_THROWS_AS(prepare_output_dir((dir / "file" / "sub").string()), IoError);
  auto spec = small_spec();
  spec.output = (dir / "file" / "sub").string();
  const auto rows = run_sweep(spec);
  CHECK_THROWS_AS(emit_outputs(rows, spec), IoError);
  CHECK(rows.size() == 6);
  fs::remove_all(dir);
}
