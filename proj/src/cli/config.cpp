#include "scmimo/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "scmimo/errors.hpp"

namespace scmimo {

namespace {

const std::set<std::string> kTopKeys = {"M",     "K",      "P",         "d0",       "p_u_dB", "axis",
                                        "values", "trials", "receivers", "analytics", "fading", "zeta",
                                        "doas",  "seed",   "output",    "workers",  "cell"};
const std::set<std::string> kCellKeys = {"radius_m", "r_min_m", "pathloss_exponent", "shadowing_sigma_dB"};
const std::set<std::string> kAnalyticsKeys = {"mrc_approx", "zf_lower", "zf_upper", "mmse_exact"};

void reject_unknown(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& prefix) {
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError(prefix + key, "unknown key");
  }
}

template <class T>
T read(const YAML::Node& node, const std::string& key_path, const char* what) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(key_path, std::string("expected ") + what);
  }
}

const YAML::Node require(const YAML::Node& root, const std::string& key) {
  const YAML::Node n = root[key];
  if (!n) throw ConfigError(key, "missing required key");
  return n;
}

SweepAxis axis_from_string(const std::string& s) {
  if (s == "M") return SweepAxis::kM;
  if (s == "d0") return SweepAxis::kD0;
  if (s == "K") return SweepAxis::kK;
  if (s == "p_u_dB") return SweepAxis::kPuDb;
  throw ConfigError("axis", "must be one of M, d0, K, p_u_dB (got '" + s + "')");
}

bool is_integral_axis(SweepAxis axis) { return axis == SweepAxis::kM || axis == SweepAxis::kK; }

}  // namespace

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kM: return "M";
    case SweepAxis::kD0: return "d0";
    case SweepAxis::kK: return "K";
    case SweepAxis::kPuDb: return "p_u_dB";
  }
  return "?";
}

ScenarioConfig scenario_at(const SweepSpec& spec, double value) {
  ScenarioConfig c = spec.base;
  double p_db = spec.p_u_db;
  switch (spec.axis) {
    case SweepAxis::kM: c.M = static_cast<int>(value); break;
    case SweepAxis::kD0: c.d0 = value; break;
    case SweepAxis::kK: c.K = static_cast<int>(value); break;
    case SweepAxis::kPuDb: p_db = value; break;
  }
  c.p_u = db_to_linear(p_db);
  if (c.doas.empty()) c.doas = draw_doas(c.P, c.seed);
  return c;
}

void validate_spec(const SweepSpec& spec) {
  const auto& b = spec.base;
  if (b.M < 1) throw ConfigError("M", "must be >= 1");
  if (b.K < 1) throw ConfigError("K", "must be >= 1");
  if (b.P < 1) throw ConfigError("P", "must be >= 1");
  if (!std::isfinite(b.d0) || b.d0 <= 0.0) throw ConfigError("d0", "must be finite and > 0");
  if (!std::isfinite(spec.p_u_db)) throw ConfigError("p_u_dB", "must be finite");
  if (spec.values.empty()) throw ConfigError("values", "must not be empty");
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    const std::string key = "values[" + std::to_string(i) + "]";
    const double v = spec.values[i];
    if (!std::isfinite(v)) throw ConfigError(key, "must be finite");
    if (i > 0 && !(v > spec.values[i - 1])) throw ConfigError(key, "values must be strictly increasing");
    if (is_integral_axis(spec.axis) && (v != std::floor(v) || v < 1.0 || v > 1e6)) {
      throw ConfigError(key, "must be a positive integer for axis " + to_string(spec.axis));
    }
  }
  if (spec.trials < kMinTrials) {
    throw ConfigError("trials", "must be >= " + std::to_string(kMinTrials));
  }
  if (spec.receivers.empty()) throw ConfigError("receivers", "must list at least one receiver");
  if (!spec.random_doas()) {
    if (static_cast<int>(b.doas.size()) != b.P) {
      throw ConfigError("doas", "expected " + std::to_string(b.P) + " angles, got " +
                                    std::to_string(b.doas.size()));
    }
    for (std::size_t i = 0; i < b.doas.size(); ++i) {
      if (!std::isfinite(b.doas[i]) || std::abs(b.doas[i]) > std::numbers::pi / 2 + 1e-12) {
        throw ConfigError("doas[" + std::to_string(i) + "]", "must lie in [-pi/2, pi/2]");
      }
    }
  }
  if (b.fading == FadingMode::kPathlossShadowing) {
    const auto& c = b.cell;
    if (!(c.r_min_m > 0.0)) throw ConfigError("cell.r_min_m", "must be > 0");
    if (!(c.radius_m > c.r_min_m)) throw ConfigError("cell.radius_m", "must exceed cell.r_min_m");
    if (c.r_min_m >= c.radius_m * std::numbers::sqrt3 / 2) {
      throw ConfigError("cell.r_min_m", "must be below the hexagon inradius radius_m*sqrt(3)/2");
    }
    if (!(c.pathloss_exponent >= 0.0)) throw ConfigError("cell.pathloss_exponent", "must be >= 0");
    if (!(c.shadowing_sigma_db >= 0.0)) throw ConfigError("cell.shadowing_sigma_dB", "must be >= 0");
  }
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    ScenarioConfig c = spec.base;
    switch (spec.axis) {
      case SweepAxis::kM: c.M = static_cast<int>(spec.values[i]); break;
      case SweepAxis::kD0: c.d0 = spec.values[i]; break;
      case SweepAxis::kK: c.K = static_cast<int>(spec.values[i]); break;
      case SweepAxis::kPuDb: break;
    }
    const std::string where =
        spec.axis == SweepAxis::kPuDb ? std::string("K") : "values[" + std::to_string(i) + "]";
    if (c.K > c.P) {
      throw ConfigError(spec.axis == SweepAxis::kK ? where : "K",
                        "K <= P required (K=" + std::to_string(c.K) + ", P=" + std::to_string(c.P) + ")");
    }
    if (c.P > c.M) {
      throw ConfigError(spec.axis == SweepAxis::kM ? where : "P",
                        "P <= M required (P=" + std::to_string(c.P) + ", M=" + std::to_string(c.M) + ")");
    }
  }
}

SweepSpec parse_config(std::istream& in) {
  YAML::Node root;
  try {
    root = YAML::Load(in);
  } catch (const YAML::Exception& e) {
    throw ConfigError("", std::string("malformed document: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("", "configuration must be a mapping");
  reject_unknown(root, kTopKeys, "");

  SweepSpec spec;
  auto& b = spec.base;
  b.M = read<int>(require(root, "M"), "M", "an integer");
  b.K = read<int>(require(root, "K"), "K", "an integer");
  b.P = read<int>(require(root, "P"), "P", "an integer");
  b.d0 = read<double>(require(root, "d0"), "d0", "a number");
  spec.p_u_db = read<double>(require(root, "p_u_dB"), "p_u_dB", "a number");
  spec.axis = axis_from_string(read<std::string>(require(root, "axis"), "axis", "a string"));
  const YAML::Node values = require(root, "values");
  if (!values.IsSequence()) throw ConfigError("values", "expected a list");
  for (std::size_t i = 0; i < values.size(); ++i) {
    spec.values.push_back(read<double>(values[i], "values[" + std::to_string(i) + "]", "a number"));
  }

  if (const auto n = root["trials"]) {
    const auto t = read<long long>(n, "trials", "an integer");
    if (t < 0) throw ConfigError("trials", "must be >= " + std::to_string(kMinTrials));
    spec.trials = static_cast<std::size_t>(t);
  }
  if (const auto n = root["receivers"]) {
    if (!n.IsSequence()) throw ConfigError("receivers", "expected a list");
    std::vector<Receiver> rs;
    for (std::size_t i = 0; i < n.size(); ++i) {
      const std::string key = "receivers[" + std::to_string(i) + "]";
      const auto name = read<std::string>(n[i], key, "a receiver name");
      Receiver r;
      try {
        r = receiver_from_string(name);
      } catch (const std::exception&) {
        throw ConfigError(key, "unknown receiver '" + name + "' (MRC, ZF or MMSE)");
      }
      if (std::find(rs.begin(), rs.end(), r) != rs.end()) throw ConfigError(key, "duplicate receiver");
      rs.push_back(r);
    }
    std::sort(rs.begin(), rs.end());
    spec.receivers = rs;
  }
  if (const auto n = root["analytics"]) {
    if (!n.IsMap()) throw ConfigError("analytics", "expected a mapping");
    reject_unknown(n, kAnalyticsKeys, "analytics.");
    auto flag = [&](const char* key, bool& out) {
      if (const auto v = n[key]) out = read<bool>(v, std::string("analytics.") + key, "true or false");
    };
    flag("mrc_approx", spec.analytics.mrc_approx);
    flag("zf_lower", spec.analytics.zf_lower);
    flag("zf_upper", spec.analytics.zf_upper);
    flag("mmse_exact", spec.analytics.mmse_exact);
  }
  if (const auto n = root["fading"]) {
    const auto s = read<std::string>(n, "fading", "a string");
    if (s == "unit") {
      b.fading = FadingMode::kUnit;
    } else if (s == "pathloss_shadowing") {
      b.fading = FadingMode::kPathlossShadowing;
    } else {
      throw ConfigError("fading", "must be unit or pathloss_shadowing (got '" + s + "')");
    }
  }
  if (const auto n = root["zeta"]) {
    const auto s = read<std::string>(n, "zeta", "a string");
    if (s == "fixed") {
      b.profile_mode = ProfileMode::kFixed;
    } else if (s == "per_trial") {
      b.profile_mode = ProfileMode::kPerTrial;
    } else {
      throw ConfigError("zeta", "must be fixed or per_trial (got '" + s + "')");
    }
  }
  if (const auto n = root["doas"]) {
    if (n.IsScalar()) {
      if (n.as<std::string>() != "random") throw ConfigError("doas", "expected 'random' or a list of angles");
    } else if (n.IsSequence()) {
      for (std::size_t i = 0; i < n.size(); ++i) {
        b.doas.push_back(read<double>(n[i], "doas[" + std::to_string(i) + "]", "an angle in radians"));
      }
      if (b.doas.empty()) throw ConfigError("doas", "list must not be empty");
    } else {
      throw ConfigError("doas", "expected 'random' or a list of angles");
    }
  }
  if (const auto n = root["seed"]) b.seed = read<std::uint64_t>(n, "seed", "an unsigned 64-bit integer");
  if (const auto n = root["output"]) spec.output = read<std::string>(n, "output", "a path");
  if (const auto n = root["workers"]) spec.workers = read<unsigned>(n, "workers", "a non-negative integer");
  if (const auto n = root["cell"]) {
    if (!n.IsMap()) throw ConfigError("cell", "expected a mapping");
    reject_unknown(n, kCellKeys, "cell.");
    auto num = [&](const char* key, double& out) {
      if (const auto v = n[key]) out = read<double>(v, std::string("cell.") + key, "a number");
    };
    num("radius_m", b.cell.radius_m);
    num("r_min_m", b.cell.r_min_m);
    num("pathloss_exponent", b.cell.pathloss_exponent);
    num("shadowing_sigma_dB", b.cell.shadowing_sigma_db);
  }
  b.p_u = db_to_linear(spec.p_u_db);
  validate_spec(spec);
  return spec;
}

SweepSpec parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open configuration file '" + path + "'");
  return parse_config(in);
}

SweepSpec parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string serialize_config(const SweepSpec& spec) {
  const auto& b = spec.base;
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "M" << YAML::Value << b.M;
  out << YAML::Key << "K" << YAML::Value << b.K;
  out << YAML::Key << "P" << YAML::Value << b.P;
  out << YAML::Key << "d0" << YAML::Value << b.d0;
  out << YAML::Key << "p_u_dB" << YAML::Value << spec.p_u_db;
  out << YAML::Key << "axis" << YAML::Value << to_string(spec.axis);
  out << YAML::Key << "values" << YAML::Value << YAML::Flow << spec.values;
  out << YAML::Key << "trials" << YAML::Value << spec.trials;
  out << YAML::Key << "receivers" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (Receiver r : spec.receivers) out << to_string(r);
  out << YAML::EndSeq;
  out << YAML::Key << "analytics" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mrc_approx" << YAML::Value << spec.analytics.mrc_approx;
  out << YAML::Key << "zf_lower" << YAML::Value << spec.analytics.zf_lower;
  out << YAML::Key << "zf_upper" << YAML::Value << spec.analytics.zf_upper;
  out << YAML::Key << "mmse_exact" << YAML::Value << spec.analytics.mmse_exact;
  out << YAML::EndMap;
  out << YAML::Key << "fading" << YAML::Value << to_string(b.fading);
  out << YAML::Key << "zeta" << YAML::Value << to_string(b.profile_mode);
  out << YAML::Key << "doas" << YAML::Value;
  if (spec.random_doas()) {
    out << "random";
  } else {
    out << YAML::Flow << b.doas;
  }
  out << YAML::Key << "seed" << YAML::Value << b.seed;
  out << YAML::Key << "output" << YAML::Value << spec.output;
  out << YAML::Key << "workers" << YAML::Value << spec.workers;
  out << YAML::Key << "cell" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "radius_m" << YAML::Value << b.cell.radius_m;
  out << YAML::Key << "r_min_m" << YAML::Value << b.cell.r_min_m;
  out << YAML::Key << "pathloss_exponent" << YAML::Value << b.cell.pathloss_exponent;
  out << YAML::Key << "shadowing_sigma_dB" << YAML::Value << b.cell.shadowing_sigma_db;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace scmimo
