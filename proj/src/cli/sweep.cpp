#include "scmimo/sweep.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>

#include "scmimo/analytic.hpp"
#include "scmimo/errors.hpp"
#include "scmimo/monte_carlo.hpp"

#ifndef SCMIMO_VERSION
#define SCMIMO_VERSION "0.0.0"
#endif

namespace scmimo {

const char* version_string() { return SCMIMO_VERSION; }

namespace {

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r' || c == ';') c = ' ';
  }
  return s;
}

struct PointAnalytics {
  std::optional<double> mrc, zf_lower, zf_upper, mmse;
  std::vector<std::string> flags;
};

PointAnalytics evaluate_point(const SweepSpec& spec, const ScenarioConfig& c, const SteeringSet& steering) {
  PointAnalytics out;
  const auto& sel = spec.analytics;
  if (!sel.mrc_approx && !sel.zf_lower && !sel.zf_upper && !sel.mmse_exact) return out;
  const AnalyticEvaluator ev(steering.betas, c.M, c.K, c.p_u);
  out.flags = ev.flags();

  const bool per_trial = c.fading == FadingMode::kPathlossShadowing && c.profile_mode == ProfileMode::kPerTrial;
  if (!per_trial) {
    const auto z = fixed_profile(c).zetas;
    if (sel.mrc_approx) out.mrc = ev.mrc(z);
    if (sel.zf_lower) out.zf_lower = ev.zf_lower(z);
    if (sel.zf_upper) out.zf_upper = ev.zf_upper(z);
  } else {
    // Averaged over the same large-scale draws as the simulation.
    double mrc = 0.0, lo = 0.0, up = 0.0;
    bool lo_ok = true, up_ok = true;
    for (std::size_t t = 0; t < spec.trials; ++t) {
      const auto z = trial_profile(c, t).zetas;
      if (sel.mrc_approx) mrc += ev.mrc(z);
      if (sel.zf_lower) {
        const auto v = ev.zf_lower(z);
        lo_ok = lo_ok && v.has_value();
        if (v) lo += *v;
      }
      if (sel.zf_upper) {
        const auto v = ev.zf_upper(z);
        up_ok = up_ok && v.has_value();
        if (v) up += *v;
      }
    }
    const double n = static_cast<double>(spec.trials);
    if (sel.mrc_approx) out.mrc = mrc / n;
    if (sel.zf_lower && lo_ok) out.zf_lower = lo / n;
    if (sel.zf_upper && up_ok) out.zf_upper = up / n;
  }
  if (sel.mmse_exact) {
    if (c.fading == FadingMode::kUnit) {
      out.mmse = ev.mmse_unit();
    } else {
      out.flags.push_back("mmse_exact=unit_fading_only");
    }
  }
  return out;
}

std::string field(const std::optional<double>& v) {
  return v ? fmt::format("{:.6f}", *v) : std::string();
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  validate_spec(spec);
  std::vector<SweepRow> rows;
  for (double value : spec.values) {
    std::vector<SweepRow> point(spec.receivers.size());
    for (std::size_t i = 0; i < point.size(); ++i) {
      point[i].axis_value = value;
      point[i].receiver = spec.receivers[i];
    }
    try {
      const ScenarioConfig c = scenario_at(spec, value);
      const SteeringSet steering = build_steering_set(c.doas, c.M, c.d0);
      std::vector<std::string> common;
      if (steering.rank_deficient) common.push_back("rank_deficient");
      if (steering.repeated_eigenvalues) common.push_back("repeated_eigenvalues");
      if (c.fading == FadingMode::kPathlossShadowing) common.push_back("zeta=" + to_string(c.profile_mode));

      const auto estimates = mc_sum_se(c, steering, spec.receivers, McOptions{spec.trials, spec.workers});
      const PointAnalytics an = evaluate_point(spec, c, steering);
      for (std::size_t i = 0; i < point.size(); ++i) {
        SweepRow& row = point[i];
        row.se_mc = estimates[i].sum_se;
        row.ci95 = estimates[i].ci_halfwidth;
        row.flags = common;
        switch (row.receiver) {
          case Receiver::kMrc:
            row.mrc_approx = an.mrc;
            break;
          case Receiver::kZf:
            row.zf_lower = an.zf_lower;
            row.zf_upper = an.zf_upper;
            if (estimates[i].resampled > 0) {
              row.flags.push_back(fmt::format("resampled={}", estimates[i].resampled));
            }
            break;
          case Receiver::kMmse:
            row.mmse_exact = an.mmse;
            break;
        }
        for (const auto& f : an.flags) {
          if (f == "mmse_exact=unit_fading_only" && row.receiver != Receiver::kMmse) continue;
          row.flags.push_back(f);
        }
      }
    } catch (const std::exception& e) {
      for (auto& row : point) {
        row = SweepRow{row.axis_value, row.receiver, {}, {}, {}, {}, {}, {}, {}};
        row.flags.push_back("error=" + sanitize(e.what()));
      }
    }
    rows.insert(rows.end(), point.begin(), point.end());
  }
  return rows;
}

std::string format_csv(const std::vector<SweepRow>& rows) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : rows) {
    std::string flags;
    for (std::size_t i = 0; i < r.flags.size(); ++i) flags += (i ? ";" : "") + sanitize(r.flags[i]);
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.axis_value, to_string(r.receiver), field(r.se_mc),
                       field(r.ci95), field(r.mrc_approx), field(r.zf_lower), field(r.zf_upper),
                       field(r.mmse_exact), flags);
  }
  return out;
}

std::string render_svg(const std::vector<SweepRow>& rows, const SweepSpec& spec) {
  constexpr double kW = 760, kH = 480, kLeft = 70, kRight = 190, kTop = 30, kBottom = 60;
  struct Series {
    std::string label;
    std::string color;
    bool dashed;
    std::string marker;
    std::vector<std::pair<double, double>> pts;
  };
  const std::map<Receiver, std::string> colors = {
      {Receiver::kMrc, "#1f77b4"}, {Receiver::kZf, "#d62728"}, {Receiver::kMmse, "#2ca02c"}};
  std::vector<Series> series;
  auto find = [&](const std::string& label, const std::string& color, bool dashed,
                  const std::string& marker) -> Series& {
    for (auto& s : series) {
      if (s.label == label) return s;
    }
    series.push_back({label, color, dashed, marker, {}});
    return series.back();
  };
  for (const auto& r : rows) {
    const std::string name = to_string(r.receiver);
    const std::string& col = colors.at(r.receiver);
    if (r.se_mc) find(name + " sim", col, false, "circle").pts.emplace_back(r.axis_value, *r.se_mc);
    if (r.mrc_approx) find("MRC approx", col, true, "square").pts.emplace_back(r.axis_value, *r.mrc_approx);
    if (r.zf_lower) find("ZF lower", col, true, "triangle").pts.emplace_back(r.axis_value, *r.zf_lower);
    if (r.zf_upper) find("ZF upper", col, true, "diamond").pts.emplace_back(r.axis_value, *r.zf_upper);
    if (r.mmse_exact) find("MMSE exact", col, true, "square").pts.emplace_back(r.axis_value, *r.mmse_exact);
  }

  double xmin = spec.values.front(), xmax = spec.values.back();
  if (xmax == xmin) {
    xmin -= 0.5 * std::max(1.0, std::abs(xmin));
    xmax = 2 * spec.values.front() - xmin;
  }
  double ymin = 0.0, ymax = 0.0;
  for (const auto& s : series) {
    for (const auto& p : s.pts) ymax = std::max(ymax, p.second);
  }
  if (ymax <= ymin) ymax = 1.0;
  ymax *= 1.08;
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  auto X = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto Y = [&](double y) { return kTop + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      kW, kH);
  svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
                     kLeft, kTop, pw, ph);
  for (int i = 0; i <= 5; ++i) {
    const double y = ymin + (ymax - ymin) * i / 5.0;
    svg += fmt::format(
        "<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"#ddd\"/>"
        "<text x=\"{3}\" y=\"{4:.2f}\" text-anchor=\"end\">{5:.3g}</text>\n",
        kLeft, Y(y), kLeft + pw, kLeft - 6, Y(y) + 4, y);
  }
  for (double x : spec.values) {
    svg += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"black\"/>"
        "<text x=\"{0:.2f}\" y=\"{3}\" text-anchor=\"middle\">{4}</text>\n",
        X(x), kTop + ph, kTop + ph + 5, kTop + ph + 20, x);
  }
  svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", kLeft + pw / 2, kH - 15,
                     to_string(spec.axis));
  svg += fmt::format(
      "<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0})\">"
      "sum SE (bits/s/Hz)</text>\n",
      kTop + ph / 2);

  auto marker = [&](const Series& s, double x, double y) {
    const double px = X(x), py = Y(y);
    if (s.marker == "circle") {
      return fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3.5\" fill=\"{}\"/>", px, py, s.color);
    }
    if (s.marker == "square") {
      return fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"7\" height=\"7\" fill=\"none\" stroke=\"{}\"/>",
                         px - 3.5, py - 3.5, s.color);
    }
    if (s.marker == "triangle") {
      return fmt::format("<polygon points=\"{:.2f},{:.2f} {:.2f},{:.2f} {:.2f},{:.2f}\" fill=\"none\" stroke=\"{}\"/>",
                         px, py - 4, px - 4, py + 3, px + 4, py + 3, s.color);
    }
    return fmt::format("<polygon points=\"{:.2f},{:.2f} {:.2f},{:.2f} {:.2f},{:.2f} {:.2f},{:.2f}\" fill=\"none\" stroke=\"{}\"/>",
                       px, py - 4, px + 4, py, px, py + 4, px - 4, py, s.color);
  };
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    if (s.pts.size() > 1) {
      std::string pts;
      for (const auto& p : s.pts) pts += fmt::format("{:.2f},{:.2f} ", X(p.first), Y(p.second));
      pts.pop_back();
      svg += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{}/>\n", pts,
                         s.color, s.dashed ? " stroke-dasharray=\"5,3\"" : "");
    }
    for (const auto& p : s.pts) svg += marker(s, p.first, p.second) + "\n";
    const double ly = kTop + 10 + 18.0 * static_cast<double>(i);
    const double lx = kLeft + pw + 15;
    svg += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\"{}/>", lx, ly, lx + 24, ly,
                       s.color, s.dashed ? " stroke-dasharray=\"5,3\"" : "");
    svg += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", lx + 30, ly + 4, s.label);
  }
  svg += "</svg>\n";
  return svg;
}

std::string spec_hash(const SweepSpec& spec) {
  const std::string text = serialize_config(spec);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string render_manifest(const SweepSpec& spec, const std::vector<SweepRow>& rows,
                            const std::string& timestamp) {
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.se_mc ? 0 : 1;
  std::string doas;
  const auto c = scenario_at(spec, spec.values.front());
  for (std::size_t i = 0; i < c.doas.size(); ++i) doas += fmt::format("{}{:.17g}", i ? ", " : "", c.doas[i]);
  return fmt::format(
      "version: {}\n"
      "timestamp: {}\n"
      "seed: {}\n"
      "trials: {}\n"
      "spec_sha256: {}\n"
      "axis: {}\n"
      "fading: {}\n"
      "zeta: {}\n"
      "doas_source: {}\n"
      "doas: [{}]\n"
      "rows: {}\n"
      "failed_rows: {}\n",
      version_string(), timestamp, spec.base.seed, spec.trials, spec_hash(spec), to_string(spec.axis),
      to_string(spec.base.fading), to_string(spec.base.profile_mode), spec.random_doas() ? "random" : "explicit",
      doas, rows.size(), failed);
}

void prepare_output_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
  const fs::path probe = fs::path(dir) / ".write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw IoError("output directory '" + dir + "' is not writable");
  }
  fs::remove(probe, ec);
}

OutputFiles emit_outputs(const std::vector<SweepRow>& rows, const SweepSpec& spec) {
  namespace fs = std::filesystem;
  if (rows.empty()) throw InvalidArgument("emit_outputs: empty table");
  prepare_output_dir(spec.output);
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);

  OutputFiles files{(fs::path(spec.output) / "results.csv").string(), (fs::path(spec.output) / "sweep.svg").string(),
                    (fs::path(spec.output) / "manifest.yaml").string()};
  auto write = [](const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) throw IoError("failed to write '" + path + "'");
  };
  write(files.csv, format_csv(rows));
  write(files.svg, render_svg(rows, spec));
  write(files.manifest, render_manifest(spec, rows, stamp));
  return files;
}

}  // namespace scmimo
