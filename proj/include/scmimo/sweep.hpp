#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scmimo/config.hpp"

namespace scmimo {

const char* version_string();

struct SweepRow {
  double axis_value = 0.0;
  Receiver receiver = Receiver::kMrc;
  std::optional<double> se_mc;  // empty when the point failed
  std::optional<double> ci95;
  std::optional<double> mrc_approx;
  std::optional<double> zf_lower;
  std::optional<double> zf_upper;
  std::optional<double> mmse_exact;
  std::vector<std::string> flags;
};

// One row per (axis value, receiver), ordered by axis value and then by
// receiver (MRC, ZF, MMSE). A failing point is recorded in the flags of
// its rows and the sweep moves on.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

inline constexpr const char* kCsvHeader =
    "axis,receiver,se_mc,ci95,mrc_approx,zf_lower,zf_upper,mmse_exact,flags";

std::string format_csv(const std::vector<SweepRow>& rows);

// Standalone SVG of SE against the sweep axis: one solid series per
// simulated receiver and one dashed series per analytic expression.
std::string render_svg(const std::vector<SweepRow>& rows, const SweepSpec& spec);

// SHA-256 of the serialized spec, hex encoded.
std::string spec_hash(const SweepSpec& spec);

std::string render_manifest(const SweepSpec& spec, const std::vector<SweepRow>& rows,
                            const std::string& timestamp);

// Creates the output directory and checks that files can be written in
// it. Throws IoError otherwise.
void prepare_output_dir(const std::string& dir);

struct OutputFiles {
  std::string csv;
  std::string svg;
  std::string manifest;
};

// Writes results.csv, sweep.svg and manifest.yaml under spec.output.
// Throws IoError; the rows stay with the caller.
OutputFiles emit_outputs(const std::vector<SweepRow>& rows, const SweepSpec& spec);

}  // namespace scmimo
