#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "nkpa/correlator.hpp"
#include "nkpa/quantum.hpp"
#include "nkpa/synth.hpp"

namespace nkpa::config {

// Every configuration failure names the offending field path.
struct ConfigError : std::runtime_error {
  ConfigError(std::string field, const std::string& msg)
      : std::runtime_error(field + ": " + msg), field_path(std::move(field)) {}
  std::string field_path;
};

enum class SourceKind { tms, thermal };
enum class SweepKind { none, power, bandwidth, detuning };

struct DriveSpec {
  double gain = 1.1;   // explicit-gain parameterization
  double eta = 0.72;
  double a1 = 0.0, a2 = 0.0, phi1 = 0.0, phi2 = 0.0;
  double delta = 0.0;  // rad/s; default set in defaults()
  double power = 0.0;  // W
};

struct SynthSection {
  SourceKind source = SourceKind::tms;
  double nbar = 0.1;               // sinh^2 r of the source (or thermal n)
  double thermal_occupancy = 0.0;  // intracavity occupancy for the tms source
  double gamma_c = 2.0e6;          // 1/s
  double n_added = 10.0;
  double line_gain = 0.0;          // 0 = auto
  double f_if = 75e6;
  double f_center = 74.6e6;
  double bw_analog = 3.88e6;
  double fs = 100e6;
  double full_scale = 0.04;
  int bits = 8;
  int analog_order = 200;
  std::uint64_t record_len = 1ull << 18;  // desk-scale default
  std::uint64_t n_buffers = 50;
};

struct PipelineSection {
  int fir_order = 200;
  double digital_bw = 0.86e6;  // 0 = analog bandwidth only
  double max_lag_s = 2e-6;
  std::uint64_t n_segments = 10;
  dsp::EstimatorVariant estimator = dsp::EstimatorVariant::rederived;
};

struct SweepSection {
  SweepKind kind = SweepKind::none;
  std::vector<double> values;
};

struct RunSection {
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int parallel = 0;  // 0 = hardware concurrency
  bool paper_scale = false;
};

struct ExperimentConfig {
  quantum::DeviceParams device;
  DriveSpec drive;
  SynthSection synth;
  PipelineSection pipeline;
  SweepSection sweep;
  RunSection run;

  // Paper-nominal defaults for every field.
  static ExperimentConfig defaults();

  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig parse_file(const std::filesystem::path& path);

  // Throws ConfigError naming the field path; called by parse() after
  // all assignments.
  void validate() const;

  // 500 buffers of 2^21 samples.
  void apply_paper_scale();

  quantum::TwoModeMoments source_moments() const;
  synth::SynthConfig synth_config() const;

  std::string serialize() const;
};

}  // namespace nkpa::config
