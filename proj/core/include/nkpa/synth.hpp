#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nkpa/quantum.hpp"
#include "nkpa/record.hpp"
#include "nkpa/sha256.hpp"

namespace nkpa::synth {

// Full description of the synthetic measurement chain for one source
// configuration. Angular rates in rad/s (== 1/s exponents), frequencies
// in Hz.
struct SynthConfig {
  quantum::TwoModeMoments moments;   // target mode statistics (ON state)
  double gamma_c = 2.0e6;            // envelope decay: <a*(t)a(t+tau)> ~ e^{-gamma_c|tau|/2}
  double n_added = 10.0;             // white chain-noise occupancy per sample per mode
  double line_gain = 0.0;            // overall chain power gain; 0 = auto-scale
  double f_if = 75e6;                // IF carrier, Hz
  double f_center = 74.6e6;          // analog bandpass center, Hz
  double bw_analog = 3.88e6;         // analog bandpass width, Hz
  double fs = 100e6;                 // digitizer rate, Sp/s
  double full_scale = 0.04;          // digitizer full-scale, V
  int bits = 8;
  int analog_order = 200;            // taps - 1 of the analog-filter emulation
  std::uint64_t record_len = 1ull << 21;
  std::uint64_t seed = 0;

  void validate() const;  // throws std::domain_error naming the field

  // Deterministic serialization (fixed key order) and its SHA-256.
  std::string canonical_text() const;
  detail::Digest digest() const;

  // line_gain, with 0 resolved so that five RMS of the nominal ON trace
  // sits at full scale.
  double resolved_line_gain() const;
};

// Complex field envelopes of the two modes at the digitizer rate.
struct EnvelopePair {
  std::vector<std::complex<double>> a;
  std::vector<std::complex<double>> b;
  double dt = 0.0;
};

// The half-quantum detection floor carried by every synthesized envelope,
// split into the minimal part that must share the modes' Lorentzian
// correlation (so the joint moment matrix stays positive semidefinite)
// and a white remainder. correlated + white == 1/2.
struct FloorSplit {
  double correlated = 0.0;
  double white = 0.5;
};

FloorSplit floor_split(const quantum::TwoModeMoments& m);

// Per-mode second moments the raw envelopes converge to: the requested
// moments plus the half-quantum floor on the diagonal.
quantum::TwoModeMoments envelope_targets(const quantum::TwoModeMoments& m);

// Stationary correlated Gaussian envelopes for the configured moments
// (floor included), deterministic in (cfg.seed, buffer_index, on).
// OFF envelopes carry the same floor statistics and no signal.
EnvelopePair synth_envelopes(const SynthConfig& cfg);
EnvelopePair synth_envelopes(const SynthConfig& cfg, std::uint64_t n_samples,
                             std::uint64_t buffer_index, bool on);

// Adds independent white complex Gaussian noise of occupancy n_added to
// each mode, then scales both by sqrt(line_gain). Identity when
// n_added == 0 and line_gain == 1.
EnvelopePair add_chain_noise(EnvelopePair pair, double n_added,
                             double line_gain, std::uint64_t seed);

// V_n = X(n/fs) cos(2 pi f_if n / fs) + P(n/fs) sin(2 pi f_if n / fs)
// per channel. The nominal f_if = 3 fs / 4 uses the exact alternating
// pattern {1, 0, -1, 0} / {0, -1, 0, 1}.
std::pair<std::vector<double>, std::vector<double>> upconvert(
    const EnvelopePair& pair, double f_if, double fs);

struct ClipStats {
  std::uint64_t clipped_low = 0;
  std::uint64_t clipped_high = 0;
  std::uint64_t total = 0;
};

// Symmetric mid-tread quantizer:
// code = clamp(round(v / full_scale * 2^(bits-1)), +-(2^(bits-1) - 1)).
std::vector<std::int16_t> quantize(const std::vector<double>& v,
                                   double full_scale, int bits,
                                   ClipStats* stats = nullptr);

struct RecordPair {
  VoltageRecord on;
  VoltageRecord off;
};

// ON/OFF record pairs for both channels of one buffer. OFF shares the
// floor and chain-noise statistics and carries no signal.
struct BufferRecords {
  RecordPair a;
  RecordPair b;
};

BufferRecords make_record_pair(const SynthConfig& cfg,
                               std::uint64_t buffer_index = 0);

// Pre-quantization voltages (same chain minus the quantizer), for the
// exact gain-cancellation path.
struct VoltageTraces {
  std::vector<double> on_a, on_b, off_a, off_b;
  double fs = 0.0;
};

VoltageTraces make_voltage_traces(const SynthConfig& cfg,
                                  std::uint64_t buffer_index = 0);

}  // namespace nkpa::synth
