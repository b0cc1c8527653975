#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nkpa/config.hpp"
#include "nkpa/correlator.hpp"
#include "nkpa/fit.hpp"
#include "nkpa/synth.hpp"

namespace nkpa::pipeline {

// Records on disk do not belong to the configuration they are being
// correlated against.
struct ProvenanceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic parallel map over [0, n): worker threads pull indices,
// results land in index order regardless of scheduling.
void parallel_for(std::uint64_t n, int threads,
                  const std::function<void(std::uint64_t)>& body);

// translate -> optional digital FIR -> lagged-moment accumulation for one
// ON/OFF buffer (both channels).
dsp::MomentAccumulator process_buffer(const synth::BufferRecords& recs,
                                      const config::PipelineSection& pl);

// Same pipeline on pre-quantization voltages (float path).
dsp::MomentAccumulator process_traces(const synth::VoltageTraces& traces,
                                      const config::PipelineSection& pl);

// Synthesize n_buffers in memory and run the full measurement pipeline.
dsp::CorrelationResult run_simulation(const synth::SynthConfig& scfg,
                                      std::uint64_t n_buffers,
                                      const config::PipelineSection& pl,
                                      int parallel = 0);

// ---- theory ----

struct TheoryRow {
  double gain = 1.0;
  double r = 0.0;
  double epsilon = 0.0;  // rad/s, r * kappa
  double n_out = 0.0;
  bool correlation_defined = false;
  quantum::CorrelationTriple wick{};
  double margin = 0.0;
  double model_g2 = 0.0;  // Eq-5-style gain model, labeled "model"
  std::array<double, 4> fock{};
};

std::vector<TheoryRow> theory_rows(const config::ExperimentConfig& cfg);
void write_theory_table(std::ostream& os, const config::ExperimentConfig& cfg,
                        const std::vector<TheoryRow>& rows);

// ---- record files ----

struct ManifestEntry {
  std::uint64_t index = 0;
  std::string a_on, a_off, b_on, b_off;  // paths relative to the manifest
};

struct Manifest {
  std::string digest_hex;
  std::uint64_t seed = 0;
  std::uint64_t record_len = 0;
  std::uint64_t n_buffers = 0;
  double fs = 0.0;
  int bits = 8;
  std::vector<ManifestEntry> entries;
};

Manifest synth_to_dir(const config::ExperimentConfig& cfg,
                      const std::filesystem::path& dir);
void write_manifest(const std::filesystem::path& path, const Manifest& m);
Manifest read_manifest(const std::filesystem::path& path);

// Validates provenance (manifest and per-record digests against cfg),
// then correlates all buffers.
dsp::CorrelationResult correlate_manifest(
    const config::ExperimentConfig& cfg,
    const std::filesystem::path& manifest_path);

// ---- sweeps ----

struct SweepRow {
  double parameter = 0.0;
  bool ok = false;
  std::string error;
  double g2ab0 = 0.0, g2ab0_err = 0.0;
  double g2aa0 = 0.0, g2bb0 = 0.0;
  double margin = 0.0, margin_err = 0.0;
  bool fit_ok = false;
  double gamma_c = 0.0, pair_rate = 0.0, ratio = 0.0;
  double model_g2 = 0.0;
};

std::vector<SweepRow> run_sweep(const config::ExperimentConfig& cfg);
void write_sweep_table(std::ostream& os, const config::ExperimentConfig& cfg,
                       const std::vector<SweepRow>& rows);

// Decay fit of the cross correlation in a CorrelationResult; uses only
// lags with positive error bars (or uniform weights when all are zero).
fitting::DecayFit fit_result_decay(const dsp::CorrelationResult& r);

}  // namespace nkpa::pipeline
