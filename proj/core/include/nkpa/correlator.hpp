#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "nkpa/dsp.hpp"

namespace nkpa::dsp {

enum class EstimatorVariant { paper, rederived };
enum class Mode { a, b };

inline const char* to_string(EstimatorVariant v) {
  return v == EstimatorVariant::paper ? "paper" : "rederived";
}

// ON power does not exceed OFF power: the noise subtraction has no
// signal left to normalize by.
struct SubtractionError : std::runtime_error {
  SubtractionError(double on_a, double off_a, double on_b, double off_b)
      : std::runtime_error("noise subtraction failed: OFF power >= ON power"),
        mean_on_a(on_a),
        mean_off_a(off_a),
        mean_on_b(on_b),
        mean_off_b(off_b) {}
  double mean_on_a, mean_off_a, mean_on_b, mean_off_b;
};

struct AlignmentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct PartitionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Running lagged power moments for ON and OFF records. Sums are kept in
// 64-bit integers while every added buffer is quantized and safely within
// range (bit-exact, order-independent); otherwise in compensated doubles.
// Merging is associative; the pipeline merges in buffer order so float
// results are identical for every thread count.
struct MomentAccumulator {
  int max_lag = -1;        // lag grid: ab index l + max_lag, auto index |l|
  double dt = 0.0;         // seconds per lag step
  std::uint64_t n_buffers = 0;
  std::uint64_t total_samples = 0;  // per state, summed over buffers

  bool integer_mode = true;  // all contributions so far took the exact path

  // lagged product sums; ab sized 2*max_lag+1, auto sized max_lag+1
  std::vector<double> ab_on, ab_off, aa_on, aa_off, bb_on, bb_off;
  std::vector<double> ab_on_c, ab_off_c, aa_on_c, aa_off_c, bb_on_c,
      bb_off_c;  // Neumaier compensation
  std::vector<std::int64_t> iab_on, iab_off, iaa_on, iaa_off, ibb_on, ibb_off;
  std::vector<std::int64_t> count;  // by |lag|, size max_lag+1

  double pa_on = 0, pb_on = 0, pa_off = 0, pb_off = 0;
  std::int64_t ipa_on = 0, ipb_on = 0, ipa_off = 0, ipb_off = 0;

  bool empty() const { return n_buffers == 0; }

  // Associative merge; other must share the lag grid.
  MomentAccumulator& merge(const MomentAccumulator& other);
};

// Accumulates one ON/OFF buffer (both channels) into `acc` for all lags
// within +-max_lag_s. Streams must share length and rate.
void accumulate(MomentAccumulator& acc, const QuadratureStream& on_a,
                const QuadratureStream& on_b, const QuadratureStream& off_a,
                const QuadratureStream& off_b, double max_lag_s);

// g2_ab(tau) over lags -max_lag..max_lag:
//   [<na(t)nb>_ON - <na>_ON <nb>_OFF - <na>_OFF <nb>_ON + <na>_OFF <nb>_OFF]
//   / ((<na>_ON - <na>_OFF) (<nb>_ON - <nb>_OFF))
std::vector<double> g2_cross(const MomentAccumulator& acc);

// g2_aa / g2_bb over the same grid (auto results are mirrored in lag).
// The `paper` variant's final numerator term is -2 <n^n><n>_ON as printed
// in the source expression; `rederived` replaces it with -2 <n^n><n^s>,
// which is consistent with the expansion it came from.
std::vector<double> g2_auto(const MomentAccumulator& acc, Mode mode,
                            EstimatorVariant variant);

struct CorrelationResult {
  std::vector<double> lag_s;
  std::vector<double> g2_ab, g2_ab_err;
  std::vector<double> g2_aa, g2_aa_err;
  std::vector<double> g2_bb, g2_bb_err;
  std::uint64_t n_buffers = 0;
  std::uint64_t n_segments = 0;
  EstimatorVariant variant = EstimatorVariant::rederived;

  std::size_t zero_lag_index() const { return lag_s.size() / 2; }
};

// Pools all buffers for the central values; error bars are the sample
// standard deviation across the n_segments segment estimates.
CorrelationResult segment_stats(
    const std::vector<MomentAccumulator>& per_buffer, std::uint64_t n_segments,
    EstimatorVariant variant);

// Delimited text with a comment header (config digest + estimator).
void write_result(std::ostream& os, const CorrelationResult& r,
                  const std::string& config_digest_hex);
CorrelationResult read_result(std::istream& is);

}  // namespace nkpa::dsp
