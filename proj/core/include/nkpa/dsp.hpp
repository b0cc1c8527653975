#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "nkpa/record.hpp"

namespace nkpa::dsp {

struct LengthError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Baseband quadratures at half the digitizer rate. `quantized` marks
// streams whose samples are raw integer codes (exact integer moment
// accumulation applies).
struct QuadratureStream {
  std::vector<double> x;
  std::vector<double> p;
  double fs_effective = 0.0;
  bool quantized = false;
};

// Alternating-sign frequency translation for the 75 MHz @ 100 MSp/s
// chain (IF = 3 fs/4, alias at fs/4):
//   X_k = v[2k]   * (-1)^k
//   P_k = v[2k+1] * (-1)^(k+1)
QuadratureStream translate(const synth::VoltageRecord& rec);
QuadratureStream translate(std::span<const double> voltage, double fs);

// Linear-phase windowed-sinc bandpass (Hann window), peak-normalized at
// `center`. center == 0 degenerates to the equivalent lowpass.
struct FirFilter {
  std::vector<double> taps;
  int order = 0;          // taps.size() == order + 1
  double center = 0.0;    // Hz
  double bandwidth = 0.0; // Hz
  double fs = 0.0;        // Hz
};

FirFilter design_fir(int order, double center, double bandwidth, double fs);

// |H(f)| of the designed taps.
double fir_magnitude(const FirFilter& f, double freq);

// Valid-region convolution of a raw sample vector (output is
// taps.size() - 1 shorter).
std::vector<double> filter_valid(const FirFilter& f,
                                 const std::vector<double>& in);

// Valid-region convolution of both quadratures; output is order samples
// shorter and delay-aligned (group delay = order/2 on both channels).
// chunk > 0 processes the stream in blocks of that many output samples;
// output is identical to the whole-record path.
QuadratureStream filter_stream(const FirFilter& f, const QuadratureStream& q,
                               std::size_t chunk = 0);

}  // namespace nkpa::dsp
