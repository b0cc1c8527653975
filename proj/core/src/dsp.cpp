#include "nkpa/dsp.hpp"

#include <cmath>
#include <complex>

#include "nkpa/constants.hpp"

namespace nkpa::dsp {

namespace {

double sinc(double x) {
  if (x == 0.0) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

template <typename T>
QuadratureStream translate_impl(const T* v, std::size_t n, double fs,
                                bool quantized) {
  if (n % 2 != 0)
    throw LengthError("translate: record length must be even");
  const std::size_t half = n / 2;
  QuadratureStream q;
  q.x.resize(half);
  q.p.resize(half);
  q.fs_effective = fs / 2.0;
  q.quantized = quantized;
  for (std::size_t k = 0; k < half; ++k) {
    const double sx = (k % 2 == 0) ? 1.0 : -1.0;
    q.x[k] = sx * static_cast<double>(v[2 * k]);
    q.p[k] = -sx * static_cast<double>(v[2 * k + 1]);
  }
  return q;
}

void convolve_valid(const std::vector<double>& taps,
                    const std::vector<double>& in, std::vector<double>& out,
                    std::size_t chunk) {
  const std::size_t order = taps.size() - 1;
  const std::size_t n_out = in.size() - order;
  out.resize(n_out);
  if (chunk == 0) chunk = n_out;
  for (std::size_t base = 0; base < n_out; base += chunk) {
    const std::size_t end = std::min(base + chunk, n_out);
    for (std::size_t k = base; k < end; ++k) {
      double acc = 0.0;
      const double* w = in.data() + k;
      for (std::size_t j = 0; j <= order; ++j) acc += taps[order - j] * w[j];
      out[k] = acc;
    }
  }
}

}  // namespace

QuadratureStream translate(const synth::VoltageRecord& rec) {
  return translate_impl(rec.samples.data(), rec.samples.size(), rec.fs, true);
}

QuadratureStream translate(std::span<const double> voltage, double fs) {
  return translate_impl(voltage.data(), voltage.size(), fs, false);
}

FirFilter design_fir(int order, double center, double bandwidth, double fs) {
  if (order <= 0 || order % 2 != 0)
    throw std::domain_error("design_fir: order must be positive and even");
  if (!(fs > 0.0)) throw std::domain_error("design_fir: fs must be > 0");
  if (!(bandwidth > 0.0) || bandwidth >= fs / 2.0)
    throw std::domain_error("design_fir: bandwidth must be in (0, fs/2)");
  if (center < 0.0) throw std::domain_error("design_fir: center must be >= 0");
  const double f_hi = center + bandwidth / 2.0;
  if (f_hi >= fs / 2.0)
    throw std::domain_error("design_fir: upper band edge exceeds Nyquist");
  // A band straddling DC is the equivalent lowpass.
  const double f_lo = std::max(center - bandwidth / 2.0, 0.0);

  FirFilter f;
  f.order = order;
  f.center = center;
  f.bandwidth = bandwidth;
  f.fs = fs;
  f.taps.resize(order + 1);
  const int m = order / 2;
  const double hi = 2.0 * f_hi / fs;
  const double lo = 2.0 * f_lo / fs;
  for (int k = 0; k <= order; ++k) {
    const double t = k - m;
    const double ideal = hi * sinc(hi * t) - lo * sinc(lo * t);
    const double hann = 0.5 * (1.0 - std::cos(kTwoPi * k / order));
    f.taps[k] = ideal * hann;
  }
  const double peak = fir_magnitude(f, center);
  if (!(peak > 0.0))
    throw std::domain_error("design_fir: degenerate response at center");
  for (auto& t : f.taps) t /= peak;
  return f;
}

double fir_magnitude(const FirFilter& f, double freq) {
  std::complex<double> h{0.0, 0.0};
  const double w = kTwoPi * freq / f.fs;
  for (std::size_t k = 0; k < f.taps.size(); ++k)
    h += f.taps[k] * std::polar(1.0, -w * static_cast<double>(k));
  return std::abs(h);
}

std::vector<double> filter_valid(const FirFilter& f,
                                 const std::vector<double>& in) {
  if (in.size() <= f.taps.size() - 1)
    throw LengthError("filter_valid: input shorter than filter");
  std::vector<double> out;
  convolve_valid(f.taps, in, out, 0);
  return out;
}

QuadratureStream filter_stream(const FirFilter& f, const QuadratureStream& q,
                               std::size_t chunk) {
  const std::size_t order = f.taps.size() - 1;
  if (q.x.size() <= order)
    throw LengthError("filter_stream: stream shorter than filter");
  QuadratureStream out;
  out.fs_effective = q.fs_effective;
  out.quantized = false;
  convolve_valid(f.taps, q.x, out.x, chunk);
  convolve_valid(f.taps, q.p, out.p, chunk);
  return out;
}

}  // namespace nkpa::dsp
