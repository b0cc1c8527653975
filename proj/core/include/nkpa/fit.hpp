#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <vector>

#include "nkpa/constants.hpp"

namespace nkpa::fitting {

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Data carries no decaying component the model could attach to.
struct DegenerateModelError : FitError {
  using FitError::FitError;
};

// Weighted least-squares fit of g2(tau) = 1 + gamma_c/(2R) exp(-gamma_c|tau|).
// Rates are plain 1/s exponents; the conventional "MHz" quote is value/1e6,
// and *_rad() exposes the 2*pi-scaled equivalents. ratio is
// gamma_c/(2 pair_rate) and is identical in either convention.
struct DecayFit {
  double gamma_c = 0.0;    // 1/s
  double pair_rate = 0.0;  // pairs/s
  double ratio = 0.0;      // gamma_c / (2 pair_rate)
  double residual_norm = 0.0;
  std::array<double, 4> covariance{};  // row-major 2x2 over (gamma_c, pair_rate)
  int iterations = 0;

  double gamma_c_rad() const { return kTwoPi * gamma_c; }
  double pair_rate_rad() const { return kTwoPi * pair_rate; }
};

DecayFit fit_decay(std::span<const double> lags_s, std::span<const double> g2,
                   std::span<const double> sigmas);

// Single-parameter weighted fit of g2 = 2 + eta/(2(G-1)). The model is
// linear in eta, so the normal-equation solution is the exact optimum.
struct EtaFit {
  double eta = 0.0;
  double implied_occupancy = 0.0;  // (1/eta - 1)/2
  double nrf = 0.0;                // 1 - eta/2
  double residual_norm = 0.0;
};

EtaFit fit_eta(std::span<const double> gains, std::span<const double> g2ab0,
               std::span<const double> sigmas);

// SNR ~ 6.08 Q + 1.76 dB.
double quantization_snr_db(int bits);

// Cross-checks detected pair rates against measurement bandwidths.
struct BandwidthReport {
  struct PairComparison {
    std::size_t i = 0, j = 0;
    double bandwidth_ratio = 0.0;
    double rate_ratio = 0.0;
    double rel_deviation = 0.0;  // |rate/bw - 1| of the ratio pair
  };
  std::vector<PairComparison> pairs;
  double ratio_min = 0.0;   // spread of gamma_c/(2R)
  double ratio_max = 0.0;
  double ratio_spread_rel = 0.0;
};

BandwidthReport bandwidth_consistency(
    const std::vector<std::pair<double, DecayFit>>& fits);

// Model extrapolation: scales the effective (G-1) by the cavity
// Lorentzian |(k/2) / (k/2 + i 2 pi delta)|^2 and applies the gain model.
std::vector<double> detuning_sweep_model(std::span<const double> delta_hz,
                                         double base_gain, double eta,
                                         double kappa);

}  // namespace nkpa::fitting
