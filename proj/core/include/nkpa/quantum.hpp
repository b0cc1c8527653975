#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace nkpa::quantum {

using complexd = std::complex<double>;

// Thrown by wick_g2 when a mode has zero mean occupancy and the
// normalized correlation has a vacuum denominator.
struct UndefinedCorrelationError : std::domain_error {
  using std::domain_error::domain_error;
};

// Physical constants of the resonator / nanowire.
// Rates are angular (rad/s); f0 is an ordinary frequency in Hz.
struct DeviceParams {
  double f0 = 7.359e9;     // resonance, Hz
  double kappa_ex = 0.0;   // external loss rate, rad/s
  double kappa_in = 0.0;   // internal loss rate, rad/s
  double kerr_k = 0.0;     // single-photon Kerr nonlinearity, rad/s
  double l_k0 = 0.0;       // kinetic inductance, H (0 = not provided)
  double i_star = 0.0;     // characteristic current, A
  double i_zpf = 0.0;      // zero-point current, A

  double kappa() const { return kappa_ex + kappa_in; }

  // Throws std::domain_error naming the offending field. When the
  // (l_k0, i_star, i_zpf) triple is present, kerr_k must agree with
  // kerr_nonlinearity() to relative 1e-12.
  void validate() const;
};

// Intracavity pump drive. Either the amplitude pair (a1*a2 > 0) or the
// on-chip power parameterization drives a given epsilon computation,
// never both at once.
struct PumpDrive {
  double a1 = 0.0;       // sqrt(photon number), dimensionless
  double a2 = 0.0;
  double phi1 = 0.0;     // rad
  double phi2 = 0.0;
  double delta = 0.0;    // pump detuning from resonance, rad/s
  double power = 0.0;    // on-chip pump power, W

  void validate() const;
};

// Interaction strength / squeezing parameter / amplifier gain bundle.
// gain == cosh^2(r), r == |epsilon| / kappa.
struct SqueezeParams {
  complexd epsilon{0.0, 0.0};  // rad/s
  double r = 0.0;
  double gain = 1.0;

  static SqueezeParams from_drive(complexd epsilon, double kappa);
  static SqueezeParams from_gain(double gain);
};

// Second moments of a zero-mean Gaussian two-mode state.
// m_ab = <ab>, c_ab = <a^dag b>; single-mode anomalous moments are zero
// in this model.
struct TwoModeMoments {
  double n_a = 0.0;
  double n_b = 0.0;
  complexd m_ab{0.0, 0.0};
  complexd c_ab{0.0, 0.0};

  // 4x4 quadrature covariance (x_a, p_a, x_b, p_b), vacuum = 1/2 on the
  // diagonal. Row-major.
  std::array<double, 16> quadrature_covariance() const;

  // {nu_minus, nu_plus}; physical states have nu_minus >= 1/2.
  std::array<double, 2> symplectic_eigenvalues() const;

  bool is_physical(double tol = 1e-9) const;
};

struct CorrelationTriple {
  double g2_aa = 0.0;
  double g2_bb = 0.0;
  double g2_ab = 0.0;
  double sigma_aa = 0.0;
  double sigma_bb = 0.0;
  double sigma_ab = 0.0;
};

// K = (6/hbar) * (L_k0 / I*^2) * I_zpf^4.  All inputs must be > 0.
double kerr_nonlinearity(double l_k0, double i_star, double i_zpf);

// epsilon = K * A1 * A2 * exp(i (phi1 + phi2)). Requires K > 0.
complexd pdc_strength(double kerr_k, const PumpDrive& drive);

// |epsilon| = K * P * kappa_ex^2 / (hbar * omega_s * (Delta^2 + kappa^2)),
// with omega_s = 2 pi f0. Requires power >= 0.
double pdc_strength_from_power(const DeviceParams& params, double power,
                               double delta);

// G = cosh^2(epsilon / kappa).
double nkpa_gain(double epsilon, double kappa);

// p_n = (1 - lambda) lambda^n, lambda = tanh^2 r, n = 0..n_max.
std::vector<double> tms_fock_probs(double r, std::size_t n_max);

// Output moments of the two-mode squeezer for symmetric thermal input
// occupancy: n_a = n_b = G n + (G-1)(n+1), m_ab = sqrt(G(G-1))(2n+1).
TwoModeMoments tms_moments(double r, double n_thermal);

// Zero-delay correlations of the zero-mean Gaussian state by the
// Isserlis/Wick factorization:
//   g2_ab = 1 + (|c_ab|^2 + |m_ab|^2) / (n_a n_b),  g2_aa = g2_bb = 2.
CorrelationTriple wick_g2(const TwoModeMoments& m);

// g2_ab - (g2_aa + g2_bb)/2; positive certifies non-classicality.
double classical_bound_margin(const CorrelationTriple& t);

// Fitting model g2 = 2 + eta / (2 (G - 1)). Requires gain > 1,
// 0 < eta <= 1.
double g2_model_gain(double gain, double eta);

struct EtaNrf {
  double eta;
  double nrf;
};

// eta = 1/(1+2n), NRF = 1 - eta/2.
EtaNrf eta_nrf(double n_thermal);

}  // namespace nkpa::quantum
