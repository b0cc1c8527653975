#include "nkpa/quantum.hpp"

#include <cmath>
#include <string>

#include "nkpa/constants.hpp"

namespace nkpa::quantum {

namespace {

double det2(double a, double b, double c, double d) { return a * d - b * c; }

// Determinant of a 4x4 row-major matrix by cofactor expansion on 2x2 blocks.
double det4(const std::array<double, 16>& m) {
  const double s0 = det2(m[0], m[1], m[4], m[5]);
  const double s1 = det2(m[0], m[2], m[4], m[6]);
  const double s2 = det2(m[0], m[3], m[4], m[7]);
  const double s3 = det2(m[1], m[2], m[5], m[6]);
  const double s4 = det2(m[1], m[3], m[5], m[7]);
  const double s5 = det2(m[2], m[3], m[6], m[7]);

  const double c5 = det2(m[10], m[11], m[14], m[15]);
  const double c4 = det2(m[9], m[11], m[13], m[15]);
  const double c3 = det2(m[9], m[10], m[13], m[14]);
  const double c2 = det2(m[8], m[11], m[12], m[15]);
  const double c1 = det2(m[8], m[10], m[12], m[14]);
  const double c0 = det2(m[8], m[9], m[12], m[13]);

  return s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0;
}

}  // namespace

void DeviceParams::validate() const {
  if (!(f0 > 0.0)) throw std::domain_error("DeviceParams.f0 must be > 0");
  if (!(kappa_ex > 0.0))
    throw std::domain_error("DeviceParams.kappa_ex must be > 0");
  if (kappa_in < 0.0)
    throw std::domain_error("DeviceParams.kappa_in must be >= 0");
  if (!(kerr_k > 0.0))
    throw std::domain_error("DeviceParams.kerr_k must be > 0");
  if (l_k0 > 0.0 && i_star > 0.0 && i_zpf > 0.0) {
    const double k = kerr_nonlinearity(l_k0, i_star, i_zpf);
    if (std::abs(k - kerr_k) > 1e-12 * kerr_k)
      throw std::domain_error(
          "DeviceParams.kerr_k inconsistent with (l_k0, i_star, i_zpf)");
  }
}

void PumpDrive::validate() const {
  if (a1 < 0.0 || a2 < 0.0)
    throw std::domain_error("PumpDrive amplitudes must be >= 0");
  if (power < 0.0) throw std::domain_error("PumpDrive.power must be >= 0");
  if (a1 * a2 > 0.0 && power > 0.0)
    throw std::domain_error(
        "PumpDrive: amplitude pair and power are mutually exclusive");
}

SqueezeParams SqueezeParams::from_drive(complexd epsilon, double kappa) {
  if (!(kappa > 0.0)) throw std::domain_error("kappa must be > 0");
  SqueezeParams s;
  s.epsilon = epsilon;
  s.r = std::abs(epsilon) / kappa;
  const double c = std::cosh(s.r);
  s.gain = c * c;
  return s;
}

SqueezeParams SqueezeParams::from_gain(double gain) {
  if (gain < 1.0) throw std::domain_error("gain must be >= 1");
  SqueezeParams s;
  s.r = std::acosh(std::sqrt(gain));
  s.gain = gain;
  s.epsilon = complexd{0.0, 0.0};  // drive unknown in this parameterization
  return s;
}

std::array<double, 16> TwoModeMoments::quadrature_covariance() const {
  // a = (x + i p)/sqrt(2); no single-mode anomalous moments, so the
  // diagonal blocks are (n + 1/2) I.
  const double va = n_a + 0.5;
  const double vb = n_b + 0.5;
  const double rm = m_ab.real(), im = m_ab.imag();
  const double rc = c_ab.real(), ic = c_ab.imag();
  // cross block C: [[Re m + Re c, Im m + Im c], [Im m - Im c, Re c - Re m]]
  const double cxx = rm + rc;
  const double cxp = im + ic;
  const double cpx = im - ic;
  const double cpp = rc - rm;
  return {va, 0.0, cxx, cxp,  //
          0.0, va, cpx, cpp,  //
          cxx, cpx, vb, 0.0,  //
          cxp, cpp, 0.0, vb};
}

std::array<double, 2> TwoModeMoments::symplectic_eigenvalues() const {
  const auto v = quadrature_covariance();
  const double det_a = v[0] * v[5] - v[1] * v[4];
  const double det_b = v[10] * v[15] - v[11] * v[14];
  const double det_c = v[2] * v[7] - v[3] * v[6];
  const double delta = det_a + det_b + 2.0 * det_c;
  const double dv = det4(v);
  double disc = delta * delta - 4.0 * dv;
  if (disc < 0.0) disc = 0.0;  // clamp fp noise for near-degenerate states
  const double root = std::sqrt(disc);
  double lo = 0.5 * (delta - root);
  double hi = 0.5 * (delta + root);
  if (lo < 0.0) lo = 0.0;
  return {std::sqrt(lo), std::sqrt(hi)};
}

bool TwoModeMoments::is_physical(double tol) const {
  if (n_a < 0.0 || n_b < 0.0) return false;
  return symplectic_eigenvalues()[0] >= 0.5 - tol;
}

double kerr_nonlinearity(double l_k0, double i_star, double i_zpf) {
  if (!(l_k0 > 0.0)) throw std::domain_error("l_k0 must be > 0");
  if (!(i_star > 0.0)) throw std::domain_error("i_star must be > 0");
  if (!(i_zpf > 0.0)) throw std::domain_error("i_zpf must be > 0");
  const double i2 = i_zpf * i_zpf;
  return (6.0 / kHbar) * (l_k0 / (i_star * i_star)) * i2 * i2;
}

complexd pdc_strength(double kerr_k, const PumpDrive& drive) {
  if (!(kerr_k > 0.0)) throw std::domain_error("kerr_k must be > 0");
  drive.validate();
  const double mag = kerr_k * drive.a1 * drive.a2;
  return std::polar(mag, drive.phi1 + drive.phi2);
}

double pdc_strength_from_power(const DeviceParams& params, double power,
                               double delta) {
  params.validate();
  if (power < 0.0) throw std::domain_error("power must be >= 0");
  const double omega_s = kTwoPi * params.f0;
  const double kap = params.kappa();
  return params.kerr_k * power * params.kappa_ex * params.kappa_ex /
         (kHbar * omega_s * (delta * delta + kap * kap));
}

double nkpa_gain(double epsilon, double kappa) {
  if (!(kappa > 0.0)) throw std::domain_error("kappa must be > 0");
  if (epsilon < 0.0) throw std::domain_error("epsilon must be >= 0");
  const double c = std::cosh(epsilon / kappa);
  return c * c;
}

std::vector<double> tms_fock_probs(double r, std::size_t n_max) {
  if (r < 0.0) throw std::domain_error("r must be >= 0");
  const double t = std::tanh(r);
  const double lambda = t * t;
  std::vector<double> p(n_max + 1);
  double term = 1.0 - lambda;
  for (std::size_t n = 0; n <= n_max; ++n) {
    p[n] = term;
    term *= lambda;
  }
  return p;
}

TwoModeMoments tms_moments(double r, double n_thermal) {
  if (r < 0.0) throw std::domain_error("r must be >= 0");
  if (n_thermal < 0.0) throw std::domain_error("n_thermal must be >= 0");
  const double c = std::cosh(r), s = std::sinh(r);
  const double gain = c * c;            // G
  const double gm1 = s * s;             // G - 1
  TwoModeMoments m;
  m.n_a = gain * n_thermal + gm1 * (n_thermal + 1.0);
  m.n_b = m.n_a;
  m.m_ab = complexd{c * s * (2.0 * n_thermal + 1.0), 0.0};
  m.c_ab = complexd{0.0, 0.0};
  return m;
}

CorrelationTriple wick_g2(const TwoModeMoments& m) {
  if (!m.is_physical())
    throw std::domain_error("wick_g2: moments fail the physicality check");
  if (m.n_a <= 0.0 || m.n_b <= 0.0)
    throw UndefinedCorrelationError(
        "wick_g2: vacuum denominator (n_a or n_b is zero)");
  CorrelationTriple t;
  t.g2_aa = 2.0;
  t.g2_bb = 2.0;
  t.g2_ab = 1.0 + (std::norm(m.c_ab) + std::norm(m.m_ab)) / (m.n_a * m.n_b);
  return t;
}

double classical_bound_margin(const CorrelationTriple& t) {
  return t.g2_ab - 0.5 * (t.g2_aa + t.g2_bb);
}

double g2_model_gain(double gain, double eta) {
  if (!(gain > 1.0)) throw std::domain_error("gain must be > 1");
  if (!(eta > 0.0) || eta > 1.0)
    throw std::domain_error("eta must be in (0, 1]");
  return 2.0 + eta / (2.0 * (gain - 1.0));
}

EtaNrf eta_nrf(double n_thermal) {
  if (n_thermal < 0.0) throw std::domain_error("n_thermal must be >= 0");
  const double eta = 1.0 / (1.0 + 2.0 * n_thermal);
  return {eta, 1.0 - eta / 2.0};
}

}  // namespace nkpa::quantum
