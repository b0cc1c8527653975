#include "nkpa/fit.hpp"

#include <algorithm>
#include <cmath>

#include "nkpa/quantum.hpp"

namespace nkpa::fitting {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kStepTolerance = 1e-10;

struct Normal2 {
  double a00 = 0, a01 = 0, a11 = 0;  // J^T W J
  double b0 = 0, b1 = 0;             // J^T W r
  double chi2 = 0;
};

Normal2 decay_normal_eqs(std::span<const double> lags,
                         std::span<const double> g2,
                         std::span<const double> sig, double gamma, double rate) {
  Normal2 n;
  for (std::size_t i = 0; i < lags.size(); ++i) {
    const double at = std::abs(lags[i]);
    const double e = std::exp(-gamma * at);
    const double model = 1.0 + gamma / (2.0 * rate) * e;
    const double w = 1.0 / (sig[i] * sig[i]);
    const double jg = e * (1.0 - gamma * at) / (2.0 * rate);
    const double jr = -gamma / (2.0 * rate * rate) * e;
    const double r = g2[i] - model;
    n.a00 += w * jg * jg;
    n.a01 += w * jg * jr;
    n.a11 += w * jr * jr;
    n.b0 += w * jg * r;
    n.b1 += w * jr * r;
    n.chi2 += w * r * r;
  }
  return n;
}

}  // namespace

DecayFit fit_decay(std::span<const double> lags_s, std::span<const double> g2,
                   std::span<const double> sigmas) {
  const std::size_t n = lags_s.size();
  if (n < 5 || g2.size() != n || sigmas.size() != n)
    throw FitError("fit_decay: need >= 5 aligned (lag, g2, sigma) points");
  for (double s : sigmas)
    if (!(s > 0.0)) throw FitError("fit_decay: sigmas must be > 0");

  // Log-linear start: ln(g2 - 1) = ln(gamma/(2R)) - gamma |tau| over the
  // first decade below the peak.
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) peak = std::max(peak, g2[i] - 1.0);
  if (!(peak > 0.0))
    throw DegenerateModelError("fit_decay: no positive excess correlation");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, sw = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = g2[i] - 1.0;
    if (y < peak / 10.0 || y <= 0.0) continue;
    const double ly = std::log(y);
    const double x = std::abs(lags_s[i]);
    sx += x;
    sy += ly;
    sxx += x * x;
    sxy += x * ly;
    sw += 1.0;
  }
  const double det = sw * sxx - sx * sx;
  double gamma, rate;
  if (sw < 2.0 || std::abs(det) < 1e-300) {
    // peaked at zero lag only; decay unresolved by the init, let LM move
    const double span =
        std::max(std::abs(lags_s.front()), std::abs(lags_s.back()));
    if (!(span > 0.0))
      throw DegenerateModelError("fit_decay: degenerate lag grid");
    gamma = 1.0 / span;
    rate = gamma / (2.0 * peak);
  } else {
    const double slope = (sw * sxy - sx * sy) / det;
    const double icept = (sy * sxx - sx * sxy) / det;
    gamma = slope < 0.0 ? -slope : 1.0 / std::max(std::abs(lags_s.back()), 1e-12);
    rate = gamma / (2.0 * std::exp(icept));
  }
  if (!(gamma > 0.0) || !(rate > 0.0))
    throw DegenerateModelError("fit_decay: non-positive initial parameters");

  double lambda = 1e-3;
  Normal2 cur = decay_normal_eqs(lags_s, g2, sigmas, gamma, rate);
  int it = 0;
  for (; it < kMaxIterations; ++it) {
    const double a00 = cur.a00 * (1.0 + lambda);
    const double a11 = cur.a11 * (1.0 + lambda);
    const double det2 = a00 * a11 - cur.a01 * cur.a01;
    if (!(std::abs(det2) > 0.0))
      throw FitError("fit_decay: singular normal equations");
    const double dg = (cur.b0 * a11 - cur.a01 * cur.b1) / det2;
    const double dr = (a00 * cur.b1 - cur.a01 * cur.b0) / det2;
    const double ng = gamma + dg;
    const double nr = rate + dr;
    if (!(ng > 0.0) || !(nr > 0.0)) {
      lambda *= 10.0;
      if (lambda > 1e12)
        throw FitError("fit_decay: no positive step after damping");
      continue;
    }
    const Normal2 trial = decay_normal_eqs(lags_s, g2, sigmas, ng, nr);
    if (trial.chi2 <= cur.chi2) {
      const double rel = std::max(std::abs(dg) / ng, std::abs(dr) / nr);
      gamma = ng;
      rate = nr;
      cur = trial;
      lambda = std::max(lambda * 0.3, 1e-12);
      if (rel < kStepTolerance) break;
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) break;  // stuck in a flat valley; report best
    }
  }
  if (it == kMaxIterations)
    throw FitError("fit_decay: no convergence within iteration budget");

  DecayFit f;
  f.gamma_c = gamma;
  f.pair_rate = rate;
  f.ratio = gamma / (2.0 * rate);
  f.residual_norm = std::sqrt(cur.chi2);
  f.iterations = it + 1;
  const double det2 = cur.a00 * cur.a11 - cur.a01 * cur.a01;
  if (std::abs(det2) > 0.0) {
    f.covariance = {cur.a11 / det2, -cur.a01 / det2,  //
                    -cur.a01 / det2, cur.a00 / det2};
  }
  return f;
}

EtaFit fit_eta(std::span<const double> gains, std::span<const double> g2ab0,
               std::span<const double> sigmas) {
  const std::size_t n = gains.size();
  if (n < 2 || g2ab0.size() != n || sigmas.size() != n)
    throw FitError("fit_eta: need >= 2 aligned (gain, g2, sigma) points");
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(gains[i] > 1.0))
      throw std::domain_error("fit_eta: gains must be > 1");
    if (!(sigmas[i] > 0.0)) throw FitError("fit_eta: sigmas must be > 0");
    const double x = 1.0 / (2.0 * (gains[i] - 1.0));
    const double w = 1.0 / (sigmas[i] * sigmas[i]);
    sxx += w * x * x;
    sxy += w * x * (g2ab0[i] - 2.0);
  }
  if (!(sxx > 0.0)) throw FitError("fit_eta: degenerate design");
  EtaFit f;
  f.eta = sxy / sxx;
  f.implied_occupancy = (1.0 / f.eta - 1.0) / 2.0;
  f.nrf = 1.0 - f.eta / 2.0;
  double chi2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = 1.0 / (2.0 * (gains[i] - 1.0));
    const double r = (g2ab0[i] - 2.0 - f.eta * x) / sigmas[i];
    chi2 += r * r;
  }
  f.residual_norm = std::sqrt(chi2);
  return f;
}

double quantization_snr_db(int bits) {
  if (bits < 1) throw std::domain_error("quantization_snr_db: bits must be >= 1");
  return 6.08 * bits + 1.76;
}

BandwidthReport bandwidth_consistency(
    const std::vector<std::pair<double, DecayFit>>& fits) {
  if (fits.size() < 2)
    throw std::invalid_argument("bandwidth_consistency: need >= 2 fits");
  BandwidthReport rep;
  rep.ratio_min = fits[0].second.ratio;
  rep.ratio_max = fits[0].second.ratio;
  for (const auto& [bw, fit] : fits) {
    (void)bw;
    rep.ratio_min = std::min(rep.ratio_min, fit.ratio);
    rep.ratio_max = std::max(rep.ratio_max, fit.ratio);
  }
  const double mid = 0.5 * (rep.ratio_min + rep.ratio_max);
  rep.ratio_spread_rel = mid > 0.0 ? (rep.ratio_max - rep.ratio_min) / mid : 0.0;
  for (std::size_t i = 0; i < fits.size(); ++i) {
    for (std::size_t j = i + 1; j < fits.size(); ++j) {
      BandwidthReport::PairComparison c;
      c.i = i;
      c.j = j;
      c.bandwidth_ratio = fits[i].first / fits[j].first;
      c.rate_ratio = fits[i].second.pair_rate / fits[j].second.pair_rate;
      c.rel_deviation =
          std::abs(c.rate_ratio - c.bandwidth_ratio) / c.bandwidth_ratio;
      rep.pairs.push_back(c);
    }
  }
  return rep;
}

std::vector<double> detuning_sweep_model(std::span<const double> delta_hz,
                                         double base_gain, double eta,
                                         double kappa) {
  if (!(base_gain > 1.0))
    throw std::domain_error("detuning_sweep_model: base_gain must be > 1");
  std::vector<double> out;
  out.reserve(delta_hz.size());
  const double hk = kappa / 2.0;
  for (double d : delta_hz) {
    const double w = kTwoPi * d;
    const double lorentz = hk * hk / (hk * hk + w * w);
    const double geff = 1.0 + (base_gain - 1.0) * lorentz;
    out.push_back(quantum::g2_model_gain(geff, eta));
  }
  return out;
}

}  // namespace nkpa::fitting
