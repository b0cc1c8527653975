#include "nkpa/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "nkpa/constants.hpp"
#include "nkpa/dsp.hpp"
#include "nkpa/rng.hpp"

namespace nkpa::synth {

namespace {

using Mat4 = std::array<double, 16>;

// Substream roles for seed derivation; records must reproduce
// independently of generation order.
enum Role : std::uint64_t {
  kRoleJointOn = 1,
  kRoleFloorOffA = 2,
  kRoleFloorOffB = 3,
  kRoleWhiteOnA = 4,
  kRoleWhiteOnB = 5,
  kRoleWhiteOffA = 6,
  kRoleWhiteOffB = 7,
  kRoleChainOn = 8,
  kRoleChainOff = 9,
  kRoleRecordId = 16,
};

// Smallest eigenvalue of a symmetric 4x4 by cyclic Jacobi rotations.
double min_eigenvalue_sym4(Mat4 m) {
  auto at = [&m](int i, int j) -> double& { return m[4 * i + j]; };
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) off += at(i, j) * at(i, j);
    if (off < 1e-30) break;
    for (int p = 0; p < 4; ++p) {
      for (int q = p + 1; q < 4; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 4; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < 4; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  double mn = m[0];
  for (int i = 1; i < 4; ++i) mn = std::min(mn, m[5 * i]);
  return mn;
}

// Lower-triangular semidefinite Cholesky; zero pivots produce zero
// columns (marginal moment matrices are expected).
Mat4 cholesky_semidef4(const Mat4& m) {
  Mat4 l{};
  for (int k = 0; k < 4; ++k) {
    double d = m[4 * k + k];
    for (int j = 0; j < k; ++j) d -= l[4 * k + j] * l[4 * k + j];
    const double piv = d > 0.0 ? std::sqrt(d) : 0.0;
    l[4 * k + k] = piv;
    for (int i = k + 1; i < 4; ++i) {
      double v = m[4 * i + k];
      for (int j = 0; j < k; ++j) v -= l[4 * i + j] * l[4 * k + j];
      l[4 * i + k] = piv > 1e-300 ? v / piv : 0.0;
    }
  }
  return l;
}

Mat4 normal_ordered_covariance(const quantum::TwoModeMoments& m) {
  auto v = m.quadrature_covariance();
  for (int i = 0; i < 4; ++i) v[5 * i] -= 0.5;
  return v;
}

// Joint 4-quadrature AR(1) process with stationary covariance `cov`.
void generate_joint(const Mat4& cov, double rho, std::uint64_t seed,
                    std::uint64_t n,
                    std::vector<std::complex<double>>& a,
                    std::vector<std::complex<double>>& b) {
  const Mat4 l = cholesky_semidef4(cov);
  GaussianStream g(seed);
  const double q = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  std::array<double, 4> u{}, w{};
  auto draw = [&] {
    const std::array<double, 4> z{g(), g(), g(), g()};
    for (int i = 0; i < 4; ++i) {
      double acc = 0.0;
      for (int j = 0; j <= i; ++j) acc += l[4 * i + j] * z[j];
      w[i] = acc;
    }
  };
  draw();
  u = w;  // stationary start
  constexpr double inv_sqrt2 = 0.7071067811865476;
  for (std::uint64_t k = 0; k < n; ++k) {
    a[k] = std::complex<double>(u[0], u[1]) * inv_sqrt2;
    b[k] = std::complex<double>(u[2], u[3]) * inv_sqrt2;
    draw();
    for (int i = 0; i < 4; ++i) u[i] = rho * u[i] + q * w[i];
  }
}

// Independent per-mode AR(1) envelope of total variance `var`.
void generate_scalar_ar1(double var, double rho, std::uint64_t seed,
                         std::vector<std::complex<double>>& out) {
  GaussianStream g(seed);
  const double s0 = std::sqrt(var / 2.0);
  const double si = s0 * std::sqrt(std::max(0.0, 1.0 - rho * rho));
  std::complex<double> z{s0 * g(), s0 * g()};
  for (auto& o : out) {
    o = z;
    z = rho * z + std::complex<double>(si * g(), si * g());
  }
}

void add_white(std::vector<std::complex<double>>& v, double occupancy,
               std::uint64_t seed) {
  if (occupancy == 0.0) return;
  GaussianStream g(seed);
  const double s = std::sqrt(occupancy / 2.0);
  for (auto& z : v) z += std::complex<double>(s * g(), s * g());
}

double alias_frequency(double f, double fs) {
  double x = std::fmod(f, fs);
  if (x < 0.0) x += fs;
  return x <= fs / 2.0 ? x : fs - x;
}

}  // namespace

void SynthConfig::validate() const {
  if (!moments.is_physical())
    throw std::domain_error("synth.moments: unphysical two-mode moments");
  if (!(gamma_c > 0.0)) throw std::domain_error("synth.gamma_c: must be > 0");
  if (n_added < 0.0) throw std::domain_error("synth.n_added: must be >= 0");
  if (line_gain < 0.0)
    throw std::domain_error("synth.line_gain: must be >= 0 (0 = auto)");
  if (!(fs > 0.0)) throw std::domain_error("synth.fs: must be > 0");
  if (!(fs > 2.0 * bw_analog))
    throw std::domain_error("synth.fs: must exceed 2 * bw_analog");
  if (!(f_if > 0.0) || f_if >= fs)
    throw std::domain_error("synth.f_if: must be in (0, fs)");
  if (!(bw_analog > 0.0))
    throw std::domain_error("synth.bw_analog: must be > 0");
  if (!(f_center > 0.0))
    throw std::domain_error("synth.f_center: must be > 0");
  if (!(full_scale > 0.0))
    throw std::domain_error("synth.full_scale: must be > 0");
  if (bits < 2 || bits > 16)
    throw std::domain_error("synth.bits: must be in [2, 16]");
  if (analog_order <= 0 || analog_order % 2 != 0)
    throw std::domain_error("synth.analog_order: must be positive and even");
  if (record_len < 4 || record_len % 2 != 0)
    throw std::domain_error("synth.record_len: must be even and >= 4");
}

std::string SynthConfig::canonical_text() const {
  char buf[256];
  std::string s = "nkpa-synth-config v1\n";
  auto add = [&](const char* key, double v) {
    std::snprintf(buf, sizeof(buf), "%s = %.17g\n", key, v);
    s += buf;
  };
  add("moments.n_a", moments.n_a);
  add("moments.n_b", moments.n_b);
  add("moments.m_re", moments.m_ab.real());
  add("moments.m_im", moments.m_ab.imag());
  add("moments.c_re", moments.c_ab.real());
  add("moments.c_im", moments.c_ab.imag());
  add("gamma_c", gamma_c);
  add("n_added", n_added);
  add("line_gain", line_gain);
  add("f_if", f_if);
  add("f_center", f_center);
  add("bw_analog", bw_analog);
  add("fs", fs);
  add("full_scale", full_scale);
  std::snprintf(buf, sizeof(buf), "bits = %d\nanalog_order = %d\n", bits,
                analog_order);
  s += buf;
  std::snprintf(buf, sizeof(buf), "record_len = %llu\nseed = %llu\n",
                static_cast<unsigned long long>(record_len),
                static_cast<unsigned long long>(seed));
  s += buf;
  return s;
}

detail::Digest SynthConfig::digest() const {
  return detail::sha256(canonical_text());
}

double SynthConfig::resolved_line_gain() const {
  if (line_gain > 0.0) return line_gain;
  const double p_nom =
      std::max(moments.n_a, moments.n_b) + 0.5 + n_added;
  return full_scale * full_scale * 2.0 / (25.0 * p_nom);
}

FloorSplit floor_split(const quantum::TwoModeMoments& m) {
  const double lam = min_eigenvalue_sym4(normal_ordered_covariance(m));
  double f = lam < 0.0 ? -lam * (1.0 + 1e-12) + 1e-15 : 0.0;
  f = std::min(f, 0.5);
  return {f, 0.5 - f};
}

quantum::TwoModeMoments envelope_targets(const quantum::TwoModeMoments& m) {
  quantum::TwoModeMoments t = m;
  t.n_a += 0.5;
  t.n_b += 0.5;
  return t;
}

EnvelopePair synth_envelopes(const SynthConfig& cfg) {
  return synth_envelopes(cfg, cfg.record_len, 0, true);
}

EnvelopePair synth_envelopes(const SynthConfig& cfg, std::uint64_t n_samples,
                             std::uint64_t buffer_index, bool on) {
  cfg.validate();
  const FloorSplit fl = floor_split(cfg.moments);
  const double dt = 1.0 / cfg.fs;
  const double rho = std::exp(-cfg.gamma_c * dt / 2.0);

  EnvelopePair pair;
  pair.dt = dt;
  pair.a.resize(n_samples);
  pair.b.resize(n_samples);

  if (on) {
    Mat4 cov = normal_ordered_covariance(cfg.moments);
    for (int i = 0; i < 4; ++i) cov[5 * i] += fl.correlated;
    generate_joint(cov, rho, derive_seed(cfg.seed, buffer_index, kRoleJointOn),
                   n_samples, pair.a, pair.b);
  } else {
    generate_scalar_ar1(fl.correlated, rho,
                        derive_seed(cfg.seed, buffer_index, kRoleFloorOffA),
                        pair.a);
    generate_scalar_ar1(fl.correlated, rho,
                        derive_seed(cfg.seed, buffer_index, kRoleFloorOffB),
                        pair.b);
  }
  add_white(pair.a, fl.white,
            derive_seed(cfg.seed, buffer_index,
                        on ? kRoleWhiteOnA : kRoleWhiteOffA));
  add_white(pair.b, fl.white,
            derive_seed(cfg.seed, buffer_index,
                        on ? kRoleWhiteOnB : kRoleWhiteOffB));
  return pair;
}

EnvelopePair add_chain_noise(EnvelopePair pair, double n_added,
                             double line_gain, std::uint64_t seed) {
  if (n_added < 0.0) throw std::domain_error("n_added must be >= 0");
  if (!(line_gain > 0.0)) throw std::domain_error("line_gain must be > 0");
  if (n_added > 0.0) {
    add_white(pair.a, n_added, derive_seed(seed, 0, 1));
    add_white(pair.b, n_added, derive_seed(seed, 0, 2));
  }
  if (line_gain != 1.0) {
    const double s = std::sqrt(line_gain);
    for (auto& z : pair.a) z *= s;
    for (auto& z : pair.b) z *= s;
  }
  return pair;
}

std::pair<std::vector<double>, std::vector<double>> upconvert(
    const EnvelopePair& pair, double f_if, double fs) {
  const std::size_t n = pair.a.size();
  std::vector<double> va(n), vb(n);
  if (f_if * 4.0 == fs * 3.0) {
    // cos pattern 1,0,-1,0 ; sin pattern 0,-1,0,1
    for (std::size_t k = 0; k < n; ++k) {
      switch (k % 4) {
        case 0:
          va[k] = pair.a[k].real();
          vb[k] = pair.b[k].real();
          break;
        case 1:
          va[k] = -pair.a[k].imag();
          vb[k] = -pair.b[k].imag();
          break;
        case 2:
          va[k] = -pair.a[k].real();
          vb[k] = -pair.b[k].real();
          break;
        default:
          va[k] = pair.a[k].imag();
          vb[k] = pair.b[k].imag();
          break;
      }
    }
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      const double ph =
          kTwoPi * std::fmod(f_if * static_cast<double>(k), fs) / fs;
      const double c = std::cos(ph), s = std::sin(ph);
      va[k] = pair.a[k].real() * c + pair.a[k].imag() * s;
      vb[k] = pair.b[k].real() * c + pair.b[k].imag() * s;
    }
  }
  return {std::move(va), std::move(vb)};
}

std::vector<std::int16_t> quantize(const std::vector<double>& v,
                                   double full_scale, int bits,
                                   ClipStats* stats) {
  if (bits < 2 || bits > 16)
    throw std::domain_error("quantize: bits must be in [2, 16]");
  if (!(full_scale > 0.0))
    throw std::domain_error("quantize: full_scale must be > 0");
  const double scale = static_cast<double>(1 << (bits - 1));
  const long qmax = (1l << (bits - 1)) - 1;
  std::vector<std::int16_t> out(v.size());
  ClipStats local;
  local.total = v.size();
  for (std::size_t i = 0; i < v.size(); ++i) {
    long code = std::lround(v[i] / full_scale * scale);
    if (code > qmax) {
      code = qmax;
      ++local.clipped_high;
    } else if (code < -qmax) {
      code = -qmax;
      ++local.clipped_low;
    }
    out[i] = static_cast<std::int16_t>(code);
  }
  if (stats) *stats = local;
  return out;
}

namespace {

struct ChainOutput {
  std::vector<double> on_a, on_b, off_a, off_b;
};

ChainOutput run_chain(const SynthConfig& cfg, std::uint64_t buffer_index) {
  cfg.validate();
  const std::uint64_t n_env = cfg.record_len + cfg.analog_order;
  const double lg = cfg.resolved_line_gain();

  EnvelopePair on = add_chain_noise(
      synth_envelopes(cfg, n_env, buffer_index, true), cfg.n_added, lg,
      derive_seed(cfg.seed, buffer_index, kRoleChainOn));
  EnvelopePair off = add_chain_noise(
      synth_envelopes(cfg, n_env, buffer_index, false), cfg.n_added, lg,
      derive_seed(cfg.seed, buffer_index, kRoleChainOff));

  auto [von_a, von_b] = upconvert(on, cfg.f_if, cfg.fs);
  auto [voff_a, voff_b] = upconvert(off, cfg.f_if, cfg.fs);

  const dsp::FirFilter analog = dsp::design_fir(
      cfg.analog_order, alias_frequency(cfg.f_center, cfg.fs), cfg.bw_analog,
      cfg.fs);
  ChainOutput out;
  out.on_a = dsp::filter_valid(analog, von_a);
  out.on_b = dsp::filter_valid(analog, von_b);
  out.off_a = dsp::filter_valid(analog, voff_a);
  out.off_b = dsp::filter_valid(analog, voff_b);
  return out;
}

}  // namespace

BufferRecords make_record_pair(const SynthConfig& cfg,
                               std::uint64_t buffer_index) {
  ChainOutput chain = run_chain(cfg, buffer_index);
  const auto dig = cfg.digest();

  auto make = [&](std::vector<double>& v, RecordTag tag,
                  std::uint64_t channel) {
    VoltageRecord rec;
    rec.samples = quantize(v, cfg.full_scale, cfg.bits);
    rec.fs = cfg.fs;
    rec.tag = tag;
    rec.seed_used = derive_seed(
        cfg.seed, buffer_index,
        kRoleRecordId + 2 * channel + (tag == RecordTag::on ? 1 : 0));
    rec.config_digest = dig;
    return rec;
  };

  BufferRecords out;
  out.a.on = make(chain.on_a, RecordTag::on, 0);
  out.a.off = make(chain.off_a, RecordTag::off, 0);
  out.b.on = make(chain.on_b, RecordTag::on, 1);
  out.b.off = make(chain.off_b, RecordTag::off, 1);
  return out;
}

VoltageTraces make_voltage_traces(const SynthConfig& cfg,
                                  std::uint64_t buffer_index) {
  ChainOutput chain = run_chain(cfg, buffer_index);
  VoltageTraces t;
  t.fs = cfg.fs;
  t.on_a = std::move(chain.on_a);
  t.on_b = std::move(chain.on_b);
  t.off_a = std::move(chain.off_a);
  t.off_b = std::move(chain.off_b);
  return t;
}

}  // namespace nkpa::synth
