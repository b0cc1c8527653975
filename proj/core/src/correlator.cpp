#include "nkpa/correlator.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace nkpa::dsp {

namespace {

void neumaier_add(double& sum, double& comp, double v) {
  const double t = sum + v;
  if (std::abs(sum) >= std::abs(v))
    comp += (sum - t) + v;
  else
    comp += (v - t) + sum;
  sum = t;
}

void neumaier_merge(std::vector<double>& sum, std::vector<double>& comp,
                    const std::vector<double>& osum,
                    const std::vector<double>& ocomp) {
  for (std::size_t i = 0; i < sum.size(); ++i) {
    neumaier_add(sum[i], comp[i], osum[i]);
    neumaier_add(sum[i], comp[i], ocomp[i]);
  }
}

bool add_overflows(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  return __builtin_add_overflow(a, b, &r);
}

struct BufferSums {
  std::vector<std::int64_t> iab, iaa, ibb;  // ab sized 2L+1, auto L+1
  std::vector<double> ab, aa, bb;
  std::int64_t ipa = 0, ipb = 0;
  double pa = 0, pb = 0;
  bool integer = false;
};

template <typename T>
void lag_kernel(const std::vector<T>& na, const std::vector<T>& nb, int max_lag,
                std::vector<T>& ab, std::vector<T>& aa, std::vector<T>& bb) {
  const std::size_t t_len = na.size();
  for (int l = 0; l <= max_lag; ++l) {
    const std::size_t n = t_len - static_cast<std::size_t>(l);
    T s_aa{}, s_bb{}, s_abp{}, s_abm{};
    const T* __restrict a0 = na.data();
    const T* __restrict al = na.data() + l;
    const T* __restrict b0 = nb.data();
    const T* __restrict bl = nb.data() + l;
    for (std::size_t t = 0; t < n; ++t) {
      s_aa += al[t] * a0[t];
      s_bb += bl[t] * b0[t];
      s_abp += al[t] * b0[t];  // n_a(t+l) n_b(t)
      s_abm += a0[t] * bl[t];  // n_a(t) n_b(t+l)
    }
    aa[l] += s_aa;
    bb[l] += s_bb;
    ab[max_lag + l] += s_abp;
    if (l > 0) ab[max_lag - l] += s_abm;
  }
}

BufferSums buffer_sums(const QuadratureStream& qa, const QuadratureStream& qb,
                       int max_lag) {
  BufferSums s;
  const std::size_t t_len = qa.x.size();

  bool integer_ok = qa.quantized && qb.quantized;
  if (integer_ok) {
    // exact-path bound: (2 c^2)^2 * T <= ~2^61
    double cmax = 0;
    for (double v : qa.x) cmax = std::max(cmax, std::abs(v));
    for (double v : qa.p) cmax = std::max(cmax, std::abs(v));
    for (double v : qb.x) cmax = std::max(cmax, std::abs(v));
    for (double v : qb.p) cmax = std::max(cmax, std::abs(v));
    const double nmax = 2.0 * cmax * cmax;
    integer_ok = nmax * nmax * static_cast<double>(t_len) < 2.3e18;
  }
  s.integer = integer_ok;

  if (integer_ok) {
    std::vector<std::int64_t> na(t_len), nb(t_len);
    for (std::size_t t = 0; t < t_len; ++t) {
      const auto xa = static_cast<std::int64_t>(qa.x[t]);
      const auto pa = static_cast<std::int64_t>(qa.p[t]);
      const auto xb = static_cast<std::int64_t>(qb.x[t]);
      const auto pb = static_cast<std::int64_t>(qb.p[t]);
      na[t] = xa * xa + pa * pa;
      nb[t] = xb * xb + pb * pb;
      s.ipa += na[t];
      s.ipb += nb[t];
    }
    s.iab.assign(2 * max_lag + 1, 0);
    s.iaa.assign(max_lag + 1, 0);
    s.ibb.assign(max_lag + 1, 0);
    lag_kernel(na, nb, max_lag, s.iab, s.iaa, s.ibb);
  } else {
    std::vector<double> na(t_len), nb(t_len);
    for (std::size_t t = 0; t < t_len; ++t) {
      na[t] = qa.x[t] * qa.x[t] + qa.p[t] * qa.p[t];
      nb[t] = qb.x[t] * qb.x[t] + qb.p[t] * qb.p[t];
      s.pa += na[t];
      s.pb += nb[t];
    }
    s.ab.assign(2 * max_lag + 1, 0.0);
    s.aa.assign(max_lag + 1, 0.0);
    s.bb.assign(max_lag + 1, 0.0);
    lag_kernel(na, nb, max_lag, s.ab, s.aa, s.bb);
  }
  return s;
}

}  // namespace

MomentAccumulator& MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.empty()) return *this;
  if (empty()) {
    *this = other;
    return *this;
  }
  if (other.max_lag != max_lag || other.dt != dt)
    throw AlignmentError("merge: accumulators use different lag grids");

  auto migrate = [](MomentAccumulator& m) {
    if (!m.integer_mode) return;
    auto conv = [](const std::vector<std::int64_t>& iv, std::vector<double>& v,
                   std::vector<double>& c) {
      v.assign(iv.begin(), iv.end());
      c.assign(iv.size(), 0.0);
    };
    conv(m.iab_on, m.ab_on, m.ab_on_c);
    conv(m.iab_off, m.ab_off, m.ab_off_c);
    conv(m.iaa_on, m.aa_on, m.aa_on_c);
    conv(m.iaa_off, m.aa_off, m.aa_off_c);
    conv(m.ibb_on, m.bb_on, m.bb_on_c);
    conv(m.ibb_off, m.bb_off, m.bb_off_c);
    m.pa_on = static_cast<double>(m.ipa_on);
    m.pb_on = static_cast<double>(m.ipb_on);
    m.pa_off = static_cast<double>(m.ipa_off);
    m.pb_off = static_cast<double>(m.ipb_off);
    m.integer_mode = false;
  };

  bool use_int = integer_mode && other.integer_mode;
  if (use_int) {
    // keep the exact path only while sums stay in range
    for (std::size_t i = 0; i < iab_on.size() && use_int; ++i)
      use_int = !add_overflows(iab_on[i], other.iab_on[i]) &&
                !add_overflows(iab_off[i], other.iab_off[i]);
    for (std::size_t i = 0; i < iaa_on.size() && use_int; ++i)
      use_int = !add_overflows(iaa_on[i], other.iaa_on[i]) &&
                !add_overflows(iaa_off[i], other.iaa_off[i]) &&
                !add_overflows(ibb_on[i], other.ibb_on[i]) &&
                !add_overflows(ibb_off[i], other.ibb_off[i]);
  }

  if (use_int) {
    for (std::size_t i = 0; i < iab_on.size(); ++i) {
      iab_on[i] += other.iab_on[i];
      iab_off[i] += other.iab_off[i];
    }
    for (std::size_t i = 0; i < iaa_on.size(); ++i) {
      iaa_on[i] += other.iaa_on[i];
      iaa_off[i] += other.iaa_off[i];
      ibb_on[i] += other.ibb_on[i];
      ibb_off[i] += other.ibb_off[i];
    }
    ipa_on += other.ipa_on;
    ipb_on += other.ipb_on;
    ipa_off += other.ipa_off;
    ipb_off += other.ipb_off;
  } else {
    migrate(*this);
    MomentAccumulator tmp;
    const MomentAccumulator* rhs = &other;
    if (other.integer_mode) {
      tmp = other;
      migrate(tmp);
      rhs = &tmp;
    }
    neumaier_merge(ab_on, ab_on_c, rhs->ab_on, rhs->ab_on_c);
    neumaier_merge(ab_off, ab_off_c, rhs->ab_off, rhs->ab_off_c);
    neumaier_merge(aa_on, aa_on_c, rhs->aa_on, rhs->aa_on_c);
    neumaier_merge(aa_off, aa_off_c, rhs->aa_off, rhs->aa_off_c);
    neumaier_merge(bb_on, bb_on_c, rhs->bb_on, rhs->bb_on_c);
    neumaier_merge(bb_off, bb_off_c, rhs->bb_off, rhs->bb_off_c);
    pa_on += rhs->pa_on;
    pb_on += rhs->pb_on;
    pa_off += rhs->pa_off;
    pb_off += rhs->pb_off;
  }
  for (std::size_t i = 0; i < count.size(); ++i) count[i] += other.count[i];
  n_buffers += other.n_buffers;
  total_samples += other.total_samples;
  return *this;
}

void accumulate(MomentAccumulator& acc, const QuadratureStream& on_a,
                const QuadratureStream& on_b, const QuadratureStream& off_a,
                const QuadratureStream& off_b, double max_lag_s) {
  const std::size_t t_len = on_a.x.size();
  if (on_b.x.size() != t_len || off_a.x.size() != t_len ||
      off_b.x.size() != t_len)
    throw AlignmentError("accumulate: ON/OFF stream lengths differ");
  if (on_a.fs_effective != on_b.fs_effective ||
      on_a.fs_effective != off_a.fs_effective ||
      on_a.fs_effective != off_b.fs_effective)
    throw AlignmentError("accumulate: stream rates differ");

  const double dt = 1.0 / on_a.fs_effective;
  const int max_lag = static_cast<int>(std::llround(max_lag_s / dt));
  if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= t_len)
    throw AlignmentError("accumulate: lag grid exceeds stream length");

  if (acc.max_lag < 0) {
    acc.max_lag = max_lag;
    acc.dt = dt;
    acc.iab_on.assign(2 * max_lag + 1, 0);
    acc.iab_off.assign(2 * max_lag + 1, 0);
    acc.iaa_on.assign(max_lag + 1, 0);
    acc.iaa_off.assign(max_lag + 1, 0);
    acc.ibb_on.assign(max_lag + 1, 0);
    acc.ibb_off.assign(max_lag + 1, 0);
    acc.count.assign(max_lag + 1, 0);
  } else if (acc.max_lag != max_lag || acc.dt != dt) {
    throw AlignmentError("accumulate: lag grid mismatch with accumulator");
  }

  MomentAccumulator local;
  local.max_lag = max_lag;
  local.dt = dt;
  local.n_buffers = 1;
  local.total_samples = t_len;
  local.count.assign(max_lag + 1, 0);
  for (int l = 0; l <= max_lag; ++l)
    local.count[l] = static_cast<std::int64_t>(t_len - l);

  BufferSums on = buffer_sums(on_a, on_b, max_lag);
  BufferSums off = buffer_sums(off_a, off_b, max_lag);

  if (on.integer && off.integer) {
    local.iab_on = std::move(on.iab);
    local.iaa_on = std::move(on.iaa);
    local.ibb_on = std::move(on.ibb);
    local.iab_off = std::move(off.iab);
    local.iaa_off = std::move(off.iaa);
    local.ibb_off = std::move(off.ibb);
    local.ipa_on = on.ipa;
    local.ipb_on = on.ipb;
    local.ipa_off = off.ipa;
    local.ipb_off = off.ipb;
  } else {
    auto to_f = [](BufferSums& s, int lag_n) {
      if (!s.integer) return;
      s.ab.assign(s.iab.begin(), s.iab.end());
      s.aa.assign(s.iaa.begin(), s.iaa.end());
      s.bb.assign(s.ibb.begin(), s.ibb.end());
      s.pa = static_cast<double>(s.ipa);
      s.pb = static_cast<double>(s.ipb);
      (void)lag_n;
    };
    to_f(on, max_lag);
    to_f(off, max_lag);
    local.integer_mode = false;
    local.ab_on = std::move(on.ab);
    local.aa_on = std::move(on.aa);
    local.bb_on = std::move(on.bb);
    local.ab_off = std::move(off.ab);
    local.aa_off = std::move(off.aa);
    local.bb_off = std::move(off.bb);
    local.ab_on_c.assign(2 * max_lag + 1, 0.0);
    local.ab_off_c.assign(2 * max_lag + 1, 0.0);
    local.aa_on_c.assign(max_lag + 1, 0.0);
    local.aa_off_c.assign(max_lag + 1, 0.0);
    local.bb_on_c.assign(max_lag + 1, 0.0);
    local.bb_off_c.assign(max_lag + 1, 0.0);
    local.pa_on = on.pa;
    local.pb_on = on.pb;
    local.pa_off = off.pa;
    local.pb_off = off.pb;
    local.iab_on.clear();
    local.iab_off.clear();
    local.iaa_on.clear();
    local.iaa_off.clear();
    local.ibb_on.clear();
    local.ibb_off.clear();
  }

  acc.merge(local);
}

namespace {

struct Means {
  double a_on, b_on, a_off, b_off;
};

Means means_of(const MomentAccumulator& acc) {
  if (acc.empty()) throw std::logic_error("estimator: empty accumulator");
  const double n = static_cast<double>(acc.total_samples);
  if (acc.integer_mode)
    return {static_cast<double>(acc.ipa_on) / n,
            static_cast<double>(acc.ipb_on) / n,
            static_cast<double>(acc.ipa_off) / n,
            static_cast<double>(acc.ipb_off) / n};
  return {acc.pa_on / n, acc.pb_on / n, acc.pa_off / n, acc.pb_off / n};
}

double lag_sum(const MomentAccumulator& acc,
               const std::vector<std::int64_t>& iv,
               const std::vector<double>& v, const std::vector<double>& c,
               std::size_t i) {
  return acc.integer_mode ? static_cast<double>(iv[i]) : v[i] + c[i];
}

}  // namespace

std::vector<double> g2_cross(const MomentAccumulator& acc) {
  const Means mu = means_of(acc);
  const double nsa = mu.a_on - mu.a_off;
  const double nsb = mu.b_on - mu.b_off;
  if (!(nsa > 0.0) || !(nsb > 0.0))
    throw SubtractionError(mu.a_on, mu.a_off, mu.b_on, mu.b_off);
  const double den = nsa * nsb;
  const int max_lag = acc.max_lag;
  std::vector<double> g2(2 * max_lag + 1);
  for (int idx = 0; idx <= 2 * max_lag; ++idx) {
    const int abs_lag = std::abs(idx - max_lag);
    const double cnt = static_cast<double>(acc.count[abs_lag]);
    const double m_ab =
        lag_sum(acc, acc.iab_on, acc.ab_on, acc.ab_on_c, idx) / cnt;
    const double num =
        m_ab - mu.a_on * mu.b_off - mu.a_off * mu.b_on + mu.a_off * mu.b_off;
    g2[idx] = num / den;
  }
  return g2;
}

std::vector<double> g2_auto(const MomentAccumulator& acc, Mode mode,
                            EstimatorVariant variant) {
  const Means mu = means_of(acc);
  const double m_on = mode == Mode::a ? mu.a_on : mu.b_on;
  const double m_off = mode == Mode::a ? mu.a_off : mu.b_off;
  const double ns = m_on - m_off;
  if (!(ns > 0.0))
    throw SubtractionError(mu.a_on, mu.a_off, mu.b_on, mu.b_off);

  const auto& ion = mode == Mode::a ? acc.iaa_on : acc.ibb_on;
  const auto& ioff = mode == Mode::a ? acc.iaa_off : acc.ibb_off;
  const auto& von = mode == Mode::a ? acc.aa_on : acc.bb_on;
  const auto& voff = mode == Mode::a ? acc.aa_off : acc.bb_off;
  const auto& con = mode == Mode::a ? acc.aa_on_c : acc.bb_on_c;
  const auto& coff = mode == Mode::a ? acc.aa_off_c : acc.bb_off_c;

  const double last = variant == EstimatorVariant::paper
                          ? 2.0 * m_off * m_on
                          : 2.0 * m_off * ns;
  const double den = ns * ns;
  const int max_lag = acc.max_lag;
  std::vector<double> g2(2 * max_lag + 1);
  for (int l = 0; l <= max_lag; ++l) {
    const double cnt = static_cast<double>(acc.count[l]);
    const double nn_on = lag_sum(acc, ion, von, con, l) / cnt;
    const double nn_off = lag_sum(acc, ioff, voff, coff, l) / cnt;
    const double num = nn_on - 2.0 * ns * m_off - nn_off - last;
    g2[max_lag + l] = num / den;
    g2[max_lag - l] = num / den;
  }
  return g2;
}

CorrelationResult segment_stats(
    const std::vector<MomentAccumulator>& per_buffer, std::uint64_t n_segments,
    EstimatorVariant variant) {
  if (n_segments == 0)
    throw PartitionError("segment_stats: n_segments must be >= 1");
  if (per_buffer.empty())
    throw PartitionError("segment_stats: no buffers");
  if (per_buffer.size() % n_segments != 0)
    throw PartitionError(
        "segment_stats: buffer count not divisible by n_segments");
  const std::size_t per_seg = per_buffer.size() / n_segments;

  MomentAccumulator total;
  std::vector<MomentAccumulator> segs(n_segments);
  for (std::size_t i = 0; i < per_buffer.size(); ++i) {
    segs[i / per_seg].merge(per_buffer[i]);
    total.merge(per_buffer[i]);
  }

  CorrelationResult r;
  r.n_buffers = per_buffer.size();
  r.n_segments = n_segments;
  r.variant = variant;
  const int max_lag = total.max_lag;
  r.lag_s.resize(2 * max_lag + 1);
  for (int i = 0; i <= 2 * max_lag; ++i)
    r.lag_s[i] = (i - max_lag) * total.dt;

  r.g2_ab = g2_cross(total);
  r.g2_aa = g2_auto(total, Mode::a, variant);
  r.g2_bb = g2_auto(total, Mode::b, variant);

  std::vector<std::vector<double>> seg_ab(n_segments), seg_aa(n_segments),
      seg_bb(n_segments);
  for (std::uint64_t s = 0; s < n_segments; ++s) {
    seg_ab[s] = g2_cross(segs[s]);
    seg_aa[s] = g2_auto(segs[s], Mode::a, variant);
    seg_bb[s] = g2_auto(segs[s], Mode::b, variant);
  }

  auto stddev = [&](const std::vector<std::vector<double>>& seg,
                    std::size_t idx) {
    if (n_segments < 2) return 0.0;
    double mean = 0.0;
    for (const auto& sv : seg) mean += sv[idx];
    mean /= static_cast<double>(n_segments);
    double ss = 0.0;
    for (const auto& sv : seg) ss += (sv[idx] - mean) * (sv[idx] - mean);
    return std::sqrt(ss / static_cast<double>(n_segments - 1));
  };

  const std::size_t n_lags = r.lag_s.size();
  r.g2_ab_err.resize(n_lags);
  r.g2_aa_err.resize(n_lags);
  r.g2_bb_err.resize(n_lags);
  for (std::size_t i = 0; i < n_lags; ++i) {
    r.g2_ab_err[i] = stddev(seg_ab, i);
    r.g2_aa_err[i] = stddev(seg_aa, i);
    r.g2_bb_err[i] = stddev(seg_bb, i);
  }
  return r;
}

void write_result(std::ostream& os, const CorrelationResult& r,
                  const std::string& config_digest_hex) {
  os << "# nkpa correlation result v1\n";
  os << "# config_digest = " << config_digest_hex << "\n";
  os << "# estimator = " << to_string(r.variant) << "\n";
  os << "# n_buffers = " << r.n_buffers << "\n";
  os << "# n_segments = " << r.n_segments << "\n";
  os << "# columns: lag_s g2_ab g2_ab_err g2_aa g2_aa_err g2_bb g2_bb_err\n";
  char line[512];
  for (std::size_t i = 0; i < r.lag_s.size(); ++i) {
    std::snprintf(line, sizeof(line),
                  "%.12e\t%.12e\t%.12e\t%.12e\t%.12e\t%.12e\t%.12e\n",
                  r.lag_s[i], r.g2_ab[i], r.g2_ab_err[i], r.g2_aa[i],
                  r.g2_aa_err[i], r.g2_bb[i], r.g2_bb_err[i]);
    os << line;
  }
}

CorrelationResult read_result(std::istream& is) {
  CorrelationResult r;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        if (key.find("estimator") != std::string::npos)
          r.variant = val.find("paper") != std::string::npos
                          ? EstimatorVariant::paper
                          : EstimatorVariant::rederived;
        else if (key.find("n_buffers") != std::string::npos)
          r.n_buffers = std::strtoull(val.c_str(), nullptr, 10);
        else if (key.find("n_segments") != std::string::npos)
          r.n_segments = std::strtoull(val.c_str(), nullptr, 10);
      }
      continue;
    }
    std::istringstream ls(line);
    double lag, ab, abe, aa, aae, bb, bbe;
    if (!(ls >> lag >> ab >> abe >> aa >> aae >> bb >> bbe))
      throw std::runtime_error("read_result: malformed data line");
    r.lag_s.push_back(lag);
    r.g2_ab.push_back(ab);
    r.g2_ab_err.push_back(abe);
    r.g2_aa.push_back(aa);
    r.g2_aa_err.push_back(aae);
    r.g2_bb.push_back(bb);
    r.g2_bb_err.push_back(bbe);
  }
  return r;
}

}  // namespace nkpa::dsp
