#include "nkpa/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nkpa/constants.hpp"

namespace nkpa::config {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double parse_double(const std::string& field, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError(field, "not a number: '" + v + "'");
  return x;
}

std::uint64_t parse_u64(const std::string& field, const std::string& v) {
  char* end = nullptr;
  const auto x = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError(field, "not an unsigned integer: '" + v + "'");
  return x;
}

int parse_int(const std::string& field, const std::string& v) {
  return static_cast<int>(parse_u64(field, v));
}

bool parse_bool(const std::string& field, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(field, "not a boolean: '" + v + "'");
}

std::vector<double> parse_list(const std::string& field, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_double(field, item));
  }
  return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig c;
  c.device.f0 = 7.359e9;
  c.device.kappa_ex = kTwoPi * 20e6;  // unpublished; synthetic default
  c.device.kappa_in = kTwoPi * 3e6;
  c.device.kerr_k = kTwoPi * 110e3;
  c.device.l_k0 = 1.0e-7;
  c.device.i_star = 2.0e-5;
  // zero-point current solved from the Kerr formula so the triple is
  // self-consistent with kerr_k
  c.device.i_zpf = std::pow(
      c.device.kerr_k * kHbar * c.device.i_star * c.device.i_star /
          (6.0 * c.device.l_k0),
      0.25);
  c.drive.delta = kTwoPi * 57e6;
  return c;
}

quantum::TwoModeMoments ExperimentConfig::source_moments() const {
  if (synth.source == SourceKind::thermal) {
    quantum::TwoModeMoments m;
    m.n_a = synth.nbar;
    m.n_b = synth.nbar;
    return m;
  }
  const double r = std::asinh(std::sqrt(synth.nbar));
  return quantum::tms_moments(r, synth.thermal_occupancy);
}

synth::SynthConfig ExperimentConfig::synth_config() const {
  synth::SynthConfig s;
  s.moments = source_moments();
  s.gamma_c = synth.gamma_c;
  s.n_added = synth.n_added;
  s.line_gain = synth.line_gain;
  s.f_if = synth.f_if;
  s.f_center = synth.f_center;
  s.bw_analog = synth.bw_analog;
  s.fs = synth.fs;
  s.full_scale = synth.full_scale;
  s.bits = synth.bits;
  s.analog_order = synth.analog_order;
  s.record_len = synth.record_len;
  s.seed = run.seed;
  return s;
}

void ExperimentConfig::apply_paper_scale() {
  synth.record_len = 1ull << 21;
  synth.n_buffers = 500;
}

void ExperimentConfig::validate() const {
  try {
    device.validate();
  } catch (const std::domain_error& e) {
    throw ConfigError("device", e.what());
  }
  if (!(drive.gain >= 1.0))
    throw ConfigError("drive.gain", "must be >= 1");
  if (!(drive.eta > 0.0) || drive.eta > 1.0)
    throw ConfigError("drive.eta", "must be in (0, 1]");
  if (drive.a1 < 0.0 || drive.a2 < 0.0)
    throw ConfigError("drive.a1/a2", "must be >= 0");
  if (drive.power < 0.0) throw ConfigError("drive.power_w", "must be >= 0");

  if (synth.nbar < 0.0) throw ConfigError("synth.nbar", "must be >= 0");
  if (synth.thermal_occupancy < 0.0)
    throw ConfigError("synth.thermal_occupancy", "must be >= 0");
  try {
    synth_config().validate();
  } catch (const std::domain_error& e) {
    throw ConfigError("synth", e.what());
  }

  if (pipeline.fir_order <= 0 || pipeline.fir_order % 2 != 0)
    throw ConfigError("pipeline.fir_order", "must be positive and even");
  if (pipeline.digital_bw < 0.0)
    throw ConfigError("pipeline.digital_bw_hz", "must be >= 0 (0 = off)");
  if (pipeline.digital_bw > 0.0 && pipeline.digital_bw / 2.0 >= synth.fs / 4.0)
    throw ConfigError("pipeline.digital_bw_hz",
                      "band edge exceeds the post-translation Nyquist");
  if (!(pipeline.max_lag_s > 0.0))
    throw ConfigError("pipeline.max_lag_s", "must be > 0");
  const double stream_span =
      static_cast<double>(synth.record_len) / 2.0 / (synth.fs / 2.0);
  if (pipeline.max_lag_s >= stream_span)
    throw ConfigError("pipeline.max_lag_s", "exceeds the record span");
  if (pipeline.n_segments < 1)
    throw ConfigError("pipeline.n_segments", "must be >= 1");
  if (synth.n_buffers < 1)
    throw ConfigError("synth.n_buffers", "must be >= 1");
  if (synth.n_buffers % pipeline.n_segments != 0)
    throw ConfigError("synth.n_buffers",
                      "must be divisible by pipeline.n_segments");

  if (sweep.kind != SweepKind::none && sweep.values.empty())
    throw ConfigError("sweep.values", "sweep requires a value list");
  if (sweep.kind == SweepKind::power)
    for (double v : sweep.values)
      if (!(v > 1.0))
        throw ConfigError("sweep.values", "power sweep values are gains > 1");
  if (sweep.kind == SweepKind::bandwidth)
    for (double v : sweep.values)
      if (!(v > 0.0) || v / 2.0 >= synth.fs / 4.0)
        throw ConfigError("sweep.values", "bandwidths must fit below Nyquist");
  if (sweep.kind == SweepKind::detuning)
    for (double v : sweep.values)
      if (v < 0.0) throw ConfigError("sweep.values", "detunings must be >= 0");

  if (run.parallel < 0) throw ConfigError("run.parallel", "must be >= 0");
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig c = defaults();
  std::string section;
  std::size_t line_no = 0;
  std::stringstream ss{std::string(text)};
  std::string raw;
  while (std::getline(ss, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(line_no),
                          "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "device" && section != "drive" && section != "synth" &&
          section != "pipeline" && section != "sweep" && section != "run")
        throw ConfigError(section, "unknown section");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no),
                        "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const std::string path = section + "." + key;

    if (section == "device") {
      if (key == "f0_hz") c.device.f0 = parse_double(path, val);
      else if (key == "kappa_ex_hz") c.device.kappa_ex = kTwoPi * parse_double(path, val);
      else if (key == "kappa_in_hz") c.device.kappa_in = kTwoPi * parse_double(path, val);
      else if (key == "kerr_hz") c.device.kerr_k = kTwoPi * parse_double(path, val);
      else if (key == "l_k0") c.device.l_k0 = parse_double(path, val);
      else if (key == "i_star") c.device.i_star = parse_double(path, val);
      else if (key == "i_zpf") c.device.i_zpf = parse_double(path, val);
      else throw ConfigError(path, "unknown key");
    } else if (section == "drive") {
      if (key == "gain") c.drive.gain = parse_double(path, val);
      else if (key == "eta") c.drive.eta = parse_double(path, val);
      else if (key == "a1") c.drive.a1 = parse_double(path, val);
      else if (key == "a2") c.drive.a2 = parse_double(path, val);
      else if (key == "phi1") c.drive.phi1 = parse_double(path, val);
      else if (key == "phi2") c.drive.phi2 = parse_double(path, val);
      else if (key == "delta_hz") c.drive.delta = kTwoPi * parse_double(path, val);
      else if (key == "power_w") c.drive.power = parse_double(path, val);
      else throw ConfigError(path, "unknown key");
    } else if (section == "synth") {
      if (key == "source") {
        if (val == "tms") c.synth.source = SourceKind::tms;
        else if (val == "thermal") c.synth.source = SourceKind::thermal;
        else throw ConfigError(path, "must be 'tms' or 'thermal'");
      }
      else if (key == "nbar") c.synth.nbar = parse_double(path, val);
      else if (key == "thermal_occupancy") c.synth.thermal_occupancy = parse_double(path, val);
      else if (key == "gamma_c") c.synth.gamma_c = parse_double(path, val);
      else if (key == "n_added") c.synth.n_added = parse_double(path, val);
      else if (key == "line_gain") c.synth.line_gain = parse_double(path, val);
      else if (key == "f_if_hz") c.synth.f_if = parse_double(path, val);
      else if (key == "f_center_hz") c.synth.f_center = parse_double(path, val);
      else if (key == "bw_analog_hz") c.synth.bw_analog = parse_double(path, val);
      else if (key == "fs_hz") c.synth.fs = parse_double(path, val);
      else if (key == "full_scale_v") c.synth.full_scale = parse_double(path, val);
      else if (key == "bits") c.synth.bits = parse_int(path, val);
      else if (key == "analog_order") c.synth.analog_order = parse_int(path, val);
      else if (key == "record_len") c.synth.record_len = parse_u64(path, val);
      else if (key == "n_buffers") c.synth.n_buffers = parse_u64(path, val);
      else throw ConfigError(path, "unknown key");
    } else if (section == "pipeline") {
      if (key == "fir_order") c.pipeline.fir_order = parse_int(path, val);
      else if (key == "digital_bw_hz") c.pipeline.digital_bw = parse_double(path, val);
      else if (key == "max_lag_s") c.pipeline.max_lag_s = parse_double(path, val);
      else if (key == "n_segments") c.pipeline.n_segments = parse_u64(path, val);
      else if (key == "estimator") {
        if (val == "paper") c.pipeline.estimator = dsp::EstimatorVariant::paper;
        else if (val == "rederived") c.pipeline.estimator = dsp::EstimatorVariant::rederived;
        else throw ConfigError(path, "must be 'paper' or 'rederived'");
      }
      else throw ConfigError(path, "unknown key");
    } else if (section == "sweep") {
      if (key == "kind") {
        if (val == "power") c.sweep.kind = SweepKind::power;
        else if (val == "bandwidth") c.sweep.kind = SweepKind::bandwidth;
        else if (val == "detuning") c.sweep.kind = SweepKind::detuning;
        else if (val == "none") c.sweep.kind = SweepKind::none;
        else throw ConfigError(path, "must be power|bandwidth|detuning|none");
      }
      else if (key == "values") c.sweep.values = parse_list(path, val);
      else throw ConfigError(path, "unknown key");
    } else if (section == "run") {
      if (key == "out_dir") c.run.out_dir = val;
      else if (key == "seed") c.run.seed = parse_u64(path, val);
      else if (key == "parallel") c.run.parallel = parse_int(path, val);
      else if (key == "paper_scale") c.run.paper_scale = parse_bool(path, val);
      else throw ConfigError(path, "unknown key");
    } else {
      throw ConfigError(key, "key outside any section");
    }
  }
  if (c.run.paper_scale) c.apply_paper_scale();
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::parse_file(
    const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is)
    throw ConfigError("config", "cannot open file: " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse(ss.str());
}

std::string ExperimentConfig::serialize() const {
  char buf[128];
  std::string s;
  auto kv = [&](const char* key, double v) {
    std::snprintf(buf, sizeof(buf), "%s = %.17g\n", key, v);
    s += buf;
  };
  auto kvu = [&](const char* key, std::uint64_t v) {
    std::snprintf(buf, sizeof(buf), "%s = %llu\n", key,
                  static_cast<unsigned long long>(v));
    s += buf;
  };
  s += "[device]\n";
  kv("f0_hz", device.f0);
  kv("kappa_ex_hz", device.kappa_ex / kTwoPi);
  kv("kappa_in_hz", device.kappa_in / kTwoPi);
  kv("kerr_hz", device.kerr_k / kTwoPi);
  kv("l_k0", device.l_k0);
  kv("i_star", device.i_star);
  kv("i_zpf", device.i_zpf);
  s += "\n[drive]\n";
  kv("gain", drive.gain);
  kv("eta", drive.eta);
  kv("a1", drive.a1);
  kv("a2", drive.a2);
  kv("phi1", drive.phi1);
  kv("phi2", drive.phi2);
  kv("delta_hz", drive.delta / kTwoPi);
  kv("power_w", drive.power);
  s += "\n[synth]\n";
  s += synth.source == SourceKind::tms ? "source = tms\n" : "source = thermal\n";
  kv("nbar", synth.nbar);
  kv("thermal_occupancy", synth.thermal_occupancy);
  kv("gamma_c", synth.gamma_c);
  kv("n_added", synth.n_added);
  kv("line_gain", synth.line_gain);
  kv("f_if_hz", synth.f_if);
  kv("f_center_hz", synth.f_center);
  kv("bw_analog_hz", synth.bw_analog);
  kv("fs_hz", synth.fs);
  kv("full_scale_v", synth.full_scale);
  kvu("bits", static_cast<std::uint64_t>(synth.bits));
  kvu("analog_order", static_cast<std::uint64_t>(synth.analog_order));
  kvu("record_len", synth.record_len);
  kvu("n_buffers", synth.n_buffers);
  s += "\n[pipeline]\n";
  kvu("fir_order", static_cast<std::uint64_t>(pipeline.fir_order));
  kv("digital_bw_hz", pipeline.digital_bw);
  kv("max_lag_s", pipeline.max_lag_s);
  kvu("n_segments", pipeline.n_segments);
  s += std::string("estimator = ") + dsp::to_string(pipeline.estimator) + "\n";
  s += "\n[sweep]\n";
  switch (sweep.kind) {
    case SweepKind::none: s += "kind = none\n"; break;
    case SweepKind::power: s += "kind = power\n"; break;
    case SweepKind::bandwidth: s += "kind = bandwidth\n"; break;
    case SweepKind::detuning: s += "kind = detuning\n"; break;
  }
  s += "values = ";
  for (std::size_t i = 0; i < sweep.values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), i ? ", %.17g" : "%.17g", sweep.values[i]);
    s += buf;
  }
  s += "\n\n[run]\n";
  s += "out_dir = " + run.out_dir + "\n";
  kvu("seed", run.seed);
  kvu("parallel", static_cast<std::uint64_t>(run.parallel));
  s += run.paper_scale ? "paper_scale = true\n" : "paper_scale = false\n";
  return s;
}

}  // namespace nkpa::config
