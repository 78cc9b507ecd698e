#include "eitq/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <set>
#include <sstream>

#include "eitq/errors.hpp"
#include "eitq/series_io.hpp"
#include "eitq/units.hpp"

namespace eitq {
namespace {

int line_of(const YAML::Node& n) {
  const YAML::Mark m = n.Mark();
  return m.is_null() ? 0 : m.line + 1;
}

// Typed access to one mapping; rejects keys it was never asked about.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsMap()) throw ConfigError(path_, line_of(node_), "expected a mapping");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_ && node_[key];
  }

  YAML::Node raw(const std::string& key) {
    seen_.insert(key);
    if (!node_ || !node_.IsMap()) return YAML::Node(YAML::NodeType::Undefined);
    const YAML::Node& n = node_;
    return n[key];
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    return convert<T>(node_[key], key);
  }

  template <typename T>
  T required(const std::string& key) {
    if (!has(key)) throw ConfigError(field(key), line_of(node_), "missing required field");
    return convert<T>(node_[key], key);
  }

  Section child(const std::string& key) { return Section(raw(key), field(key)); }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    if (!node_) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) throw ConfigError(field(key), line_of(kv.first), "unknown field");
    }
  }

 private:
  template <typename T>
  T convert(const YAML::Node& n, const std::string& key) {
    try {
      if constexpr (std::is_same_v<T, double>) {
        return parse_double(n.as<std::string>());
      } else {
        return n.as<T>();
      }
    } catch (const std::exception& e) {
      throw ConfigError(field(key), line_of(n), std::string("bad value: ") + e.what());
    }
  }

  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename F>
auto wrap(const std::string& field, int line, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(field, line, e.what());
  }
}

AnalysisKind parse_kind(const std::string& s, int line) {
  if (s == "sweep_cv") return AnalysisKind::sweep_cv;
  if (s == "sweep_ts") return AnalysisKind::sweep_ts;
  if (s == "delay_experiment") return AnalysisKind::delay_experiment;
  if (s == "fit") return AnalysisKind::fit;
  if (s == "correlation") return AnalysisKind::correlation;
  throw ConfigError("kind", line, "unknown analysis kind '" + s + "'");
}

MediumConfig parse_medium(Section s, std::size_t index) {
  MediumConfig m;
  m.label = s.get<std::string>("label", "medium" + std::to_string(index));
  m.spontaneous_rate_hz = s.get("spontaneous_rate_hz", m.spontaneous_rate_hz);
  m.dephasing_rate_hz = s.get("dephasing_rate_hz", m.dephasing_rate_hz);
  m.pump_rabi_hz = s.get("pump_rabi_hz", m.pump_rabi_hz);
  m.wavenumber_per_m = s.get("wavenumber_per_m", m.wavenumber_per_m);
  m.length_m = s.get("length_m", m.length_m);
  m.light_speed_m_per_s = s.get("light_speed_m_per_s", m.light_speed_m_per_s);

  const int sources = int(s.has("od_rate")) + int(s.has("group_delay_s")) + int(s.has("atomic_density"));
  if (sources > 1) {
    throw ConfigError(s.field("od_rate"), 0,
                      "give exactly one of od_rate, group_delay_s, atomic_density + coupling_constant");
  }
  if (s.has("od_rate")) {
    m.od_rate = s.get("od_rate", 0.0);
  } else if (s.has("group_delay_s")) {
    const double delay = s.get("group_delay_s", 0.0);
    m.od_rate = wrap(s.field("group_delay_s"), 0, [&] {
      MediumConfig base = m;
      base.od_rate = 1.0;
      base.to_parameters().validate();
      return with_group_delay(base.to_parameters(), delay).od_rate;
    });
  } else if (s.has("atomic_density")) {
    m.od_rate = od_rate_from(s.get("atomic_density", 0.0), s.required<double>("coupling_constant"));
  }
  s.finish();
  return m;
}

NoiseInjection parse_injection(Section s) {
  NoiseInjection inj;
  inj.kappa_amp = s.get("kappa_amp", 0.0);
  inj.kappa_phase = s.get("kappa_phase", 0.0);
  if (s.has("pump_noise_db")) {
    const double v = from_db(s.get("pump_noise_db", 0.0));
    inj.pump_var_amp = inj.pump_var_phase = v;
  }
  inj.pump_var_amp = s.get("pump_var_amp", inj.pump_var_amp);
  inj.pump_var_phase = s.get("pump_var_phase", inj.pump_var_phase);
  inj.extra_var_amp = s.get("extra_var_amp", 0.0);
  inj.extra_var_phase = s.get("extra_var_phase", 0.0);
  if (s.has("placement")) {
    const auto p = s.get<std::string>("placement", "");
    inj.placement = wrap(s.field("placement"), line_of(s.raw("placement")), [&] { return parse_placement(p); });
  }
  s.finish();
  return inj;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string num(double v) { return format_double(v); }

}  // namespace

std::string_view to_string(AnalysisKind k) {
  switch (k) {
    case AnalysisKind::sweep_cv: return "sweep_cv";
    case AnalysisKind::sweep_ts: return "sweep_ts";
    case AnalysisKind::delay_experiment: return "delay_experiment";
    case AnalysisKind::fit: return "fit";
    case AnalysisKind::correlation: return "correlation";
  }
  return "unknown";
}

EitParameters MediumConfig::to_parameters() const {
  EitParameters p;
  p.od_rate = od_rate;
  p.spontaneous_rate = hz_to_rad(spontaneous_rate_hz);
  p.dephasing_rate = hz_to_rad(dephasing_rate_hz);
  p.pump_rabi = hz_to_rad(pump_rabi_hz);
  p.wavenumber = wavenumber_per_m;
  p.length = length_m;
  p.light_speed = light_speed_m_per_s;
  return p;
}

std::vector<double> FrequencyGrid::values() const {
  std::vector<double> v(points);
  for (std::size_t i = 0; i < points; ++i) {
    v[i] = points == 1 ? start_hz
                       : start_hz + (stop_hz - start_hz) * static_cast<double>(i) /
                                        static_cast<double>(points - 1);
  }
  return v;
}

bool Scenario::operator==(const Scenario& o) const {
  auto tones_equal = [](const std::vector<Tone>& a, const std::vector<Tone>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].freq_hz != b[i].freq_hz || a[i].amplitude != b[i].amplitude || a[i].phase != b[i].phase) {
        return false;
      }
    }
    return true;
  };
  return name == o.name && description == o.description && kind == o.kind && seed == o.seed &&
         media == o.media && injection == o.injection && grid == o.grid &&
         quadratures == o.quadratures && monte_carlo == o.monte_carlo && delay == o.delay &&
         fit == o.fit && tones_equal(lock_tones, o.lock_tones) && outputs == o.outputs;
}

void Scenario::validate() const {
  if (name.empty()) throw ConfigError("name", 0, "scenario needs a name");
  if (media.empty()) throw ConfigError("media", 0, "at least one medium is required");
  for (std::size_t i = 0; i < media.size(); ++i) {
    wrap("media[" + std::to_string(i) + "]", 0, [&] {
      media[i].to_parameters().validate();
      return 0;
    });
  }
  wrap("injection", 0, [&] {
    injection.validate();
    return 0;
  });
  const bool needs_grid = kind == AnalysisKind::sweep_cv || kind == AnalysisKind::sweep_ts ||
                          (kind == AnalysisKind::fit && fit.data_path.empty());
  if (needs_grid) {
    if (grid.points == 0) throw ConfigError("grid.points", 0, "frequency grid is empty");
    if (grid.start_hz < 0.0) throw ConfigError("grid.start_hz", 0, "frequencies must be >= 0");
    if (grid.points > 1 && !(grid.stop_hz > grid.start_hz)) {
      throw ConfigError("grid.stop_hz", 0, "grid must be monotone increasing");
    }
  }
  if (quadratures.empty()) throw ConfigError("quadratures", 0, "at least one quadrature is required");
  const auto& mc = monte_carlo;
  if (mc.trials < 1) throw ConfigError("monte_carlo.trials", 0, "trials must be >= 1");
  if (mc.averages < 1) throw ConfigError("monte_carlo.averages", 0, "averages must be >= 1");
  if (!(mc.sample_rate_hz > 0.0)) throw ConfigError("monte_carlo.sample_rate_hz", 0, "must be > 0");
  if (!(mc.rbw_hz > 0.0) || mc.rbw_hz >= 0.5 * mc.sample_rate_hz) {
    throw ConfigError("monte_carlo.rbw_hz", 0, "must lie in (0, sample_rate / 2)");
  }
  if (needs_grid && mc.enabled && grid.stop_hz >= 0.5 * mc.sample_rate_hz) {
    throw ConfigError("grid.stop_hz", 0, "grid extends past Nyquist of monte_carlo.sample_rate_hz");
  }
  if (kind == AnalysisKind::sweep_ts && mc.enabled) {
    // Each tone needs its main lobe plus 8 noise bins either side to itself.
    const double rbw = mc.sample_rate_hz / std::round(mc.sample_rate_hz / mc.rbw_hz);
    const auto freqs = grid.values();
    if (std::round(freqs.front() / rbw) < 9.0) {
      throw ConfigError("grid.start_hz", 0, "tones need start_hz >= 9 RBW bins");
    }
    for (std::size_t i = 1; i < freqs.size(); ++i) {
      if (std::round(freqs[i] / rbw) - std::round(freqs[i - 1] / rbw) < 11.0) {
        throw ConfigError("grid.points", 0, "tones closer than 11 RBW bins apart");
      }
    }
  }
  if (kind == AnalysisKind::delay_experiment || kind == AnalysisKind::correlation) {
    if (!(delay.bandwidth_hz > 0.0) || delay.bandwidth_hz >= 0.5 * mc.sample_rate_hz) {
      throw ConfigError("delay.bandwidth_hz", 0, "must lie in (0, sample_rate / 2)");
    }
    if (!(delay.duration_s > 0.0)) throw ConfigError("delay.duration_s", 0, "must be > 0");
    if (!(delay.max_lag_s > 0.0)) throw ConfigError("delay.max_lag_s", 0, "must be > 0");
    if (!(delay.modulation_level >= 0.0)) throw ConfigError("delay.modulation_level", 0, "must be >= 0");
  }
  if (kind == AnalysisKind::fit) {
    if (fit.truth_medium >= media.size()) throw ConfigError("fit.truth_medium", 0, "no such medium");
    if (fit.free.empty()) throw ConfigError("fit.free", 0, "no free parameters");
    if (fit.curve != MetricKind::benchmark_cv && fit.curve != MetricKind::benchmark_ts) {
      throw ConfigError("fit.curve", 0, "must be benchmark_cv or benchmark_ts");
    }
    if (!(fit.noise_rel >= 0.0)) throw ConfigError("fit.noise_rel", 0, "must be >= 0");
  }
  if (outputs.series_format != "none" && outputs.series_format != "csv" &&
      outputs.series_format != "binary") {
    throw ConfigError("outputs.series_format", 0, "must be none, csv or binary");
  }
  for (std::size_t i = 0; i < lock_tones.size(); ++i) {
    if (!(lock_tones[i].freq_hz > 0.0) || lock_tones[i].freq_hz >= 0.5 * mc.sample_rate_hz) {
      throw ConfigError("lock_tones[" + std::to_string(i) + "].freq_hz", 0, "outside (0, Nyquist)");
    }
  }
}

Scenario parse_scenario(std::string_view yaml, const std::filesystem::path& base_dir) {
  YAML::Node doc;
  try {
    doc = YAML::Load(std::string(yaml));
  } catch (const YAML::Exception& e) {
    throw ConfigError("", e.mark.is_null() ? 0 : e.mark.line + 1, e.msg);
  }
  if (doc.IsMap() && doc["scenario"]) doc = doc["scenario"];
  if (!doc.IsMap()) throw ConfigError("", line_of(doc), "scenario must be a mapping");

  Section root(doc, "");
  Scenario sc;
  sc.base_dir = base_dir;
  sc.name = root.required<std::string>("name");
  sc.description = root.get<std::string>("description", "");
  sc.kind = parse_kind(root.required<std::string>("kind"), line_of(root.raw("kind")));
  sc.seed = root.get<std::uint64_t>("seed", sc.seed);

  const YAML::Node media = root.raw("media");
  if (!media || !media.IsSequence()) throw ConfigError("media", line_of(doc), "media must be a list");
  for (std::size_t i = 0; i < media.size(); ++i) {
    sc.media.push_back(parse_medium(Section(media[i], "media[" + std::to_string(i) + "]"), i));
  }
  sc.injection = parse_injection(root.child("injection"));

  {
    Section g = root.child("grid");
    sc.grid.start_hz = g.get("start_hz", 0.0);
    sc.grid.stop_hz = g.get("stop_hz", 0.0);
    sc.grid.points = g.get<std::size_t>("points", 0);
    g.finish();
  }
  if (root.has("quadratures")) {
    sc.quadratures.clear();
    const YAML::Node q = root.raw("quadratures");
    if (!q.IsSequence()) throw ConfigError("quadratures", line_of(q), "expected a list");
    for (const auto& item : q) {
      sc.quadratures.push_back(
          wrap("quadratures", line_of(item), [&] { return parse_quadrature(item.as<std::string>()); }));
    }
  }
  {
    Section m = root.child("monte_carlo");
    auto& mc = sc.monte_carlo;
    mc.enabled = m.get("enabled", mc.enabled);
    mc.trials = m.get("trials", mc.trials);
    mc.sample_rate_hz = m.get("sample_rate_hz", mc.sample_rate_hz);
    mc.rbw_hz = m.get("rbw_hz", mc.rbw_hz);
    mc.vbw_hz = m.get("vbw_hz", mc.vbw_hz);
    mc.averages = m.get("averages", mc.averages);
    mc.tone_snr_db = m.get("tone_snr_db", mc.tone_snr_db);
    m.finish();
  }
  {
    Section d = root.child("delay");
    auto& de = sc.delay;
    de.bandwidth_hz = d.get("bandwidth_hz", de.bandwidth_hz);
    de.modulation_level = d.get("modulation_level", de.modulation_level);
    de.duration_s = d.get("duration_s", de.duration_s);
    de.max_lag_s = d.get("max_lag_s", de.max_lag_s);
    de.min_peak = d.get("min_peak", de.min_peak);
    d.finish();
  }
  {
    Section f = root.child("fit");
    auto& fi = sc.fit;
    fi.data_path = f.get<std::string>("data", "");
    fi.truth_medium = f.get("truth_medium", fi.truth_medium);
    fi.noise_rel = f.get("noise_rel", fi.noise_rel);
    const auto curve = f.get<std::string>("curve", "benchmark_cv");
    if (curve == "benchmark_cv") {
      fi.curve = MetricKind::benchmark_cv;
    } else if (curve == "benchmark_ts") {
      fi.curve = MetricKind::benchmark_ts;
    } else {
      throw ConfigError("fit.curve", line_of(f.raw("curve")), "must be benchmark_cv or benchmark_ts");
    }
    const YAML::Node fr = f.raw("free");
    if (fr) {
      if (!fr.IsSequence()) throw ConfigError("fit.free", line_of(fr), "expected a list");
      for (std::size_t i = 0; i < fr.size(); ++i) {
        Section p(fr[i], "fit.free[" + std::to_string(i) + "]");
        FitParameterConfig c;
        const auto name = p.required<std::string>("parameter");
        c.which = wrap(p.field("parameter"), line_of(fr[i]), [&] { return parse_fit_parameter(name); });
        c.initial = p.required<double>("initial");
        c.lower = p.get("lower", 0.0);
        c.upper = p.get("upper", 0.0);
        p.finish();
        fi.free.push_back(c);
      }
    }
    f.finish();
  }
  {
    const YAML::Node tones = root.raw("lock_tones");
    if (tones) {
      if (!tones.IsSequence()) throw ConfigError("lock_tones", line_of(tones), "expected a list");
      for (std::size_t i = 0; i < tones.size(); ++i) {
        Section t(tones[i], "lock_tones[" + std::to_string(i) + "]");
        Tone tone;
        tone.freq_hz = t.required<double>("freq_hz");
        tone.amplitude = t.required<double>("amplitude");
        tone.phase = t.get("phase", 0.0);
        t.finish();
        sc.lock_tones.push_back(tone);
      }
    }
  }
  {
    Section o = root.child("outputs");
    sc.outputs.dir = o.get<std::string>("dir", sc.outputs.dir);
    sc.outputs.series_format = o.get<std::string>("series_format", sc.outputs.series_format);
    o.finish();
  }
  root.finish();
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  const std::string text = wrap(path.string(), 0, [&] { return read_file(path); });
  return parse_scenario(text, path.parent_path());
}

std::string emit_scenario(const Scenario& sc) {
  std::ostringstream os;
  os << "name: " << quote(sc.name) << "\n";
  os << "description: " << quote(sc.description) << "\n";
  os << "kind: " << to_string(sc.kind) << "\n";
  os << "seed: " << sc.seed << "\n";
  os << "media:\n";
  for (const auto& m : sc.media) {
    os << "  - label: " << quote(m.label) << "\n"
       << "    od_rate: " << num(m.od_rate) << "\n"
       << "    spontaneous_rate_hz: " << num(m.spontaneous_rate_hz) << "\n"
       << "    dephasing_rate_hz: " << num(m.dephasing_rate_hz) << "\n"
       << "    pump_rabi_hz: " << num(m.pump_rabi_hz) << "\n"
       << "    wavenumber_per_m: " << num(m.wavenumber_per_m) << "\n"
       << "    length_m: " << num(m.length_m) << "\n"
       << "    light_speed_m_per_s: " << num(m.light_speed_m_per_s) << "\n";
  }
  const auto& inj = sc.injection;
  os << "injection:\n"
     << "  kappa_amp: " << num(inj.kappa_amp) << "\n"
     << "  kappa_phase: " << num(inj.kappa_phase) << "\n"
     << "  pump_var_amp: " << num(inj.pump_var_amp) << "\n"
     << "  pump_var_phase: " << num(inj.pump_var_phase) << "\n"
     << "  extra_var_amp: " << num(inj.extra_var_amp) << "\n"
     << "  extra_var_phase: " << num(inj.extra_var_phase) << "\n"
     << "  placement: " << to_string(inj.placement) << "\n";
  os << "grid:\n"
     << "  start_hz: " << num(sc.grid.start_hz) << "\n"
     << "  stop_hz: " << num(sc.grid.stop_hz) << "\n"
     << "  points: " << sc.grid.points << "\n";
  os << "quadratures: [";
  for (std::size_t i = 0; i < sc.quadratures.size(); ++i) {
    os << (i ? ", " : "") << to_string(sc.quadratures[i]);
  }
  os << "]\n";
  const auto& mc = sc.monte_carlo;
  os << "monte_carlo:\n"
     << "  enabled: " << (mc.enabled ? "true" : "false") << "\n"
     << "  trials: " << mc.trials << "\n"
     << "  sample_rate_hz: " << num(mc.sample_rate_hz) << "\n"
     << "  rbw_hz: " << num(mc.rbw_hz) << "\n"
     << "  vbw_hz: " << num(mc.vbw_hz) << "\n"
     << "  averages: " << mc.averages << "\n"
     << "  tone_snr_db: " << num(mc.tone_snr_db) << "\n";
  const auto& d = sc.delay;
  os << "delay:\n"
     << "  bandwidth_hz: " << num(d.bandwidth_hz) << "\n"
     << "  modulation_level: " << num(d.modulation_level) << "\n"
     << "  duration_s: " << num(d.duration_s) << "\n"
     << "  max_lag_s: " << num(d.max_lag_s) << "\n"
     << "  min_peak: " << num(d.min_peak) << "\n";
  const auto& f = sc.fit;
  os << "fit:\n"
     << "  data: " << quote(f.data_path) << "\n"
     << "  truth_medium: " << f.truth_medium << "\n"
     << "  noise_rel: " << num(f.noise_rel) << "\n"
     << "  curve: " << to_string(f.curve) << "\n";
  if (f.free.empty()) {
    os << "  free: []\n";
  } else {
    os << "  free:\n";
    for (const auto& p : f.free) {
      os << "    - parameter: " << to_string(p.which) << "\n"
         << "      initial: " << num(p.initial) << "\n"
         << "      lower: " << num(p.lower) << "\n"
         << "      upper: " << num(p.upper) << "\n";
    }
  }
  if (sc.lock_tones.empty()) {
    os << "lock_tones: []\n";
  } else {
    os << "lock_tones:\n";
    for (const auto& t : sc.lock_tones) {
      os << "  - freq_hz: " << num(t.freq_hz) << "\n"
         << "    amplitude: " << num(t.amplitude) << "\n"
         << "    phase: " << num(t.phase) << "\n";
    }
  }
  os << "outputs:\n"
     << "  dir: " << quote(sc.outputs.dir) << "\n"
     << "  series_format: " << sc.outputs.series_format << "\n";
  return os.str();
}

}  // namespace eitq
