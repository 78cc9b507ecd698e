#include "eitq/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "eitq/correlation.hpp"
#include "eitq/errors.hpp"
#include "eitq/series_io.hpp"
#include "eitq/spectrum.hpp"
#include "eitq/units.hpp"

namespace eitq {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kNoiseBins = 8;

std::string stem(const std::string& prefix, const MediumConfig& m, Quadrature q) {
  return prefix + "_" + m.label + "_" + std::string(to_string(q));
}

void note(const Logger& log, const std::string& msg) {
  if (log) log(msg);
}

struct Accumulator {
  std::vector<double> sum, sum2;
  std::size_t count = 0;

  explicit Accumulator(std::size_t n) : sum(n, 0.0), sum2(n, 0.0) {}
  void add(const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      sum[i] += v[i];
      sum2[i] += v[i] * v[i];
    }
    ++count;
  }
  std::vector<double> mean() const {
    std::vector<double> m(sum.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = sum[i] / static_cast<double>(count);
    return m;
  }
  std::vector<double> stderr_of_mean() const {
    std::vector<double> s(sum.size(), kNaN);
    if (count < 2) return s;
    const auto n = static_cast<double>(count);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double m = sum[i] / n;
      const double var = std::max(0.0, (sum2[i] - n * m * m) / (n - 1.0));
      s[i] = std::sqrt(var / n);
    }
    return s;
  }
};

// Monte-Carlo record layout: a whole number of Welch segments, so tones on
// the bin grid are periodic in the record and the circular channel filter
// does not smear them.
struct McLayout {
  std::size_t segment;
  std::size_t length;
  double rbw;
};

McLayout mc_layout(const MonteCarloSettings& mc) {
  const auto segment = static_cast<std::size_t>(std::llround(mc.sample_rate_hz / mc.rbw_hz));
  const std::size_t length = segment * ((mc.averages + 2) / 2);
  return {segment, length, mc.sample_rate_hz / static_cast<double>(segment)};
}

std::vector<double> snap_to_bins(const std::vector<double>& freqs, double rbw) {
  std::vector<double> out;
  for (double f : freqs) out.push_back(std::round(f / rbw) * rbw);
  return out;
}

TimeSeries lock_tone_series(const Scenario& sc, std::size_t n) {
  return synth_tones(sc.lock_tones, sc.monte_carlo.sample_rate_hz, n);
}

std::uint64_t trial_seed(const Scenario& sc, std::size_t medium, Quadrature q, std::size_t trial) {
  const std::uint64_t stream = medium * 2 + (q == Quadrature::amplitude ? 0 : 1);
  return derive_seed(derive_seed(sc.seed, stream), trial);
}

void run_sweep_cv(const Scenario& sc, RunResult& out, const Logger& log) {
  const auto grid = sc.grid.values();
  for (std::size_t mi = 0; mi < sc.media.size(); ++mi) {
    const MediumConfig& m = sc.media[mi];
    const EitParameters params = m.to_parameters();
    for (Quadrature q : sc.quadratures) {
      out.curves.push_back({stem("cv_model", m, q), m.label,
                            conditional_variance_model_curve(params, sc.injection, grid, q)});
      out.curves.push_back({stem("benchmark_cv", m, q), m.label,
                            benchmark_curve(params, grid, MetricKind::benchmark_cv, q)});
      NoiseBudget budget{m.label, q, 0.0, kNaN};
      double analytic = 0.0;
      for (double f : grid) analytic += output_variance(channel_response(params, hz_to_rad(f)), sc.injection, q);
      budget.analytic_excess_db = to_db(analytic / static_cast<double>(grid.size()));

      if (sc.monte_carlo.enabled) {
        const auto& mc = sc.monte_carlo;
        const McLayout layout = mc_layout(mc);
        const auto freqs = snap_to_bins(grid, layout.rbw);
        Accumulator cv(freqs.size()), gain(freqs.size()), tau(freqs.size());
        Accumulator s_in(freqs.size()), s_out(freqs.size()), s_ref(freqs.size());
        for (std::size_t t = 0; t < mc.trials; ++t) {
          const std::uint64_t seed = trial_seed(sc, mi, q, t);
          TimeSeries input = synth_white_noise(1.0, mc.sample_rate_hz, layout.length, derive_seed(seed, 0));
          if (!sc.lock_tones.empty()) input = add(input, lock_tone_series(sc, layout.length));
          const TimeSeries output = filter_through_channel(input, params, sc.injection, q, derive_seed(seed, 1));
          const CrossSpectrum cs = estimate_cross_spectrum(output, input, mc.rbw_hz, mc.averages);
          const MetricCurve curve = conditional_variance_empirical(cs.b, cs.a, cs.cross, q);
          std::vector<double> v, g, d, si, so, sr;
          for (double f : freqs) {
            const std::size_t k = cs.a.bin_of(f);
            v.push_back(curve.values[k]);
            g.push_back(curve.gain[k]);
            d.push_back(curve.delay[k]);
            si.push_back(cs.b.psd[k]);
            so.push_back(cs.a.psd[k]);
            sr.push_back(std::norm(cs.cross[k]) / cs.b.psd[k]);
          }
          cv.add(v);
          gain.add(g);
          tau.add(d);
          s_in.add(si);
          s_out.add(so);
          s_ref.add(sr);
        }
        MetricCurve mean_curve;
        mean_curve.kind = MetricKind::conditional_variance;
        mean_curve.quadrature = q;
        const auto mv = cv.mean(), mg = gain.mean(), md = tau.mean();
        for (std::size_t i = 0; i < freqs.size(); ++i) {
          mean_curve.push(freqs[i], mv[i], mg[i], md[i], std::isfinite(mv[i]));
        }
        out.curves.push_back({stem("cv_mc", m, q), m.label, mean_curve});

        TrialStatistics st;
        st.name = stem("cv_mc", m, q) + "_stats";
        st.medium = m.label;
        st.quadrature = q;
        st.kind = MetricKind::conditional_variance;
        st.frequencies = freqs;
        st.mean = mv;
        st.stderr_ = cv.stderr_of_mean();
        for (double f : freqs) {
          const ChannelResponse r = channel_response(params, hz_to_rad(f));
          st.model.push_back(conditional_variance_analytic(r, sc.injection, q));
          st.benchmark.push_back(benchmark_beamsplitter(r).first);
        }
        out.statistics.push_back(std::move(st));

        const auto mi_ = s_in.mean(), mo = s_out.mean(), mr = s_ref.mean();
        std::string table = "freq_hz,psd_in,psd_out,psd_ref_matched\n";
        double out_total = 0.0;
        for (std::size_t i = 0; i < freqs.size(); ++i) {
          table += format_double(freqs[i]) + "," + format_double(mi_[i]) + "," + format_double(mo[i]) +
                   "," + format_double(mr[i]) + "\n";
          out_total += mo[i];
        }
        out.tables.push_back({stem("psd", m, q) + ".csv", table});
        budget.monte_carlo_excess_db = to_db(out_total / static_cast<double>(freqs.size()));
        note(log, "  " + stem("cv_mc", m, q) + ": " + std::to_string(mc.trials) + " trials");
      }
      out.budgets.push_back(budget);
    }
  }
}

void run_sweep_ts(const Scenario& sc, RunResult& out, const Logger& log) {
  const auto grid = sc.grid.values();
  for (std::size_t mi = 0; mi < sc.media.size(); ++mi) {
    const MediumConfig& m = sc.media[mi];
    const EitParameters params = m.to_parameters();
    for (Quadrature q : sc.quadratures) {
      out.curves.push_back({stem("ts_model", m, q), m.label,
                            signal_transfer_model_curve(params, sc.injection, grid, q)});
      out.curves.push_back({stem("benchmark_ts", m, q), m.label,
                            benchmark_curve(params, grid, MetricKind::benchmark_ts, q)});
      if (!sc.monte_carlo.enabled) continue;

      const auto& mc = sc.monte_carlo;
      const McLayout layout = mc_layout(mc);
      const auto freqs = snap_to_bins(grid, layout.rbw);
      // A Hann-windowed tone of amplitude A puts A^2 n / 4 into its three
      // main-lobe bins over a unit noise floor.
      const double amplitude = std::sqrt(4.0 * from_db(mc.tone_snr_db) / static_cast<double>(layout.segment));
      std::vector<Tone> tones;
      for (double f : freqs) tones.push_back({f, amplitude, 0.0});
      const TimeSeries signal = synth_tones(tones, mc.sample_rate_hz, layout.length);

      Accumulator ts(freqs.size());
      for (std::size_t t = 0; t < mc.trials; ++t) {
        const std::uint64_t seed = trial_seed(sc, mi, q, t);
        TimeSeries input = add(synth_white_noise(1.0, mc.sample_rate_hz, layout.length, derive_seed(seed, 0)), signal);
        if (!sc.lock_tones.empty()) input = add(input, lock_tone_series(sc, layout.length));
        const TimeSeries output = filter_through_channel(input, params, sc.injection, q, derive_seed(seed, 1));
        const SpectrumEstimate s_in = estimate_psd(input, mc.rbw_hz, mc.averages);
        const SpectrumEstimate s_out = estimate_psd(output, mc.rbw_hz, mc.averages);
        std::vector<double> v;
        for (double f : freqs) {
          v.push_back(signal_transfer(snr_at(s_in, f, kNoiseBins), snr_at(s_out, f, kNoiseBins)));
        }
        ts.add(v);
      }
      MetricCurve mean_curve;
      mean_curve.kind = MetricKind::signal_transfer;
      mean_curve.quadrature = q;
      const auto mv = ts.mean();
      for (std::size_t i = 0; i < freqs.size(); ++i) mean_curve.push(freqs[i], mv[i]);
      out.curves.push_back({stem("ts_mc", m, q), m.label, mean_curve});

      TrialStatistics st;
      st.name = stem("ts_mc", m, q) + "_stats";
      st.medium = m.label;
      st.quadrature = q;
      st.kind = MetricKind::signal_transfer;
      st.frequencies = freqs;
      st.mean = mv;
      st.stderr_ = ts.stderr_of_mean();
      for (double f : freqs) {
        const ChannelResponse r = channel_response(params, hz_to_rad(f));
        st.model.push_back(signal_transfer_model(r, sc.injection, q));
        st.benchmark.push_back(benchmark_beamsplitter(r).second);
      }
      out.statistics.push_back(std::move(st));
      note(log, "  " + stem("ts_mc", m, q) + ": " + std::to_string(mc.trials) + " trials");
    }
  }
}

void run_delay(const Scenario& sc, RunResult& out, bool emit_correlation) {
  const EitParameters params = sc.media.front().to_parameters();
  const double fs = sc.monte_carlo.sample_rate_hz;
  const auto& d = sc.delay;
  const Quadrature q = sc.quadratures.front();

  TimeSeries input = synth_bandlimited_noise(d.bandwidth_hz, fs, d.duration_s, derive_seed(sc.seed, 0),
                                             d.modulation_level);
  input = add(input, synth_white_noise(1.0, fs, input.size(), derive_seed(sc.seed, 1)));
  if (!sc.lock_tones.empty()) input = add(input, lock_tone_series(sc, input.size()));
  input.seed = sc.seed;
  const TimeSeries output = filter_through_channel(input, params, sc.injection, q, derive_seed(sc.seed, 2));

  const auto max_lag = static_cast<std::size_t>(std::ceil(d.max_lag_s * fs));
  const Correlation auto_corr = cross_correlate(input, input, max_lag);
  const Correlation cross_corr = cross_correlate(input, output, max_lag);

  DelayReport rep;
  rep.estimated_delay = estimate_delay(cross_corr, d.min_peak);
  rep.model_group_delay = group_delay(params, 0.0);
  rep.sample_period = 1.0 / fs;
  rep.peak_correlation = cross_corr.values[cross_corr.peak_index()];
  rep.auto_width = auto_corr.peak_width();
  rep.cross_width = cross_corr.peak_width();
  rep.auto_first_zero = auto_corr.first_zero_after_peak();
  out.delay = rep;

  if (emit_correlation) {
    std::string table = "lag_s,auto,cross\n";
    for (std::size_t i = 0; i < auto_corr.lags.size(); ++i) {
      table += format_double(auto_corr.lags[i]) + "," + format_double(auto_corr.values[i]) + "," +
               format_double(cross_corr.values[i]) + "\n";
    }
    out.tables.push_back({"correlation.csv", table});
  }
  if (sc.outputs.series_format != "none") {
    const bool csv = sc.outputs.series_format == "csv";
    const std::string ext = csv ? ".csv" : ".bin";
    out.tables.push_back({"reference" + ext, csv ? series_to_csv(input) : series_to_binary(input)});
    out.tables.push_back({"output" + ext, csv ? series_to_csv(output) : series_to_binary(output)});
  }
}

double to_internal(FitParameter p, double config_value) {
  return p == FitParameter::od_rate ? config_value : hz_to_rad(config_value);
}

double to_config(FitParameter p, double internal) {
  return p == FitParameter::od_rate ? internal : rad_to_hz(internal);
}

void run_fit(const Scenario& sc, RunResult& out) {
  const auto& fs = sc.fit;
  FitReport rep;
  rep.truth = sc.media[fs.truth_medium].to_parameters();

  FitProblem problem;
  problem.kind = fs.curve;
  if (!fs.data_path.empty()) {
    bool has_sigma = false;
    const std::filesystem::path p = sc.base_dir / fs.data_path;
    problem.data = fit_points_from_csv(read_file(p), &has_sigma);
    problem.weighted = has_sigma;
  } else {
    std::mt19937_64 rng(derive_seed(sc.seed, 7));
    std::normal_distribution<double> normal;
    for (double f : sc.grid.values()) {
      const double w = hz_to_rad(f);
      const double v = fit_model(rep.truth, fs.curve, w);
      FitPoint pt{w, v, 1.0};
      if (fs.noise_rel > 0.0) {
        pt.value = v * (1.0 + fs.noise_rel * normal(rng));
        pt.sigma = fs.noise_rel * std::max(std::abs(v), 1e-9);
      }
      problem.data.push_back(pt);
    }
    problem.weighted = fs.noise_rel > 0.0;
  }
  problem.start = rep.truth;
  problem.free.clear();
  for (const auto& c : fs.free) {
    set(problem.start, c.which, to_internal(c.which, c.initial));
    FreeParameter fp{c.which, to_internal(c.which, c.lower),
                     c.upper > 0.0 ? to_internal(c.which, c.upper) : std::numeric_limits<double>::infinity()};
    problem.free.push_back(fp);
    rep.free.push_back(c.which);
  }
  rep.result = fit(problem);
  rep.data = problem.data;

  std::vector<double> freqs;
  for (const auto& pt : problem.data) freqs.push_back(rad_to_hz(pt.omega));
  std::sort(freqs.begin(), freqs.end());
  out.curves.push_back({"fit_curve", sc.media[fs.truth_medium].label,
                        benchmark_curve(rep.result.best, freqs, fs.curve, Quadrature::amplitude)});
  out.tables.push_back({"fit_data.csv", fit_points_to_csv(problem.data)});
  out.fit = std::move(rep);
}

}  // namespace

RunResult run_scenario(const Scenario& scenario, const Logger& log) {
  scenario.validate();
  RunResult out;
  out.scenario = scenario;
  note(log, "running " + scenario.name + " (" + std::string(to_string(scenario.kind)) + ", seed " +
                std::to_string(scenario.seed) + ")");
  switch (scenario.kind) {
    case AnalysisKind::sweep_cv: run_sweep_cv(scenario, out, log); break;
    case AnalysisKind::sweep_ts: run_sweep_ts(scenario, out, log); break;
    case AnalysisKind::delay_experiment: run_delay(scenario, out, false); break;
    case AnalysisKind::correlation: run_delay(scenario, out, true); break;
    case AnalysisKind::fit: run_fit(scenario, out); break;
  }
  return out;
}

void check_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  const auto probe = dir / ".eitq_write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw IoError("output directory " + dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
}

std::string statistics_csv(const TrialStatistics& s) {
  std::string out = "freq_hz,mean,stderr,model,benchmark\n";
  for (std::size_t i = 0; i < s.frequencies.size(); ++i) {
    out += format_double(s.frequencies[i]) + "," + format_double(s.mean[i]) + "," +
           format_double(s.stderr_[i]) + "," + format_double(s.model[i]) + "," +
           format_double(s.benchmark[i]) + "\n";
  }
  return out;
}

std::string manifest_yaml(const RunResult& result, const std::vector<std::string>& files) {
  std::ostringstream os;
  os << "manifest_version: 1\n";
  os << "scenario:\n";
  std::istringstream sc(emit_scenario(result.scenario));
  for (std::string line; std::getline(sc, line);) os << "  " << line << "\n";
  os << "results:\n";
  if (result.delay) {
    const auto& d = *result.delay;
    os << "  delay:\n"
       << "    estimated_delay_s: " << format_double(d.estimated_delay) << "\n"
       << "    model_group_delay_s: " << format_double(d.model_group_delay) << "\n"
       << "    sample_period_s: " << format_double(d.sample_period) << "\n"
       << "    error_samples: " << format_double((d.estimated_delay - d.model_group_delay) / d.sample_period) << "\n"
       << "    peak_correlation: " << format_double(d.peak_correlation) << "\n"
       << "    auto_fwhm_s: " << format_double(d.auto_width) << "\n"
       << "    cross_fwhm_s: " << format_double(d.cross_width) << "\n"
       << "    auto_first_zero_s: " << format_double(d.auto_first_zero) << "\n";
  }
  if (result.fit) {
    const auto& f = *result.fit;
    os << "  fit:\n"
       << "    iterations: " << f.result.iterations << "\n"
       << "    residual_norm: " << format_double(f.result.residual_norm) << "\n"
       << "    initial_residual_norm: " << format_double(f.result.initial_residual_norm) << "\n"
       << "    parameters:\n";
    for (std::size_t j = 0; j < f.free.size(); ++j) {
      os << "      - parameter: " << to_string(f.free[j]) << "\n"
         << "        value: " << format_double(to_config(f.free[j], get(f.result.best, f.free[j]))) << "\n"
         << "        uncertainty: " << format_double(to_config(f.free[j], f.result.uncertainties[j])) << "\n"
         << "        truth: " << format_double(to_config(f.free[j], get(f.truth, f.free[j]))) << "\n";
    }
  }
  if (!result.budgets.empty()) {
    os << "  noise_budget:\n";
    for (const auto& b : result.budgets) {
      os << "    - medium: \"" << b.medium << "\"\n"
         << "      quadrature: " << to_string(b.quadrature) << "\n"
         << "      analytic_output_excess_db: " << format_double(b.analytic_excess_db) << "\n"
         << "      monte_carlo_output_excess_db: " << format_double(b.monte_carlo_excess_db) << "\n";
    }
  }
  if (!result.statistics.empty()) {
    os << "  monte_carlo:\n";
    for (const auto& s : result.statistics) {
      double max_z = 0.0;
      for (std::size_t i = 0; i < s.mean.size(); ++i) {
        if (s.stderr_[i] > 0.0) max_z = std::max(max_z, std::abs(s.mean[i] - s.model[i]) / s.stderr_[i]);
      }
      os << "    - name: " << s.name << "\n"
         << "      trials: " << result.scenario.monte_carlo.trials << "\n"
         << "      max_abs_z_vs_model: " << format_double(max_z) << "\n";
    }
  }
  os << "files:\n";
  for (const auto& f : files) os << "  - " << f << "\n";
  return os.str();
}

std::vector<std::string> emit_tables(const RunResult& result, const std::filesystem::path& dir) {
  check_output_dir(dir);
  std::vector<std::string> files;
  for (const auto& c : result.curves) {
    const std::string name = c.name + ".csv";
    write_file_atomic(dir / name, metric_curve_csv(c.curve));
    files.push_back(name);
  }
  for (const auto& s : result.statistics) {
    const std::string name = s.name + ".csv";
    write_file_atomic(dir / name, statistics_csv(s));
    files.push_back(name);
  }
  for (const auto& t : result.tables) {
    write_file_atomic(dir / t.filename, t.contents);
    files.push_back(t.filename);
  }
  write_file_atomic(dir / "manifest.yaml", manifest_yaml(result, files));
  files.push_back("manifest.yaml");
  return files;
}

}  // namespace eitq
