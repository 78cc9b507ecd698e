#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "eitq/eit_medium.hpp"
#include "eitq/model_fit.hpp"
#include "eitq/quadrature_channel.hpp"
#include "eitq/signal_synth.hpp"

namespace eitq {

enum class AnalysisKind { sweep_cv, sweep_ts, delay_experiment, fit, correlation };

std::string_view to_string(AnalysisKind k);

/// Medium as written in a scenario file: rates in Hz (multiplied by 2 pi on
/// conversion), everything else SI.
struct MediumConfig {
  std::string label;
  double od_rate = 0.0;
  double spontaneous_rate_hz = 3.0e6;
  double dephasing_rate_hz = 0.0;
  double pump_rabi_hz = 1.0e6;
  double wavenumber_per_m = 7.9e6;
  double length_m = 0.075;
  double light_speed_m_per_s = 299792458.0;

  EitParameters to_parameters() const;
  bool operator==(const MediumConfig&) const = default;
};

struct FrequencyGrid {
  double start_hz = 0.0;
  double stop_hz = 0.0;
  std::size_t points = 0;

  std::vector<double> values() const;
  bool operator==(const FrequencyGrid&) const = default;
};

struct MonteCarloSettings {
  bool enabled = false;
  std::size_t trials = 1;
  double sample_rate_hz = 4.0e6;
  double rbw_hz = 1.0e3;
  double vbw_hz = 30.0;  // recorded only; averaging stands in for the video filter
  std::size_t averages = 100;
  double tone_snr_db = 30.0;
  bool operator==(const MonteCarloSettings&) const = default;
};

struct DelaySettings {
  double bandwidth_hz = 60.0e3;
  double modulation_level = 100.0;  // in-band PSD of the noise modulation, QNL units
  double duration_s = 0.25;
  double max_lag_s = 40.0e-6;
  double min_peak = 0.2;
  bool operator==(const DelaySettings&) const = default;
};

struct FitParameterConfig {
  FitParameter which = FitParameter::dephasing_rate;
  double initial = 0.0;  // config units (Hz for rates)
  double lower = 0.0;
  double upper = 0.0;    // 0 means unbounded
  bool operator==(const FitParameterConfig&) const = default;
};

struct FitSettings {
  std::string data_path;        // CSV; empty selects synthetic data
  std::size_t truth_medium = 0; // synthetic data generator and fixed parameters
  double noise_rel = 0.0;       // multiplicative Gaussian noise on synthetic data
  MetricKind curve = MetricKind::benchmark_cv;
  std::vector<FitParameterConfig> free;
  bool operator==(const FitSettings&) const = default;
};

struct OutputSettings {
  std::string dir = "out";
  std::string series_format = "none";  // none | csv | binary
  bool operator==(const OutputSettings&) const = default;
};

struct Scenario {
  std::string name;
  std::string description;
  AnalysisKind kind = AnalysisKind::sweep_cv;
  std::uint64_t seed = 1;
  std::vector<MediumConfig> media;
  NoiseInjection injection;
  FrequencyGrid grid;
  std::vector<Quadrature> quadratures{Quadrature::amplitude};
  MonteCarloSettings monte_carlo;
  DelaySettings delay;
  FitSettings fit;
  std::vector<Tone> lock_tones;
  OutputSettings outputs;

  /// Directory relative paths in the scenario resolve against.
  std::filesystem::path base_dir;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  bool operator==(const Scenario& o) const;
};

/// Parses a scenario document, or the `scenario` section of a manifest.
Scenario parse_scenario(std::string_view yaml, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

/// Fully resolved YAML form (derived inputs such as group_delay_s or
/// pump_noise_db are replaced by the values they resolved to).
std::string emit_scenario(const Scenario& scenario);

}  // namespace eitq
