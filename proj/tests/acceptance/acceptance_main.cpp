// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "eitq/eit_medium.hpp"
#include "eitq/metrics.hpp"
#include "eitq/model_fit.hpp"
#include "eitq/runner.hpp"
#include "eitq/scenario.hpp"
#include "eitq/series_io.hpp"
#include "eitq/units.hpp"
#include "../test_support.hpp"

using namespace eitq;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = EITQ_SCENARIO_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> check;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome perfect_transmission() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const EitParameters p = eitq::testing::random_medium(rng, true);
    worst = std::max(worst, std::abs(channel_response(p, 0.0).transmissivity - 1.0));
  }
  return {worst < 1e-12, "max |eta(0) - 1| = " + fmt("%.3g", worst) + " over 100 draws (tol 1e-12)"};
}

Outcome conjugation_symmetry() {
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> lf(0.0, std::log(1e8));
  double worst_eta = 0.0, worst_phi = 0.0;
  for (int i = 0; i < 100; ++i) {
    const EitParameters p = eitq::testing::random_medium(rng);
    for (int j = 0; j < 20; ++j) {
      const double w = hz_to_rad(std::exp(lf(rng)));
      const auto a = channel_response(p, w), b = channel_response(p, -w);
      worst_eta = std::max(worst_eta, std::abs(a.transmissivity - b.transmissivity));
      worst_phi = std::max(worst_phi, std::abs(a.phase + b.phase));
    }
  }
  return {worst_eta < 1e-12 && worst_phi < 1e-12,
          "max |eta(w) - eta(-w)| = " + fmt("%.3g", worst_eta) + ", max |phi(w) + phi(-w)| = " +
              fmt("%.3g", worst_phi) + " (tol 1e-12)"};
}

Outcome group_delay_consistency() {
  std::mt19937_64 rng(103);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const EitParameters p = eitq::testing::random_medium(rng);
    const double window = p.pump_rabi;
    for (int j = 0; j < 10; ++j) {
      const double w = window * (0.01 + 0.5 * j);
      const double exact = group_delay(p, w);
      const double numeric = group_delay_numeric(p, w);
      worst = std::max(worst, std::abs(numeric - exact) / std::abs(exact));
    }
  }
  const EitParameters s = eitq::testing::slow_light_medium();
  const double limit = s.od_rate * s.length / (s.light_speed * s.pump_rabi * s.pump_rabi);
  const double small = std::abs(group_delay(s, hz_to_rad(10.0)) - limit) / limit;
  return {worst < 1e-6 && small < 1e-3,
          "closed vs numeric rel err " + fmt("%.3g", worst) + " at 100 frequencies (tol 1e-6); small-w vs " +
              "N|g|^2 L/(c|gE_c|^2) rel err " + fmt("%.3g", small) + " (tol 1e-3)"};
}

Outcome delay_experiment() {
  const RunResult r = run_scenario(load_scenario(kScenarios / "delay_7p5us.yaml"));
  const DelayReport& d = *r.delay;
  const double err = std::abs(d.estimated_delay - 7.5e-6);
  const double ratio = d.cross_width / d.auto_width;
  return {err <= d.sample_period && ratio > 1.05,
          "delay " + fmt("%.4g", d.estimated_delay * 1e6) + " us (|err| " + fmt("%.3g", err * 1e6) +
              " us, tol one sample " + fmt("%.3g", d.sample_period * 1e6) + " us); cross/auto width " +
              fmt("%.3f", ratio) + " (tol > 1.05)"};
}

// Worst |mean - model| / stderr across every bin of every statistics table.
double worst_z(const RunResult& r, MetricKind kind, std::size_t* bins) {
  double worst = 0.0;
  for (const auto& s : r.statistics) {
    if (s.kind != kind) continue;
    for (std::size_t i = 0; i < s.mean.size(); ++i) {
      worst = std::max(worst, std::abs(s.mean[i] - s.benchmark[i]) / s.stderr_[i]);
      ++*bins;
    }
  }
  return worst;
}

Outcome benchmark_equivalence() {
  Scenario cv = parse_scenario(R"(name: passive_cv
kind: sweep_cv
seed: 505
media:
  - group_delay_s: 7.5e-6
    dephasing_rate_hz: 4.0e3
    pump_rabi_hz: 2.0e6
grid: {start_hz: 10.0e3, stop_hz: 460.0e3, points: 10}
monte_carlo: {enabled: true, trials: 32, averages: 400}
)");
  Scenario ts = cv;
  ts.name = "passive_ts";
  ts.kind = AnalysisKind::sweep_ts;
  ts.seed = 506;
  std::size_t cv_bins = 0, ts_bins = 0;
  const double z_cv = worst_z(run_scenario(cv), MetricKind::conditional_variance, &cv_bins);
  const double z_ts = worst_z(run_scenario(ts), MetricKind::signal_transfer, &ts_bins);
  return {cv_bins > 0 && ts_bins > 0 && z_cv < 3.0 && z_ts < 3.0,
          "max |V - (1-eta)|/SE = " + fmt("%.2f", z_cv) + " over " + std::to_string(cv_bins) +
              " bins, max |T - eta|/SE = " + fmt("%.2f", z_ts) + " over " + std::to_string(ts_bins) +
              " bins (tol 3 SE, 32 trials x 400 averages)"};
}

Outcome pump_budget() {
  const RunResult r = run_scenario(load_scenario(kScenarios / "pump_coupling_budget.yaml"));
  bool ok = r.budgets.size() == 2;
  std::string detail;
  for (const auto& b : r.budgets) {
    const bool amp = b.quadrature == Quadrature::amplitude;
    const double target = amp ? 1.21 : 0.49;
    const bool pass = std::abs(b.analytic_excess_db - target) <= 0.01 &&
                      std::abs(b.monte_carlo_excess_db - b.analytic_excess_db) <= 0.1;
    ok = ok && pass;
    detail += std::string(detail.empty() ? "" : "; ") + std::string(to_string(b.quadrature)) + " " +
              fmt("%.3f", b.analytic_excess_db) + " dB analytic (target " + fmt("%.2f", target) +
              " +- 0.01), " + fmt("%.3f", b.monte_carlo_excess_db) + " dB Monte-Carlo (+- 0.1)";
  }
  return {ok, detail};
}

Outcome excess_noise_detectability() {
  const RunResult r = run_scenario(load_scenario(kScenarios / "fig3_cv_sweep.yaml"));
  bool ok = false;
  double min_low_z = 1e300, max_high_dev = 0.0;
  for (const auto& s : r.statistics) {
    if (s.kind != MetricKind::conditional_variance) continue;
    ok = true;
    // Low frequencies: first five bins sit deep in the transparency window.
    for (std::size_t i = 0; i < 5; ++i) {
      min_low_z = std::min(min_low_z, (s.mean[i] - s.benchmark[i]) / s.stderr_[i]);
    }
    // High frequencies: last ten bins, where the cell is opaque.
    for (std::size_t i = s.mean.size() - 10; i < s.mean.size(); ++i) {
      max_high_dev = std::max(max_high_dev, std::abs(s.mean[i] - 1.0) - 3.0 * s.stderr_[i]);
    }
  }
  ok = ok && min_low_z > 3.0 && max_high_dev < 0.02;
  return {ok, "low-w excess over 1-eta >= " + fmt("%.1f", min_low_z) +
                  " SE (tol > 3); high-w |V - 1| beyond 3 SE <= " + fmt("%.4f", std::max(max_high_dev, 0.0)) +
                  " (tol 0.02)"};
}

Outcome minimizer_equivalence() {
  std::mt19937_64 rng(108);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_brute = 0.0, worst_scale = 0.0, worst_shift = 0.0;
  for (int i = 0; i < 100; ++i) {
    const EitParameters p = eitq::testing::random_medium(rng);
    NoiseInjection inj;
    inj.kappa_amp = 0.2 * u(rng);
    inj.pump_var_amp = 1.0 + 10.0 * u(rng);
    const double w = p.pump_rabi * 2.0 * u(rng) + 1.0;
    const ChannelResponse resp = channel_response(p, w);
    const double v_in = 1.0 + 9.0 * u(rng);
    const double s_out = output_variance(resp, inj, Quadrature::amplitude, v_in);
    const std::complex<double> s_oi = std::conj(resp.amplitude) * v_in;
    const auto closed = conditional_variance_point(v_in, s_out, s_oi, w);
    const auto brute = conditional_variance_bruteforce(v_in, s_out, s_oi, w);
    worst_brute = std::max(worst_brute, std::abs(brute.value - closed.value) / closed.value);
    const double c = std::ldexp(1.0, static_cast<int>(rng() % 16) - 8);
    worst_scale = std::max(
        worst_scale, std::abs(conditional_variance_point(c * c * v_in, s_out, c * s_oi, w).value - closed.value));
    const double shift = 1e-5 * u(rng);
    worst_shift = std::max(
        worst_shift,
        std::abs(conditional_variance_point(v_in, s_out, s_oi * std::polar(1.0, -w * shift), w).value -
                 closed.value) /
            s_out);
  }
  return {worst_brute < 1e-3 && worst_scale == 0.0 && worst_shift < 1e-12,
          "brute-force rel err " + fmt("%.3g", worst_brute) + " (tol 1e-3); rescaling change " +
              fmt("%.3g", worst_scale) + " (exact); time-shift change " + fmt("%.3g", worst_shift) +
              " (tol 1e-12) over 100 draws"};
}

Outcome fit_recovery() {
  auto problem = [](double g0_hz) {
    const EitParameters truth = eitq::testing::slow_light_medium(g0_hz);
    FitProblem prob;
    for (int i = 1; i <= 120; ++i) {
      const double w = hz_to_rad(5e3 * i);
      prob.data.push_back({w, fit_model(truth, MetricKind::benchmark_cv, w), 1.0});
    }
    prob.start = truth;
    prob.start.dephasing_rate = hz_to_rad(20e3);
    return std::make_pair(truth, prob);
  };
  auto [truth4, clean] = problem(4e3);
  const double clean_err =
      std::abs(fit(clean).best.dephasing_rate - truth4.dephasing_rate) / truth4.dephasing_rate;

  // Recovery study over independent 2% noise realizations.
  double noisy_err = 0.0;
  std::mt19937_64 rng(109);
  std::normal_distribution<double> n(0.0, 0.02);
  for (double g0_hz : {4e3, 3.5e3}) {
    for (int trial = 0; trial < 20; ++trial) {
      auto [truth, prob] = problem(g0_hz);
      for (auto& pt : prob.data) {
        pt.sigma = 0.02 * pt.value;
        pt.value *= 1.0 + n(rng);
      }
      prob.weighted = true;
      noisy_err = std::max(noisy_err, std::abs(fit(prob).best.dephasing_rate - truth.dephasing_rate) /
                                          truth.dephasing_rate);
    }
  }
  return {clean_err < 1e-3 && noisy_err < 0.1,
          "noiseless gamma_0 = 2pi 4 kHz rel err " + fmt("%.3g", clean_err) +
              " (tol 1e-3); 2% noise worst rel err " + fmt("%.3g", noisy_err) +
              " over 40 fits at 4 and 3.5 kHz (tol 0.1)"};
}

Outcome determinism() {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(kScenarios)) {
    if (e.path().extension() == ".yaml") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  const fs::path root = fs::temp_directory_path() / "eitq_acceptance_determinism";
  std::size_t compared = 0;
  std::string mismatch;
  for (const auto& f : files) {
    const Scenario sc = load_scenario(f);
    fs::remove_all(root);
    const auto a = emit_tables(run_scenario(sc), root / "a");
    const auto b = emit_tables(run_scenario(sc), root / "b");
    if (a != b) mismatch += " " + sc.name;
    for (const auto& name : a) {
      ++compared;
      if (read_file(root / "a" / name) != read_file(root / "b" / name)) mismatch += " " + sc.name + "/" + name;
    }
  }
  fs::remove_all(root);
  return {mismatch.empty() && compared > 0,
          std::to_string(files.size()) + " scenarios, " + std::to_string(compared) + " files compared" +
              (mismatch.empty() ? ", all byte-identical" : ", differ:" + mismatch)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "perfect transmission at zero dephasing", 1.0, perfect_transmission},
      {2, "conjugation symmetry", 1.0, conjugation_symmetry},
      {3, "group delay consistency", 1.0, group_delay_consistency},
      {4, "7.5 us delay experiment", 30.0, delay_experiment},
      {5, "Monte-Carlo benchmark equivalence", 120.0, benchmark_equivalence},
      {6, "pump-coupling noise budget", 60.0, pump_budget},
      {7, "excess-noise detectability", 120.0, excess_noise_detectability},
      {8, "conditional variance minimizer", 30.0, minimizer_equivalence},
      {9, "dephasing fit recovery", 30.0, fit_recovery},
      {10, "determinism of bundled scenarios", 60.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs < c.budget_s;
    failures += pass ? 0 : 1;
    std::printf("%s [%d] %s: %s; %.2f s (limit %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget_s);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
