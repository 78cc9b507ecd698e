#include "eitq/quadrature_channel.hpp"

#include <gtest/gtest.h>

#include <random>

#include "eitq/errors.hpp"
#include "eitq/units.hpp"

using namespace eitq;

namespace {

ChannelResponse passive(double eta, double phase = 0.0, double omega = 1.0) {
  ChannelResponse r;
  r.omega = omega;
  r.transmissivity = eta;
  r.phase = phase;
  r.amplitude = std::polar(std::sqrt(eta), phase);
  return r;
}

NoiseInjection pump_coupling(double kappa_amp, double kappa_phase) {
  NoiseInjection inj;
  inj.kappa_amp = kappa_amp;
  inj.kappa_phase = kappa_phase;
  inj.pump_var_amp = inj.pump_var_phase = std::pow(10.0, 0.7);
  return inj;
}

}  // namespace

TEST(quadrature_channel, vacuum_is_a_fixed_point_of_passive_loss) {
  for (double eta : {0.0, 0.1, 0.3, 0.7, 0.999, 1.0}) {
    const auto out = apply_passive(GaussianSidebandState::vacuum(1.0), passive(eta));
    EXPECT_EQ(out.var_amp, 1.0);
    EXPECT_EQ(out.var_phase, 1.0);
  }
}

TEST(quadrature_channel, full_loss_leaves_vacuum) {
  GaussianSidebandState s{1.0, {3.0, 1.0}, {-2.0, 0.5}, 4.0, 7.0};
  const auto out = apply_passive(s, passive(0.0));
  EXPECT_EQ(std::abs(out.mean_amp), 0.0);
  EXPECT_EQ(std::abs(out.mean_phase), 0.0);
  EXPECT_EQ(out.var_amp, 1.0);
  EXPECT_EQ(out.var_phase, 1.0);
}

TEST(quadrature_channel, passive_map_arithmetic) {
  GaussianSidebandState s = GaussianSidebandState::vacuum(1.0);
  s.var_amp = 4.0;
  s.mean_amp = {2.0, 0.0};
  const auto out = apply_passive(s, passive(0.5, 0.3));
  EXPECT_DOUBLE_EQ(out.var_amp, 2.5);
  EXPECT_DOUBLE_EQ(out.var_phase, 1.0);
  EXPECT_NEAR(std::abs(out.mean_amp), 2.0 * std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(std::arg(out.mean_amp), 0.3, 1e-15);
}

TEST(quadrature_channel, passive_excess_shrinks_by_eta) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double eta = u(rng);
    GaussianSidebandState s = GaussianSidebandState::vacuum(1.0);
    s.var_amp = 1.0 + 20.0 * u(rng);
    s.var_phase = 1.0 + 20.0 * u(rng);
    s.mean_amp = {5.0 * u(rng), 0.0};
    const auto out = apply_passive(s, passive(eta));
    EXPECT_NEAR(out.var_amp - 1.0, eta * (s.var_amp - 1.0), 1e-14);
    EXPECT_NEAR(out.var_phase - 1.0, eta * (s.var_phase - 1.0), 1e-14);
    if (s.var_amp == 1.0) continue;
    // Coherent input: SNR scales by eta.
    GaussianSidebandState c = GaussianSidebandState::vacuum(1.0);
    c.mean_amp = s.mean_amp;
    const auto co = apply_passive(c, passive(eta));
    EXPECT_NEAR(std::norm(co.mean_amp) / co.var_amp, eta * std::norm(c.mean_amp), 1e-12);
  }
}

TEST(quadrature_channel, pump_coupling_noise_budget) {
  const auto inj = pump_coupling(0.08, 0.03);
  const auto out = apply_injection(GaussianSidebandState::vacuum(1.0), inj);
  EXPECT_NEAR(out.var_amp, 1.0 + 0.08 * (std::pow(10.0, 0.7) - 1.0), 1e-15);
  EXPECT_NEAR(out.var_amp, 1.321, 5e-4);
  EXPECT_NEAR(to_db(out.var_amp), 1.21, 0.005);
  EXPECT_NEAR(out.var_phase, 1.120, 5e-4);
  EXPECT_NEAR(to_db(out.var_phase), 0.49, 0.005);
}

TEST(quadrature_channel, zero_injection_is_identity) {
  GaussianSidebandState s{2.0, {1.0, 2.0}, {0.5, 0.0}, 3.0, 1.5};
  const auto out = apply_injection(s, NoiseInjection{});
  EXPECT_EQ(out.var_amp, s.var_amp);
  EXPECT_EQ(out.var_phase, s.var_phase);
  EXPECT_EQ(out.mean_amp, s.mean_amp);
}

TEST(quadrature_channel, injections_add_and_commute) {
  NoiseInjection a = pump_coupling(0.08, 0.0);
  NoiseInjection b;
  b.extra_var_phase = 0.4;
  b.extra_var_amp = 0.1;
  const auto s = GaussianSidebandState::vacuum(1.0);
  const auto ab = apply_injection(apply_injection(s, a), b);
  const auto ba = apply_injection(apply_injection(s, b), a);
  EXPECT_DOUBLE_EQ(ab.var_amp, ba.var_amp);
  EXPECT_DOUBLE_EQ(ab.var_phase, ba.var_phase);
  EXPECT_NEAR(ab.var_amp, 1.0 + a.excess(Quadrature::amplitude) + 0.1, 1e-15);
}

TEST(quadrature_channel, end_to_end_composition) {
  const auto s = GaussianSidebandState::vacuum(1.0);
  // Zero injection: bit-identical to the passive map alone, for both placements.
  for (auto placement : {InjectionPlacement::after_loss, InjectionPlacement::before_loss}) {
    NoiseInjection zero;
    zero.placement = placement;
    GaussianSidebandState in = s;
    in.var_amp = 3.7;
    const auto a = end_to_end(in, passive(0.37), zero);
    const auto b = apply_passive(in, passive(0.37));
    EXPECT_EQ(a.var_amp, b.var_amp);
    EXPECT_EQ(a.var_phase, b.var_phase);
    const auto id = end_to_end(in, passive(1.0), zero);
    EXPECT_EQ(id.var_amp, in.var_amp);
  }
  // Coherent input, eta = 0.6, 8% of a 7 dB pump after the loss.
  const auto out = end_to_end(s, passive(0.6), pump_coupling(0.08, 0.03));
  EXPECT_NEAR(out.var_amp, 0.6 + 0.4 + 0.08 * (std::pow(10.0, 0.7) - 1.0), 1e-15);
  EXPECT_NEAR(out.var_amp, 1.321, 5e-4);
  // Before the loss the injected noise is attenuated with the signal.
  auto before = pump_coupling(0.08, 0.03);
  before.placement = InjectionPlacement::before_loss;
  const auto out_b = end_to_end(s, passive(0.6), before);
  EXPECT_NEAR(out_b.var_amp, 1.0 + 0.6 * 0.08 * (std::pow(10.0, 0.7) - 1.0), 1e-15);
}

TEST(quadrature_channel, contract_and_validity_errors) {
  EXPECT_THROW(apply_passive(GaussianSidebandState::vacuum(1.0), passive(0.5, 0.0, 2.0)),
               ContractViolation);
  GaussianSidebandState squeezed = GaussianSidebandState::vacuum(1.0);
  squeezed.var_amp = 0.5;
  EXPECT_THROW(apply_passive(squeezed, passive(0.5)), ParameterError);
  NoiseInjection bad;
  bad.kappa_amp = 1.5;
  EXPECT_THROW(apply_injection(GaussianSidebandState::vacuum(1.0), bad), ParameterError);
  bad = NoiseInjection{};
  bad.pump_var_phase = 0.5;
  EXPECT_THROW(bad.validate(), ParameterError);
}

TEST(quadrature_channel, names_round_trip) {
  for (auto q : {Quadrature::amplitude, Quadrature::phase}) EXPECT_EQ(parse_quadrature(to_string(q)), q);
  for (auto p : {InjectionPlacement::after_loss, InjectionPlacement::before_loss}) {
    EXPECT_EQ(parse_placement(to_string(p)), p);
  }
  EXPECT_THROW(parse_quadrature("neither"), ParameterError);
}
