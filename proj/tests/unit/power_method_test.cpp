#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <sstream>

#include "umps/canonical.hpp"
#include "umps/models.hpp"
#include "umps/observables.hpp"
#include "umps/power_method.hpp"
#include "umps/synthetic.hpp"

using namespace umps;

namespace {

UniformMPS product(std::vector<std::array<double, 2>> amps) {
  std::vector<Tensor> sites;
  for (const auto& a : amps) sites.push_back(Tensor({1, 2, 1}, {a[0], a[1]}));
  return mixed_canonical(sites);
}

PowerConfig ising_config(const IsingParams& p, std::size_t chi) {
  PowerConfig c;
  c.chi = chi;
  c.beta = p.beta;
  c.impurity = ising_magnetization_tensor(p);
  c.max_iter = 300;
  c.tol = 1e-14;
  return c;
}

}  // namespace

TEST(PowerMethod, RejectsBadInput) {
  Rng rng(1);
  const MPO rect({Tensor::random({2, 3, 2, 2}, rng)});
  const UniformMPS s = random_state(2, 2, 1, rng);
  EXPECT_THROW(power_method(rect, s, {}), ShapeError);
  PowerConfig c;
  c.chi = 0;
  EXPECT_THROW(power_method(ising_mpo({0.3, 1}), s, c), std::invalid_argument);
}

TEST(PowerMethod, IdentityMpoIsImmediateFixedPoint) {
  Rng rng(2);
  const UniformMPS s = random_state(3, 2, 1, rng);
  const std::array<std::size_t, 1> d{2};
  PowerConfig c;
  c.chi = 3;
  const PowerResult r = power_method(MPO::identity(d), s, c);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.period, 1u);
  EXPECT_NEAR(r.free_energy, 0.0, 1e-12);
  EXPECT_NEAR(fidelity_per_site(r.state, s), 1.0, 1e-12);
}

TEST(PowerMethod, DisorderedPhaseLosesMagnetization) {
  const IsingParams p{0.5 * ising_beta_c(), 1};
  const PowerResult r = power_method(ising_mpo(p), product({{1.0, 0.3}}), ising_config(p, 4));
  ASSERT_TRUE(r.converged);
  EXPECT_LT(std::abs(r.magnetization), 1e-6);
  EXPECT_NEAR(r.free_energy, onsager_free_energy(p.beta), 1e-8);
}

TEST(PowerMethod, OrderedFerromagnetMatchesExactSolution) {
  const IsingParams p{1.5 * ising_beta_c(), 1};
  const PowerResult r = power_method(ising_mpo(p), product({{1.0, 0.3}}), ising_config(p, 8));
  ASSERT_TRUE(r.converged);
  EXPECT_FALSE(r.translation_alternation);
  EXPECT_EQ(r.period, 1u);
  EXPECT_NEAR(r.free_energy, onsager_free_energy(p.beta), 1e-10);
  EXPECT_NEAR(r.magnetization, onsager_magnetization(p.beta), 1e-8);
  // Hermitian transfer matrix: one more step leaves the fixed point in place
  PowerConfig again = ising_config(p, 8);
  again.max_iter = 1;
  const PowerResult next = power_method(ising_mpo(p), r.state, again);
  EXPECT_LT(next.records[0].step_infidelity, 1e-9);
}

TEST(PowerMethod, AntiferromagnetAlternates) {
  const IsingParams p{1.5 * ising_beta_c(), -1};
  const PowerResult r = power_method(ising_mpo(p), product({{1.0, 0.3}, {0.3, 1.0}}), ising_config(p, 8));
  ASSERT_TRUE(r.converged);
  EXPECT_TRUE(r.translation_alternation);
  EXPECT_EQ(r.period, 2u);
  EXPECT_LT(r.records.back().translation_infidelity, 1e-10);
  EXPECT_GT(r.records.back().step_infidelity, 0.5);
  EXPECT_NEAR(r.free_energy, onsager_free_energy(p.beta), 1e-10);
  // staggered: the spin at site 0 is as large as in the ferromagnet
  EXPECT_NEAR(std::abs(r.magnetization), onsager_magnetization(p.beta), 1e-8);
}

TEST(PowerMethod, ReferenceDiagnosticsAndCsv) {
  const IsingParams p{1.5 * ising_beta_c(), 1};
  PowerConfig c = ising_config(p, 4);
  const PowerResult first = power_method(ising_mpo(p), product({{1.0, 0.3}}), c);
  c.reference = PowerReference{first.state, first.magnetization, first.free_energy};
  const PowerResult r = power_method(ising_mpo(p), product({{1.0, 0.2}}), c);
  ASSERT_TRUE(r.converged);
  EXPECT_LT(r.records.back().reference_infidelity, 1e-9);
  EXPECT_LT(r.records.back().reference_free_energy_diff, 1e-10);
  EXPECT_TRUE(std::isnan(r.records.front().magnetization_change));

  // no reference state: measured against the last iterate afterwards
  c.reference = PowerReference{std::nullopt, onsager_magnetization(p.beta), onsager_free_energy(p.beta)};
  const PowerResult self = power_method(ising_mpo(p), product({{1.0, 0.3}}), c);
  EXPECT_LT(std::abs(self.records.back().reference_infidelity), 1e-13);
  EXPECT_GT(self.records.front().reference_infidelity, 1e-6);
  EXPECT_LT(self.records.back().reference_free_energy_diff, 1e-8);

  std::ostringstream os;
  write_power_csv(os, r, {"umps fixedpoint", "seed 0"});
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "# umps fixedpoint");
  std::getline(is, line);
  std::getline(is, line);
  EXPECT_EQ(line.rfind("iter,translation_infidelity,magnetization_change,", 0), 0u);
  std::size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, r.records.size());
}
