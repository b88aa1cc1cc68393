#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "umps/baseline.hpp"
#include "umps/canonical.hpp"
#include "umps/linalg.hpp"
#include "umps/observables.hpp"
#include "umps/synthetic.hpp"
#include "umps/vomps.hpp"

using namespace umps;

namespace {

// Small real MPO with D = 2 built from Ising-like weights.
MPO small_ising(double beta) {
  const double c = std::sqrt(std::cosh(beta)), s = std::sqrt(std::sinh(beta));
  const double q[2][2] = {{c, s}, {c, -s}};  // q[spin][bond]
  Tensor o({2, 2, 2, 2});
  for (std::size_t l = 0; l < 2; ++l)
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t out = 0; out < 2; ++out)
        for (std::size_t in = 0; in < 2; ++in) {
          const double sign = (out == in) ? 1.0 : -1.0;
          o({l, out, in, r}) = q[in][l] * q[in][r] * std::exp(beta * sign);
        }
  return MPO({o});
}

}  // namespace

TEST(SchmidtTruncate, SameChiIsIdentity) {
  Rng rng(1);
  const UniformMPS m = random_state(4, 2, 2, rng);
  const SchmidtTruncation t = schmidt_truncate(m, 4);
  EXPECT_EQ(t.discarded_weight, 0.0);
  EXPECT_FALSE(t.degenerate_cut);
  EXPECT_NEAR(fidelity_per_site(t.state, m), 1.0, 1e-12);
  const SchmidtTruncation bigger = schmidt_truncate(m, 9);
  EXPECT_EQ(bigger.state.bond_dim(0), 4u);
  EXPECT_EQ(bigger.discarded_weight, 0.0);
}

TEST(SchmidtTruncate, DiscardedWeightOfTwoValueSpectrum) {
  Rng rng(2);
  const double values[2] = {1.0, 1e-4};
  const UniformMPS m = state_with_spectrum(values, 2, rng);
  const SchmidtTruncation t = schmidt_truncate(m, 1);
  EXPECT_NEAR(t.discarded_weight, 1e-8 / (1.0 + 1e-8), 1e-20);
  EXPECT_EQ(t.state.bond_dim(0), 1u);
  EXPECT_EQ(t.kept[0], 1u);
}

TEST(SchmidtTruncate, ReturnsCanonical) {
  Rng rng(3);
  const UniformMPS m = random_state(8, 2, 2, rng, 0.3);
  const SchmidtTruncation t = schmidt_truncate(m, 5);
  EXPECT_LT(canonical_residuals(t.state).max(), 1e-10);
  for (std::size_t n = 0; n < 2; ++n) EXPECT_EQ(t.state.bond_dim(n), 5u);
  EXPECT_GT(t.discarded_weight, 0.0);
}

TEST(SchmidtTruncate, PerBondTargets) {
  Rng rng(4);
  const UniformMPS m = random_state(6, 2, 2, rng, 0.3);
  const std::size_t chi[2] = {2, 4};
  const SchmidtTruncation t = schmidt_truncate(m, chi);
  EXPECT_EQ(t.state.bond_dim(0), 2u);
  EXPECT_EQ(t.state.bond_dim(1), 4u);
  const std::size_t bad[3] = {1, 2, 3};
  EXPECT_THROW(schmidt_truncate(m, bad), std::invalid_argument);
}

TEST(SchmidtTruncate, DegenerateCutFlagged) {
  Rng rng(5);
  const double values[3] = {1.0, 0.5, 0.5};
  const UniformMPS m = state_with_spectrum(values, 3, rng);
  const SchmidtTruncation t = schmidt_truncate(m, 2);
  EXPECT_TRUE(t.degenerate_cut);
  EXPECT_EQ(t.state.bond_dim(0), 2u);
}

TEST(SchmidtTruncate, RelativeCutoff) {
  Rng rng(6);
  const double values[3] = {1.0, 1e-3, 1e-9};
  const UniformMPS m = state_with_spectrum(values, 3, rng);
  const SchmidtTruncation t = schmidt_truncate(m, 3, 1e-6);
  EXPECT_EQ(t.state.bond_dim(0), 2u);
}

// For strongly decaying spectra the squared fidelity density approaches
// 1 - discarded_weight, i.e. |lambda| ~ 1 - dw/2 to leading order.
TEST(SchmidtTruncate, FidelityTracksDiscardedWeight) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    Rng rng(seed);
    const UniformMPS m = random_state(4, 2, 1, rng, 4.0);
    const SchmidtTruncation t = schmidt_truncate(m, 3);
    const double f = fidelity_per_site(t.state, m);
    const double dw = t.discarded_weight;
    ASSERT_GT(dw, 0.0);
    EXPECT_LT(std::abs((1.0 - f * f) - dw), 1e-2 * dw) << "seed " << seed;
    EXPECT_LE(f, 1.0);
  }
}

TEST(SchmidtTruncate, NotBetterThanVariational) {
  Rng rng(8);
  const UniformMPS m = random_state(8, 2, 1, rng, 0.2);
  const SchmidtTruncation t = schmidt_truncate(m, 4);
  VompsConfig c;
  c.target_chi = {4};
  const VompsResult r = vomps_truncate(m, c);
  EXPECT_LE(fidelity_per_site(t.state, m), r.report.fidelity + 1e-12);
}

TEST(LocalTruncate, IdentityMpoKeepsState) {
  Rng rng(9);
  const UniformMPS m = random_state(3, 2, 1, rng);
  const SchmidtTruncation t = mpo_mps_local_truncate(m, MPO::identity(m.phys_dims()), 3);
  EXPECT_NEAR(fidelity_per_site(t.state, m), 1.0, 1e-10);
}

TEST(LocalTruncate, ExactAtFullBond) {
  Rng rng(10);
  const UniformMPS m = random_state(2, 2, 1, rng);
  const MPO o = small_ising(0.4);
  const SchmidtTruncation t = mpo_mps_local_truncate(m, o, 4);
  EXPECT_EQ(t.state.bond_dim(0), 4u);
  EXPECT_LT(canonical_residuals(t.state).max(), 1e-10);
  EXPECT_NEAR(fidelity_with_mpo(t.state, m, o), 1.0, 1e-10);
}

TEST(LocalTruncate, NotBetterThanVariational) {
  Rng rng(11);
  const UniformMPS m = random_state(2, 2, 1, rng);
  const MPO o = small_ising(0.4);
  const SchmidtTruncation t = mpo_mps_local_truncate(m, o, 2);
  VompsConfig c;
  c.target_chi = {2};
  const VompsResult r = vomps_truncate(m, c, &o);
  EXPECT_LE(fidelity_with_mpo(t.state, m, o), r.report.fidelity + 1e-12);
}

TEST(LocalTruncate, TwoSiteCell) {
  Rng rng(12);
  const UniformMPS m = random_state(3, 2, 2, rng);
  const std::size_t D[2] = {2, 3};
  const MPO o = random_mpo(D, 2, rng);
  const SchmidtTruncation t = mpo_mps_local_truncate(m, o, 9);
  EXPECT_EQ(t.state.bond_dim(0), 6u);
  EXPECT_EQ(t.state.bond_dim(1), 9u);
  EXPECT_NEAR(fidelity_with_mpo(t.state, m, o), 1.0, 1e-10);
}

TEST(LocalTruncate, MemoryGuard) {
  Rng rng(13);
  const UniformMPS m = random_state(4, 2, 1, rng);
  const std::size_t D[1] = {2};
  const MPO o = random_mpo(D, 2, rng);
  LocalTruncateOptions opt;
  opt.memory_limit_bytes = 1000.0;
  try {
    mpo_mps_local_truncate(m, o, 4, opt);
    FAIL() << "expected ResourceError";
  } catch (const ResourceError& e) {
    EXPECT_NEAR(e.estimate_bytes(), local_truncate_memory_estimate(m, o), 1e-9);
    EXPECT_NE(std::string(e.what()).find("chi^2 d D^2"), std::string::npos);
  }
}

TEST(LocalTruncate, EpsilonMeasureAboveVariational) {
  Rng rng(14);
  const UniformMPS m = random_state(4, 2, 1, rng, 0.3);
  const std::size_t D[1] = {2};
  const MPO o = random_mpo(D, 2, rng);
  const SchmidtTruncation t = mpo_mps_local_truncate(m, o, 4);
  VompsConfig c;
  c.target_chi = {4};
  const VompsResult r = vomps_truncate(m, c, &o);
  ASSERT_TRUE(r.report.converged);
  EXPECT_GT(epsilon_measure(t.state, m, &o), r.report.final_epsilon);
}
