#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "umps/canonical.hpp"
#include "umps/io.hpp"
#include "umps/linalg.hpp"
#include "umps/models.hpp"
#include "umps/observables.hpp"
#include "umps/synthetic.hpp"
#include "umps/vomps.hpp"

using namespace umps;
using oracle::Dense;

namespace {

Dense gate_matrix(const Tensor& g) { return oracle::as_dense(g.reshaped({4, 4})); }

// Dense XXZ Hamiltonian on a periodic chain, site 0 most significant.
Dense xxz_chain(std::size_t sites, double delta) {
  const Tensor h = xxz_bond_hamiltonian(delta).reshaped({2, 2, 2, 2});
  const std::size_t dim = std::size_t{1} << sites;
  Dense out = Dense::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t n = 0; n < sites; ++n) out += oracle::embed_gate(h, n, (n + 1) % sites, sites);
  return out;
}

Dense layer_circuit(const Tensor& gate, Parity parity, std::size_t sites) {
  const std::size_t dim = std::size_t{1} << sites;
  Dense u = Dense::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t n = parity == Parity::even ? 0 : 1; n < sites; n += 2)
    u = Dense(oracle::embed_gate(gate, n, (n + 1) % sites, sites) * u);
  return u;
}

Dense trotter_step_dense(const XXZParams& p, std::size_t sites) {
  const std::size_t dim = std::size_t{1} << sites;
  Dense u = Dense::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const MPO& layer : trotter_step(p)) u = Dense(oracle::ring_operator(layer, sites) * u);
  return u;
}

Tensor random_unitary_gate(Rng& rng) {
  const Matrix m = to_matrix(Tensor::random({4, 4}, rng), 1);
  return to_tensor(Matrix(qr_positive(m).Q), {2, 2, 2, 2});
}

}  // namespace

TEST(XxzGate, ZeroStepIsIdentity) {
  const Dense g = gate_matrix(xxz_gate(0.5, 0.0));
  EXPECT_LT((g - Dense::Identity(4, 4)).norm(), 1e-15);
}

TEST(XxzGate, Unitary) {
  for (double delta : {-1.3, 0.0, 0.5, 2.0}) {
    const Dense g = gate_matrix(xxz_gate(delta, 0.37));
    EXPECT_LT((g.adjoint() * g - Dense::Identity(4, 4)).norm(), 1e-13);
  }
}

TEST(XxzGate, MatchesSeriesExponential) {
  const Dense h = oracle::as_dense(xxz_bond_hamiltonian(0.5));
  const Dense ref = oracle::expm_hermitian(h, 0.1);
  EXPECT_LT((gate_matrix(xxz_gate(0.5, 0.1)) - ref).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(TrotterLayer, IdentityGate) {
  const Tensor id = to_tensor(Matrix(Matrix::Identity(4, 4)), {2, 2, 2, 2});
  for (Parity p : {Parity::even, Parity::odd}) {
    const MPO layer = trotter_layer_mpo(id, p);
    EXPECT_EQ(layer.bond_dim(0), 1u);
    EXPECT_EQ(layer.bond_dim(1), 1u);
    const Dense op = oracle::ring_operator(layer, 4);
    EXPECT_LT((op - Dense::Identity(16, 16)).norm(), 1e-13);
    Rng rng(1);
    const UniformMPS s = random_state(3, 2, 2, rng);
    EXPECT_NEAR(fidelity_with_mpo(s, s, layer), 1.0, 1e-12);
  }
}

TEST(TrotterLayer, BondStructure) {
  const Tensor g = xxz_gate(0.5, 0.1);
  const MPO even = trotter_layer_mpo(g, Parity::even);
  EXPECT_EQ(even.bond_dim(0), 1u);
  EXPECT_EQ(even.bond_dim(1), 4u);
  const MPO odd = trotter_layer_mpo(g, Parity::odd);
  EXPECT_EQ(odd.bond_dim(0), 4u);
  EXPECT_EQ(odd.bond_dim(1), 1u);
}

TEST(TrotterLayer, MatchesGateCircuit) {
  Rng rng(2);
  const Tensor g = random_unitary_gate(rng);
  for (Parity p : {Parity::even, Parity::odd}) {
    const Dense mpo_op = oracle::ring_operator(trotter_layer_mpo(g, p), 4);
    EXPECT_LT((mpo_op - layer_circuit(g, p, 4)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(TrotterStep, SecondOrderLocalError) {
  XXZParams p;
  p.delta = 0.5;
  p.dt = 0.05;
  const Dense exact = oracle::expm_hermitian(xxz_chain(8, 0.5), p.dt);
  const double err = (trotter_step_dense(p, 8) - exact).operatorNorm();
  EXPECT_LT(err, 5 * std::pow(p.dt, 3));
}

TEST(TrotterStep, SecondOrderSelfConvergence) {
  std::vector<double> dts{0.1, 0.05, 0.025}, diffs;
  for (double dt : dts) {
    XXZParams p;
    p.dt = dt;
    const Dense one = trotter_step_dense(p, 8);
    p.dt = dt / 2;
    const Dense half = trotter_step_dense(p, 8);
    diffs.push_back((one - half * half).operatorNorm());
  }
  const double slope = std::log(diffs[0] / diffs[2]) / std::log(dts[0] / dts[2]);
  EXPECT_GE(slope, 2.7);
  EXPECT_LE(diffs[1], 5 * std::pow(dts[1], 3));
}

TEST(TrotterStep, FirstOrderLayers) {
  XXZParams p;
  p.order = 1;
  EXPECT_EQ(trotter_step(p).size(), 2u);
  p.order = 3;
  EXPECT_THROW(trotter_step(p), std::invalid_argument);
}

TEST(GateLayer, ExactApplicationMatchesMpo) {
  Rng rng(3);
  const UniformMPS s = random_state(3, 2, 2, rng);
  const Tensor g = xxz_gate(0.5, 0.2);
  for (Parity p : {Parity::even, Parity::odd}) {
    const SchmidtTruncation r = apply_gate_layer(s, g, p, 100, 0.0);
    EXPECT_EQ(r.discarded_weight, 0.0);
    EXPECT_LT(canonical_residuals(r.state).max(), 1e-10);
    EXPECT_NEAR(fidelity_with_mpo(r.state, s, trotter_layer_mpo(g, p)), 1.0, 1e-10);
  }
}

TEST(GateLayer, TruncationKeepsRequestedBond) {
  Rng rng(4);
  const UniformMPS s = random_state(4, 2, 2, rng);
  const SchmidtTruncation r = apply_gate_layer(s, random_unitary_gate(rng), Parity::even, 5);
  EXPECT_EQ(r.state.bond_dim(1), 5u);
  EXPECT_EQ(r.state.bond_dim(0), 4u);
  EXPECT_GT(r.discarded_weight, 0.0);
}

TEST(Neel, Observables) {
  const UniformMPS s = neel_state();
  EXPECT_NEAR(expect_local(s, up_projector(), 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(expect_local(s, up_projector(), 1).real(), 0.0, 1e-15);
  EXPECT_NEAR(fidelity_per_site(s, translate(s, 1)), 0.0, 1e-15);
  EXPECT_LT(canonical_residuals(s).max(), 1e-15);
}

TEST(IsingMpo, FreeSpinLimit) {
  const MPO o = ising_mpo({1e-12, 1});
  const double h = 1.0 / std::sqrt(2.0);
  const UniformMPS flat = mixed_canonical(std::vector<Tensor>{Tensor({1, 2, 1}, {h, h})});
  EXPECT_NEAR(std::abs(mpo_eigenvalue_per_site(flat, o)), 2.0, 1e-10);
}

TEST(IsingMpo, FerromagnetHermitianSlices) {
  const MPO o = ising_mpo({0.5, 1});
  const Tensor& t = o.site(0);
  for (std::size_t l = 0; l < 2; ++l)
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) EXPECT_NEAR(std::abs(t({l, a, b, r}) - std::conj(t({l, b, a, r}))), 0.0, 1e-14);
}

TEST(IsingMpo, SublatticeRotationGivesFerromagnet) {
  const double beta = 1.01 * ising_beta_c();
  const MPO fm = ising_mpo({beta, 1});
  const MPO rotated = sublattice_gauge(sublattice_rotate(ising_mpo({beta, -1})));
  ASSERT_EQ(rotated.length(), 2u);
  for (std::size_t n = 0; n < 2; ++n) EXPECT_LT(max_abs_diff(rotated.site(n), fm.site(0)), 1e-12);
}

// Z of a 4 x 4 torus from the transfer MPO against the sum over 2^16 configurations.
TEST(IsingMpo, TorusPartitionFunction) {
  for (int coupling : {1, -1}) {
    const double beta = 0.37;
    const Dense row = oracle::ring_operator(ising_mpo({beta, coupling}), 4);
    const cplx z_mpo = Dense(row * row * row * row).trace();
    double z = 0.0;
    for (std::uint32_t cfg = 0; cfg < (1u << 16); ++cfg) {
      const auto spin = [&](int i, int j) { return ((cfg >> (((i + 4) % 4) * 4 + (j + 4) % 4)) & 1u) ? -1.0 : 1.0; };
      double e = 0.0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) e += spin(i, j) * (spin(i + 1, j) + spin(i, j + 1));
      z += std::exp(beta * coupling * e);
    }
    EXPECT_NEAR(z_mpo.real() / z, 1.0, 1e-10) << "coupling " << coupling;
    EXPECT_NEAR(z_mpo.imag() / z, 0.0, 1e-10);
  }
}

// nearest-neighbour correlation from two impurity tensors vs brute force
TEST(IsingMpo, ImpurityCorrelationOnTorus) {
  for (int coupling : {1, -1}) {
    const IsingParams p{0.41, coupling};
    const Tensor imp = ising_magnetization_tensor(p);
    const MPO o = ising_mpo(p);
    const Dense row = oracle::ring_operator(o, 4);
    const Dense row_one = oracle::ring_operator(MPO({imp, o.site(0), o.site(0), o.site(0)}), 4);
    const Dense row_two = oracle::ring_operator(MPO({imp, imp, o.site(0), o.site(0)}), 4);
    const cplx z = Dense(row * row * row * row).trace();
    const cplx one = Dense(row_one * row * row * row).trace();
    const cplx two = Dense(row_two * row * row * row).trace();
    double zb = 0.0, corr = 0.0;
    for (std::uint32_t cfg = 0; cfg < (1u << 16); ++cfg) {
      const auto spin = [&](int i, int j) { return ((cfg >> (((i + 4) % 4) * 4 + (j + 4) % 4)) & 1u) ? -1.0 : 1.0; };
      double e = 0.0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) e += spin(i, j) * (spin(i + 1, j) + spin(i, j + 1));
      const double w = std::exp(p.beta * coupling * e);
      zb += w;
      corr += w * spin(0, 0) * spin(0, 1);
    }
    EXPECT_NEAR(std::abs(one / z), 0.0, 1e-10);
    EXPECT_NEAR((two / z).real(), corr / zb, 1e-10);
  }
}

TEST(IsingMpo, RoundTripsThroughJson) {
  for (int c : {1, -1}) {
    const MPO o = ising_mpo({0.44, c});
    const MPO back = mpo_from_json(to_json(o));
    EXPECT_EQ(max_abs_diff(back.site(0), o.site(0)), 0.0);
  }
  const MPO layer = trotter_layer_mpo(xxz_gate(0.5, 0.05), Parity::odd);
  const MPO back = mpo_from_json(to_json(layer));
  for (std::size_t n = 0; n < 2; ++n) EXPECT_EQ(max_abs_diff(back.site(n), layer.site(n)), 0.0);
}

TEST(IsingParams, Validation) {
  EXPECT_THROW(ising_mpo({0.0, 1}), std::invalid_argument);
  EXPECT_THROW(ising_mpo({0.3, 2}), std::invalid_argument);
}

TEST(Onsager, Magnetization) {
  EXPECT_EQ(onsager_magnetization(0.9 * ising_beta_c()), 0.0);
  EXPECT_EQ(onsager_magnetization(ising_beta_c()), 0.0);
  const double b = 1.01 * ising_beta_c();
  const double m = onsager_magnetization(b);
  EXPECT_NEAR(m, std::pow(1.0 - std::pow(std::sinh(2 * b), -4), 0.125), 1e-15);
  EXPECT_NEAR(m, 0.69, 0.01);
}

TEST(Onsager, QuadratureSelfConvergence) {
  for (double rel : {0.5, 1.01, 2.0}) {
    const double b = rel * ising_beta_c();
    const double coarse = onsager_free_energy_fixed(b, 64), fine = onsager_free_energy_fixed(b, 128);
    EXPECT_LT(std::abs(coarse - fine), 1e-10) << rel;
    EXPECT_LT(std::abs(onsager_free_energy(b) - fine), 1e-10) << rel;
  }
}

// Double-integral form of the same free energy.
TEST(Onsager, MatchesDoubleIntegral) {
  using boost::math::quadrature::gauss_kronrod;
  for (double b : {0.3, 0.6}) {
    const double c = std::cosh(2 * b), s = std::sinh(2 * b);
    const auto inner = [&](double t1) {
      return gauss_kronrod<double, 31>::integrate(
          [&](double t2) { return std::log(c * c - s * (std::cos(t1) + std::cos(t2))); }, 0.0, std::numbers::pi, 10,
          1e-14);
    };
    const double ii = gauss_kronrod<double, 31>::integrate(inner, 0.0, std::numbers::pi, 10, 1e-14);
    const double minus_beta_f = std::log(2.0) + ii / (2 * std::numbers::pi * std::numbers::pi);
    EXPECT_NEAR(onsager_free_energy(b), -minus_beta_f / b, 1e-10);
  }
}

TEST(Onsager, HighTemperatureExpansion) {
  // -beta f = ln 2 + 2 ln cosh(beta) + t^4 + 2 t^6 + ...,  t = tanh(beta)
  const double b = 0.01, t = std::tanh(b);
  const double approx = -(std::log(2.0) + 2 * std::log(std::cosh(b)) + std::pow(t, 4)) / b;
  EXPECT_NEAR(onsager_free_energy(b), approx, 3 * std::pow(t, 6) / b);
}

TEST(ExactDiagonalization, InitialOffsetAndConservation) {
  const EdTrace tr = ed_evolve(10, 0.5, 1.0, 0.25);
  ASSERT_EQ(tr.times.size(), 5u);
  EXPECT_EQ(tr.offset[0], 0.0);
  EXPECT_LT(tr.sz_drift, 1e-12);
  EXPECT_GT(tr.offset.back(), 0.1);
}

TEST(ExactDiagonalization, MatchesDenseEvolution) {
  const std::size_t L = 6;
  const EdTrace tr = ed_evolve(L, 0.5, 1.0, 0.5);
  const Dense u = oracle::expm_hermitian(xxz_chain(L, 0.5), 1.0);
  // Neel with site 0 up: bits (site 0 most significant) 010101
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(64);
  psi(0b010101) = 1.0;
  const Eigen::VectorXcd out = u * psi;
  double down0 = 0.0;
  for (int s = 0; s < 64; ++s)
    if (s & 0b100000) down0 += std::norm(out(s));
  EXPECT_NEAR(tr.offset.back(), down0, 1e-12);
}

TEST(ExactDiagonalization, FiniteSizeConvergence) {
  const EdTrace a = ed_evolve(12, 0.5, 1.0, 0.5);
  const EdTrace b = ed_evolve(14, 0.5, 1.0, 0.5);
  EXPECT_LT(std::abs(a.offset.back() - b.offset.back()), 1e-4);
}

TEST(EvolveNeel, ShortRunMatchesEd) {
  EvolveConfig c;
  c.xxz.dt = 0.05;
  c.t_max = 0.5;
  c.chi = 16;
  c.sample_every = 2;
  const auto rows = evolve_neel(c);
  const EdTrace ed = ed_evolve(12, 0.5, 0.5, 0.1);
  ASSERT_EQ(rows.size(), ed.times.size());
  EXPECT_EQ(rows[0].offset, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_NEAR(rows[i].t, ed.times[i], 1e-12);
    EXPECT_NEAR(rows[i].offset, ed.offset[i], 1e-4);
    EXPECT_TRUE(rows[i].converged);
  }
}
