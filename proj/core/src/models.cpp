#include "umps/models.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "umps/canonical.hpp"
#include "umps/linalg.hpp"
#include "umps/observables.hpp"
#include "umps/vomps.hpp"

namespace umps {

void XXZParams::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("XXZParams: dt must be positive");
  if (order != 1 && order != 2) throw std::invalid_argument("XXZParams: order must be 1 or 2");
}

Tensor xxz_bond_hamiltonian(double delta) {
  Tensor h({4, 4});
  h({0, 0}) = delta / 4;
  h({3, 3}) = delta / 4;
  h({1, 1}) = -delta / 4;
  h({2, 2}) = -delta / 4;
  h({1, 2}) = 0.5;
  h({2, 1}) = 0.5;
  return h;
}

Tensor xxz_gate(double delta, double dt) {
  const Matrix h = to_matrix(xxz_bond_hamiltonian(delta), 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXcd ph(4);
  for (int i = 0; i < 4; ++i) ph(i) = std::exp(cplx(0.0, -dt * es.eigenvalues()(i)));
  const Matrix u = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
  return to_tensor(u, {2, 2, 2, 2});
}

MPO trotter_layer_mpo(const Tensor& gate, Parity parity) {
  const auto& s = gate.shape();
  if (s.size() != 4 || s[0] != s[2] || s[1] != s[3]) throw ShapeError("trotter_layer_mpo: gate must be (d1, d2, d1, d2)");
  const std::size_t d1 = s[0], d2 = s[1];
  // (o1, i1) x (o2, i2)
  const SVDResult f = svd(to_matrix(gate.permuted({0, 2, 1, 3}), 2));
  Eigen::Index k = 0;
  while (k < f.S.size() && f.S(k) > 1e-14 * f.S(0)) ++k;
  k = std::max<Eigen::Index>(k, 1);
  const Eigen::VectorXcd root = f.S.head(k).cwiseSqrt().cast<cplx>();
  const Matrix a = f.U.leftCols(k) * root.asDiagonal();
  const Matrix b = root.asDiagonal() * f.V.leftCols(k).adjoint();
  const auto kk = static_cast<std::size_t>(k);
  Tensor first = to_tensor(a, {1, d1, d1, kk});
  Tensor second = to_tensor(b, {kk, d2, d2, 1});
  if (parity == Parity::even) return MPO({std::move(first), std::move(second)});
  return MPO({std::move(second), std::move(first)});
}

std::vector<GateLayer> trotter_gates(const XXZParams& p) {
  p.validate();
  if (p.order == 1) return {{xxz_gate(p.delta, p.dt), Parity::even}, {xxz_gate(p.delta, p.dt), Parity::odd}};
  const Tensor half = xxz_gate(p.delta, p.dt / 2);
  return {{half, Parity::even}, {xxz_gate(p.delta, p.dt), Parity::odd}, {half, Parity::even}};
}

std::vector<MPO> trotter_step(const XXZParams& p) {
  std::vector<MPO> out;
  for (const auto& g : trotter_gates(p)) out.push_back(trotter_layer_mpo(g.gate, g.parity));
  return out;
}

SchmidtTruncation apply_gate_layer(const UniformMPS& state, const Tensor& gate, Parity parity, std::size_t max_chi,
                                   double relative_cutoff) {
  if (state.length() > 2 || 2 % state.length() != 0)
    throw ShapeError("apply_gate_layer: state must have a one- or two-site unit cell");
  UniformMPS s = extend(state, 2);
  if (parity == Parity::odd) s = translate(s, 1);
  const std::size_t d0 = s.phys_dim(0), d1 = s.phys_dim(1);
  if (gate.shape() != Shape{d0, d1, d0, d1}) throw ShapeError("apply_gate_layer: gate does not match physical dims");

  const Tensor pair = contract(s.ar(0), s.ar(1), {{2, 0}});                          // (a, s0, s1, b)
  const Tensor gated = contract(gate, pair, {{2, 1}, {3, 2}}).permuted({2, 0, 1, 3});  // (a, o0, o1, b)
  const Tensor theta = contract(s.c(1), gated, {{1, 0}});
  const SVDResult f = svd(to_matrix(theta, 2));
  const auto full = static_cast<std::size_t>(f.S.size());
  std::size_t keep = std::min(max_chi, full);
  while (keep > 1 && f.S(static_cast<Eigen::Index>(keep) - 1) <= relative_cutoff * f.S(0)) --keep;

  SchmidtTruncation out{state, 0.0, false, {}};
  const double total = f.S.squaredNorm();
  if (keep < full) {
    out.discarded_weight = f.S.tail(static_cast<Eigen::Index>(full - keep)).squaredNorm() / total;
    const double last = f.S(static_cast<Eigen::Index>(keep) - 1), next = f.S(static_cast<Eigen::Index>(keep));
    out.degenerate_cut = last - next <= 1e-12 * f.S(0);
  }
  const Matrix y = f.V.leftCols(static_cast<Eigen::Index>(keep));
  const std::size_t chi = s.bond_dim(0);
  Tensor first = to_tensor(Matrix(to_matrix(gated, 2) * y), {chi, d0, keep});
  Tensor second = to_tensor(Matrix(y.adjoint()), {keep, d1, s.bond_dim(2)});
  UniformMPS next = mixed_canonical(std::vector<Tensor>{std::move(first), std::move(second)});
  if (parity == Parity::odd) next = translate(next, 1);
  out.kept = next.bond_dims();
  out.state = std::move(next);
  return out;
}

UniformMPS neel_state() {
  const Tensor up({1, 2, 1}, {1.0, 0.0});
  const Tensor down({1, 2, 1}, {0.0, 1.0});
  const Tensor one({1, 1}, {1.0});
  return UniformMPS({up, down}, {up, down}, {one, one});
}

Tensor up_projector() { return Tensor({2, 2}, {1.0, 0.0, 0.0, 0.0}); }

// ---- Ising -----------------------------------------------------------------

void IsingParams::validate() const {
  if (!(beta > 0.0)) throw std::invalid_argument("IsingParams: beta must be positive");
  if (coupling != 1 && coupling != -1) throw std::invalid_argument("IsingParams: coupling must be +1 or -1");
}

double ising_beta_c() { return std::log(1.0 + std::sqrt(2.0)) / 2.0; }

namespace {

struct WeightSplit {
  Eigen::Matrix2d q, qs;  // W = q * qs
};

WeightSplit split_weights(double beta, int coupling) {
  Eigen::Matrix2d w;
  const double same = std::exp(beta * coupling), diff = std::exp(-beta * coupling);
  w << same, diff, diff, same;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(w);
  const Eigen::Vector2d lam = es.eigenvalues();
  const Eigen::Vector2d root = lam.cwiseAbs().cwiseSqrt();
  const Eigen::Vector2d sign(lam(0) < 0 ? -1.0 : 1.0, lam(1) < 0 ? -1.0 : 1.0);
  const Eigen::Matrix2d& e = es.eigenvectors();
  WeightSplit out;
  out.q = e * root.asDiagonal() * e.transpose();
  out.qs = out.q * e * sign.asDiagonal() * e.transpose();
  return out;
}

Tensor ising_site(const IsingParams& p, bool with_spin) {
  p.validate();
  const WeightSplit w = split_weights(p.beta, p.coupling);
  Tensor t({2, 2, 2, 2});
  for (std::size_t l = 0; l < 2; ++l)
    for (std::size_t u = 0; u < 2; ++u)
      for (std::size_t d = 0; d < 2; ++d)
        for (std::size_t r = 0; r < 2; ++r) {
          double acc = 0.0;
          for (int s = 0; s < 2; ++s) {
            const double spin = with_spin ? (s == 0 ? 1.0 : -1.0) : 1.0;
            acc += spin * w.q(s, l) * w.q(s, u) * w.qs(s, d) * w.qs(s, r);
          }
          t({l, u, d, r}) = acc;
        }
  return t;
}

}  // namespace

MPO ising_mpo(const IsingParams& p) { return MPO({ising_site(p, false)}); }

Tensor ising_magnetization_tensor(const IsingParams& p) { return ising_site(p, true); }

MPO flip_physical(const MPO& mpo, const std::vector<bool>& out_mask, const std::vector<bool>& in_mask) {
  if (out_mask.size() != in_mask.size() || out_mask.empty()) throw std::invalid_argument("flip_physical: mask sizes");
  const std::size_t L = lcm_length(mpo.length(), out_mask.size());
  const MPO o = extend(mpo, L);
  std::vector<Tensor> sites;
  for (std::size_t n = 0; n < L; ++n) {
    const Tensor& t = o.site(n);
    const auto& s = t.shape();
    if (s[1] != 2 || s[2] != 2) throw ShapeError("flip_physical: needs physical dimension 2");
    const bool fo = out_mask[n % out_mask.size()], fi = in_mask[n % in_mask.size()];
    Tensor f(s);
    for (std::size_t l = 0; l < s[0]; ++l)
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b)
          for (std::size_t r = 0; r < s[3]; ++r) f({l, a, b, r}) = t({l, fo ? 1 - a : a, fi ? 1 - b : b, r});
    sites.push_back(std::move(f));
  }
  return MPO(std::move(sites));
}

UniformMPS flip_sites(const UniformMPS& state, const std::vector<bool>& mask) {
  if (mask.empty()) throw std::invalid_argument("flip_sites: empty mask");
  const std::size_t L = lcm_length(state.length(), mask.size());
  const UniformMPS s = extend(state, L);
  const auto flip = [](const Tensor& a) {
    const auto& sh = a.shape();
    if (sh[1] != 2) throw ShapeError("flip_sites: needs physical dimension 2");
    Tensor f(sh);
    for (std::size_t i = 0; i < sh[0]; ++i)
      for (std::size_t p = 0; p < 2; ++p)
        for (std::size_t j = 0; j < sh[2]; ++j) f({i, p, j}) = a({i, 1 - p, j});
    return f;
  };
  std::vector<Tensor> al, ar, c;
  for (std::size_t n = 0; n < L; ++n) {
    const bool f = mask[n % mask.size()];
    al.push_back(f ? flip(s.al(n)) : s.al(n));
    ar.push_back(f ? flip(s.ar(n)) : s.ar(n));
    c.push_back(s.c(n));
  }
  return UniformMPS(std::move(al), std::move(ar), std::move(c));
}

MPO sublattice_rotate(const MPO& afm) { return flip_physical(afm, {false, true}, {true, false}); }

MPO sublattice_gauge(const MPO& rotated) {
  const std::size_t L = rotated.length();
  if (L % 2 != 0) throw ShapeError("sublattice_gauge: needs an even unit cell");
  std::vector<Tensor> sites;
  for (std::size_t n = 0; n < L; ++n) {
    const Tensor& t = rotated.site(n);
    const auto& s = t.shape();
    if (s[0] != 2 || s[3] != 2) throw ShapeError("sublattice_gauge: needs MPO bond dimension 2");
    Tensor g(s);
    const bool right = n % 2 == 0, left = n % 2 == 1;
    for (std::size_t l = 0; l < 2; ++l)
      for (std::size_t a = 0; a < s[1]; ++a)
        for (std::size_t b = 0; b < s[2]; ++b)
          for (std::size_t r = 0; r < 2; ++r) g({l, a, b, r}) = t({left ? 1 - l : l, a, b, right ? 1 - r : r});
    sites.push_back(std::move(g));
  }
  return MPO(std::move(sites));
}

namespace {

struct OnsagerIntegrand {
  double k2;
  double operator()(double theta) const {
    const double s = std::sin(theta);
    return std::log(0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - k2 * s * s))));
  }
};

double onsager_prefix(double beta, double integral) {
  const double c = std::cosh(2 * beta);
  return -(std::log(2.0 * c) + integral / std::numbers::pi) / beta;
}

OnsagerIntegrand onsager_integrand(double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("onsager: beta must be positive");
  const double k = 2.0 * std::sinh(2 * beta) / std::pow(std::cosh(2 * beta), 2);
  return {k * k};
}

}  // namespace

double onsager_free_energy(double beta, double tol) {
  const OnsagerIntegrand g = onsager_integrand(beta);
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, std::numbers::pi / 2, 30, tol);
  return onsager_prefix(beta, integral);
}

double onsager_free_energy_fixed(double beta, std::size_t panels) {
  if (panels == 0) throw std::invalid_argument("onsager_free_energy_fixed: panels must be positive");
  const OnsagerIntegrand g = onsager_integrand(beta);
  const double h = std::numbers::pi / 2 / static_cast<double>(panels);
  double integral = 0.0;
  for (std::size_t i = 0; i < panels; ++i)
    integral += boost::math::quadrature::gauss<double, 20>::integrate(g, h * static_cast<double>(i),
                                                                       h * static_cast<double>(i + 1));
  return onsager_prefix(beta, integral);
}

double onsager_magnetization(double beta) {
  if (beta <= ising_beta_c()) return 0.0;
  return std::pow(1.0 - std::pow(std::sinh(2 * beta), -4), 0.125);
}

// ---- Trotter evolution -------------------------------------------------------

std::vector<EvolveRow> evolve_neel(const EvolveConfig& cfg) {
  cfg.xxz.validate();
  if (cfg.chi == 0) throw std::invalid_argument("evolve_neel: chi must be positive");
  const auto steps = static_cast<std::size_t>(std::llround(cfg.t_max / cfg.xxz.dt));
  const std::vector<GateLayer> layers = trotter_gates(cfg.xxz);
  std::vector<MPO> mpos;
  for (const auto& g : layers) mpos.push_back(trotter_layer_mpo(g.gate, g.parity));

  UniformMPS state = neel_state();
  const Tensor proj = up_projector();
  std::vector<EvolveRow> rows;
  rows.push_back({0.0, 1.0 - expect_local(state, proj, 0).real(), 0.0, state.max_bond_dim(), true});
  for (std::size_t step = 1; step <= steps; ++step) {
    double eps = 0.0;
    bool converged = true;
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const SchmidtTruncation seed = apply_gate_layer(state, layers[i].gate, layers[i].parity, cfg.chi);
      VompsConfig vc;
      vc.target_chi = seed.state.bond_dims();
      vc.eta = cfg.eta;
      vc.max_iter = cfg.max_iter;
      vc.seed = cfg.seed;
      vc.init = InitStrategy::provided;
      vc.initial = seed.state;
      vc.norm_density = 1.0;  // unitary layer
      VompsResult r = vomps_truncate(state, vc, &mpos[i]);
      eps = r.report.final_epsilon;
      converged = converged && r.report.converged;
      state = std::move(r.state);
    }
    if (step % cfg.sample_every == 0 || step == steps) {
      rows.push_back({static_cast<double>(step) * cfg.xxz.dt, 1.0 - expect_local(state, proj, 0).real(), eps,
                      state.max_bond_dim(), converged});
    }
  }
  return rows;
}

}  // namespace umps
