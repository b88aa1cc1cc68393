#include "umps/observables.hpp"

#include <cmath>

#include "umps/eig.hpp"
#include "umps/transfer.hpp"

namespace umps {

namespace {

EigOptions eig_options(double tol) {
  EigOptions eo;
  eo.tol = tol;
  return eo;
}

Tensor center_value(const MixedEnvironment& env, const UniformMPS& top, const UniformMPS& bottom, const Tensor& op,
                    std::size_t n) {
  const Tensor& gl = env.gl[n];
  const Tensor& gr = env.gr[n];
  const Tensor x = contract(gl, bottom.ac(n), {{2, 0}});          // (t,w,q,b')
  const Tensor y = contract(x, op, {{1, 0}, {2, 2}});             // (t,b',p,w')
  const Tensor z = contract(top.ac(n).conj(), y, {{0, 0}, {1, 2}});  // (t',b',w')
  return contract(z, gr, {{0, 0}, {2, 1}, {1, 2}});
}

}  // namespace

double fidelity_per_site(const UniformMPS& a, const UniformMPS& b, double tol) {
  const std::size_t L = lcm_length(a.length(), b.length());
  const UniformMPS ta = extend(a, L), tb = extend(b, L);
  const LinearMap map = mixed_transfer_map(ta, tb, Side::left);
  const Shape shape{ta.bond_dim(0), 1, tb.bond_dim(0)};
  std::vector<cplx> guess(num_elements(shape), 0.0);
  for (std::size_t i = 0; i < std::min(shape[0], shape[2]); ++i) guess[i * shape[2] + i] = 1.0;
  const EigResult r = leading_eig(map, guess, eig_options(tol));
  const double cell = std::abs(r.value);
  return cell > 0.0 ? std::pow(cell, 1.0 / static_cast<double>(L)) : 0.0;
}

cplx expect_local(const UniformMPS& state, const Tensor& op, std::size_t n) {
  const Tensor ac = state.ac(n);
  const std::size_t d = ac.shape()[1];
  if (op.shape() != Shape{d, d}) throw ShapeError("expect_local: operator shape does not match physical dim");
  const Tensor x = contract(op, ac, {{1, 1}});                // (p, l, r)
  const Tensor y = contract(ac.conj(), x, {{1, 0}, {0, 1}, {2, 2}});
  return y[0];
}

cplx mpo_eigenvalue_per_site(const UniformMPS& state, const MPO& mpo, double tol) {
  const std::size_t L = lcm_length(state.length(), mpo.length());
  const UniformMPS s = extend(state, L);
  const MPO o = extend(mpo, L);
  EnvOptions eo;
  eo.tol = tol;
  return environments(s, s, &o, eo).lambda;
}

double mpo_norm_per_site(const UniformMPS& state, const MPO& mpo, double tol) {
  if (state.length() != mpo.length()) throw ShapeError("mpo_norm_per_site: unit cells differ");
  const LinearMap map = double_layer_map(state.al(), mpo.sites(), Side::left);
  const std::size_t chi = state.bond_dim(0), D = mpo.bond_dim(0);
  std::vector<cplx> guess(map.dim, 0.0);
  for (std::size_t i = 0; i < chi; ++i)
    for (std::size_t w = 0; w < D; ++w) guess[((i * D + w) * D + w) * chi + i] = 1.0;
  const EigResult r = leading_eig(map, guess, eig_options(tol));
  return std::pow(std::abs(r.value), 1.0 / static_cast<double>(state.length()));
}

double fidelity_with_mpo(const UniformMPS& top, const UniformMPS& bottom, const MPO& mpo, double tol) {
  EnvOptions eo;
  eo.tol = tol;
  const MixedEnvironment env = environments(top, bottom, &mpo, eo);
  return std::abs(env.lambda) / std::sqrt(mpo_norm_per_site(bottom, mpo, tol));
}

cplx impurity_ratio(const MixedEnvironment& env, const UniformMPS& top, const UniformMPS& bottom, const MPO& mpo,
                    const Tensor& impurity, std::size_t n) {
  n %= env.length();
  if (impurity.shape() != mpo.site(n).shape()) throw ShapeError("impurity_ratio: impurity shape differs from MPO");
  const cplx num = center_value(env, top, bottom, impurity, n)[0];
  const cplx den = center_value(env, top, bottom, mpo.site(n), n)[0];
  if (std::abs(den) == 0.0) throw NumericalError("impurity_ratio: vanishing reference value");
  return num / den;
}

}  // namespace umps
