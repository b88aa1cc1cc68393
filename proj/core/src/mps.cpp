#include "umps/mps.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "umps/linalg.hpp"

namespace umps {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

}  // namespace

UniformMPS::UniformMPS(std::vector<Tensor> al, std::vector<Tensor> ar, std::vector<Tensor> c)
    : al_(std::move(al)), ar_(std::move(ar)), c_(std::move(c)) {
  const std::size_t L = al_.size();
  require(L > 0, "UniformMPS: empty unit cell");
  require(ar_.size() == L && c_.size() == L, "UniformMPS: AL, AR and C must have one entry per site");
  for (std::size_t n = 0; n < L; ++n) {
    const auto& l = al_[n].shape();
    const auto& r = ar_[n].shape();
    const auto& cn = c_[n].shape();
    const std::string at = " at site " + std::to_string(n);
    require(l.size() == 3 && r.size() == 3, "UniformMPS: site tensors must have rank 3" + at);
    require(l == r, "UniformMPS: AL and AR shapes differ" + at);
    require(cn.size() == 2 && cn[0] == l[2] && cn[1] == l[2], "UniformMPS: C shape does not match right bond" + at);
    const auto& next = al_[(n + 1) % L].shape();
    require(next.size() == 3 && next[0] == l[2], "UniformMPS: bond dimension mismatch between sites " +
                                                     std::to_string(n) + " and " + std::to_string((n + 1) % L));
  }
}

Tensor UniformMPS::ac(std::size_t n) const { return contract(al(n), c(n), {{2, 0}}); }

std::vector<std::size_t> UniformMPS::bond_dims() const {
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < length(); ++n) out.push_back(bond_dim(n));
  return out;
}

std::vector<std::size_t> UniformMPS::phys_dims() const {
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < length(); ++n) out.push_back(phys_dim(n));
  return out;
}

std::size_t UniformMPS::max_bond_dim() const {
  const auto dims = bond_dims();
  return *std::max_element(dims.begin(), dims.end());
}

double CanonicalResiduals::max() const { return std::max({left, right, gauge, norm}); }

CanonicalResiduals canonical_residuals(const UniformMPS& state) {
  CanonicalResiduals res;
  for (std::size_t n = 0; n < state.length(); ++n) {
    const Matrix al = to_matrix(state.al(n), 2);
    const Matrix ar = to_matrix(state.ar(n), 1);
    res.left = std::max(res.left, (al.adjoint() * al - Matrix::Identity(al.cols(), al.cols())).norm());
    res.right = std::max(res.right, (ar * ar.adjoint() - Matrix::Identity(ar.rows(), ar.rows())).norm());
    const Tensor lhs = contract(state.al(n), state.c(n), {{2, 0}});
    const Tensor rhs = contract(state.c_left(n), state.ar(n), {{1, 0}});
    res.gauge = std::max(res.gauge, (lhs - rhs).norm());
    res.norm = std::max(res.norm, std::abs(state.c(n).norm() - 1.0));
  }
  return res;
}

MPO::MPO(std::vector<Tensor> sites) : o_(std::move(sites)) {
  const std::size_t L = o_.size();
  require(L > 0, "MPO: empty unit cell");
  for (std::size_t n = 0; n < L; ++n) {
    const auto& s = o_[n].shape();
    require(s.size() == 4, "MPO: site tensors must have rank 4 at site " + std::to_string(n));
    const auto& next = o_[(n + 1) % L].shape();
    require(next.size() == 4 && next[0] == s[3], "MPO: bond dimension mismatch between sites " +
                                                     std::to_string(n) + " and " + std::to_string((n + 1) % L));
  }
}

MPO MPO::identity(std::span<const std::size_t> phys_dims) {
  std::vector<Tensor> sites;
  for (auto d : phys_dims) sites.push_back(Tensor::identity(d).reshaped({1, d, d, 1}));
  return MPO(std::move(sites));
}

std::vector<std::size_t> MPO::bond_dims() const {
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < length(); ++n) out.push_back(bond_dim(n));
  return out;
}

std::size_t MPO::max_bond_dim() const {
  const auto dims = bond_dims();
  return *std::max_element(dims.begin(), dims.end());
}

std::size_t lcm_length(std::size_t a, std::size_t b) { return std::lcm(a, b); }

std::vector<std::size_t> per_bond(std::span<const std::size_t> dims, std::size_t length) {
  if (dims.empty() || length % dims.size() != 0)
    throw std::invalid_argument("per_bond: " + std::to_string(dims.size()) + " bond dims do not tile a unit cell of " +
                                std::to_string(length));
  std::vector<std::size_t> out(length);
  for (std::size_t n = 0; n < length; ++n) {
    out[n] = dims[n % dims.size()];
    if (out[n] == 0) throw std::invalid_argument("per_bond: bond dims must be positive");
  }
  return out;
}

std::vector<Tensor> extend(std::span<const Tensor> sites, std::size_t length) {
  if (sites.empty() || length % sites.size() != 0)
    throw ShapeError("extend: length " + std::to_string(length) + " is not a multiple of the unit cell");
  std::vector<Tensor> out;
  out.reserve(length);
  for (std::size_t n = 0; n < length; ++n) out.push_back(sites[n % sites.size()]);
  return out;
}

UniformMPS extend(const UniformMPS& state, std::size_t length) {
  if (length == state.length()) return state;
  return UniformMPS(extend(state.al(), length), extend(state.ar(), length), extend(state.c(), length));
}

MPO extend(const MPO& mpo, std::size_t length) {
  if (length == mpo.length()) return mpo;
  return MPO(extend(mpo.sites(), length));
}

UniformMPS translate(const UniformMPS& state, std::size_t shift) {
  const std::size_t L = state.length();
  std::vector<Tensor> al, ar, c;
  for (std::size_t n = 0; n < L; ++n) {
    al.push_back(state.al(n + shift));
    ar.push_back(state.ar(n + shift));
    c.push_back(state.c(n + shift));
  }
  return UniformMPS(std::move(al), std::move(ar), std::move(c));
}

MPO adjoint_product(const MPO& mpo) {
  std::vector<Tensor> sites;
  for (const auto& o : mpo.sites()) {
    const auto& s = o.shape();
    // (w1, r, p, w1') x (w2, r, q, w2') -> (w1, p, w1', w2, q, w2')
    Tensor t = contract(o.conj(), o, {{1, 1}});
    t = t.permuted({0, 3, 1, 4, 2, 5}).reshaped({s[0] * s[0], s[2], s[2], s[3] * s[3]});
    sites.push_back(std::move(t));
  }
  return MPO(std::move(sites));
}

Tensor apply_site(const Tensor& op, const Tensor& a) {
  const auto& so = op.shape();
  const auto& sa = a.shape();
  if (so[2] != sa[1]) throw ShapeError("apply_site: physical dimension mismatch");
  // (w, p, q, w') x (m, q, m') -> (w, p, w', m, m') -> (m, w, p, m', w')
  Tensor t = contract(op, a, {{2, 1}});
  return t.permuted({3, 0, 1, 4, 2}).reshaped({sa[0] * so[0], so[1], sa[2] * so[3]});
}

UniformMPS apply_diagonal(const UniformMPS& state, std::span<const cplx> phases, std::span<const bool> mask) {
  std::vector<Tensor> al, ar, c;
  for (std::size_t n = 0; n < state.length(); ++n) {
    Tensor l = state.al(n), r = state.ar(n);
    if (mask[n % mask.size()]) {
      const auto& s = l.shape();
      if (phases.size() != s[1]) throw ShapeError("apply_diagonal: phase count does not match physical dimension");
      for (std::size_t i = 0; i < s[0]; ++i)
        for (std::size_t p = 0; p < s[1]; ++p)
          for (std::size_t j = 0; j < s[2]; ++j) {
            const std::size_t k = (i * s[1] + p) * s[2] + j;
            l[k] *= phases[p];
            r[k] *= phases[p];
          }
    }
    al.push_back(std::move(l));
    ar.push_back(std::move(r));
    c.push_back(state.c(n));
  }
  return UniformMPS(std::move(al), std::move(ar), std::move(c));
}

}  // namespace umps
