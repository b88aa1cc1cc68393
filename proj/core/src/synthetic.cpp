#include "umps/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include <Eigen/LU>

#include "umps/canonical.hpp"
#include "umps/linalg.hpp"

namespace umps {

namespace {

Matrix random_unitary(std::size_t n, Rng& rng) {
  const Tensor g = Tensor::random({n, n}, rng);
  return qr_positive(to_matrix(g, 1)).Q;
}

}  // namespace

UniformMPS random_state(std::span<const std::size_t> chi, std::size_t d, Rng& rng, double decay) {
  const std::size_t L = chi.size();
  if (L == 0 || d == 0) throw ShapeError("random_state: empty unit cell or physical dim");
  std::vector<Tensor> sites;
  for (std::size_t n = 0; n < L; ++n) {
    const std::size_t cl = chi[n], cr = chi[(n + 1) % L];
    if (cr > cl * d) throw ShapeError("random_state: bond " + std::to_string(n + 1) + " exceeds chi*d of its left bond");
    Tensor a = Tensor::random({cl, d, cr}, rng);
    if (decay > 0.0) {
      for (std::size_t i = 0; i < cl; ++i)
        for (std::size_t p = 0; p < d; ++p)
          for (std::size_t j = 0; j < cr; ++j)
            a[(i * d + p) * cr + j] *= std::exp(-decay * (static_cast<double>(i) / static_cast<double>(cl) +
                                                          static_cast<double>(j) / static_cast<double>(cr)));
    }
    sites.push_back(std::move(a));
  }
  return mixed_canonical(sites);
}

UniformMPS random_state(std::size_t chi, std::size_t d, std::size_t length, Rng& rng, double decay) {
  const std::vector<std::size_t> dims(length, chi);
  return random_state(dims, d, rng, decay);
}

UniformMPS state_with_spectrum(std::span<const double> schmidt, std::size_t d, Rng& rng) {
  const std::size_t chi = schmidt.size();
  if (chi == 0 || d < 2) throw ShapeError("state_with_spectrum: need chi >= 1 and d >= 2");
  std::vector<double> s(schmidt.begin(), schmidt.end());
  std::sort(s.begin(), s.end(), std::greater<>());
  if (!(s.back() > 0.0)) throw std::invalid_argument("state_with_spectrum: Schmidt values must be positive");
  const double nrm = std::sqrt(std::inner_product(s.begin(), s.end(), s.begin(), 0.0));
  std::vector<double> rho(chi);
  for (std::size_t i = 0; i < chi; ++i) {
    s[i] /= nrm;
    rho[i] = s[i] * s[i];
  }
  // |x_i|^2 rho_i = t keeps diag(rho) a right fixed point of the cyclic shift.
  const double t = rho.back() / 2.0;
  Tensor al({chi, d, chi});
  for (std::size_t i = 0; i < chi; ++i) {
    const double x = std::sqrt(t / rho[i]);
    const double dg = std::sqrt(1.0 - x * x);
    al({i, 0, i}) += dg;
    al({(i + 1) % chi, 1, i}) += x;
  }
  const Matrix u = random_unitary(d, rng);
  const Tensor ut = to_tensor(u);
  // rotate physical index: AL'(l,p,r) = sum_q u(p,q) AL(l,q,r)
  al = contract(ut, al, {{1, 1}}).permuted({1, 0, 2});

  Tensor c({chi, chi});
  for (std::size_t i = 0; i < chi; ++i) c({i, i}) = s[i];
  Tensor ar = al;
  for (std::size_t i = 0; i < chi; ++i)
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t j = 0; j < chi; ++j) ar[(i * d + p) * chi + j] *= s[j] / s[i];
  return UniformMPS({al}, {ar}, {c});
}

std::vector<Tensor> random_gauge(const UniformMPS& state, Rng& rng, double strength) {
  const std::size_t L = state.length();
  std::vector<Matrix> g(L), ginv(L);
  for (std::size_t n = 0; n < L; ++n) {
    const std::size_t chi = state.bond_dim(n);
    const Matrix m = Matrix::Identity(chi, chi) + strength * to_matrix(Tensor::random({chi, chi}, rng), 1) /
                                                      std::sqrt(static_cast<double>(chi));
    g[n] = m;
    ginv[n] = m.inverse();
  }
  std::vector<Tensor> out;
  for (std::size_t n = 0; n < L; ++n) {
    Tensor a = contract(to_tensor(g[n]), state.al(n), {{1, 0}});
    a = contract(a, to_tensor(ginv[(n + 1) % L]), {{2, 0}});
    out.push_back(std::move(a));
  }
  return out;
}

MPO random_mpo(std::span<const std::size_t> D, std::size_t d, Rng& rng) {
  const std::size_t L = D.size();
  std::vector<Tensor> sites;
  for (std::size_t n = 0; n < L; ++n) {
    Tensor o = Tensor::random({D[n], d, d, D[(n + 1) % L]}, rng);
    o /= std::sqrt(static_cast<double>(D[n] * d));
    sites.push_back(std::move(o));
  }
  return MPO(std::move(sites));
}

}  // namespace umps
