#include "umps/canonical.hpp"

#include <algorithm>
#include <cmath>

#include "umps/eig.hpp"
#include "umps/linalg.hpp"
#include "umps/transfer.hpp"

namespace umps {

namespace {

void check_cell(std::span<const Tensor> sites, const char* who) {
  const std::size_t L = sites.size();
  if (L == 0) throw ShapeError(std::string(who) + ": empty unit cell");
  for (std::size_t n = 0; n < L; ++n) {
    if (sites[n].rank() != 3) throw ShapeError(std::string(who) + ": site " + std::to_string(n) + " is not rank 3");
    if (sites[n].shape()[2] != sites[(n + 1) % L].shape()[0])
      throw ShapeError(std::string(who) + ": bond mismatch after site " + std::to_string(n));
  }
}

Matrix unit(Matrix m) {
  const double nrm = m.norm();
  if (!(nrm > 0.0)) throw NumericalError("orthonormalize: gauge matrix vanished");
  return m / nrm;
}

}  // namespace

LeftOrtho left_orthonormalize(std::span<const Tensor> sites, const OrthoOptions& options, const Tensor& guess) {
  check_cell(sites, "left_orthonormalize");
  const std::size_t L = sites.size();
  const auto chi0 = static_cast<Eigen::Index>(sites[0].shape()[0]);

  Matrix g = guess.empty() ? Matrix(Matrix::Identity(chi0, chi0)) : to_matrix(guess, 1);
  if (g.rows() != chi0 || g.cols() != chi0) throw ShapeError("left_orthonormalize: guess has the wrong shape");
  g = unit(g);

  LeftOrtho out;
  out.al.resize(L);
  out.gauge.resize(L);
  for (std::size_t sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    const Matrix g0 = g;
    out.rank_deficient = false;
    for (std::size_t n = 0; n < L; ++n) {
      const auto& s = sites[n].shape();
      out.gauge[n] = to_tensor(g);
      const Matrix m = g * to_matrix(sites[n], 1);
      const Matrix block = Eigen::Map<const Matrix>(m.data(), static_cast<Eigen::Index>(s[0] * s[1]),
                                                    static_cast<Eigen::Index>(s[2]));
      QRResult qr = qr_positive(block);
      out.rank_deficient = out.rank_deficient || qr.rank_deficient;
      out.al[n] = to_tensor(qr.Q, {s[0], s[1], s[2]});
      g = unit(qr.R);
    }
    out.sweeps = sweep;
    out.delta = (g - g0).norm();
    if (out.delta <= options.tol) {
      out.converged = true;
      break;
    }
    // jump towards the fixed point of X -> sum_p AL^dag X A
    const LinearMap map = transfer_map(out.al, sites, {}, Side::left);
    EigOptions eo;
    eo.tol = std::clamp(out.delta * 1e-2, 1e-14, 1e-6);
    eo.krylov_dim = 20;
    eo.max_restarts = 20;
    const EigResult fixed = leading_eig(map, std::span<const cplx>(g.data(), static_cast<std::size_t>(g.size())), eo);
    const Matrix x = Eigen::Map<const Matrix>(fixed.vector.data(), chi0, chi0);
    if (x.allFinite() && x.norm() > 0.0) {
      const QRResult qr = qr_positive(x);
      if (!qr.rank_deficient) g = unit(qr.R);
    }
  }
  out.gauge[0] = to_tensor(g);
  return out;
}

RightOrtho right_orthonormalize(std::span<const Tensor> sites, const OrthoOptions& options, const Tensor& guess) {
  check_cell(sites, "right_orthonormalize");
  const std::size_t L = sites.size();
  std::vector<Tensor> mirrored;
  mirrored.reserve(L);
  for (std::size_t k = 0; k < L; ++k) mirrored.push_back(sites[L - 1 - k].permuted({2, 1, 0}));
  const Tensor mirrored_guess = guess.empty() ? Tensor{} : guess.permuted({1, 0});

  LeftOrtho lo = left_orthonormalize(mirrored, options, mirrored_guess);
  RightOrtho out;
  out.converged = lo.converged;
  out.rank_deficient = lo.rank_deficient;
  out.sweeps = lo.sweeps;
  out.delta = lo.delta;
  out.ar.resize(L);
  out.gauge.resize(L);
  for (std::size_t n = 0; n < L; ++n) {
    out.ar[n] = lo.al[L - 1 - n].permuted({2, 1, 0});
    out.gauge[n] = lo.gauge[(L - n) % L].permuted({1, 0});
  }
  return out;
}

UniformMPS mixed_canonical(std::span<const Tensor> sites, const OrthoOptions& options) {
  const LeftOrtho lo = left_orthonormalize(sites, options);
  if (!lo.converged)
    throw NumericalError("mixed_canonical: left orthonormalization did not converge (delta " +
                         std::to_string(lo.delta) + ")");
  const RightOrtho ro = right_orthonormalize(lo.al, options);
  if (!ro.converged)
    throw NumericalError("mixed_canonical: right orthonormalization did not converge (delta " +
                         std::to_string(ro.delta) + ")");
  const std::size_t L = sites.size();
  std::vector<Tensor> c(L);
  for (std::size_t n = 0; n < L; ++n) {
    Tensor cn = ro.gauge[(n + 1) % L];
    cn /= cn.norm();
    c[n] = std::move(cn);
  }
  return UniformMPS(lo.al, ro.ar, std::move(c));
}

UniformMPS mixed_canonical(const UniformMPS& state, const OrthoOptions& options) {
  return mixed_canonical(state.al(), options);
}

}  // namespace umps
