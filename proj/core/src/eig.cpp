#include "umps/eig.hpp"

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace umps {

namespace {

using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

Vec fallback_start(std::size_t n) {
  Rng rng(0x5eed);
  std::normal_distribution<double> normal;
  Vec v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    v(i) = cplx(re, im);
  }
  return v.normalized();
}

void apply(const LinearMap& map, const Vec& in, Vec& out) {
  out.resize(in.size());
  map.apply(std::span<const cplx>(in.data(), static_cast<std::size_t>(in.size())),
            std::span<cplx>(out.data(), static_cast<std::size_t>(out.size())));
}

}  // namespace

std::vector<cplx> LinearMap::operator()(std::span<const cplx> in) const {
  if (in.size() != dim) throw ShapeError("LinearMap: input length does not match domain");
  std::vector<cplx> out(dim);
  apply(in, out);
  return out;
}

EigResult leading_eig(const LinearMap& map, std::span<const cplx> guess, const EigOptions& options) {
  if (map.dim == 0) throw ShapeError("leading_eig: empty domain");
  if (!(options.tol > 0.0)) throw std::invalid_argument("leading_eig: tol must be positive");
  const std::size_t n = map.dim;
  const Eigen::Index m = static_cast<Eigen::Index>(std::max<std::size_t>(1, std::min(options.krylov_dim, n)));

  Vec v;
  if (guess.size() == n) {
    v = Eigen::Map<const Vec>(guess.data(), static_cast<Eigen::Index>(n));
    const double nv = v.norm();
    if (!(nv > 0.0) || !std::isfinite(nv)) v = fallback_start(n);
    else v /= nv;
  } else {
    v = fallback_start(n);
  }

  EigResult result;
  Mat V(static_cast<Eigen::Index>(n), m + 1);
  Mat H = Mat::Zero(m + 1, m);
  Vec w;

  for (std::size_t restart = 0; restart <= options.max_restarts; ++restart) {
    H.setZero();
    V.col(0) = v;
    Eigen::Index k = m;
    bool invariant = false;
    for (Eigen::Index j = 0; j < m; ++j) {
      apply(map, V.col(j), w);
      ++result.matvecs;
      const double wnorm = w.norm();
      // classical Gram-Schmidt with one reorthogonalization pass
      Vec h = V.leftCols(j + 1).adjoint() * w;
      w.noalias() -= V.leftCols(j + 1) * h;
      Vec h2 = V.leftCols(j + 1).adjoint() * w;
      w.noalias() -= V.leftCols(j + 1) * h2;
      h += h2;
      H.col(j).head(j + 1) = h;
      const double beta = w.norm();
      H(j + 1, j) = beta;
      if (beta <= 1e-13 * std::max(wnorm, 1e-300) || beta == 0.0) {
        k = j + 1;
        invariant = true;
        break;
      }
      V.col(j + 1) = w / beta;
      // early exit for good starting vectors; Ritz check every few steps
      if (j + 1 < m && (j + 1) % 3 == 0) {
        Eigen::ComplexEigenSolver<Mat> ritz(H.topLeftCorner(j + 1, j + 1));
        if (ritz.info() == Eigen::Success) {
          Eigen::Index top = 0;
          for (Eigen::Index i = 1; i <= j; ++i)
            if (std::abs(ritz.eigenvalues()(i)) > std::abs(ritz.eigenvalues()(top))) top = i;
          const double est = beta * std::abs(ritz.eigenvectors().col(top).normalized()(j));
          if (est <= options.tol * std::max(1.0, std::abs(ritz.eigenvalues()(top)))) {
            k = j + 1;
            break;
          }
        }
      }
    }

    Eigen::ComplexEigenSolver<Mat> es(H.topLeftCorner(k, k));
    if (es.info() != Eigen::Success) throw NumericalError("leading_eig: Ritz problem failed");
    const auto& theta = es.eigenvalues();
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < k; ++i)
      if (std::abs(theta(i)) > std::abs(theta(best))) best = i;
    double second = -1.0;
    for (Eigen::Index i = 0; i < k; ++i)
      if (i != best) second = std::max(second, std::abs(theta(i)));

    Vec y = es.eigenvectors().col(best).normalized();
    const cplx value = theta(best);
    const double scale = std::max(1.0, std::abs(value));
    const double estimate = invariant ? 0.0 : std::abs(H(k, k - 1)) * std::abs(y(k - 1));
    Vec x = V.leftCols(k) * y;
    x.normalize();

    if (estimate <= options.tol * scale || restart == options.max_restarts) {
      Vec ax;
      apply(map, x, ax);
      ++result.matvecs;
      const double true_residual = (ax - value * x).norm();
      result.value = value;
      result.vector.assign(x.data(), x.data() + x.size());
      result.residual = true_residual;
      result.converged = true_residual <= options.tol * scale;
      result.degenerate = second >= 0.0 && (std::abs(value) - second) <= options.tol * scale;
      if (result.converged || restart == options.max_restarts) return result;
      // estimate was optimistic (loss of orthogonality); keep iterating
      v = ax.norm() > 0.0 ? Vec(ax.normalized()) : x;
      continue;
    }
    v = x;
  }
  return result;
}

}  // namespace umps
