#include "umps/baseline.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "umps/canonical.hpp"
#include "umps/eig.hpp"
#include "umps/linalg.hpp"
#include "umps/transfer.hpp"

namespace umps {

namespace {

// Hermitian PSD matrix -> X with X^dag X = m (rows of X scaled by sqrt eigenvalues).
Matrix left_factor(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Eigen::MatrixXcd(0.5 * (m + m.adjoint())));
  const Eigen::VectorXd w = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

// Fixes the arbitrary phase of an eigenvector of a Hermitian-preserving map.
Matrix hermitian_phase(Matrix m) {
  const cplx tr = m.trace();
  if (std::abs(tr) > 0.0) m *= std::conj(tr) / std::abs(tr);
  return 0.5 * (m + m.adjoint());
}

// Number of leading values of s to keep on one bond; records the cut in out.
std::size_t cut_bond(const RealVector& s, std::size_t target, double relative_cutoff, SchmidtTruncation& out) {
  const auto chi = static_cast<std::size_t>(s.size());
  std::size_t keep = std::min(target, chi);
  while (keep > 1 && s(static_cast<Eigen::Index>(keep) - 1) < relative_cutoff * s(0)) --keep;
  if (keep < chi) {
    const double kept_val = s(static_cast<Eigen::Index>(keep) - 1);
    const double next_val = s(static_cast<Eigen::Index>(keep));
    if (kept_val - next_val <= 1e-12 * s(0)) out.degenerate_cut = true;
    out.discarded_weight += s.tail(static_cast<Eigen::Index>(chi - keep)).squaredNorm() / s.squaredNorm();
  }
  return keep;
}

}  // namespace

SchmidtTruncation schmidt_truncate(const UniformMPS& state, std::span<const std::size_t> new_chi,
                                   double relative_cutoff) {
  const std::size_t L = state.length();
  const auto target = per_bond(new_chi, L);

  // U[n] holds the kept left Schmidt vectors of C[n] (bond n+1).
  std::vector<Matrix> U(L);
  SchmidtTruncation out{state, 0.0, false, {}};
  out.kept.resize(L);
  bool changed = false;
  for (std::size_t n = 0; n < L; ++n) {
    const Matrix c = to_matrix(state.c(n), 1);
    const SVDResult d = svd(c);
    const std::size_t keep = cut_bond(d.S, target[(n + 1) % L], relative_cutoff, out);
    changed = changed || keep < static_cast<std::size_t>(d.S.size());
    out.kept[(n + 1) % L] = keep;
    U[n] = d.U.leftCols(static_cast<Eigen::Index>(keep));
  }
  if (!changed) return out;

  std::vector<Tensor> sites;
  for (std::size_t n = 0; n < L; ++n) {
    const Matrix& left = U[(n + L - 1) % L];
    const Matrix& right = U[n];
    Tensor a = contract(to_tensor(Matrix(left.adjoint())), state.al(n), {{1, 0}});
    a = contract(a, to_tensor(right), {{2, 0}});
    sites.push_back(std::move(a));
  }
  out.state = mixed_canonical(sites);
  return out;
}

SchmidtTruncation schmidt_truncate(const UniformMPS& state, std::size_t new_chi, double relative_cutoff) {
  const std::size_t chi[1] = {new_chi};
  return schmidt_truncate(state, chi, relative_cutoff);
}

double local_truncate_memory_estimate(const UniformMPS& state, const MPO& mpo) {
  const std::size_t L = lcm_length(state.length(), mpo.length());
  double worst = 0.0;
  for (std::size_t n = 0; n < L; ++n) {
    const double chi = static_cast<double>(state.bond_dim(n));
    const double D = static_cast<double>(mpo.bond_dim(n));
    const double d = static_cast<double>(mpo.phys_out(n));
    // largest intermediate of the double-layer step, plus the Krylov basis
    const double step = chi * chi * d * D * D;
    const double krylov = 32.0 * chi * chi * D * D;
    worst = std::max(worst, 16.0 * (3.0 * step + krylov));
  }
  return worst;
}

SchmidtTruncation mpo_mps_local_truncate(const UniformMPS& state, const MPO& mpo, std::span<const std::size_t> new_chi,
                                         const LocalTruncateOptions& options) {
  const double estimate = local_truncate_memory_estimate(state, mpo);
  if (estimate > options.memory_limit_bytes) {
    std::ostringstream msg;
    msg << "mpo_mps_local_truncate: estimated memory " << estimate / 1e9
        << " GB (O(chi^2 d D^2)) exceeds the guard of " << options.memory_limit_bytes / 1e9 << " GB";
    throw ResourceError(msg.str(), estimate);
  }
  const std::size_t L = lcm_length(state.length(), mpo.length());
  const UniformMPS m = extend(state, L);
  const MPO o = extend(mpo, L);

  // fixed points of the product double layer, kept as separate O and O^dag layers
  EigOptions eo;
  eo.tol = options.eig_tol;
  const LinearMap left = double_layer_map(m.al(), o.sites(), Side::left);
  const LinearMap right = double_layer_map(m.al(), o.sites(), Side::right);
  const std::size_t chi0 = m.bond_dim(0), D0 = o.bond_dim(0);
  std::vector<cplx> guess(left.dim, 0.0);
  for (std::size_t i = 0; i < chi0; ++i)
    for (std::size_t w = 0; w < D0; ++w) guess[((i * D0 + w) * D0 + w) * chi0 + i] = 1.0;
  const EigResult el = leading_eig(left, guess, eo);
  const EigResult er = leading_eig(right, guess, eo);
  if (!(std::abs(el.value) > 0.0)) throw NumericalError("mpo_mps_local_truncate: product state has zero norm");

  // environments on every bond, as matrices over the fused (chi, D) bond
  const auto to_bond_matrix = [](const Tensor& env) {
    const auto& s = env.shape();  // (t, u, w, b)
    return to_matrix(env.permuted({0, 1, 3, 2}).reshaped({s[0] * s[1], s[3] * s[2]}), 1);
  };
  const Shape shape0{chi0, D0, D0, chi0};
  std::vector<Tensor> lenv(L), renv(L);
  lenv[0] = Tensor(shape0, el.vector);
  renv[L - 1] = Tensor(shape0, er.vector);
  for (std::size_t n = 0; n + 1 < L; ++n) lenv[n + 1] = apply_left_double(lenv[n], o.site(n), m.al(n));
  for (std::size_t n = L - 1; n >= 1; --n) renv[n - 1] = apply_right_double(renv[n], o.site(n), m.al(n));

  std::vector<Tensor> product(L);
  for (std::size_t n = 0; n < L; ++n) product[n] = apply_site(o.site(n), m.al(n));

  // bond n (left of site n): l = X^dag X, r = Y Y^dag, X Y = U S V^dag
  std::vector<Matrix> X(L), Y(L), Uk(L), Vk(L);
  std::vector<RealVector> Sk(L);
  for (std::size_t n = 0; n < L; ++n) {
    const Matrix l = hermitian_phase(to_bond_matrix(lenv[n]));
    // right environment of bond n is renv[n-1]; stored with the conj index first
    const Matrix r = hermitian_phase(Matrix(to_bond_matrix(renv[(n + L - 1) % L]).transpose()));
    X[n] = left_factor(l);
    Y[n] = left_factor(r).adjoint();
    const SVDResult d = svd(X[n] * Y[n]);
    Eigen::Index k = 0;
    while (k < d.S.size() && d.S(k) > options.rank_cutoff * d.S(0)) ++k;
    k = std::max<Eigen::Index>(k, 1);
    Uk[n] = d.U.leftCols(k);
    Vk[n] = d.V.leftCols(k);
    Sk[n] = d.S.head(k);
  }
  // S[n] are the Schmidt values of the exact product on bond n, so the cut
  // happens here and only the truncated cell is canonicalized
  const auto target = per_bond(new_chi, L);
  SchmidtTruncation out{m, 0.0, false, std::vector<std::size_t>(L)};
  for (std::size_t n = 0; n < L; ++n) out.kept[n] = cut_bond(Sk[n], target[n], 0.0, out);
  std::vector<Tensor> sites(L);
  for (std::size_t n = 0; n < L; ++n) {
    const std::size_t nn = (n + 1) % L;
    const auto kl = static_cast<Eigen::Index>(out.kept[n]), kr = static_cast<Eigen::Index>(out.kept[nn]);
    const Matrix left = Uk[n].leftCols(kl).adjoint() * X[n];
    const Matrix right = Y[nn] * Vk[nn].leftCols(kr) * Sk[nn].head(kr).cwiseInverse().cast<cplx>().asDiagonal();
    Tensor a = contract(to_tensor(left), product[n], {{1, 0}});
    a = contract(a, to_tensor(right), {{2, 0}});
    sites[n] = std::move(a);
  }
  out.state = mixed_canonical(sites);
  return out;
}

SchmidtTruncation mpo_mps_local_truncate(const UniformMPS& state, const MPO& mpo, std::size_t new_chi,
                                         const LocalTruncateOptions& options) {
  const std::size_t chi[1] = {new_chi};
  return mpo_mps_local_truncate(state, mpo, chi, options);
}

}  // namespace umps
