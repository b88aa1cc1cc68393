#pragma once

#include <vector>

#include "umps/eig.hpp"
#include "umps/mps.hpp"

namespace umps {

/// Fixed points of the mixed transfer maps between a conjugated top state
/// and a bottom state, optionally with an MPO in between.
///
/// gl[n] lives on the bond left of site n, gr[n] on the bond right of site
/// n; both have index order (top bond, MPO bond, bottom bond) with MPO bond
/// extent 1 when there is no MPO. lambda is the per-site eigenvalue, the
/// principal L-th root of the unit-cell eigenvalue.
struct MixedEnvironment {
  std::vector<Tensor> gl, gr;
  cplx lambda{};
  cplx cell_lambda{};
  bool converged = false;
  bool orthogonal = false;  // |lambda| numerically zero; normalization skipped
  bool degenerate = false;
  double residual = 0.0;    // max of the two eigen-residuals
  std::size_t matvecs = 0;

  std::size_t length() const noexcept { return gl.size(); }
};

struct EnvOptions {
  double tol = 1e-12;
  std::size_t krylov_dim = 30;
  std::size_t max_restarts = 300;
  /// Per-site |lambda| below this flags the layers as orthogonal.
  double orthogonal_threshold = 1e-12;
};

/// Left environment from (AL top, O, AL bottom), right environment from
/// (AR top, O, AR bottom). GL is phase-fixed so that its trace over the
/// first MPO slice is real positive; each GR is then scaled so that
/// GL[n] . conj(C_top[n-1]) . C_bottom[n-1] . GR[n-1] = 1 on every bond.
/// Unit cells of top, bottom and mpo must agree.
/// `warm` supplies starting vectors from a previous call with the same shapes.
MixedEnvironment environments(const UniformMPS& top, const UniformMPS& bottom, const MPO* mpo = nullptr,
                              const EnvOptions& options = {}, const MixedEnvironment* warm = nullptr);

/// The closed network used for normalization at bond n (left of site n).
cplx environment_overlap(const MixedEnvironment& env, const UniformMPS& top, const UniformMPS& bottom, std::size_t n);

}  // namespace umps
