#pragma once

#include "umps/environment.hpp"
#include "umps/mps.hpp"

namespace umps {

/// |lambda| of the mixed transfer map; unit cells are extended to their lcm.
double fidelity_per_site(const UniformMPS& a, const UniformMPS& b, double tol = 1e-13);

/// <op> at site n, computed from AC[n]. `op` is a d x d tensor (out, in).
cplx expect_local(const UniformMPS& state, const Tensor& op, std::size_t n);

/// Per-site leading eigenvalue of the MPO sandwiched between the state and
/// itself. Unit cells are extended to their lcm.
cplx mpo_eigenvalue_per_site(const UniformMPS& state, const MPO& mpo, double tol = 1e-13);

/// Per-site leading eigenvalue of <M| O^dag O |M>, i.e. the squared norm
/// density of O|M>. Unit cells must agree.
double mpo_norm_per_site(const UniformMPS& state, const MPO& mpo, double tol = 1e-13);

/// |<top| O |bottom>|^(1/N) / ||O|bottom>||^(1/N) in the thermodynamic limit.
double fidelity_with_mpo(const UniformMPS& top, const UniformMPS& bottom, const MPO& mpo, double tol = 1e-13);

/// Ratio <top| ..O.. O' ..O.. |bottom> / <top| ..O.. |bottom> with the MPO
/// tensor at site n replaced by `impurity` (same shape). `env` must be the
/// environments of (top, mpo, bottom).
cplx impurity_ratio(const MixedEnvironment& env, const UniformMPS& top, const UniformMPS& bottom, const MPO& mpo,
                    const Tensor& impurity, std::size_t n);

}  // namespace umps
