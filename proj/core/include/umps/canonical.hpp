#pragma once

#include <span>
#include <vector>

#include "umps/mps.hpp"

namespace umps {

struct OrthoOptions {
  double tol = 1e-12;             // Frobenius change of the gauge matrix per sweep
  std::size_t max_sweeps = 10000;
};

struct LeftOrtho {
  std::vector<Tensor> al;     // left-isometric site tensors
  std::vector<Tensor> gauge;  // gauge[n] on bond n: gauge[n] A[n] ~ AL[n] gauge[n+1], unit norm
  bool converged = false;
  bool rank_deficient = false;
  std::size_t sweeps = 0;
  double delta = 0.0;
};

struct RightOrtho {
  std::vector<Tensor> ar;     // right-isometric site tensors
  std::vector<Tensor> gauge;  // gauge[n] on bond n: A[n] gauge[n+1] ~ gauge[n] AR[n], unit norm
  bool converged = false;
  bool rank_deficient = false;
  std::size_t sweeps = 0;
  double delta = 0.0;
};

/// Positive-QR sweeps L A -> AL L' around the unit cell until the gauge on
/// bond 0 stops changing, with a Krylov fixed-point step between sweeps.
/// `guess` (chi_0 x chi_0) seeds the gauge; an empty tensor means identity.
LeftOrtho left_orthonormalize(std::span<const Tensor> sites, const OrthoOptions& options = {},
                              const Tensor& guess = {});

/// Mirror image of left_orthonormalize using positive LQ.
RightOrtho right_orthonormalize(std::span<const Tensor> sites, const OrthoOptions& options = {},
                                const Tensor& guess = {});

/// Brings arbitrary site tensors into mixed canonical form with unit-norm
/// bond matrices. Throws NumericalError if either sweep fails to converge.
UniformMPS mixed_canonical(std::span<const Tensor> sites, const OrthoOptions& options = {});

/// Re-canonicalizes starting from the AL tensors of an existing state.
UniformMPS mixed_canonical(const UniformMPS& state, const OrthoOptions& options = {});

}  // namespace umps
