#pragma once

#include <functional>
#include <span>
#include <vector>

#include "umps/tensor.hpp"

namespace umps {

/// Matrix-free linear operator on C^dim.
struct LinearMap {
  std::size_t dim = 0;
  std::function<void(std::span<const cplx> in, std::span<cplx> out)> apply;

  std::vector<cplx> operator()(std::span<const cplx> in) const;
};

struct EigOptions {
  /// Residual target, relative to max(1, |lambda|).
  double tol = 1e-12;
  std::size_t krylov_dim = 30;
  std::size_t max_restarts = 300;
};

struct EigResult {
  cplx value{};
  std::vector<cplx> vector;  // unit 2-norm
  double residual = 0.0;     // ||A v - value v||, measured with one extra application
  bool converged = false;
  /// Leading magnitude not separated from the next Ritz value by more than tol.
  bool degenerate = false;
  std::size_t matvecs = 0;
};

/// Leading-magnitude eigenpair by restarted Arnoldi. Each cycle builds a
/// Krylov space of size krylov_dim from the current vector and restarts from
/// the Ritz vector of largest |theta|. Deterministic for a given guess; an
/// empty or zero guess is replaced by a fixed pseudo-random vector.
EigResult leading_eig(const LinearMap& map, std::span<const cplx> guess, const EigOptions& options = {});

}  // namespace umps
