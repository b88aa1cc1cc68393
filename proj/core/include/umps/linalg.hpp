#pragma once

#include <Eigen/Core>

#include "umps/tensor.hpp"

namespace umps {

/// Row-major so that a tensor reshaped to a matrix maps onto its storage directly.
using Matrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RealVector = Eigen::VectorXd;

/// Groups the first `row_axes` indices into rows and the rest into columns.
Matrix to_matrix(const Tensor& t, std::size_t row_axes);
Tensor to_tensor(const Matrix& m, Shape shape);
Tensor to_tensor(const Matrix& m);

double frobenius(const Matrix& m);

struct QRResult {
  Matrix Q;  // rows x cols, orthonormal columns
  Matrix R;  // cols x cols, upper triangular, real non-negative diagonal
  bool rank_deficient = false;
};

/// Thin QR with the diagonal of R made real and positive, which fixes the
/// decomposition uniquely for full-rank input. Requires rows >= cols.
QRResult qr_positive(const Matrix& m);

struct LQResult {
  Matrix L;  // rows x rows, lower triangular, positive diagonal
  Matrix Q;  // rows x cols, orthonormal rows
  bool rank_deficient = false;
};

/// m = L Q, computed from qr_positive of the adjoint. Requires cols >= rows.
LQResult lq_positive(const Matrix& m);

struct SVDResult {
  Matrix U;       // rows x k
  RealVector S;   // k, non-negative, descending
  Matrix V;       // cols x k, so that m = U diag(S) V^dagger
};

/// Thin singular-value decomposition, k = min(rows, cols).
SVDResult svd(const Matrix& m);

struct PolarLeft {
  Matrix W;  // isometry, W^dagger W = 1
  Matrix P;  // Hermitian positive semidefinite, cols x cols
};

struct PolarRight {
  Matrix P;  // Hermitian positive semidefinite, rows x rows
  Matrix W;  // co-isometry, W W^dagger = 1
};

/// m = W P for rows >= cols.
PolarLeft polar_left(const Matrix& m);
/// m = P W for cols >= rows.
PolarRight polar_right(const Matrix& m);

/// Smallest singular value relative to the largest; used to flag singular
/// polar factors.
double min_relative_singular_value(const Matrix& m);

}  // namespace umps
