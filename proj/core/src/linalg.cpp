#include "umps/linalg.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>

namespace umps {

namespace {

using ColMatrix = Eigen::MatrixXcd;

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw NumericalError(std::string(what) + ": non-finite input");
}

}  // namespace

Matrix to_matrix(const Tensor& t, std::size_t row_axes) {
  if (row_axes > t.rank()) throw ShapeError("to_matrix: row_axes exceeds rank");
  std::size_t rows = 1;
  for (std::size_t i = 0; i < row_axes; ++i) rows *= t.shape()[i];
  const std::size_t cols = t.size() / rows;
  return Eigen::Map<const Matrix>(t.data().data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

Tensor to_tensor(const Matrix& m, Shape shape) {
  if (num_elements(shape) != static_cast<std::size_t>(m.size()))
    throw ShapeError("to_tensor: matrix size does not match shape " + to_string(shape));
  return Tensor(std::move(shape), std::vector<cplx>(m.data(), m.data() + m.size()));
}

Tensor to_tensor(const Matrix& m) {
  return to_tensor(m, {static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
}

double frobenius(const Matrix& m) { return m.norm(); }

QRResult qr_positive(const Matrix& m) {
  const Eigen::Index rows = m.rows(), cols = m.cols();
  if (rows < cols) throw ShapeError("qr_positive: needs rows >= cols");
  require_finite(m, "qr_positive");
  Eigen::HouseholderQR<ColMatrix> qr{ColMatrix(m)};
  QRResult out;
  out.Q = qr.householderQ() * ColMatrix::Identity(rows, cols);
  out.R = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  const double scale = m.norm();
  for (Eigen::Index i = 0; i < cols; ++i) {
    const cplx d = out.R(i, i);
    const double a = std::abs(d);
    if (a <= 1e-14 * scale) out.rank_deficient = true;
    const cplx phase = a > 0.0 ? d / a : cplx(1.0);
    out.R.row(i) *= std::conj(phase);
    out.Q.col(i) *= phase;
    out.R(i, i) = cplx(std::abs(out.R(i, i)), 0.0);
  }
  return out;
}

LQResult lq_positive(const Matrix& m) {
  if (m.cols() < m.rows()) throw ShapeError("lq_positive: needs cols >= rows");
  QRResult qr = qr_positive(m.adjoint());
  return {qr.R.adjoint(), qr.Q.adjoint(), qr.rank_deficient};
}

SVDResult svd(const Matrix& m) {
  require_finite(m, "svd");
  Eigen::BDCSVD<ColMatrix> dec(ColMatrix(m), Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) throw NumericalError("svd: decomposition did not converge");
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

PolarLeft polar_left(const Matrix& m) {
  if (m.rows() < m.cols()) throw ShapeError("polar_left: needs rows >= cols");
  const SVDResult d = svd(m);
  PolarLeft out;
  out.W = d.U * d.V.adjoint();
  out.P = d.V * d.S.cast<cplx>().asDiagonal() * d.V.adjoint();
  return out;
}

PolarRight polar_right(const Matrix& m) {
  if (m.cols() < m.rows()) throw ShapeError("polar_right: needs cols >= rows");
  const SVDResult d = svd(m);
  PolarRight out;
  out.W = d.U * d.V.adjoint();
  out.P = d.U * d.S.cast<cplx>().asDiagonal() * d.U.adjoint();
  return out;
}

double min_relative_singular_value(const Matrix& m) {
  const SVDResult d = svd(m);
  if (d.S.size() == 0 || d.S(0) == 0.0) return 0.0;
  return d.S(d.S.size() - 1) / d.S(0);
}

}  // namespace umps
