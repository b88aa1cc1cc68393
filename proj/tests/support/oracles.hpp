#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "umps/mps.hpp"

namespace oracle {

using umps::cplx;
using umps::Tensor;
using Dense = Eigen::MatrixXcd;
using DenseVec = Eigen::VectorXcd;

/// Nested-loop contraction over every index combination.
Tensor naive_contract(const Tensor& a, const Tensor& b, const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

/// Explicit unit-cell transfer matrix acting on left environments flattened
/// as (top, mpo, bottom): vec(G') = E vec(G). Right action is E^T.
Dense transfer_matrix(std::span<const Tensor> top, std::span<const Tensor> bottom, std::span<const Tensor> ops = {});

struct DenseEig {
  cplx value;
  DenseVec vector;
};

/// Largest-magnitude eigenpair from a full dense decomposition.
DenseEig dense_leading(const Dense& m);

/// Eigenvalues sorted by decreasing magnitude.
std::vector<cplx> dense_spectrum(const Dense& m);

/// Plain matrix view of a rank-2 tensor.
Dense as_dense(const Tensor& t);
Tensor from_dense(const Dense& m);

}  // namespace oracle

namespace oracle {

/// Norm of the finite-difference gradient (central differences, step h) of
/// log|Lambda(A, M)| - log|Lambda(A, A)| / 2 with respect to the real and
/// imaginary parts of the single-site tensor A, after projecting out gauge
/// directions XA - AX and the scale/phase of A. Uses dense long double
/// eigensolves; only for tiny bond dims.
double log_fidelity_gradient_norm(const Tensor& a, const Tensor& m, double h = 1e-6);

/// log|Lambda(A, M)| - log|Lambda(A, A)| / 2 in long double.
long double log_fidelity_density(const Tensor& a, const Tensor& m);

}  // namespace oracle

namespace oracle {

/// Dense operator of an MPO closed into a ring of `sites` sites (bond traced).
/// Basis index: site 0 is the most significant digit.
Dense ring_operator(const umps::MPO& mpo, std::size_t sites);

/// Two-site gate (d, d, d, d) acting on sites (i, j) of an N-site chain of qubits.
Dense embed_gate(const Tensor& gate, std::size_t i, std::size_t j, std::size_t sites);

/// exp(-i H t) for Hermitian H by a Taylor series with scaling and squaring.
Dense expm_hermitian(const Dense& h, double t);

}  // namespace oracle

namespace oracle {

struct DenseCenters {
  std::vector<Tensor> acp, cp;  // unit Frobenius norm
  cplx cell_lambda;             // leading eigenvalue of the AL unit-cell transfer matrix
};

/// Updated centers from dense left/right eigenvectors of the materialized
/// transfer matrices: GL[n] (O[n]) M_C[n] GR[n] and GL[n+1] C_M[n] GR[n].
/// `mpo` may be null.
DenseCenters dense_centers(const umps::UniformMPS& top, const umps::UniformMPS& bottom, const umps::MPO* mpo);

/// min over phases of || x/|x| - e^{i phi} y/|y| ||.
double phase_distance(const Tensor& x, const Tensor& y);

}  // namespace oracle
