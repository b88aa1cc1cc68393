#pragma once

#include <span>
#include <vector>

#include "umps/tensor.hpp"

namespace umps {

/// Uniform MPS over an L-site unit cell in mixed gauge.
///
/// Site tensors AL[n], AR[n] have index order (left bond, physical, right
/// bond). The bond left of site n is bond n with dimension chi_n, so site n
/// has shape (chi_n, d_n, chi_{n+1}) with chi_L == chi_0. C[n] is the
/// chi_{n+1} x chi_{n+1} bond matrix sitting right of site n and relates the
/// two gauges through AL[n] C[n] = C[n-1] AR[n].
///
/// The constructor checks shapes only; exact canonical conditions are
/// guaranteed by mixed_canonical and can be measured with
/// canonical_residuals. Intermediate iterates of the variational loop are
/// stored in this type while only approximately gauge-consistent.
class UniformMPS {
 public:
  UniformMPS(std::vector<Tensor> al, std::vector<Tensor> ar, std::vector<Tensor> c);

  std::size_t length() const noexcept { return al_.size(); }
  /// Site accessors take n modulo the unit cell.
  const Tensor& al(std::size_t n) const { return al_[n % al_.size()]; }
  const Tensor& ar(std::size_t n) const { return ar_[n % ar_.size()]; }
  const Tensor& c(std::size_t n) const { return c_[n % c_.size()]; }
  /// Bond matrix on the bond left of site n, i.e. C[n-1].
  const Tensor& c_left(std::size_t n) const { return c_[(n + c_.size() - 1) % c_.size()]; }
  /// AC[n] = AL[n] C[n].
  Tensor ac(std::size_t n) const;

  std::span<const Tensor> al() const noexcept { return al_; }
  std::span<const Tensor> ar() const noexcept { return ar_; }
  std::span<const Tensor> c() const noexcept { return c_; }

  std::size_t bond_dim(std::size_t n) const { return al(n).shape()[0]; }
  std::size_t phys_dim(std::size_t n) const { return al(n).shape()[1]; }
  std::vector<std::size_t> bond_dims() const;
  std::vector<std::size_t> phys_dims() const;
  std::size_t max_bond_dim() const;

 private:
  std::vector<Tensor> al_, ar_, c_;
};

struct CanonicalResiduals {
  double left = 0.0;   // max_n || sum_p AL^dag AL - 1 ||
  double right = 0.0;  // max_n || sum_p AR AR^dag - 1 ||
  double gauge = 0.0;  // max_n || AL[n] C[n] - C[n-1] AR[n] ||
  double norm = 0.0;   // max_n | ||C[n]|| - 1 |
  double max() const;
};

CanonicalResiduals canonical_residuals(const UniformMPS& state);

/// Uniform MPO with tensors O[n] of index order
/// (left bond D_n, physical out, physical in, right bond D_{n+1}).
class MPO {
 public:
  explicit MPO(std::vector<Tensor> sites);

  static MPO identity(std::span<const std::size_t> phys_dims);

  std::size_t length() const noexcept { return o_.size(); }
  const Tensor& site(std::size_t n) const { return o_[n % o_.size()]; }
  std::span<const Tensor> sites() const noexcept { return o_; }
  std::size_t bond_dim(std::size_t n) const { return site(n).shape()[0]; }
  std::size_t phys_out(std::size_t n) const { return site(n).shape()[1]; }
  std::size_t phys_in(std::size_t n) const { return site(n).shape()[2]; }
  std::vector<std::size_t> bond_dims() const;
  std::size_t max_bond_dim() const;

 private:
  std::vector<Tensor> o_;
};

std::size_t lcm_length(std::size_t a, std::size_t b);

/// Expands per-bond dims to `length` entries: a single value broadcasts and
/// a list whose size divides `length` repeats. Entries must be positive.
std::vector<std::size_t> per_bond(std::span<const std::size_t> dims, std::size_t length);

/// Repeats the unit cell until it has `length` sites; length must be a
/// multiple of the current unit cell.
UniformMPS extend(const UniformMPS& state, std::size_t length);
MPO extend(const MPO& mpo, std::size_t length);
std::vector<Tensor> extend(std::span<const Tensor> sites, std::size_t length);

/// Translation by `shift` sites: site n of the result is site n + shift of the input.
UniformMPS translate(const UniformMPS& state, std::size_t shift);

/// O^dagger O as a single MPO with bond D^2, index order as MPO.
MPO adjoint_product(const MPO& mpo);

/// MPO tensors applied to MPS site tensors, fused bond (chi, D) -> chi * D.
/// Index order of the result (chi_n D_n, d_out, chi_{n+1} D_{n+1}).
Tensor apply_site(const Tensor& op, const Tensor& a);

/// Multiplies every site tensor (physical index p) by phase(p) on the sites
/// where mask[n % mask.size()] is set. Preserves canonical form for
/// unimodular phases.
UniformMPS apply_diagonal(const UniformMPS& state, std::span<const cplx> phases, std::span<const bool> mask);

}  // namespace umps
