#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace umps {

using cplx = std::complex<double>;
using Shape = std::vector<std::size_t>;
using Rng = std::mt19937_64;

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string to_string(const Shape& shape);

/// Dense complex tensor. Entries are stored row-major over the declared
/// index order: the last index runs fastest.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<cplx> data);

  static Tensor identity(std::size_t n);
  /// Entries with independent standard-normal real and imaginary parts.
  static Tensor random(Shape shape, Rng& rng);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t extent(std::size_t axis) const;
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const cplx> data() const noexcept { return data_; }
  std::span<cplx> data() noexcept { return data_; }
  const std::vector<cplx>& storage() const noexcept { return data_; }

  cplx& operator[](std::size_t flat) { return data_[flat]; }
  const cplx& operator[](std::size_t flat) const { return data_[flat]; }
  cplx& operator()(std::initializer_list<std::size_t> index);
  const cplx& operator()(std::initializer_list<std::size_t> index) const;

  Tensor reshaped(Shape shape) const&;
  Tensor reshaped(Shape shape) &&;
  /// Output axis i is input axis perm[i].
  Tensor permuted(std::span<const std::size_t> perm) const;
  Tensor permuted(std::initializer_list<std::size_t> perm) const;
  Tensor conj() const;

  double norm() const;
  bool all_finite() const;

  Tensor& operator*=(cplx s);
  Tensor& operator/=(cplx s);
  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);

 private:
  std::size_t flat_index(std::initializer_list<std::size_t> index) const;

  Shape shape_;
  std::vector<cplx> data_;
};

Tensor operator*(cplx s, Tensor t);
Tensor operator*(Tensor t, cplx s);
Tensor operator+(Tensor a, const Tensor& b);
Tensor operator-(Tensor a, const Tensor& b);

std::size_t num_elements(const Shape& shape);
double max_abs_diff(const Tensor& a, const Tensor& b);
/// Hermitian inner product sum conj(a) * b.
cplx inner(const Tensor& a, const Tensor& b);

struct IndexPair {
  std::size_t a;
  std::size_t b;
};

/// Sums over the paired indices. The result carries the unpaired indices of
/// `a` followed by the unpaired indices of `b`, each in declared order.
Tensor contract(const Tensor& a, const Tensor& b, std::span<const IndexPair> pairs);
Tensor contract(const Tensor& a, const Tensor& b, std::initializer_list<IndexPair> pairs);

}  // namespace umps
