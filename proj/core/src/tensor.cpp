#include "umps/tensor.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace umps {

namespace {

using RowMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Shape strides_of(const Shape& shape) {
  Shape strides(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;) strides[i - 1] = strides[i] * shape[i];
  return strides;
}

bool is_identity(std::span<const std::size_t> perm) {
  for (std::size_t i = 0; i < perm.size(); ++i)
    if (perm[i] != i) return false;
  return true;
}

}  // namespace

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ')';
  return os.str();
}

std::size_t num_elements(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)), data_(num_elements(shape_)) {
  for (auto e : shape_)
    if (e == 0) throw ShapeError("Tensor: zero extent in shape " + to_string(shape_));
}

Tensor::Tensor(Shape shape, std::vector<cplx> data) : shape_(std::move(shape)), data_(std::move(data)) {
  for (auto e : shape_)
    if (e == 0) throw ShapeError("Tensor: zero extent in shape " + to_string(shape_));
  if (data_.size() != num_elements(shape_))
    throw ShapeError("Tensor: " + std::to_string(data_.size()) + " entries do not fill shape " +
                     to_string(shape_));
}

Tensor Tensor::identity(std::size_t n) {
  Tensor t({n, n});
  for (std::size_t i = 0; i < n; ++i) t.data_[i * n + i] = 1.0;
  return t;
}

Tensor Tensor::random(Shape shape, Rng& rng) {
  Tensor t(std::move(shape));
  std::normal_distribution<double> normal;
  for (auto& x : t.data_) {
    const double re = normal(rng);
    const double im = normal(rng);
    x = cplx(re, im);
  }
  return t;
}

std::size_t Tensor::extent(std::size_t axis) const {
  if (axis >= shape_.size())
    throw ShapeError("Tensor::extent: axis " + std::to_string(axis) + " out of range for rank " +
                     std::to_string(shape_.size()));
  return shape_[axis];
}

std::size_t Tensor::flat_index(std::initializer_list<std::size_t> index) const {
  if (index.size() != shape_.size()) throw ShapeError("Tensor: index rank mismatch");
  std::size_t flat = 0;
  std::size_t axis = 0;
  for (auto i : index) {
    if (i >= shape_[axis]) throw ShapeError("Tensor: index out of range on axis " + std::to_string(axis));
    flat = flat * shape_[axis] + i;
    ++axis;
  }
  return flat;
}

cplx& Tensor::operator()(std::initializer_list<std::size_t> index) { return data_[flat_index(index)]; }
const cplx& Tensor::operator()(std::initializer_list<std::size_t> index) const {
  return data_[flat_index(index)];
}

Tensor Tensor::reshaped(Shape shape) const& {
  Tensor copy = *this;
  return std::move(copy).reshaped(std::move(shape));
}

Tensor Tensor::reshaped(Shape shape) && {
  if (num_elements(shape) != data_.size())
    throw ShapeError("reshape: " + to_string(shape_) + " -> " + to_string(shape) + " changes size");
  return Tensor(std::move(shape), std::move(data_));
}

Tensor Tensor::permuted(std::initializer_list<std::size_t> perm) const {
  return permuted(std::span<const std::size_t>(perm.begin(), perm.size()));
}

Tensor Tensor::permuted(std::span<const std::size_t> perm) const {
  const std::size_t r = rank();
  if (perm.size() != r) throw ShapeError("permute: permutation length does not match rank");
  std::vector<bool> seen(r, false);
  for (auto p : perm) {
    if (p >= r || seen[p]) throw ShapeError("permute: invalid permutation");
    seen[p] = true;
  }
  if (is_identity(perm)) return *this;

  Shape out_shape(r);
  for (std::size_t i = 0; i < r; ++i) out_shape[i] = shape_[perm[i]];
  const Shape in_strides = strides_of(shape_);

  // fuse output axes that stay adjacent in the input, then drop extent-1 axes
  Shape ext, stride;
  for (std::size_t i = 0; i < r; ++i) {
    if (shape_[perm[i]] == 1) continue;
    if (!ext.empty() && stride.back() == in_strides[perm[i]] * shape_[perm[i]]) {
      ext.back() *= shape_[perm[i]];
      stride.back() = in_strides[perm[i]];
    } else {
      ext.push_back(shape_[perm[i]]);
      stride.push_back(in_strides[perm[i]]);
    }
  }
  Tensor out(out_shape);
  if (data_.empty()) return out;
  if (ext.size() <= 1) {
    std::copy(data_.begin(), data_.end(), out.data_.begin());
    return out;
  }

  // the two innermost output axes are explicit loops; an odometer walks the rest
  const std::size_t k = ext.size();
  const std::size_t n1 = ext[k - 1], s1 = stride[k - 1], n0 = ext[k - 2], s0 = stride[k - 2];
  const std::size_t outer = data_.size() / (n0 * n1);
  std::vector<std::size_t> counter(k - 2, 0);
  std::size_t src = 0;
  cplx* dst = out.data_.data();
  for (std::size_t block = 0; block < outer; ++block) {
    const cplx* base = data_.data() + src;
    for (std::size_t i = 0; i < n0; ++i) {
      const cplx* row = base + i * s0;
      for (std::size_t j = 0; j < n1; ++j) dst[j] = row[j * s1];
      dst += n1;
    }
    for (std::size_t ax = k - 2; ax-- > 0;) {
      ++counter[ax];
      src += stride[ax];
      if (counter[ax] < ext[ax]) break;
      src -= stride[ax] * ext[ax];
      counter[ax] = 0;
    }
  }
  return out;
}

Tensor Tensor::conj() const {
  Tensor out = *this;
  for (auto& x : out.data_) x = std::conj(x);
  return out;
}

double Tensor::norm() const {
  double s = 0.0;
  for (const auto& x : data_) s += std::norm(x);
  return std::sqrt(s);
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](const cplx& x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); });
}

Tensor& Tensor::operator*=(cplx s) {
  for (auto& x : data_) x *= s;
  return *this;
}

Tensor& Tensor::operator/=(cplx s) {
  for (auto& x : data_) x /= s;
  return *this;
}

Tensor& Tensor::operator+=(const Tensor& other) {
  if (other.shape_ != shape_) throw ShapeError("add: " + to_string(shape_) + " vs " + to_string(other.shape_));
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
  if (other.shape_ != shape_) throw ShapeError("sub: " + to_string(shape_) + " vs " + to_string(other.shape_));
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Tensor operator*(cplx s, Tensor t) { return t *= s; }
Tensor operator*(Tensor t, cplx s) { return t *= s; }
Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) throw ShapeError("max_abs_diff: " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

cplx inner(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) throw ShapeError("inner: " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

Tensor contract(const Tensor& a, const Tensor& b, std::initializer_list<IndexPair> pairs) {
  return contract(a, b, std::span<const IndexPair>(pairs.begin(), pairs.size()));
}

Tensor contract(const Tensor& a, const Tensor& b, std::span<const IndexPair> pairs) {
  std::vector<bool> paired_a(a.rank(), false), paired_b(b.rank(), false);
  for (const auto& p : pairs) {
    if (p.a >= a.rank() || p.b >= b.rank())
      throw ShapeError("contract: pair (" + std::to_string(p.a) + "," + std::to_string(p.b) +
                       ") out of range for ranks " + std::to_string(a.rank()) + "," + std::to_string(b.rank()));
    if (paired_a[p.a] || paired_b[p.b])
      throw ShapeError("contract: index repeated in pair (" + std::to_string(p.a) + "," + std::to_string(p.b) + ")");
    if (a.shape()[p.a] != b.shape()[p.b])
      throw ShapeError("contract: extent mismatch in pair (" + std::to_string(p.a) + "," + std::to_string(p.b) +
                       "): " + std::to_string(a.shape()[p.a]) + " vs " + std::to_string(b.shape()[p.b]));
    paired_a[p.a] = paired_b[p.b] = true;
  }

  std::vector<std::size_t> perm_a, perm_b;
  Shape out_shape;
  std::size_t rows = 1, inner_dim = 1, cols = 1;
  for (std::size_t i = 0; i < a.rank(); ++i)
    if (!paired_a[i]) {
      perm_a.push_back(i);
      out_shape.push_back(a.shape()[i]);
      rows *= a.shape()[i];
    }
  for (const auto& p : pairs) {
    perm_a.push_back(p.a);
    perm_b.push_back(p.b);
    inner_dim *= a.shape()[p.a];
  }
  for (std::size_t i = 0; i < b.rank(); ++i)
    if (!paired_b[i]) {
      perm_b.push_back(i);
      out_shape.push_back(b.shape()[i]);
      cols *= b.shape()[i];
    }

  const Tensor ap = is_identity(perm_a) ? Tensor() : a.permuted(perm_a);
  const Tensor bp = is_identity(perm_b) ? Tensor() : b.permuted(perm_b);
  const cplx* adata = ap.empty() ? a.data().data() : ap.data().data();
  const cplx* bdata = bp.empty() ? b.data().data() : bp.data().data();

  if (out_shape.empty()) out_shape.push_back(1);
  Tensor out(out_shape);
  Eigen::Map<const RowMatrix> am(adata, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(inner_dim));
  Eigen::Map<const RowMatrix> bm(bdata, static_cast<Eigen::Index>(inner_dim), static_cast<Eigen::Index>(cols));
  Eigen::Map<RowMatrix> om(out.data().data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  om.noalias() = am * bm;
  return out;
}

}  // namespace umps
