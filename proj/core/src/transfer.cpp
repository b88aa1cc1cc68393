#include "umps/transfer.hpp"

#include <algorithm>
#include <memory>

#include <Eigen/Core>

namespace umps {

namespace {

void check_site(const Tensor& top, const Tensor* op, const Tensor& bottom) {
  if (top.rank() != 3 || bottom.rank() != 3) throw ShapeError("transfer: site tensors must have rank 3");
  if (op) {
    if (op->rank() != 4) throw ShapeError("transfer: MPO tensors must have rank 4");
    if (op->shape()[1] != top.shape()[1] || op->shape()[2] != bottom.shape()[1])
      throw ShapeError("transfer: MPO physical dims " + to_string(op->shape()) + " do not match states " +
                       to_string(top.shape()) + " / " + to_string(bottom.shape()));
  } else if (top.shape()[1] != bottom.shape()[1]) {
    throw ShapeError("transfer: physical dims differ between layers");
  }
}

Shape env_shape(std::size_t t, std::size_t w, std::size_t b) { return {t, w, b}; }

}  // namespace

namespace {

using RowMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatView = Eigen::Map<RowMatrix>;
using ConstMatView = Eigen::Map<const RowMatrix>;

Eigen::Index ix(std::size_t n) { return static_cast<Eigen::Index>(n); }

ConstMatView view(const Tensor& t, std::size_t rows) {
  return ConstMatView(t.data().data(), ix(rows), ix(t.size() / rows));
}
MatView view(Tensor& t, std::size_t rows) { return MatView(t.data().data(), ix(rows), ix(t.size() / rows)); }

void check_env(const Tensor& env, std::size_t top, std::size_t w, std::size_t bottom, const char* who) {
  if (env.rank() != 3 || env.shape()[0] != top || env.shape()[1] != w || env.shape()[2] != bottom)
    throw ShapeError(std::string(who) + ": environment " + to_string(env.shape()) + " does not fit (" +
                     std::to_string(top) + "," + std::to_string(w) + "," + std::to_string(bottom) + ")");
}

// op (w,p,q,w') as a matrix; rows (p,w') and columns (w,q), or the transpose layout
RowMatrix op_matrix(const Tensor& op, bool rows_out) {
  const auto& s = op.shape();
  const std::size_t W = s[0], P = s[1], Q = s[2], V = s[3];
  RowMatrix m = rows_out ? RowMatrix(ix(P * V), ix(W * Q)) : RowMatrix(ix(W * Q), ix(P * V));
  for (std::size_t w = 0; w < W; ++w)
    for (std::size_t p = 0; p < P; ++p)
      for (std::size_t q = 0; q < Q; ++q)
        for (std::size_t v = 0; v < V; ++v) {
          const cplx x = op[((w * P + p) * Q + q) * V + v];
          if (rows_out) m(ix(p * V + v), ix(w * Q + q)) = x;
          else m(ix(w * Q + q), ix(p * V + v)) = x;
        }
  return m;
}

// out block t = m * in block t, for blocks laid out one after another
void batched_apply(const RowMatrix& m, const Tensor& in, Tensor& out, std::size_t blocks) {
  const std::size_t cols = in.size() / (blocks * static_cast<std::size_t>(m.cols()));
  const auto in_block = static_cast<std::size_t>(m.cols()) * cols, out_block = static_cast<std::size_t>(m.rows()) * cols;
  for (std::size_t t = 0; t < blocks; ++t) {
    ConstMatView x(in.data().data() + t * in_block, m.cols(), ix(cols));
    MatView y(out.data().data() + t * out_block, m.rows(), ix(cols));
    y.noalias() = m * x;
  }
}

}  // namespace

// Both kernels order the contractions so that every intermediate is already
// row-major in the index order the next GEMM needs; nothing is permuted.

Tensor apply_left_conj(const Tensor& env, const Tensor& top_conj, const Tensor* op, const Tensor& bottom) {
  check_site(top_conj, op, bottom);
  const std::size_t t = top_conj.shape()[0], p = top_conj.shape()[1], tr = top_conj.shape()[2];
  const std::size_t b = bottom.shape()[0], q = bottom.shape()[1], br = bottom.shape()[2];
  const std::size_t w = op ? op->shape()[0] : 1, wr = op ? op->shape()[3] : 1;
  check_env(env, t, w, b, "apply_left");

  // (t,w,b) x (b,q,b') -> (t,w,q,b')
  Tensor x({t, w, q, br});
  view(x, t * w).noalias() = view(env, t * w) * view(bottom, b);
  Tensor y;
  if (op) {
    // -> (t,p,w',b')
    y = Tensor({t, p, wr, br});
    batched_apply(op_matrix(*op, true), x, y, t);
  } else {
    y = std::move(x);
  }
  // (t,p,t')^T (t,p,w',b') -> (t',w',b')
  Tensor out({tr, wr, br});
  view(out, tr).noalias() = view(top_conj, t * p).transpose() * view(y, t * p);
  return out;
}

Tensor apply_right_conj(const Tensor& env, const Tensor& top_conj, const Tensor* op, const Tensor& bottom) {
  check_site(top_conj, op, bottom);
  const std::size_t t = top_conj.shape()[0], p = top_conj.shape()[1], tr = top_conj.shape()[2];
  const std::size_t b = bottom.shape()[0], q = bottom.shape()[1], br = bottom.shape()[2];
  const std::size_t w = op ? op->shape()[0] : 1, wr = op ? op->shape()[3] : 1;
  check_env(env, tr, wr, br, "apply_right");

  // (t,p,t') x (t',w',b') -> (t,p,w',b')
  Tensor z({t, p, wr, br});
  view(z, t * p).noalias() = view(top_conj, t * p) * view(env, tr);
  Tensor y;
  if (op) {
    // -> (t,w,q,b')
    y = Tensor({t, w, q, br});
    batched_apply(op_matrix(*op, false), z, y, t);
  } else {
    y = std::move(z);
  }
  // (t,w,q,b') x (b,q,b')^T -> (t,w,b)
  Tensor out({t, w, b});
  view(out, t * w).noalias() = view(y, t * w) * view(bottom, b).transpose();
  return out;
}

Tensor apply_left(const Tensor& env, const Tensor& top, const Tensor* op, const Tensor& bottom) {
  return apply_left_conj(env, top.conj(), op, bottom);
}

Tensor apply_right(const Tensor& env, const Tensor& top, const Tensor* op, const Tensor& bottom) {
  return apply_right_conj(env, top.conj(), op, bottom);
}

LinearMap transfer_map(std::span<const Tensor> top, std::span<const Tensor> bottom, std::span<const Tensor> ops,
                       Side side) {
  const std::size_t L = top.size();
  if (L == 0 || bottom.size() != L || (!ops.empty() && ops.size() != L))
    throw ShapeError("transfer_map: unit cells of the layers differ");
  auto tops = std::make_shared<std::vector<Tensor>>();
  for (const auto& t : top) tops->push_back(t.conj());
  auto bots = std::make_shared<std::vector<Tensor>>(bottom.begin(), bottom.end());
  auto mpo = std::make_shared<std::vector<Tensor>>(ops.begin(), ops.end());
  for (std::size_t n = 0; n < L; ++n) check_site((*tops)[n], mpo->empty() ? nullptr : &(*mpo)[n], (*bots)[n]);

  Shape shape;
  if (side == Side::left) {
    shape = env_shape(top[0].shape()[0], ops.empty() ? 1 : ops[0].shape()[0], bottom[0].shape()[0]);
  } else {
    shape = env_shape(top[L - 1].shape()[2], ops.empty() ? 1 : ops[L - 1].shape()[3], bottom[L - 1].shape()[2]);
  }
  LinearMap map;
  map.dim = num_elements(shape);
  map.apply = [tops, bots, mpo, shape, side](std::span<const cplx> in, std::span<cplx> out) {
    Tensor g(shape, std::vector<cplx>(in.begin(), in.end()));
    const std::size_t L = tops->size();
    for (std::size_t k = 0; k < L; ++k) {
      const std::size_t n = side == Side::left ? k : L - 1 - k;
      const Tensor* op = mpo->empty() ? nullptr : &(*mpo)[n];
      g = side == Side::left ? apply_left_conj(g, (*tops)[n], op, (*bots)[n])
                             : apply_right_conj(g, (*tops)[n], op, (*bots)[n]);
    }
    if (g.size() != out.size()) throw ShapeError("transfer_map: unit cell does not close on itself");
    std::copy(g.data().begin(), g.data().end(), out.begin());
  };
  return map;
}

LinearMap mixed_transfer_map(const UniformMPS& top, const UniformMPS& bottom, Side side, const MPO* mpo) {
  if (top.length() != bottom.length() || (mpo && mpo->length() != top.length()))
    throw ShapeError("mixed_transfer_map: unit cells differ; extend to a common length first");
  const std::span<const Tensor> ops = mpo ? mpo->sites() : std::span<const Tensor>{};
  if (side == Side::left) return transfer_map(top.al(), bottom.al(), ops, side);
  return transfer_map(top.ar(), bottom.ar(), ops, side);
}

Tensor apply_left_double(const Tensor& env, const Tensor& op, const Tensor& site) {
  // env (t, u, w, b); site (b,q,b'); op (w,p,q,w'); conj op (u,p,r,u'); conj site (t,r,t')
  Tensor x = contract(env, site, {{3, 0}});                    // (t,u,w,q,b')
  Tensor y = contract(x, op, {{2, 0}, {3, 2}});                // (t,u,b',p,w')
  Tensor z = contract(y, op.conj(), {{1, 0}, {3, 1}});         // (t,b',w',r,u')
  Tensor r = contract(site.conj(), z, {{0, 0}, {1, 3}});       // (t',b',w',u')
  return r.permuted({0, 3, 2, 1});
}

Tensor apply_right_double(const Tensor& env, const Tensor& op, const Tensor& site) {
  // env (t', u', w', b')
  Tensor x = contract(site, env, {{2, 3}});                    // (b,q,t',u',w')
  Tensor y = contract(x, op, {{1, 2}, {4, 3}});                // (b,t',u',w,p)
  Tensor z = contract(y, op.conj(), {{2, 3}, {4, 1}});         // (b,t',w,u,r)
  Tensor r = contract(site.conj(), z, {{1, 4}, {2, 1}});       // (t,b,w,u)
  return r.permuted({0, 3, 2, 1});
}

LinearMap double_layer_map(std::span<const Tensor> sites, std::span<const Tensor> ops, Side side) {
  const std::size_t L = sites.size();
  if (L == 0 || ops.size() != L) throw ShapeError("double_layer_map: unit cells differ");
  auto s = std::make_shared<std::vector<Tensor>>(sites.begin(), sites.end());
  auto o = std::make_shared<std::vector<Tensor>>(ops.begin(), ops.end());
  Shape shape;
  if (side == Side::left) {
    const std::size_t chi = sites[0].shape()[0], D = ops[0].shape()[0];
    shape = {chi, D, D, chi};
  } else {
    const std::size_t chi = sites[L - 1].shape()[2], D = ops[L - 1].shape()[3];
    shape = {chi, D, D, chi};
  }
  LinearMap map;
  map.dim = num_elements(shape);
  map.apply = [s, o, shape, side](std::span<const cplx> in, std::span<cplx> out) {
    Tensor g(shape, std::vector<cplx>(in.begin(), in.end()));
    const std::size_t L = s->size();
    for (std::size_t k = 0; k < L; ++k) {
      const std::size_t n = side == Side::left ? k : L - 1 - k;
      g = side == Side::left ? apply_left_double(g, (*o)[n], (*s)[n]) : apply_right_double(g, (*o)[n], (*s)[n]);
    }
    std::copy(g.data().begin(), g.data().end(), out.begin());
  };
  return map;
}

}  // namespace umps
