#include "umps/environment.hpp"

#include <algorithm>
#include <cmath>

#include "umps/transfer.hpp"

namespace umps {

namespace {

// Identity embedded in the first MPO slice, slightly perturbed so that the
// start vector is never confined to a symmetry sector.
std::vector<cplx> default_guess(const Shape& shape) {
  Rng rng(0x9e3779b9);
  std::normal_distribution<double> normal;
  std::vector<cplx> v(num_elements(shape));
  for (auto& x : v) {
    const double re = normal(rng);
    const double im = normal(rng);
    x = 1e-3 * cplx(re, im);
  }
  const std::size_t n = std::min(shape[0], shape[2]);
  for (std::size_t i = 0; i < n; ++i) v[(i * shape[1]) * shape[2] + i] += 1.0;
  return v;
}

std::vector<cplx> pick_guess(const Tensor* warm, const Shape& shape) {
  if (warm && warm->shape() == shape && warm->all_finite() && warm->norm() > 0.0) return warm->storage();
  return default_guess(shape);
}

void fix_phase(Tensor& gl) {
  const auto& s = gl.shape();
  cplx trace = 0.0;
  for (std::size_t i = 0; i < std::min(s[0], s[2]); ++i) trace += gl[(i * s[1]) * s[2] + i];
  cplx ref = trace;
  if (std::abs(trace) <= 1e-8 * gl.norm()) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < gl.size(); ++k)
      if (std::abs(gl[k]) > std::abs(gl[best])) best = k;
    ref = gl[best];
  }
  if (std::abs(ref) > 0.0) gl *= std::conj(ref) / std::abs(ref);
}

cplx closure(const Tensor& gl, const Tensor& c_top, const Tensor& c_bottom, const Tensor& gr) {
  const Tensor x = contract(gl, c_bottom, {{2, 0}});          // (t,w,b2)
  const Tensor y = contract(c_top.conj(), x, {{0, 0}});       // (t2,w,b2)
  return contract(y, gr, {{0, 0}, {1, 1}, {2, 2}})[0];
}

}  // namespace

MixedEnvironment environments(const UniformMPS& top, const UniformMPS& bottom, const MPO* mpo,
                              const EnvOptions& options, const MixedEnvironment* warm) {
  const std::size_t L = top.length();
  if (bottom.length() != L || (mpo && mpo->length() != L))
    throw ShapeError("environments: unit cells differ; extend to a common length first");
  const std::span<const Tensor> ops = mpo ? mpo->sites() : std::span<const Tensor>{};

  const LinearMap left = transfer_map(top.al(), bottom.al(), ops, Side::left);
  const LinearMap right = transfer_map(top.ar(), bottom.ar(), ops, Side::right);
  const Shape shape_l{top.bond_dim(0), mpo ? mpo->bond_dim(0) : 1, bottom.bond_dim(0)};
  const Shape shape_r{top.bond_dim(0), mpo ? mpo->bond_dim(0) : 1, bottom.bond_dim(0)};
  const bool use_warm = warm && warm->length() == L;

  EigOptions eo;
  eo.tol = options.tol;
  eo.krylov_dim = options.krylov_dim;
  eo.max_restarts = options.max_restarts;
  const EigResult el = leading_eig(left, pick_guess(use_warm ? &warm->gl[0] : nullptr, shape_l), eo);
  const EigResult er = leading_eig(right, pick_guess(use_warm ? &warm->gr[L - 1] : nullptr, shape_r), eo);

  MixedEnvironment env;
  env.cell_lambda = el.value;
  env.lambda = std::abs(el.value) > 0.0 ? std::exp(std::log(el.value) / static_cast<double>(L)) : cplx(0.0);
  env.converged = el.converged && er.converged;
  env.degenerate = el.degenerate || er.degenerate;
  env.residual = std::max(el.residual, er.residual);
  env.matvecs = el.matvecs + er.matvecs;
  env.orthogonal = !(std::abs(env.lambda) >= options.orthogonal_threshold);

  env.gl.resize(L);
  env.gr.resize(L);
  env.gl[0] = Tensor(shape_l, el.vector);
  fix_phase(env.gl[0]);
  env.gr[L - 1] = Tensor(shape_r, er.vector);

  const cplx scale = env.orthogonal ? cplx(1.0) : env.lambda;
  for (std::size_t n = 0; n + 1 < L; ++n) {
    const Tensor* op = mpo ? &mpo->site(n) : nullptr;
    env.gl[n + 1] = apply_left(env.gl[n], top.al(n), op, bottom.al(n));
    env.gl[n + 1] /= scale;
  }
  for (std::size_t n = L - 1; n >= 1; --n) {
    const Tensor* op = mpo ? &mpo->site(n) : nullptr;
    env.gr[n - 1] = apply_right(env.gr[n], top.ar(n), op, bottom.ar(n));
    env.gr[n - 1] /= scale;
  }
  if (!env.orthogonal) {
    for (std::size_t n = 0; n < L; ++n) {
      const std::size_t b = (n + L - 1) % L;
      const cplx ov = closure(env.gl[n], top.c(b), bottom.c(b), env.gr[b]);
      if (std::abs(ov) > 1e-300) env.gr[b] /= ov;
    }
  }
  return env;
}

cplx environment_overlap(const MixedEnvironment& env, const UniformMPS& top, const UniformMPS& bottom, std::size_t n) {
  const std::size_t L = env.length();
  const std::size_t b = (n % L + L - 1) % L;
  return closure(env.gl[n % L], top.c(b), bottom.c(b), env.gr[b]);
}

}  // namespace umps
