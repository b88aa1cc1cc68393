#include "umps/vomps.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "umps/baseline.hpp"
#include "umps/canonical.hpp"
#include "umps/io.hpp"
#include "umps/linalg.hpp"
#include "umps/observables.hpp"
#include "umps/synthetic.hpp"

namespace umps {

namespace {

void normalize(Tensor& t, bool& vanished) {
  const double nrm = t.norm();
  if (!(nrm > 0.0) || !std::isfinite(nrm)) {
    vanished = true;
    return;
  }
  t /= nrm;
}

UniformMPS schmidt_seed(const UniformMPS& source, std::span<const std::size_t> target, Rng& rng, double pad_scale) {
  const std::size_t L = source.length();
  std::vector<std::size_t> cap(L);
  bool grow = false;
  for (std::size_t n = 0; n < L; ++n) {
    cap[n] = std::min(target[n], source.bond_dim(n));
    grow = grow || target[n] > cap[n];
  }
  UniformMPS seed = schmidt_truncate(source, cap).state;
  if (grow) seed = pad_state(seed, target, rng, pad_scale);
  return seed;
}

}  // namespace

void VompsConfig::validate() const {
  if (!(eta > 0.0)) throw std::invalid_argument("VompsConfig: eta must be positive");
  if (target_chi.empty()) throw std::invalid_argument("VompsConfig: target_chi is empty");
  for (auto c : target_chi)
    if (c == 0) throw std::invalid_argument("VompsConfig: target_chi entries must be >= 1");
  if (max_iter == 0) throw std::invalid_argument("VompsConfig: max_iter must be >= 1");
  if (init == InitStrategy::provided && !initial) throw std::invalid_argument("VompsConfig: provided init needs a state");
}

CenterPair compute_centers(const MixedEnvironment& env, const UniformMPS& source, const MPO* mpo) {
  const std::size_t L = env.length();
  if (source.length() != L || (mpo && mpo->length() != L))
    throw ShapeError("compute_centers: unit cells of environment, source and MPO differ");
  CenterPair out;
  out.acp.resize(L);
  out.cp.resize(L);
  const cplx scale = std::abs(env.lambda) > 0.0 ? env.lambda : cplx(1.0);
  for (std::size_t n = 0; n < L; ++n) {
    const Tensor x = contract(env.gl[n], source.ac(n), {{2, 0}});  // (t,w,q,b')
    Tensor ac;
    if (mpo) {
      const Tensor y = contract(x, mpo->site(n), {{1, 0}, {2, 2}});  // (t,b',p,w')
      ac = contract(y, env.gr[n], {{1, 2}, {3, 1}});
    } else {
      ac = contract(x, env.gr[n], {{1, 1}, {3, 2}});
    }
    ac /= scale;
    Tensor c = contract(contract(env.gl[(n + 1) % L], source.c(n), {{2, 0}}), env.gr[n], {{1, 1}, {2, 2}});
    normalize(ac, out.vanished);
    normalize(c, out.vanished);
    out.acp[n] = std::move(ac);
    out.cp[n] = std::move(c);
  }
  return out;
}

Gauges extract_gauges(const CenterPair& centers) {
  const std::size_t L = centers.acp.size();
  if (centers.cp.size() != L) throw ShapeError("extract_gauges: center lists differ in length");
  Gauges out;
  out.al.resize(L);
  out.ar.resize(L);
  for (std::size_t n = 0; n < L; ++n) {
    const Tensor& ac = centers.acp[n];
    const Shape shape = ac.shape();
    const Tensor& c_right = centers.cp[n];
    const Tensor& c_left = centers.cp[(n + L - 1) % L];
    if (c_right.shape() != Shape{shape[2], shape[2]} || c_left.shape() != Shape{shape[0], shape[0]})
      throw ShapeError("extract_gauges: bond matrices do not match A_C' at site " + std::to_string(n));

    const PolarLeft pa = polar_left(to_matrix(ac, 2));
    const PolarLeft pc = polar_left(to_matrix(c_right, 1));
    out.al[n] = to_tensor(Matrix(pa.W * pc.W.adjoint()), shape);

    const PolarRight qa = polar_right(to_matrix(ac, 1));
    const PolarRight qc = polar_right(to_matrix(c_left, 1));
    out.ar[n] = to_tensor(Matrix(qc.W.adjoint() * qa.W), shape);

    if (min_relative_singular_value(to_matrix(c_right, 1)) < 1e-14) out.singular = true;
  }
  return out;
}

double error_epsilon(const CenterPair& centers, std::span<const Tensor> al) {
  if (al.size() != centers.acp.size()) throw ShapeError("error_epsilon: unit cells differ");
  double eps = 0.0;
  for (std::size_t n = 0; n < al.size(); ++n) {
    const Tensor alc = contract(al[n], centers.cp[n], {{2, 0}});
    eps = std::max(eps, (centers.acp[n] - alc).norm());
  }
  return eps;
}

double epsilon_measure(const UniformMPS& candidate, const UniformMPS& source, const MPO* mpo, double tol) {
  std::size_t L = lcm_length(candidate.length(), source.length());
  if (mpo) L = lcm_length(L, mpo->length());
  const UniformMPS a = extend(candidate, L);
  const UniformMPS m = extend(mixed_canonical(source), L);
  std::optional<MPO> o;
  if (mpo) o = extend(*mpo, L);
  EnvOptions eo;
  eo.tol = tol;
  const MixedEnvironment env = environments(a, m, o ? &*o : nullptr, eo);
  return error_epsilon(compute_centers(env, m, o ? &*o : nullptr), a.al());
}

UniformMPS pad_state(const UniformMPS& state, std::span<const std::size_t> chi, Rng& rng, double pad_scale) {
  const std::size_t L = state.length();
  const auto target = per_bond(chi, L);
  std::normal_distribution<double> normal;
  std::vector<Tensor> sites;
  for (std::size_t n = 0; n < L; ++n) {
    const Tensor& a = state.al(n);
    const auto& s = a.shape();
    const std::size_t cl = target[n], cr = target[(n + 1) % L];
    if (cl < s[0] || cr < s[2]) throw ShapeError("pad_state: target bond dims must not shrink the state");
    double mean = 0.0;
    for (const auto& x : a.data()) mean += std::abs(x);
    mean /= static_cast<double>(a.size());
    Tensor b({cl, s[1], cr});
    for (std::size_t i = 0; i < cl; ++i)
      for (std::size_t p = 0; p < s[1]; ++p)
        for (std::size_t j = 0; j < cr; ++j) {
          const double re = normal(rng);
          const double im = normal(rng);
          cplx v = pad_scale * mean * cplx(re, im);
          if (i < s[0] && j < s[2]) v += a({i, p, j});
          b({i, p, j}) = v;
        }
    sites.push_back(std::move(b));
  }
  return mixed_canonical(sites);
}

VompsResult vomps_truncate(const UniformMPS& source, const VompsConfig& cfg, const MPO* mpo) {
  using clock = std::chrono::steady_clock;
  cfg.validate();
  std::size_t L = source.length();
  if (mpo) L = lcm_length(L, mpo->length());
  if (cfg.init == InitStrategy::provided) L = lcm_length(L, cfg.initial->length());
  L = lcm_length(L, cfg.target_chi.size());

  const UniformMPS m = extend(mixed_canonical(source), L);
  std::optional<MPO> o;
  if (mpo) o = extend(*mpo, L);
  const MPO* op = o ? &*o : nullptr;
  for (std::size_t n = 0; op && n < L; ++n)
    if (op->phys_in(n) != m.phys_dim(n))
      throw ShapeError("vomps_truncate: MPO input dimension does not match the state at site " + std::to_string(n));
  const auto target = per_bond(cfg.target_chi, L);

  Rng rng(cfg.seed);
  UniformMPS a = [&]() -> UniformMPS {
    switch (cfg.init) {
      case InitStrategy::provided: {
        UniformMPS s = extend(*cfg.initial, L);
        for (std::size_t n = 0; n < L; ++n)
          if (s.bond_dim(n) != target[n])
            throw ShapeError("vomps_truncate: provided initial state does not have the target bond dims");
        return s;
      }
      case InitStrategy::random: {
        std::vector<Tensor> sites;
        for (std::size_t n = 0; n < L; ++n) {
          const std::size_t d = op ? op->phys_out(n) : m.phys_dim(n);
          sites.push_back(Tensor::random({target[n], d, target[(n + 1) % L]}, rng));
        }
        return mixed_canonical(sites);
      }
      case InitStrategy::schmidt:
      default:
        if (op) {
          // seed from the source, whose physical dims may differ from the MPO output
          bool same = true;
          for (std::size_t n = 0; n < L; ++n) same = same && op->phys_out(n) == m.phys_dim(n);
          if (!same) {
            std::vector<Tensor> sites;
            for (std::size_t n = 0; n < L; ++n)
              sites.push_back(Tensor::random({target[n], op->phys_out(n), target[(n + 1) % L]}, rng));
            return mixed_canonical(sites);
          }
        }
        return schmidt_seed(m, target, rng, cfg.pad_scale);
    }
  }();

  const double norm_density = !op ? 1.0 : cfg.norm_density ? *cfg.norm_density : mpo_norm_per_site(m, *op);
  const double fid_scale = 1.0 / std::sqrt(norm_density);

  VompsResult result{a, {}};
  TruncationReport& report = result.report;
  double best_eps = std::numeric_limits<double>::infinity();
  double tol_inner = cfg.eig_tol_initial;
  std::optional<MixedEnvironment> warm;
  for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
    const auto t0 = clock::now();
    EnvOptions eo;
    eo.tol = tol_inner;
    eo.krylov_dim = cfg.krylov_dim;
    eo.max_restarts = cfg.max_restarts;
    const MixedEnvironment env = environments(a, m, op, eo, cfg.warm_start && warm ? &*warm : nullptr);
    report.degenerate = report.degenerate || env.degenerate;
    const double fid = std::abs(env.lambda) * fid_scale;
    IterationRecord rec;
    rec.iter = it;
    rec.matvecs = env.matvecs;
    rec.abs_lambda = fid;
    if (env.orthogonal || fid < 1e-8) {
      report.orthogonal = true;
      rec.epsilon = std::numeric_limits<double>::infinity();
      rec.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
      report.iterations.push_back(rec);
      break;
    }
    const CenterPair centers = compute_centers(env, m, op);
    const double eps = error_epsilon(centers, a.al());
    rec.epsilon = eps;
    if (eps < best_eps) {
      best_eps = eps;
      result.state = a;
    }
    if (eps < cfg.eta) {
      report.converged = true;
      rec.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
      report.iterations.push_back(rec);
      break;
    }
    const Gauges g = extract_gauges(centers);
    report.singular_center = report.singular_center || g.singular;
    a = UniformMPS(g.al, g.ar, centers.cp);
    tol_inner = std::max(cfg.eig_tol_floor, cfg.eig_tol_ratio * eps);
    warm = env;
    rec.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    report.iterations.push_back(rec);
  }

  result.state = mixed_canonical(result.state);
  report.final_epsilon = best_eps;
  EnvOptions eo;
  eo.tol = 1e-13;
  const MixedEnvironment env = environments(result.state, m, op, eo);
  report.final_lambda = env.lambda;
  report.fidelity = std::abs(env.lambda) * fid_scale;
  if (report.fidelity < 1e-8) report.orthogonal = true;
  return result;
}

VompsResult grow_bond(const UniformMPS& state, const MPO& mpo, std::size_t new_chi, const VompsConfig& cfg) {
  const std::size_t L = lcm_length(state.length(), mpo.length());
  for (std::size_t n = 0; n < L; ++n)
    if (new_chi < state.bond_dim(n)) throw std::invalid_argument("grow_bond: new bond dim is smaller than the state's");
  VompsConfig c = cfg;
  c.target_chi = {new_chi};
  Rng rng(cfg.seed);
  const std::size_t chi[1] = {new_chi};
  c.initial = pad_state(extend(state, L), chi, rng, cfg.pad_scale);
  c.init = InitStrategy::provided;
  return vomps_truncate(state, c, &mpo);
}

void write_report_csv(std::ostream& os, const TruncationReport& report, const std::vector<std::string>& header) {
  for (const auto& line : header) os << "# " << line << '\n';
  os << "iter,epsilon,abs_lambda,wall_ms\n";
  for (const auto& r : report.iterations)
    os << r.iter << ',' << format_double(r.epsilon) << ',' << format_double(r.abs_lambda) << ','
       << format_double(r.wall_ms) << '\n';
}

}  // namespace umps
