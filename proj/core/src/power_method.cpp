#include "umps/power_method.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "umps/canonical.hpp"
#include "umps/io.hpp"
#include "umps/observables.hpp"

namespace umps {

PowerResult power_method(const MPO& mpo, const UniformMPS& init, const PowerConfig& cfg) {
  using clock = std::chrono::steady_clock;
  for (std::size_t n = 0; n < mpo.length(); ++n)
    if (mpo.phys_out(n) != mpo.phys_in(n)) throw ShapeError("power_method: MPO must be square");
  if (cfg.chi == 0 || cfg.max_iter == 0) throw std::invalid_argument("power_method: chi and max_iter must be positive");
  const std::size_t L = lcm_length(init.length(), mpo.length());
  const MPO o = extend(mpo, L);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  UniformMPS psi = extend(mixed_canonical(init), L);
  std::deque<UniformMPS> history;  // most recent first
  history.push_front(psi);
  PowerResult result{psi, psi, {}, false, 0, false, 0.0, 0.0};
  double last_m = nan;
  std::vector<UniformMPS> iterates;

  for (std::size_t k = 1; k <= cfg.max_iter; ++k) {
    const auto t0 = clock::now();
    const UniformMPS prev = psi;

    // bond targets never exceed the exact rank bound chi * D
    std::vector<std::size_t> target(L);
    for (std::size_t n = 0; n < L; ++n) target[n] = std::min(cfg.chi, prev.bond_dim(n) * o.bond_dim(n));

    UniformMPS seed = prev;
    double best = -1.0;
    for (std::size_t s = 0; s < L; ++s) {
      const UniformMPS cand = s == 0 ? prev : translate(prev, s);
      const double f = fidelity_with_mpo(cand, prev, o);
      if (f > best + 1e-14) {
        best = f;
        seed = cand;
      }
    }
    bool grow = false;
    for (std::size_t n = 0; n < L; ++n) {
      if (seed.bond_dim(n) > target[n]) target[n] = seed.bond_dim(n);
      grow = grow || seed.bond_dim(n) < target[n];
    }
    if (grow) {
      Rng rng(cfg.seed + k);
      seed = pad_state(seed, target, rng);
    }

    VompsConfig vc;
    vc.target_chi = target;
    vc.eta = cfg.eta;
    vc.max_iter = cfg.vomps_max_iter;
    vc.seed = cfg.seed + k;
    vc.init = InitStrategy::provided;
    vc.initial = seed;
    const VompsResult r = vomps_truncate(prev, vc, &o);
    psi = r.state;

    PowerRecord rec;
    rec.iter = k;
    rec.vomps_iterations = r.report.iterations.size();
    rec.epsilon = r.report.final_epsilon;
    rec.step_infidelity = 1.0 - fidelity_per_site(psi, prev);
    rec.translation_infidelity = L == 1 ? rec.step_infidelity : 1.0 - fidelity_per_site(psi, translate(prev, 1));
    rec.free_energy = -std::log(std::abs(r.report.final_lambda)) / cfg.beta;
    if (cfg.impurity) {
      const MixedEnvironment env = environments(psi, prev, &o);
      rec.magnetization = impurity_ratio(env, psi, prev, o, *cfg.impurity, 0).real();
      rec.magnetization_change = std::isnan(last_m) ? nan : std::abs(rec.magnetization - last_m);
      last_m = rec.magnetization;
    } else {
      rec.magnetization = rec.magnetization_change = nan;
    }
    if (cfg.reference) {
      if (cfg.reference->state)
        rec.reference_infidelity = 1.0 - fidelity_per_site(psi, *cfg.reference->state);
      else
        iterates.push_back(psi);
      // magnitudes: which sign the symmetry breaking picks is arbitrary
      rec.reference_magnetization_diff = std::abs(std::abs(rec.magnetization) - std::abs(cfg.reference->magnetization));
      rec.reference_free_energy_diff = std::abs(rec.free_energy - cfg.reference->free_energy);
    } else {
      rec.reference_infidelity = rec.reference_magnetization_diff = rec.reference_free_energy_diff = nan;
    }

    history.push_front(psi);
    if (history.size() > cfg.max_period + 1) history.pop_back();
    rec.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    result.records.push_back(rec);
    result.state = psi;
    result.previous = prev;
    result.free_energy = rec.free_energy;
    result.magnetization = rec.magnetization;

    const bool fixed = rec.step_infidelity < cfg.tol;
    const bool shifted = L > 1 && rec.translation_infidelity < cfg.tol;
    if (fixed || shifted) {
      result.converged = true;
      result.translation_alternation = shifted && !fixed;
      break;
    }
  }

  if (cfg.reference && !cfg.reference->state) {
    for (std::size_t i = 0; i < iterates.size(); ++i) {
      double best = 0.0;
      for (std::size_t s = 0; s < L; ++s) best = std::max(best, fidelity_per_site(iterates[i], translate(psi, s)));
      result.records[i].reference_infidelity = 1.0 - best;
    }
  }

  for (std::size_t p = 1; p < history.size() && p <= cfg.max_period; ++p) {
    if (1.0 - fidelity_per_site(history[0], history[p]) < 100.0 * std::max(cfg.tol, 1e-12)) {
      result.period = p;
      break;
    }
  }
  return result;
}

void write_power_csv(std::ostream& os, const PowerResult& result, const std::vector<std::string>& header) {
  for (const auto& line : header) os << "# " << line << '\n';
  os << "iter,translation_infidelity,magnetization_change,reference_infidelity,reference_magnetization_diff,"
        "reference_free_energy_diff,free_energy,magnetization,vomps_iterations,epsilon,wall_ms\n";
  for (const auto& r : result.records) {
    os << r.iter << ',' << format_double(r.translation_infidelity) << ',' << format_double(r.magnetization_change)
       << ',' << format_double(r.reference_infidelity) << ',' << format_double(r.reference_magnetization_diff) << ','
       << format_double(r.reference_free_energy_diff) << ',' << format_double(r.free_energy) << ','
       << format_double(r.magnetization) << ',' << r.vomps_iterations << ',' << format_double(r.epsilon) << ','
       << format_double(r.wall_ms) << '\n';
  }
}

}  // namespace umps
