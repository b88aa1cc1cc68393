#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "umps/mps.hpp"
#include "umps/vomps.hpp"

namespace umps {

struct PowerReference {
  /// Without a state the infidelity diagnostic is taken against the final
  /// iterate, best over its translations, once the run ends.
  std::optional<UniformMPS> state;
  double magnetization = 0.0;
  double free_energy = 0.0;
};

struct PowerConfig {
  std::size_t chi = 16;
  std::size_t max_iter = 500;
  /// Stop when 1 - fidelity with the previous iterate, or with its one-site
  /// translation, drops below this.
  double tol = 1e-10;
  /// Settings of each truncation step.
  double eta = 1e-10;
  std::size_t vomps_max_iter = 100;
  std::uint64_t seed = 0;
  /// Site tensor carrying the observable, same shape as the MPO tensor at
  /// site 0; enables the magnetization diagnostics.
  std::optional<Tensor> impurity;
  /// Converts the per-site eigenvalue into a free energy -log|lambda| / beta.
  double beta = 1.0;
  std::optional<PowerReference> reference;
  std::size_t max_period = 4;
};

struct PowerRecord {
  std::size_t iter = 0;
  /// 1 - F(psi_k, T psi_{k-1}) with T the one-site translation.
  double translation_infidelity = 0.0;
  /// 1 - F(psi_k, psi_{k-1}).
  double step_infidelity = 0.0;
  double magnetization = 0.0;
  double magnetization_change = 0.0;
  double free_energy = 0.0;
  /// Reference diagnostics; NaN without a reference. Magnetizations are
  /// compared by magnitude.
  double reference_infidelity = 0.0;
  double reference_magnetization_diff = 0.0;
  double reference_free_energy_diff = 0.0;
  std::size_t vomps_iterations = 0;
  double epsilon = 0.0;
  double wall_ms = 0.0;
};

struct PowerResult {
  UniformMPS state;
  UniformMPS previous;
  std::vector<PowerRecord> records;
  bool converged = false;
  /// Smallest p <= max_period with 1 - F(psi_k, psi_{k-p}) < 100 tol; 0 if none.
  std::size_t period = 0;
  /// Consecutive iterates agree up to a one-site translation but not exactly.
  bool translation_alternation = false;
  double free_energy = 0.0;
  double magnetization = 0.0;
};

/// Repeated application of `mpo` followed by variational truncation to
/// cfg.chi, starting from `init`. Each truncation is seeded by whichever of
/// the previous iterate and its translations has the best fidelity with
/// O psi_{k-1}. Eigenvalue and magnetization use the sandwich
/// <psi_k| O |psi_{k-1}>.
PowerResult power_method(const MPO& mpo, const UniformMPS& init, const PowerConfig& cfg);

/// CSV with the per-iteration diagnostics, preceded by '#' header lines.
void write_power_csv(std::ostream& os, const PowerResult& result, const std::vector<std::string>& header);

}  // namespace umps
