#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "umps/environment.hpp"
#include "umps/mps.hpp"

namespace umps {

enum class InitStrategy { random, schmidt, provided };

struct VompsConfig {
  /// Bond dims of the result, bond n left of site n; one entry broadcasts.
  std::vector<std::size_t> target_chi;
  double eta = 1e-10;
  std::size_t max_iter = 500;
  /// Inner eigensolver tolerance: max(eig_tol_floor, eig_tol_ratio * epsilon).
  double eig_tol_ratio = 1e-2;
  double eig_tol_floor = 1e-14;
  /// Tolerance used before the first epsilon is known.
  double eig_tol_initial = 1e-8;
  std::size_t krylov_dim = 30;
  std::size_t max_restarts = 300;
  InitStrategy init = InitStrategy::schmidt;
  std::optional<UniformMPS> initial;  // used with InitStrategy::provided
  std::uint64_t seed = 0;
  /// Reuse the previous environments as eigensolver starting vectors.
  bool warm_start = true;
  /// Relative scale of random padding when the seed must grow a bond.
  double pad_scale = 1e-3;
  /// Squared norm density of O|M> when known in advance (1 for unitary
  /// layers); computed from the double layer otherwise.
  std::optional<double> norm_density;

  void validate() const;
};

struct IterationRecord {
  std::size_t iter = 0;
  double epsilon = 0.0;
  double abs_lambda = 0.0;
  double wall_ms = 0.0;
  std::size_t matvecs = 0;  // transfer-operator applications in the environment solve
};

struct TruncationReport {
  std::vector<IterationRecord> iterations;
  bool converged = false;
  /// Per-site eigenvalue of the final (result, [O,] source) transfer map.
  cplx final_lambda{};
  /// Per-site fidelity of the result against the source (or O|source>).
  double fidelity = 0.0;
  double final_epsilon = 0.0;
  bool orthogonal = false;       // fidelity collapsed below 1e-8
  bool singular_center = false;  // a polar factor of C' was completed from a singular matrix
  bool degenerate = false;       // an environment eigenvalue was not separated
};

/// Updated center tensors A_C'[n] (chi, d, chi) and C'[n] (chi x chi, bond
/// right of site n), each of unit Frobenius norm.
struct CenterPair {
  std::vector<Tensor> acp, cp;
  bool vanished = false;  // some center had zero norm before normalization
};

/// A_C'[n] = GL[n] (O[n]) M_C[n] GR[n] / lambda and C'[n] = GL[n+1] C_M[n] GR[n],
/// with MPO bonds passed straight through in C'. `source` is the mixed
/// canonical M that was the bottom layer of `env`.
CenterPair compute_centers(const MixedEnvironment& env, const UniformMPS& source, const MPO* mpo = nullptr);

struct Gauges {
  std::vector<Tensor> al, ar;
  bool singular = false;  // some C' had relative singular value below 1e-14
};

/// AL[n] = W(A_C'[n]) W(C'[n])^dag from left polar decompositions and
/// AR[n] = W(C'[n-1])^dag W(A_C'[n]) from right polar decompositions.
Gauges extract_gauges(const CenterPair& centers);

/// max_n || A_C'[n] - AL[n] C'[n] ||_F.
double error_epsilon(const CenterPair& centers, std::span<const Tensor> al);

/// Epsilon of an arbitrary candidate against a source: one environment pass
/// and one center computation, measured with the candidate's AL.
double epsilon_measure(const UniformMPS& candidate, const UniformMPS& source, const MPO* mpo = nullptr,
                       double tol = 1e-13);

struct VompsResult {
  UniformMPS state;
  TruncationReport report;
};

/// Variational truncation of `source` (optionally with `mpo` applied) to
/// cfg.target_chi. The source is brought to mixed canonical form first and
/// unit cells are extended to their lcm. Non-convergence returns the last
/// iterate with report.converged == false.
VompsResult vomps_truncate(const UniformMPS& source, const VompsConfig& cfg, const MPO* mpo = nullptr);

/// Embeds the state into larger bonds, filling new entries with random
/// values of relative scale `pad_scale`, and re-canonicalizes.
UniformMPS pad_state(const UniformMPS& state, std::span<const std::size_t> chi, Rng& rng, double pad_scale = 1e-3);

/// vomps_truncate(state, mpo, new_chi) seeded by the padded state.
VompsResult grow_bond(const UniformMPS& state, const MPO& mpo, std::size_t new_chi, const VompsConfig& cfg = {});

/// CSV with columns iter, epsilon, abs_lambda, wall_ms, preceded by
/// `header` lines (each written as a '#' comment).
void write_report_csv(std::ostream& os, const TruncationReport& report, const std::vector<std::string>& header);

}  // namespace umps
