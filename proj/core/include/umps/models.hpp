#pragma once

#include <cstdint>
#include <vector>

#include "umps/baseline.hpp"
#include "umps/mps.hpp"

namespace umps {

// ---- XXZ chain ------------------------------------------------------------

struct XXZParams {
  double delta = 0.5;
  double dt = 0.05;
  int order = 2;  // 1 or 2
  void validate() const;
};

/// Two-site term Sx Sx + Sy Sy + delta Sz Sz (spin 1/2) as a 4x4 tensor
/// with index order (out1 out2, in1 in2); basis state 0 is spin up.
Tensor xxz_bond_hamiltonian(double delta);

/// exp(-i h dt) for the two-site term, as a (2, 2, 2, 2) tensor (out1, out2, in1, in2).
Tensor xxz_gate(double delta, double dt);

enum class Parity { even, odd };

/// One layer of identical two-site gates on a two-site unit cell. `even`
/// acts on sites (0, 1) of every cell, `odd` on (1, 2). The gate is split
/// by SVD, so the MPO bond carrying it has dimension <= d^2 and the other is 1.
MPO trotter_layer_mpo(const Tensor& gate, Parity parity);

struct GateLayer {
  Tensor gate;
  Parity parity;
};

/// Gates of one Trotter step: (even, odd) for order 1 and
/// (half even, odd, half even) for order 2.
std::vector<GateLayer> trotter_gates(const XXZParams& p);

/// Exact application of a layer of two-site unitaries to a two-site cell
/// state via one SVD of the gated two-site center, keeping at most max_chi
/// values above `relative_cutoff` on the gated bond.
SchmidtTruncation apply_gate_layer(const UniformMPS& state, const Tensor& gate, Parity parity, std::size_t max_chi,
                                   double relative_cutoff = 1e-10);

/// Layer sequence for one Trotter step: (even, odd) for order 1 and
/// (half even, odd, half even) for order 2.
std::vector<MPO> trotter_step(const XXZParams& p);

/// |up down up down ...> with a two-site unit cell and bond dimension 1.
UniformMPS neel_state();

/// (1 + Z) / 2 as a 2 x 2 tensor.
Tensor up_projector();

// ---- 2D classical Ising -----------------------------------------------------

struct IsingParams {
  double beta = 0.0;
  int coupling = 1;  // +1 ferromagnet, -1 antiferromagnet
  void validate() const;
};

/// ln(1 + sqrt 2) / 2.
double ising_beta_c();

/// Row-to-row transfer MPO (D = 2, d = 2) of the square-lattice Ising model
/// with bond weights exp(beta * coupling * s s'). Each weight matrix is split
/// as W = Q S Q with Q its symmetric square root of |W| and S the sign
/// factor, S placed on the right and incoming legs. Index order (left,
/// up = out, down = in, right).
MPO ising_mpo(const IsingParams& p);

/// The same network with the site tensor replaced by the one carrying an
/// extra factor of the spin (+1 for state 0), for magnetization ratios.
Tensor ising_magnetization_tensor(const IsingParams& p);

/// Spin flip (Pauli X) on the physical legs: `out_mask[n]` flips the output
/// leg of site n, `in_mask[n]` the input leg. Unit cell becomes the mask length.
MPO flip_physical(const MPO& mpo, const std::vector<bool>& out_mask, const std::vector<bool>& in_mask);

/// Pauli X on the physical index of the sites selected by `mask` (length is
/// the new unit cell).
UniformMPS flip_sites(const UniformMPS& state, const std::vector<bool>& mask);

/// Sublattice rotation of the antiferromagnetic transfer MPO: X on the
/// output legs of odd sites and on the input legs of even sites. The result
/// equals the ferromagnetic MPO up to a bond gauge.
MPO sublattice_rotate(const MPO& afm);

/// Bond gauge that turns the rotated antiferromagnet into the ferromagnet
/// tensor by tensor: X on the bond right of every even site.
MPO sublattice_gauge(const MPO& rotated);

/// Exact free energy per site -(1/beta) ln Z^(1/N) from Onsager's solution,
/// evaluated by adaptive Gauss-Kronrod quadrature.
double onsager_free_energy(double beta, double tol = 1e-13);

/// Same integral on a fixed composite Gauss-Legendre grid of `panels`
/// panels, for self-convergence checks.
double onsager_free_energy_fixed(double beta, std::size_t panels);

/// (1 - sinh(2 beta)^-4)^(1/8) above beta_c, 0 below.
double onsager_magnetization(double beta);

// ---- exact diagonalization --------------------------------------------------

struct EdTrace {
  std::vector<double> times;
  /// 1 - <(1 + Z)/2> on site 0, which starts spin up.
  std::vector<double> offset;
  /// Largest deviation of the total Sz from its initial value.
  double sz_drift = 0.0;
};

/// Periodic XXZ chain of `length` <= 20 sites started in the Neel state and
/// evolved with a Taylor series per step of size dt_exact (series summed to
/// machine precision). Samples at multiples of `sample_dt` up to t_max.
EdTrace ed_evolve(std::size_t length, double delta, double t_max, double sample_dt, double dt_exact = 0.01);

// ---- Trotter evolution of a uniform state -----------------------------------

struct EvolveConfig {
  XXZParams xxz;
  double t_max = 2.0;
  std::size_t chi = 64;
  double eta = 1e-10;
  std::size_t max_iter = 100;
  std::uint64_t seed = 0;
  /// Record every `sample_every` steps.
  std::size_t sample_every = 1;
};

struct EvolveRow {
  double t = 0.0;
  double offset = 0.0;
  double epsilon_last = 0.0;
  std::size_t chi_used = 1;
  bool converged = true;
};

/// Neel state evolved by Trotter layers. Each layer is applied exactly by
/// apply_gate_layer, which also seeds a variational truncation against the
/// layer MPO applied to the previous state.
std::vector<EvolveRow> evolve_neel(const EvolveConfig& cfg);

}  // namespace umps
