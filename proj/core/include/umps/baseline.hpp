#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "umps/mps.hpp"

namespace umps {

/// Refusal of a dense computation whose memory estimate exceeds the guard.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, double estimate_bytes)
      : std::runtime_error(what), estimate_bytes_(estimate_bytes) {}
  double estimate_bytes() const noexcept { return estimate_bytes_; }

 private:
  double estimate_bytes_;
};

struct SchmidtTruncation {
  UniformMPS state;
  /// Sum over bonds of the dropped squared (normalized) Schmidt values.
  double discarded_weight = 0.0;
  /// Kept and first dropped value coincide to 1e-12 relative on some bond;
  /// the cut then follows the descending order with index tie-break.
  bool degenerate_cut = false;
  std::vector<std::size_t> kept;
};

/// Keeps the new_chi[n] largest Schmidt values of every C[n] at once,
/// projects the left-canonical tensors onto the kept Schmidt vectors and
/// re-canonicalizes. A single entry in new_chi applies to every bond;
/// values >= the current bond dim leave that bond untouched. Values below
/// `relative_cutoff` times the largest one are dropped as well.
SchmidtTruncation schmidt_truncate(const UniformMPS& state, std::span<const std::size_t> new_chi,
                                   double relative_cutoff = 0.0);
SchmidtTruncation schmidt_truncate(const UniformMPS& state, std::size_t new_chi, double relative_cutoff = 0.0);

struct LocalTruncateOptions {
  double memory_limit_bytes = 2.0e9;
  double eig_tol = 1e-13;
  /// Product-state Schmidt values below this (relative) are treated as zero.
  double rank_cutoff = 1e-14;
};

/// Bytes needed by the dense product-state environments, O(chi^2 d D^2).
double local_truncate_memory_estimate(const UniformMPS& state, const MPO& mpo);

/// Local truncation of O|M>: the product tensors with fused bond chi*D are
/// brought to canonical form through the fixed points of the product
/// double layer, then Schmidt-truncated to new_chi.
/// Throws ResourceError when the memory estimate exceeds the guard.
SchmidtTruncation mpo_mps_local_truncate(const UniformMPS& state, const MPO& mpo, std::span<const std::size_t> new_chi,
                                         const LocalTruncateOptions& options = {});
SchmidtTruncation mpo_mps_local_truncate(const UniformMPS& state, const MPO& mpo, std::size_t new_chi,
                                         const LocalTruncateOptions& options = {});

}  // namespace umps
