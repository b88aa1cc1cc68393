#pragma once

#include <span>
#include <vector>

#include "umps/mps.hpp"

namespace umps {

/// Random injective state with bond dims chi[n] (bond left of site n) and
/// physical dim d, in mixed canonical form. `decay` > 0 suppresses entries
/// towards large bond indices, which gives a decaying Schmidt spectrum.
UniformMPS random_state(std::span<const std::size_t> chi, std::size_t d, Rng& rng, double decay = 0.0);
UniformMPS random_state(std::size_t chi, std::size_t d, std::size_t length, Rng& rng, double decay = 0.0);

/// Single-site state whose bond matrix has exactly the given singular values
/// (normalized to unit 2-norm, sorted descending). Built from a diagonal
/// plus cyclic-shift left-canonical tensor, padded to physical dimension d
/// and rotated by a random unitary on the physical index. Requires d >= 2.
UniformMPS state_with_spectrum(std::span<const double> schmidt, std::size_t d, Rng& rng);

/// Random gauge transformation of every bond by an invertible matrix, keeping
/// the represented state; the result is not canonical.
std::vector<Tensor> random_gauge(const UniformMPS& state, Rng& rng, double strength = 0.3);

/// Random MPO with the given bond dims (bond left of site n) and physical dim d.
MPO random_mpo(std::span<const std::size_t> D, std::size_t d, Rng& rng);

}  // namespace umps
