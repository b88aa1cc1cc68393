#pragma once

#include <span>

#include "umps/eig.hpp"
#include "umps/mps.hpp"

namespace umps {

enum class Side { left, right };

/// One-site transfer steps on environment tensors.
///
/// A left environment G has index order (top bond, MPO bond, bottom bond)
/// and sits on the bond left of a site; apply_left moves it across the site
/// to the bond on the right. A right environment uses the same index order
/// and apply_right moves it leftwards. The top layer enters conjugated.
/// Passing op == nullptr means no MPO, in which case the middle extent is 1.
Tensor apply_left(const Tensor& env, const Tensor& top, const Tensor* op, const Tensor& bottom);
Tensor apply_right(const Tensor& env, const Tensor& top, const Tensor* op, const Tensor& bottom);

/// Same as above with the top tensor already conjugated; avoids a copy per call.
Tensor apply_left_conj(const Tensor& env, const Tensor& top_conj, const Tensor* op, const Tensor& bottom);
Tensor apply_right_conj(const Tensor& env, const Tensor& top_conj, const Tensor* op, const Tensor& bottom);

/// Unit-cell transfer map on raw site tensors. For Side::left the vector is
/// a left environment on bond 0 and sites are applied in order 0..L-1; for
/// Side::right it is a right environment on the bond right of site L-1 and
/// sites are applied L-1..0. All spans must have the same length.
LinearMap transfer_map(std::span<const Tensor> top, std::span<const Tensor> bottom, std::span<const Tensor> ops,
                       Side side);

/// Mixed transfer map of two uniform states, left side built from AL
/// tensors and right side from AR tensors, optionally with an MPO in
/// between. Unit cells must already agree (see extend / lcm_length).
LinearMap mixed_transfer_map(const UniformMPS& top, const UniformMPS& bottom, Side side, const MPO* mpo = nullptr);

/// Double-layer step for the norm of an MPO applied to a state, keeping
/// the operator and its conjugate as separate layers. Environment index
/// order (conj state bond, conj MPO bond, MPO bond, state bond).
/// Cost O(chi^3 D^2 d + chi^2 D^3 d^2).
Tensor apply_left_double(const Tensor& env, const Tensor& op, const Tensor& site);
Tensor apply_right_double(const Tensor& env, const Tensor& op, const Tensor& site);

/// Unit-cell map of the double layer <site| op^dag op |site>.
LinearMap double_layer_map(std::span<const Tensor> sites, std::span<const Tensor> ops, Side side);

}  // namespace umps
