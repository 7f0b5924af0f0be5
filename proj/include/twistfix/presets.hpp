#pragma once

#include "twistfix/proper.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace twistfix {

/// A named G-algebra together with its default generating set R (the whole algebra basis).
struct Preset {
  std::string name;
  GAlgebra action;
  std::vector<Matrix> R;
  /// True for dual actions on twisted group algebras (and tensor products of them).
  bool dual = false;
};

/// Preset specs:
///   "dual:<group>"       dual action of the dual group on C[G] (trivial cocycle)
///   "dual:<group>:std"   same with the standard cocycle (needs rank >= 2)
///   "swap"               Z2 swapping the summands of C + C
///   "trivial:<group>:<d>" trivial action on M_d
///   "inner:Z2"           Z2 acting on M_2 by Ad diag(1, -1)
/// Throws std::invalid_argument on unknown specs.
Preset make_preset(std::string_view spec);

Preset tensor_preset(const Preset& a, const Preset& b);
/// Inflates a preset over Q along the coordinatewise reduction G -> Q.
Preset inflate_preset(const Preset& p, const Group& g);

/// The dual action on C[G, omega]: chi . f = chi f, realized with the Takai covariant pair
/// (lambda_omega, multiplication by chi on l^2(G)).
GAlgebra dual_action(const Cocycle& omega);

}  // namespace twistfix
