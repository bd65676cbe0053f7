#pragma once

// Central filtration G = G_n → … → G_0 = 1 of a p-group with a coprime
// action, peeling one Φ-irreducible central subgroup of exponent p at a time.

#include <vector>

#include "towerforge/groups.hpp"
#include "towerforge/modrep.hpp"

namespace towerforge {

struct FiltrationStep {
  GroupPtr covering;                  // G_i
  GroupPtr quotient;                  // G_{i-1} = G_i / V
  std::vector<Elem> projection;       // G_i → G_{i-1}
  std::vector<Elem> kernel;           // V, sorted element list of G_i
  std::vector<Elem> kernel_basis;     // F_p-basis of V inside G_i
  std::size_t kernel_dim = 0;
  std::vector<Matrix> kernel_action;  // Φ-generator matrices on V in kernel_basis
  GroupAction quotient_action;        // induced action of Φ on G_{i-1}
};

/// Steps are listed in peeling order: the first step has covering = G.
/// Among the irreducible Φ-submodules of the p-torsion of the centre, the one
/// with the smallest dimension and then the least RREF basis is chosen.
std::vector<FiltrationStep> central_filtration(const GroupAction& action, Scalar p);

}  // namespace towerforge
