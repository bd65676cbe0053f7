#pragma once

// Finite-dimensional F_p[Γ]-modules.
//
// Convention: ρ(g) acts on column vectors and ρ(gh) = ρ(g)ρ(h). Submodules are
// stored by row bases in ambient coordinates. Everything specific to
// Γ = G ⋊ Φ (socle shortcut, projective indecomposables, hulls, freeness)
// uses a SemidirectLayout in which G is the normal Sylow p-subgroup.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "towerforge/fp.hpp"
#include "towerforge/groups.hpp"

namespace towerforge {

/// Bound on exhaustive vector enumerations (number of projective points).
inline constexpr std::uint64_t kDefaultEnumerationGuard = std::uint64_t{1} << 20;

class GroupModule {
 public:
  /// One invertible dim×dim matrix per group generator. Checks that the
  /// matrices satisfy every relation of the multiplication table.
  GroupModule(Scalar p, GroupPtr group, std::vector<Matrix> action);

  static GroupModule regular(Scalar p, GroupPtr group);
  static GroupModule free(Scalar p, GroupPtr group, std::size_t rank);
  static GroupModule trivial(Scalar p, GroupPtr group, std::size_t dim = 1);
  static GroupModule direct_sum(const GroupModule& a, const GroupModule& b);

  Scalar p() const { return data_->field.p(); }
  const PrimeField& field() const { return data_->field; }
  std::size_t dim() const { return data_->dim; }
  const FiniteGroup& group() const { return *data_->group; }
  GroupPtr group_ptr() const { return data_->group; }
  const std::vector<Matrix>& action() const { return data_->action; }
  /// Matrix of an arbitrary group element.
  const Matrix& rho(Elem g) const { return data_->elements[g]; }

  /// Skips the relation check; for modules derived from a validated one.
  static GroupModule derived(Scalar p, GroupPtr group, std::vector<Matrix> action);

 private:
  struct Data {
    PrimeField field;
    std::size_t dim;
    GroupPtr group;
    std::vector<Matrix> action;
    std::vector<Matrix> elements;
  };
  GroupModule(Scalar p, GroupPtr group, std::vector<Matrix> action, bool validate);
  std::shared_ptr<const Data> data_;
};

/// A subspace of a module that is stable under the group.
struct Submodule {
  Submodule(GroupModule ambient, Subspace span);
  static Submodule whole(const GroupModule& m);
  static Submodule zero(const GroupModule& m);

  GroupModule ambient;
  Subspace span;
};

bool is_invariant(const GroupModule& m, const Subspace& s);
/// Smallest submodule containing the given row vectors.
Subspace spin(const GroupModule& m, const Matrix& rows);
Subspace spin(const GroupModule& m, std::span<const Scalar> v);

/// Action on an invariant subspace, in the coordinates of its RREF basis.
GroupModule submodule_action(const GroupModule& m, const Subspace& s);
/// Action on m/s, in the coordinates of the non-pivot columns of s.
GroupModule quotient_action(const GroupModule& m, const Subspace& s);
Vec quotient_coordinates(const PrimeField& f, const Subspace& s, std::span<const Scalar> v);
/// Embed coordinate rows of a submodule back into the ambient space.
Matrix to_ambient(const PrimeField& f, const Subspace& s, const Matrix& coordinate_rows);

/// Restriction along an injective homomorphism `embedding` : sub → m.group().
GroupModule restrict(const GroupModule& m, GroupPtr sub, const std::vector<Elem>& embedding);
/// Inflation of a module over Φ to Γ = G ⋊ Φ.
GroupModule inflate(const GroupModule& s, GroupPtr gamma);

/// Layout Γ = G ⋊ Φ with G the normal Sylow p-subgroup. Uses the stored
/// layout when present; p-groups and p'-groups get a trivial factor.
SemidirectLayout sylow_layout(const GroupPtr& gamma, Scalar p);
GroupModule restrict_to_complement(const GroupModule& m, const SemidirectLayout& layout);

/// Common fixed vectors of the listed elements.
Subspace fixed_points(const GroupModule& m, const std::vector<Elem>& elems);

/// Basis of Hom_Γ(a, b) as dim(b)×dim(a) matrices.
std::vector<Matrix> hom_basis(const GroupModule& a, const GroupModule& b);
std::size_t hom_dim(const GroupModule& a, const GroupModule& b);
std::size_t end_dim(const GroupModule& m);

/// No proper nonzero invariant subspace. Exhaustive over projective points
/// within the guard; beyond it only decided for p ∤ |Γ| via End being a field.
bool is_irreducible(const GroupModule& m, std::uint64_t guard = kDefaultEnumerationGuard);

/// Explicit decomposition of an invariant subspace of a module over a
/// p'-group into simple submodules. Deterministic (seeded with 0).
std::vector<Subspace> decompose_semisimple(const GroupModule& m, const Subspace& s);
/// Invariant complement of an invariant subspace u inside an invariant w ⊇ u (p'-group).
Subspace maschke_complement(const GroupModule& m, const Subspace& u, const Subspace& w);

struct SimpleFactor {
  GroupModule module;
  std::size_t multiplicity;
};
/// Isomorphism classes of simple constituents, ordered by (dim, traces).
std::vector<SimpleFactor> simple_decomposition(const GroupModule& m);
bool isomorphic_simples(const GroupModule& a, const GroupModule& b);

struct IsotypicProjector {
  GroupModule module;
  GroupModule target;
  std::vector<Scalar> coefficients;  // indexed by group element
  Matrix matrix;
};
IsotypicProjector isotypic_projector(const GroupModule& m, const GroupModule& w);

/// Sum of all simple submodules.
Subspace socle(const GroupModule& m);
/// Exhaustive sum of irreducible cyclic submodules; no structural shortcut.
Subspace sum_of_simple_submodules(const GroupModule& m, std::uint64_t guard = kDefaultEnumerationGuard);
/// I_G·m for the normal Sylow G.
Subspace radical(const GroupModule& m);

/// F_p[Γ] ⊗_{F_p[Φ]} s. Basis index g·dim(s) + j for g ∈ G.
GroupModule projective_indecomposable(const GroupPtr& gamma, const GroupModule& s);

struct InjectiveHull {
  GroupModule hull;                        // ⊕ P_S^{α_S}
  std::vector<SimpleFactor> socle_types;   // (S, α_S)
  Matrix embedding;                        // dim(ambient) × dim(hull), equivariant, injective
  Subspace image;                          // contains e
};
InjectiveHull injective_hull(const Submodule& e);

struct FreenessCertificate {
  bool is_free = false;
  std::size_t rank = 0;
  Matrix generators;  // rows are free generators when is_free
  std::string reason;
};
FreenessCertificate is_free(const GroupModule& m);
FreenessCertificate is_free(const Submodule& s);

struct Lemma2Split {
  Subspace m, n, q;
  Subspace m1;  // injective hull image of e
  std::size_t rank_m = 0, rank_n = 0, rank_q = 0;
};
Lemma2Split lemma2_split(const GroupModule& ambient, const Subspace& e, const Subspace& n);

}  // namespace towerforge
