#pragma once

// Rank-2 subgroups of (Z/p)^m, congruence plans, exponent tables and the
// exterior-square criterion for families of subgroups.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "towerforge/fp.hpp"
#include "towerforge/groups.hpp"
#include "towerforge/modrep.hpp"

namespace towerforge {

struct ElementaryAbelian {
  Scalar p;
  std::size_t rank;

  ElementaryAbelian(Scalar p, std::size_t rank);
};

/// Subgroups of an elementary abelian group, each given by independent generator rows.
struct SubgroupFamily {
  ElementaryAbelian ambient;
  std::vector<Matrix> members;

  SubgroupFamily(ElementaryAbelian ambient, std::vector<Matrix> members);
};

/// (p^{2n}−1)(p^{2n}−p)/((p²−1)(p²−p)). Throws std::overflow_error past 64 bits.
std::uint64_t count_rank2_subgroups(Scalar p, std::size_t n);

inline constexpr std::uint64_t kSubgroupGuard = std::uint64_t{1} << 20;

inline constexpr std::uint64_t kMemberGuard = std::uint64_t{1} << 22;

/// Visit every 2-dimensional subspace of F_p^{2n} once, as an RREF 2×2n
/// matrix, grouped by pivot columns. Requires p^{2n} ≤ guard.
void for_each_rank2_subgroup(Scalar p, std::size_t n, const std::function<void(const Matrix&)>& visit,
                             std::uint64_t guard = kSubgroupGuard);

/// All 2-dimensional subspaces of F_p^{2n} as RREF 2×2n matrices in
/// lexicographic order. Requires p^{2n} ≤ guard and at most member_guard results.
SubgroupFamily enumerate_rank2_subgroups(Scalar p, std::size_t n, std::uint64_t guard = kSubgroupGuard,
                                         std::uint64_t member_guard = kMemberGuard);

struct CongruencePlan {
  std::size_t ell = 0;
  std::string case_tag;  // "1a", "1b", "2a" or "2b"
  std::size_t i = 0, j = 0;  // 1-based
  Vec u, w;
  Vec c, d;
  Vec a_exp, b_exp;  // exponents of κ_ℓ in A_{k,ℓ} and B_{k,ℓ}
};

/// u = (a_1..a_n, b_1..b_n), w = (x_1..x_n, y_1..y_n), independent.
CongruencePlan congruence_plan(Scalar p, const Vec& u, const Vec& w, std::size_t ell = 0);
/// One plan per member, using its two generator rows.
std::vector<CongruencePlan> congruence_plans(const SubgroupFamily& family);

/// span{u, (a_exp, b_exp)} in RREF: the plane the plan realises as a decomposition group.
Subspace plan_plane(Scalar p, const CongruencePlan& plan);
/// Every member equals the plane of its plan.
bool exhaustion_holds(const SubgroupFamily& family, const std::vector<CongruencePlan>& plans);

/// Exponents s_{g,ℓ}, t_{g,ℓ} of g(λ_ℓ) in ν₁, ν₂. Rows are Φ elements,
/// columns are labels.
struct ExponentTables {
  Scalar p;
  GroupPtr phi;
  std::vector<Elem> g;  // g_1..g_n
  Matrix s, t;
};

/// Places a_k (resp. b_k) at g_k⁻¹(λ_ℓ) for every plan. Throws if two g_k⁻¹ coincide.
ExponentTables assemble_nu_exponents(const std::vector<CongruencePlan>& plans, const SubgroupFamily& family,
                                     GroupPtr phi, const std::vector<Elem>& g);

struct Readback {
  Vec a, b;
};
/// Exponents of g_k⁻¹(x(λ_ℓ)) in ν₁ and ν₂ for k = 1..n.
Readback read_exponents(const ExponentTables& tables, Elem x, std::size_t ell);
Readback read_exponents(const ExponentTables& tables, const Matrix& s, const Matrix& t, Elem x, std::size_t ell);

/// Apply Σ n_h h to a table column-wise: result(x, ℓ) = Σ_h n_h · table(h⁻¹x, ℓ).
Matrix apply_group_algebra(const ExponentTables& tables, const std::vector<Scalar>& coefficients, const Matrix& table);

/// After projecting ν₁, ν₂, each member's pattern (a, b) is still read at
/// some conjugate label x(λ_ℓ′).
bool verify_projection_stability(const ExponentTables& tables, const IsotypicProjector& projector,
                                 const SubgroupFamily& family);

struct WedgeReport {
  bool surjective = false;
  std::size_t rank = 0;
  std::size_t required = 0;
};
/// Image of ⊕ Λ²(D) → Λ²(ambient), with basis e_i ∧ e_j (i < j).
WedgeReport wedge_surjectivity(const SubgroupFamily& family);
/// Coordinates of x ∧ y in the basis e_i ∧ e_j (i < j).
Vec wedge(const PrimeField& f, std::span<const Scalar> x, std::span<const Scalar> y);

struct WedgeCertificate {
  std::size_t i, j;    // 1-based, i < j
  std::size_t member;  // 0-based index of the member containing x_i and x_j
};

struct SpanningBasis {
  Matrix basis;  // rows x_1..x_{2n}
  std::vector<Subspace> intersections;  // B_1..B_{2n}
  std::vector<WedgeCertificate> certificates;
};

/// Index (0-based) of the member ⟨τ_i, τ_{i'}⟩ for 1 ≤ i < i' ≤ 2n.
std::size_t pair_member_index(std::size_t n, std::size_t i, std::size_t i2);

/// Uses the first n(2n−1) members as A_1.. in pair order. B_i is the
/// intersection of the members containing τ_i; throws PreconditionError naming
/// the first B_i that is not of order p (n ≥ 2) or when the x_i are dependent.
SpanningBasis select_spanning_basis(const SubgroupFamily& family);

/// Certificates checked directly: each x_i ∧ x_j lies in Λ² of its member and
/// the wedges span Λ²(ambient).
bool certificates_prove_surjectivity(const SubgroupFamily& family, const SpanningBasis& basis);

}  // namespace towerforge
