#pragma once

// Finite commutative local rings S that are algebras over Z/p^e with a split
// surjection S → Z/p^e whose kernel I_S is nilpotent. Elements are numbered:
// the additive group is ⊕ Z/p^{e_k}·b_k and index = Σ a_k · Π_{k'<k} p^{e_k'}.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "towerforge/fp.hpp"
#include "towerforge/groups.hpp"

namespace towerforge {

inline constexpr std::uint64_t kRingElementGuard = std::uint64_t{1} << 20;

/// An additive subgroup (usually an ideal) of a ring, by membership.
struct Ideal {
  std::vector<char> member;      // indexed by ring element
  std::vector<Elem> elements;    // sorted
  std::vector<Elem> generators;  // additive generators

  std::size_t size() const { return elements.size(); }
  bool contains(Elem x) const { return member[x] != 0; }
  bool is_zero() const { return elements.size() == 1; }
  friend bool operator==(const Ideal& a, const Ideal& b) { return a.elements == b.elements; }
};

class FiniteLocalRing;
using RingPtr = std::shared_ptr<const FiniteLocalRing>;

class FiniteLocalRing {
 public:
  /// orders[k] = e_k with p^{e_k} the additive order of b_k (each ≤ e).
  /// structure[i][j] = coordinates of b_i·b_j. Validates commutativity,
  /// associativity, the unit, that I_S is a nilpotent ideal with S/I_S ≅ Z/p^e
  /// generated by 1.
  FiniteLocalRing(Scalar p, unsigned e, std::vector<unsigned> orders, std::vector<std::vector<Vec>> structure,
                  Vec unit, std::vector<Vec> ideal_gens, std::vector<std::string> names = {});

  Scalar p() const { return p_; }
  unsigned e() const { return e_; }
  std::size_t rank() const { return orders_.size(); }
  const std::vector<unsigned>& orders() const { return orders_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<std::vector<Vec>>& structure() const { return structure_; }
  std::size_t size() const { return size_; }

  Elem encode(std::span<const Scalar> coords) const;
  Vec decode(Elem x) const;
  Elem zero() const { return 0; }
  Elem one() const { return one_; }
  Elem basis(std::size_t k) const;
  Elem add(Elem a, Elem b) const;
  Elem sub(Elem a, Elem b) const;
  Elem neg(Elem a) const;
  Elem mul(Elem a, Elem b) const;
  Elem scale(Elem a, std::uint64_t k) const;
  Elem from_integer(std::int64_t k) const;
  /// Smallest k with p^k·x = 0.
  unsigned additive_exponent(Elem x) const;

  /// Image under the structure map S → Z/p^e.
  Scalar augmentation(Elem x) const;
  bool is_unit(Elem x) const { return augmentation(x) % p_ != 0; }
  const Ideal& augmentation_ideal() const { return i_s_; }  // I_S

  Ideal ideal(const std::vector<Elem>& gens) const;
  Ideal zero_ideal() const { return ideal({}); }
  Ideal maximal_ideal() const;
  Ideal product(const Ideal& a, const Ideal& b) const;
  Ideal sum(const Ideal& a, const Ideal& b) const;
  /// k·I.
  Ideal multiple(const Ideal& a, std::uint64_t k) const;
  /// Additive subgroup generated by the given elements (no ideal closure).
  Ideal additive_span(const std::vector<Elem>& gens) const;
  bool is_ideal(const Ideal& a) const;

  /// Z/p^e as a ring of rank one with I = 0.
  static FiniteLocalRing truncated_integers(Scalar p, unsigned e);
  /// F_p[x_1..x_v]/M for a monomial ideal M given by its standard monomials
  /// (a down-closed list of exponent vectors containing 0).
  static FiniteLocalRing monomial(Scalar p, const std::vector<std::vector<unsigned>>& standard);
  /// F_p[y]/(y^n).
  static FiniteLocalRing truncated_polynomial(Scalar p, unsigned n);

 private:
  Scalar p_;
  unsigned e_;
  std::vector<unsigned> orders_;
  std::vector<Scalar> moduli_;
  std::vector<std::uint64_t> strides_;
  std::vector<std::vector<Vec>> structure_;
  std::vector<std::string> names_;
  std::size_t size_ = 1;
  Elem one_ = 0;
  std::vector<Scalar> basis_augmentation_;
  Ideal i_s_;
  std::vector<Elem> mul_table_;  // full table for small rings
};

RingPtr make_ring(FiniteLocalRing r);

/// A ring homomorphism stored by the image of every element.
struct RingHom {
  RingPtr from, to;
  std::vector<Elem> table;

  Elem operator()(Elem x) const { return table[x]; }
};

/// Unital, additive (coordinatewise) and multiplicative on all pairs of basis elements.
bool is_ring_hom(const RingHom& h);
RingHom compose(const RingHom& second, const RingHom& first);  // second ∘ first
RingHom identity_hom(const RingPtr& r);
/// Extend images of basis elements additively. Throws if an image has the wrong order.
RingHom hom_from_basis_images(const RingPtr& from, const RingPtr& to, const std::vector<Elem>& images);
Ideal kernel(const RingHom& h);

struct Quotient {
  RingPtr ring;
  RingHom projection;
};
/// S/J. Throws PreconditionError when J is the whole ring, not an ideal, or
/// when S/J does not split over its coefficient ring.
Quotient quotient(const RingPtr& s, const Ideal& j);

struct SubringEmbedding {
  RingPtr ring;
  RingHom inclusion;
};
/// A subring (given by its elements, containing 1) as a ring in its own right.
SubringEmbedding subring(const RingPtr& s, const std::vector<Elem>& elements);
/// Smallest subring containing the given elements.
std::vector<Elem> generated_subring(const FiniteLocalRing& s, const std::vector<Elem>& gens);

/// R ⊕ F_p x_1 ⊕ … ⊕ F_p x_n with x_i x_j = 0 and m_R x_i = 0.
RingPtr square_zero_extension(const RingPtr& r, std::size_t n);

/// (I_S², pI_S).
Ideal frattini_ideal(const FiniteLocalRing& s);

/// (m², p) of a ring.
Ideal cotangent_relations(const FiniteLocalRing& s);
/// log_p |m/(m², p)|.
std::size_t cotangent_dim(const FiniteLocalRing& s);

struct CotangentCheck {
  bool zero_in_source = false;  // x ∈ (m_S², p)
  bool zero_in_target = false;  // image of x in (m_R², p); always true for x ∈ J
};
CotangentCheck cotangent_image_kernel(const RingHom& projection, Elem x);

struct SubringLift {
  Elem witness = 0;                 // nonzero x ∈ J outside (m_S², p)
  std::vector<Elem> lifts;          // lifted cotangent generators of R
  std::vector<Elem> elements;       // S′
  RingHom section;                  // R → S′ ⊂ S
};
/// Throws PreconditionError naming the failed hypothesis.
SubringLift subring_lift(const RingHom& projection);

/// Length of I_S as an S-module, summed over the layers m^k I / m^{k+1} I.
std::size_t ring_length(const FiniteLocalRing& s);

/// log_p |J| for an ideal killed by m.
std::size_t fp_dimension(const FiniteLocalRing& s, const Ideal& j);

struct MembershipCertificate {
  Elem j;      // element of J
  Elem square;  // element of I_S²
  Elem base;    // element of I_S with j = square + p·base
};

enum class Branch { FrattiniContainment, SquareZeroExtension };
std::string to_string(Branch b);

struct DichotomyResult {
  Branch branch;
  bool reduced = false;  // S was replaced by S/m_S J
  RingHom projection;    // analysed S → R
  std::vector<MembershipCertificate> certificates;
  // SquareZeroExtension only.
  std::optional<SubringLift> lift;
  RingPtr model;                 // R[x]/(x², m_R x)
  std::optional<RingHom> iso;    // model → S
};

/// Requires dim_{F_p} J = 1 after reducing by m_S J.
DichotomyResult dichotomy(const RingHom& projection);
/// J ⊆ (I_S², p I_S), decided independently of dichotomy().
bool frattini_branch_holds(const RingHom& projection);
/// A square-zero splitting exists: some x ∈ J outside (I_S², pI_S) with a subring lift.
bool square_zero_branch_holds(const RingHom& projection);

struct TowerResult {
  bool no_lift = false;
  std::size_t failing_layer = 0;             // 1-based, when no_lift
  std::optional<DichotomyResult> failure;    // the dichotomy at the failing layer
  std::vector<Elem> witnesses;               // x_1..x_n in S
  std::optional<RingHom> section;            // R → S
  RingPtr model;                             // R[x_1..x_n]/(x_i x_j, m_R x_i)
  std::optional<RingHom> iso;                // model → S
  std::vector<std::string> trace;
};
/// Requires m_S·J = 0.
TowerResult square_zero_tower(const RingHom& projection);

/// Down-closed sets of exponent vectors in `vars` variables with at most
/// `max_dim` elements, in increasing size then lexicographic order.
std::vector<std::vector<std::vector<unsigned>>> monomial_staircases(std::size_t vars, std::size_t max_dim);
/// Distinct nonzero principal ideals (x) for x ∈ m_S, ordered by least generator.
std::vector<Ideal> principal_ideals(const FiniteLocalRing& s);

struct SplitResult {
  bool split = false;
  std::optional<RingHom> section;  // R → S with projection ∘ section = id
  std::vector<std::string> trace;
  std::optional<TowerResult> failure;
};
SplitResult split_surjection(const RingHom& projection);

}  // namespace towerforge
