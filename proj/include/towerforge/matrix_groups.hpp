#pragma once

// 2×2 matrices over finite local rings: congruence subgroups Γ_I = 1 + M₂(I),
// their Frattini subgroups, the group Γ̃ ⊂ GL₂(R) and the lift search.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "towerforge/groups.hpp"
#include "towerforge/localring.hpp"

namespace towerforge {

/// Row-major [[a, b], [c, d]] with entries ring elements.
using Mat2 = std::array<Elem, 4>;

Mat2 mat_identity(const FiniteLocalRing& s);
Mat2 mat_mul(const FiniteLocalRing& s, const Mat2& x, const Mat2& y);
Elem mat_det(const FiniteLocalRing& s, const Mat2& x);
bool mat_invertible(const FiniteLocalRing& s, const Mat2& x);
Mat2 mat_inverse(const FiniteLocalRing& s, const Mat2& x);
Mat2 mat_map(const RingHom& h, const Mat2& x);
std::string mat_to_string(const FiniteLocalRing& s, const Mat2& x);

inline constexpr std::uint64_t kCongruenceGuard = std::uint64_t{1} << 20;

/// Γ_I with elements numbered by the positions of (a, b, c, d) in I, where the
/// element is [[1+a, b], [c, 1+d]].
class CongruenceGroup {
 public:
  /// Throws GuardExceeded when |I|⁴ > guard.
  CongruenceGroup(RingPtr s, Ideal ideal, std::uint64_t guard = kCongruenceGuard);

  const FiniteLocalRing& ring() const { return *s_; }
  const Ideal& ideal() const { return ideal_; }
  std::uint64_t order() const { return order_; }
  Elem identity() const { return 0; }
  Elem mul(Elem x, Elem y) const;
  Elem power(Elem x, std::uint64_t k) const;
  Elem inverse(Elem x) const;
  Elem commutator(Elem x, Elem y) const;  // x⁻¹y⁻¹xy
  Mat2 matrix(Elem x) const;
  std::optional<Elem> index_of(const Mat2& m) const;
  /// Elementary matrices 1 + t·E_kl over the additive generators t of I,
  /// extended by all of I if those fail to generate.
  const std::vector<Elem>& generators() const { return generators_; }

  /// Membership bitmap of the subgroup generated by `gens`.
  std::vector<char> closure(const std::vector<Elem>& gens) const;
  /// Smallest normal subgroup containing `gens`.
  std::vector<char> normal_closure(const std::vector<Elem>& gens) const;
  /// [Γ, Γ]Γ^p as the normal closure of generator p-th powers and commutators.
  std::vector<char> frattini() const;
  /// Elements whose off-identity entries all lie in the sub-ideal K ⊆ I.
  std::vector<char> congruence_subgroup(const Ideal& k) const;

 private:
  RingPtr s_;
  Ideal ideal_;
  std::uint64_t n_ = 1, order_ = 1;
  std::vector<Elem> local_;      // ring element ↦ position in I (or max)
  std::vector<Elem> add_, mul_;  // tables on positions in I
  std::vector<Elem> generators_;
};

struct FrattiniIdentityReport {
  bool holds = false;
  std::uint64_t gamma_order = 0;      // |Γ_S|
  std::uint64_t frattini_order = 0;   // |[Γ_S,Γ_S]Γ_S^p|
  std::uint64_t congruence_order = 0; // |Γ_{(I_S², pI_S)}|
  bool contained = false;             // [Γ_S,Γ_S]Γ_S^p ⊆ Γ_{(I_S², pI_S)}
};
/// Compares the group closure with the direct construction.
FrattiniIdentityReport frattini_subgroup_identity(const RingPtr& s, std::uint64_t guard = kCongruenceGuard);

/// Γ̃ ⊂ GL₂(R): generated by lifts of Φ̃ ⊂ GL₂(F_p) and by Γ_R.
struct GammaTilde {
  RingPtr r;
  GroupPtr group;               // abstract group on the generator set below
  std::vector<Mat2> matrices;   // base representation, indexed by group element
  std::vector<Mat2> generator_matrices;
  std::size_t phi_order = 0;    // |Φ̃|
  bool residual_irreducible = false;
  bool absolutely_irreducible = false;
};
/// `phi_gens` are matrices over F_p of a group of order prime to p. Each is
/// lifted to an element of the same order in GL₂(R). Checks the split exact
/// sequence via |Γ̃| = |I_R|⁴·|Φ̃|; throws PreconditionError otherwise.
GammaTilde gamma_tilde(const RingPtr& r, const std::vector<Matrix>& phi_gens);

inline constexpr std::uint64_t kLiftSearchGuard = std::uint64_t{1} << 24;

struct LiftSearchResult {
  bool found = false;
  std::vector<Mat2> generator_images;  // over S, when found
  std::vector<Elem> corrections;       // index in Γ_J of each generator's correction
  std::uint64_t search_space = 0;      // |Γ_J|^k
  std::uint64_t examined = 0;
  std::size_t threads = 1;
};
/// Exhaustive search over Γ_J-coset corrections of the entrywise least
/// preimage of each generator image; a candidate is accepted when the images
/// extend consistently along every edge of the Cayley graph of Γ̃. Reports
/// the lexicographically least lift. Threads come from TOWERFORGE_THREADS
/// when `threads` is 0.
LiftSearchResult lift_search(const GammaTilde& gt, const RingHom& projection, std::size_t threads = 0,
                             std::uint64_t guard = kLiftSearchGuard);
/// Images of every group element under a lift, or nullopt if inconsistent.
std::optional<std::vector<Mat2>> extend_lift(const GammaTilde& gt, const FiniteLocalRing& s,
                                             const std::vector<Mat2>& generator_images);

struct NoLiftCertificate {
  std::uint64_t gamma_r_order = 0;            // |Γ_R| = |I_R|⁴
  std::uint64_t gamma_s_order = 0;            // |Γ_S| = |I_S|⁴
  std::uint64_t gamma_j_order = 0;            // |Γ_J|
  std::uint64_t frattini_quotient_order = 0;  // |Γ_S / [Γ_S,Γ_S]Γ_S^p|
  bool ideal_containment = false;             // J ⊆ (I_S², pI_S)
  std::optional<bool> group_containment;      // Γ_J ⊆ [Γ_S,Γ_S]Γ_S^p, when enumerable
  std::size_t phi_order = 0;
  std::vector<std::string> argument;
};
/// Throws PreconditionError when J = 0 or Γ_J is not contained in the Frattini
/// subgroup of Γ_S (group level when |I_S|⁴ ≤ guard, ideal level otherwise).
NoLiftCertificate no_lift_certificate(const RingHom& projection, const GammaTilde& gt,
                                      std::uint64_t guard = kCongruenceGuard);

}  // namespace towerforge
