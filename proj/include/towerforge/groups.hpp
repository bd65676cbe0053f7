#pragma once

// Finite groups given by full multiplication tables.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "towerforge/fp.hpp"

namespace towerforge {

using Elem = std::uint32_t;

class FiniteGroup;
using GroupPtr = std::shared_ptr<const FiniteGroup>;

/// Element layout of a group built as G ⋊ Φ: index(g, φ) = g + |G|·φ.
struct SemidirectLayout {
  GroupPtr normal;      // G
  GroupPtr complement;  // Φ

  Elem pair(Elem g, Elem phi) const;
  Elem normal_part(Elem x) const;
  Elem complement_part(Elem x) const;
};

inline constexpr std::size_t kMaxTableOrder = 4096;

class FiniteGroup {
 public:
  /// Validates the table (closure, associativity, identity, inverses) and
  /// that `generators` generate the whole group.
  FiniteGroup(std::size_t order, std::vector<Elem> table, std::vector<Elem> generators,
              std::vector<std::string> labels = {});

  std::size_t order() const { return order_; }
  Elem identity() const { return identity_; }
  Elem mul(Elem a, Elem b) const { return table_[a * order_ + b]; }
  Elem inverse(Elem a) const { return inverse_[a]; }
  Elem power(Elem a, std::uint64_t k) const;
  Elem commutator(Elem a, Elem b) const;  // a⁻¹b⁻¹ab
  std::size_t element_order(Elem a) const;
  const std::vector<Elem>& generators() const { return generators_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Elem>& table() const { return table_; }

  const std::optional<SemidirectLayout>& semidirect() const { return semidirect_; }
  void set_semidirect(SemidirectLayout layout);

  /// Sorted element list of the subgroup generated by `gens`.
  std::vector<Elem> closure(const std::vector<Elem>& gens) const;
  /// Sorted element list of the smallest normal subgroup containing `gens`.
  std::vector<Elem> normal_closure(const std::vector<Elem>& gens) const;
  bool is_abelian() const;

  friend bool operator==(const FiniteGroup& a, const FiniteGroup& b) {
    return a.order_ == b.order_ && a.table_ == b.table_;
  }

  // Builders.
  static FiniteGroup cyclic(std::size_t n);
  static FiniteGroup trivial() { return cyclic(1); }
  static FiniteGroup elementary_abelian(Scalar p, std::size_t rank);
  static FiniteGroup direct_product(const FiniteGroup& a, const FiniteGroup& b);
  /// Permutation group generated by the given permutations of {0..n-1}.
  static FiniteGroup from_permutations(const std::vector<std::vector<Elem>>& gens);
  static FiniteGroup symmetric(std::size_t n);
  static FiniteGroup alternating(std::size_t n);
  static FiniteGroup dihedral(std::size_t n);  // order 2n
  /// Upper unitriangular 3×3 matrices over F_p (order p³).
  static FiniteGroup heisenberg(Scalar p);
  /// Subgroup of GL_d(F_p) generated by the matrices.
  static FiniteGroup from_matrices(Scalar p, const std::vector<Matrix>& gens);

 private:
  std::size_t order_;
  Elem identity_ = 0;
  std::vector<Elem> table_;
  std::vector<Elem> inverse_;
  std::vector<Elem> generators_;
  std::vector<std::string> labels_;
  std::optional<SemidirectLayout> semidirect_;
};

/// Closure of `gens` under `mul`, as a group table. Elements are numbered in
/// BFS discovery order starting from `one`.
template <class T, class Mul>
std::pair<FiniteGroup, std::vector<T>> generate_group(const T& one, const std::vector<T>& gens, Mul mul,
                                                      std::size_t limit = kMaxTableOrder) {
  std::vector<T> elems{one};
  std::map<T, Elem> index{{one, 0}};
  for (std::size_t head = 0; head < elems.size(); ++head)
    for (const auto& g : gens) {
      T x = mul(elems[head], g);
      if (index.emplace(x, static_cast<Elem>(elems.size())).second) {
        elems.push_back(x);
        if (elems.size() > limit) throw std::runtime_error("generated group exceeds table size limit");
      }
    }
  const std::size_t n = elems.size();
  std::vector<Elem> table(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) table[a * n + b] = index.at(mul(elems[a], elems[b]));
  std::vector<Elem> gen_idx;
  for (const auto& g : gens) gen_idx.push_back(index.at(g));
  return {FiniteGroup(n, std::move(table), std::move(gen_idx)), std::move(elems)};
}

/// Action of `actor` on `target` by automorphisms: act(φ, g).
class GroupAction {
 public:
  /// Full table act[φ·|target| + g]. Validates that each φ acts by an
  /// automorphism and that φ ↦ act(φ, ·) is a homomorphism.
  GroupAction(GroupPtr actor, GroupPtr target, std::vector<Elem> table);

  /// Extend automorphisms given on actor generators to the whole actor.
  static GroupAction from_generator_images(GroupPtr actor, GroupPtr target,
                                           const std::vector<std::vector<Elem>>& images);
  static GroupAction trivial(GroupPtr actor, GroupPtr target);

  const FiniteGroup& actor() const { return *actor_; }
  const FiniteGroup& target() const { return *target_; }
  GroupPtr actor_ptr() const { return actor_; }
  GroupPtr target_ptr() const { return target_; }
  Elem act(Elem phi, Elem g) const { return table_[phi * target_->order() + g]; }
  const std::vector<Elem>& table() const { return table_; }

 private:
  GroupPtr actor_, target_;
  std::vector<Elem> table_;
};

/// Elementary abelian target (Z/p)^m (element index = base-p digits, first
/// coordinate most significant) acted on by matrices per actor generator.
GroupAction linear_action(GroupPtr actor, Scalar p, std::size_t rank, const std::vector<Matrix>& generator_matrices);
Vec elementary_coordinates(Elem x, Scalar p, std::size_t rank);
Elem elementary_index(std::span<const Scalar> coords, Scalar p);

FiniteGroup semidirect_product(const GroupAction& action);

std::vector<Elem> center(const FiniteGroup& g);
std::vector<Elem> p_torsion_of_center(const FiniteGroup& g, Scalar p);

/// log_p |g| if g is a p-group.
std::optional<std::size_t> p_group_exponent(const FiniteGroup& g, Scalar p);
/// The subgroup [g,g]g^p.
std::vector<Elem> frattini_subgroup(const FiniteGroup& g, Scalar p);
/// d(g) = dim_{F_p} g/[g,g]g^p; throws if g is not a p-group.
std::size_t frattini_rank(const FiniteGroup& g, Scalar p);

/// Quotient by a normal subgroup, with the projection as an element map.
struct GroupQuotient {
  FiniteGroup group;
  std::vector<Elem> projection;
};
GroupQuotient quotient_group(const FiniteGroup& g, const std::vector<Elem>& normal_subgroup);

/// Deterministic small generating set: scan elements in index order, keep
/// those outside the span of the ones already kept.
std::vector<Elem> greedy_generating_set(const FiniteGroup& g);

enum class IsoVerdict { Isomorphic, NotIsomorphic, FingerprintEqual };

/// Exact generator-image search for groups of order ≤ 100; above that only
/// invariant fingerprints (order profile, center size) are compared.
IsoVerdict isomorphism_test(const FiniteGroup& a, const FiniteGroup& b);
std::string to_string(IsoVerdict v);

}  // namespace towerforge
