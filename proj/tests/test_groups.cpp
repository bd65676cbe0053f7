#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "towerforge/errors.hpp"
#include "towerforge/filtration.hpp"
#include "towerforge/groups.hpp"
#include "towerforge/modrep.hpp"

using namespace towerforge;

namespace {

GroupPtr ptr(FiniteGroup g) { return std::make_shared<const FiniteGroup>(std::move(g)); }

GroupAction inversion_on_z3() {
  auto z2 = ptr(FiniteGroup::cyclic(2));
  auto z3 = ptr(FiniteGroup::cyclic(3));
  return GroupAction::from_generator_images(z2, z3, {{0, 2, 1}});
}

GroupAction z3_on_v4() {
  auto z3 = ptr(FiniteGroup::cyclic(3));
  return linear_action(z3, 2, 2, {oracle::mat({{0, 1}, {1, 1}})});
}

// The canonical copy of G is normal and φ ↦ (1, φ) splits the projection.
void check_split(const FiniteGroup& gamma) {
  REQUIRE(gamma.semidirect());
  const auto& sd = *gamma.semidirect();
  const auto& G = *sd.normal;
  const auto& P = *sd.complement;
  for (Elem g = 0; g < G.order(); ++g)
    for (Elem x = 0; x < gamma.order(); ++x) {
      Elem c = gamma.mul(gamma.mul(gamma.inverse(x), sd.pair(g, P.identity())), x);
      CHECK(sd.complement_part(c) == P.identity());
    }
  for (Elem a = 0; a < P.order(); ++a)
    for (Elem b = 0; b < P.order(); ++b) {
      CHECK(gamma.mul(sd.pair(G.identity(), a), sd.pair(G.identity(), b)) == sd.pair(G.identity(), P.mul(a, b)));
    }
  for (Elem x = 0; x < gamma.order(); ++x)
    for (Elem y = 0; y < gamma.order(); ++y)
      CHECK(sd.complement_part(gamma.mul(x, y)) == P.mul(sd.complement_part(x), sd.complement_part(y)));
}

}  // namespace

TEST_CASE("table validation rejects non-groups") {
  // x·y = x − y mod 3 has no two-sided identity
  std::vector<Elem> t(9);
  for (Elem a = 0; a < 3; ++a)
    for (Elem b = 0; b < 3; ++b) t[a * 3 + b] = (a + 3 - b) % 3;
  CHECK_THROWS_AS(FiniteGroup(3, t, {1}), PreconditionError);
  CHECK_THROWS_AS(FiniteGroup(4, FiniteGroup::cyclic(4).table(), {2}), PreconditionError);
}

TEST_CASE("semidirect product with trivial complement is the normal factor") {
  auto z3 = ptr(FiniteGroup::cyclic(3));
  auto one = ptr(FiniteGroup::trivial());
  auto g = semidirect_product(GroupAction::trivial(one, z3));
  CHECK(g.order() == 3);
  CHECK(oracle::isomorphic(g, *z3));
  check_split(g);
}

TEST_CASE("Z/3 by inversion gives S_3") {
  auto g = semidirect_product(inversion_on_z3());
  CHECK(g.order() == 6);
  CHECK_FALSE(g.is_abelian());
  CHECK(oracle::isomorphic(g, FiniteGroup::symmetric(3)));
  CHECK(isomorphism_test(g, FiniteGroup::symmetric(3)) == IsoVerdict::Isomorphic);
  check_split(g);
}

TEST_CASE("(Z/2)^2 by an order-3 matrix gives A_4") {
  auto g = semidirect_product(z3_on_v4());
  CHECK(g.order() == 12);
  CHECK(center(g).size() == 1);
  CHECK(oracle::isomorphic(g, FiniteGroup::alternating(4)));
  CHECK_FALSE(oracle::isomorphic(g, FiniteGroup::dihedral(6)));
  check_split(g);
}

TEST_CASE("actions that are not by automorphisms are rejected") {
  auto z2 = ptr(FiniteGroup::cyclic(2));
  auto z3 = ptr(FiniteGroup::cyclic(3));
  CHECK_THROWS_AS(GroupAction(z2, z3, {0, 1, 2, 0, 0, 0}), PreconditionError);
  CHECK_THROWS_AS(GroupAction::from_generator_images(z2, z3, {{1, 2, 0}}), PreconditionError);
  // An order-3 automorphism cannot be the image of an involution.
  auto v4 = ptr(FiniteGroup::elementary_abelian(2, 2));
  std::vector<Elem> rot(4);
  for (Elem x = 0; x < 4; ++x) {
    auto c = elementary_coordinates(x, 2, 2);
    Vec r{c[1], static_cast<Scalar>((c[0] + c[1]) % 2)};
    rot[x] = elementary_index(r, 2);
  }
  CHECK_THROWS_AS(GroupAction::from_generator_images(z2, v4, {rot}), PreconditionError);
}

TEST_CASE("center") {
  auto z6 = FiniteGroup::cyclic(6);
  CHECK(center(z6).size() == 6);
  CHECK(center(FiniteGroup::symmetric(3)) == std::vector<Elem>{FiniteGroup::symmetric(3).identity()});
  auto h = FiniteGroup::heisenberg(3);
  CHECK(h.order() == 27);
  CHECK(center(h) == oracle::center(h));
  CHECK(center(h).size() == 3);
  for (auto g : {FiniteGroup::dihedral(4), FiniteGroup::alternating(4), FiniteGroup::symmetric(4)})
    CHECK(center(g) == oracle::center(g));
}

TEST_CASE("p-torsion of the centre") {
  CHECK(p_torsion_of_center(FiniteGroup::cyclic(9), 3).size() == 3);
  CHECK(p_torsion_of_center(FiniteGroup::cyclic(4), 2).size() == 2);
  CHECK(p_torsion_of_center(FiniteGroup::elementary_abelian(3, 2), 3).size() == 9);
  CHECK(p_torsion_of_center(FiniteGroup::cyclic(2), 3).size() == 1);
}

TEST_CASE("Frattini rank") {
  CHECK(frattini_rank(FiniteGroup::cyclic(9), 3) == 1);
  CHECK(frattini_rank(FiniteGroup::cyclic(25), 5) == 1);
  CHECK(frattini_rank(FiniteGroup::elementary_abelian(2, 3), 2) == 3);
  CHECK(frattini_rank(FiniteGroup::elementary_abelian(3, 3), 3) == 3);
  CHECK(frattini_rank(FiniteGroup::heisenberg(3), 3) == 2);
  CHECK(frattini_rank(FiniteGroup::heisenberg(2), 2) == 2);
  CHECK_THROWS_AS(frattini_rank(FiniteGroup::symmetric(3), 2), PreconditionError);
}

TEST_CASE("Frattini rank equals the minimum number of generators (p-groups up to order 64)") {
  std::vector<std::pair<FiniteGroup, Scalar>> cases;
  cases.emplace_back(FiniteGroup::cyclic(8), 2);
  cases.emplace_back(FiniteGroup::direct_product(FiniteGroup::cyclic(2), FiniteGroup::cyclic(4)), 2);
  cases.emplace_back(FiniteGroup::dihedral(4), 2);
  cases.emplace_back(FiniteGroup::dihedral(8), 2);
  cases.emplace_back(FiniteGroup::direct_product(FiniteGroup::cyclic(2), FiniteGroup::dihedral(4)), 2);
  cases.emplace_back(FiniteGroup::elementary_abelian(2, 4), 2);
  cases.emplace_back(FiniteGroup::elementary_abelian(2, 5), 2);
  cases.emplace_back(FiniteGroup::direct_product(FiniteGroup::cyclic(4), FiniteGroup::cyclic(4)), 2);
  cases.emplace_back(FiniteGroup::heisenberg(2), 2);
  cases.emplace_back(FiniteGroup::from_matrices(3, {oracle::mat({{0, 2}, {1, 0}}), oracle::mat({{1, 1}, {1, 2}})}), 2);
  cases.emplace_back(FiniteGroup::direct_product(FiniteGroup::cyclic(8), FiniteGroup::cyclic(8)), 2);
  cases.emplace_back(FiniteGroup::cyclic(27), 3);
  cases.emplace_back(FiniteGroup::elementary_abelian(3, 3), 3);
  cases.emplace_back(FiniteGroup::heisenberg(3), 3);
  cases.emplace_back(FiniteGroup::direct_product(FiniteGroup::cyclic(3), FiniteGroup::cyclic(9)), 3);
  cases.emplace_back(FiniteGroup::cyclic(25), 5);
  for (const auto& [g, p] : cases) {
    CAPTURE(g.order());
    CHECK(frattini_rank(g, p) == oracle::min_generators(g));
  }
}

TEST_CASE("quotients") {
  auto z6 = FiniteGroup::cyclic(6);
  auto q = quotient_group(z6, {0, 3});
  CHECK(q.group.order() == 3);
  CHECK(oracle::isomorphic(q.group, FiniteGroup::cyclic(3)));
  auto s3 = FiniteGroup::symmetric(3);
  std::vector<Elem> not_normal = s3.closure({s3.generators()[0]});
  CHECK_THROWS_AS(quotient_group(s3, not_normal), PreconditionError);
}

TEST_CASE("isomorphism verdicts") {
  CHECK(isomorphism_test(FiniteGroup::cyclic(4), FiniteGroup::elementary_abelian(2, 2)) == IsoVerdict::NotIsomorphic);
  CHECK(isomorphism_test(FiniteGroup::dihedral(4), FiniteGroup::from_matrices(3, {oracle::mat({{0, 2}, {1, 0}}),
                                                                                 oracle::mat({{1, 1}, {1, 2}})})) ==
        IsoVerdict::NotIsomorphic);
  CHECK(isomorphism_test(FiniteGroup::alternating(4), semidirect_product(z3_on_v4())) == IsoVerdict::Isomorphic);
  auto big = FiniteGroup::cyclic(128);
  CHECK(isomorphism_test(big, FiniteGroup::cyclic(128)) == IsoVerdict::FingerprintEqual);
}

TEST_CASE("central filtration examples") {
  SUBCASE("Z/9 with trivial action") {
    auto z9 = ptr(FiniteGroup::cyclic(9));
    auto steps = central_filtration(GroupAction::trivial(ptr(FiniteGroup::trivial()), z9), 3);
    REQUIRE(steps.size() == 2);
    CHECK(steps[0].kernel_dim == 1);
    CHECK(steps[1].kernel_dim == 1);
    CHECK(steps[1].quotient->order() == 1);
  }
  SUBCASE("(Z/3)^2 with negation") {
    auto z2 = ptr(FiniteGroup::cyclic(2));
    auto steps = central_filtration(linear_action(z2, 3, 2, {oracle::mat({{2, 0}, {0, 2}})}), 3);
    REQUIRE(steps.size() == 2);
    CHECK(steps[0].kernel_dim == 1);
  }
  SUBCASE("(Z/2)^2 with an irreducible Z/3") {
    auto steps = central_filtration(z3_on_v4(), 2);
    REQUIRE(steps.size() == 1);
    CHECK(steps[0].kernel_dim == 2);
  }
  SUBCASE("errors") {
    auto z2 = ptr(FiniteGroup::cyclic(2));
    CHECK_THROWS_AS(central_filtration(GroupAction::trivial(z2, ptr(FiniteGroup::cyclic(6))), 2), PreconditionError);
    CHECK_THROWS_AS(central_filtration(GroupAction::trivial(z2, ptr(FiniteGroup::cyclic(4))), 2), PreconditionError);
  }
}

TEST_CASE("central filtration invariants") {
  std::vector<std::pair<GroupAction, Scalar>> cases;
  auto one = ptr(FiniteGroup::trivial());
  cases.emplace_back(GroupAction::trivial(one, ptr(FiniteGroup::heisenberg(3))), 3);
  cases.emplace_back(GroupAction::trivial(one, ptr(FiniteGroup::dihedral(8))), 2);
  cases.emplace_back(z3_on_v4(), 2);
  auto z2 = ptr(FiniteGroup::cyclic(2));
  cases.emplace_back(linear_action(z2, 3, 3, {oracle::mat({{0, 1, 0}, {1, 0, 0}, {0, 0, 2}})}), 3);
  auto z3 = ptr(FiniteGroup::cyclic(3));
  cases.emplace_back(linear_action(z3, 2, 4, {oracle::mat({{0, 1, 0, 0}, {1, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}})}), 2);
  auto z4 = ptr(FiniteGroup::cyclic(4));
  cases.emplace_back(linear_action(z4, 5, 2, {oracle::mat({{0, 4}, {1, 0}})}), 5);
  for (const auto& [action, p] : cases) {
    auto steps = central_filtration(action, p);
    std::size_t total = 0;
    for (const auto& s : steps) {
      total += s.kernel_dim;
      const auto& g = *s.covering;
      for (auto k : s.kernel) {
        CHECK(g.power(k, p) == g.identity());
        for (Elem x = 0; x < g.order(); ++x) CHECK(g.mul(k, x) == g.mul(x, k));
      }
      CHECK(s.kernel.size() * s.quotient->order() == g.order());
      CHECK(is_irreducible(GroupModule(p, action.actor_ptr(), s.kernel_action)));
      CHECK(oracle::irreducible(s.kernel_action, p, s.kernel_dim));
    }
    CHECK(total == oracle::log_p(action.target().order(), p));
    REQUIRE_FALSE(steps.empty());
    CHECK(steps.back().quotient->order() == 1);
  }
}
