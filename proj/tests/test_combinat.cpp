#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "towerforge/combinat.hpp"
#include "towerforge/errors.hpp"

using namespace towerforge;

namespace {

GroupPtr ptr(FiniteGroup g) { return std::make_shared<const FiniteGroup>(std::move(g)); }

Vec random_vec(std::mt19937& rng, Scalar p, std::size_t len) {
  Vec v(len);
  for (auto& x : v) x = rng() % p;
  return v;
}

Matrix random_invertible(std::mt19937& rng, Scalar p, std::size_t m) {
  PrimeField f(p);
  while (true) {
    Matrix g(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) g(i, j) = rng() % p;
    if (f.invertible(g)) return g;
  }
}

Matrix random_plane(std::mt19937& rng, Scalar p, std::size_t m) {
  PrimeField f(p);
  while (true) {
    Matrix a = Matrix::from_rows({random_vec(rng, p, m), random_vec(rng, p, m)}, m);
    if (f.rank(a) == 2) return a;
  }
}

/// ⟨e_i, e_i'⟩ for i < i', in pair order.
std::vector<Matrix> coordinate_family(std::size_t m) {
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      Matrix a(2, m);
      a(0, i) = 1;
      a(1, j) = 1;
      out.push_back(a);
    }
  return out;
}

std::vector<Matrix> transform(const std::vector<Matrix>& fam, const Matrix& g, Scalar p) {
  PrimeField f(p);
  std::vector<Matrix> out;
  for (const auto& d : fam) out.push_back(f.mul(d, g));
  return out;
}

Vec concat(const Vec& a, const Vec& b) {
  Vec v = a;
  v.insert(v.end(), b.begin(), b.end());
  return v;
}

IsotypicProjector identity_projector(Scalar p, GroupPtr phi) {
  auto m = GroupModule::trivial(p, phi);
  std::vector<Scalar> coeff(phi->order(), 0);
  coeff[phi->identity()] = 1;
  return IsotypicProjector{m, m, coeff, Matrix::identity(1)};
}

}  // namespace

TEST_CASE("rank-2 subgroup count examples") {
  CHECK(count_rank2_subgroups(2, 1) == 1);
  CHECK(count_rank2_subgroups(3, 1) == 1);
  CHECK(count_rank2_subgroups(2, 2) == 35);
  CHECK(count_rank2_subgroups(3, 2) == 130);
  CHECK_THROWS_AS(count_rank2_subgroups(4, 1), PreconditionError);
}

TEST_CASE("enumeration matches the set of all planes") {
  for (auto [p, n] : std::vector<std::pair<Scalar, std::size_t>>{{2, 1}, {2, 2}, {3, 1}, {3, 2}, {5, 1}, {2, 3}}) {
    CAPTURE(p);
    CAPTURE(n);
    const auto fam = enumerate_rank2_subgroups(p, n);
    const auto expected = oracle::planes(p, 2 * n);
    CHECK(fam.members.size() == expected.size());
    CHECK(fam.members.size() == count_rank2_subgroups(p, n));
    std::set<std::set<Vec>> got;
    PrimeField f(p);
    for (std::size_t k = 0; k < fam.members.size(); ++k) {
      const auto& a = fam.members[k];
      CHECK(Subspace(f, a).basis() == a);
      if (k > 0) CHECK(fam.members[k - 1] < a);
      got.insert(oracle::row_span(a, p));
    }
    CHECK(got == expected);
  }
  SUBCASE("n = 1 gives the whole group") {
    const auto fam = enumerate_rank2_subgroups(2, 1);
    REQUIRE(fam.members.size() == 1);
    CHECK(fam.members[0] == Matrix::identity(2));
  }
}

TEST_CASE("count equals streamed enumeration") {
  for (Scalar p : {2u, 3u, 5u, 7u, 11u, 13u, 31u, 127u})
    for (std::size_t n = 1;; ++n) {
      std::uint64_t size = 1;
      for (std::size_t k = 0; k < 2 * n; ++k) size *= p;
      if (size > (1u << 14)) break;
      std::uint64_t seen = 0;
      for_each_rank2_subgroup(p, n, [&](const Matrix&) { ++seen; });
      CAPTURE(p);
      CAPTURE(n);
      CHECK(seen == count_rank2_subgroups(p, n));
    }
}

TEST_CASE("enumeration guards") {
  CHECK_THROWS_AS(enumerate_rank2_subgroups(2, 11), GuardExceeded);
  CHECK_THROWS_AS(enumerate_rank2_subgroups(2, 9), GuardExceeded);  // 2^18 points, too many planes
  CHECK_THROWS_AS(enumerate_rank2_subgroups(2, 3, 32), GuardExceeded);
}

TEST_CASE("T is at least n(2n-1)") {
  for (Scalar p : {2u, 3u, 5u, 7u})
    for (std::size_t n = 1; n <= 4; ++n) CHECK(count_rank2_subgroups(p, n) >= n * (2 * n - 1));
}

TEST_CASE("congruence plan examples") {
  for (Scalar p : {2u, 3u, 7u}) {
    auto a = congruence_plan(p, {1, 0}, {0, 1});
    CHECK(a.case_tag == "1b");
    CHECK(a.i == 1);
    CHECK(a.j == 1);
    CHECK(a.c == Vec{0});
    CHECK(a.d == Vec{1});
    auto b = congruence_plan(p, {0, 1}, {1, 0});
    CHECK(b.case_tag == "2b");
    CHECK(b.i == 1);
    CHECK(b.c == Vec{1});
    CHECK(b.d == Vec{0});
  }
  SUBCASE("subcase a picks the least j other than i") {
    auto pl = congruence_plan(3, {1, 0, 0, 0}, {0, 1, 0, 0});
    CHECK(pl.case_tag == "1a");
    CHECK(pl.i == 1);
    CHECK(pl.j == 2);
    CHECK(pl.a_exp == Vec{0, 1});
    auto q = congruence_plan(3, {0, 0, 1, 0}, {0, 0, 0, 1});
    CHECK(q.case_tag == "2a");
    CHECK(q.i == 1);
    CHECK(q.j == 2);
    CHECK(q.b_exp == Vec{0, 1});
  }
  CHECK_THROWS_AS(congruence_plan(3, {1, 2}, {2, 1}), PreconditionError);
  CHECK_THROWS_AS(congruence_plan(3, {0, 0}, {1, 0}), PreconditionError);
  CHECK_THROWS_AS(congruence_plan(3, {1, 0, 0}, {0, 1, 0}), PreconditionError);
}

TEST_CASE("congruence plan identity on random pairs") {
  std::mt19937 rng(2024);
  int done = 0;
  while (done < 1000) {
    const Scalar p = std::vector<Scalar>{2, 3, 5}[rng() % 3];
    const std::size_t n = 1 + rng() % 3;
    const Vec u = random_vec(rng, p, 2 * n), w = random_vec(rng, p, 2 * n);
    if (oracle::closure({u, w}, {}, p, 2 * n).size() != std::size_t(p) * p) continue;
    ++done;
    const auto plan = congruence_plan(p, u, w);
    // Case from the first nonzero a_i, else the first nonzero b_i.
    std::size_t i = 0;
    bool case1 = false;
    for (std::size_t k = 0; k < n; ++k)
      if (u[k] != 0) {
        i = k;
        case1 = true;
        break;
      }
    if (!case1)
      for (std::size_t k = 0; k < n; ++k)
        if (u[n + k] != 0) {
          i = k;
          break;
        }
    CHECK(plan.i == i + 1);
    CHECK(plan.case_tag[0] == (case1 ? '1' : '2'));
    const Scalar lead = case1 ? u[i] : u[n + i];
    const Scalar other = case1 ? w[i] : w[n + i];
    Vec expect(2 * n);
    for (std::size_t k = 0; k < 2 * n; ++k) expect[k] = (lead * w[k] % p + p - other * u[k] % p) % p;
    const Vec cd = concat(plan.c, plan.d);
    CHECK(cd == expect);
    CHECK(!oracle::is_zero(cd));
    CHECK(oracle::closure({u, cd}, {}, p, 2 * n) == oracle::closure({u, w}, {}, p, 2 * n));
    // κ-exponents are (c, d) scaled so that the chosen entry is 1.
    const Vec kv = concat(plan.a_exp, plan.b_exp);
    bool proportional = false;
    for (Scalar s = 1; s < p && !proportional; ++s) {
      Vec t(2 * n);
      for (std::size_t k = 0; k < 2 * n; ++k) t[k] = cd[k] * s % p;
      proportional = t == kv;
    }
    CHECK(proportional);
    const bool from_c = plan.case_tag == "1a" || plan.case_tag == "2b";
    CHECK((from_c ? plan.a_exp : plan.b_exp)[plan.j - 1] == 1);
  }
}

TEST_CASE("decomposition groups exhaust all planes") {
  for (auto [p, n] : std::vector<std::pair<Scalar, std::size_t>>{{2, 1}, {2, 2}, {3, 2}, {2, 3}}) {
    auto fam = enumerate_rank2_subgroups(p, n);
    auto plans = congruence_plans(fam);
    CHECK(exhaustion_holds(fam, plans));
    plans.pop_back();
    CHECK_FALSE(exhaustion_holds(fam, plans));
  }
}

TEST_CASE("exponent assembly and readback") {
  SUBCASE("single label") {
    auto one = ptr(FiniteGroup::trivial());
    SubgroupFamily fam(ElementaryAbelian(5, 2), {Matrix::identity(2)});
    auto t = assemble_nu_exponents(congruence_plans(fam), fam, one, {0});
    CHECK(t.s == oracle::mat({{1}}));
    CHECK(t.t == oracle::mat({{0}}));
  }
  SUBCASE("all 35 labels over Z/3") {
    auto z3 = ptr(FiniteGroup::cyclic(3));
    auto fam = enumerate_rank2_subgroups(2, 2);
    auto plans = congruence_plans(fam);
    auto t = assemble_nu_exponents(plans, fam, z3, {0, 1});
    for (std::size_t l = 0; l < 35; ++l) {
      auto r = read_exponents(t, 0, l);
      CHECK(concat(r.a, r.b) == fam.members[l].row_vec(0));
    }
    // Exactly 2n entries per label sit at g_k^{-1}(λ_ℓ); the rest vanish.
    std::size_t nonzero = 0;
    for (Scalar x : t.s.data()) nonzero += x != 0;
    for (Scalar x : t.t.data()) nonzero += x != 0;
    std::size_t expected = 0;
    for (const auto& m : fam.members)
      for (std::size_t k = 0; k < 4; ++k) expected += m(0, k) != 0;
    CHECK(nonzero == expected);
    CHECK_THROWS_AS(assemble_nu_exponents(plans, fam, z3, {1, 1}), PreconditionError);
  }
  SUBCASE("label order does not matter") {
    auto z3 = ptr(FiniteGroup::cyclic(3));
    auto fam = enumerate_rank2_subgroups(2, 2);
    std::vector<std::size_t> perm(fam.members.size());
    for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = k;
    std::shuffle(perm.begin(), perm.end(), std::mt19937(5));
    std::vector<Matrix> shuffled;
    for (auto k : perm) shuffled.push_back(fam.members[k]);
    SubgroupFamily fam2(fam.ambient, shuffled);
    auto t1 = assemble_nu_exponents(congruence_plans(fam), fam, z3, {0, 1});
    auto t2 = assemble_nu_exponents(congruence_plans(fam2), fam2, z3, {0, 1});
    for (std::size_t k = 0; k < perm.size(); ++k)
      for (Elem x = 0; x < 3; ++x) {
        auto r1 = read_exponents(t1, x, perm[k]);
        auto r2 = read_exponents(t2, x, k);
        CHECK(r1.a == r2.a);
        CHECK(r1.b == r2.b);
      }
  }
  SUBCASE("mismatched plan") {
    SubgroupFamily fam(ElementaryAbelian(3, 4), {coordinate_family(4)[0]});
    auto plan = congruence_plan(3, {0, 0, 1, 0}, {0, 0, 0, 1}, 0);
    CHECK_THROWS_AS(assemble_nu_exponents({plan}, fam, ptr(FiniteGroup::cyclic(2)), {0, 1}), PreconditionError);
  }
}

TEST_CASE("projection stability") {
  SUBCASE("identity projector") {
    auto z3 = ptr(FiniteGroup::cyclic(3));
    auto fam = enumerate_rank2_subgroups(2, 2);
    auto t = assemble_nu_exponents(congruence_plans(fam), fam, z3, {0, 1});
    CHECK(verify_projection_stability(t, identity_projector(2, z3), fam));
  }
  SUBCASE("trivial group") {
    auto one = ptr(FiniteGroup::trivial());
    auto fam = enumerate_rank2_subgroups(3, 1);
    auto t = assemble_nu_exponents(congruence_plans(fam), fam, one, {0});
    auto pr = isotypic_projector(GroupModule::trivial(3, one), GroupModule::trivial(3, one));
    CHECK(verify_projection_stability(t, pr, fam));
  }
  SUBCASE("sign piece of Z/2 over F_3") {
    auto z2 = ptr(FiniteGroup::cyclic(2));
    auto fam = enumerate_rank2_subgroups(3, 1);
    auto sign = GroupModule(3, z2, {oracle::mat({{2}})});
    auto m = GroupModule::regular(3, z2);
    auto pr = isotypic_projector(m, sign);
    for (Elem g1 : {Elem{0}, Elem{1}}) {
      auto t = assemble_nu_exponents(congruence_plans(fam), fam, z2, {g1});
      CHECK(verify_projection_stability(t, pr, fam));
    }
  }
  SUBCASE("two-dimensional piece of Z/3 over F_2") {
    auto z3 = ptr(FiniteGroup::cyclic(3));
    auto fam = enumerate_rank2_subgroups(2, 2);
    auto t = assemble_nu_exponents(congruence_plans(fam), fam, z3, {0, 1});
    auto m = GroupModule::regular(2, z3);
    auto d = simple_decomposition(m);
    REQUIRE(d.size() == 2);
    auto pr = isotypic_projector(m, d[1].module);
    // Outcome recorded, not assumed; it is pinned so a change is noticed.
    const bool stable = verify_projection_stability(t, pr, fam);
    MESSAGE("Z/3 over F_2, V two-dimensional: stability = " << stable);
    CHECK(stable == true);
  }
}

TEST_CASE("wedge criterion examples") {
  SUBCASE("ambient itself") {
    SubgroupFamily fam(ElementaryAbelian(3, 4), {Matrix::identity(4)});
    auto r = wedge_surjectivity(fam);
    CHECK(r.surjective);
    CHECK(r.rank == 6);
  }
  SUBCASE("single cyclic subgroup of (Z/2)^2") {
    SubgroupFamily fam(ElementaryAbelian(2, 2), {oracle::mat({{1, 1}})});
    auto r = wedge_surjectivity(fam);
    CHECK_FALSE(r.surjective);
    CHECK(r.rank == 0);
    CHECK(r.required == 1);
  }
  SUBCASE("coordinate pairs in (Z/2)^4") {
    SubgroupFamily fam(ElementaryAbelian(2, 4), coordinate_family(4));
    auto r = wedge_surjectivity(fam);
    CHECK(r.surjective);
    CHECK(r.rank == 6);
  }
  SUBCASE("cyclic ambient needs nothing") {
    SubgroupFamily fam(ElementaryAbelian(5, 1), {});
    auto r = wedge_surjectivity(fam);
    CHECK(r.surjective);
    CHECK(r.required == 0);
  }
}

TEST_CASE("wedge rank agrees with the span oracle") {
  std::mt19937 rng(99);
  for (int t = 0; t < 100; ++t) {
    const Scalar p = 2 + rng() % 2;
    const std::size_t m = 3 + rng() % 2;
    std::vector<Matrix> members;
    const std::size_t count = rng() % 5;
    for (std::size_t k = 0; k < count; ++k) {
      if (rng() % 3 == 0) {
        Vec v = random_vec(rng, p, m);
        if (oracle::is_zero(v)) v[0] = 1;
        members.push_back(Matrix::from_rows({v}, m));
      } else {
        members.push_back(random_plane(rng, p, m));
      }
    }
    SubgroupFamily fam(ElementaryAbelian(p, m), members);
    CHECK(wedge_surjectivity(fam).surjective == oracle::wedge_spans(members, p, m));
  }
}

TEST_CASE("pair indices follow the listed order") {
  for (std::size_t n = 1; n <= 4; ++n) {
    std::size_t expect = 0;
    for (std::size_t i = 1; i <= 2 * n; ++i)
      for (std::size_t j = i + 1; j <= 2 * n; ++j) CHECK(pair_member_index(n, i, j) == expect++);
    CHECK(expect == n * (2 * n - 1));
  }
}

TEST_CASE("spanning basis examples") {
  SUBCASE("n = 1") {
    SubgroupFamily fam(ElementaryAbelian(3, 2), {oracle::mat({{1, 2}, {0, 1}})});
    auto b = select_spanning_basis(fam);
    CHECK(b.basis == Matrix::identity(2));
    CHECK(b.intersections.size() == 2);
    CHECK(certificates_prove_surjectivity(fam, b));
  }
  SUBCASE("coordinate family in (Z/2)^4") {
    SubgroupFamily fam(ElementaryAbelian(2, 4), coordinate_family(4));
    auto b = select_spanning_basis(fam);
    CHECK(b.basis == Matrix::identity(4));
    CHECK(b.certificates.size() == 6);
    CHECK(certificates_prove_surjectivity(fam, b));
  }
  SUBCASE("change of basis") {
    std::mt19937 rng(17);
    for (Scalar p : {2u, 3u, 5u}) {
      for (std::size_t m : {4u, 6u}) {
        const Matrix g = random_invertible(rng, p, m);
        SubgroupFamily fam(ElementaryAbelian(p, m), transform(coordinate_family(m), g, p));
        auto b = select_spanning_basis(fam);
        PrimeField f(p);
        for (std::size_t i = 0; i < m; ++i) CHECK(b.intersections[i] == Subspace(f, Matrix::from_rows({g.row_vec(i)}, m)));
        CHECK(certificates_prove_surjectivity(fam, b));
        CHECK(wedge_surjectivity(fam).surjective);
      }
    }
  }
  SUBCASE("family not matching the hypotheses") {
    auto fam0 = coordinate_family(4);
    fam0[0] = oracle::mat({{0, 0, 1, 0}, {0, 0, 0, 1}});
    SubgroupFamily fam(ElementaryAbelian(2, 4), fam0);
    try {
      select_spanning_basis(fam);
      FAIL("expected an error");
    } catch (const PreconditionError& e) {
      CHECK(std::string(e.what()).find("B_1") != std::string::npos);
    }
  }
}

TEST_CASE("spanning certificates never contradict the rank computation") {
  std::mt19937 rng(4242);
  int proved = 0;
  for (int t = 0; t < 100; ++t) {
    const Scalar p = 2 + rng() % 2;
    const std::size_t m = 2 * (1 + rng() % 2);
    auto members = transform(coordinate_family(m), random_invertible(rng, p, m), p);
    if (rng() % 3 == 0) members[rng() % members.size()] = random_plane(rng, p, m);
    if (rng() % 3 == 0) members.push_back(random_plane(rng, p, m));
    SubgroupFamily fam(ElementaryAbelian(p, m), members);
    const bool direct = wedge_surjectivity(fam).surjective;
    CHECK(direct == oracle::wedge_spans(members, p, m));
    try {
      auto b = select_spanning_basis(fam);
      CHECK(certificates_prove_surjectivity(fam, b));
      CHECK(direct);
      ++proved;
    } catch (const PreconditionError&) {
    }
  }
  CHECK(proved > 50);
}
