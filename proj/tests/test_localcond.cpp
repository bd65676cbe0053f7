#include "doctest.h"
#include "towerforge/errors.hpp"
#include "towerforge/localcond.hpp"

using namespace towerforge;

namespace {

// p-adic valuation by trial division.
std::uint64_t valuation(std::uint64_t l, std::uint64_t x) {
  std::uint64_t v = 0;
  while (x % l == 0) {
    x /= l;
    ++v;
  }
  return v;
}

bool naive_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d < n; ++d)
    if (n % d == 0) return false;
  return true;
}

// p^f mod m by repeated multiplication.
std::uint64_t slow_power_mod(std::uint64_t p, std::uint64_t f, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  for (std::uint64_t k = 0; k < f; ++k) r = r * (p % m) % m;
  return r;
}

}  // namespace

TEST_CASE("prime power decomposition agrees with trial division") {
  for (std::uint64_t q = 0; q <= 2000; ++q) {
    std::optional<std::pair<std::uint64_t, std::uint64_t>> expect;
    for (std::uint64_t p = 2; p <= q && !expect; ++p) {
      if (!naive_prime(p)) continue;
      std::uint64_t x = 1, f = 0;
      while (x < q) {
        x *= p;
        ++f;
      }
      if (x == q) expect = std::pair{p, f};
    }
    CHECK(prime_power_decomposition(q) == expect);
  }
}

TEST_CASE("datum validation") {
  CHECK_THROWS_AS(LocalExtensionDatum::from_q(2, 6, true), PreconditionError);
  CHECK_THROWS_AS(LocalExtensionDatum::from_q(2, 1, true), PreconditionError);
  CHECK_THROWS_AS(LocalExtensionDatum::from_q(0, 7, true), PreconditionError);
  CHECK_THROWS_AS(LocalExtensionDatum::from_q(1, 7, false), PreconditionError);
  CHECK_THROWS_AS(LocalExtensionDatum::from_q(7, 49, true), PreconditionError);
  CHECK_THROWS_AS(LocalExtensionDatum::from_q(2, 5, true, 0), PreconditionError);
  auto d = LocalExtensionDatum::from_q(3, 49, true);
  CHECK(d.residue_char == 7);
  CHECK(d.residue_degree == 2);
  CHECK(d.q() == 49u);
  CHECK(LocalExtensionDatum{1, 2, 70, true, 1}.q() == std::nullopt);
}

TEST_CASE("property P examples") {
  for (std::uint64_t q : {2u, 3u, 4u, 5u, 7u, 8u, 9u, 27u, 1024u})
    CHECK(property_p(LocalExtensionDatum::from_q(1, q, true)));
  CHECK(property_p(LocalExtensionDatum::from_q(3, 7, true)));
  CHECK_FALSE(property_p(LocalExtensionDatum::from_q(3, 5, true)));
  CHECK_FALSE(property_p(LocalExtensionDatum::from_q(2, 4, false)));
  // wild with e | q − 1 impossible since p | e, but wild data are never P
  CHECK_FALSE(property_p(LocalExtensionDatum::from_q(5, 5, false)));
}

TEST_CASE("property P matches direct divisibility") {
  for (std::uint64_t q = 2; q <= 3000; ++q) {
    auto pf = prime_power_decomposition(q);
    if (!pf) continue;
    for (std::uint64_t e = 1; e <= 60; ++e) {
      bool tame = e % pf->first != 0;
      auto d = LocalExtensionDatum::from_q(e, q, tame);
      bool expect = e == 1 || (tame && (q - 1) % e == 0);
      CHECK(property_p(d) == expect);
    }
  }
}

TEST_CASE("kernel exponent part") {
  CHECK(kernel_exponent_part(2, 4) == 4);
  CHECK(kernel_exponent_part(6, 4) == 4);
  CHECK(kernel_exponent_part(6, 12) == 12);
  CHECK(kernel_exponent_part(5, 12) == 1);
  CHECK(kernel_exponent_part(1, 12) == 1);
  for (std::uint64_t e = 1; e <= 80; ++e)
    for (std::uint64_t n = 1; n <= 80; ++n) {
      std::uint64_t expect = 1;
      for (std::uint64_t l = 2; l <= e; ++l)
        if (naive_prime(l) && e % l == 0)
          for (std::uint64_t k = 0; k < valuation(l, n); ++k) expect *= l;
      CHECK(kernel_exponent_part(e, n) == expect);
    }
}

TEST_CASE("tame solvability criterion examples") {
  for (std::uint64_t q : {2u, 5u, 9u}) CHECK(satz51_criterion(LocalExtensionDatum::from_q(1, q, true, 7)) == Satz51Verdict::Holds);
  CHECK(satz51_criterion(LocalExtensionDatum::from_q(2, 17, true, 4)) == Satz51Verdict::Holds);
  CHECK(satz51_criterion(LocalExtensionDatum::from_q(2, 5, true, 4)) == Satz51Verdict::Fails);
  CHECK(satz51_criterion(LocalExtensionDatum::from_q(3, 7, true, 2)) == Satz51Verdict::Holds);
  CHECK(satz51_criterion(LocalExtensionDatum::from_q(3, 7, true, 3)) == Satz51Verdict::Fails);
  CHECK(satz51_criterion(LocalExtensionDatum::from_q(3, 19, true, 3)) == Satz51Verdict::Holds);
  CHECK(satz51_criterion(LocalExtensionDatum::from_q(2, 2, false, 4)) == Satz51Verdict::DoesNotApply);
  CHECK(satz51_criterion(LocalExtensionDatum::from_q(9, 27, false, 1)) == Satz51Verdict::DoesNotApply);
  CHECK(to_string(Satz51Verdict::DoesNotApply) == "does-not-apply");
}

TEST_CASE("criterion with n = e is e^2 | q - 1 for prime powers e") {
  for (std::uint64_t q = 2; q <= 5000; ++q) {
    auto pf = prime_power_decomposition(q);
    if (!pf) continue;
    for (std::uint64_t e = 2; e <= 100; ++e) {
      auto epf = prime_power_decomposition(e);
      if (!epf || epf->first == pf->first) continue;
      auto d = LocalExtensionDatum::from_q(e, q, true, e);
      bool expect = valuation(epf->first, q - 1) >= 2 * epf->second;
      CHECK((satz51_criterion(d) == Satz51Verdict::Holds) == expect);
    }
  }
}

TEST_CASE("criterion implies property P") {
  for (std::uint64_t q = 2; q <= 2000; ++q) {
    auto pf = prime_power_decomposition(q);
    if (!pf) continue;
    for (std::uint64_t e = 1; e <= 40; e += 1) {
      if (e % pf->first == 0) continue;
      for (std::uint64_t n : {1u, 2u, 3u, 4u, 6u, 8u, 9u, 12u}) {
        auto d = LocalExtensionDatum::from_q(e, q, true, n);
        if (satz51_criterion(d) == Satz51Verdict::Holds) CHECK(property_p(d));
        if (n == 1) CHECK((satz51_criterion(d) == Satz51Verdict::Holds) == property_p(d));
      }
    }
  }
}

TEST_CASE("base change examples") {
  auto d = LocalExtensionDatum::from_q(3, 7, true);
  auto up = property_p_base_change(d, 2);
  CHECK(up.e == 3);
  CHECK(up.q() == 49u);
  CHECK(property_p(up));
  CHECK(property_p_base_change(d, 7).q() == 823543u);
  auto d2 = LocalExtensionDatum::from_q(3, 7, true);
  CHECK(property_p_base_change(d2, 1).q() == 7u);
  auto sq = LocalExtensionDatum::from_q(3, 49, true);
  CHECK(property_p(sq));
  CHECK(property_p(property_p_base_change(LocalExtensionDatum::from_q(1, 9, true), 3)));
  CHECK_THROWS_AS(property_p_base_change(LocalExtensionDatum::from_q(3, 5, true), 5), PreconditionError);
  CHECK_THROWS_AS(property_p_base_change(d, 4), PreconditionError);
  CHECK_THROWS_AS(property_p_base_change(d, 0), PreconditionError);
}

TEST_CASE("base change preserves property P on the full scan") {
  std::size_t checked = 0;
  for (std::uint64_t q = 2; q <= 10000; ++q) {
    auto pf = prime_power_decomposition(q);
    if (!pf) continue;
    for (std::uint64_t e = 1; e <= 100; ++e) {
      bool tame = e % pf->first != 0;
      auto d = LocalExtensionDatum::from_q(e, q, tame);
      bool p_holds = e == 1 || (tame && (q - 1) % e == 0);
      for (std::uint64_t growth : {1u, 2u, 3u, 5u, 7u, 97u}) {
        if (!p_holds) {
          CHECK_THROWS_AS(property_p_base_change(d, growth), PreconditionError);
          continue;
        }
        auto out = property_p_base_change(d, growth);
        REQUIRE(out.e == e);
        REQUIRE(out.residue_degree == pf->second * growth);
        // q' − 1 ≡ 0 (mod e), q' = q^growth
        REQUIRE(slow_power_mod(q, growth, e) == 1 % e);
        REQUIRE(property_p(out));
        ++checked;
      }
    }
  }
  CHECK(checked > 10000);
}
