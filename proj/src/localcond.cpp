#include "towerforge/localcond.hpp"

#include "towerforge/errors.hpp"
#include "towerforge/fp.hpp"

namespace towerforge {

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t k, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (k) {
    if (k & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    k >>= 1;
  }
  return r;
}

// d | p^f − 1.
bool divides_q_minus_one(std::uint64_t d, const LocalExtensionDatum& x) {
  return powmod(x.residue_char, x.residue_degree, d) == 1 % d;
}

}  // namespace

std::optional<std::pair<std::uint64_t, std::uint64_t>> prime_power_decomposition(std::uint64_t q) {
  if (q < 2) return std::nullopt;
  std::uint64_t p = q;
  for (std::uint64_t d = 2; d * d <= q; ++d)
    if (q % d == 0) {
      p = d;
      break;
    }
  std::uint64_t f = 0;
  while (q % p == 0) {
    q /= p;
    ++f;
  }
  if (q != 1) return std::nullopt;
  return std::pair{p, f};
}

LocalExtensionDatum LocalExtensionDatum::from_q(std::uint64_t e, std::uint64_t q, bool tame, std::uint64_t n) {
  auto pf = prime_power_decomposition(q);
  if (!pf) throw PreconditionError("q = " + std::to_string(q) + " is not a prime power");
  LocalExtensionDatum d{e, pf->first, pf->second, tame, n};
  validate(d);
  return d;
}

std::optional<std::uint64_t> LocalExtensionDatum::q() const {
  std::uint64_t r = 1;
  for (std::uint64_t k = 0; k < residue_degree; ++k) {
    if (r > UINT64_MAX / residue_char) return std::nullopt;
    r *= residue_char;
  }
  return r;
}

std::string LocalExtensionDatum::describe() const {
  auto qq = q();
  std::string qs = qq ? std::to_string(*qq) : std::to_string(residue_char) + "^" + std::to_string(residue_degree);
  return "e=" + std::to_string(e) + " q=" + qs + (tame ? " tame" : " wild") + " n=" + std::to_string(n);
}

void validate(const LocalExtensionDatum& d) {
  if (d.e == 0) throw PreconditionError("ramification index must be positive");
  if (d.n == 0) throw PreconditionError("kernel exponent must be positive");
  if (!is_prime(d.residue_char)) throw PreconditionError("residue characteristic must be prime");
  if (d.residue_degree == 0) throw PreconditionError("residue degree must be positive");
  if (d.e == 1 && !d.tame) throw PreconditionError("an unramified datum is tame");
  if (d.tame && d.e % d.residue_char == 0)
    throw PreconditionError("tame ramification index " + std::to_string(d.e) + " is divisible by p = " +
                            std::to_string(d.residue_char));
}

bool property_p(const LocalExtensionDatum& d) {
  validate(d);
  if (d.e == 1) return true;
  return d.tame && divides_q_minus_one(d.e, d);
}

std::uint64_t kernel_exponent_part(std::uint64_t e, std::uint64_t n) {
  if (e == 0 || n == 0) throw PreconditionError("kernel_exponent_part needs positive arguments");
  std::uint64_t out = 1;
  for (std::uint64_t l = 2; e > 1; ++l) {
    if (l * l > e) l = e;
    if (e % l) continue;
    while (e % l == 0) e /= l;
    while (n % l == 0) {
      n /= l;
      out *= l;
    }
  }
  return out;
}

std::string to_string(Satz51Verdict v) {
  switch (v) {
    case Satz51Verdict::Holds: return "holds";
    case Satz51Verdict::Fails: return "fails";
    case Satz51Verdict::DoesNotApply: return "does-not-apply";
  }
  return "?";
}

Satz51Verdict satz51_criterion(const LocalExtensionDatum& d) {
  validate(d);
  if (d.e == 1) return Satz51Verdict::Holds;
  if (!d.tame) return Satz51Verdict::DoesNotApply;
  std::uint64_t np = kernel_exponent_part(d.e, d.n);
  auto m = static_cast<unsigned __int128>(np) * d.e;
  if (m > UINT64_MAX) throw GuardExceeded("n'e exceeds 64 bits: " + d.describe());
  return divides_q_minus_one(static_cast<std::uint64_t>(m), d) ? Satz51Verdict::Holds : Satz51Verdict::Fails;
}

LocalExtensionDatum property_p_base_change(const LocalExtensionDatum& d, std::uint64_t growth) {
  if (!property_p(d)) throw PreconditionError("base change needs property P: " + d.describe());
  if (growth != 1 && !is_prime(growth))
    throw PreconditionError("residue degree growth must be 1 or a prime, got " + std::to_string(growth));
  LocalExtensionDatum out = d;
  if (d.residue_degree > UINT64_MAX / growth) throw PreconditionError("residue degree overflows");
  out.residue_degree *= growth;
  return out;
}

}  // namespace towerforge
