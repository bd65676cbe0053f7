#pragma once

// Local conditions on ramification: property P and the tame local
// solvability criterion n′e | q − 1.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

namespace towerforge {

/// Residue field of cardinality q = p^f is stored as (p, f) so that base
/// change q ↦ q^p stays exact.
struct LocalExtensionDatum {
  std::uint64_t e = 1;
  std::uint64_t residue_char = 2;
  std::uint64_t residue_degree = 1;
  bool tame = true;
  std::uint64_t n = 1;

  /// Factors q. Throws PreconditionError if q is not a prime power or the
  /// datum is inconsistent.
  static LocalExtensionDatum from_q(std::uint64_t e, std::uint64_t q, bool tame, std::uint64_t n = 1);
  /// q, or nullopt past 64 bits.
  std::optional<std::uint64_t> q() const;
  std::string describe() const;
};

/// (p, f) with q = p^f, or nullopt.
std::optional<std::pair<std::uint64_t, std::uint64_t>> prime_power_decomposition(std::uint64_t q);

/// e ≥ 1, n ≥ 1, residue_char prime, f ≥ 1, e = 1 ⇒ tame, tame ⇒ p ∤ e.
void validate(const LocalExtensionDatum& d);

/// e = 1, or tame with e | q − 1.
bool property_p(const LocalExtensionDatum& d);

/// ∏_{ℓ | e prime} ℓ^{v_ℓ(n)}.
std::uint64_t kernel_exponent_part(std::uint64_t e, std::uint64_t n);

enum class Satz51Verdict { Holds, Fails, DoesNotApply };
std::string to_string(Satz51Verdict v);

/// Unramified: Holds. Tame: n′e | q − 1. Wild: DoesNotApply.
Satz51Verdict satz51_criterion(const LocalExtensionDatum& d);

/// Residue degree multiplied by `growth`, which is 1 or the prime p of the
/// p-extension; e unchanged. Throws PreconditionError if d fails property P.
LocalExtensionDatum property_p_base_change(const LocalExtensionDatum& d, std::uint64_t growth);

}  // namespace towerforge
