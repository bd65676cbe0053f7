#pragma once

// JSON input and output for groups, modules, actions, rings and fixtures.
// Every reader throws ParseError on malformed input; validation failures from
// the underlying constructors are rethrown as ParseError with the path.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "towerforge/groups.hpp"
#include "towerforge/localcond.hpp"
#include "towerforge/localring.hpp"
#include "towerforge/modrep.hpp"

namespace towerforge {

using Json = nlohmann::json;

Json read_json_file(const std::string& path);

Matrix matrix_from_json(const Json& j, std::optional<Scalar> p = std::nullopt);
Json matrix_to_json(const Matrix& m);
Json vec_to_json(const Vec& v);

/// {"order", "mul", "generators", "labels"?} or {"builtin": "cyclic:6"}.
/// Builtins: cyclic:n, dihedral:n, symmetric:n, alternating:n,
/// elementary:p:r, heisenberg:p, and {"matrices": [...], "p": p}.
GroupPtr group_from_json(const Json& j);
GroupPtr builtin_group(const std::string& spec);
Json group_to_json(const FiniteGroup& g);

/// {"p", "dim"?, "group", "action": [matrix per generator]}.
GroupModule module_from_json(const Json& j);

/// {"p", "phi": group, "linear": {"rank", "matrices"}} or
/// {"p", "phi": group, "target": group, "images": [[...] per phi generator]}.
GroupAction action_from_json(const Json& j);

/// {"p", "e", "rank", "orders"?, "structure", "unit"?, "ideal_gens", "names"?}
/// or {"p", "monomials": [[exponents]...]}.
RingPtr ring_from_json(const Json& j);
Json ring_to_json(const FiniteLocalRing& r);

struct RingFixture {
  std::string name;
  std::string description;
  RingPtr source;
  RingPtr target;                   // null when there is no projection
  std::optional<RingHom> projection;
  std::vector<Matrix> phi;          // 2×2 over F_p
  Json expect = Json::object();
};
/// {"name", "description"?, "source": ring, "target"?: ring, "images"?: [target
/// coordinates per source basis element], "phi"?: [2×2], "expect"?: {...}}.
RingFixture fixture_from_json(const Json& j);

struct ActionFixture {
  std::string name;
  std::string description;
  Scalar p = 2;
  GroupAction action;
  Json expect = Json::object();
};
ActionFixture action_fixture_from_json(const Json& j);

/// A list of {"e", "q", "tame"?, "n"?} objects (tame defaults to p ∤ e).
std::vector<LocalExtensionDatum> data_from_json(const Json& j);

}  // namespace towerforge
