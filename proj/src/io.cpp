#include "towerforge/io.hpp"

#include <fstream>
#include <sstream>

#include "towerforge/errors.hpp"

namespace towerforge {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field \"") + key + "\"");
  return *it;
}

template <class T>
T get(const Json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const Json::exception& e) {
    fail(where, e.what());
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(part);
  return out;
}

std::size_t to_size(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    unsigned long v = std::stoul(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(where, "not a non-negative integer: " + s);
  }
}

// Run a constructor, turning validation errors into parse errors.
template <class F>
auto checked(const std::string& where, F&& make) -> decltype(make()) {
  try {
    return make();
  } catch (const ParseError&) {
    throw;
  } catch (const GuardExceeded&) {
    throw;
  } catch (const PreconditionError& e) {
    fail(where, e.what());
  } catch (const std::runtime_error& e) {
    fail(where, e.what());
  }
}

std::vector<Vec> vec_list(const Json& j, const std::string& where) {
  return get<std::vector<Vec>>(j, where);
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

Matrix matrix_from_json(const Json& j, std::optional<Scalar> p) {
  auto rows = get<std::vector<Vec>>(j, "matrix");
  if (rows.empty()) fail("matrix", "no rows");
  for (const auto& r : rows) {
    if (r.size() != rows[0].size()) fail("matrix", "ragged rows");
    if (p)
      for (Scalar x : r)
        if (x >= *p) fail("matrix", "entry " + std::to_string(x) + " not reduced mod " + std::to_string(*p));
  }
  return Matrix::from_rows(rows, rows[0].size());
}

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) out.push_back(m.row_vec(r));
  return out;
}

Json vec_to_json(const Vec& v) { return Json(v); }

GroupPtr builtin_group(const std::string& spec) {
  const std::string where = "group \"" + spec + "\"";
  auto parts = split(spec, ':');
  if (parts.empty()) fail(where, "empty builtin");
  const auto& kind = parts[0];
  auto arg = [&](std::size_t k) {
    if (parts.size() <= k) fail(where, "missing parameter");
    return to_size(parts[k], where);
  };
  return checked(where, [&]() -> GroupPtr {
    FiniteGroup g = [&] {
      if (kind == "cyclic") return FiniteGroup::cyclic(arg(1));
      if (kind == "dihedral") return FiniteGroup::dihedral(arg(1));
      if (kind == "symmetric") return FiniteGroup::symmetric(arg(1));
      if (kind == "alternating") return FiniteGroup::alternating(arg(1));
      if (kind == "elementary") return FiniteGroup::elementary_abelian(static_cast<Scalar>(arg(1)), arg(2));
      if (kind == "heisenberg") return FiniteGroup::heisenberg(static_cast<Scalar>(arg(1)));
      fail(where, "unknown builtin");
    }();
    return std::make_shared<const FiniteGroup>(std::move(g));
  });
}

GroupPtr group_from_json(const Json& j) {
  if (j.is_string()) return builtin_group(j.get<std::string>());
  if (!j.is_object()) fail("group", "expected an object or builtin name");
  if (j.contains("builtin")) return builtin_group(get<std::string>(j["builtin"], "group.builtin"));
  if (j.contains("matrices")) {
    auto p = get<Scalar>(field(j, "p", "group"), "group.p");
    std::vector<Matrix> gens;
    for (const auto& m : j["matrices"]) gens.push_back(matrix_from_json(m, p));
    return checked("group.matrices", [&] {
      return std::make_shared<const FiniteGroup>(FiniteGroup::from_matrices(p, gens));
    });
  }
  auto order = get<std::size_t>(field(j, "order", "group"), "group.order");
  auto rows = get<std::vector<std::vector<Elem>>>(field(j, "mul", "group"), "group.mul");
  if (rows.size() != order) fail("group", "mul has " + std::to_string(rows.size()) + " rows, expected " + std::to_string(order));
  std::vector<Elem> table;
  for (const auto& r : rows) {
    if (r.size() != order) fail("group", "mul row has the wrong length");
    table.insert(table.end(), r.begin(), r.end());
  }
  auto gens = get<std::vector<Elem>>(field(j, "generators", "group"), "group.generators");
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = get<std::vector<std::string>>(j["labels"], "group.labels");
  return checked("group", [&] {
    return std::make_shared<const FiniteGroup>(order, std::move(table), std::move(gens), std::move(labels));
  });
}

Json group_to_json(const FiniteGroup& g) {
  Json mul = Json::array();
  for (std::size_t a = 0; a < g.order(); ++a) {
    std::vector<Elem> row(g.table().begin() + a * g.order(), g.table().begin() + (a + 1) * g.order());
    mul.push_back(row);
  }
  Json out{{"order", g.order()}, {"mul", mul}, {"generators", g.generators()}};
  if (!g.labels().empty()) out["labels"] = g.labels();
  return out;
}

GroupModule module_from_json(const Json& j) {
  auto p = get<Scalar>(field(j, "p", "module"), "module.p");
  auto group = group_from_json(field(j, "group", "module"));
  std::vector<Matrix> action;
  for (const auto& m : field(j, "action", "module")) action.push_back(matrix_from_json(m, p));
  if (j.contains("dim")) {
    auto dim = get<std::size_t>(j["dim"], "module.dim");
    for (const auto& m : action)
      if (m.rows() != dim || m.cols() != dim) fail("module", "action matrix does not match dim");
  }
  return checked("module", [&] { return GroupModule(p, group, action); });
}

GroupAction action_from_json(const Json& j) {
  auto p = get<Scalar>(field(j, "p", "action"), "action.p");
  auto phi = group_from_json(field(j, "phi", "action"));
  if (j.contains("linear")) {
    const auto& lin = j["linear"];
    auto rank = get<std::size_t>(field(lin, "rank", "action.linear"), "action.linear.rank");
    std::vector<Matrix> mats;
    for (const auto& m : field(lin, "matrices", "action.linear")) mats.push_back(matrix_from_json(m, p));
    return checked("action.linear", [&] { return linear_action(phi, p, rank, mats); });
  }
  auto target = group_from_json(field(j, "target", "action"));
  auto images = get<std::vector<std::vector<Elem>>>(field(j, "images", "action"), "action.images");
  return checked("action", [&] { return GroupAction::from_generator_images(phi, target, images); });
}

RingPtr ring_from_json(const Json& j) {
  auto p = get<Scalar>(field(j, "p", "ring"), "ring.p");
  if (j.contains("monomials")) {
    auto mons = get<std::vector<std::vector<unsigned>>>(j["monomials"], "ring.monomials");
    return checked("ring", [&] { return make_ring(FiniteLocalRing::monomial(p, mons)); });
  }
  auto e = get<unsigned>(field(j, "e", "ring"), "ring.e");
  auto rank = get<std::size_t>(field(j, "rank", "ring"), "ring.rank");
  auto structure = get<std::vector<std::vector<Vec>>>(field(j, "structure", "ring"), "ring.structure");
  if (structure.size() != rank) fail("ring", "structure does not have rank rows");
  std::vector<unsigned> orders(rank, e);
  if (j.contains("orders")) orders = get<std::vector<unsigned>>(j["orders"], "ring.orders");
  if (orders.size() != rank) fail("ring", "orders has the wrong length");
  Vec unit(rank, 0);
  if (rank > 0) unit[0] = 1;
  if (j.contains("unit")) unit = get<Vec>(j["unit"], "ring.unit");
  auto gens = vec_list(field(j, "ideal_gens", "ring"), "ring.ideal_gens");
  std::vector<std::string> names;
  if (j.contains("names")) names = get<std::vector<std::string>>(j["names"], "ring.names");
  return checked("ring", [&] {
    return make_ring(FiniteLocalRing(p, e, orders, structure, unit, gens, names));
  });
}

Json ring_to_json(const FiniteLocalRing& r) {
  Json gens = Json::array();
  for (Elem g : r.augmentation_ideal().generators) gens.push_back(r.decode(g));
  Json out{{"p", r.p()},
           {"e", r.e()},
           {"rank", r.rank()},
           {"orders", r.orders()},
           {"structure", r.structure()},
           {"unit", r.decode(r.one())},
           {"ideal_gens", gens}};
  if (!r.names().empty()) out["names"] = r.names();
  return out;
}

RingFixture fixture_from_json(const Json& j) {
  RingFixture fx;
  fx.name = get<std::string>(field(j, "name", "fixture"), "fixture.name");
  const std::string where = "fixture " + fx.name;
  if (j.contains("description")) fx.description = get<std::string>(j["description"], where);
  fx.source = ring_from_json(field(j, "source", where));
  if (j.contains("target")) {
    fx.target = ring_from_json(j["target"]);
    auto images = vec_list(field(j, "images", where), where + ".images");
    if (images.size() != fx.source->rank()) fail(where, "one image per source basis element is required");
    std::vector<Elem> imgs;
    for (const auto& v : images) {
      if (v.size() != fx.target->rank()) fail(where, "image has the wrong length");
      imgs.push_back(checked(where, [&] { return fx.target->encode(v); }));
    }
    auto h = checked(where, [&] { return hom_from_basis_images(fx.source, fx.target, imgs); });
    if (!is_ring_hom(h)) fail(where, "images do not define a ring homomorphism");
    std::vector<char> hit(fx.target->size(), 0);
    for (Elem y : h.table) hit[y] = 1;
    for (char c : hit)
      if (!c) fail(where, "projection is not surjective");
    fx.projection = std::move(h);
  }
  if (j.contains("phi"))
    for (const auto& m : j["phi"]) {
      Matrix x = matrix_from_json(m, fx.source->p());
      if (x.rows() != 2 || x.cols() != 2) fail(where, "phi matrices must be 2x2");
      fx.phi.push_back(x);
    }
  if (j.contains("expect")) {
    if (!j["expect"].is_object()) fail(where, "expect must be an object");
    fx.expect = j["expect"];
  }
  return fx;
}

ActionFixture action_fixture_from_json(const Json& j) {
  auto name = get<std::string>(field(j, "name", "action fixture"), "action fixture.name");
  std::string description;
  if (j.contains("description")) description = get<std::string>(j["description"], name);
  auto p = get<Scalar>(field(j, "p", name), name + ".p");
  Json expect = Json::object();
  if (j.contains("expect")) expect = j["expect"];
  return ActionFixture{name, description, p, action_from_json(j), expect};
}

std::vector<LocalExtensionDatum> data_from_json(const Json& j) {
  if (!j.is_array()) fail("property-p input", "expected a list");
  std::vector<LocalExtensionDatum> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string where = "datum " + std::to_string(k);
    const auto& d = j[k];
    auto e = get<std::uint64_t>(field(d, "e", where), where);
    auto q = get<std::uint64_t>(field(d, "q", where), where);
    std::uint64_t n = d.contains("n") ? get<std::uint64_t>(d["n"], where) : 1;
    std::optional<bool> tame;
    if (d.contains("tame")) tame = get<bool>(d["tame"], where);
    out.push_back(checked(where, [&] {
      auto pf = prime_power_decomposition(q);
      bool t = tame ? *tame : (pf && e % pf->first != 0);
      return LocalExtensionDatum::from_q(e, q, t, n);
    }));
  }
  return out;
}

}  // namespace towerforge
