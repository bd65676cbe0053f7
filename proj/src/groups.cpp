#include "towerforge/groups.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include "towerforge/errors.hpp"

namespace towerforge {

Elem SemidirectLayout::pair(Elem g, Elem phi) const { return static_cast<Elem>(g + normal->order() * phi); }
Elem SemidirectLayout::normal_part(Elem x) const { return static_cast<Elem>(x % normal->order()); }
Elem SemidirectLayout::complement_part(Elem x) const { return static_cast<Elem>(x / normal->order()); }

FiniteGroup::FiniteGroup(std::size_t order, std::vector<Elem> table, std::vector<Elem> generators,
                         std::vector<std::string> labels)
    : order_(order), table_(std::move(table)), generators_(std::move(generators)), labels_(std::move(labels)) {
  const std::size_t n = order_;
  if (n == 0) throw PreconditionError("group order must be positive");
  if (n > kMaxTableOrder) throw GuardExceeded("group order exceeds multiplication-table limit");
  if (table_.size() != n * n) throw PreconditionError("multiplication table has wrong size");
  if (!labels_.empty() && labels_.size() != n) throw PreconditionError("label count differs from order");
  for (auto x : table_)
    if (x >= n) throw PreconditionError("multiplication table entry out of range");
  for (auto g : generators_)
    if (g >= n) throw PreconditionError("generator index out of range");

  // Identity: the element e with e·x = x·e = x for all x.
  bool found = false;
  for (Elem e = 0; e < n && !found; ++e) {
    bool ok = true;
    for (Elem x = 0; x < n && ok; ++x) ok = mul(e, x) == x && mul(x, e) == x;
    if (ok) {
      identity_ = e;
      found = true;
    }
  }
  if (!found) throw PreconditionError("multiplication table has no two-sided identity");

  inverse_.assign(n, 0);
  for (Elem a = 0; a < n; ++a) {
    bool ok = false;
    for (Elem b = 0; b < n && !ok; ++b)
      if (mul(a, b) == identity_ && mul(b, a) == identity_) {
        inverse_[a] = b;
        ok = true;
      }
    if (!ok) throw PreconditionError("element without two-sided inverse");
  }

  // Every row and column is a permutation in a group table.
  std::vector<char> seen(n);
  for (Elem a = 0; a < n; ++a) {
    std::fill(seen.begin(), seen.end(), 0);
    for (Elem b = 0; b < n; ++b) seen[mul(a, b)] = 1;
    if (std::count(seen.begin(), seen.end(), 1) != static_cast<long>(n))
      throw PreconditionError("multiplication table row is not a permutation");
  }

  if (closure(generators_).size() != n) throw PreconditionError("generators do not generate the group");

  // Light's associativity test: checking (x·g)·y = x·(g·y) for g in a generating set suffices.
  for (auto g : generators_)
    for (Elem x = 0; x < n; ++x)
      for (Elem y = 0; y < n; ++y)
        if (mul(mul(x, g), y) != mul(x, mul(g, y))) throw PreconditionError("multiplication is not associative");
}

void FiniteGroup::set_semidirect(SemidirectLayout layout) {
  if (layout.normal->order() * layout.complement->order() != order_)
    throw PreconditionError("semidirect layout does not match group order");
  semidirect_ = std::move(layout);
}

Elem FiniteGroup::power(Elem a, std::uint64_t k) const {
  Elem result = identity_, base = a;
  while (k) {
    if (k & 1) result = mul(result, base);
    base = mul(base, base);
    k >>= 1;
  }
  return result;
}

Elem FiniteGroup::commutator(Elem a, Elem b) const { return mul(mul(inverse(a), inverse(b)), mul(a, b)); }

std::size_t FiniteGroup::element_order(Elem a) const {
  std::size_t k = 1;
  for (Elem x = a; x != identity_; x = mul(x, a)) ++k;
  return k;
}

std::vector<Elem> FiniteGroup::closure(const std::vector<Elem>& gens) const {
  std::vector<char> in(order_, 0);
  std::vector<Elem> elems{identity_};
  in[identity_] = 1;
  for (std::size_t head = 0; head < elems.size(); ++head)
    for (auto g : gens) {
      Elem x = mul(elems[head], g);
      if (!in[x]) {
        in[x] = 1;
        elems.push_back(x);
      }
    }
  std::sort(elems.begin(), elems.end());
  return elems;
}

std::vector<Elem> FiniteGroup::normal_closure(const std::vector<Elem>& gens) const {
  std::vector<Elem> conj;
  std::vector<char> in(order_, 0);
  std::vector<Elem> queue(gens.begin(), gens.end());
  for (auto g : gens) in[g] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head)
    for (auto s : generators_) {
      Elem c = mul(mul(inverse(s), queue[head]), s);
      if (!in[c]) {
        in[c] = 1;
        queue.push_back(c);
      }
    }
  return closure(queue);
}

bool FiniteGroup::is_abelian() const {
  for (auto a : generators_)
    for (auto b : generators_)
      if (mul(a, b) != mul(b, a)) return false;
  return true;
}

FiniteGroup FiniteGroup::cyclic(std::size_t n) {
  std::vector<Elem> t(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) t[a * n + b] = static_cast<Elem>((a + b) % n);
  return FiniteGroup(n, std::move(t), {n > 1 ? Elem{1} : Elem{0}});
}

Vec elementary_coordinates(Elem x, Scalar p, std::size_t rank) {
  Vec c(rank);
  for (std::size_t i = rank; i-- > 0;) {
    c[i] = x % p;
    x /= p;
  }
  return c;
}

Elem elementary_index(std::span<const Scalar> coords, Scalar p) {
  Elem x = 0;
  for (auto c : coords) x = x * p + c;
  return x;
}

FiniteGroup FiniteGroup::elementary_abelian(Scalar p, std::size_t rank) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < rank; ++i) n *= p;
  if (n > kMaxTableOrder) throw GuardExceeded("elementary abelian group too large for a table");
  std::vector<Elem> t(n * n);
  for (Elem a = 0; a < n; ++a) {
    auto ca = elementary_coordinates(a, p, rank);
    for (Elem b = 0; b < n; ++b) {
      auto cb = elementary_coordinates(b, p, rank);
      for (std::size_t i = 0; i < rank; ++i) cb[i] = (ca[i] + cb[i]) % p;
      t[a * n + b] = elementary_index(cb, p);
    }
  }
  std::vector<Elem> gens;
  for (std::size_t i = 0; i < rank; ++i) {
    Vec e(rank, 0);
    e[i] = 1;
    gens.push_back(elementary_index(e, p));
  }
  if (gens.empty()) gens.push_back(0);
  return FiniteGroup(n, std::move(t), std::move(gens));
}

FiniteGroup FiniteGroup::direct_product(const FiniteGroup& a, const FiniteGroup& b) {
  const std::size_t na = a.order(), nb = b.order(), n = na * nb;
  std::vector<Elem> t(n * n);
  for (Elem x = 0; x < n; ++x)
    for (Elem y = 0; y < n; ++y)
      t[x * n + y] = static_cast<Elem>(a.mul(x % na, y % na) + na * b.mul(x / na, y / na));
  std::vector<Elem> gens;
  for (auto g : a.generators()) gens.push_back(g);
  for (auto h : b.generators()) gens.push_back(static_cast<Elem>(na * h));
  return FiniteGroup(n, std::move(t), std::move(gens));
}

FiniteGroup FiniteGroup::from_permutations(const std::vector<std::vector<Elem>>& gens) {
  if (gens.empty()) return trivial();
  const std::size_t deg = gens.front().size();
  std::vector<Elem> id(deg);
  std::iota(id.begin(), id.end(), Elem{0});
  // Composition: (a·b)(x) = a(b(x)), so products act right-to-left.
  auto compose = [](const std::vector<Elem>& a, const std::vector<Elem>& b) {
    std::vector<Elem> c(a.size());
    for (std::size_t x = 0; x < a.size(); ++x) c[x] = a[b[x]];
    return c;
  };
  return generate_group(id, gens, compose).first;
}

FiniteGroup FiniteGroup::symmetric(std::size_t n) {
  if (n <= 1) return trivial();
  std::vector<Elem> swap01(n), cycle(n);
  std::iota(swap01.begin(), swap01.end(), Elem{0});
  std::swap(swap01[0], swap01[1]);
  for (std::size_t i = 0; i < n; ++i) cycle[i] = static_cast<Elem>((i + 1) % n);
  return from_permutations({swap01, cycle});
}

FiniteGroup FiniteGroup::alternating(std::size_t n) {
  if (n <= 2) return trivial();
  std::vector<std::vector<Elem>> gens;
  for (std::size_t k = 2; k < n; ++k) {
    std::vector<Elem> c(n);
    std::iota(c.begin(), c.end(), Elem{0});
    c[0] = 1;
    c[1] = static_cast<Elem>(k);
    c[k] = 0;
    gens.push_back(c);
  }
  return from_permutations(gens);
}

FiniteGroup FiniteGroup::dihedral(std::size_t n) {
  std::vector<Elem> rot(n), refl(n);
  for (std::size_t i = 0; i < n; ++i) {
    rot[i] = static_cast<Elem>((i + 1) % n);
    refl[i] = static_cast<Elem>((n - i) % n);
  }
  return from_permutations({rot, refl});
}

FiniteGroup FiniteGroup::heisenberg(Scalar p) {
  PrimeField f(p);
  Matrix x = Matrix::identity(3), y = Matrix::identity(3);
  x(0, 1) = 1;
  y(1, 2) = 1;
  return from_matrices(p, {x, y});
}

FiniteGroup FiniteGroup::from_matrices(Scalar p, const std::vector<Matrix>& gens) {
  PrimeField f(p);
  if (gens.empty()) return trivial();
  for (const auto& g : gens)
    if (!f.invertible(g)) throw PreconditionError("matrix generator is not invertible");
  return generate_group(Matrix::identity(gens.front().rows()), gens,
                        [&](const Matrix& a, const Matrix& b) { return f.mul(a, b); })
      .first;
}

GroupAction::GroupAction(GroupPtr actor, GroupPtr target, std::vector<Elem> table)
    : actor_(std::move(actor)), target_(std::move(target)), table_(std::move(table)) {
  const auto& A = *actor_;
  const auto& G = *target_;
  const std::size_t n = G.order();
  if (table_.size() != A.order() * n) throw PreconditionError("action table has wrong size");
  std::vector<char> seen(n);
  for (Elem phi = 0; phi < A.order(); ++phi) {
    std::fill(seen.begin(), seen.end(), 0);
    for (Elem g = 0; g < n; ++g) {
      Elem x = act(phi, g);
      if (x >= n) throw PreconditionError("action table entry out of range");
      seen[x] = 1;
    }
    if (std::count(seen.begin(), seen.end(), 1) != static_cast<long>(n))
      throw PreconditionError("action is not by bijections");
    for (Elem a = 0; a < n; ++a)
      for (Elem b = 0; b < n; ++b)
        if (act(phi, G.mul(a, b)) != G.mul(act(phi, a), act(phi, b)))
          throw PreconditionError("action is not by automorphisms");
  }
  for (Elem g = 0; g < n; ++g)
    if (act(A.identity(), g) != g) throw PreconditionError("identity of actor does not act trivially");
  for (Elem phi = 0; phi < A.order(); ++phi)
    for (Elem psi = 0; psi < A.order(); ++psi)
      for (Elem g = 0; g < n; ++g)
        if (act(A.mul(phi, psi), g) != act(phi, act(psi, g)))
          throw PreconditionError("action is not a homomorphism into Aut(target)");
}

GroupAction GroupAction::from_generator_images(GroupPtr actor, GroupPtr target,
                                               const std::vector<std::vector<Elem>>& images) {
  const auto& A = *actor;
  const std::size_t n = target->order();
  if (images.size() != A.generators().size()) throw PreconditionError("need one automorphism per actor generator");
  std::vector<std::vector<Elem>> perm(A.order());
  perm[A.identity()].resize(n);
  std::iota(perm[A.identity()].begin(), perm[A.identity()].end(), Elem{0});
  std::vector<Elem> queue{A.identity()};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Elem x = queue[head];
    for (std::size_t i = 0; i < A.generators().size(); ++i) {
      Elem y = A.mul(x, A.generators()[i]);
      // act(x·s, g) = act(x, act(s, g))
      std::vector<Elem> py(n);
      for (Elem g = 0; g < n; ++g) py[g] = perm[x][images[i].at(g)];
      if (perm[y].empty()) {
        perm[y] = std::move(py);
        queue.push_back(y);
      } else if (perm[y] != py) {
        throw PreconditionError("generator automorphisms do not respect actor relations");
      }
    }
  }
  std::vector<Elem> table;
  table.reserve(A.order() * n);
  for (const auto& p : perm) table.insert(table.end(), p.begin(), p.end());
  return GroupAction(std::move(actor), std::move(target), std::move(table));
}

GroupAction GroupAction::trivial(GroupPtr actor, GroupPtr target) {
  const std::size_t n = target->order();
  std::vector<Elem> table(actor->order() * n);
  for (std::size_t i = 0; i < table.size(); ++i) table[i] = static_cast<Elem>(i % n);
  return GroupAction(std::move(actor), std::move(target), std::move(table));
}

GroupAction linear_action(GroupPtr actor, Scalar p, std::size_t rank, const std::vector<Matrix>& generator_matrices) {
  PrimeField f(p);
  auto target = std::make_shared<const FiniteGroup>(FiniteGroup::elementary_abelian(p, rank));
  std::vector<std::vector<Elem>> images;
  for (const auto& m : generator_matrices) {
    if (m.rows() != rank || m.cols() != rank || !f.invertible(m))
      throw PreconditionError("linear action needs invertible rank×rank matrices");
    std::vector<Elem> img(target->order());
    for (Elem x = 0; x < target->order(); ++x) {
      auto v = f.apply(m, elementary_coordinates(x, p, rank));
      img[x] = elementary_index(v, p);
    }
    images.push_back(std::move(img));
  }
  return GroupAction::from_generator_images(std::move(actor), std::move(target), images);
}

FiniteGroup semidirect_product(const GroupAction& action) {
  const auto& G = action.target();
  const auto& P = action.actor();
  const std::size_t ng = G.order(), np = P.order(), n = ng * np;
  if (n > kMaxTableOrder) throw GuardExceeded("semidirect product exceeds table limit");
  std::vector<Elem> t(n * n);
  // (g₁,φ₁)(g₂,φ₂) = (g₁·φ₁(g₂), φ₁φ₂)
  for (Elem x = 0; x < n; ++x) {
    Elem g1 = x % ng, f1 = x / ng;
    for (Elem y = 0; y < n; ++y) {
      Elem g2 = y % ng, f2 = y / ng;
      t[x * n + y] = static_cast<Elem>(G.mul(g1, action.act(f1, g2)) + ng * P.mul(f1, f2));
    }
  }
  std::vector<Elem> gens;
  for (auto g : G.generators()) gens.push_back(static_cast<Elem>(g + ng * P.identity()));
  for (auto f : P.generators()) gens.push_back(static_cast<Elem>(G.identity() + ng * f));
  FiniteGroup out(n, std::move(t), std::move(gens));
  out.set_semidirect({action.target_ptr(), action.actor_ptr()});
  return out;
}

std::vector<Elem> center(const FiniteGroup& g) {
  std::vector<Elem> z;
  for (Elem x = 0; x < g.order(); ++x) {
    bool central = true;
    for (auto s : g.generators())
      if (g.mul(x, s) != g.mul(s, x)) {
        central = false;
        break;
      }
    if (central) z.push_back(x);
  }
  return z;
}

std::vector<Elem> p_torsion_of_center(const FiniteGroup& g, Scalar p) {
  std::vector<Elem> out;
  for (auto z : center(g))
    if (g.power(z, p) == g.identity()) out.push_back(z);
  return out;
}

std::optional<std::size_t> p_group_exponent(const FiniteGroup& g, Scalar p) {
  std::size_t n = g.order(), k = 0;
  while (n % p == 0) {
    n /= p;
    ++k;
  }
  if (n != 1) return std::nullopt;
  return k;
}

std::vector<Elem> frattini_subgroup(const FiniteGroup& g, Scalar p) {
  std::vector<Elem> seeds;
  const auto& gens = g.generators();
  for (std::size_t i = 0; i < gens.size(); ++i) {
    seeds.push_back(g.power(gens[i], p));
    for (std::size_t j = i + 1; j < gens.size(); ++j) seeds.push_back(g.commutator(gens[i], gens[j]));
  }
  // Smallest normal N with g/N elementary abelian: generators commute and have order p mod N.
  return g.normal_closure(seeds);
}

std::size_t frattini_rank(const FiniteGroup& g, Scalar p) {
  auto k = p_group_exponent(g, p);
  if (!k) throw PreconditionError("frattini_rank: group is not a p-group");
  std::size_t index = g.order() / frattini_subgroup(g, p).size(), d = 0;
  while (index > 1) {
    index /= p;
    ++d;
  }
  return d;
}

GroupQuotient quotient_group(const FiniteGroup& g, const std::vector<Elem>& normal_subgroup) {
  const std::size_t n = g.order();
  std::vector<Elem> coset(n, static_cast<Elem>(-1));
  std::vector<Elem> reps;
  for (Elem x = 0; x < n; ++x) {
    if (coset[x] != static_cast<Elem>(-1)) continue;
    Elem id = static_cast<Elem>(reps.size());
    reps.push_back(x);
    for (auto k : normal_subgroup) coset[g.mul(x, k)] = id;
  }
  const std::size_t m = reps.size();
  if (m * normal_subgroup.size() != n) throw PreconditionError("quotient: not a subgroup");
  std::vector<Elem> t(m * m);
  for (Elem a = 0; a < m; ++a)
    for (Elem b = 0; b < m; ++b) t[a * m + b] = coset[g.mul(reps[a], reps[b])];
  // Normality: the coset of a product must not depend on the representatives.
  for (Elem x = 0; x < n; ++x)
    for (auto s : g.generators())
      if (coset[g.mul(x, s)] != t[coset[x] * m + coset[s]]) throw PreconditionError("quotient: subgroup is not normal");
  std::vector<Elem> gens;
  for (auto s : g.generators()) gens.push_back(coset[s]);
  return {FiniteGroup(m, std::move(t), std::move(gens)), std::move(coset)};
}

std::vector<Elem> greedy_generating_set(const FiniteGroup& g) {
  std::vector<Elem> gens;
  std::vector<Elem> span{g.identity()};
  for (Elem x = 0; x < g.order() && span.size() < g.order(); ++x) {
    if (std::binary_search(span.begin(), span.end(), x)) continue;
    gens.push_back(x);
    span = g.closure(gens);
  }
  if (gens.empty()) gens.push_back(g.identity());
  return gens;
}

namespace {

std::vector<std::size_t> order_profile(const FiniteGroup& g) {
  std::vector<std::size_t> orders;
  for (Elem x = 0; x < g.order(); ++x) orders.push_back(g.element_order(x));
  std::sort(orders.begin(), orders.end());
  return orders;
}

// Try to extend gens[i] ↦ images[i] to an isomorphism a → b by word BFS.
bool extends_to_isomorphism(const FiniteGroup& a, const FiniteGroup& b, const std::vector<Elem>& gens,
                            const std::vector<Elem>& images) {
  std::vector<Elem> phi(a.order(), static_cast<Elem>(-1));
  std::vector<char> hit(b.order(), 0);
  phi[a.identity()] = b.identity();
  hit[b.identity()] = 1;
  std::vector<Elem> queue{a.identity()};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Elem x = queue[head];
    for (std::size_t i = 0; i < gens.size(); ++i) {
      Elem y = a.mul(x, gens[i]);
      Elem fy = b.mul(phi[x], images[i]);
      if (phi[y] == static_cast<Elem>(-1)) {
        if (hit[fy]) return false;
        phi[y] = fy;
        hit[fy] = 1;
        queue.push_back(y);
      } else if (phi[y] != fy) {
        return false;
      }
    }
  }
  return queue.size() == a.order();
}

}  // namespace

IsoVerdict isomorphism_test(const FiniteGroup& a, const FiniteGroup& b) {
  if (a.order() != b.order() || order_profile(a) != order_profile(b) || center(a).size() != center(b).size())
    return IsoVerdict::NotIsomorphic;
  if (a.order() > 100) return IsoVerdict::FingerprintEqual;
  auto gens = greedy_generating_set(a);
  std::vector<std::vector<Elem>> candidates(gens.size());
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (Elem y = 0; y < b.order(); ++y)
      if (b.element_order(y) == a.element_order(gens[i])) candidates[i].push_back(y);
  std::vector<Elem> images(gens.size());
  std::function<bool(std::size_t)> search = [&](std::size_t i) {
    if (i == gens.size()) return extends_to_isomorphism(a, b, gens, images);
    for (auto y : candidates[i]) {
      images[i] = y;
      if (search(i + 1)) return true;
    }
    return false;
  };
  return search(0) ? IsoVerdict::Isomorphic : IsoVerdict::NotIsomorphic;
}

std::string to_string(IsoVerdict v) {
  switch (v) {
    case IsoVerdict::Isomorphic: return "isomorphic";
    case IsoVerdict::NotIsomorphic: return "not-isomorphic";
    case IsoVerdict::FingerprintEqual: return "fingerprint-equal";
  }
  return "?";
}

}  // namespace towerforge
