#include "towerforge/localring.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <functional>
#include <limits>
#include <stdexcept>

#include "towerforge/errors.hpp"

namespace towerforge {

namespace {

constexpr Elem kNone = std::numeric_limits<Elem>::max();

std::uint64_t ipow(std::uint64_t b, unsigned k) {
  std::uint64_t r = 1;
  while (k--) r *= b;
  return r;
}

std::size_t log_p(std::uint64_t n, Scalar p) {
  std::size_t k = 0;
  while (n > 1) {
    n /= p;
    ++k;
  }
  return k;
}

/// Subgroup with the given sorted element list; generators chosen greedily.
Ideal subgroup_from_members(const FiniteLocalRing& s, std::vector<char> member) {
  Ideal out;
  out.member = std::move(member);
  for (Elem x = 0; x < s.size(); ++x)
    if (out.member[x]) out.elements.push_back(x);
  // Greedy additive generators.
  Ideal span = s.additive_span({});
  for (Elem x : out.elements)
    if (!span.contains(x)) {
      auto gens = span.generators;
      gens.push_back(x);
      span = s.additive_span(gens);
    }
  out.generators = span.generators;
  return out;
}

/// Basis of G/H for additive subgroups H ⊆ G of a ring, with coordinates.
struct AbelianBasis {
  std::vector<Elem> gens;
  std::vector<unsigned> exps;
  std::vector<Elem> coordinate;  // element of G ↦ index in ⊕ Z/p^{exps}, kNone outside G
};

AbelianBasis abelian_quotient_basis(const FiniteLocalRing& s, const std::vector<char>& g_member, const Ideal& h) {
  const Scalar p = s.p();
  AbelianBasis out;
  std::vector<char> in_k(s.size(), 0);
  std::vector<Vec> coef(s.size());
  std::size_t k_size = 0, g_size = 0;
  for (Elem x = 0; x < s.size(); ++x) {
    if (g_member[x]) ++g_size;
    if (h.contains(x)) {
      if (!g_member[x]) throw std::logic_error("subgroup H is not contained in G");
      in_k[x] = 1;
      ++k_size;
    }
  }
  while (k_size < g_size) {
    // Element of largest order modulo K, least index among ties.
    unsigned best_k = 0;
    Elem best = kNone;
    for (Elem y = 0; y < s.size(); ++y) {
      if (!g_member[y] || in_k[y]) continue;
      unsigned k = 0;
      Elem z = y;
      while (!in_k[z]) {
        z = s.scale(z, p);
        ++k;
      }
      if (k > best_k) {
        best_k = k;
        best = y;
      }
    }
    const std::uint64_t q = ipow(p, best_k);
    Elem z = s.scale(best, q);
    Elem y = best;
    const Vec& m = coef[z];
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (m[j] % q != 0) throw std::logic_error("abelian basis correction is not divisible");
      y = s.sub(y, s.scale(out.gens[j], m[j] / q));
    }
    // K ← K + ⟨y⟩.
    std::vector<Elem> current;
    for (Elem x = 0; x < s.size(); ++x)
      if (in_k[x]) current.push_back(x);
    for (Elem x : current) coef[x].push_back(0);
    Elem multiple = 0;
    for (std::uint64_t c = 1; c < q; ++c) {
      multiple = s.add(multiple, y);
      for (Elem x : current) {
        Elem w = s.add(x, multiple);
        if (in_k[w]) throw std::logic_error("abelian basis generator has the wrong order");
        in_k[w] = 1;
        coef[w] = coef[x];
        coef[w].back() = static_cast<Scalar>(c);
        ++k_size;
      }
    }
    out.gens.push_back(y);
    out.exps.push_back(best_k);
  }
  out.coordinate.assign(s.size(), kNone);
  for (Elem x = 0; x < s.size(); ++x) {
    if (!g_member[x]) continue;
    std::uint64_t idx = 0, stride = 1;
    const Vec& c = coef[x];
    for (std::size_t j = 0; j < out.gens.size(); ++j) {
      idx += (j < c.size() ? c[j] : 0) * stride;
      stride *= ipow(p, out.exps[j]);
    }
    out.coordinate[x] = static_cast<Elem>(idx);
  }
  return out;
}

std::string describe(const FiniteLocalRing& s, Elem x) {
  const Vec c = s.decode(x);
  std::string out;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c[k] == 0) continue;
    if (!out.empty()) out += "+";
    if (c[k] != 1) out += std::to_string(c[k]) + "*";
    out += s.names()[k];
  }
  return out.empty() ? "0" : out;
}

/// Ring on the quotient basis: products of the chosen generators read off in coordinates.
FiniteLocalRing ring_on_basis(const FiniteLocalRing& s, const AbelianBasis& b, unsigned e,
                              const std::vector<Elem>& ideal_elems) {
  const std::size_t r = b.gens.size();
  std::vector<unsigned> exps = b.exps;
  auto coords = [&](Elem idx) {
    Vec v(r);
    for (std::size_t j = 0; j < r; ++j) {
      const std::uint64_t q = ipow(s.p(), exps[j]);
      v[j] = static_cast<Scalar>(idx % q);
      idx = static_cast<Elem>(idx / q);
    }
    return v;
  };
  auto image = [&](Elem x) {
    if (b.coordinate[x] == kNone) throw PreconditionError("subset is not closed under multiplication");
    return coords(b.coordinate[x]);
  };
  std::vector<std::vector<Vec>> structure(r, std::vector<Vec>(r));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) structure[i][j] = image(s.mul(b.gens[i], b.gens[j]));
  std::vector<Vec> ideal_gens;
  for (Elem x : ideal_elems) ideal_gens.push_back(image(x));
  std::vector<std::string> names;
  for (Elem g : b.gens) names.push_back(describe(s, g));
  return FiniteLocalRing(s.p(), e, exps, structure, image(s.one()), ideal_gens, names);
}

RingHom invert(const RingHom& h) {
  RingHom inv{h.to, h.from, std::vector<Elem>(h.to->size(), kNone)};
  for (Elem x = 0; x < h.from->size(); ++x) {
    if (inv.table[h.table[x]] != kNone) throw std::logic_error("homomorphism is not injective");
    inv.table[h.table[x]] = x;
  }
  for (Elem y : inv.table)
    if (y == kNone) throw std::logic_error("homomorphism is not surjective");
  return inv;
}

bool is_bijective(const RingHom& h) {
  if (h.from->size() != h.to->size()) return false;
  std::vector<char> hit(h.to->size(), 0);
  for (Elem y : h.table) {
    if (hit[y]) return false;
    hit[y] = 1;
  }
  return true;
}

/// Map Q = S/K → T induced by f : S → T with K ⊆ ker f.
RingHom induced(const Quotient& q, const RingHom& f) {
  RingHom out{q.ring, f.to, std::vector<Elem>(q.ring->size(), kNone)};
  for (Elem x = 0; x < f.from->size(); ++x) {
    Elem& slot = out.table[q.projection(x)];
    if (slot != kNone && slot != f(x)) throw std::logic_error("map does not factor through the quotient");
    slot = f(x);
  }
  return out;
}

/// S/m_S J when m_S J ≠ 0; otherwise the projection itself.
RingHom reduce_by_mj(const RingHom& proj, bool& reduced) {
  const auto& s = *proj.from;
  const Ideal mj = s.product(s.maximal_ideal(), kernel(proj));
  reduced = !mj.is_zero();
  if (!reduced) return proj;
  return induced(quotient(proj.from, mj), proj);
}

}  // namespace

FiniteLocalRing::FiniteLocalRing(Scalar p, unsigned e, std::vector<unsigned> orders,
                                 std::vector<std::vector<Vec>> structure, Vec unit, std::vector<Vec> ideal_gens,
                                 std::vector<std::string> names)
    : p_(p), e_(e), orders_(std::move(orders)), structure_(std::move(structure)), names_(std::move(names)) {
  if (!is_prime(p)) throw PreconditionError("ring needs a prime p");
  if (e == 0 || ipow(p, e) >= (1u << 16)) throw PreconditionError("truncation exponent out of range");
  const std::size_t r = orders_.size();
  if (r == 0) throw PreconditionError("ring needs rank >= 1");
  if (names_.empty())
    for (std::size_t k = 0; k < r; ++k) names_.push_back("b" + std::to_string(k));
  if (names_.size() != r) throw PreconditionError("one name per basis element expected");
  std::uint64_t size = 1;
  for (unsigned o : orders_) {
    if (o == 0 || o > e) throw PreconditionError("basis orders must lie in 1..e");
    moduli_.push_back(static_cast<Scalar>(ipow(p, o)));
    strides_.push_back(size);
    size *= ipow(p, o);
    if (size > kRingElementGuard) throw GuardExceeded("ring has more than 2^20 elements");
  }
  size_ = size;
  if (structure_.size() != r) throw PreconditionError("structure constants must be rank x rank x rank");
  for (auto& row : structure_) {
    if (row.size() != r) throw PreconditionError("structure constants must be rank x rank x rank");
    for (auto& v : row) {
      if (v.size() != r) throw PreconditionError("structure constants must be rank x rank x rank");
      for (std::size_t k = 0; k < r; ++k) v[k] %= moduli_[k];
    }
  }
  if (unit.size() != r) throw PreconditionError("unit has the wrong length");
  one_ = encode(unit);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      if (structure_[i][j] != structure_[j][i]) throw PreconditionError("ring is not commutative");
      if (scale(encode(structure_[i][j]), moduli_[i]) != 0)
        throw PreconditionError("structure constants are incompatible with the additive orders");
    }
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t l = 0; l < r; ++l)
        if (mul(mul(basis(i), basis(j)), basis(l)) != mul(basis(i), mul(basis(j), basis(l))))
          throw PreconditionError("ring is not associative");
  for (std::size_t k = 0; k < r; ++k)
    if (mul(one_, basis(k)) != basis(k)) throw PreconditionError("unit does not act as identity");
  if (additive_exponent(one_) != e) throw PreconditionError("1 must have additive order p^e");

  std::vector<Elem> gens;
  for (const auto& v : ideal_gens) {
    if (v.size() != r) throw PreconditionError("ideal generator has the wrong length");
    gens.push_back(encode(v));
  }
  i_s_ = ideal(gens);
  if (i_s_.size() * ipow(p, e) != size_) throw PreconditionError("S/I_S is not of order p^e");
  for (Elem x = one_; x != 0; x = scale(x, p))
    if (i_s_.contains(x)) throw PreconditionError("S/I_S is not generated by 1");
  Ideal power = i_s_;
  for (std::size_t k = 0; !power.is_zero(); ++k) {
    if (k > 64) throw PreconditionError("augmentation ideal is not nilpotent");
    Ideal next = product(power, i_s_);
    if (next.size() == power.size()) throw PreconditionError("augmentation ideal is not nilpotent");
    power = std::move(next);
  }
  for (std::size_t k = 0; k < r; ++k) {
    Scalar c = 0;
    Elem x = basis(k);
    while (!i_s_.contains(x)) {
      x = sub(x, one_);
      ++c;
    }
    basis_augmentation_.push_back(c);
  }
  if (size_ <= 512) {
    std::vector<Elem> t(size_ * size_);
    for (Elem a = 0; a < size_; ++a)
      for (Elem b = a; b < size_; ++b) t[a * size_ + b] = t[b * size_ + a] = mul(a, b);
    mul_table_ = std::move(t);
  }
}

RingPtr make_ring(FiniteLocalRing r) { return std::make_shared<const FiniteLocalRing>(std::move(r)); }

Elem FiniteLocalRing::encode(std::span<const Scalar> coords) const {
  std::uint64_t idx = 0;
  for (std::size_t k = 0; k < orders_.size(); ++k) idx += (coords[k] % moduli_[k]) * strides_[k];
  return static_cast<Elem>(idx);
}

Vec FiniteLocalRing::decode(Elem x) const {
  Vec v(orders_.size());
  for (std::size_t k = 0; k < orders_.size(); ++k) {
    v[k] = x % moduli_[k];
    x /= moduli_[k];
  }
  return v;
}

Elem FiniteLocalRing::basis(std::size_t k) const { return static_cast<Elem>(strides_[k]); }

Elem FiniteLocalRing::add(Elem a, Elem b) const {
  std::uint64_t idx = 0;
  for (std::size_t k = 0; k < orders_.size(); ++k) {
    const Scalar q = moduli_[k];
    idx += ((a % q + b % q) % q) * strides_[k];
    a /= q;
    b /= q;
  }
  return static_cast<Elem>(idx);
}

Elem FiniteLocalRing::neg(Elem a) const {
  std::uint64_t idx = 0;
  for (std::size_t k = 0; k < orders_.size(); ++k) {
    const Scalar q = moduli_[k];
    idx += ((q - a % q) % q) * strides_[k];
    a /= q;
  }
  return static_cast<Elem>(idx);
}

Elem FiniteLocalRing::sub(Elem a, Elem b) const { return add(a, neg(b)); }

Elem FiniteLocalRing::scale(Elem a, std::uint64_t k) const {
  std::uint64_t idx = 0;
  for (std::size_t j = 0; j < orders_.size(); ++j) {
    const Scalar q = moduli_[j];
    idx += ((a % q) * (k % q) % q) * strides_[j];
    a /= q;
  }
  return static_cast<Elem>(idx);
}

Elem FiniteLocalRing::from_integer(std::int64_t k) const {
  const std::int64_t q = static_cast<std::int64_t>(ipow(p_, e_));
  return scale(one_, static_cast<std::uint64_t>(((k % q) + q) % q));
}

Elem FiniteLocalRing::mul(Elem a, Elem b) const {
  if (!mul_table_.empty()) return mul_table_[a * size_ + b];
  const Vec x = decode(a), y = decode(b);
  const std::size_t r = orders_.size();
  std::vector<std::uint64_t> acc(r, 0);
  for (std::size_t i = 0; i < r; ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = 0; j < r; ++j) {
      if (y[j] == 0) continue;
      const std::uint64_t c = std::uint64_t{x[i]} * y[j];
      const Vec& s = structure_[i][j];
      for (std::size_t k = 0; k < r; ++k)
        if (s[k]) acc[k] = (acc[k] + (c % moduli_[k]) * s[k]) % moduli_[k];
    }
  }
  std::uint64_t idx = 0;
  for (std::size_t k = 0; k < r; ++k) idx += acc[k] * strides_[k];
  return static_cast<Elem>(idx);
}

unsigned FiniteLocalRing::additive_exponent(Elem x) const {
  unsigned k = 0;
  while (x != 0) {
    x = scale(x, p_);
    ++k;
  }
  return k;
}

Scalar FiniteLocalRing::augmentation(Elem x) const {
  const Vec c = decode(x);
  const std::uint64_t q = ipow(p_, e_);
  std::uint64_t s = 0;
  for (std::size_t k = 0; k < c.size(); ++k) s = (s + std::uint64_t{c[k]} * basis_augmentation_[k]) % q;
  return static_cast<Scalar>(s);
}

Ideal FiniteLocalRing::additive_span(const std::vector<Elem>& gens) const {
  Ideal out;
  out.member.assign(size_, 0);
  out.member[0] = 1;
  std::vector<Elem> elems{0};
  for (Elem g : gens) {
    if (out.member[g]) continue;
    out.generators.push_back(g);
    const std::size_t base = elems.size();
    Elem multiple = 0;
    while (true) {
      multiple = add(multiple, g);
      if (multiple == 0) break;
      for (std::size_t i = 0; i < base; ++i) {
        Elem w = add(elems[i], multiple);
        if (!out.member[w]) {
          out.member[w] = 1;
          elems.push_back(w);
        }
      }
    }
  }
  std::sort(elems.begin(), elems.end());
  out.elements = std::move(elems);
  return out;
}

Ideal FiniteLocalRing::ideal(const std::vector<Elem>& gens) const {
  std::vector<Elem> all;
  for (Elem g : gens) {
    all.push_back(g);
    for (std::size_t k = 0; k < rank(); ++k) all.push_back(mul(g, basis(k)));
  }
  return additive_span(all);
}

Ideal FiniteLocalRing::maximal_ideal() const {
  auto gens = i_s_.generators;
  gens.push_back(from_integer(p_));
  return ideal(gens);
}

Ideal FiniteLocalRing::product(const Ideal& a, const Ideal& b) const {
  std::vector<Elem> gens;
  for (Elem x : a.generators)
    for (Elem y : b.generators) gens.push_back(mul(x, y));
  return ideal(gens);
}

Ideal FiniteLocalRing::sum(const Ideal& a, const Ideal& b) const {
  auto gens = a.generators;
  gens.insert(gens.end(), b.generators.begin(), b.generators.end());
  return additive_span(gens);
}

Ideal FiniteLocalRing::multiple(const Ideal& a, std::uint64_t k) const {
  std::vector<Elem> gens;
  for (Elem x : a.generators) gens.push_back(scale(x, k));
  return additive_span(gens);
}

bool FiniteLocalRing::is_ideal(const Ideal& a) const {
  for (Elem g : a.generators)
    for (std::size_t k = 0; k < rank(); ++k)
      if (!a.contains(mul(g, basis(k)))) return false;
  for (Elem x : a.elements)
    for (Elem y : a.generators)
      if (!a.contains(add(x, y))) return false;
  return true;
}

FiniteLocalRing FiniteLocalRing::truncated_integers(Scalar p, unsigned e) {
  return FiniteLocalRing(p, e, {e}, {{{1}}}, {1}, {}, {"1"});
}

FiniteLocalRing FiniteLocalRing::monomial(Scalar p, const std::vector<std::vector<unsigned>>& standard) {
  if (standard.empty()) throw PreconditionError("monomial ring needs at least the monomial 1");
  const std::size_t vars = standard[0].size();
  std::map<std::vector<unsigned>, std::size_t> index;
  for (std::size_t k = 0; k < standard.size(); ++k) {
    if (standard[k].size() != vars) throw PreconditionError("monomials must have the same number of variables");
    index[standard[k]] = k;
  }
  for (const auto& m : standard)
    for (std::size_t v = 0; v < vars; ++v)
      if (m[v] > 0) {
        auto d = m;
        --d[v];
        if (!index.count(d)) throw PreconditionError("standard monomials must be closed under division");
      }
  const std::vector<unsigned> zero(vars, 0);
  if (!index.count(zero)) throw PreconditionError("standard monomials must contain 1");
  const std::size_t r = standard.size();
  std::vector<std::vector<Vec>> structure(r, std::vector<Vec>(r, Vec(r, 0)));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      auto m = standard[i];
      for (std::size_t v = 0; v < vars; ++v) m[v] += standard[j][v];
      auto it = index.find(m);
      if (it != index.end()) structure[i][j][it->second] = 1;
    }
  Vec unit(r, 0);
  unit[index[zero]] = 1;
  std::vector<Vec> gens;
  std::vector<std::string> names;
  static const char* letters[] = {"x", "y", "z", "w"};
  for (std::size_t k = 0; k < r; ++k) {
    std::string name;
    for (std::size_t v = 0; v < vars; ++v) {
      if (standard[k][v] == 0) continue;
      if (!name.empty()) name += "*";
      name += vars == 1 ? "y" : (v < 4 ? letters[v] : "t" + std::to_string(v));
      if (standard[k][v] > 1) name += "^" + std::to_string(standard[k][v]);
    }
    if (name.empty()) {
      name = "1";
    } else {
      Vec g(r, 0);
      g[k] = 1;
      gens.push_back(g);
    }
    names.push_back(name);
  }
  return FiniteLocalRing(p, 1, std::vector<unsigned>(r, 1), structure, unit, gens, names);
}

FiniteLocalRing FiniteLocalRing::truncated_polynomial(Scalar p, unsigned n) {
  std::vector<std::vector<unsigned>> standard;
  for (unsigned k = 0; k < n; ++k) standard.push_back({k});
  return monomial(p, standard);
}

bool is_ring_hom(const RingHom& h) {
  const auto& a = *h.from;
  const auto& b = *h.to;
  if (h.table.size() != a.size()) return false;
  for (Elem y : h.table)
    if (y >= b.size()) return false;
  if (h(a.one()) != b.one() || h(0) != 0) return false;
  for (Elem x = 0; x < a.size(); ++x) {
    const Vec c = a.decode(x);
    Elem s = 0;
    for (std::size_t k = 0; k < c.size(); ++k) s = b.add(s, b.scale(h(a.basis(k)), c[k]));
    if (s != h(x)) return false;
  }
  for (std::size_t i = 0; i < a.rank(); ++i)
    for (std::size_t j = 0; j < a.rank(); ++j)
      if (h(a.mul(a.basis(i), a.basis(j))) != b.mul(h(a.basis(i)), h(a.basis(j)))) return false;
  return true;
}

RingHom compose(const RingHom& second, const RingHom& first) {
  if (first.to.get() != second.from.get() && !(first.to->size() == second.from->size()))
    throw PreconditionError("homomorphisms are not composable");
  RingHom out{first.from, second.to, std::vector<Elem>(first.table.size())};
  for (std::size_t x = 0; x < first.table.size(); ++x) out.table[x] = second(first(static_cast<Elem>(x)));
  return out;
}

RingHom identity_hom(const RingPtr& r) {
  RingHom h{r, r, std::vector<Elem>(r->size())};
  for (Elem x = 0; x < r->size(); ++x) h.table[x] = x;
  return h;
}

RingHom hom_from_basis_images(const RingPtr& from, const RingPtr& to, const std::vector<Elem>& images) {
  if (images.size() != from->rank()) throw PreconditionError("one image per basis element expected");
  for (std::size_t k = 0; k < images.size(); ++k)
    if (to->additive_exponent(images[k]) > from->orders()[k])
      throw PreconditionError("image order does not divide the basis order");
  RingHom h{from, to, std::vector<Elem>(from->size())};
  for (Elem x = 0; x < from->size(); ++x) {
    const Vec c = from->decode(x);
    Elem s = 0;
    for (std::size_t k = 0; k < c.size(); ++k) s = to->add(s, to->scale(images[k], c[k]));
    h.table[x] = s;
  }
  return h;
}

Ideal kernel(const RingHom& h) {
  std::vector<char> member(h.from->size(), 0);
  for (Elem x = 0; x < h.from->size(); ++x) member[x] = h(x) == 0;
  return subgroup_from_members(*h.from, std::move(member));
}

Quotient quotient(const RingPtr& s, const Ideal& j) {
  if (j.contains(s->one())) throw PreconditionError("cannot take the quotient by the whole ring");
  if (!s->is_ideal(j)) throw PreconditionError("quotient needs an ideal");
  if (j.is_zero()) return {s, identity_hom(s)};
  std::vector<char> all(s->size(), 1);
  const AbelianBasis b = abelian_quotient_basis(*s, all, j);
  unsigned e = 0;
  for (Elem x = s->one(); !j.contains(x); x = s->scale(x, s->p())) ++e;
  std::vector<Elem> ideal_elems = s->augmentation_ideal().generators;
  RingPtr r;
  try {
    r = make_ring(ring_on_basis(*s, b, e, ideal_elems));
  } catch (const PreconditionError& err) {
    throw PreconditionError(std::string("quotient is not a split local ring: ") + err.what());
  }
  RingHom proj{s, r, b.coordinate};
  return {r, proj};
}

SubringEmbedding subring(const RingPtr& s, const std::vector<Elem>& elements) {
  std::vector<char> member(s->size(), 0);
  for (Elem x : elements) member[x] = 1;
  if (!member[s->one()]) throw PreconditionError("subring must contain 1");
  for (Elem x : elements)
    for (Elem y : elements)
      if (!member[s->add(x, y)] || !member[s->mul(x, y)]) throw PreconditionError("subset is not a subring");
  const AbelianBasis b = abelian_quotient_basis(*s, member, s->zero_ideal());
  std::vector<Elem> ideal_elems;
  for (Elem x : elements)
    if (s->augmentation_ideal().contains(x)) ideal_elems.push_back(x);
  // A few additive generators suffice.
  ideal_elems = s->additive_span(ideal_elems).generators;
  RingPtr r = make_ring(ring_on_basis(*s, b, s->e(), ideal_elems));
  RingHom inc{r, s, std::vector<Elem>(r->size(), kNone)};
  for (Elem x : elements) inc.table[b.coordinate[x]] = x;
  return {r, inc};
}

std::vector<Elem> generated_subring(const FiniteLocalRing& s, const std::vector<Elem>& gens) {
  auto g = gens;
  g.push_back(s.one());
  Ideal span = s.additive_span(g);
  while (true) {
    std::vector<Elem> extra;
    for (Elem x : span.generators)
      for (Elem y : span.generators) {
        Elem z = s.mul(x, y);
        if (!span.contains(z)) extra.push_back(z);
      }
    if (extra.empty()) break;
    auto all = span.generators;
    all.insert(all.end(), extra.begin(), extra.end());
    span = s.additive_span(all);
  }
  return span.elements;
}

RingPtr square_zero_extension(const RingPtr& r, std::size_t n) {
  const std::size_t k = r->rank(), t = k + n;
  std::vector<unsigned> orders = r->orders();
  orders.insert(orders.end(), n, 1u);
  std::vector<std::vector<Vec>> structure(t, std::vector<Vec>(t, Vec(t, 0)));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t l = 0; l < k; ++l) structure[i][j][l] = r->structure()[i][j][l];
  for (std::size_t i = 0; i < k; ++i) {
    const Scalar eps = r->augmentation(r->basis(i)) % r->p();
    for (std::size_t a = 0; a < n; ++a) structure[i][k + a][k + a] = structure[k + a][i][k + a] = eps;
  }
  Vec unit = r->decode(r->one());
  unit.resize(t, 0);
  std::vector<Vec> gens;
  for (Elem g : r->augmentation_ideal().generators) {
    Vec v = r->decode(g);
    v.resize(t, 0);
    gens.push_back(v);
  }
  auto names = r->names();
  for (std::size_t a = 0; a < n; ++a) {
    Vec v(t, 0);
    v[k + a] = 1;
    gens.push_back(v);
    names.push_back("x" + std::to_string(a + 1));
  }
  return make_ring(FiniteLocalRing(r->p(), r->e(), orders, structure, unit, gens, names));
}

Ideal frattini_ideal(const FiniteLocalRing& s) {
  const Ideal& i = s.augmentation_ideal();
  return s.sum(s.product(i, i), s.multiple(i, s.p()));
}

Ideal cotangent_relations(const FiniteLocalRing& s) {
  const Ideal m = s.maximal_ideal();
  return s.sum(s.product(m, m), s.ideal({s.from_integer(s.p())}));
}

std::size_t cotangent_dim(const FiniteLocalRing& s) {
  return log_p(s.maximal_ideal().size() / cotangent_relations(s).size(), s.p());
}

CotangentCheck cotangent_image_kernel(const RingHom& projection, Elem x) {
  if (projection(x) != 0) throw PreconditionError("element is not in the kernel J");
  CotangentCheck c;
  c.zero_in_source = cotangent_relations(*projection.from).contains(x);
  c.zero_in_target = cotangent_relations(*projection.to).contains(projection(x));
  return c;
}

SubringLift subring_lift(const RingHom& projection) {
  const auto& s = *projection.from;
  const auto& r = *projection.to;
  const Ideal j = kernel(projection);
  if (j.size() != s.p()) throw PreconditionError("dim_{F_p} J must be 1 (|J| = " + std::to_string(j.size()) + ")");
  const Elem x = j.elements[1];
  if (cotangent_image_kernel(projection, x).zero_in_source)
    throw PreconditionError("the nonzero element of J lies in (m_S^2, p): cotangent hypothesis fails");

  // Cotangent generators of R, chosen greedily among the generators of I_R.
  Ideal rel = cotangent_relations(r);
  std::vector<Elem> chosen;
  for (Elem g : r.augmentation_ideal().elements) {
    if (rel.contains(g)) continue;
    chosen.push_back(g);
    auto gens = rel.generators;
    gens.push_back(g);
    rel = r.additive_span(gens);
  }
  std::vector<Elem> least(r.size(), kNone);
  for (Elem y = 0; y < s.size(); ++y)
    if (least[projection(y)] == kNone) least[projection(y)] = y;
  SubringLift out;
  out.witness = x;
  for (Elem g : chosen) out.lifts.push_back(least[g]);
  out.elements = generated_subring(s, out.lifts);
  if (std::binary_search(out.elements.begin(), out.elements.end(), x))
    throw PreconditionError("the witness lies in the generated subring");
  RingHom sec{projection.to, projection.from, std::vector<Elem>(r.size(), kNone)};
  for (Elem y : out.elements) {
    Elem& slot = sec.table[projection(y)];
    if (slot != kNone) throw PreconditionError("projection is not injective on the generated subring");
    slot = y;
  }
  for (Elem y : sec.table)
    if (y == kNone) throw PreconditionError("projection is not surjective on the generated subring");
  out.section = std::move(sec);
  return out;
}

std::size_t ring_length(const FiniteLocalRing& s) {
  const Ideal m = s.maximal_ideal();
  Ideal layer = s.augmentation_ideal();
  std::size_t len = 0;
  while (!layer.is_zero()) {
    Ideal next = s.product(m, layer);
    if (next.size() == layer.size()) throw std::logic_error("augmentation ideal is not nilpotent");
    len += log_p(layer.size() / next.size(), s.p());
    layer = std::move(next);
  }
  return len;
}

std::size_t fp_dimension(const FiniteLocalRing& s, const Ideal& j) {
  if (!s.product(s.maximal_ideal(), j).is_zero()) throw PreconditionError("ideal is not killed by m_S");
  return log_p(j.size(), s.p());
}

std::string to_string(Branch b) {
  return b == Branch::FrattiniContainment ? "frattini" : "square-zero";
}

bool frattini_branch_holds(const RingHom& projection) {
  bool reduced = false;
  const RingHom proj = reduce_by_mj(projection, reduced);
  const Ideal j = kernel(proj);
  const Ideal f = frattini_ideal(*proj.from);
  return std::all_of(j.elements.begin(), j.elements.end(), [&](Elem x) { return f.contains(x); });
}

bool square_zero_branch_holds(const RingHom& projection) {
  bool reduced = false;
  const RingHom proj = reduce_by_mj(projection, reduced);
  const Ideal j = kernel(proj);
  if (j.size() != proj.from->p()) return false;
  if (cotangent_image_kernel(proj, j.elements[1]).zero_in_source) return false;
  try {
    const SubringLift lift = subring_lift(proj);
    auto model = square_zero_extension(proj.to, 1);
    std::vector<Elem> images;
    for (std::size_t k = 0; k < proj.to->rank(); ++k) images.push_back(lift.section(proj.to->basis(k)));
    images.push_back(lift.witness);
    const RingHom iso = hom_from_basis_images(model, proj.from, images);
    return is_ring_hom(iso) && is_bijective(iso) && is_ring_hom(compose(proj, lift.section)) &&
           compose(proj, lift.section).table == identity_hom(proj.to).table;
  } catch (const PreconditionError&) {
    return false;
  }
}

DichotomyResult dichotomy(const RingHom& projection) {
  if (kernel(projection).is_zero()) throw PreconditionError("J = 0: nothing to decide");
  DichotomyResult out;
  out.projection = reduce_by_mj(projection, out.reduced);
  const auto& s = *out.projection.from;
  const Ideal j = kernel(out.projection);
  if (j.size() != s.p())
    throw PreconditionError("dim_{F_p} J must be 1, got " + std::to_string(log_p(j.size(), s.p())));
  const Ideal& i = s.augmentation_ideal();
  const Ideal sq = s.product(i, i);
  const Ideal f = frattini_ideal(s);
  if (std::all_of(j.elements.begin(), j.elements.end(), [&](Elem x) { return f.contains(x); })) {
    out.branch = Branch::FrattiniContainment;
    for (Elem x : j.elements) {
      if (x == 0) continue;
      bool found = false;
      for (Elem base : i.elements) {
        const Elem rest = s.sub(x, s.scale(base, s.p()));
        if (sq.contains(rest)) {
          out.certificates.push_back({x, rest, base});
          found = true;
          break;
        }
      }
      if (!found) throw std::logic_error("membership certificate not found");
    }
    return out;
  }
  out.branch = Branch::SquareZeroExtension;
  out.lift = subring_lift(out.projection);
  out.model = square_zero_extension(out.projection.to, 1);
  std::vector<Elem> images;
  for (std::size_t k = 0; k < out.projection.to->rank(); ++k)
    images.push_back(out.lift->section(out.projection.to->basis(k)));
  images.push_back(out.lift->witness);
  RingHom iso = hom_from_basis_images(out.model, out.projection.from, images);
  if (!is_ring_hom(iso) || !is_bijective(iso)) throw std::logic_error("square-zero model map is not an isomorphism");
  out.iso = std::move(iso);
  return out;
}

TowerResult square_zero_tower(const RingHom& projection) {
  const auto& s = *projection.from;
  const Ideal j = kernel(projection);
  const std::size_t n = fp_dimension(s, j);
  TowerResult out;
  if (n == 0) {
    out.section = invert(projection);
    out.model = projection.to;
    out.iso = out.section;
    out.trace.push_back("J = 0: S = R");
    return out;
  }
  const Elem x1 = j.elements[1];
  const Quotient q = quotient(projection.from, s.ideal({x1}));
  out.trace.push_back("layer 1: |S| = " + std::to_string(s.size()) + ", dim J = " + std::to_string(n) +
                      ", peel x1 = " + describe(s, x1));
  DichotomyResult d = dichotomy(q.projection);
  if (d.branch == Branch::FrattiniContainment) {
    out.no_lift = true;
    out.failing_layer = 1;
    out.trace.push_back("layer 1: J_1 inside (I_S^2, p I_S): no lift");
    out.failure = std::move(d);
    return out;
  }
  const RingHom sigma1 = d.lift->section;  // S_1 → S
  const RingHom rho1 = induced(q, projection);
  TowerResult rest = square_zero_tower(rho1);
  for (auto& t : rest.trace) {
    // Renumber layers of the recursive call.
    if (t.rfind("layer ", 0) == 0) {
      std::size_t pos = 6, num = 0;
      while (pos < t.size() && std::isdigit(static_cast<unsigned char>(t[pos]))) num = num * 10 + (t[pos++] - '0');
      t = "layer " + std::to_string(num + 1) + t.substr(pos);
    }
    out.trace.push_back(t);
  }
  if (rest.no_lift) {
    out.no_lift = true;
    out.failing_layer = rest.failing_layer + 1;
    out.failure = std::move(rest.failure);
    return out;
  }
  out.section = compose(sigma1, *rest.section);
  out.witnesses.push_back(x1);
  for (Elem w : rest.witnesses) out.witnesses.push_back(sigma1(w));
  out.model = square_zero_extension(projection.to, n);
  std::vector<Elem> images;
  for (std::size_t k = 0; k < projection.to->rank(); ++k) images.push_back((*out.section)(projection.to->basis(k)));
  for (Elem w : out.witnesses) images.push_back(w);
  RingHom iso = hom_from_basis_images(out.model, projection.from, images);
  if (!is_ring_hom(iso) || !is_bijective(iso)) throw std::logic_error("tower model map is not an isomorphism");
  out.iso = std::move(iso);
  return out;
}

std::vector<std::vector<std::vector<unsigned>>> monomial_staircases(std::size_t vars, std::size_t max_dim) {
  using Mono = std::vector<unsigned>;
  std::vector<std::vector<Mono>> out;
  std::set<std::vector<Mono>> seen;
  std::vector<std::vector<Mono>> frontier{{Mono(vars, 0)}};
  while (!frontier.empty()) {
    for (const auto& f : frontier) out.push_back(f);
    std::vector<std::vector<Mono>> next;
    for (const auto& f : frontier) {
      if (f.size() >= max_dim) continue;
      // Add any monomial whose divisors are all present.
      std::set<Mono> have(f.begin(), f.end());
      for (const auto& m : f)
        for (std::size_t v = 0; v < vars; ++v) {
          Mono c = m;
          ++c[v];
          if (have.count(c)) continue;
          bool ok = true;
          for (std::size_t w = 0; w < vars && ok; ++w)
            if (c[w] > 0) {
              Mono d = c;
              --d[w];
              ok = have.count(d) > 0;
            }
          if (!ok) continue;
          auto g = f;
          g.push_back(c);
          std::sort(g.begin(), g.end());
          if (seen.insert(g).second) next.push_back(g);
        }
    }
    std::sort(next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

std::vector<Ideal> principal_ideals(const FiniteLocalRing& s) {
  std::vector<Ideal> out;
  const Ideal m = s.maximal_ideal();
  for (Elem x : m.elements) {
    if (x == 0) continue;
    Ideal j = s.ideal({x});
    if (std::find(out.begin(), out.end(), j) == out.end()) out.push_back(std::move(j));
  }
  return out;
}

SplitResult split_surjection(const RingHom& projection) {
  const auto& s = *projection.from;
  SplitResult out;
  const Ideal j = kernel(projection);
  if (j.is_zero()) {
    out.split = true;
    out.section = invert(projection);
    out.trace.push_back("J = 0: the projection is an isomorphism");
    return out;
  }
  const Ideal mj = s.product(s.maximal_ideal(), j);
  if (mj.is_zero()) {
    TowerResult t = square_zero_tower(projection);
    for (auto& line : t.trace) out.trace.push_back(line);
    if (t.no_lift) {
      out.failure = std::move(t);
      return out;
    }
    out.split = true;
    out.section = t.section;
    return out;
  }
  out.trace.push_back("l(S) = " + std::to_string(ring_length(s)) + ": pass to S' = S/m_S J (|m_S J| = " +
                      std::to_string(mj.size()) + ")");
  const Quotient q = quotient(projection.from, mj);
  const RingHom proj1 = induced(q, projection);
  TowerResult t = square_zero_tower(proj1);
  for (auto& line : t.trace) out.trace.push_back("  " + line);
  if (t.no_lift) {
    out.failure = std::move(t);
    return out;
  }
  // S'' = π⁻¹(σ'(R)). A section of S' need not extend to S, so the other
  // sections of S' → R are tried in order after the one from the tower.
  auto attempt = [&](const RingHom& sec, SplitResult& inner) -> std::optional<RingHom> {
    std::vector<char> in_image(q.ring->size(), 0);
    for (Elem y : sec.table) in_image[y] = 1;
    std::vector<Elem> elems;
    for (Elem x = 0; x < s.size(); ++x)
      if (in_image[q.projection(x)]) elems.push_back(x);
    const SubringEmbedding sub = subring(projection.from, elems);
    const RingHom proj2 = compose(projection, sub.inclusion);
    out.trace.push_back("recurse on S'' = preimage of R in S (|S''| = " + std::to_string(sub.ring->size()) + ")");
    inner = split_surjection(proj2);
    for (auto& line : inner.trace) out.trace.push_back("  " + line);
    if (!inner.split) return std::nullopt;
    return compose(sub.inclusion, *inner.section);
  };
  SplitResult inner;
  if (auto sec = attempt(*t.section, inner)) {
    out.split = true;
    out.section = std::move(sec);
    return out;
  }
  std::optional<TowerResult> first_failure = std::move(inner.failure);
  const auto& r = *projection.to;
  const Ideal j1 = kernel(proj1);
  std::uint64_t count = 1;
  for (std::size_t k = 0; k < r.rank() && count <= (1u << 16); ++k) count *= j1.size();
  if (count > (1u << 16)) {
    out.trace.push_back("too many sections of S' to try the others");
    out.failure = std::move(first_failure);
    return out;
  }
  std::vector<std::size_t> pos(r.rank(), 0);
  auto advance = [&] {
    for (std::size_t k = r.rank(); k-- > 0;) {
      if (++pos[k] < j1.size()) return true;
      pos[k] = 0;
    }
    return false;
  };
  while (advance()) {
    std::vector<Elem> images;
    for (std::size_t k = 0; k < r.rank(); ++k) images.push_back(q.ring->add((*t.section)(r.basis(k)), j1.elements[pos[k]]));
    RingHom sec;
    try {
      sec = hom_from_basis_images(projection.to, q.ring, images);
    } catch (const PreconditionError&) {
      continue;
    }
    if (!is_ring_hom(sec)) continue;
    out.trace.push_back("the section of S' does not extend; trying another");
    if (auto lifted = attempt(sec, inner)) {
      out.split = true;
      out.section = std::move(lifted);
      return out;
    }
  }
  out.trace.push_back("no section of S' extends to S");
  out.failure = std::move(first_failure);
  return out;
}

}  // namespace towerforge
