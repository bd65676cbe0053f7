#pragma once

// Brute-force reference computations used only by the tests. They work on raw
// vectors and element sets and deliberately avoid the library's echelon forms,
// hom spaces and closures.

#include <algorithm>
#include <array>
#include <stdexcept>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <set>
#include <vector>

#include "towerforge/fp.hpp"
#include "towerforge/groups.hpp"

namespace oracle {

using towerforge::Elem;
using towerforge::FiniteGroup;
using towerforge::Matrix;
using towerforge::Scalar;
using towerforge::Vec;

inline Matrix mat(std::initializer_list<std::initializer_list<long>> rows, Scalar p = 0) {
  std::size_t r = rows.size(), c = rows.begin()->size();
  std::vector<Scalar> data;
  for (const auto& row : rows)
    for (long x : row) data.push_back(p ? static_cast<Scalar>(((x % long(p)) + long(p)) % long(p)) : static_cast<Scalar>(x));
  return Matrix(r, c, std::move(data));
}

inline Vec apply(const Matrix& a, const Vec& v, Scalar p) {
  Vec out(a.rows(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    std::uint64_t s = 0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += std::uint64_t{a(i, j)} * v[j];
    out[i] = static_cast<Scalar>(s % p);
  }
  return out;
}

inline Vec add(const Vec& a, const Vec& b, Scalar p) {
  Vec c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = (a[i] + b[i]) % p;
  return c;
}

/// All vectors of the smallest set containing `seeds` closed under addition
/// and the given matrices (an invariant subspace, as a set).
inline std::set<Vec> closure(const std::vector<Vec>& seeds, const std::vector<Matrix>& mats, Scalar p, std::size_t dim) {
  std::set<Vec> s{Vec(dim, 0)};
  std::vector<Vec> queue;
  auto push = [&](const Vec& v) {
    if (s.count(v)) return;
    // s is additively closed, so adding all multiples of v to s gives the new span.
    std::vector<Vec> current(s.begin(), s.end());
    Vec kv(dim, 0);
    for (Scalar k = 1; k < p; ++k) {
      kv = add(kv, v, p);
      for (const auto& w : current) s.insert(add(w, kv, p));
    }
    queue.push_back(v);
  };
  for (const auto& v : seeds) push(v);
  for (std::size_t head = 0; head < queue.size(); ++head)
    for (const auto& m : mats) push(apply(m, queue[head], p));
  return s;
}

inline void all_vectors(Scalar p, std::size_t dim, const std::function<void(const Vec&)>& visit) {
  Vec v(dim, 0);
  while (true) {
    visit(v);
    std::size_t k = 0;
    while (k < dim && ++v[k] == p) v[k++] = 0;
    if (k == dim) return;
  }
}

inline bool is_zero(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](Scalar x) { return x == 0; });
}

/// True iff no nonzero vector generates a proper invariant subspace.
inline bool irreducible(const std::vector<Matrix>& mats, Scalar p, std::size_t dim) {
  if (dim == 0) return false;
  std::uint64_t full = 1;
  for (std::size_t i = 0; i < dim; ++i) full *= p;
  bool ok = true;
  all_vectors(p, dim, [&](const Vec& v) {
    if (ok && !is_zero(v) && closure({v}, mats, p, dim).size() != full) ok = false;
  });
  return ok;
}

/// log_p of a power of p.
inline std::size_t log_p(std::uint64_t n, Scalar p) {
  std::size_t k = 0;
  while (n > 1) {
    n /= p;
    ++k;
  }
  return k;
}

/// Socle as a set of vectors: the additive closure of all minimal invariant subspaces.
inline std::set<Vec> socle(const std::vector<Matrix>& mats, Scalar p, std::size_t dim) {
  std::map<Vec, std::size_t> size;
  all_vectors(p, dim, [&](const Vec& v) { size[v] = closure({v}, mats, p, dim).size(); });
  std::vector<Vec> minimal_gens;
  for (const auto& [v, n] : size) {
    if (is_zero(v)) continue;
    auto c = closure({v}, mats, p, dim);
    bool minimal = true;
    for (const auto& w : c)
      if (!is_zero(w) && size[w] != c.size()) minimal = false;
    if (minimal) minimal_gens.push_back(v);
  }
  return closure(minimal_gens, mats, p, dim);
}

/// Subgroup generated by a list of elements, by multiplying until stable.
inline std::set<Elem> subgroup(const FiniteGroup& g, const std::vector<Elem>& gens) {
  std::set<Elem> s{g.identity()};
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<Elem> cur(s.begin(), s.end());
    for (auto a : cur)
      for (auto b : gens)
        if (s.insert(g.table()[a * g.order() + b]).second) grew = true;
  }
  return s;
}

inline std::vector<Elem> center(const FiniteGroup& g) {
  std::vector<Elem> z;
  const auto n = g.order();
  for (Elem a = 0; a < n; ++a) {
    bool c = true;
    for (Elem b = 0; b < n && c; ++b) c = g.table()[a * n + b] == g.table()[b * n + a];
    if (c) z.push_back(a);
  }
  return z;
}

/// Minimum size of a generating set, by trying subsets of increasing size.
inline std::size_t min_generators(const FiniteGroup& g) {
  const std::size_t n = g.order();
  if (n == 1) return 0;
  for (std::size_t k = 1;; ++k) {
    std::vector<Elem> pick;
    bool found = false;
    std::function<void(Elem)> rec = [&](Elem start) {
      if (found) return;
      if (pick.size() == k) {
        if (subgroup(g, pick).size() == n) found = true;
        return;
      }
      for (Elem x = start; x < n && !found; ++x) {
        if (x == g.identity()) continue;
        pick.push_back(x);
        rec(x + 1);
        pick.pop_back();
      }
    };
    rec(0);
    if (found) return k;
  }
}

/// Isomorphism by searching images of a generating set, checking every product.
inline bool isomorphic(const FiniteGroup& a, const FiniteGroup& b) {
  if (a.order() != b.order()) return false;
  const std::size_t n = a.order();
  const auto& gens = a.generators();
  std::vector<Elem> img(gens.size());
  std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
    if (i == gens.size()) {
      // Extend along words; reject on conflict, then verify the full table.
      std::vector<long> phi(n, -1);
      phi[a.identity()] = b.identity();
      std::vector<Elem> queue{a.identity()};
      for (std::size_t h = 0; h < queue.size(); ++h)
        for (std::size_t j = 0; j < gens.size(); ++j) {
          Elem y = a.table()[queue[h] * n + gens[j]];
          Elem fy = b.table()[phi[queue[h]] * n + img[j]];
          if (phi[y] < 0) {
            phi[y] = fy;
            queue.push_back(y);
          } else if (phi[y] != long(fy)) {
            return false;
          }
        }
      std::set<long> range(phi.begin(), phi.end());
      if (range.size() != n) return false;
      for (Elem x = 0; x < n; ++x)
        for (Elem y = 0; y < n; ++y)
          if (phi[a.table()[x * n + y]] != long(b.table()[phi[x] * n + phi[y]])) return false;
      return true;
    }
    for (Elem y = 0; y < n; ++y) {
      img[i] = y;
      if (rec(i + 1)) return true;
    }
    return false;
  };
  return rec(0);
}

/// Every subspace of dimension two, each as its set of vectors.
inline std::set<std::set<Vec>> planes(Scalar p, std::size_t dim) {
  std::vector<Vec> vs;
  all_vectors(p, dim, [&](const Vec& v) {
    if (!is_zero(v)) vs.push_back(v);
  });
  std::set<std::set<Vec>> out;
  for (std::size_t a = 0; a < vs.size(); ++a)
    for (std::size_t b = a + 1; b < vs.size(); ++b) {
      auto c = closure({vs[a], vs[b]}, {}, p, dim);
      if (c.size() == std::size_t(p) * p) out.insert(std::move(c));
    }
  return out;
}

inline std::set<Vec> row_span(const Matrix& m, Scalar p) {
  std::vector<Vec> rows;
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(m.row_vec(i));
  return closure(rows, {}, p, m.cols());
}

/// x ∧ y in the basis e_i ∧ e_j, i < j.
inline Vec wedge(const Vec& x, const Vec& y, Scalar p) {
  Vec out;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j)
      out.push_back(static_cast<Scalar>((x[i] * y[j] % p + p - x[j] * y[i] % p) % p));
  return out;
}

/// Λ²(ambient) is spanned by wedges of all pairs of elements of the members.
inline bool wedge_spans(const std::vector<Matrix>& members, Scalar p, std::size_t m) {
  std::vector<Vec> gens;
  for (const auto& d : members) {
    auto elems = row_span(d, p);
    for (const auto& x : elems)
      for (const auto& y : elems) gens.push_back(wedge(x, y, p));
  }
  const std::size_t k = m * (m - 1) / 2;
  std::uint64_t full = 1;
  for (std::size_t i = 0; i < k; ++i) full *= p;
  return closure(gens, {}, p, k).size() == full;
}

/// F_p[x_1..x_v]/M for a monomial ideal M, by its standard monomials.
/// Elements are coefficient vectors; index = Σ c_k p^k.
struct PolyRing {
  Scalar p;
  std::vector<std::vector<unsigned>> monos;

  std::size_t dim() const { return monos.size(); }
  std::size_t size() const {
    std::size_t n = 1;
    for (std::size_t k = 0; k < dim(); ++k) n *= p;
    return n;
  }
  Vec add(const Vec& a, const Vec& b) const {
    Vec c(dim());
    for (std::size_t k = 0; k < dim(); ++k) c[k] = (a[k] + b[k]) % p;
    return c;
  }
  Vec neg(const Vec& a) const {
    Vec c(dim());
    for (std::size_t k = 0; k < dim(); ++k) c[k] = (p - a[k]) % p;
    return c;
  }
  Vec mul(const Vec& a, const Vec& b) const {
    Vec c(dim(), 0);
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = 0; j < dim(); ++j) {
        if (!a[i] || !b[j]) continue;
        std::vector<unsigned> m = monos[i];
        for (std::size_t v = 0; v < m.size(); ++v) m[v] += monos[j][v];
        auto it = std::find(monos.begin(), monos.end(), m);
        if (it != monos.end()) {
          auto k = static_cast<std::size_t>(it - monos.begin());
          c[k] = (c[k] + a[i] * b[j]) % p;
        }
      }
    return c;
  }
  Vec one() const {
    Vec c(dim(), 0);
    for (std::size_t k = 0; k < dim(); ++k)
      if (std::all_of(monos[k].begin(), monos[k].end(), [](unsigned e) { return e == 0; })) c[k] = 1;
    return c;
  }
  Vec element(std::size_t idx) const {
    Vec c(dim());
    for (std::size_t k = 0; k < dim(); ++k) {
      c[k] = static_cast<Scalar>(idx % p);
      idx /= p;
    }
    return c;
  }
  std::size_t index(const Vec& c) const {
    std::size_t idx = 0, stride = 1;
    for (std::size_t k = 0; k < dim(); ++k, stride *= p) idx += c[k] * stride;
    return idx;
  }
  bool in_augmentation(const Vec& c) const { return c[index_of_one()] == 0; }
  std::size_t index_of_one() const {
    const Vec u = one();
    return static_cast<std::size_t>(std::find(u.begin(), u.end(), 1u) - u.begin());
  }
};

/// Units found by searching for an inverse.
inline std::set<std::size_t> units(const PolyRing& r) {
  std::set<std::size_t> out;
  const Vec one = r.one();
  for (std::size_t a = 0; a < r.size(); ++a)
    for (std::size_t b = 0; b < r.size(); ++b)
      if (r.mul(r.element(a), r.element(b)) == one) {
        out.insert(a);
        break;
      }
  return out;
}

/// Ideal generated by `gens`: closed under addition and multiplication by every element.
inline std::set<std::size_t> ideal(const PolyRing& r, const std::vector<Vec>& gens) {
  std::set<std::size_t> in{r.index(Vec(r.dim(), 0))};
  std::vector<std::size_t> queue(in.begin(), in.end());
  for (const auto& g : gens)
    if (in.insert(r.index(g)).second) queue.push_back(r.index(g));
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Vec x = r.element(queue[head]);
    for (std::size_t y = 0; y < r.size(); ++y) {
      for (const Vec& z : {r.mul(x, r.element(y)), in.count(y) ? r.add(x, r.element(y)) : x}) {
        if (in.insert(r.index(z)).second) queue.push_back(r.index(z));
      }
    }
  }
  return in;
}

/// Subring generated by `gens` and 1.
inline std::set<std::size_t> subring(const PolyRing& r, const std::vector<Vec>& gens) {
  std::set<std::size_t> in;
  std::vector<std::size_t> queue;
  auto push = [&](const Vec& v) {
    if (in.insert(r.index(v)).second) queue.push_back(r.index(v));
  };
  push(Vec(r.dim(), 0));
  push(r.one());
  for (const auto& g : gens) push(g);
  for (std::size_t head = 0; head < queue.size(); ++head)
    for (std::size_t k = 0; k <= head; ++k) {
      const Vec x = r.element(queue[head]), y = r.element(queue[k]);
      push(r.add(x, y));
      push(r.mul(x, y));
    }
  return in;
}

/// 2×2 matrices over a PolyRing packed as four element indices.
struct MatOracle {
  const PolyRing& r;
  std::size_t n;

  explicit MatOracle(const PolyRing& ring) : r(ring), n(ring.size()) {}
  std::size_t pack(const std::array<Vec, 4>& m) const {
    return r.index(m[0]) + n * (r.index(m[1]) + n * (r.index(m[2]) + n * r.index(m[3])));
  }
  std::array<Vec, 4> unpack(std::size_t x) const {
    return {r.element(x % n), r.element((x / n) % n), r.element((x / (n * n)) % n), r.element(x / (n * n * n))};
  }
  std::size_t mul(std::size_t x, std::size_t y) const {
    const auto a = unpack(x), b = unpack(y);
    return pack({r.add(r.mul(a[0], b[0]), r.mul(a[1], b[2])), r.add(r.mul(a[0], b[1]), r.mul(a[1], b[3])),
                 r.add(r.mul(a[2], b[0]), r.mul(a[3], b[2])), r.add(r.mul(a[2], b[1]), r.mul(a[3], b[3]))});
  }
  std::size_t identity() const { return pack({r.one(), Vec(r.dim(), 0), Vec(r.dim(), 0), r.one()}); }
  std::size_t power(std::size_t x, std::uint64_t k) const {
    std::size_t out = identity();
    while (k--) out = mul(out, x);
    return out;
  }
};

struct FrattiniCounts {
  std::size_t gamma = 0;      // |1 + M_2(I)|
  std::size_t frattini = 0;   // |[Γ,Γ]Γ^p|
  std::size_t congruence = 0; // |1 + M_2(I²)| (p·I = 0 in characteristic p)
  bool contained = true;
};

/// Subgroup generated by p-th powers of all elements and commutators [g, h],
/// h running over all elements when |Γ| ≤ 256 and over the matrices 1 + t·E_kl
/// (t ∈ I) otherwise; then closed under conjugation by those matrices.
inline FrattiniCounts frattini_counts(const PolyRing& r) {
  const MatOracle m(r);
  std::vector<Vec> aug;
  for (std::size_t x = 0; x < r.size(); ++x)
    if (r.in_augmentation(r.element(x))) aug.push_back(r.element(x));
  std::set<std::size_t> sq;
  {
    std::vector<Vec> prods;
    for (const auto& a : aug)
      for (const auto& b : aug) prods.push_back(r.mul(a, b));
    std::set<std::size_t> in{r.index(Vec(r.dim(), 0))};
    bool grew = true;
    while (grew) {
      grew = false;
      std::vector<std::size_t> cur(in.begin(), in.end());
      for (std::size_t x : cur)
        for (const auto& v : prods)
          if (in.insert(r.index(r.add(r.element(x), v))).second) grew = true;
    }
    sq = in;
  }
  std::vector<std::size_t> gamma;
  for (const auto& a : aug)
    for (const auto& b : aug)
      for (const auto& c : aug)
        for (const auto& d : aug) gamma.push_back(m.pack({r.add(r.one(), a), b, c, r.add(r.one(), d)}));
  std::vector<std::size_t> inv(gamma.size());
  std::map<std::size_t, std::size_t> pos;
  for (std::size_t i = 0; i < gamma.size(); ++i) pos[gamma[i]] = i;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    std::size_t x = gamma[i], prev = m.identity();
    while (x != m.identity()) {
      prev = x;
      x = m.mul(x, gamma[i]);
    }
    inv[i] = prev;
  }
  std::vector<std::size_t> partners;
  if (gamma.size() <= 256) {
    partners = gamma;
  } else {
    const Vec zero(r.dim(), 0);
    for (const auto& t : aug) {
      if (t == zero) continue;
      partners.push_back(m.pack({r.add(r.one(), t), zero, zero, r.one()}));
      partners.push_back(m.pack({r.one(), t, zero, r.one()}));
      partners.push_back(m.pack({r.one(), zero, t, r.one()}));
      partners.push_back(m.pack({r.one(), zero, zero, r.add(r.one(), t)}));
    }
  }
  std::set<std::size_t> gens;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    gens.insert(m.power(gamma[i], r.p));
    for (std::size_t h : partners) {
      const std::size_t hi = inv[pos.at(h)];
      gens.insert(m.mul(m.mul(inv[i], hi), m.mul(gamma[i], h)));
    }
  }
  std::set<std::size_t> h{m.identity()};
  std::vector<std::size_t> queue{m.identity()};
  std::vector<std::size_t> gl(gens.begin(), gens.end());
  for (std::size_t head = 0; head < queue.size(); ++head)
    for (std::size_t g : gl) {
      const std::size_t y = m.mul(queue[head], g);
      if (h.insert(y).second) queue.push_back(y);
    }
  for (std::size_t x : h)
    for (std::size_t g : partners)
      if (!h.count(m.mul(m.mul(inv[pos.at(g)], x), g))) throw std::logic_error("oracle subgroup is not normal");
  FrattiniCounts out;
  out.gamma = gamma.size();
  out.frattini = h.size();
  for (std::size_t g : gamma) {
    const auto e = m.unpack(g);
    const bool in_k = sq.count(r.index(r.add(e[0], r.neg(r.one())))) && sq.count(r.index(e[1])) &&
                      sq.count(r.index(e[2])) && sq.count(r.index(r.add(e[3], r.neg(r.one()))));
    if (in_k) ++out.congruence;
    if (h.count(g) && !in_k) out.contained = false;
  }
  return out;
}

}  // namespace oracle
