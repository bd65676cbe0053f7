#include "towerforge/modrep.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <stdexcept>

#include "towerforge/errors.hpp"

namespace towerforge {

namespace {

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Matrix block_diagonal(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows() + b.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) c(a.rows() + i, a.cols() + j) = b(i, j);
  return c;
}

bool same_group(const FiniteGroup& a, const FiniteGroup& b) { return &a == &b || a == b; }

std::uint64_t projective_point_count(Scalar p, std::size_t d, std::uint64_t cap) {
  std::uint64_t total = 0, pk = 1;
  for (std::size_t k = 0; k < d; ++k) {
    total += pk;
    if (total > cap) return cap + 1;
    pk *= p;
  }
  return total;
}

// Polynomials over F_p, coefficients from low to high degree, no trailing zeros.
using Poly = std::vector<Scalar>;

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

int degree(const Poly& a) { return static_cast<int>(a.size()) - 1; }

Poly poly_sub(const PrimeField& f, Poly a, const Poly& b) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] = f.sub(a[i], b[i]);
  trim(a);
  return a;
}

Poly poly_mul(const PrimeField& f, const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = f.add(c[i + j], f.mul(a[i], b[j]));
  trim(c);
  return c;
}

Poly poly_mod(const PrimeField& f, Poly a, const Poly& m) {
  const Scalar lead_inv = f.inv(m.back());
  while (degree(a) >= degree(m)) {
    Scalar c = f.mul(a.back(), lead_inv);
    std::size_t shift = a.size() - m.size();
    for (std::size_t i = 0; i < m.size(); ++i) a[shift + i] = f.sub(a[shift + i], f.mul(c, m[i]));
    trim(a);
  }
  return a;
}

Poly poly_monic(const PrimeField& f, Poly a) {
  if (a.empty()) return a;
  Scalar s = f.inv(a.back());
  for (auto& x : a) x = f.mul(x, s);
  return a;
}

Poly poly_gcd(const PrimeField& f, Poly a, Poly b) {
  while (!b.empty()) {
    Poly r = poly_mod(f, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return poly_monic(f, a);
}

Poly poly_powmod(const PrimeField& f, Poly base, std::uint64_t e, const Poly& m) {
  Poly result{1};
  base = poly_mod(f, base, m);
  while (e) {
    if (e & 1) result = poly_mod(f, poly_mul(f, result, base), m);
    base = poly_mod(f, poly_mul(f, base, base), m);
    e >>= 1;
  }
  return result;
}

Poly derivative(const PrimeField& f, const Poly& a) {
  Poly d;
  for (std::size_t i = 1; i < a.size(); ++i) d.push_back(f.mul(f.reduce(static_cast<std::int64_t>(i)), a[i]));
  trim(d);
  return d;
}

Poly minimal_polynomial(const PrimeField& f, const Matrix& a) {
  const std::size_t n = a.rows();
  std::vector<Vec> powers;
  Matrix cur = Matrix::identity(n);
  while (true) {
    Vec v = cur.data();
    if (!powers.empty()) {
      Matrix cols(n * n, powers.size());
      for (std::size_t j = 0; j < powers.size(); ++j)
        for (std::size_t i = 0; i < n * n; ++i) cols(i, j) = powers[j][i];
      if (auto c = f.solve(cols, v)) {
        Poly mp(powers.size() + 1, 0);
        for (std::size_t j = 0; j < powers.size(); ++j) mp[j] = f.neg((*c)[j]);
        mp.back() = 1;
        return mp;
      }
    }
    powers.push_back(std::move(v));
    cur = f.mul(cur, a);
  }
}

Matrix evaluate(const PrimeField& f, const Poly& q, const Matrix& a) {
  const std::size_t n = a.rows();
  Matrix r(n, n);
  for (std::size_t k = q.size(); k-- > 0;) {
    r = f.mul(r, a);
    for (std::size_t i = 0; i < n; ++i) r(i, i) = f.add(r(i, i), q[k]);
  }
  return r;
}

Poly random_poly(const PrimeField& f, std::size_t len, std::mt19937& rng) {
  Poly b(len);
  for (auto& x : b) x = static_cast<Scalar>(rng() % f.p());
  trim(b);
  return b;
}

// Cantor–Zassenhaus split of a squarefree product of ≥ 2 irreducibles of degree k.
Poly equal_degree_split(const PrimeField& f, const Poly& m, std::size_t k, std::mt19937& rng) {
  const Scalar p = f.p();
  while (true) {
    Poly b = random_poly(f, m.size() - 1, rng);
    if (degree(b) < 1) continue;
    Poly t;
    if (p == 2) {
      // trace map b + b² + … + b^{2^{k-1}}
      t = b;
      Poly s = b;
      for (std::size_t i = 1; i < k; ++i) {
        s = poly_mod(f, poly_mul(f, s, s), m);
        t = poly_sub(f, t, poly_sub(f, Poly{}, s));
      }
    } else {
      // b^{(p^k-1)/2} = ∏_i (b^{p^i})^{(p-1)/2}
      Poly c = b;
      t = Poly{1};
      for (std::size_t i = 0; i < k; ++i) {
        t = poly_mod(f, poly_mul(f, t, poly_powmod(f, c, (p - 1) / 2, m)), m);
        c = poly_powmod(f, c, p, m);
      }
      t = poly_sub(f, t, Poly{1});
    }
    Poly g = poly_gcd(f, m, t);
    if (degree(g) > 0 && degree(g) < degree(m)) return g;
  }
}

// A monic divisor h of m with 0 < deg h < deg m, if m is reducible.
std::optional<Poly> nontrivial_factor(const PrimeField& f, const Poly& m, std::mt19937& rng) {
  const int n = degree(m);
  if (n <= 1) return std::nullopt;
  Poly d = derivative(f, m);
  if (d.empty()) {
    // m = g(x^p) = g(x)^p over F_p
    Poly g;
    for (std::size_t i = 0; i < m.size(); i += f.p()) g.push_back(m[i]);
    return g;
  }
  Poly g = poly_gcd(f, m, d);
  if (degree(g) > 0) return g;
  Poly x{0, 1};
  Poly xp = x;
  for (int k = 1; 2 * k <= n; ++k) {
    xp = poly_powmod(f, xp, f.p(), m);
    Poly h = poly_gcd(f, m, poly_sub(f, xp, x));
    if (degree(h) <= 0) continue;
    if (degree(h) < n) return h;
    return equal_degree_split(f, m, static_cast<std::size_t>(k), rng);
  }
  return std::nullopt;
}

Vec unit_vector(std::size_t n, std::size_t i) {
  Vec v(n, 0);
  v[i] = 1;
  return v;
}

// A proper nonzero submodule of w, or nullopt when w is simple. The End-based
// steps assume w is semisimple.
std::optional<Subspace> find_proper_submodule(const GroupModule& w, std::mt19937& rng, bool semisimple,
                                              std::uint64_t guard) {
  const std::size_t d = w.dim();
  const PrimeField& f = w.field();
  if (d <= 1) return std::nullopt;
  for (std::size_t i = 0; i < d; ++i) {
    Subspace s = spin(w, unit_vector(d, i));
    if (s.dim() < d) return s;
  }
  if (semisimple) {
    auto end = hom_basis(w, w);
    if (end.size() == 1) return std::nullopt;
    for (int attempt = 0; attempt < 64; ++attempt) {
      Matrix a(d, d);
      for (const auto& b : end) a = f.add(a, f.scale(b, static_cast<Scalar>(rng() % f.p())));
      Poly mp = minimal_polynomial(f, a);
      if (auto h = nontrivial_factor(f, mp, rng)) {
        Matrix k = f.kernel(evaluate(f, *h, a));
        return Subspace(f, k);
      }
      if (static_cast<std::size_t>(degree(mp)) == end.size()) return std::nullopt;
    }
  }
  if (projective_point_count(w.p(), d, guard) > guard)
    throw GuardExceeded("submodule search exceeds the enumeration guard");
  std::optional<Subspace> found;
  for_each_projective_point(w.p(), d, [&](const Vec& v) {
    Subspace s = spin(w, v);
    if (s.dim() < d) {
      found = s;
      return false;
    }
    return true;
  });
  return found;
}

// Traces of all group elements; used to order simple modules.
std::vector<Scalar> character(const GroupModule& m) {
  std::vector<Scalar> chi(m.group().order());
  for (Elem g = 0; g < chi.size(); ++g) chi[g] = m.field().trace(m.rho(g));
  return chi;
}

std::vector<Elem> normal_generators_in(const FiniteGroup& gamma, const SemidirectLayout& layout) {
  std::vector<Elem> out;
  for (auto g : layout.normal->generators()) out.push_back(layout.pair(g, layout.complement->identity()));
  (void)gamma;
  return out;
}

Matrix quotient_map(const PrimeField& f, const Subspace& s) {
  const std::size_t n = s.ambient_dim();
  Matrix q(n - s.dim(), n);
  for (std::size_t j = 0; j < n; ++j) {
    Vec c = quotient_coordinates(f, s, unit_vector(n, j));
    for (std::size_t i = 0; i < c.size(); ++i) q(i, j) = c[i];
  }
  return q;
}

Matrix norm_element(const GroupModule& m, const SemidirectLayout& layout) {
  const std::size_t n = m.dim();
  Matrix nm(n, n);
  for (Elem g = 0; g < layout.normal->order(); ++g)
    nm = m.field().add(nm, m.rho(layout.pair(g, layout.complement->identity())));
  return nm;
}

Subspace column_space(const PrimeField& f, const Matrix& a) { return Subspace(f, transpose(a)); }

}  // namespace

GroupModule::GroupModule(Scalar p, GroupPtr group, std::vector<Matrix> action)
    : GroupModule(p, std::move(group), std::move(action), true) {}

GroupModule GroupModule::derived(Scalar p, GroupPtr group, std::vector<Matrix> action) {
  return GroupModule(p, std::move(group), std::move(action), false);
}

GroupModule::GroupModule(Scalar p, GroupPtr group, std::vector<Matrix> action, bool validate) {
  if (!group) throw PreconditionError("module needs a group");
  const auto& G = *group;
  if (action.size() != G.generators().size()) throw PreconditionError("need one matrix per group generator");
  PrimeField field(p);
  const std::size_t dim = action.front().rows();
  for (auto& a : action) {
    if (a.rows() != dim || a.cols() != dim) throw PreconditionError("action matrices must be square of equal size");
    a = field.reduce(a);
    if (validate && !field.invertible(a)) throw PreconditionError("action matrix is not invertible");
  }
  std::vector<Matrix> elements(G.order());
  std::vector<char> set(G.order(), 0);
  elements[G.identity()] = Matrix::identity(dim);
  set[G.identity()] = 1;
  std::vector<Elem> queue{G.identity()};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Elem x = queue[head];
    for (std::size_t i = 0; i < action.size(); ++i) {
      Elem y = G.mul(x, G.generators()[i]);
      if (!set[y]) {
        elements[y] = field.mul(elements[x], action[i]);
        set[y] = 1;
        queue.push_back(y);
      } else if (validate && elements[y] != field.mul(elements[x], action[i])) {
        throw PreconditionError("action matrices violate a group relation");
      }
    }
  }
  data_ = std::make_shared<const Data>(Data{field, dim, std::move(group), std::move(action), std::move(elements)});
}

GroupModule GroupModule::regular(Scalar p, GroupPtr group) {
  const auto& G = *group;
  const std::size_t n = G.order();
  std::vector<Matrix> action;
  for (auto g : G.generators()) {
    Matrix m(n, n);
    for (Elem h = 0; h < n; ++h) m(G.mul(g, h), h) = 1;
    action.push_back(std::move(m));
  }
  return derived(p, std::move(group), std::move(action));
}

GroupModule GroupModule::free(Scalar p, GroupPtr group, std::size_t rank) {
  GroupModule out = trivial(p, group, 0);
  GroupModule reg = regular(p, group);
  for (std::size_t i = 0; i < rank; ++i) out = direct_sum(out, reg);
  return out;
}

GroupModule GroupModule::trivial(Scalar p, GroupPtr group, std::size_t dim) {
  std::vector<Matrix> action(group->generators().size(), Matrix::identity(dim));
  return derived(p, std::move(group), std::move(action));
}

GroupModule GroupModule::direct_sum(const GroupModule& a, const GroupModule& b) {
  if (a.p() != b.p() || !same_group(a.group(), b.group())) throw PreconditionError("direct sum of incompatible modules");
  std::vector<Matrix> action;
  for (std::size_t i = 0; i < a.action().size(); ++i) action.push_back(block_diagonal(a.action()[i], b.action()[i]));
  return derived(a.p(), a.group_ptr(), std::move(action));
}

Submodule::Submodule(GroupModule m, Subspace s) : ambient(std::move(m)), span(std::move(s)) {
  if (span.ambient_dim() != ambient.dim()) throw PreconditionError("submodule basis has wrong length");
  if (!is_invariant(ambient, span)) throw PreconditionError("subspace is not invariant under the group");
}

Submodule Submodule::whole(const GroupModule& m) { return Submodule(m, Subspace::full(m.dim())); }
Submodule Submodule::zero(const GroupModule& m) { return Submodule(m, Subspace(m.dim())); }

bool is_invariant(const GroupModule& m, const Subspace& s) {
  const auto& f = m.field();
  for (const auto& a : m.action())
    for (std::size_t i = 0; i < s.dim(); ++i)
      if (!s.contains(f, f.apply(a, s.basis().row(i)))) return false;
  return true;
}

Subspace spin(const GroupModule& m, const Matrix& rows) {
  const auto& f = m.field();
  Subspace s(m.dim());
  std::vector<Vec> queue;
  auto push = [&](const Vec& v) {
    Vec r = s.reduce_vector(f, v);
    if (std::all_of(r.begin(), r.end(), [](Scalar x) { return x == 0; })) return;
    s = s.sum(f, Subspace(f, Matrix::from_rows({r}, m.dim())));
    queue.push_back(r);
  };
  for (std::size_t i = 0; i < rows.rows(); ++i) push(rows.row_vec(i));
  for (std::size_t head = 0; head < queue.size(); ++head)
    for (const auto& a : m.action()) push(f.apply(a, queue[head]));
  return s;
}

Subspace spin(const GroupModule& m, std::span<const Scalar> v) {
  return spin(m, Matrix::from_rows({Vec(v.begin(), v.end())}, m.dim()));
}

GroupModule submodule_action(const GroupModule& m, const Subspace& s) {
  const auto& f = m.field();
  std::vector<Matrix> action;
  for (const auto& a : m.action()) {
    Matrix r(s.dim(), s.dim());
    for (std::size_t j = 0; j < s.dim(); ++j) {
      auto c = s.coordinates(f, f.apply(a, s.basis().row(j)));
      if (!c) throw PreconditionError("subspace is not invariant under the group");
      for (std::size_t i = 0; i < s.dim(); ++i) r(i, j) = (*c)[i];
    }
    action.push_back(std::move(r));
  }
  return GroupModule::derived(m.p(), m.group_ptr(), std::move(action));
}

Vec quotient_coordinates(const PrimeField& f, const Subspace& s, std::span<const Scalar> v) {
  Vec r = s.reduce_vector(f, v);
  Vec out;
  std::size_t next = 0;
  for (std::size_t j = 0; j < r.size(); ++j) {
    if (next < s.pivots().size() && s.pivots()[next] == j) {
      ++next;
      continue;
    }
    out.push_back(r[j]);
  }
  return out;
}

GroupModule quotient_action(const GroupModule& m, const Subspace& s) {
  if (!is_invariant(m, s)) throw PreconditionError("quotient by a non-invariant subspace");
  const auto& f = m.field();
  const std::size_t n = m.dim();
  std::vector<std::size_t> free_cols;
  std::size_t next = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (next < s.pivots().size() && s.pivots()[next] == j) {
      ++next;
      continue;
    }
    free_cols.push_back(j);
  }
  std::vector<Matrix> action;
  for (const auto& a : m.action()) {
    Matrix r(free_cols.size(), free_cols.size());
    for (std::size_t j = 0; j < free_cols.size(); ++j) {
      Vec c = quotient_coordinates(f, s, a.col_vec(free_cols[j]));
      for (std::size_t i = 0; i < c.size(); ++i) r(i, j) = c[i];
    }
    action.push_back(std::move(r));
  }
  return GroupModule::derived(m.p(), m.group_ptr(), std::move(action));
}

Matrix to_ambient(const PrimeField& f, const Subspace& s, const Matrix& coordinate_rows) {
  if (coordinate_rows.rows() == 0) return Matrix(0, s.ambient_dim());
  return f.mul(coordinate_rows, s.basis());
}

GroupModule restrict(const GroupModule& m, GroupPtr sub, const std::vector<Elem>& embedding) {
  if (embedding.size() != sub->order()) throw PreconditionError("embedding must list one image per element");
  std::vector<Matrix> action;
  for (auto g : sub->generators()) action.push_back(m.rho(embedding.at(g)));
  return GroupModule(m.p(), std::move(sub), std::move(action));
}

SemidirectLayout sylow_layout(const GroupPtr& gamma, Scalar p) {
  auto is_p_power = [p](std::size_t n) {
    while (n % p == 0) n /= p;
    return n == 1;
  };
  if (const auto& sd = gamma->semidirect()) {
    if (is_p_power(sd->normal->order()) && sd->complement->order() % p != 0) return *sd;
  }
  auto trivial = std::make_shared<const FiniteGroup>(FiniteGroup::trivial());
  if (is_p_power(gamma->order())) return {gamma, trivial};
  if (gamma->order() % p != 0) return {trivial, gamma};
  throw PreconditionError("group carries no G ⋊ Φ structure with G its Sylow p-subgroup");
}

GroupModule restrict_to_complement(const GroupModule& m, const SemidirectLayout& layout) {
  std::vector<Elem> emb(layout.complement->order());
  for (Elem phi = 0; phi < emb.size(); ++phi) emb[phi] = layout.pair(layout.normal->identity(), phi);
  std::vector<Matrix> action;
  for (auto g : layout.complement->generators()) action.push_back(m.rho(emb[g]));
  return GroupModule::derived(m.p(), layout.complement, std::move(action));
}

GroupModule inflate(const GroupModule& s, GroupPtr gamma) {
  auto layout = sylow_layout(gamma, s.p());
  if (!same_group(s.group(), *layout.complement)) throw PreconditionError("module is not over the complement Φ");
  std::vector<Matrix> action;
  for (auto g : gamma->generators()) action.push_back(s.rho(layout.complement_part(g)));
  return GroupModule::derived(s.p(), std::move(gamma), std::move(action));
}

Subspace fixed_points(const GroupModule& m, const std::vector<Elem>& elems) {
  const auto& f = m.field();
  const std::size_t n = m.dim();
  Matrix stack(0, n);
  for (auto g : elems) {
    Matrix d = f.sub(m.rho(g), Matrix::identity(n));
    for (std::size_t i = 0; i < n; ++i) stack.append_row(d.row(i));
  }
  return Subspace(f, f.kernel(stack));
}

std::vector<Matrix> hom_basis(const GroupModule& a, const GroupModule& b) {
  if (a.p() != b.p() || !same_group(a.group(), b.group())) throw PreconditionError("Hom between incompatible modules");
  const auto& f = a.field();
  const std::size_t da = a.dim(), db = b.dim(), unknowns = da * db;
  if (unknowns == 0) return {};
  Matrix eq(0, unknowns);
  Vec row(unknowns);
  for (std::size_t s = 0; s < a.action().size(); ++s) {
    const Matrix& A = a.action()[s];
    const Matrix& B = b.action()[s];
    for (std::size_t r = 0; r < db; ++r)
      for (std::size_t c = 0; c < da; ++c) {
        std::fill(row.begin(), row.end(), 0);
        // (B X − X A)_{r,c}
        for (std::size_t k = 0; k < db; ++k) row[k * da + c] = f.add(row[k * da + c], B(r, k));
        for (std::size_t k = 0; k < da; ++k) row[r * da + k] = f.sub(row[r * da + k], A(k, c));
        eq.append_row(row);
      }
  }
  Matrix ker = f.kernel(eq);
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < ker.rows(); ++i) out.emplace_back(db, da, ker.row_vec(i));
  return out;
}

std::size_t hom_dim(const GroupModule& a, const GroupModule& b) { return hom_basis(a, b).size(); }
std::size_t end_dim(const GroupModule& m) { return hom_dim(m, m); }

bool is_irreducible(const GroupModule& m, std::uint64_t guard) {
  const std::size_t d = m.dim();
  if (d == 0) return false;
  if (d == 1) return true;
  if (projective_point_count(m.p(), d, guard) <= guard) {
    bool ok = true;
    for_each_projective_point(m.p(), d, [&](const Vec& v) {
      if (spin(m, v).dim() < d) ok = false;
      return ok;
    });
    return ok;
  }
  if (m.group().order() % m.p() == 0) throw GuardExceeded("irreducibility test exceeds the enumeration guard");
  std::mt19937 rng(0);
  return !find_proper_submodule(m, rng, true, 0).has_value();
}

Subspace maschke_complement(const GroupModule& m, const Subspace& u, const Subspace& w) {
  const auto& f = m.field();
  const std::size_t n = m.dim();
  const auto& G = m.group();
  if (G.order() % m.p() == 0) throw PreconditionError("Maschke averaging needs p ∤ |group|");
  if (!w.contains(f, u)) throw PreconditionError("complement: u is not inside w");
  // Basis of F_p^n: u, then w \ u, then the rest.
  Matrix basis = u.basis();
  Subspace cur = u;
  auto extend = [&](const Matrix& rows) {
    for (std::size_t i = 0; i < rows.rows(); ++i) {
      if (cur.contains(f, rows.row(i))) continue;
      basis.append_row(rows.row(i));
      cur = cur.sum(f, Subspace(f, Matrix::from_rows({rows.row_vec(i)}, n)));
    }
  };
  extend(w.basis());
  extend(Matrix::identity(n));
  Matrix bt = transpose(basis);
  Matrix d(n, n);
  for (std::size_t i = 0; i < u.dim(); ++i) d(i, i) = 1;
  Matrix pi = f.mul(f.mul(bt, d), *f.inverse(bt));
  Matrix avg(n, n);
  for (Elem g = 0; g < G.order(); ++g) avg = f.add(avg, f.mul(f.mul(m.rho(g), pi), m.rho(G.inverse(g))));
  return Subspace(f, f.kernel(avg)).intersect(f, w);
}

std::vector<Subspace> decompose_semisimple(const GroupModule& m, const Subspace& s) {
  if (m.group().order() % m.p() == 0) throw PreconditionError("semisimple decomposition needs p ∤ |group|");
  const auto& f = m.field();
  std::mt19937 rng(0);
  std::vector<Subspace> out;
  std::function<void(const Subspace&)> split = [&](const Subspace& sub) {
    if (sub.dim() == 0) return;
    GroupModule w = submodule_action(m, sub);
    auto u = find_proper_submodule(w, rng, true, kDefaultEnumerationGuard);
    if (!u) {
      out.push_back(sub);
      return;
    }
    Subspace c = maschke_complement(w, *u, Subspace::full(w.dim()));
    split(Subspace(f, to_ambient(f, sub, u->basis())));
    split(Subspace(f, to_ambient(f, sub, c.basis())));
  };
  split(s);
  return out;
}

bool isomorphic_simples(const GroupModule& a, const GroupModule& b) {
  return a.dim() == b.dim() && hom_dim(a, b) > 0;
}

std::vector<SimpleFactor> simple_decomposition(const GroupModule& m) {
  if (m.group().order() % m.p() == 0) throw PreconditionError("simple_decomposition needs p ∤ |Φ|");
  std::vector<SimpleFactor> classes;
  for (const auto& piece : decompose_semisimple(m, Subspace::full(m.dim()))) {
    GroupModule w = submodule_action(m, piece);
    bool placed = false;
    for (auto& c : classes)
      if (isomorphic_simples(c.module, w)) {
        ++c.multiplicity;
        placed = true;
        break;
      }
    if (!placed) classes.push_back({w, 1});
  }
  std::stable_sort(classes.begin(), classes.end(), [](const SimpleFactor& a, const SimpleFactor& b) {
    if (a.module.dim() != b.module.dim()) return a.module.dim() < b.module.dim();
    auto ca = character(a.module), cb = character(b.module);
    bool ta = std::all_of(ca.begin(), ca.end(), [&](Scalar x) { return x == ca.front(); });
    bool tb = std::all_of(cb.begin(), cb.end(), [&](Scalar x) { return x == cb.front(); });
    if (ta != tb) return ta;
    return ca < cb;
  });
  for (const auto& c : classes)
    if (!is_irreducible(c.module)) throw std::logic_error("decomposition produced a reducible summand");
  return classes;
}

IsotypicProjector isotypic_projector(const GroupModule& m, const GroupModule& w) {
  const auto& G = m.group();
  const auto& f = m.field();
  if (G.order() % m.p() == 0) throw PreconditionError("isotypic projector needs p ∤ |Φ|");
  if (w.p() != m.p() || !same_group(G, w.group())) throw PreconditionError("target is over a different group");
  if (!is_irreducible(w)) throw PreconditionError("target module is not simple");
  const std::size_t e = end_dim(w);
  if (w.dim() % e != 0) throw std::logic_error("dim End W does not divide dim W");
  // dim W / (|Φ| · dim End W), with the integer ratio taken before reducing mod p.
  Scalar scale = f.mul(f.reduce(static_cast<std::int64_t>(w.dim() / e)),
                       f.inv(f.reduce(static_cast<std::int64_t>(G.order()))));
  std::vector<Scalar> coeff(G.order());
  Matrix proj(m.dim(), m.dim());
  for (Elem g = 0; g < G.order(); ++g) {
    coeff[g] = f.mul(scale, f.trace(w.rho(G.inverse(g))));
    if (coeff[g]) proj = f.add(proj, f.scale(m.rho(g), coeff[g]));
  }
  return {m, w, std::move(coeff), std::move(proj)};
}

Subspace sum_of_simple_submodules(const GroupModule& m, std::uint64_t guard) {
  const auto& f = m.field();
  if (projective_point_count(m.p(), m.dim(), guard) > guard) throw GuardExceeded("socle search exceeds the guard");
  Subspace total(m.dim());
  for_each_projective_point(m.p(), m.dim(), [&](const Vec& v) {
    if (total.contains(f, v)) return true;
    Subspace t = spin(m, v);
    if (is_irreducible(submodule_action(m, t), guard)) total = total.sum(f, t);
    return true;
  });
  return total;
}

Subspace socle(const GroupModule& m) {
  if (m.group().order() % m.p() != 0) return Subspace::full(m.dim());
  SemidirectLayout layout;
  try {
    layout = sylow_layout(m.group_ptr(), m.p());
  } catch (const PreconditionError&) {
    return sum_of_simple_submodules(m);
  }
  return fixed_points(m, normal_generators_in(m.group(), layout));
}

Subspace radical(const GroupModule& m) {
  const auto& f = m.field();
  auto layout = sylow_layout(m.group_ptr(), m.p());
  const std::size_t n = m.dim();
  Matrix rows(0, n);
  for (auto g : normal_generators_in(m.group(), layout)) {
    Matrix d = transpose(f.sub(m.rho(g), Matrix::identity(n)));
    for (std::size_t i = 0; i < n; ++i) rows.append_row(d.row(i));
  }
  return Subspace(f, rows);
}

GroupModule projective_indecomposable(const GroupPtr& gamma, const GroupModule& s) {
  auto layout = sylow_layout(gamma, s.p());
  if (!same_group(s.group(), *layout.complement)) throw PreconditionError("module is not over the complement Φ");
  const auto& G = *layout.normal;
  const std::size_t ng = G.order(), ds = s.dim(), dim = ng * ds;
  std::vector<Matrix> action;
  for (auto gam : gamma->generators()) {
    Matrix a(dim, dim);
    for (Elem g = 0; g < ng; ++g) {
      Elem x = gamma->mul(gam, layout.pair(g, layout.complement->identity()));
      Elem g2 = layout.normal_part(x), phi = layout.complement_part(x);
      const Matrix& r = s.rho(phi);
      for (std::size_t i = 0; i < ds; ++i)
        for (std::size_t j = 0; j < ds; ++j) a(g2 * ds + i, g * ds + j) = r(i, j);
    }
    action.push_back(std::move(a));
  }
  return GroupModule(s.p(), gamma, std::move(action));
}

InjectiveHull injective_hull(const Submodule& e) {
  const GroupModule& A = e.ambient;
  const auto& f = A.field();
  const std::size_t n = A.dim();
  if (!is_free(A).is_free) throw PreconditionError("injective_hull: ambient module is not free");
  auto layout = sylow_layout(A.group_ptr(), A.p());
  auto g_gens = normal_generators_in(A.group(), layout);
  GroupModule res = restrict_to_complement(A, layout);
  Subspace fix = fixed_points(A, g_gens);
  Subspace soc_e = fix.intersect(f, e.span);

  std::vector<SimpleFactor> types;
  for (const auto& piece : decompose_semisimple(res, soc_e)) {
    GroupModule t = submodule_action(res, piece);
    bool placed = false;
    for (auto& c : types)
      if (isomorphic_simples(c.module, t)) {
        ++c.multiplicity;
        placed = true;
        break;
      }
    if (!placed) types.push_back({t, 1});
  }
  std::size_t target = 0;
  for (const auto& t : types) target += t.multiplicity * layout.normal->order() * t.module.dim();

  // Grow a maximal essential extension of e.
  Subspace h = e.span;
  while (true) {
    Matrix q = quotient_map(f, h);
    Matrix stack(0, n);
    for (auto g : g_gens) {
      Matrix d = f.mul(q, f.sub(A.rho(g), Matrix::identity(n)));
      for (std::size_t i = 0; i < d.rows(); ++i) stack.append_row(d.row(i));
    }
    Subspace u = stack.rows() ? Subspace(f, f.kernel(stack)) : Subspace::full(n);
    Subspace fh = fix.sum(f, h);
    if (u.dim() == fh.dim()) break;
    Subspace c = maschke_complement(res, fh, u);
    h = h.sum(f, c);
  }
  if (h.dim() != target) throw std::logic_error("injective hull has unexpected dimension");

  // ⊕ P_S → h via Frobenius reciprocity: ψ(g ⊗ s) = ρ(g) f(s) for a Φ-map f : S → h.
  GroupModule hres = submodule_action(res, h);
  Matrix nm = norm_element(A, layout);
  Subspace socle_images(n);
  GroupModule hull = GroupModule::trivial(A.p(), A.group_ptr(), 0);
  Matrix psi_t(0, n);  // transpose of the embedding, built column by column
  for (const auto& t : types) {
    GroupModule pim = projective_indecomposable(A.group_ptr(), t.module);
    std::size_t chosen = 0;
    for (const auto& x : hom_basis(t.module, hres)) {
      if (chosen == t.multiplicity) break;
      Matrix fmap = f.mul(transpose(h.basis()), x);  // n × dim S
      Subspace img = column_space(f, f.mul(nm, fmap));
      if (img.dim() != t.module.dim() || socle_images.intersect(f, img).dim() != 0) continue;
      socle_images = socle_images.sum(f, img);
      ++chosen;
      hull = GroupModule::direct_sum(hull, pim);
      for (Elem g = 0; g < layout.normal->order(); ++g) {
        Matrix col = f.mul(A.rho(layout.pair(g, layout.complement->identity())), fmap);
        for (std::size_t j = 0; j < col.cols(); ++j) psi_t.append_row(col.col_vec(j));
      }
    }
    if (chosen != t.multiplicity) throw std::logic_error("could not embed the projective indecomposables");
  }
  Matrix psi = psi_t.rows() ? transpose(psi_t) : Matrix(n, 0);
  if (f.rank(psi_t) != hull.dim()) throw std::logic_error("hull embedding is not injective");
  for (std::size_t i = 0; i < A.action().size(); ++i)
    if (hull.dim() && f.mul(A.action()[i], psi) != f.mul(psi, hull.action()[i]))
      throw std::logic_error("hull embedding is not equivariant");
  Subspace image(f, psi_t);
  if (!(image == h) || !image.contains(f, e.span)) throw std::logic_error("hull embedding image mismatch");
  return {hull, types, psi, image};
}

FreenessCertificate is_free(const GroupModule& m) {
  FreenessCertificate cert;
  const auto& f = m.field();
  const auto& gamma = m.group();
  const std::size_t n = m.dim();
  auto layout = sylow_layout(m.group_ptr(), m.p());
  if (n % gamma.order() != 0) {
    cert.reason = "dimension is not divisible by |Γ|";
    return cert;
  }
  const std::size_t k = n / gamma.order();
  cert.generators = Matrix(0, n);
  if (k == 0) {
    cert.is_free = true;
    cert.reason = "zero module";
    return cert;
  }
  Subspace rad = radical(m);
  const std::size_t head_dim = n - rad.dim();
  if (head_dim * layout.normal->order() != n) {
    cert.reason = "dim M/I_G M differs from dim M / |G|";
    return cert;
  }
  GroupModule head = restrict_to_complement(quotient_action(m, rad), layout);
  for (const auto& c : simple_decomposition(head)) {
    const std::size_t n_s = c.module.dim() / end_dim(c.module);
    if (c.multiplicity != k * n_s) {
      cert.reason = "head multiplicities differ from those of F_p[Φ]^k";
      return cert;
    }
  }
  // Φ-free generators of the head, chosen greedily with a fixed seed.
  const auto& phi = *layout.complement;
  std::mt19937 rng(0);
  Matrix orbit_rows(0, head_dim);
  Matrix gens(0, n);
  std::vector<std::size_t> free_cols;
  {
    std::size_t next = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (next < rad.pivots().size() && rad.pivots()[next] == j) {
        ++next;
        continue;
      }
      free_cols.push_back(j);
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    bool found = false;
    for (int attempt = 0; attempt < 4096 && !found; ++attempt) {
      Vec q(head_dim);
      for (auto& x : q) x = static_cast<Scalar>(rng() % m.p());
      Matrix trial = orbit_rows;
      for (Elem g = 0; g < phi.order(); ++g) trial.append_row(f.apply(head.rho(g), q));
      if (f.rank(trial) != (i + 1) * phi.order()) continue;
      orbit_rows = trial;
      Vec lift(n, 0);
      for (std::size_t j = 0; j < head_dim; ++j) lift[free_cols[j]] = q[j];
      gens.append_row(lift);
      found = true;
    }
    if (!found) throw std::logic_error("free generator search failed");
  }
  Matrix span(0, n);
  for (std::size_t i = 0; i < k; ++i)
    for (Elem g = 0; g < gamma.order(); ++g) span.append_row(f.apply(m.rho(g), gens.row(i)));
  if (f.rank(span) != n) throw std::logic_error("free generators do not span");
  cert.is_free = true;
  cert.rank = k;
  cert.generators = gens;
  cert.reason = "head ≅ F_p[Φ]^k and dim M = k·|Γ|";
  return cert;
}

FreenessCertificate is_free(const Submodule& s) {
  auto cert = is_free(submodule_action(s.ambient, s.span));
  if (cert.is_free) cert.generators = to_ambient(s.ambient.field(), s.span, cert.generators);
  return cert;
}

Lemma2Split lemma2_split(const GroupModule& ambient, const Subspace& e, const Subspace& n) {
  const auto& f = ambient.field();
  Submodule e_sub(ambient, e), n_sub(ambient, n);
  auto free_a = is_free(ambient);
  if (!free_a.is_free) throw PreconditionError("lemma2_split: ambient is not free");
  auto free_n = is_free(n_sub);
  if (!free_n.is_free) throw PreconditionError("lemma2_split: n is not free");
  auto layout = sylow_layout(ambient.group_ptr(), ambient.p());
  Subspace fix = fixed_points(ambient, normal_generators_in(ambient.group(), layout));
  if (fix.intersect(f, e).intersect(f, n).dim() != 0)
    throw PreconditionError("lemma2_split: socle of e meets n");

  InjectiveHull hull = injective_hull(e_sub);
  Subspace x = hull.image.sum(f, n);
  if (x.dim() != hull.image.dim() + n.dim()) throw std::logic_error("hull of e meets n");

  GroupModule res = restrict_to_complement(ambient, layout);
  Subspace y = maschke_complement(res, fix.intersect(f, x), fix);
  GroupModule regular_phi = GroupModule::regular(ambient.p(), layout.complement);
  auto all_types = simple_decomposition(regular_phi);

  std::vector<std::size_t> alpha(all_types.size(), 0);
  for (const auto& t : hull.socle_types)
    for (std::size_t i = 0; i < all_types.size(); ++i)
      if (isomorphic_simples(all_types[i].module, t.module)) alpha[i] = t.multiplicity;
  std::size_t r = 0;
  for (std::size_t i = 0; i < all_types.size(); ++i) {
    std::size_t ns = all_types[i].multiplicity;  // n_S = multiplicity of S in F_p[Φ]
    r = std::max(r, (alpha[i] + ns - 1) / ns);
  }
  std::vector<std::size_t> needed(all_types.size());
  for (std::size_t i = 0; i < all_types.size(); ++i) needed[i] = r * all_types[i].multiplicity - alpha[i];

  Subspace m_space = hull.image, q_space(ambient.dim());
  for (const auto& piece : decompose_semisimple(res, y)) {
    GroupModule t = submodule_action(res, piece);
    std::size_t type = all_types.size();
    for (std::size_t i = 0; i < all_types.size(); ++i)
      if (isomorphic_simples(all_types[i].module, t)) type = i;
    if (type == all_types.size()) throw std::logic_error("unclassified simple summand");
    Subspace copy = injective_hull(Submodule(ambient, piece)).image;
    if (needed[type] > 0) {
      --needed[type];
      m_space = m_space.sum(f, copy);
    } else {
      q_space = q_space.sum(f, copy);
    }
  }
  for (auto k : needed)
    if (k) throw std::logic_error("not enough projective summands to make M free");

  if (m_space.dim() + n.dim() + q_space.dim() != ambient.dim() ||
      m_space.sum(f, n).sum(f, q_space).dim() != ambient.dim())
    throw std::logic_error("M ⊕ N ⊕ Q is not a direct sum decomposition");
  auto free_m = is_free(Submodule(ambient, m_space));
  auto free_q = is_free(Submodule(ambient, q_space));
  if (!free_m.is_free || !free_q.is_free) throw std::logic_error("M or Q is not free");
  Lemma2Split out{m_space, n, q_space, hull.image, free_m.rank, free_n.rank, free_q.rank};
  return out;
}

}  // namespace towerforge
