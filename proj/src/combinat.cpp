#include "towerforge/combinat.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "towerforge/errors.hpp"

namespace towerforge {

ElementaryAbelian::ElementaryAbelian(Scalar p_, std::size_t rank_) : p(p_), rank(rank_) {
  if (!is_prime(p)) throw PreconditionError("elementary abelian group needs a prime p");
  if (rank == 0) throw PreconditionError("elementary abelian group needs rank >= 1");
}

SubgroupFamily::SubgroupFamily(ElementaryAbelian ambient_, std::vector<Matrix> members_)
    : ambient(ambient_), members(std::move(members_)) {
  PrimeField f(ambient.p);
  for (std::size_t k = 0; k < members.size(); ++k) {
    const auto& m = members[k];
    if (m.cols() != ambient.rank) throw PreconditionError("member " + std::to_string(k) + " has the wrong width");
    for (Scalar x : m.data())
      if (x >= ambient.p) throw PreconditionError("member " + std::to_string(k) + " has unreduced entries");
    if (f.rank(m) != m.rows())
      throw PreconditionError("member " + std::to_string(k) + " has dependent generators");
  }
}

namespace {

using u128 = unsigned __int128;

u128 checked_mul(u128 a, u128 b) {
  if (a != 0 && b > (~u128{0}) / a) throw std::overflow_error("subgroup count overflow");
  return a * b;
}

void check_vector(Scalar p, const Vec& v, std::size_t len) {
  if (v.size() != len) throw PreconditionError("vector has the wrong length");
  for (Scalar x : v)
    if (x >= p) throw PreconditionError("vector entries must lie in [0, p)");
}

}  // namespace

std::uint64_t count_rank2_subgroups(Scalar p, std::size_t n) {
  if (!is_prime(p)) throw PreconditionError("count needs a prime p");
  if (n == 0) throw PreconditionError("count needs n >= 1");
  u128 q = 1;
  for (std::size_t k = 0; k < 2 * n; ++k) q = checked_mul(q, p);
  const u128 num = checked_mul(q - 1, q - p);
  const u128 den = u128(p * p - 1) * u128(p * p - p);
  const u128 t = num / den;
  if (t > ~std::uint64_t{0}) throw std::overflow_error("subgroup count exceeds 64 bits");
  return static_cast<std::uint64_t>(t);
}

void for_each_rank2_subgroup(Scalar p, std::size_t n, const std::function<void(const Matrix&)>& visit,
                             std::uint64_t guard) {
  if (!is_prime(p)) throw PreconditionError("enumeration needs a prime p");
  if (n == 0) throw PreconditionError("enumeration needs n >= 1");
  const std::size_t m = 2 * n;
  std::uint64_t size = 1;
  for (std::size_t k = 0; k < m; ++k) {
    size *= p;
    if (size > guard) throw GuardExceeded("p^{2n} exceeds the enumeration guard " + std::to_string(guard));
  }
  Matrix a(2, m);
  for (std::size_t c1 = 0; c1 < m; ++c1)
    for (std::size_t c2 = c1 + 1; c2 < m; ++c2) {
      std::vector<std::size_t> free;  // flat positions of free entries
      for (std::size_t col = c1 + 1; col < m; ++col)
        if (col != c2) free.push_back(col);
      for (std::size_t col = c2 + 1; col < m; ++col) free.push_back(m + col);
      a = Matrix(2, m);
      a(0, c1) = 1;
      a(1, c2) = 1;
      for_each_vector(p, free.size(), [&](const Vec& v) {
        for (std::size_t k = 0; k < free.size(); ++k) a(free[k] / m, free[k] % m) = v[k];
        visit(a);
        return true;
      });
    }
}

SubgroupFamily enumerate_rank2_subgroups(Scalar p, std::size_t n, std::uint64_t guard, std::uint64_t member_guard) {
  if (n > 0 && is_prime(p)) {
    std::uint64_t t = 0;
    try {
      t = count_rank2_subgroups(p, n);
    } catch (const std::overflow_error&) {
      t = ~std::uint64_t{0};
    }
    if (t > member_guard) throw GuardExceeded("more than " + std::to_string(member_guard) + " rank-2 subgroups");
  }
  std::vector<Matrix> out;
  for_each_rank2_subgroup(p, n, [&](const Matrix& a) { out.push_back(a); }, guard);
  std::sort(out.begin(), out.end());
  return SubgroupFamily(ElementaryAbelian(p, 2 * n), std::move(out));
}

CongruencePlan congruence_plan(Scalar p, const Vec& u, const Vec& w, std::size_t ell) {
  if (!is_prime(p)) throw PreconditionError("plan needs a prime p");
  if (u.empty() || u.size() % 2 != 0) throw PreconditionError("plan vectors must have even length 2n");
  check_vector(p, u, u.size());
  check_vector(p, w, u.size());
  PrimeField f(p);
  if (f.rank(Matrix::from_rows({u, w}, u.size())) != 2)
    throw PreconditionError("plan needs two independent vectors");

  const std::size_t n = u.size() / 2;
  auto a = [&](std::size_t k) { return u[k]; };
  auto b = [&](std::size_t k) { return u[n + k]; };
  auto x = [&](std::size_t k) { return w[k]; };
  auto y = [&](std::size_t k) { return w[n + k]; };

  CongruencePlan plan;
  plan.ell = ell;
  plan.u = u;
  plan.w = w;
  plan.c.assign(n, 0);
  plan.d.assign(n, 0);
  plan.a_exp.assign(n, 0);
  plan.b_exp.assign(n, 0);

  std::size_t i = n;
  for (std::size_t k = 0; k < n && i == n; ++k)
    if (a(k) != 0) i = k;

  if (i < n) {
    for (std::size_t j = 0; j < n; ++j) {
      plan.c[j] = j == i ? 0 : f.sub(f.mul(x(j), a(i)), f.mul(x(i), a(j)));
      plan.d[j] = f.sub(f.mul(y(j), a(i)), f.mul(x(i), b(j)));
    }
    std::size_t j = n;
    for (std::size_t k = 0; k < n && j == n; ++k)
      if (k != i && plan.c[k] != 0) j = k;
    if (j < n) {
      plan.case_tag = "1a";
      plan.j = j + 1;
      const Scalar inv = f.inv(plan.c[j]);
      for (std::size_t k = 0; k < n; ++k) {
        plan.a_exp[k] = k == i ? 0 : k == j ? 1 : f.mul(plan.c[k], inv);
        plan.b_exp[k] = f.mul(plan.d[k], inv);
      }
    } else {
      for (std::size_t k = 0; k < n && j == n; ++k)
        if (plan.d[k] != 0) j = k;
      plan.case_tag = "1b";
      plan.j = j + 1;
      const Scalar inv = f.inv(plan.d[j]);
      for (std::size_t k = 0; k < n; ++k) {
        plan.a_exp[k] = k == i ? 0 : f.mul(plan.c[k], inv);
        plan.b_exp[k] = k == j ? 1 : f.mul(plan.d[k], inv);
      }
    }
  } else {
    for (std::size_t k = 0; k < n && i == n; ++k)
      if (b(k) != 0) i = k;
    for (std::size_t j = 0; j < n; ++j) {
      plan.c[j] = f.sub(f.mul(x(j), b(i)), f.mul(y(i), a(j)));
      plan.d[j] = j == i ? 0 : f.sub(f.mul(y(j), b(i)), f.mul(y(i), b(j)));
    }
    std::size_t j = n;
    for (std::size_t k = 0; k < n && j == n; ++k)
      if (k != i && plan.d[k] != 0) j = k;
    if (j < n) {
      plan.case_tag = "2a";
      plan.j = j + 1;
      const Scalar inv = f.inv(plan.d[j]);
      for (std::size_t k = 0; k < n; ++k) {
        plan.a_exp[k] = f.mul(plan.c[k], inv);
        plan.b_exp[k] = k == i ? 0 : k == j ? 1 : f.mul(plan.d[k], inv);
      }
    } else {
      for (std::size_t k = 0; k < n && j == n; ++k)
        if (plan.c[k] != 0) j = k;
      plan.case_tag = "2b";
      plan.j = j + 1;
      const Scalar inv = f.inv(plan.c[j]);
      for (std::size_t k = 0; k < n; ++k) {
        plan.a_exp[k] = k == j ? 1 : f.mul(plan.c[k], inv);
        plan.b_exp[k] = k == i ? 0 : f.mul(plan.d[k], inv);
      }
    }
  }
  plan.i = i + 1;
  return plan;
}

std::vector<CongruencePlan> congruence_plans(const SubgroupFamily& family) {
  std::vector<CongruencePlan> out;
  out.reserve(family.members.size());
  for (std::size_t k = 0; k < family.members.size(); ++k) {
    const auto& m = family.members[k];
    if (m.rows() != 2) throw PreconditionError("congruence plans need rank-2 members");
    out.push_back(congruence_plan(family.ambient.p, m.row_vec(0), m.row_vec(1), k));
  }
  return out;
}

Subspace plan_plane(Scalar p, const CongruencePlan& plan) {
  PrimeField f(p);
  Vec v = plan.a_exp;
  v.insert(v.end(), plan.b_exp.begin(), plan.b_exp.end());
  return Subspace(f, Matrix::from_rows({plan.u, v}, plan.u.size()));
}

bool exhaustion_holds(const SubgroupFamily& family, const std::vector<CongruencePlan>& plans) {
  PrimeField f(family.ambient.p);
  std::set<std::size_t> seen;
  for (const auto& plan : plans) {
    if (plan.ell >= family.members.size()) return false;
    if (plan_plane(family.ambient.p, plan) != Subspace(f, family.members[plan.ell])) return false;
    seen.insert(plan.ell);
  }
  return seen.size() == family.members.size();
}

ExponentTables assemble_nu_exponents(const std::vector<CongruencePlan>& plans, const SubgroupFamily& family,
                                     GroupPtr phi, const std::vector<Elem>& g) {
  const Scalar p = family.ambient.p;
  if (family.ambient.rank % 2 != 0) throw PreconditionError("ambient rank must be even");
  const std::size_t n = family.ambient.rank / 2;
  if (g.size() != n) throw PreconditionError("need exactly n elements g_1..g_n");
  if (plans.size() != family.members.size()) throw PreconditionError("need one plan per family member");
  std::set<Elem> targets;
  for (Elem x : g) {
    if (x >= phi->order()) throw PreconditionError("g_k is not an element of Φ");
    if (!targets.insert(phi->inverse(x)).second)
      throw PreconditionError("labels collide: the elements g_k^{-1} are not distinct");
  }
  PrimeField f(p);
  ExponentTables t{p, phi, g, Matrix(phi->order(), plans.size()), Matrix(phi->order(), plans.size())};
  for (const auto& plan : plans) {
    if (plan.ell >= plans.size()) throw PreconditionError("plan label out of range");
    if (Subspace(f, Matrix::from_rows({plan.u, plan.w}, plan.u.size())) !=
        Subspace(f, family.members[plan.ell]))
      throw PreconditionError("plan " + std::to_string(plan.ell) + " does not match its family member");
    for (std::size_t k = 0; k < n; ++k) {
      const Elem at = phi->inverse(g[k]);
      t.s(at, plan.ell) = plan.u[k];
      t.t(at, plan.ell) = plan.u[n + k];
    }
  }
  return t;
}

Readback read_exponents(const ExponentTables& tables, const Matrix& s, const Matrix& t, Elem x, std::size_t ell) {
  Readback r;
  for (Elem gk : tables.g) {
    const Elem at = tables.phi->mul(tables.phi->inverse(gk), x);
    r.a.push_back(s(at, ell));
    r.b.push_back(t(at, ell));
  }
  return r;
}

Readback read_exponents(const ExponentTables& tables, Elem x, std::size_t ell) {
  return read_exponents(tables, tables.s, tables.t, x, ell);
}

Matrix apply_group_algebra(const ExponentTables& tables, const std::vector<Scalar>& coefficients, const Matrix& table) {
  const auto& phi = *tables.phi;
  if (coefficients.size() != phi.order()) throw PreconditionError("one coefficient per element of Φ expected");
  PrimeField f(tables.p);
  Matrix out(table.rows(), table.cols());
  for (Elem x = 0; x < phi.order(); ++x)
    for (Elem h = 0; h < phi.order(); ++h) {
      if (coefficients[h] == 0) continue;
      const Elem src = phi.mul(phi.inverse(h), x);
      for (std::size_t l = 0; l < table.cols(); ++l)
        out(x, l) = f.add(out(x, l), f.mul(coefficients[h], table(src, l)));
    }
  return out;
}

bool verify_projection_stability(const ExponentTables& tables, const IsotypicProjector& projector,
                                 const SubgroupFamily& family) {
  if (projector.module.p() != tables.p) throw PreconditionError("projector and tables use different primes");
  if (!(projector.module.group() == *tables.phi)) throw PreconditionError("projector is over a different group");
  if (tables.s.cols() != family.members.size()) throw PreconditionError("tables and family disagree on labels");
  const Matrix ps = apply_group_algebra(tables, projector.coefficients, tables.s);
  const Matrix pt = apply_group_algebra(tables, projector.coefficients, tables.t);
  const Elem e = tables.phi->identity();
  for (std::size_t l = 0; l < family.members.size(); ++l) {
    const Readback want = read_exponents(tables, e, l);
    bool found = false;
    for (std::size_t l2 = 0; l2 < family.members.size() && !found; ++l2)
      for (Elem x = 0; x < tables.phi->order() && !found; ++x) {
        const Readback got = read_exponents(tables, ps, pt, x, l2);
        found = got.a == want.a && got.b == want.b;
      }
    if (!found) return false;
  }
  return true;
}

Vec wedge(const PrimeField& f, std::span<const Scalar> x, std::span<const Scalar> y) {
  const std::size_t m = x.size();
  Vec out;
  out.reserve(m * (m - 1) / 2);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) out.push_back(f.sub(f.mul(x[i], y[j]), f.mul(x[j], y[i])));
  return out;
}

WedgeReport wedge_surjectivity(const SubgroupFamily& family) {
  const std::size_t m = family.ambient.rank;
  PrimeField f(family.ambient.p);
  WedgeReport r;
  r.required = m * (m - 1) / 2;
  Matrix rows(0, r.required);
  for (const auto& d : family.members)
    for (std::size_t a = 0; a < d.rows(); ++a)
      for (std::size_t b = a + 1; b < d.rows(); ++b) rows.append_row(wedge(f, d.row(a), d.row(b)));
  r.rank = r.required == 0 ? 0 : f.rank(rows);
  r.surjective = r.rank == r.required;
  return r;
}

std::size_t pair_member_index(std::size_t n, std::size_t i, std::size_t i2) {
  if (!(1 <= i && i < i2 && i2 <= 2 * n)) throw PreconditionError("pair index out of range");
  const std::size_t k = 2 * n * (i - 1) - (i - 1) * i / 2;
  return k + (i2 - i) - 1;
}

SpanningBasis select_spanning_basis(const SubgroupFamily& family) {
  const std::size_t m = family.ambient.rank;
  if (m < 2 || m % 2 != 0) throw PreconditionError("ambient rank must be even and positive");
  const std::size_t n = m / 2;
  const std::size_t need = n * (2 * n - 1);
  if (family.members.size() < need)
    throw PreconditionError("family needs at least n(2n-1) = " + std::to_string(need) + " members");
  PrimeField f(family.ambient.p);
  std::vector<Subspace> spans;
  for (std::size_t k = 0; k < need; ++k) spans.emplace_back(f, family.members[k]);

  SpanningBasis out;
  out.basis = Matrix(0, m);
  if (n == 1) {
    if (spans[0].dim() != 2) throw PreconditionError("B_1 is not the whole group");
    out.intersections = {spans[0], spans[0]};
    out.basis = spans[0].basis();
  } else {
    for (std::size_t i = 1; i <= m; ++i) {
      Subspace b = Subspace::full(m);
      for (std::size_t i2 = 1; i2 <= m; ++i2) {
        if (i2 == i) continue;
        b = b.intersect(f, spans[pair_member_index(n, std::min(i, i2), std::max(i, i2))]);
      }
      if (b.dim() != 1)
        throw PreconditionError("B_" + std::to_string(i) + " has dimension " + std::to_string(b.dim()) +
                                ", not cyclic of order p");
      out.intersections.push_back(b);
      out.basis.append_row(b.basis().row(0));
    }
  }
  if (f.rank(out.basis) != m) throw PreconditionError("the elements x_i do not form a basis");
  for (std::size_t i = 1; i <= m; ++i)
    for (std::size_t i2 = i + 1; i2 <= m; ++i2) out.certificates.push_back({i, i2, pair_member_index(n, i, i2)});
  return out;
}

bool certificates_prove_surjectivity(const SubgroupFamily& family, const SpanningBasis& basis) {
  const std::size_t m = family.ambient.rank;
  PrimeField f(family.ambient.p);
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  Matrix wedges(0, m * (m - 1) / 2);
  for (const auto& c : basis.certificates) {
    if (c.member >= family.members.size()) return false;
    Subspace d(f, family.members[c.member]);
    const auto xi = basis.basis.row(c.i - 1), xj = basis.basis.row(c.j - 1);
    if (!d.contains(f, xi) || !d.contains(f, xj)) return false;
    pairs.emplace(c.i, c.j);
    wedges.append_row(wedge(f, xi, xj));
  }
  if (pairs.size() != m * (m - 1) / 2) return false;
  return m < 2 || f.rank(wedges) == m * (m - 1) / 2;
}

}  // namespace towerforge
