#include "towerforge/matrix_groups.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "towerforge/errors.hpp"
#include "towerforge/modrep.hpp"

namespace towerforge {

namespace {

constexpr Elem kNone = std::numeric_limits<Elem>::max();

std::uint64_t checked_pow4(std::uint64_t n) {
  if (n > (std::uint64_t{1} << 15)) throw GuardExceeded("|I|^4 does not fit in 64 bits");
  return n * n * n * n;
}

std::size_t mat_order(const FiniteLocalRing& s, const Mat2& m) {
  const Mat2 one = mat_identity(s);
  Mat2 x = m;
  std::size_t k = 1;
  while (x != one) {
    x = mat_mul(s, x, m);
    if (++k > (std::size_t{1} << 24)) throw std::logic_error("matrix has no finite order");
  }
  return k;
}

Mat2 mat_pow(const FiniteLocalRing& s, Mat2 m, std::uint64_t k) {
  Mat2 r = mat_identity(s);
  while (k) {
    if (k & 1) r = mat_mul(s, r, m);
    m = mat_mul(s, m, m);
    k >>= 1;
  }
  return r;
}

std::size_t thread_count(std::size_t requested) {
  if (requested) return requested;
  if (const char* env = std::getenv("TOWERFORGE_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
}

/// Smallest generating set found by trying subsets of size 1, 2 (and 3 for
/// small groups) in index order; greedy scan otherwise.
std::vector<Elem> small_generating_set(const FiniteGroup& g) {
  const std::size_t n = g.order();
  if (n == 1) return {};
  for (Elem a = 0; a < n; ++a)
    if (g.closure({a}).size() == n) return {a};
  for (Elem a = 0; a < n; ++a)
    for (Elem b = a + 1; b < n; ++b)
      if (g.closure({a, b}).size() == n) return {a, b};
  if (n <= 64)
    for (Elem a = 0; a < n; ++a)
      for (Elem b = a + 1; b < n; ++b)
        for (Elem c = b + 1; c < n; ++c)
          if (g.closure({a, b, c}).size() == n) return {a, b, c};
  return greedy_generating_set(g);
}

}  // namespace

Mat2 mat_identity(const FiniteLocalRing& s) { return {s.one(), 0, 0, s.one()}; }

Mat2 mat_mul(const FiniteLocalRing& s, const Mat2& x, const Mat2& y) {
  return {s.add(s.mul(x[0], y[0]), s.mul(x[1], y[2])), s.add(s.mul(x[0], y[1]), s.mul(x[1], y[3])),
          s.add(s.mul(x[2], y[0]), s.mul(x[3], y[2])), s.add(s.mul(x[2], y[1]), s.mul(x[3], y[3]))};
}

Elem mat_det(const FiniteLocalRing& s, const Mat2& x) { return s.sub(s.mul(x[0], x[3]), s.mul(x[1], x[2])); }

bool mat_invertible(const FiniteLocalRing& s, const Mat2& x) { return s.is_unit(mat_det(s, x)); }

Mat2 mat_inverse(const FiniteLocalRing& s, const Mat2& x) {
  const Elem d = mat_det(s, x);
  if (!s.is_unit(d)) throw PreconditionError("matrix is not invertible");
  // d⁻¹ = d^{|S^×|-1}; the unit group has order dividing |S| - |m_S|.
  const std::uint64_t units = s.size() - s.maximal_ideal().size();
  Elem inv = s.one(), base = d;
  for (std::uint64_t k = units - 1; k; k >>= 1) {
    if (k & 1) inv = s.mul(inv, base);
    base = s.mul(base, base);
  }
  return {s.mul(inv, x[3]), s.mul(inv, s.neg(x[1])), s.mul(inv, s.neg(x[2])), s.mul(inv, x[0])};
}

Mat2 mat_map(const RingHom& h, const Mat2& x) { return {h(x[0]), h(x[1]), h(x[2]), h(x[3])}; }

std::string mat_to_string(const FiniteLocalRing& s, const Mat2& x) {
  auto entry = [&](Elem v) {
    const Vec c = s.decode(v);
    std::string out;
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (!c[k]) continue;
      if (!out.empty()) out += "+";
      if (c[k] != 1) out += std::to_string(c[k]) + "*";
      out += s.names()[k];
    }
    return out.empty() ? std::string("0") : out;
  };
  return "[[" + entry(x[0]) + ", " + entry(x[1]) + "], [" + entry(x[2]) + ", " + entry(x[3]) + "]]";
}

CongruenceGroup::CongruenceGroup(RingPtr s, Ideal ideal, std::uint64_t guard) : s_(std::move(s)), ideal_(std::move(ideal)) {
  n_ = ideal_.size();
  order_ = checked_pow4(n_);
  if (order_ > guard) throw GuardExceeded("congruence group of order " + std::to_string(order_) + " exceeds the guard");
  local_.assign(s_->size(), kNone);
  for (std::size_t i = 0; i < n_; ++i) local_[ideal_.elements[i]] = static_cast<Elem>(i);
  add_.resize(n_ * n_);
  mul_.resize(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) {
      add_[i * n_ + j] = local_[s_->add(ideal_.elements[i], ideal_.elements[j])];
      mul_[i * n_ + j] = local_[s_->mul(ideal_.elements[i], ideal_.elements[j])];
      if (add_[i * n_ + j] == kNone || mul_[i * n_ + j] == kNone)
        throw PreconditionError("congruence group needs an ideal");
    }
  auto elementary = [&](const std::vector<Elem>& ts) {
    std::vector<Elem> gens;
    for (Elem t : ts) {
      if (t == 0) continue;
      for (std::uint64_t k = 0, stride = 1; k < 4; ++k, stride *= n_) gens.push_back(static_cast<Elem>(local_[t] * stride));
    }
    return gens;
  };
  generators_ = elementary(ideal_.generators);
  auto reached = closure(generators_);
  if (static_cast<std::uint64_t>(std::count(reached.begin(), reached.end(), 1)) != order_) {
    generators_ = elementary(ideal_.elements);
    reached = closure(generators_);
    if (static_cast<std::uint64_t>(std::count(reached.begin(), reached.end(), 1)) != order_)
      throw std::logic_error("elementary matrices do not generate the congruence group");
  }
}

Elem CongruenceGroup::mul(Elem x, Elem y) const {
  const std::uint64_t n = n_;
  const Elem a = x % n, b = (x / n) % n, c = (x / (n * n)) % n, d = static_cast<Elem>(x / (n * n * n));
  const Elem a2 = y % n, b2 = (y / n) % n, c2 = (y / (n * n)) % n, d2 = static_cast<Elem>(y / (n * n * n));
  auto A = [&](Elem u, Elem v) { return add_[u * n + v]; };
  auto M = [&](Elem u, Elem v) { return mul_[u * n + v]; };
  // [[1+a, b], [c, 1+d]]·[[1+a', b'], [c', 1+d']].
  const Elem ra = A(A(a, a2), A(M(a, a2), M(b, c2)));
  const Elem rb = A(A(b, b2), A(M(a, b2), M(b, d2)));
  const Elem rc = A(A(c, c2), A(M(c, a2), M(d, c2)));
  const Elem rd = A(A(d, d2), A(M(d, d2), M(c, b2)));
  return static_cast<Elem>(ra + n * (rb + n * (rc + n * rd)));
}

Elem CongruenceGroup::power(Elem x, std::uint64_t k) const {
  Elem r = 0;
  while (k) {
    if (k & 1) r = mul(r, x);
    x = mul(x, x);
    k >>= 1;
  }
  return r;
}

Elem CongruenceGroup::inverse(Elem x) const { return power(x, order_ - 1); }

Elem CongruenceGroup::commutator(Elem x, Elem y) const { return mul(mul(inverse(x), inverse(y)), mul(x, y)); }

Mat2 CongruenceGroup::matrix(Elem x) const {
  const auto& el = ideal_.elements;
  const std::uint64_t n = n_;
  return {s_->add(s_->one(), el[x % n]), el[(x / n) % n], el[(x / (n * n)) % n],
          s_->add(s_->one(), el[x / (n * n * n)])};
}

std::optional<Elem> CongruenceGroup::index_of(const Mat2& m) const {
  const Elem a = local_[s_->sub(m[0], s_->one())], b = local_[m[1]], c = local_[m[2]],
             d = local_[s_->sub(m[3], s_->one())];
  if (a == kNone || b == kNone || c == kNone || d == kNone) return std::nullopt;
  return static_cast<Elem>(a + n_ * (b + n_ * (c + n_ * d)));
}

std::vector<char> CongruenceGroup::closure(const std::vector<Elem>& gens) const {
  std::vector<char> in(order_, 0);
  std::vector<Elem> queue{0};
  in[0] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head)
    for (Elem g : gens) {
      const Elem y = mul(queue[head], g);
      if (!in[y]) {
        in[y] = 1;
        queue.push_back(y);
      }
    }
  return in;
}

std::vector<char> CongruenceGroup::normal_closure(const std::vector<Elem>& gens) const {
  std::vector<Elem> x = gens;
  while (true) {
    const auto h = closure(x);
    std::vector<Elem> extra;
    for (Elem g : generators_) {
      const Elem gi = inverse(g);
      for (Elem y : x) {
        const Elem c = mul(mul(gi, y), g);
        if (!h[c] && std::find(extra.begin(), extra.end(), c) == extra.end()) extra.push_back(c);
      }
    }
    if (extra.empty()) return h;
    x.insert(x.end(), extra.begin(), extra.end());
  }
}

std::vector<char> CongruenceGroup::frattini() const {
  std::vector<Elem> gens;
  for (Elem g : generators_) gens.push_back(power(g, s_->p()));
  for (std::size_t i = 0; i < generators_.size(); ++i)
    for (std::size_t j = i + 1; j < generators_.size(); ++j) gens.push_back(commutator(generators_[i], generators_[j]));
  return normal_closure(gens);
}

std::vector<char> CongruenceGroup::congruence_subgroup(const Ideal& k) const {
  std::vector<char> in_k(n_, 0);
  for (std::size_t i = 0; i < n_; ++i) in_k[i] = k.contains(ideal_.elements[i]);
  std::vector<char> out(order_, 0);
  for (std::uint64_t x = 0; x < order_; ++x) {
    std::uint64_t y = x;
    bool ok = true;
    for (int t = 0; t < 4 && ok; ++t) {
      ok = in_k[y % n_];
      y /= n_;
    }
    out[x] = ok;
  }
  return out;
}

FrattiniIdentityReport frattini_subgroup_identity(const RingPtr& s, std::uint64_t guard) {
  const CongruenceGroup g(s, s->augmentation_ideal(), guard);
  const auto f = g.frattini();
  const auto c = g.congruence_subgroup(frattini_ideal(*s));
  FrattiniIdentityReport r;
  r.gamma_order = g.order();
  r.frattini_order = static_cast<std::uint64_t>(std::count(f.begin(), f.end(), 1));
  r.congruence_order = static_cast<std::uint64_t>(std::count(c.begin(), c.end(), 1));
  r.contained = true;
  for (std::uint64_t x = 0; x < g.order(); ++x)
    if (f[x] && !c[x]) r.contained = false;
  r.holds = f == c;
  return r;
}

GammaTilde gamma_tilde(const RingPtr& r, const std::vector<Matrix>& phi_gens) {
  const Scalar p = r->p();
  const PrimeField f(p);
  if (phi_gens.empty()) throw PreconditionError("need at least one generator of the residual image");
  for (const auto& m : phi_gens)
    if (m.rows() != 2 || m.cols() != 2 || !f.invertible(f.reduce(m)))
      throw PreconditionError("residual generators must be invertible 2x2 matrices over F_p");
  std::vector<Matrix> reduced;
  for (const auto& m : phi_gens) reduced.push_back(f.reduce(m));
  auto phi = std::make_shared<const FiniteGroup>(FiniteGroup::from_matrices(p, reduced));
  GammaTilde out;
  out.r = r;
  out.phi_order = phi->order();
  if (out.phi_order % p == 0) throw PreconditionError("residual image must have order prime to p");
  const GroupModule residual(p, phi, reduced);
  out.residual_irreducible = is_irreducible(residual);
  out.absolutely_irreducible = out.residual_irreducible && end_dim(residual) == 1;

  const FiniteLocalRing& ring = *r;
  std::vector<Mat2> gens;
  for (const auto& m : reduced) {
    // Lift to an element of the same order: L^{p^a·u} with u ≡ p^{-a} mod ord(m).
    const Mat2 l{ring.from_integer(m(0, 0)), ring.from_integer(m(0, 1)), ring.from_integer(m(1, 0)),
                 ring.from_integer(m(1, 1))};
    std::size_t ord = mat_order(ring, l);
    std::size_t pa = 1;
    while (ord % p == 0) {
      ord /= p;
      pa *= p;
    }
    std::size_t u = 1;
    while ((pa * u) % ord != 1 % ord) ++u;
    gens.push_back(mat_pow(ring, l, pa * u));
  }
  // The separate lifts need not generate a copy of Φ̃; correct them by
  // elements of 1 + M₂(m_R) until they do.
  auto closes_at = [&](const std::vector<Mat2>& g, std::size_t n) {
    std::set<Mat2> seen{mat_identity(ring)};
    std::vector<Mat2> queue{mat_identity(ring)};
    for (std::size_t h = 0; h < queue.size(); ++h)
      for (const auto& x : g) {
        const Mat2 y = mat_mul(ring, queue[h], x);
        if (seen.insert(y).second) {
          if (seen.size() > n) return false;
          queue.push_back(y);
        }
      }
    return seen.size() == n;
  };
  if (!closes_at(gens, out.phi_order)) {
    const CongruenceGroup kernel_m(r, ring.maximal_ideal(), kCongruenceGuard);
    std::uint64_t space = 1;
    for (std::size_t i = 0; i < gens.size(); ++i) {
      space *= kernel_m.order();
      if (space > kCongruenceGuard) throw GuardExceeded("too many corrections for the residual lift");
    }
    std::vector<std::uint64_t> pos(gens.size(), 0);
    auto advance = [&] {
      for (std::size_t k = gens.size(); k-- > 0;) {
        if (++pos[k] < kernel_m.order()) return true;
        pos[k] = 0;
      }
      return false;
    };
    bool found = false;
    do {
      std::vector<Mat2> trial;
      for (std::size_t i = 0; i < gens.size(); ++i)
        trial.push_back(mat_mul(ring, gens[i], kernel_m.matrix(static_cast<Elem>(pos[i]))));
      if (closes_at(trial, out.phi_order)) {
        gens = std::move(trial);
        found = true;
      }
    } while (!found && advance());
    if (!found) throw PreconditionError("residual image does not lift to GL_2(R)");
  }
  const CongruenceGroup gamma_r(r, ring.augmentation_ideal(), kMaxTableOrder);
  for (Elem g : gamma_r.generators()) gens.push_back(gamma_r.matrix(g));
  auto mul = [&](const Mat2& a, const Mat2& b) { return mat_mul(ring, a, b); };
  std::pair<FiniteGroup, std::vector<Mat2>> full = [&] {
    try {
      return generate_group(mat_identity(ring), gens, mul);
    } catch (const std::runtime_error&) {
      throw GuardExceeded("the group generated over R exceeds the table size limit");
    }
  }();
  if (full.first.order() != gamma_r.order() * out.phi_order)
    throw PreconditionError("lifted residual image does not give |Γ| = |I_R|^4 |Φ|");
  const std::vector<Elem> small = small_generating_set(full.first);
  out.group = std::make_shared<const FiniteGroup>(full.first.order(), full.first.table(), small);
  out.matrices = std::move(full.second);
  for (Elem g : small) out.generator_matrices.push_back(out.matrices[g]);
  return out;
}

std::optional<std::vector<Mat2>> extend_lift(const GammaTilde& gt, const FiniteLocalRing& s,
                                             const std::vector<Mat2>& generator_images) {
  const FiniteGroup& g = *gt.group;
  const auto& gens = g.generators();
  std::vector<Mat2> img(g.order());
  std::vector<char> set(g.order(), 0);
  img[g.identity()] = mat_identity(s);
  set[g.identity()] = 1;
  std::vector<Elem> queue{g.identity()};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Elem x = queue[head];
    for (std::size_t i = 0; i < gens.size(); ++i) {
      const Elem y = g.mul(x, gens[i]);
      const Mat2 v = mat_mul(s, img[x], generator_images[i]);
      if (!set[y]) {
        set[y] = 1;
        img[y] = v;
        queue.push_back(y);
      } else if (img[y] != v) {
        return std::nullopt;
      }
    }
  }
  return img;
}

LiftSearchResult lift_search(const GammaTilde& gt, const RingHom& projection, std::size_t threads,
                             std::uint64_t guard) {
  const FiniteLocalRing& s = *projection.from;
  const FiniteLocalRing& r = *projection.to;
  if (projection.to.get() != gt.r.get()) throw PreconditionError("lift search needs the ring of the base representation");
  const Ideal j = kernel(projection);
  const std::size_t k = gt.generator_matrices.size();
  const std::uint64_t nj = checked_pow4(j.size());
  LiftSearchResult out;
  out.search_space = 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (out.search_space > guard / nj) throw GuardExceeded("lift search space |Γ_J|^k exceeds 2^24");
    out.search_space *= nj;
  }
  if (out.search_space > guard) throw GuardExceeded("lift search space |Γ_J|^k exceeds 2^24");
  const CongruenceGroup gamma_j(projection.from, j, guard);

  std::vector<Elem> least(r.size(), kNone);
  for (Elem y = 0; y < s.size(); ++y)
    if (least[projection(y)] == kNone) least[projection(y)] = y;
  // Candidate images per generator, in correction order; keep those whose
  // order divides the generator's order.
  std::vector<std::vector<std::pair<Elem, Mat2>>> candidates(k);
  for (std::size_t i = 0; i < k; ++i) {
    const Mat2& m = gt.generator_matrices[i];
    const Mat2 base{least[m[0]], least[m[1]], least[m[2]], least[m[3]]};
    const std::size_t ord = gt.group->element_order(gt.group->generators()[i]);
    for (Elem c = 0; c < nj; ++c) {
      const Mat2 v = mat_mul(s, base, gamma_j.matrix(c));
      if (mat_pow(s, v, ord) == mat_identity(s)) candidates[i].push_back({c, v});
    }
  }
  out.threads = thread_count(threads);
  std::mutex mu;
  std::optional<std::vector<std::size_t>> best;  // positions into candidates
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t first = next.fetch_add(1);
      if (first >= candidates[0].size()) return;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (best && (*best)[0] < first) return;
      }
      std::vector<std::size_t> pos(k, 0);
      pos[0] = first;
      bool empty = false;
      for (std::size_t i = 1; i < k; ++i) empty = empty || candidates[i].empty();
      if (empty) continue;
      auto advance = [&] {
        for (std::size_t t = k; t-- > 1;) {
          if (++pos[t] < candidates[t].size()) return true;
          pos[t] = 0;
        }
        return false;
      };
      do {
        std::vector<Mat2> imgs(k);
        for (std::size_t i = 0; i < k; ++i) imgs[i] = candidates[i][pos[i]].second;
        if (extend_lift(gt, s, imgs)) {
          std::lock_guard<std::mutex> lock(mu);
          if (!best || pos < *best) best = pos;
          break;
        }
      } while (advance());
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < out.threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  if (!best) {
    out.examined = out.search_space;
    return out;
  }
  out.found = true;
  std::uint64_t rank = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const auto& [c, v] = candidates[i][(*best)[i]];
    out.corrections.push_back(c);
    out.generator_images.push_back(v);
    rank = rank * nj + c;
  }
  out.examined = rank + 1;
  return out;
}

NoLiftCertificate no_lift_certificate(const RingHom& projection, const GammaTilde& gt, std::uint64_t guard) {
  const RingPtr& s = projection.from;
  const FiniteLocalRing& r = *projection.to;
  const Ideal j = kernel(projection);
  if (j.is_zero()) throw PreconditionError("J = 0: there is nothing to lift");
  const Ideal& is = s->augmentation_ideal();
  const Ideal fr = frattini_ideal(*s);
  NoLiftCertificate c;
  c.phi_order = gt.phi_order;
  c.gamma_r_order = checked_pow4(r.augmentation_ideal().size());
  c.gamma_s_order = checked_pow4(is.size());
  c.gamma_j_order = checked_pow4(j.size());
  c.ideal_containment = std::all_of(j.elements.begin(), j.elements.end(), [&](Elem x) { return fr.contains(x); });
  if (c.gamma_s_order <= guard) {
    const CongruenceGroup g(s, is, guard);
    const auto f = g.frattini();
    const std::uint64_t fsize = static_cast<std::uint64_t>(std::count(f.begin(), f.end(), 1));
    c.frattini_quotient_order = g.order() / fsize;
    bool inside = std::all_of(j.elements.begin(), j.elements.end(), [&](Elem x) { return is.contains(x); });
    if (inside) {
      const auto gj = g.congruence_subgroup(j);
      for (std::uint64_t x = 0; x < g.order() && inside; ++x)
        if (gj[x] && !f[x]) inside = false;
    }
    c.group_containment = inside;
    if (!inside) throw PreconditionError("Γ_J is not contained in [Γ_S,Γ_S]Γ_S^p");
  } else {
    if (!c.ideal_containment) throw PreconditionError("J is not contained in (I_S^2, p I_S)");
    c.frattini_quotient_order = checked_pow4(is.size() / fr.size());
  }
  c.argument.push_back("a lift restricted to Γ_R lands in Γ_S with image H, |H| <= |Γ_R| = " +
                       std::to_string(c.gamma_r_order));
  c.argument.push_back("H·Γ_J = Γ_S because Γ_S/Γ_J = Γ_R");
  c.argument.push_back("Γ_J lies in the Frattini subgroup, so H = Γ_S (Frattini quotient of order " +
                       std::to_string(c.frattini_quotient_order) + ")");
  c.argument.push_back("but |Γ_R| = " + std::to_string(c.gamma_r_order) + " < |Γ_S| = " +
                       std::to_string(c.gamma_s_order));
  return c;
}

}  // namespace towerforge
