#include "towerforge/filtration.hpp"

#include <algorithm>
#include <map>

#include "towerforge/errors.hpp"

namespace towerforge {

std::vector<FiltrationStep> central_filtration(const GroupAction& action, Scalar p) {
  if (!is_prime(p)) throw PreconditionError("p must be prime");
  if (!p_group_exponent(action.target(), p)) throw PreconditionError("central_filtration: group is not a p-group");
  if (action.actor().order() % p == 0) throw PreconditionError("central_filtration: |Φ| is divisible by p");

  const PrimeField f(p);
  GroupPtr phi = action.actor_ptr();
  GroupPtr cur = action.target_ptr();
  GroupAction cur_action = action;
  std::vector<FiltrationStep> steps;

  while (cur->order() > 1) {
    const FiniteGroup& g = *cur;
    auto z = p_torsion_of_center(g, p);

    // Greedy F_p-basis of Z in element order, and coordinates of every element.
    std::vector<Elem> basis;
    std::vector<Elem> span{g.identity()};
    for (auto x : z) {
      if (std::binary_search(span.begin(), span.end(), x)) continue;
      basis.push_back(x);
      span = g.closure(basis);
    }
    const std::size_t r = basis.size();
    std::map<Elem, Vec> coords;
    for_each_vector(p, r, [&](const Vec& c) {
      Elem x = g.identity();
      for (std::size_t i = 0; i < r; ++i) x = g.mul(x, g.power(basis[i], c[i]));
      coords[x] = c;
      return true;
    });

    std::vector<Matrix> mats;
    for (auto s : phi->generators()) {
      Matrix m(r, r);
      for (std::size_t j = 0; j < r; ++j) {
        const Vec& c = coords.at(cur_action.act(s, basis[j]));
        for (std::size_t i = 0; i < r; ++i) m(i, j) = c[i];
      }
      mats.push_back(std::move(m));
    }
    GroupModule v(p, phi, mats);

    std::optional<Subspace> best;
    std::vector<Matrix> seen;
    for_each_projective_point(p, r, [&](const Vec& x) {
      Subspace s = spin(v, x);
      if (std::find(seen.begin(), seen.end(), s.basis()) != seen.end()) return true;
      seen.push_back(s.basis());
      if (!is_irreducible(submodule_action(v, s))) return true;
      if (!best || s.basis() < best->basis()) best = s;
      return true;
    });
    if (!best) throw std::logic_error("no irreducible submodule in the centre");

    std::vector<Elem> kernel, kernel_basis;
    for (const auto& [x, c] : coords)
      if (best->contains(f, c)) kernel.push_back(x);
    std::sort(kernel.begin(), kernel.end());
    for (std::size_t i = 0; i < best->dim(); ++i) {
      const auto row = best->basis().row(i);
      Elem x = g.identity();
      for (std::size_t k = 0; k < r; ++k) x = g.mul(x, g.power(basis[k], row[k]));
      kernel_basis.push_back(x);
    }

    auto q = quotient_group(g, kernel);
    auto qptr = std::make_shared<const FiniteGroup>(q.group);
    std::vector<Elem> rep(qptr->order(), static_cast<Elem>(-1));
    for (Elem x = 0; x < g.order(); ++x)
      if (rep[q.projection[x]] == static_cast<Elem>(-1)) rep[q.projection[x]] = x;
    std::vector<Elem> table(phi->order() * qptr->order());
    for (Elem s = 0; s < phi->order(); ++s)
      for (Elem c = 0; c < qptr->order(); ++c) table[s * qptr->order() + c] = q.projection[cur_action.act(s, rep[c])];
    GroupAction q_action(phi, qptr, std::move(table));

    FiltrationStep step{cur,           qptr, q.projection, kernel, kernel_basis, best->dim(),
                        submodule_action(v, *best).action(), q_action};
    steps.push_back(std::move(step));
    cur = qptr;
    cur_action = q_action;
  }
  return steps;
}

}  // namespace towerforge
