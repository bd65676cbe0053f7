#include "towerforge/fp.hpp"

#include <sstream>
#include <stdexcept>
#include <utility>

namespace towerforge {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<Scalar> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) throw std::invalid_argument("matrix data size mismatch");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

Matrix Matrix::from_rows(const std::vector<Vec>& rows, std::size_t cols) {
  Matrix m(0, cols);
  for (const auto& r : rows) m.append_row(r);
  return m;
}

Vec Matrix::row_vec(std::size_t r) const {
  auto s = row(r);
  return {s.begin(), s.end()};
}

Vec Matrix::col_vec(std::size_t c) const {
  Vec v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

void Matrix::append_row(std::span<const Scalar> v) {
  if (v.size() != cols_) throw std::invalid_argument("row length mismatch");
  data_.insert(data_.end(), v.begin(), v.end());
  ++rows_;
}

PrimeField::PrimeField(Scalar p) : p_(p) {
  if (!is_prime(p) || p >= (1u << 16)) throw std::invalid_argument("PrimeField: p must be a prime below 2^16");
  inv_.assign(p, 0);
  for (Scalar a = 1; a < p; ++a) inv_[a] = pow(a, p - 2);
}

Scalar PrimeField::reduce(std::int64_t x) const {
  auto r = x % static_cast<std::int64_t>(p_);
  return static_cast<Scalar>(r < 0 ? r + p_ : r);
}

Scalar PrimeField::inv(Scalar a) const {
  if (a % p_ == 0) throw std::domain_error("inverse of zero in F_p");
  return inv_[a % p_];
}

Scalar PrimeField::pow(Scalar a, std::uint64_t e) const {
  std::uint64_t result = 1, base = a % p_;
  while (e) {
    if (e & 1) result = result * base % p_;
    base = base * base % p_;
    e >>= 1;
  }
  return static_cast<Scalar>(result);
}

Matrix PrimeField::mul(const Matrix& a, const Matrix& b) const {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      Scalar x = a(i, k);
      if (!x) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) = (c(i, j) + x * b(k, j)) % p_;
    }
  return c;
}

Matrix PrimeField::add(const Matrix& a, const Matrix& b) const {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("matrix sum shape mismatch");
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = add(a(i, j), b(i, j));
  return c;
}

Matrix PrimeField::sub(const Matrix& a, const Matrix& b) const {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("matrix difference shape mismatch");
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = sub(a(i, j), b(i, j));
  return c;
}

Matrix PrimeField::scale(const Matrix& a, Scalar s) const {
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = mul(a(i, j), s);
  return c;
}

Matrix PrimeField::reduce(const Matrix& a) const {
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) % p_;
  return c;
}

Vec PrimeField::apply(const Matrix& a, std::span<const Scalar> v) const {
  if (a.cols() != v.size()) throw std::invalid_argument("matrix-vector shape mismatch");
  Vec out(a.rows(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    std::uint64_t acc = 0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += std::uint64_t{a(i, j)} * v[j];
    out[i] = static_cast<Scalar>(acc % p_);
  }
  return out;
}

Vec PrimeField::add(std::span<const Scalar> a, std::span<const Scalar> b) const {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = add(a[i], b[i]);
  return out;
}

Vec PrimeField::scale(std::span<const Scalar> a, Scalar s) const {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = mul(a[i], s);
  return out;
}

std::vector<std::size_t> PrimeField::rref(Matrix& m) const {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  const std::size_t rows = m.rows(), cols = m.cols();
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && m(piv, c) == 0) ++piv;
    if (piv == rows) continue;
    if (piv != r)
      for (std::size_t j = 0; j < cols; ++j) std::swap(m(r, j), m(piv, j));
    Scalar s = inv(m(r, c));
    for (std::size_t j = c; j < cols; ++j) m(r, j) = mul(m(r, j), s);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m(i, c) == 0) continue;
      Scalar f = m(i, c);
      for (std::size_t j = c; j < cols; ++j) m(i, j) = sub(m(i, j), mul(f, m(r, j)));
    }
    pivots.push_back(c);
    ++r;
  }
  std::vector<Scalar> data(m.data().begin(), m.data().begin() + r * cols);
  m = Matrix(r, cols, std::move(data));
  return pivots;
}

std::size_t PrimeField::rank(Matrix m) const { return rref(m).size(); }

std::optional<Matrix> PrimeField::inverse(const Matrix& m) const {
  const std::size_t n = m.rows();
  if (m.cols() != n) throw std::invalid_argument("inverse of non-square matrix");
  if (n == 0) return Matrix(0, 0);
  Matrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j) % p_;
    aug(i, n + i) = 1;
  }
  auto piv = rref(aug);
  if (piv.size() < n || piv[n - 1] != n - 1) return std::nullopt;
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = aug(i, n + j);
  return out;
}

bool PrimeField::invertible(const Matrix& m) const { return m.rows() == m.cols() && rank(m) == m.rows(); }

Matrix PrimeField::kernel(const Matrix& m) const {
  Matrix r = reduce(m);
  auto piv = rref(r);
  const std::size_t n = m.cols();
  std::vector<bool> is_pivot(n, false);
  for (auto c : piv) is_pivot[c] = true;
  Matrix k(0, n);
  for (std::size_t free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    Vec v(n, 0);
    v[free] = 1;
    for (std::size_t i = 0; i < piv.size(); ++i) v[piv[i]] = neg(r(i, free));
    k.append_row(v);
  }
  return k;
}

std::optional<Vec> PrimeField::solve(const Matrix& m, std::span<const Scalar> b) const {
  const std::size_t n = m.cols();
  Matrix aug(m.rows(), n + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j) % p_;
    aug(i, n) = b[i] % p_;
  }
  auto piv = rref(aug);
  if (!piv.empty() && piv.back() == n) return std::nullopt;
  Vec x(n, 0);
  for (std::size_t i = 0; i < piv.size(); ++i) x[piv[i]] = aug(i, n);
  return x;
}

Scalar PrimeField::trace(const Matrix& m) const {
  Scalar t = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) t = add(t, m(i, i) % p_);
  return t;
}

Subspace::Subspace(const PrimeField& f, Matrix rows) : basis_(f.reduce(rows)) { pivots_ = f.rref(basis_); }

Subspace Subspace::full(std::size_t n) {
  Subspace s(n);
  s.basis_ = Matrix::identity(n);
  for (std::size_t i = 0; i < n; ++i) s.pivots_.push_back(i);
  return s;
}

Vec Subspace::reduce_vector(const PrimeField& f, std::span<const Scalar> v) const {
  Vec w(v.begin(), v.end());
  for (auto& x : w) x %= f.p();
  for (std::size_t i = 0; i < pivots_.size(); ++i) {
    Scalar c = w[pivots_[i]];
    if (!c) continue;
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = f.sub(w[j], f.mul(c, basis_(i, j)));
  }
  return w;
}

bool Subspace::contains(const PrimeField& f, std::span<const Scalar> v) const {
  auto w = reduce_vector(f, v);
  for (auto x : w)
    if (x) return false;
  return true;
}

bool Subspace::contains(const PrimeField& f, const Subspace& other) const {
  for (std::size_t i = 0; i < other.dim(); ++i)
    if (!contains(f, other.basis_.row(i))) return false;
  return true;
}

std::optional<Vec> Subspace::coordinates(const PrimeField& f, std::span<const Scalar> v) const {
  if (!contains(f, v)) return std::nullopt;
  Vec c(dim());
  for (std::size_t i = 0; i < pivots_.size(); ++i) c[i] = v[pivots_[i]] % f.p();
  return c;
}

Subspace Subspace::sum(const PrimeField& f, const Subspace& other) const {
  Matrix m = basis_;
  for (std::size_t i = 0; i < other.dim(); ++i) m.append_row(other.basis_.row(i));
  return Subspace(f, std::move(m));
}

Subspace Subspace::intersect(const PrimeField& f, const Subspace& other) const {
  // Zassenhaus: rows [a | a] and [b | 0]; the rows with zero left half give the intersection.
  const std::size_t n = ambient_dim();
  Matrix z(0, 2 * n);
  Vec row(2 * n);
  for (std::size_t i = 0; i < dim(); ++i) {
    for (std::size_t j = 0; j < n; ++j) row[j] = row[n + j] = basis_(i, j);
    z.append_row(row);
  }
  for (std::size_t i = 0; i < other.dim(); ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = other.basis_(i, j);
      row[n + j] = 0;
    }
    z.append_row(row);
  }
  auto piv = f.rref(z);
  Matrix out(0, n);
  for (std::size_t i = 0; i < piv.size(); ++i) {
    if (piv[i] < n) continue;
    Vec v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = z(i, n + j);
    out.append_row(v);
  }
  return Subspace(f, std::move(out));
}

std::string to_string(const Matrix& m) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << (i ? ", [" : "[");
    for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? "," : "") << m(i, j);
    os << ']';
  }
  os << ']';
  return os.str();
}

}  // namespace towerforge
