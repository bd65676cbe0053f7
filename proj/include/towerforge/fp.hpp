#pragma once

// Dense linear algebra over a prime field F_p.
//
// Matrices are row-major with entries reduced into [0, p). Subspaces are kept
// as reduced row echelon bases (rows are basis vectors), which makes two
// subspaces equal exactly when their bases compare equal.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace towerforge {

using Scalar = std::uint32_t;
using Vec = std::vector<Scalar>;

bool is_prime(std::uint64_t n);

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<Scalar> data);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<Vec>& rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Scalar& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  Scalar operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const Scalar> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<Scalar> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  Vec row_vec(std::size_t r) const;
  Vec col_vec(std::size_t c) const;
  void append_row(std::span<const Scalar> v);

  const std::vector<Scalar>& data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
  friend auto operator<=>(const Matrix& a, const Matrix& b) {
    if (auto c = a.rows_ <=> b.rows_; c != 0) return c;
    if (auto c = a.cols_ <=> b.cols_; c != 0) return c;
    return a.data_ <=> b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Scalar> data_;
};

/// Arithmetic in F_p for a runtime prime p (p < 2^16 so products fit in 32 bits).
class PrimeField {
 public:
  explicit PrimeField(Scalar p);

  Scalar p() const { return p_; }
  Scalar reduce(std::int64_t x) const;
  Scalar add(Scalar a, Scalar b) const { return (a + b) % p_; }
  Scalar sub(Scalar a, Scalar b) const { return (a + p_ - b) % p_; }
  Scalar neg(Scalar a) const { return (p_ - a) % p_; }
  Scalar mul(Scalar a, Scalar b) const { return static_cast<Scalar>((std::uint64_t{a} * b) % p_); }
  Scalar inv(Scalar a) const;
  Scalar pow(Scalar a, std::uint64_t e) const;

  Matrix mul(const Matrix& a, const Matrix& b) const;
  Matrix add(const Matrix& a, const Matrix& b) const;
  Matrix sub(const Matrix& a, const Matrix& b) const;
  Matrix scale(const Matrix& a, Scalar s) const;
  Vec apply(const Matrix& a, std::span<const Scalar> v) const;  // a * v (column vector)
  Vec add(std::span<const Scalar> a, std::span<const Scalar> b) const;
  Vec scale(std::span<const Scalar> a, Scalar s) const;
  Matrix reduce(const Matrix& a) const;

  /// In-place reduced row echelon form; returns pivot columns. Zero rows are dropped.
  std::vector<std::size_t> rref(Matrix& m) const;
  std::size_t rank(Matrix m) const;
  std::optional<Matrix> inverse(const Matrix& m) const;
  bool invertible(const Matrix& m) const;
  /// Basis (rows) of {x : m x = 0}.
  Matrix kernel(const Matrix& m) const;
  /// One solution of m x = b, if any.
  std::optional<Vec> solve(const Matrix& m, std::span<const Scalar> b) const;
  Scalar trace(const Matrix& m) const;

 private:
  Scalar p_;
  std::vector<Scalar> inv_;
};

/// A subspace of F_p^n stored by its RREF row basis.
class Subspace {
 public:
  Subspace(std::size_t ambient_dim) : basis_(0, ambient_dim) {}
  Subspace(const PrimeField& f, Matrix rows);

  static Subspace full(std::size_t n);

  std::size_t ambient_dim() const { return basis_.cols(); }
  std::size_t dim() const { return basis_.rows(); }
  const Matrix& basis() const { return basis_; }
  const std::vector<std::size_t>& pivots() const { return pivots_; }

  bool contains(const PrimeField& f, std::span<const Scalar> v) const;
  bool contains(const PrimeField& f, const Subspace& other) const;
  /// Coordinates of v with respect to the basis rows; nullopt if v is outside.
  std::optional<Vec> coordinates(const PrimeField& f, std::span<const Scalar> v) const;
  Vec reduce_vector(const PrimeField& f, std::span<const Scalar> v) const;

  Subspace sum(const PrimeField& f, const Subspace& other) const;
  Subspace intersect(const PrimeField& f, const Subspace& other) const;

  friend bool operator==(const Subspace& a, const Subspace& b) { return a.basis_ == b.basis_; }

 private:
  Matrix basis_;
  std::vector<std::size_t> pivots_;
};

/// Visit every vector of F_p^dim in lexicographic order (odometer with the last
/// coordinate fastest). Stops early if the visitor returns false.
template <class F>
void for_each_vector(Scalar p, std::size_t dim, F&& visit) {
  Vec v(dim, 0);
  while (true) {
    if (!visit(static_cast<const Vec&>(v))) return;
    std::size_t k = dim;
    while (k > 0) {
      --k;
      if (++v[k] < p) break;
      v[k] = 0;
      if (k == 0) return;
    }
    if (dim == 0) return;
  }
}

/// Vectors whose first nonzero entry is 1: one representative per line.
template <class F>
void for_each_projective_point(Scalar p, std::size_t dim, F&& visit) {
  for (std::size_t lead = 0; lead < dim; ++lead) {
    Vec v(dim, 0);
    v[lead] = 1;
    bool stop = false;
    std::size_t tail = dim - lead - 1;
    for_each_vector(p, tail, [&](const Vec& t) {
      for (std::size_t i = 0; i < tail; ++i) v[lead + 1 + i] = t[i];
      if (!visit(static_cast<const Vec&>(v))) {
        stop = true;
        return false;
      }
      return true;
    });
    if (stop) return;
  }
}

std::string to_string(const Matrix& m);

}  // namespace towerforge
