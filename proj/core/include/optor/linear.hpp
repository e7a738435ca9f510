#pragma once

// Exact rational linear algebra over Q.

#include <gmpxx.h>

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace optor {

using Scalar = mpq_class;

/// Parses "a", "-a" or "a/b". Throws std::invalid_argument on malformed input or b == 0.
Scalar parse_scalar(std::string_view text);
std::string format_scalar(const Scalar& s);

/// Sparse vector: index -> nonzero coefficient. Zero entries are never stored.
class Vec {
 public:
  using Map = std::map<std::size_t, Scalar>;

  Vec() = default;
  static Vec unit(std::size_t i, const Scalar& c = 1);

  bool empty() const { return data_.empty(); }
  std::size_t nnz() const { return data_.size(); }
  Scalar get(std::size_t i) const;
  void set(std::size_t i, const Scalar& c);
  void add(std::size_t i, const Scalar& c);
  void axpy(const Scalar& a, const Vec& x);  // this += a*x
  Vec scaled(const Scalar& a) const;
  void negate();

  Map::const_iterator begin() const { return data_.begin(); }
  Map::const_iterator end() const { return data_.end(); }
  const Map& map() const { return data_; }

  friend bool operator==(const Vec&, const Vec&) = default;
  Vec operator+(const Vec& o) const;
  Vec operator-(const Vec& o) const;

 private:
  Map data_;
};

/// rows x cols matrix stored as sparse columns; column j is the image of basis vector j.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols, Vec{}) {}

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<std::vector<Scalar>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_.size(); }
  const Vec& col(std::size_t j) const { return cols_.at(j); }
  Vec& col(std::size_t j) { return cols_.at(j); }
  void set_col(std::size_t j, Vec v) { cols_.at(j) = std::move(v); }
  Scalar at(std::size_t i, std::size_t j) const { return cols_.at(j).get(i); }
  void set(std::size_t i, std::size_t j, const Scalar& c) { cols_.at(j).set(i, c); }

  bool is_zero() const;
  Vec apply(const Vec& x) const;
  Matrix operator*(const Matrix& o) const;
  Matrix operator+(const Matrix& o) const;
  Matrix operator-(const Matrix& o) const;
  Matrix transpose() const;
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_;
  }

  std::vector<std::vector<Scalar>> dense() const;

 private:
  std::size_t rows_ = 0;
  std::vector<Vec> cols_;
};

/// Incremental echelon basis of a span, remembering how each echelon row was
/// obtained from the generators. Generators are numbered in insertion order;
/// dependent generators are not recorded as basis members.
class Span {
 public:
  Span() = default;

  /// Returns true if v was independent of what was already in the span.
  bool add(const Vec& v);
  std::size_t rank() const { return rows_.size(); }
  bool contains(const Vec& v) const;
  /// Coordinates of v in terms of the accepted generators (by acceptance order),
  /// or nullopt if v is not in the span.
  std::optional<Vec> coords(const Vec& v) const;
  /// v minus its projection along the echelon rows.
  Vec reduce(const Vec& v) const;
  /// Leading (pivot) positions of the echelon rows.
  std::vector<std::size_t> pivots() const;
  const std::vector<Vec>& generators() const { return gens_; }

 private:
  struct Row {
    Vec v;      // leading entry 1 at the key position
    Vec combo;  // v == sum combo[g] * gens_[g]
  };
  std::map<std::size_t, Row> rows_;
  std::vector<Vec> gens_;
};

std::size_t rank(const Matrix& m);
/// Echelon-canonical kernel basis: one vector per non-pivot column j, with 1 at j and
/// zeros at the other non-pivot columns.
std::vector<Vec> kernel_basis(const Matrix& m);
/// Basis of the column space, chosen as the first independent columns.
std::vector<Vec> image_basis(const Matrix& m);
/// Basic solution of m x = b: free (non-pivot) unknowns are zero. nullopt if inconsistent.
std::optional<Vec> solve(const Matrix& m, const Vec& b);
std::optional<Matrix> inverse(const Matrix& m);
bool is_invertible(const Matrix& m);

}  // namespace optor
