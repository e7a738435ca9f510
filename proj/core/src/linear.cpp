#include "optor/linear.hpp"

#include <cctype>

namespace optor {

Scalar parse_scalar(std::string_view text) {
  auto is_int = [](std::string_view s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
  };
  auto slash = text.find('/');
  std::string num(text.substr(0, slash));
  if (!is_int(num)) throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
  if (num[0] == '+') num.erase(0, 1);
  if (slash == std::string_view::npos) return Scalar(mpz_class(num));
  std::string den(text.substr(slash + 1));
  if (!is_int(den) || den[0] == '-' || den[0] == '+')
    throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
  mpz_class d(den);
  if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  Scalar r(mpz_class(num), d);
  r.canonicalize();
  return r;
}

std::string format_scalar(const Scalar& s) { return s.get_str(); }

// ---- Vec ----

Vec Vec::unit(std::size_t i, const Scalar& c) {
  Vec v;
  v.set(i, c);
  return v;
}

Scalar Vec::get(std::size_t i) const {
  auto it = data_.find(i);
  return it == data_.end() ? Scalar(0) : it->second;
}

void Vec::set(std::size_t i, const Scalar& c) {
  if (c == 0)
    data_.erase(i);
  else
    data_[i] = c;
}

void Vec::add(std::size_t i, const Scalar& c) {
  if (c == 0) return;
  auto [it, inserted] = data_.try_emplace(i, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) data_.erase(it);
  }
}

void Vec::axpy(const Scalar& a, const Vec& x) {
  if (a == 0) return;
  for (const auto& [i, c] : x.data_) add(i, a * c);
}

Vec Vec::scaled(const Scalar& a) const {
  Vec r;
  if (a == 0) return r;
  for (const auto& [i, c] : data_) r.data_.emplace_hint(r.data_.end(), i, a * c);
  return r;
}

void Vec::negate() {
  for (auto& [i, c] : data_) c = -c;
}

Vec Vec::operator+(const Vec& o) const {
  Vec r = *this;
  r.axpy(1, o);
  return r;
}

Vec Vec::operator-(const Vec& o) const {
  Vec r = *this;
  r.axpy(-1, o);
  return r;
}

// ---- Matrix ----

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.cols_[i].set(i, 1);
  return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<Scalar>>& rows) {
  std::size_t nc = rows.empty() ? 0 : rows[0].size();
  Matrix m(rows.size(), nc);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != nc) throw std::invalid_argument("ragged matrix rows");
    for (std::size_t j = 0; j < nc; ++j) m.set(i, j, rows[i][j]);
  }
  return m;
}

bool Matrix::is_zero() const {
  for (const auto& c : cols_)
    if (!c.empty()) return false;
  return true;
}

Vec Matrix::apply(const Vec& x) const {
  Vec r;
  for (const auto& [j, c] : x) r.axpy(c, cols_.at(j));
  return r;
}

Matrix Matrix::operator*(const Matrix& o) const {
  if (cols() != o.rows()) throw std::invalid_argument("matrix product shape mismatch");
  Matrix r(rows_, o.cols());
  for (std::size_t j = 0; j < o.cols(); ++j) r.cols_[j] = apply(o.cols_[j]);
  return r;
}

Matrix Matrix::operator+(const Matrix& o) const {
  if (rows_ != o.rows_ || cols() != o.cols()) throw std::invalid_argument("matrix sum shape mismatch");
  Matrix r = *this;
  for (std::size_t j = 0; j < cols(); ++j) r.cols_[j].axpy(1, o.cols_[j]);
  return r;
}

Matrix Matrix::operator-(const Matrix& o) const {
  if (rows_ != o.rows_ || cols() != o.cols()) throw std::invalid_argument("matrix sum shape mismatch");
  Matrix r = *this;
  for (std::size_t j = 0; j < cols(); ++j) r.cols_[j].axpy(-1, o.cols_[j]);
  return r;
}

Matrix Matrix::transpose() const {
  Matrix r(cols(), rows_);
  for (std::size_t j = 0; j < cols(); ++j)
    for (const auto& [i, c] : cols_[j]) r.cols_[i].set(j, c);
  return r;
}

std::vector<std::vector<Scalar>> Matrix::dense() const {
  std::vector<std::vector<Scalar>> d(rows_, std::vector<Scalar>(cols(), Scalar(0)));
  for (std::size_t j = 0; j < cols(); ++j)
    for (const auto& [i, c] : cols_[j]) d[i][j] = c;
  return d;
}

// ---- Span ----

namespace {

// Eliminates pivot positions of v (and mirrors the operations on combo) in
// increasing position order. Row updates only touch positions >= their pivot,
// so one forward sweep suffices.
template <class Rows>
void eliminate(const Rows& rows, Vec& v, Vec* combo) {
  std::size_t pos = 0;
  while (true) {
    const auto& m = v.map();
    auto it = m.lower_bound(pos);
    while (it != m.end() && rows.find(it->first) == rows.end()) ++it;
    if (it == m.end()) return;
    std::size_t p = it->first;
    Scalar c = it->second;
    const auto& row = rows.at(p);
    v.axpy(-c, row.v);
    if (combo) combo->axpy(-c, row.combo);
    pos = p + 1;
  }
}

}  // namespace

bool Span::add(const Vec& v) {
  Vec r = v;
  Vec combo = Vec::unit(gens_.size());
  eliminate(rows_, r, &combo);
  if (r.empty()) return false;
  Scalar lead = r.begin()->second;
  std::size_t p = r.begin()->first;
  Scalar inv = 1 / lead;
  rows_.emplace(p, Row{r.scaled(inv), combo.scaled(inv)});
  gens_.push_back(v);
  return true;
}

Vec Span::reduce(const Vec& v) const {
  Vec r = v;
  eliminate(rows_, r, nullptr);
  return r;
}

bool Span::contains(const Vec& v) const { return reduce(v).empty(); }

std::optional<Vec> Span::coords(const Vec& v) const {
  Vec r = v;
  Vec combo;
  eliminate(rows_, r, &combo);
  if (!r.empty()) return std::nullopt;
  combo.negate();
  return combo;
}

std::vector<std::size_t> Span::pivots() const {
  std::vector<std::size_t> p;
  p.reserve(rows_.size());
  for (const auto& [k, _] : rows_) p.push_back(k);
  return p;
}

// ---- matrix-level helpers ----

namespace {

struct ColumnSpan {
  Span span;
  std::vector<std::size_t> accepted;  // accepted generator -> column index
  std::vector<std::size_t> dependent;
};

ColumnSpan column_span(const Matrix& m) {
  ColumnSpan cs;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    if (cs.span.add(m.col(j)))
      cs.accepted.push_back(j);
    else
      cs.dependent.push_back(j);
  }
  return cs;
}

}  // namespace

std::size_t rank(const Matrix& m) { return column_span(m).span.rank(); }

std::vector<Vec> kernel_basis(const Matrix& m) {
  auto cs = column_span(m);
  std::vector<Vec> out;
  for (std::size_t j : cs.dependent) {
    auto c = cs.span.coords(m.col(j));
    Vec k = Vec::unit(j);
    for (const auto& [g, coef] : *c) k.add(cs.accepted[g], -coef);
    out.push_back(std::move(k));
  }
  return out;
}

std::vector<Vec> image_basis(const Matrix& m) {
  auto cs = column_span(m);
  std::vector<Vec> out;
  for (std::size_t j : cs.accepted) out.push_back(m.col(j));
  return out;
}

std::optional<Vec> solve(const Matrix& m, const Vec& b) {
  auto cs = column_span(m);
  auto c = cs.span.coords(b);
  if (!c) return std::nullopt;
  Vec x;
  for (const auto& [g, coef] : *c) x.set(cs.accepted[g], coef);
  return x;
}

std::optional<Matrix> inverse(const Matrix& m) {
  if (m.rows() != m.cols()) return std::nullopt;
  auto cs = column_span(m);
  if (cs.span.rank() != m.cols()) return std::nullopt;
  Matrix inv(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto c = cs.span.coords(Vec::unit(i));
    Vec x;
    for (const auto& [g, coef] : *c) x.set(cs.accepted[g], coef);
    inv.set_col(i, std::move(x));
  }
  return inv;
}

bool is_invertible(const Matrix& m) { return m.rows() == m.cols() && rank(m) == m.rows(); }

}  // namespace optor
