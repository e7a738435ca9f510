#include "optor/graded.hpp"

#include <sstream>

namespace optor {

ChainComplex complex_of(const Collection& c, const BasisFn& d, int arity, int lo, int hi, bool complete_below,
                        bool complete_above) {
  std::vector<std::size_t> dims;
  std::vector<Matrix> diffs;
  for (int k = lo; k <= hi; ++k) dims.push_back(c.dim(Key{arity, k}));
  for (int k = lo + 1; k <= hi; ++k)
    diffs.push_back(matrix_of(c, Key{arity, k}, c.dim(Key{arity, k - 1}), d));
  return ChainComplex(lo, hi, std::move(dims), std::move(diffs), complete_below, complete_above);
}

ChainComplex complex_of(const Collection& c, const BasisFn& d, int arity) {
  auto degs = c.degrees(arity);
  if (degs.empty()) return ChainComplex(0, -1, {}, {}, true, true);
  return complex_of(c, d, arity, degs.front(), degs.back(), true, true);
}

Matrix matrix_of(const Collection& c, Key src, std::size_t target_dim, const BasisFn& f) {
  std::size_t n = c.dim(src);
  Matrix m(target_dim, n);
  for (std::size_t j = 0; j < n; ++j) {
    Vec v = f(BasisRef{src, j});
    if (!v.empty() && v.map().rbegin()->first >= target_dim)
      throw std::out_of_range("matrix_of: image coordinate outside target component");
    m.set_col(j, std::move(v));
  }
  return m;
}

void CheckReport::fail(std::string what) {
  ++checked;
  ++failures;
  ok = false;
  if (violations.size() < 8) violations.push_back(std::move(what));
}

void CheckReport::merge(const CheckReport& o, const std::string& prefix) {
  checked += o.checked;
  failures += o.failures;
  if (!o.ok) ok = false;
  for (const auto& v : o.violations)
    if (violations.size() < 8) violations.push_back(prefix + v);
}

std::string CheckReport::summary() const {
  std::ostringstream os;
  os << (ok ? "pass" : "FAIL") << " (" << checked << " instances checked";
  if (!ok) os << ", " << failures << " violated";
  os << ")";
  for (const auto& v : violations) os << "\n  " << v;
  return os.str();
}

}  // namespace optor
