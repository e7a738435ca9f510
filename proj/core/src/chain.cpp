#include "optor/chain.hpp"

#include <sstream>

namespace optor {

ChainComplex::ChainComplex(int lo, int hi, std::vector<std::size_t> dims, std::vector<Matrix> diffs,
                           bool complete_below, bool complete_above)
    : lo_(lo),
      hi_(hi),
      dims_(std::move(dims)),
      diffs_(std::move(diffs)),
      complete_below_(complete_below),
      complete_above_(complete_above) {
  if (hi_ < lo_ - 1) throw std::invalid_argument("chain complex: empty range must be hi = lo - 1");
  if (dims_.size() != static_cast<std::size_t>(hi_ - lo_ + 1))
    throw std::invalid_argument("chain complex: dims size mismatch");
  std::size_t nd = hi_ >= lo_ ? static_cast<std::size_t>(hi_ - lo_) : 0;
  if (diffs_.size() != nd) throw std::invalid_argument("chain complex: differential count mismatch");
  for (int k = lo_ + 1; k <= hi_; ++k) {
    const Matrix& m = diffs_[k - lo_ - 1];
    if (m.rows() != dim(k - 1) || m.cols() != dim(k))
      throw std::invalid_argument("chain complex: d_" + std::to_string(k) + " has wrong shape");
  }
}

std::size_t ChainComplex::dim(int k) const {
  if (k < lo_ || k > hi_) return 0;
  return dims_[k - lo_];
}

Matrix ChainComplex::d(int k) const {
  if (k > lo_ && k <= hi_) return diffs_[k - lo_ - 1];
  if (k == lo_ && complete_below_) return Matrix(0, dim(k));
  if (k == hi_ + 1 && complete_above_) return Matrix(dim(hi_), 0);
  if (k < lo_ && complete_below_) return Matrix(0, 0);
  if (k > hi_ + 1 && complete_above_) return Matrix(0, 0);
  throw WindowError("differential d_" + std::to_string(k) + " lies outside the enumerated range");
}

bool ChainComplex::trusted(int k) const {
  if (partial_) return false;
  bool below_ok = k > lo_ || complete_below_;
  bool above_ok = k < hi_ || complete_above_;
  if (k < lo_) return complete_below_;
  if (k > hi_) return complete_above_;
  return below_ok && above_ok;
}

std::vector<int> ChainComplex::d_squared_violations() const {
  std::vector<int> bad;
  for (int k = lo_ + 2; k <= hi_; ++k)
    if (!(d(k - 1) * d(k)).is_zero()) bad.push_back(k);
  return bad;
}

// ---- Homology ----

Homology::Homology(const ChainComplex& c, int k) : degree_(k) {
  if (!c.trusted(k))
    throw WindowError("homology in degree " + std::to_string(k) + " is outside the trust region");
  d_out_ = c.d(k);
  Matrix d_in = c.d(k + 1);
  auto z = kernel_basis(d_out_);
  auto b = image_basis(d_in);
  cycles_ = z.size();
  boundaries_ = b.size();
  for (const auto& v : b) span_.add(v);
  for (const auto& v : z)
    if (span_.add(v)) reps_.push_back(v);
}

bool Homology::is_cycle(const Vec& v) const { return d_out_.apply(v).empty(); }

bool Homology::is_boundary(const Vec& v) const {
  auto c = span_.coords(v);
  if (!c) return false;
  for (const auto& [g, _] : *c)
    if (g >= boundaries_) return false;
  return true;
}

Vec Homology::project(const Vec& cycle) const {
  if (!is_cycle(cycle)) throw ContractError("projection to homology of a non-cycle");
  auto c = span_.coords(cycle);
  if (!c) throw ContractError("cycle not in span of boundaries and representatives");
  Vec out;
  for (const auto& [g, coef] : *c)
    if (g >= boundaries_) out.set(g - boundaries_, coef);
  return out;
}

// ---- ChainMap ----

Matrix ChainMap::at(int k) const {
  auto it = maps.find(k);
  if (it != maps.end()) return it->second;
  std::size_t s = source ? source->dim(k) : 0;
  std::size_t t = target ? target->dim(k) : 0;
  if (s == 0 || t == 0) return Matrix(t, s);
  throw WindowError("chain map not stored in degree " + std::to_string(k));
}

std::vector<int> ChainMap::commutation_violations() const {
  std::vector<int> bad;
  for (const auto& [k, m] : maps) {
    if (!maps.count(k - 1)) {
      if (source->dim(k - 1) != 0 && target->dim(k - 1) != 0) continue;
    }
    Matrix lhs, rhs;
    try {
      lhs = at(k - 1) * source->d(k);
      rhs = target->d(k) * m;
    } catch (const WindowError&) {
      continue;
    }
    if (!(lhs == rhs)) bad.push_back(k);
  }
  return bad;
}

Matrix induced_homology_map(const ChainMap& f, int k) {
  if (!f.commutation_violations().empty()) throw ContractError("induced homology map of a non-chain map");
  Homology hs(*f.source, k);
  Homology ht(*f.target, k);
  Matrix fk = f.at(k);
  Matrix out(ht.dim(), hs.dim());
  for (std::size_t j = 0; j < hs.dim(); ++j) out.set_col(j, ht.project(fk.apply(hs.representatives()[j])));
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::Unverifiable: return "unverifiable";
  }
  return "?";
}

std::string QuasiIsoReport::summary() const {
  std::ostringstream os;
  os << (holds ? "quasi-isomorphism" : "not a quasi-isomorphism") << " (window-relative)";
  for (const auto& e : entries) {
    os << "\n  arity " << e.arity << " degree " << e.degree << ": " << to_string(e.verdict);
    if (e.verdict != Verdict::Unverifiable) os << " [H dims " << e.source_dim << " -> " << e.target_dim << "]";
  }
  return os.str();
}

QuasiIsoReport is_quasi_iso(const ArityChainMap& f, const Window& w) {
  if (!f.empty()) {
    for (const auto& [a, m] : f)
      if (!m.commutation_violations().empty())
        throw ContractError("is_quasi_iso: arity " + std::to_string(a) + " component is not a chain map");
  }
  QuasiIsoReport r;
  r.holds = true;
  bool any_trusted = false;
  for (const auto& [a, m] : f) {
    if (a > w.max_arity) continue;
    for (int k = w.deg_lo; k <= w.deg_hi; ++k) {
      DegreeVerdict e{a, k, Verdict::Unverifiable, 0, 0};
      if (m.source->trusted(k) && m.target->trusted(k)) {
        any_trusted = true;
        Matrix h = induced_homology_map(m, k);
        e.source_dim = h.cols();
        e.target_dim = h.rows();
        e.verdict = is_invertible(h) ? Verdict::Holds : Verdict::Fails;
        if (e.verdict == Verdict::Fails) r.holds = false;
      }
      r.entries.push_back(e);
    }
  }
  if (!any_trusted) throw WindowError("is_quasi_iso: empty trust region");
  return r;
}

}  // namespace optor
