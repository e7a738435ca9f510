#include "optor/lifting.hpp"

#include <algorithm>
#include <climits>

namespace optor {

// ---------------------------------------------------------------- splittings

Splitting split_complex(const ChainComplex& C, int k) {
  if (!C.trusted(k)) throw WindowError("homology in degree " + std::to_string(k) + " is outside the trust region");
  Splitting s;
  s.degree = k;
  const Matrix up = C.d(k + 1);
  Span bound;
  for (std::size_t j = 0; j < up.cols(); ++j)
    if (bound.add(up.col(j))) {
      s.boundaries.push_back(up.col(j));
      s.preimages.push_back(Vec::unit(j));
    }
  const Matrix down = C.d(k);
  Span image;
  for (std::size_t j = 0; j < down.cols(); ++j)
    if (image.add(down.col(j))) s.complement.push_back(Vec::unit(j));
  for (const Vec& z : kernel_basis(down))
    if (bound.add(z)) s.homology.push_back(z);
  return s;
}

namespace {

Matrix columns(std::size_t rows, const std::vector<Vec>& vs) {
  Matrix m(rows, vs.size());
  for (std::size_t j = 0; j < vs.size(); ++j) m.set_col(j, vs[j]);
  return m;
}

}  // namespace

CompatibleSplitting split_compatible(const ChainComplex& A, const ChainComplex& B, const Matrix& fk, const Matrix& fk1,
                                     int k) {
  CompatibleSplitting out;
  out.target = split_complex(B, k);
  Splitting a = split_complex(A, k);
  if (rank(fk) != B.dim(k) || rank(fk1) != B.dim(k + 1))
    throw ContractError("map is not surjective around degree " + std::to_string(k));
  // H_A: cycle preimages of the chosen H_B basis
  std::vector<Vec> cycles = kernel_basis(A.d(k));
  Matrix fz = fk * columns(A.dim(k), cycles);
  Matrix zc = columns(A.dim(k), cycles);
  Span span;
  for (const Vec& b : a.boundaries) span.add(b);
  a.homology.clear();
  for (const Vec& h : out.target.homology) {
    auto x = solve(fz, h);
    if (!x) throw ContractError("homology class in degree " + std::to_string(k) + " has no cycle preimage");
    Vec z = zc.apply(*x);
    if (!span.add(z)) throw ContractError("map is not injective on homology in degree " + std::to_string(k));
    a.homology.push_back(std::move(z));
  }
  if (span.rank() != cycles.size())
    throw ContractError("map is not injective on homology in degree " + std::to_string(k));
  // f(B_A) spans B_B by surjectivity in degree k + 1
  Span fb;
  for (const Vec& b : a.boundaries) fb.add(fk.apply(b));
  if (fb.rank() != out.target.boundaries.size())
    throw ContractError("boundaries do not map onto boundaries in degree " + std::to_string(k));
  out.source = std::move(a);
  return out;
}

// ---------------------------------------------------------------- mapping cylinder

MappingCylinder::MappingCylinder(RightModulePtr X, RightModulePtr Y, ModuleMap phi)
    : X_(std::move(X)), Y_(std::move(Y)), phi_(std::move(phi)) {
  if (X_->right_operad() != Y_->right_operad())
    throw ContractError("cylinder ends act through different operads");
  name_ = "Cyl(" + X_->name() + "," + Y_->name() + ")";
  right_ = Y_->right_operad();
  max_arity_ = std::min(X_->max_arity(), Y_->max_arity());
  has_differential_ = true;
  bool first = true;
  for (int a = 1; a <= max_arity_; ++a) {
    auto [xl, xh] = X_->stored_degrees(a);
    auto [yl, yh] = Y_->stored_degrees(a);
    const bool xe = xl > xh, ye = yl > yh;
    if (xe && ye) continue;
    const bool xc = X_->complete_above(a), yc = Y_->complete_above(a);
    int lo = xe ? yl - 1 : (ye ? xl : std::min(xl, yl - 1));
    int hi = INT_MAX;
    if (!xc && !xe) hi = std::min(hi, xh);
    if (!yc && !ye) hi = std::min(hi, yh - 1);
    if (hi == INT_MAX) hi = std::max(xe ? INT_MIN : xh, ye ? INT_MIN : yh);
    if (!xc || !yc) complete_ = false;
    bottom_ = first ? lo : std::min(bottom_, lo);
    top_ = first ? hi : std::min(top_, hi);
    first = false;
    for (int d = lo; d <= hi; ++d) {
      const Key k{a, d};
      std::vector<std::string> labels;
      for (const auto& l : X_->basis().has(k) ? X_->basis().labels(k) : std::vector<std::string>{})
        labels.push_back("x:" + l);
      for (const auto& l : Y_->basis().has(k) ? Y_->basis().labels(k) : std::vector<std::string>{})
        labels.push_back("y:" + l);
      const Key up{a, d + 1};
      for (const auto& l : Y_->basis().has(up) ? Y_->basis().labels(up) : std::vector<std::string>{})
        labels.push_back("s:" + l);
      if (!labels.empty()) basis_.set_component(k, std::move(labels));
    }
  }
}

MappingCylinder::Layout MappingCylinder::layout(Key k) const {
  Layout l;
  l.x = X_->basis().dim(k);
  l.y = Y_->basis().dim(k);
  l.s = Y_->basis().dim(Key{k.arity, k.degree + 1});
  return l;
}

bool MappingCylinder::complete_above(int arity) const {
  return X_->complete_above(arity) && Y_->complete_above(arity);
}

bool MappingCylinder::exhaustive(int arity) const { return X_->exhaustive(arity) && Y_->exhaustive(arity); }

bool MappingCylinder::complete_below(int arity) const {
  return X_->complete_below(arity) && Y_->complete_below(arity);
}

std::pair<int, int> MappingCylinder::stored_degrees(int arity) const {
  if (complete_) return RightModule::stored_degrees(arity);
  return {bottom_, top_};
}

Element MappingCylinder::inject_x(const Element& x) const { return Element{x.key, x.v}; }

Element MappingCylinder::inject_y(const Element& y) const {
  Element out{y.key, {}};
  const std::size_t off = layout(y.key).x;
  for (const auto& [i, c] : y.v) out.v.add(off + i, c);
  return out;
}

Element MappingCylinder::inject_s(const Element& y) const {
  const Key k{y.key.arity, y.key.degree - 1};
  Element out{k, {}};
  const Layout l = layout(k);
  for (const auto& [i, c] : y.v) out.v.add(l.x + l.y + i, c);
  return out;
}

Vec MappingCylinder::diff_basis(const BasisRef& m) const {
  const Layout l = layout(m.key);
  const Key below{m.key.arity, m.key.degree - 1};
  const Layout lb = layout(below);
  Vec out;
  if (m.index < l.x) return X_->diff_basis(m);
  if (m.index < l.x + l.y) {
    const BasisRef y{m.key, m.index - l.x};
    for (const auto& [i, c] : Y_->diff_basis(y)) out.add(lb.x + i, c);
    out.add(lb.x + lb.y + y.index, 1);
    return out;
  }
  const BasisRef y{Key{m.key.arity, m.key.degree + 1}, m.index - l.x - l.y};
  for (const auto& [i, c] : Y_->diff_basis(y)) out.add(lb.x + lb.y + i, -c);
  return out;
}

Vec MappingCylinder::right_basis(const BasisRef& m, int slot, const BasisRef& q) const {
  const Key rk = right_key(*this, m.key, slot, q.key);
  if (!complete_ && rk.degree > top_) throw WindowError("cylinder action leaves the stored degrees");
  const Layout l = layout(m.key);
  const Layout lr = layout(rk);
  Vec out;
  if (m.index < l.x) return X_->right_basis(m, slot, q);
  if (m.index < l.x + l.y) {
    for (const auto& [i, c] : Y_->right_basis(BasisRef{m.key, m.index - l.x}, slot, q)) out.add(lr.x + i, c);
    return out;
  }
  const BasisRef y{Key{m.key.arity, m.key.degree + 1}, m.index - l.x - l.y};
  for (const auto& [i, c] : Y_->right_basis(y, slot, q)) out.add(lr.x + lr.y + i, c);
  return out;
}

ModuleMap cylinder_p1(const std::shared_ptr<const MappingCylinder>& F) {
  ModuleMap p{F, F->target(), {}};
  for (const Key& k : F->basis().keys()) {
    const auto l = F->layout(k);
    Matrix m(l.y, l.x + l.y + l.s);
    if (l.x) {
      const Matrix phi = F->phi().at(k);
      for (std::size_t j = 0; j < l.x; ++j) m.set_col(j, phi.col(j));
    }
    for (std::size_t i = 0; i < l.y; ++i) m.set(i, l.x + i, 1);
    p.maps[k] = std::move(m);
  }
  return p;
}

ModuleMap cylinder_p2(const std::shared_ptr<const MappingCylinder>& F) {
  ModuleMap p{F, F->source(), {}};
  for (const Key& k : F->basis().keys()) {
    const auto l = F->layout(k);
    Matrix m(l.x, l.x + l.y + l.s);
    for (std::size_t i = 0; i < l.x; ++i) m.set(i, i, 1);
    p.maps[k] = std::move(m);
  }
  return p;
}

ModuleMap compose(const ModuleMap& f, const ModuleMap& g) {
  ModuleMap out{g.source, f.target, {}};
  for (const auto& [k, m] : g.maps) out.maps[k] = f.at(k) * m;
  return out;
}


// ---------------------------------------------------------------- lifting

namespace {

// d s = s d and s(x o q) = s(x) o q for every instance that stays within max_degree.
void check_partial_map(const ModuleMap& s, int max_degree, CheckReport& r) {
  const RightModule& N = *s.source;
  const RightModule& A = *s.target;
  const Operad& Q = *N.right_operad();
  auto QB = window_basis(Q.basis(), Window{N.max_arity(), Q.basis().min_degree(), Q.basis().max_degree()});
  for (const auto& [k, m] : s.maps) {
    for (std::size_t i = 0; i < N.basis().dim(k); ++i) {
      const Element x = basis_element(BasisRef{k, i});
      const Element sx = s.apply(x);
      if (A.diff(sx) == s.apply(N.diff(x)))
        r.pass();
      else
        r.fail("map does not commute with d at " + N.basis().label(BasisRef{k, i}));
      for (const auto& q : QB) {
        if (k.degree + q.key.degree > max_degree || k.arity + q.key.arity - 1 > N.max_arity()) continue;
        for (int j = 1; j <= k.arity; ++j) {
          if (s.apply(N.right(x, j, basis_element(q))) == A.right(sx, j, basis_element(q)))
            r.pass();
          else
            r.fail("map does not commute with the right action at (" + N.basis().label(BasisRef{k, i}) + ", " +
                   std::to_string(j) + ", " + Q.basis().label(q) + ")");
        }
      }
    }
  }
}

}  // namespace

LiftResult lift(const LiftProblem& p) {
  const Resolution& N = *p.N;
  const RightModule& A = *p.f.source;
  const RightModule& B = *p.f.target;
  if (p.first_value && !p.first) throw ContractError("a prescribed value needs its generator");
  LiftResult out{ModuleMap{p.N, p.f.source, {}}, generator_filtration(N, p.max_degree, p.first), {}};
  const GeneratorFiltration& F = out.filtration;
  if (!F.hypothesis.ok) throw ContractError("filtration hypothesis fails: " + F.hypothesis.first());

  for (const Key& k : B.basis().keys()) {
    if (k.degree > p.max_degree || k.arity > N.max_arity()) continue;
    if (rank(p.f.at(k)) != B.basis().dim(k)) throw ContractError("map is not surjective in " + to_string(k));
  }

  std::map<int, ChainComplex> complexes;
  auto complex = [&](int a) -> const ChainComplex& {
    auto it = complexes.find(a);
    if (it == complexes.end()) it = complexes.emplace(a, A.complex(a)).first;
    return it->second;
  };
  // cycles of A in a component, ordered homology part first when the splitting is trusted
  std::map<Key, Matrix> cycles;
  auto cycle_basis = [&](Key k) -> const Matrix& {
    auto it = cycles.find(k);
    if (it != cycles.end()) return it->second;
    const ChainComplex& C = complex(k.arity);
    if (k.degree > C.hi() && !C.complete_above())
      throw WindowError("lift needs degree " + std::to_string(k.degree) + " of " + A.name());
    std::vector<Vec> zs;
    try {
      CompatibleSplitting sp =
          split_compatible(C, B.complex(k.arity), p.f.at(k), p.f.at(Key{k.arity, k.degree + 1}), k.degree);
      zs = sp.source.homology;
      zs.insert(zs.end(), sp.source.boundaries.begin(), sp.source.boundaries.end());
    } catch (const WindowError&) {
      zs = kernel_basis(C.d(k.degree));
    }
    return cycles.emplace(k, columns(C.dim(k.degree), zs)).first->second;
  };

  std::vector<Element> values;
  auto on_skeleton = [&](const Element& w) {
    Element r{w.key, {}};
    if (w.is_zero()) return r;
    auto c = F.coords(w.key, w.v);
    if (!c) throw ContractError("skeleton combination outside the generators in " + to_string(w.key));
    for (const auto& [g, a] : *c) {
      if (g >= values.size()) throw ContractError("generator used before it was lifted");
      r.v.axpy(a, values[g].v);
    }
    return r;
  };
  auto on_element = [&](const Element& x) {
    Element r{x.key, {}};
    for (const auto& [leaves, w] : N.decompose(x)) {
      std::vector<Element> qs;
      for (const auto& q : leaves) qs.push_back(basis_element(q));
      Element t = total_right(A, on_skeleton(w), qs);
      if (!t.is_zero()) {
        r.key = t.key;
        r.v.axpy(1, t.v);
      }
    }
    return r;
  };

  for (std::size_t gi = 0; gi < F.generators.size(); ++gi) {
    const Generator& gen = F.generators[gi];
    const Element v{gen.key, gen.skeleton};
    if (gi == 0 && p.first_value) {
      values.push_back(*p.first_value);
      continue;
    }
    const ChainComplex& C = complex(gen.key.arity);
    Element sdv = on_element(N.diff(v));
    Vec c1;
    if (!sdv.is_zero()) {
      auto c = solve(C.d(gen.key.degree), sdv.v);
      if (!c) throw ContractError("image of d(v) is not a boundary in " + to_string(gen.key));
      c1 = *c;
    }
    const Matrix fk = p.f.at(gen.key);
    Vec y = p.g.apply(v).v - fk.apply(c1);
    const Matrix& Z = cycle_basis(gen.key);
    auto x = solve(fk * Z, y);
    if (!x) throw ContractError("no cycle lifts the remaining value in " + to_string(gen.key));
    values.push_back(Element{gen.key, Z.apply(*x) + c1});
  }

  for (const Key& k : N.basis().keys()) {
    if (k.degree > p.max_degree) continue;
    Matrix m(A.basis().dim(k), N.basis().dim(k));
    for (std::size_t i = 0; i < m.cols(); ++i) m.set_col(i, on_element(basis_element(BasisRef{k, i})).v);
    out.s.maps[k] = std::move(m);
  }

  CheckReport& r = out.verified;
  for (const auto& [k, m] : out.s.maps) {
    if (p.f.at(k) * m == p.g.at(k))
      r.pass();
    else
      r.fail("f s differs from g in " + to_string(k));
  }
  check_partial_map(out.s, p.max_degree, r);
  return out;
}

ModuleMap right_unit_map(const BimodulePtr& M, const RightModulePtr& Q, int max_degree) {
  if (!M->torsor_unit()) throw ContractError("bimodule '" + M->name() + "' has no torsor unit");
  const Element& u = *M->torsor_unit();
  ModuleMap q{Q, M, {}};
  for (const Key& k : Q->basis().keys()) {
    if (k.degree > max_degree || k.arity > M->max_arity()) continue;
    Matrix m(M->basis().dim(k), Q->basis().dim(k));
    for (std::size_t i = 0; i < m.cols(); ++i) m.set_col(i, M->right(u, 1, basis_element(BasisRef{k, i})).v);
    q.maps[k] = std::move(m);
  }
  return q;
}

Retraction retraction_mu(const ResolutionPtr& R, int max_degree) {
  const Element u = canonical_unit_lift(*R);
  auto Qmod = std::make_shared<CanonicalBimodule>(R->right_operad());
  const int qtop = R->finite() ? max_degree + 1 : R->top_degree();
  Retraction out;
  out.q = right_unit_map(R, Qmod, qtop);
  auto F = std::make_shared<MappingCylinder>(Qmod, R, out.q);
  out.cylinder = F;
  if (!R->finite() && F->top_degree() < max_degree)
    throw WindowError("retraction through degree " + std::to_string(max_degree) + " needs the resolution to degree " +
                      std::to_string(max_degree + 1));
  ModuleMap id{R, R, {}};
  for (const Key& k : R->basis().keys())
    if (k.degree <= max_degree) id.maps[k] = Matrix::identity(R->basis().dim(k));
  LiftProblem prob{R, cylinder_p1(F), id, max_degree, u, F->inject_x(R->right_operad()->unit())};
  try {
    out.lift = lift(prob);
  } catch (const ContractError& e) {
    throw ContractError(std::string("unit normalization impossible: ") + e.what());
  }
  out.mu = compose(cylinder_p2(F), out.lift.s);
  CheckReport& r = out.verified;
  for (const auto& [k, m] : out.q.maps) {
    if (k.degree > max_degree) continue;
    if (out.mu.at(k) * m == Matrix::identity(Qmod->basis().dim(k)))
      r.pass();
    else
      r.fail("mu q is not the identity in " + to_string(k));
  }
  check_partial_map(out.mu, max_degree, r);
  return out;
}

}  // namespace optor
