#include "optor/operad.hpp"

#include <algorithm>
#include <sstream>

namespace optor {

namespace {

std::vector<BasisRef> in_window_basis(const Collection& c, const Window& w, int max_arity) {
  std::vector<BasisRef> out;
  for (const Key& k : c.keys()) {
    if (k.arity > std::min(w.max_arity, max_arity)) continue;
    if (k.degree < w.deg_lo || k.degree > w.deg_hi) continue;
    for (std::size_t i = 0; i < c.dim(k); ++i) out.push_back(BasisRef{k, i});
  }
  return out;
}

std::string name_of(const Collection& c, const BasisRef& b) { return c.label(b); }

}  // namespace

Vec Operad::act_basis(const BasisRef& p, const Perm& sigma) const {
  if (sigma == identity_perm(p.key.arity)) return Vec::unit(p.index);
  throw ContractError("operad '" + name_ + "' carries no symmetric-group action");
}

Key composite_key(const Operad& P, Key p, int slot, Key q) {
  if (slot < 1 || slot > p.arity)
    throw ContractError("partial composition slot " + std::to_string(slot) + " out of range for arity " +
                        std::to_string(p.arity));
  Key r{p.arity + q.arity - 1, p.degree + q.degree};
  if (r.arity > P.max_arity())
    throw WindowError("window overflow: composite arity " + std::to_string(r.arity) + " exceeds " +
                      std::to_string(P.max_arity()) + " in '" + P.name() + "'");
  return r;
}

Element Operad::compose(const Element& p, int slot, const Element& q) const {
  Key r = composite_key(*this, p.key, slot, q.key);
  Element out{r, {}};
  for (const auto& [i, a] : p.v)
    for (const auto& [j, b] : q.v) out.v.axpy(a * b, compose_basis(BasisRef{p.key, i}, slot, BasisRef{q.key, j}));
  return out;
}

Element Operad::diff(const Element& p) const {
  Element out{Key{p.key.arity, p.key.degree - 1}, {}};
  for (const auto& [i, a] : p.v) out.v.axpy(a, diff_basis(BasisRef{p.key, i}));
  return out;
}

Element Operad::act(const Element& p, const Perm& sigma) const {
  if (static_cast<int>(sigma.size()) != p.key.arity) throw ContractError("action: permutation size mismatch");
  Element out{p.key, {}};
  for (const auto& [i, a] : p.v) out.v.axpy(a, act_basis(BasisRef{p.key, i}, sigma));
  return out;
}

ChainComplex Operad::complex(int arity) const {
  return complex_of(basis_, [this](const BasisRef& b) { return diff_basis(b); }, arity);
}

Element total_compose(const Operad& P, const Element& p, std::span<const Element> args) {
  if (static_cast<int>(args.size()) != p.key.arity)
    throw ContractError("total composition: " + std::to_string(args.size()) + " arguments for arity " +
                        std::to_string(p.key.arity));
  long long e = 0;
  for (std::size_t i = 0; i < args.size(); ++i)
    for (std::size_t j = i + 1; j < args.size(); ++j) e += static_cast<long long>(args[i].key.degree) * args[j].key.degree;
  Element acc = p;
  for (int s = static_cast<int>(args.size()); s >= 1; --s) acc = P.compose(acc, s, args[s - 1]);
  if (koszul(e) < 0) acc.v.negate();
  return acc;
}

CheckReport check_operad_axioms(const Operad& P, const Window& w) {
  CheckReport r;
  const Collection& C = P.basis();
  const int A = std::min(w.max_arity, P.max_arity());
  auto B = in_window_basis(C, w, A);
  auto nm = [&](const BasisRef& b) { return name_of(C, b); };
  auto fits = [&](int a) { return a <= A; };

  // unit laws
  if (P.unit().key != Key{1, 0}) r.fail("unit is not in arity 1, degree 0");
  for (const auto& p : B) {
    Element pe = basis_element(p);
    if (fits(p.key.arity)) {
      if (P.compose(P.unit(), 1, pe) == pe)
        r.pass();
      else
        r.fail("left unit law fails at " + nm(p));
    }
    for (int i = 1; i <= p.key.arity; ++i) {
      if (P.compose(pe, i, P.unit()) == pe)
        r.pass();
      else
        r.fail("right unit law fails at (" + nm(p) + ", " + std::to_string(i) + ")");
    }
  }

  // associativity, both shapes
  for (const auto& a : B)
    for (const auto& b : B) {
      if (!fits(a.key.arity + b.key.arity - 1)) continue;
      for (const auto& c : B) {
        int n = a.key.arity, m = b.key.arity;
        if (!fits(n + m + c.key.arity - 2)) continue;
        Element ae = basis_element(a), be = basis_element(b), ce = basis_element(c);
        for (int i = 1; i <= n; ++i) {
          Element ab = P.compose(ae, i, be);
          for (int j = 1; j <= m; ++j) {
            Element lhs = P.compose(ab, i - 1 + j, ce);
            Element rhs = P.compose(ae, i, P.compose(be, j, ce));
            if (lhs == rhs)
              r.pass();
            else
              r.fail("sequential associativity fails at (" + nm(a) + ", " + std::to_string(i) + ", " + nm(b) +
                     ", " + std::to_string(j) + ", " + nm(c) + ")");
          }
          for (int k = i + 1; k <= n; ++k) {
            Element lhs = P.compose(ab, k - 1 + m, ce);
            Element rhs = P.compose(P.compose(ae, k, ce), i, be);
            if (koszul(static_cast<long long>(b.key.degree) * c.key.degree) < 0) rhs.v.negate();
            if (lhs == rhs)
              r.pass();
            else
              r.fail("parallel associativity fails at (" + nm(a) + ", " + std::to_string(i) + ", " + nm(b) +
                     ", " + std::to_string(k) + ", " + nm(c) + ")");
          }
        }
      }
    }

  // differential: d^2 = 0 and Leibniz
  if (P.has_differential()) {
    for (const auto& a : B) {
      Element ae = basis_element(a);
      if (P.diff(P.diff(ae)).is_zero())
        r.pass();
      else
        r.fail("d^2 != 0 at " + nm(a));
      for (const auto& b : B) {
        if (!fits(a.key.arity + b.key.arity - 1)) continue;
        Element be = basis_element(b);
        for (int i = 1; i <= a.key.arity; ++i) {
          Element lhs = P.diff(P.compose(ae, i, be));
          Element t1 = P.compose(P.diff(ae), i, be);
          Element t2 = P.compose(ae, i, P.diff(be));
          Element rhs{lhs.key, t1.v};
          rhs.v.axpy(koszul(a.key.degree), t2.v);
          if (lhs == rhs)
            r.pass();
          else
            r.fail("Leibniz rule fails at (" + nm(a) + ", " + std::to_string(i) + ", " + nm(b) + ")");
        }
      }
    }
  }

  // symmetric-group action
  if (P.symmetric()) {
    for (const auto& p : B) {
      int n = p.key.arity;
      Element pe = basis_element(p);
      auto perms = all_perms(n);
      if (!(P.act(pe, identity_perm(n)) == pe)) r.fail("identity permutation acts nontrivially on " + nm(p));
      for (const auto& s : perms)
        for (const auto& t : perms) {
          if (P.act(P.act(pe, s), t) == P.act(pe, compose_perm(s, t)))
            r.pass();
          else
            r.fail("action is not a right action at (" + nm(p) + ", [" + format_perm(s) + "], [" + format_perm(t) +
                   "])");
        }
      if (P.has_differential())
        for (const auto& s : perms) {
          if (P.diff(P.act(pe, s)) == P.act(P.diff(pe), s))
            r.pass();
          else
            r.fail("differential is not equivariant at (" + nm(p) + ", [" + format_perm(s) + "])");
        }
      for (const auto& q : B) {
        int m = q.key.arity;
        if (!fits(n + m - 1)) continue;
        Element qe = basis_element(q);
        for (int i = 1; i <= n; ++i) {
          for (const auto& s : perms) {
            Element lhs = P.compose(P.act(pe, s), i, qe);
            Element rhs = P.act(P.compose(pe, s[i - 1], qe), block_perm_outer(s, i, m));
            if (lhs == rhs)
              r.pass();
            else
              r.fail("equivariance fails at (" + nm(p) + ".[" + format_perm(s) + "], " + std::to_string(i) + ", " +
                     nm(q) + ")");
          }
          for (const auto& t : all_perms(m)) {
            Element lhs = P.compose(pe, i, P.act(qe, t));
            Element rhs = P.act(P.compose(pe, i, qe), block_perm_inner(n, i, t));
            if (lhs == rhs)
              r.pass();
            else
              r.fail("equivariance fails at (" + nm(p) + ", " + std::to_string(i) + ", " + nm(q) + ".[" +
                     format_perm(t) + "])");
          }
        }
      }
    }
  }

  // augmentation: unital, multiplicative, kills boundaries
  if (P.augmentation()) {
    const Vec& eps = *P.augmentation();
    auto ev = [&](const Element& x) -> Scalar {
      if (x.key != Key{1, 0}) return 0;
      Scalar s = 0;
      for (const auto& [i, c] : x.v) s += c * eps.get(i);
      return s;
    };
    if (ev(P.unit()) == 1)
      r.pass();
    else
      r.fail("augmentation does not send the unit to 1");
    for (const auto& a : B) {
      if (a.key.arity != 1) continue;
      Element ae = basis_element(a);
      if (a.key.degree == 1) {
        if (ev(P.diff(ae)) == 0)
          r.pass();
        else
          r.fail("augmentation does not vanish on d(" + nm(a) + ")");
      }
      if (a.key.degree != 0) continue;
      for (const auto& b : B) {
        if (b.key != Key{1, 0}) continue;
        if (ev(P.compose(ae, 1, basis_element(b))) == ev(ae) * ev(basis_element(b)))
          r.pass();
        else
          r.fail("augmentation is not multiplicative at (" + nm(a) + ", " + nm(b) + ")");
      }
    }
  }
  return r;
}

// ---- morphisms ----

Matrix OperadMorphism::at(Key k) const {
  auto it = maps.find(k);
  if (it != maps.end()) return it->second;
  return Matrix(target->basis().dim(k), source->basis().dim(k));
}

Element OperadMorphism::apply(const Element& x) const {
  if (x.is_zero()) return Element{x.key, {}};
  return Element{x.key, at(x.key).apply(x.v)};
}

ArityChainMap OperadMorphism::chain_maps(int max_arity) const {
  ArityChainMap out;
  for (int a = 1; a <= max_arity; ++a) {
    auto s = std::make_shared<ChainComplex>(source->complex(a));
    auto t = std::make_shared<ChainComplex>(target->complex(a));
    ChainMap m{s, t, {}};
    for (int k : source->basis().degrees(a)) m.maps[k] = at(Key{a, k});
    out.emplace(a, std::move(m));
  }
  return out;
}

OperadMorphism identity_morphism(const OperadPtr& P) {
  OperadMorphism f{P, P, {}};
  for (const Key& k : P->basis().keys()) f.maps[k] = Matrix::identity(P->basis().dim(k));
  return f;
}

CheckReport check_morphism(const OperadMorphism& f, const Window& w, bool unital) {
  CheckReport r;
  const Operad& P = *f.source;
  const Operad& Q = *f.target;
  const int A = std::min({w.max_arity, P.max_arity(), Q.max_arity()});
  auto B = in_window_basis(P.basis(), w, A);
  auto nm = [&](const BasisRef& b) { return P.basis().label(b); };

  for (const Key& k : P.basis().keys()) {
    if (k.arity > A) continue;
    Matrix m = f.at(k);
    if (m.rows() != Q.basis().dim(k) || m.cols() != P.basis().dim(k))
      r.fail("component " + to_string(k) + " has wrong shape");
  }
  if (unital) {
    if (f.apply(P.unit()) == Q.unit())
      r.pass();
    else
      r.fail("unit is not preserved");
  }
  for (const auto& a : B) {
    Element ae = basis_element(a);
    Element fa = f.apply(ae);
    if (f.apply(P.diff(ae)) == Q.diff(fa))
      r.pass();
    else
      r.fail("differential not preserved at " + nm(a));
    if (P.symmetric() && Q.symmetric())
      for (const auto& s : all_perms(a.key.arity)) {
        if (f.apply(P.act(ae, s)) == Q.act(fa, s))
          r.pass();
        else
          r.fail("equivariance fails at (" + nm(a) + ", [" + format_perm(s) + "])");
      }
    for (const auto& b : B) {
      if (a.key.arity + b.key.arity - 1 > A) continue;
      Element be = basis_element(b);
      Element fb = f.apply(be);
      for (int i = 1; i <= a.key.arity; ++i) {
        if (f.apply(P.compose(ae, i, be)) == Q.compose(fa, i, fb))
          r.pass();
        else
          r.fail("composition not preserved at (" + nm(a) + ", " + std::to_string(i) + ", " + nm(b) + ")");
      }
    }
  }
  return r;
}

}  // namespace optor
