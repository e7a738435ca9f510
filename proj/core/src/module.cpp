#include "optor/module.hpp"

#include <algorithm>

namespace optor {

namespace {

// Expands a tuple of elements into basis tuples with product coefficients.
void expand(std::span<const Element> xs, std::size_t pos, std::vector<BasisRef>& cur, const Scalar& coef,
            const std::function<void(const std::vector<BasisRef>&, const Scalar&)>& fn) {
  if (pos == xs.size()) {
    fn(cur, coef);
    return;
  }
  for (const auto& [i, a] : xs[pos].v) {
    cur.push_back(BasisRef{xs[pos].key, i});
    expand(xs, pos + 1, cur, coef * a, fn);
    cur.pop_back();
  }
}

long long degree_sum(std::span<const BasisRef> xs, std::size_t from, std::size_t to) {
  long long s = 0;
  for (std::size_t j = from; j < to; ++j) s += xs[j].key.degree;
  return s;
}

}  // namespace

Vec RightModule::act_basis(const BasisRef& m, const Perm& sigma) const {
  if (sigma == identity_perm(m.key.arity)) return Vec::unit(m.index);
  throw ContractError("module '" + name_ + "' carries no symmetric-group action");
}

Key right_key(const RightModule& M, Key m, int slot, Key q) {
  if (slot < 1 || slot > m.arity)
    throw ContractError("right action slot " + std::to_string(slot) + " out of range for arity " +
                        std::to_string(m.arity));
  Key r{m.arity + q.arity - 1, m.degree + q.degree};
  if (r.arity > M.max_arity())
    throw WindowError("window overflow: arity " + std::to_string(r.arity) + " exceeds " +
                      std::to_string(M.max_arity()) + " in '" + M.name() + "'");
  return r;
}

Key left_key(const Bimodule& M, Key p, std::span<const Key> ms) {
  if (static_cast<int>(ms.size()) != p.arity)
    throw ContractError("left action: " + std::to_string(ms.size()) + " arguments for arity " +
                        std::to_string(p.arity));
  Key r{0, p.degree};
  for (const Key& k : ms) {
    r.arity += k.arity;
    r.degree += k.degree;
  }
  if (r.arity > M.max_arity())
    throw WindowError("window overflow: arity " + std::to_string(r.arity) + " exceeds " +
                      std::to_string(M.max_arity()) + " in '" + M.name() + "'");
  return r;
}

Element RightModule::right(const Element& m, int slot, const Element& q) const {
  Key r = right_key(*this, m.key, slot, q.key);
  Element out{r, {}};
  for (const auto& [i, a] : m.v)
    for (const auto& [j, b] : q.v) out.v.axpy(a * b, right_basis(BasisRef{m.key, i}, slot, BasisRef{q.key, j}));
  return out;
}

Element RightModule::diff(const Element& m) const {
  Element out{Key{m.key.arity, m.key.degree - 1}, {}};
  for (const auto& [i, a] : m.v) out.v.axpy(a, diff_basis(BasisRef{m.key, i}));
  return out;
}

Element RightModule::act(const Element& m, const Perm& sigma) const {
  Element out{m.key, {}};
  for (const auto& [i, a] : m.v) out.v.axpy(a, act_basis(BasisRef{m.key, i}, sigma));
  return out;
}

std::pair<int, int> RightModule::stored_degrees(int arity) const {
  auto degs = basis_.degrees(arity);
  if (degs.empty()) return {0, -1};
  return {degs.front(), degs.back()};
}

ChainComplex RightModule::complex(int arity) const {
  auto [lo, hi] = stored_degrees(arity);
  bool cb = complete_below(arity), ca = complete_above(arity);
  ChainComplex c = lo > hi ? ChainComplex(0, -1, {}, {}, cb, ca)
                           : complex_of(basis_, [this](const BasisRef& b) { return diff_basis(b); }, arity, lo, hi, cb, ca);
  if (!exhaustive(arity)) c.mark_partial();
  return c;
}

Element Bimodule::left(const Element& p, std::span<const Element> ms) const {
  std::vector<Key> keys;
  for (const auto& m : ms) keys.push_back(m.key);
  Key r = left_key(*this, p.key, keys);
  Element out{r, {}};
  std::vector<BasisRef> cur;
  for (const auto& [i, a] : p.v)
    expand(ms, 0, cur, a, [&](const std::vector<BasisRef>& t, const Scalar& c) {
      out.v.axpy(c, left_basis(BasisRef{p.key, i}, t));
    });
  return out;
}

Element total_right(const RightModule& M, const Element& m, std::span<const Element> qs) {
  if (static_cast<int>(qs.size()) != m.key.arity)
    throw ContractError("total right action: " + std::to_string(qs.size()) + " arguments for arity " +
                        std::to_string(m.key.arity));
  long long e = 0;
  for (std::size_t i = 0; i < qs.size(); ++i)
    for (std::size_t j = i + 1; j < qs.size(); ++j) e += static_cast<long long>(qs[i].key.degree) * qs[j].key.degree;
  Element acc = m;
  for (int s = static_cast<int>(qs.size()); s >= 1; --s) acc = M.right(acc, s, qs[s - 1]);
  if (koszul(e) < 0) acc.v.negate();
  return acc;
}

// ---- tabulated ----

TabulatedBimodule::TabulatedBimodule(std::string name, Collection basis, int max_arity, OperadPtr left,
                                     OperadPtr right) {
  name_ = std::move(name);
  basis_ = std::move(basis);
  max_arity_ = max_arity;
  left_ = std::move(left);
  right_ = std::move(right);
}

void TabulatedBimodule::set_right(const BasisRef& m, int slot, const BasisRef& q, Vec v) {
  if (v.empty())
    right_tab_.erase({m, slot, q});
  else
    right_tab_[{m, slot, q}] = std::move(v);
}

void TabulatedBimodule::set_left(const BasisRef& p, std::vector<BasisRef> ms, Vec v) {
  LeftKey k{p, std::move(ms)};
  if (v.empty())
    left_tab_.erase(k);
  else
    left_tab_[std::move(k)] = std::move(v);
}

void TabulatedBimodule::set_differential(const BasisRef& m, Vec v) {
  if (v.empty()) {
    diff_.erase(m);
    return;
  }
  diff_[m] = std::move(v);
  has_differential_ = true;
}

Vec TabulatedBimodule::right_basis(const BasisRef& m, int slot, const BasisRef& q) const {
  right_key(*this, m.key, slot, q.key);
  auto it = right_tab_.find({m, slot, q});
  return it == right_tab_.end() ? Vec{} : it->second;
}

Vec TabulatedBimodule::left_basis(const BasisRef& p, std::span<const BasisRef> ms) const {
  std::vector<Key> keys;
  for (const auto& m : ms) keys.push_back(m.key);
  left_key(*this, p.key, keys);
  auto it = left_tab_.find(LeftKey{p, std::vector<BasisRef>(ms.begin(), ms.end())});
  return it == left_tab_.end() ? Vec{} : it->second;
}

Vec TabulatedBimodule::diff_basis(const BasisRef& m) const {
  auto it = diff_.find(m);
  return it == diff_.end() ? Vec{} : it->second;
}

std::shared_ptr<TabulatedBimodule> tabulate(const Bimodule& M) {
  auto T = std::make_shared<TabulatedBimodule>(M.name(), M.basis(), M.max_arity(), M.left_operad(), M.right_operad());
  const Collection& C = M.basis();
  const Collection& QC = M.right_operad()->basis();
  const Collection& PC = M.left_operad()->basis();
  for (const Key& k : C.keys())
    for (std::size_t i = 0; i < C.dim(k); ++i) {
      BasisRef m{k, i};
      T->set_differential(m, M.diff_basis(m));
      for (const Key& qk : QC.keys()) {
        if (k.arity + qk.arity - 1 > M.max_arity()) continue;
        for (std::size_t j = 0; j < QC.dim(qk); ++j)
          for (int s = 1; s <= k.arity; ++s) {
            try {
              T->set_right(m, s, BasisRef{qk, j}, M.right_basis(m, s, BasisRef{qk, j}));
            } catch (const WindowError&) {
            }
          }
      }
    }
  Window all{M.max_arity(), C.min_degree(), C.max_degree()};
  for (const Key& pk : PC.keys()) {
    if (pk.arity > M.max_arity()) continue;
    for (std::size_t i = 0; i < PC.dim(pk); ++i)
      for_each_tuple(C, all, pk.arity, M.max_arity(), [&](const std::vector<BasisRef>& t) {
        try {
          T->set_left(BasisRef{pk, i}, t, M.left_basis(BasisRef{pk, i}, t));
        } catch (const WindowError&) {
        }
      });
  }
  T->set_unit(M.torsor_unit());
  return T;
}

// ---- canonical ----

CanonicalBimodule::CanonicalBimodule(OperadPtr Q, std::optional<Element> unit) {
  name_ = Q->name();
  basis_ = Q->basis();
  max_arity_ = Q->max_arity();
  left_ = Q;
  right_ = Q;
  symmetric_ = Q->symmetric();
  has_differential_ = Q->has_differential();
  unit_ = unit ? *unit : Q->unit();
  if (unit_->key != Key{1, 0}) throw ContractError("torsor unit must have arity 1 and degree 0");
}

Vec CanonicalBimodule::right_basis(const BasisRef& m, int slot, const BasisRef& q) const {
  return right_->compose_basis(m, slot, q);
}

Vec CanonicalBimodule::left_basis(const BasisRef& p, std::span<const BasisRef> ms) const {
  std::vector<Element> args;
  for (const auto& m : ms) args.push_back(basis_element(m));
  return total_compose(*left_, basis_element(p), args).v;
}

Vec CanonicalBimodule::diff_basis(const BasisRef& m) const { return right_->diff_basis(m); }

Vec CanonicalBimodule::act_basis(const BasisRef& m, const Perm& sigma) const { return right_->act_basis(m, sigma); }

// ---- axiom checks ----

std::vector<BasisRef> window_basis(const Collection& c, const Window& w) {
  std::vector<BasisRef> out;
  for (const Key& k : c.keys()) {
    if (k.arity > w.max_arity || k.degree < w.deg_lo || k.degree > w.deg_hi) continue;
    for (std::size_t i = 0; i < c.dim(k); ++i) out.push_back(BasisRef{k, i});
  }
  return out;
}

void for_each_tuple(const Collection& c, const Window& w, int length, int max_total,
                    const std::function<void(const std::vector<BasisRef>&)>& fn) {
  auto B = window_basis(c, w);
  std::vector<BasisRef> cur;
  std::function<void(int, int)> rec = [&](int left, int budget) {
    if (left == 0) {
      fn(cur);
      return;
    }
    for (const auto& b : B) {
      if (b.key.arity > budget) continue;
      cur.push_back(b);
      rec(left - 1, budget - b.key.arity);
      cur.pop_back();
    }
  };
  rec(length, max_total);
}

namespace {

// Runs one instance; window overflows are not violations.
template <class F>
void instance(CheckReport& r, const std::string& what, F&& f) {
  bool ok;
  try {
    ok = f();
  } catch (const WindowError&) {
    return;
  }
  if (ok)
    r.pass();
  else
    r.fail(what);
}

std::string names(const Collection& c, std::span<const BasisRef> xs) {
  std::string s;
  for (std::size_t j = 0; j < xs.size(); ++j) s += (j ? ", " : "") + c.label(xs[j]);
  return s;
}

}  // namespace

CheckReport check_right_module_axioms(const RightModule& M, const Window& w) {
  CheckReport r;
  const Operad& Q = *M.right_operad();
  const int A = std::min(w.max_arity, M.max_arity());
  Window mw{A, w.deg_lo, w.deg_hi};
  auto MB = window_basis(M.basis(), mw);
  auto QB = window_basis(Q.basis(), Window{A, Q.basis().min_degree(), Q.basis().max_degree()});
  auto mn = [&](const BasisRef& b) { return M.basis().label(b); };
  auto qn = [&](const BasisRef& b) { return Q.basis().label(b); };

  for (const auto& m : MB) {
    Element me = basis_element(m);
    instance(r, "d^2 != 0 at " + mn(m), [&] { return M.diff(M.diff(me)).is_zero(); });
    for (int i = 1; i <= m.key.arity; ++i)
      instance(r, "right unit law fails at (" + mn(m) + ", " + std::to_string(i) + ")",
               [&] { return M.right(me, i, Q.unit()) == me; });
    for (const auto& a : QB) {
      Element ae = basis_element(a);
      const int n = m.key.arity, k = a.key.arity;
      if (n + k - 1 > A) continue;
      for (int i = 1; i <= n; ++i) {
        instance(r, "right Leibniz rule fails at (" + mn(m) + ", " + std::to_string(i) + ", " + qn(a) + ")", [&] {
          Element lhs = M.diff(M.right(me, i, ae));
          Element rhs = M.right(M.diff(me), i, ae);
          rhs.key = lhs.key;
          rhs.v.axpy(koszul(m.key.degree), M.right(me, i, Q.diff(ae)).v);
          return lhs == rhs;
        });
        if (M.symmetric() && Q.symmetric()) {
          for (const auto& s : all_perms(n))
            instance(r, "right equivariance fails at (" + mn(m) + ".[" + format_perm(s) + "], " + std::to_string(i) +
                            ", " + qn(a) + ")",
                     [&] {
                       return M.right(M.act(me, s), i, ae) ==
                              M.act(M.right(me, s[i - 1], ae), block_perm_outer(s, i, k));
                     });
          for (const auto& t : all_perms(k))
            instance(r, "right equivariance fails at (" + mn(m) + ", " + std::to_string(i) + ", " + qn(a) + ".[" +
                            format_perm(t) + "])",
                     [&] { return M.right(me, i, Q.act(ae, t)) == M.act(M.right(me, i, ae), block_perm_inner(n, i, t)); });
        }
      }
      for (const auto& b : QB) {
        if (n + k + b.key.arity - 2 > A) continue;
        Element be = basis_element(b);
        for (int i = 1; i <= n; ++i) {
          for (int j = 1; j <= k; ++j)
            instance(r,
                     "right associativity fails at (" + mn(m) + ", " + std::to_string(i) + ", " + qn(a) + ", " +
                         std::to_string(j) + ", " + qn(b) + ")",
                     [&] { return M.right(M.right(me, i, ae), i - 1 + j, be) == M.right(me, i, Q.compose(ae, j, be)); });
          for (int l = i + 1; l <= n; ++l)
            instance(r,
                     "right parallel associativity fails at (" + mn(m) + ", " + std::to_string(i) + ", " + qn(a) +
                         ", " + std::to_string(l) + ", " + qn(b) + ")",
                     [&] {
                       Element lhs = M.right(M.right(me, i, ae), l - 1 + k, be);
                       Element rhs = M.right(M.right(me, l, be), i, ae);
                       if (koszul(static_cast<long long>(a.key.degree) * b.key.degree) < 0) rhs.v.negate();
                       return lhs == rhs;
                     });
        }
      }
    }
  }
  return r;
}

CheckReport check_bimodule_axioms(const Bimodule& M, const Window& w) {
  CheckReport r = check_right_module_axioms(M, w);
  const Operad& P = *M.left_operad();
  const Operad& Q = *M.right_operad();
  const Collection& C = M.basis();
  const int A = std::min(w.max_arity, M.max_arity());
  Window mw{A, w.deg_lo, w.deg_hi};
  auto MB = window_basis(C, mw);
  auto PB = window_basis(P.basis(), Window{A, P.basis().min_degree(), P.basis().max_degree()});
  auto QB = window_basis(Q.basis(), Window{A, Q.basis().min_degree(), Q.basis().max_degree()});
  auto pn = [&](const BasisRef& b) { return P.basis().label(b); };

  for (const auto& m : MB) {
    std::vector<Element> one = {basis_element(m)};
    instance(r, "left unit law fails at " + C.label(m), [&] { return M.left(P.unit(), one) == one[0]; });
  }

  auto elems = [](std::span<const BasisRef> t) {
    std::vector<Element> out;
    for (const auto& b : t) out.push_back(basis_element(b));
    return out;
  };

  for (const auto& p : PB) {
    Element pe = basis_element(p);
    const int k = p.key.arity;
    // Leibniz and compatibility with the right action
    for_each_tuple(C, mw, k, A, [&](const std::vector<BasisRef>& t) {
      auto ms = elems(t);
      std::string at = "(" + pn(p) + "; " + names(C, t) + ")";
      instance(r, "left Leibniz rule fails at " + at, [&] {
        Element lhs = M.diff(M.left(pe, ms));
        Element rhs = M.left(P.diff(pe), ms);
        rhs.key = lhs.key;
        long long e = p.key.degree;
        for (std::size_t j = 0; j < ms.size(); ++j) {
          auto mod = ms;
          mod[j] = M.diff(ms[j]);
          if (!mod[j].is_zero()) rhs.v.axpy(koszul(e), M.left(pe, mod).v);
          e += t[j].key.degree;
        }
        return lhs == rhs;
      });
      int total = 0;
      for (const auto& b : t) total += b.key.arity;
      for (const auto& q : QB) {
        if (total + q.key.arity - 1 > A) continue;
        Element qe = basis_element(q);
        int s = 0;
        for (std::size_t j = 0; j < t.size(); ++j)
          for (int sl = 1; sl <= t[j].key.arity; ++sl) {
            ++s;
            instance(r, "left and right actions do not commute at " + at + " o_" + std::to_string(s) + " " +
                            Q.basis().label(q),
                     [&] {
                       Element lhs = M.right(M.left(pe, ms), s, qe);
                       auto mod = ms;
                       mod[j] = M.right(ms[j], sl, qe);
                       Element rhs = M.left(pe, mod);
                       if (koszul(static_cast<long long>(q.key.degree) * degree_sum(t, j + 1, t.size())) < 0)
                         rhs.v.negate();
                       return lhs == rhs;
                     });
          }
      }
    });
    // associativity with the operad composition
    for (const auto& p2 : PB) {
      const int l = p2.key.arity;
      if (k + l - 1 > A) continue;
      Element p2e = basis_element(p2);
      for (int i = 1; i <= k; ++i)
        for_each_tuple(C, mw, k + l - 1, A, [&](const std::vector<BasisRef>& t) {
          auto ms = elems(t);
          instance(r,
                   "left associativity fails at (" + pn(p) + ", " + std::to_string(i) + ", " + pn(p2) + "; " +
                       names(C, t) + ")",
                   [&] {
                     Element lhs = M.left(P.compose(pe, i, p2e), ms);
                     std::vector<Element> inner(ms.begin() + (i - 1), ms.begin() + (i - 1 + l));
                     std::vector<Element> outer(ms.begin(), ms.begin() + (i - 1));
                     outer.push_back(M.left(p2e, inner));
                     outer.insert(outer.end(), ms.begin() + (i - 1 + l), ms.end());
                     Element rhs = M.left(pe, outer);
                     if (koszul(static_cast<long long>(p2.key.degree) * degree_sum(t, 0, i - 1)) < 0) rhs.v.negate();
                     return lhs == rhs;
                   });
        });
    }
  }

  if (M.torsor_unit()) {
    const Element& u = *M.torsor_unit();
    if (u.key != Key{1, 0})
      r.fail("torsor unit does not lie in arity 1, degree 0");
    else if (!M.diff(u).is_zero())
      r.fail("torsor unit is not closed");
    else
      r.pass();
  }
  return r;
}

// ---- module maps ----

Matrix ModuleMap::at(Key k) const {
  auto it = maps.find(k);
  if (it != maps.end()) return it->second;
  return Matrix(target->basis().dim(k), source->basis().dim(k));
}

Element ModuleMap::apply(const Element& x) const { return Element{x.key, at(x.key).apply(x.v)}; }

ArityChainMap ModuleMap::chain_maps(int max_arity) const {
  ArityChainMap out;
  for (int a = 1; a <= max_arity; ++a) {
    auto s = std::make_shared<ChainComplex>(source->complex(a));
    auto t = std::make_shared<ChainComplex>(target->complex(a));
    ChainMap m{s, t, {}};
    int lo = std::min(s->lo(), t->lo()), hi = std::max(s->hi(), t->hi());
    for (int k = lo; k <= hi; ++k)
      if (s->dim(k) && t->dim(k)) m.maps[k] = at(Key{a, k});
    out.emplace(a, std::move(m));
  }
  return out;
}

CheckReport check_module_map(const ModuleMap& f, const Window& w, bool left) {
  CheckReport r;
  const RightModule& S = *f.source;
  const RightModule& T = *f.target;
  const Operad& Q = *S.right_operad();
  const int A = std::min({w.max_arity, S.max_arity(), T.max_arity()});
  Window mw{A, w.deg_lo, w.deg_hi};
  auto MB = window_basis(S.basis(), mw);
  auto QB = window_basis(Q.basis(), Window{A, Q.basis().min_degree(), Q.basis().max_degree()});
  auto sn = [&](const BasisRef& b) { return S.basis().label(b); };
  for (const auto& m : MB) {
    Element me = basis_element(m);
    instance(r, "map does not commute with d at " + sn(m), [&] { return f.apply(S.diff(me)) == T.diff(f.apply(me)); });
    for (const auto& q : QB) {
      if (m.key.arity + q.key.arity - 1 > A) continue;
      Element qe = basis_element(q);
      for (int i = 1; i <= m.key.arity; ++i)
        instance(r, "map does not commute with the right action at (" + sn(m) + ", " + std::to_string(i) + ", " +
                        Q.basis().label(q) + ")",
                 [&] { return f.apply(S.right(me, i, qe)) == T.right(f.apply(me), i, qe); });
    }
  }
  if (left) {
    auto* SB = dynamic_cast<const Bimodule*>(&S);
    auto* TB = dynamic_cast<const Bimodule*>(&T);
    if (!SB || !TB) throw ContractError("left compatibility requested for a map of right modules");
    const Operad& P = *SB->left_operad();
    auto PB = window_basis(P.basis(), Window{A, P.basis().min_degree(), P.basis().max_degree()});
    for (const auto& p : PB)
      for_each_tuple(S.basis(), mw, p.key.arity, A, [&](const std::vector<BasisRef>& t) {
        std::vector<Element> ms, fms;
        for (const auto& b : t) {
          ms.push_back(basis_element(b));
          fms.push_back(f.apply(ms.back()));
        }
        instance(r, "map does not commute with the left action at (" + P.basis().label(p) + "; " + names(S.basis(), t) + ")",
                 [&] { return f.apply(SB->left(basis_element(p), ms)) == TB->left(basis_element(p), fms); });
      });
  }
  return r;
}

}  // namespace optor
