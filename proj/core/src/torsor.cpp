#include "optor/torsor.hpp"

#include <algorithm>
#include <sstream>

namespace optor {

namespace {

ArityChainMap chain_of(const Operad& P, const RightModule& M, const std::map<Key, Matrix>& mats, int A) {
  ArityChainMap out;
  for (int a = 1; a <= A; ++a) {
    auto s = std::make_shared<ChainComplex>(P.complex(a));
    auto t = std::make_shared<ChainComplex>(M.complex(a));
    ChainMap m{s, t, {}};
    for (int k : P.basis().degrees(a)) {
      if (!t->dim(k)) continue;
      auto it = mats.find(Key{a, k});
      m.maps[k] = it != mats.end() ? it->second : Matrix(t->dim(k), s->dim(k));
    }
    out.emplace(a, std::move(m));
  }
  return out;
}

std::string describe(const Matrix& m) {
  std::size_t r = rank(m);
  if (r < m.cols()) return "not injective";
  if (r < m.rows()) return "not surjective";
  return "invertible";
}

}  // namespace

UnitMaps unit_maps(const Bimodule& M, const Window& w) {
  if (!M.torsor_unit()) throw ContractError("bimodule '" + M.name() + "' has no torsor unit");
  const Element& u = *M.torsor_unit();
  if (u.key != Key{1, 0}) throw ContractError("torsor unit must have arity 1 and degree 0");
  if (!M.diff(u).is_zero()) throw ContractError("torsor unit is not closed");
  const Operad& P = *M.left_operad();
  const Operad& Q = *M.right_operad();
  const int A = std::min(w.max_arity, M.max_arity());
  UnitMaps um;
  for (const Key& k : P.basis().keys()) {
    if (k.arity > A) continue;
    std::vector<Element> ones(k.arity, u);
    um.left[k] = matrix_of(P.basis(), k, M.basis().dim(k),
                           [&](const BasisRef& b) { return M.left(basis_element(b), ones).v; });
  }
  for (const Key& k : Q.basis().keys()) {
    if (k.arity > A) continue;
    um.right[k] = matrix_of(Q.basis(), k, M.basis().dim(k),
                            [&](const BasisRef& b) { return M.right(u, 1, basis_element(b)).v; });
  }
  um.left_chain = chain_of(P, M, um.left, A);
  um.right_chain = chain_of(Q, M, um.right, A);
  for (const auto& [a, f] : um.left_chain) {
    auto bad = f.commutation_violations();
    if (bad.empty())
      um.chain.pass();
    else
      um.chain.fail("left unit map is not a chain map in arity " + std::to_string(a) + ", degree " +
                    std::to_string(bad.front()));
  }
  for (const auto& [a, f] : um.right_chain) {
    auto bad = f.commutation_violations();
    if (bad.empty())
      um.chain.pass();
    else
      um.chain.fail("right unit map is not a chain map in arity " + std::to_string(a) + ", degree " +
                    std::to_string(bad.front()));
  }
  return um;
}

std::string TorsorReport::summary() const {
  std::ostringstream os;
  os << (holds ? "true" : "false");
  for (const auto& l : lines) os << "\n  " << l;
  return os.str();
}

TorsorReport is_torsor(const Bimodule& M, const Window& w) {
  TorsorReport r;
  UnitMaps um = unit_maps(M, w);
  r.holds = um.chain.ok;
  for (const auto& v : um.chain.violations) r.lines.push_back(v);
  const Operad& P = *M.left_operad();
  const Operad& Q = *M.right_operad();
  const int A = std::min(w.max_arity, M.max_arity());
  for (int a = 1; a <= A; ++a)
    for (int k = w.deg_lo; k <= w.deg_hi; ++k) {
      Key key{a, k};
      std::size_t dm = M.basis().dim(key);
      Matrix L = um.left.count(key) ? um.left.at(key) : Matrix(dm, P.basis().dim(key));
      Matrix R = um.right.count(key) ? um.right.at(key) : Matrix(dm, Q.basis().dim(key));
      if (dm == 0 && L.cols() == 0 && R.cols() == 0) continue;
      std::string dl = describe(L), dr = describe(R);
      std::string at = "arity " + std::to_string(a) + " degree " + std::to_string(k) + ": ";
      r.lines.push_back(at + "left unit map " + dl + ", right unit map " + dr);
      if (dl != "invertible" || dr != "invertible") r.holds = false;
    }
  return r;
}

TorsorReport is_quasi_torsor(const Bimodule& M, const Window& w) {
  TorsorReport r;
  UnitMaps um = unit_maps(M, w);
  r.holds = um.chain.ok;
  for (const auto& v : um.chain.violations) r.lines.push_back(v);
  if (!um.chain.ok) return r;
  auto L = is_quasi_iso(um.left_chain, w);
  auto R = is_quasi_iso(um.right_chain, w);
  r.holds = L.holds && R.holds;
  r.lines.push_back("left unit map: " + L.summary());
  r.lines.push_back("right unit map: " + R.summary());
  return r;
}

StrictIsomorphism strict_torsor_isomorphism(const BimodulePtr& M, const Window& w) {
  auto t = is_torsor(*M, w);
  if (!t.holds) throw ContractError("not a strict torsor in the window:\n" + t.summary());
  UnitMaps um = unit_maps(*M, w);
  StrictIsomorphism out{OperadMorphism{M->left_operad(), M->right_operad(), {}}, {}};
  for (const auto& [k, L] : um.left) {
    auto R = um.right.find(k);
    if (R == um.right.end()) continue;
    auto Ri = inverse(R->second);
    if (!Ri) throw ContractError("right unit map not invertible on " + to_string(k));
    out.morphism.maps[k] = *Ri * L;
  }
  out.check = check_morphism(out.morphism, w);
  return out;
}

}  // namespace optor
