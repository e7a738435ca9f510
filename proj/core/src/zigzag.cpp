#include "optor/zigzag.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace optor {

namespace {

Element apply_keys(const KeyMaps& m, const Element& x) {
  auto it = m.find(x.key);
  if (it == m.end()) return Element{x.key, {}};
  return Element{x.key, it->second.apply(x.v)};
}

template <class F>
auto staged(const std::string& stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const WindowError& e) {
    throw WindowError(stage + ": " + e.what());
  } catch (const ContractError& e) {
    throw ContractError(stage + ": " + e.what());
  } catch (const Refused& e) {
    throw Refused(stage + ": " + e.what());
  }
}

std::string key_text(int a, int d) { return "(" + std::to_string(a) + ", " + std::to_string(d) + ")"; }

}  // namespace

// ---------------------------------------------------------------- diagram maps

OperadMorphism build_qbar(const BimodulePtr& M, const InvariantEnd& E, const ModuleMap& q, const ModuleMap& mu) {
  const OperadPtr& Q = M->right_operad();
  for (const auto& [k, m] : q.maps)
    if (!(mu.at(k) * m == Matrix::identity(Q->basis().dim(k))))
      throw ContractError("mu q is not the identity in " + to_string(k));
  OperadMorphism out{Q, E.sub, {}};
  for (const Key& K : Q->basis().keys()) {
    if (K.arity > E.end->max_arity()) continue;
    Matrix mat(E.sub->basis().dim(K), Q->basis().dim(K));
    for (std::size_t i = 0; i < mat.cols(); ++i) {
      const Element c = basis_element(BasisRef{K, i});
      Element lam = E.end->from_values(K, [&](const std::vector<BasisRef>& t, Key) {
        std::vector<Element> xs;
        for (const auto& b : t) xs.push_back(mu.apply(basis_element(b)));
        for (const auto& x : xs)
          if (x.is_zero()) return Vec{};
        return q.apply(total_compose(*Q, c, xs)).v;
      });
      auto co = E.sub->coords(K, lam.v);
      if (!co) throw ContractError("q_bar(" + Q->basis().label(BasisRef{K, i}) + ") is not an invariant endomorphism");
      mat.set_col(i, std::move(*co));
    }
    out.maps[K] = std::move(mat);
  }
  return out;
}

CheckReport verify_diagram(const DiagramMaps& d, const Window& w) {
  CheckReport r;
  const Bimodule& M = *d.M;
  const Operad& P = *M.left_operad();
  const Operad& Q = *M.right_operad();
  const SubOperad& S = *d.end.sub;
  const EndOperad& E = *d.end.end;
  const int A = std::min(w.max_arity, E.max_arity());
  auto triangle = [&](const KeyMaps& unit, const OperadMorphism& f, const std::string& name) {
    for (const auto& [k, m] : unit) {
      if (k.arity > A) continue;
      auto it = d.iota.find(k);
      const bool ok = it == d.iota.end() ? m.is_zero() : it->second * f.at(k) == m;
      if (ok)
        r.pass();
      else
        r.fail("iota " + name + " differs from the unit map in " + to_string(k));
    }
  };
  triangle(d.p, d.pprime, "p'");
  triangle(d.q, d.qbar, "q_bar");
  r.merge(check_morphism(d.pprime, w), "p': ");
  // q_bar(1) = q mu, the identity only when q is invertible
  bool qmu_id = true;
  for (const auto& [k, m] : d.mu.maps) {
    auto it = d.q.find(k);
    const std::size_t n = m.cols();
    if (it == d.q.end() ? n != 0 : !(it->second * m == Matrix::identity(n))) qmu_id = false;
  }
  r.merge(check_morphism(d.qbar, w, qmu_id), "q_bar: ");

  auto guarded = [&](const std::string& what, const std::function<bool()>& f) {
    try {
      if (f())
        r.pass();
      else
        r.fail(what);
    } catch (const WindowError&) {
    }
  };
  const Window mw{A, w.deg_lo, w.deg_hi};
  // q_bar(c)(q c_1, .., q c_k) = q(c(c_1, .., c_k))
  for (const auto& c : window_basis(Q.basis(), mw)) {
    const Element lam = S.embed(d.qbar.apply(basis_element(c)));
    for_each_tuple(Q.basis(), mw, c.key.arity, A, [&](const std::vector<BasisRef>& t) {
      guarded("bimodule identity fails at " + Q.basis().label(c), [&] {
        std::vector<Element> cs, qs;
        for (const auto& b : t) {
          cs.push_back(basis_element(b));
          qs.push_back(apply_keys(d.q, cs.back()));
        }
        return E.evaluate(lam, qs) == apply_keys(d.q, total_compose(Q, basis_element(c), cs));
      });
    });
  }
  // the left action factors through p'
  for (const auto& p : window_basis(P.basis(), mw)) {
    const Element lam = S.embed(d.pprime.apply(basis_element(p)));
    for_each_tuple(M.basis(), mw, p.key.arity, A, [&](const std::vector<BasisRef>& t) {
      guarded("left action does not factor through p' at " + P.basis().label(p), [&] {
        std::vector<Element> ms;
        for (const auto& b : t) ms.push_back(basis_element(b));
        return E.evaluate(lam, ms) == M.left(basis_element(p), ms);
      });
    });
  }
  // q and mu are maps of right modules
  auto qmod = std::make_shared<CanonicalBimodule>(M.right_operad());
  ModuleMap qm{qmod, d.M, {}};
  for (const auto& [k, m] : d.q) qm.maps[k] = m;
  r.merge(check_module_map(qm, mw), "q: ");
  r.merge(check_module_map(d.mu, mw), "mu: ");
  return r;
}

// ---------------------------------------------------------------- certificates

const StoredComplex& ZigzagCertificate::complex(const std::string& name) const {
  for (const auto& c : complexes)
    if (c.name == name) return c;
  throw ContractError("certificate has no complex '" + name + "'");
}

const Arrow& ZigzagCertificate::arrow(const std::string& name) const {
  for (const auto& a : arrows)
    if (a.name == name) return a;
  throw ContractError("certificate has no arrow '" + name + "'");
}

namespace {

std::size_t dim_of(const StoredComplex& c, Key k) {
  auto it = c.arities.find(k.arity);
  return it == c.arities.end() ? 0 : it->second.dim(k.degree);
}

Matrix arrow_matrix(const ZigzagCertificate& c, const Arrow& a, Key k) {
  auto it = a.matrices.find(k);
  if (it != a.matrices.end()) return it->second;
  return Matrix(dim_of(c.complex(a.target), k), dim_of(c.complex(a.source), k));
}

ArityChainMap chain_of(const ZigzagCertificate& c, const Arrow& a) {
  const StoredComplex& S = c.complex(a.source);
  const StoredComplex& T = c.complex(a.target);
  ArityChainMap out;
  for (int ar = 1; ar <= c.window.max_arity; ++ar) {
    auto si = S.arities.find(ar);
    auto ti = T.arities.find(ar);
    if (si == S.arities.end() || ti == T.arities.end()) continue;
    auto s = std::make_shared<ChainComplex>(si->second);
    auto t = std::make_shared<ChainComplex>(ti->second);
    ChainMap m{s, t, {}};
    for (int k = std::min(s->lo(), t->lo()); k <= std::max(s->hi(), t->hi()); ++k)
      if (s->dim(k) && t->dim(k)) m.maps[k] = arrow_matrix(c, a, Key{ar, k});
    out.emplace(ar, std::move(m));
  }
  return out;
}

struct Transcript {
  std::vector<std::string> lines;
  bool ok = true;
  void add(const std::string& what, bool holds, const std::string& detail = "") {
    lines.push_back(what + ": " + (holds ? "holds" : "fails") + (detail.empty() ? "" : " (" + detail + ")"));
    ok = ok && holds;
  }
};

Element class_representative(const Homology& H, const Vec& coords, Key k) {
  Element x{k, {}};
  for (const auto& [i, a] : coords) x.v.axpy(a, H.representatives().at(i));
  return x;
}

}  // namespace

Derivation derive(const ZigzagCertificate& c) {
  Transcript t;
  const Window& w = c.window;
  std::map<std::string, std::map<int, ChainMap>> chains;
  for (const Arrow& a : c.arrows) {
    ArityChainMap ch = chain_of(c, a);
    for (const auto& [ar, m] : ch) {
      auto bad = m.commutation_violations();
      t.add("arrow " + a.name + " commutes with d in arity " + std::to_string(ar), bad.empty(),
            bad.empty() ? "" : "degree " + std::to_string(bad.front()));
    }
    if (a.claim == "iso") {
      for (const auto& [k, m] : a.matrices) {
        if (k.degree < w.deg_lo || k.degree > w.deg_hi || k.arity > w.max_arity) continue;
        t.add("arrow " + a.name + " is invertible in " + key_text(k.arity, k.degree), is_invertible(m));
      }
    }
    try {
      QuasiIsoReport q = is_quasi_iso(ch, w);
      for (const auto& e : q.entries)
        t.lines.push_back("arrow " + a.name + " on homology in " + key_text(e.arity, e.degree) + ": " +
                          to_string(e.verdict) + " (" + std::to_string(e.source_dim) + " -> " +
                          std::to_string(e.target_dim) + ")");
      t.add("arrow " + a.name + " is a quasi-isomorphism in the trust region", q.holds);
    } catch (const WindowError& e) {
      t.add("arrow " + a.name + " is a quasi-isomorphism in the trust region", false, e.what());
    }
    chains[a.name] = std::move(ch);
  }

  for (const Identity& id : c.identities) {
    std::string name;
    for (std::size_t i = 0; i < id.lhs.size(); ++i) name += (i ? " o " : "") + id.lhs[i];
    name += " = " + id.rhs;
    const Arrow& first = c.arrow(id.lhs.back());
    const StoredComplex& src = c.complex(first.source);
    bool holds = true;
    std::string where;
    for (const auto& [ar, C] : src.arities) {
      if (ar > w.max_arity) continue;
      for (int d = C.lo(); d <= C.hi(); ++d) {
        const Key k{ar, d};
        if (!C.dim(d)) continue;
        Matrix m = arrow_matrix(c, first, k);
        for (std::size_t i = id.lhs.size() - 1; i-- > 0;) m = arrow_matrix(c, c.arrow(id.lhs[i]), k) * m;
        Matrix rhs = id.rhs == "id" ? Matrix::identity(C.dim(d)) : arrow_matrix(c, c.arrow(id.rhs), k);
        if (!(m == rhs) && holds) {
          holds = false;
          where = "first difference in " + key_text(ar, d);
        }
      }
    }
    t.add("identity " + name, holds, where);
  }

  Derivation out;
  // Phi = [q_bar]^{-1} [p'] in every degree where both sides are trusted
  const ArityChainMap& pp = chains.at("p'");
  const ArityChainMap& qb = chains.at("qbar");
  const StoredComplex& CP = c.complex("P");
  const StoredComplex& CQ = c.complex("Q");
  for (int ar = 1; ar <= w.max_arity; ++ar) {
    auto pi = pp.find(ar), qi = qb.find(ar);
    if (pi == pp.end() || qi == qb.end()) continue;
    for (int d = w.deg_lo; d <= w.deg_hi; ++d) {
      if (!pi->second.source->trusted(d) || !qi->second.source->trusted(d) || !pi->second.target->trusted(d))
        continue;
      Matrix hp = induced_homology_map(pi->second, d);
      Matrix hq = induced_homology_map(qi->second, d);
      if (hp.rows() == 0 && hp.cols() == 0 && hq.cols() == 0) continue;
      auto inv = inverse(hq);
      if (!inv || hp.cols() != hq.cols()) {
        t.add("homology isomorphism in " + key_text(ar, d), false, "q_bar is not invertible on homology");
        continue;
      }
      Matrix phi = *inv * hp;
      t.add("homology isomorphism in " + key_text(ar, d), is_invertible(phi),
            std::to_string(phi.cols()) + "-dimensional");
      out.homology_iso[Key{ar, d}] = std::move(phi);
    }
  }

  // compatibility with composition, on class representatives
  if (c.P && c.Q && !out.homology_iso.empty()) {
    const Operad& P = *c.P;
    const Operad& Q = *c.Q;
    std::map<Key, Homology> HP, HQ;
    auto hom = [&](std::map<Key, Homology>& cache, const StoredComplex& S, Key k) -> const Homology& {
      auto it = cache.find(k);
      if (it == cache.end()) it = cache.emplace(k, Homology(S.arities.at(k.arity), k.degree)).first;
      return it->second;
    };
    std::size_t checked = 0, failed = 0;
    std::string first_fail;
    for (const auto& [ka, phia] : out.homology_iso)
      for (const auto& [kb, phib] : out.homology_iso) {
        const Key kc{ka.arity + kb.arity - 1, ka.degree + kb.degree};
        auto pc = out.homology_iso.find(kc);
        if (pc == out.homology_iso.end()) continue;
        const Homology& Ha = hom(HP, CP, ka);
        const Homology& Hb = hom(HP, CP, kb);
        const Homology& Hc = hom(HP, CP, kc);
        const Homology& Qa = hom(HQ, CQ, ka);
        const Homology& Qb = hom(HQ, CQ, kb);
        const Homology& Qc = hom(HQ, CQ, kc);
        for (std::size_t i = 0; i < Ha.dim(); ++i)
          for (std::size_t j = 0; j < Hb.dim(); ++j)
            for (int s = 1; s <= ka.arity; ++s) {
              Element x = P.compose(Element{ka, Ha.representatives()[i]}, s, Element{kb, Hb.representatives()[j]});
              Vec lhs = pc->second.apply(Hc.project(x.v));
              Element y = Q.compose(class_representative(Qa, phia.col(i), ka), s,
                                    class_representative(Qb, phib.col(j), kb));
              Vec rhs = Qc.project(y.v);
              ++checked;
              if (!(lhs == rhs)) {
                if (!failed) first_fail = "first failure in " + key_text(ka.arity, ka.degree) + " o_" +
                                          std::to_string(s) + " " + key_text(kb.arity, kb.degree);
                ++failed;
              }
            }
      }
    t.add("homology isomorphism respects composition", failed == 0,
          std::to_string(checked) + " instances" + (failed ? ", " + first_fail : ""));
  }
  out.transcript = std::move(t.lines);
  out.valid = t.ok;
  return out;
}

ZigzagCertificate assemble_zigzags(const DiagramMaps& d, const Window& w, const std::string& route,
                                   std::vector<StoredComplex> extra_complexes, std::vector<Arrow> extra_arrows) {
  ZigzagCertificate c;
  const Bimodule& M = *d.M;
  const int A = std::min(w.max_arity, d.end.end->max_arity());
  c.window = Window{A, w.deg_lo, w.deg_hi};
  c.route = route;
  c.P = M.left_operad();
  c.Q = M.right_operad();
  auto stored_operad = [&](const std::string& name, const Operad& O) {
    StoredComplex s{name, {}};
    for (int a = 1; a <= A; ++a) s.arities.emplace(a, O.complex(a));
    return s;
  };
  c.complexes.push_back(stored_operad("P", *c.P));
  c.complexes.push_back(stored_operad("Q", *c.Q));
  c.complexes.push_back(stored_operad("End_Q M", *d.end.sub));
  StoredComplex sm{"M", {}};
  for (int a = 1; a <= A; ++a) sm.arities.emplace(a, M.complex(a));
  c.complexes.push_back(std::move(sm));
  for (auto& s : extra_complexes) c.complexes.push_back(std::move(s));

  c.arrows.push_back(Arrow{"p'", "operad-map", "P", "End_Q M", "quasi-iso", d.pprime.maps});
  c.arrows.push_back(Arrow{"qbar", "operad-map", "Q", "End_Q M", "quasi-iso", d.qbar.maps});
  c.arrows.push_back(Arrow{"iota", "module-map", "End_Q M", "M", "quasi-iso", d.iota});
  c.arrows.push_back(Arrow{"p", "module-map", "P", "M", "quasi-iso", d.p});
  c.arrows.push_back(Arrow{"q", "module-map", "Q", "M", "quasi-iso", d.q});
  c.arrows.push_back(Arrow{"mu", "module-map", "M", "Q", "quasi-iso", d.mu.maps});
  for (auto& a : extra_arrows) c.arrows.push_back(std::move(a));
  c.identities = {Identity{{"iota", "p'"}, "p"}, Identity{{"iota", "qbar"}, "q"}, Identity{{"mu", "q"}, "id"}};
  c.zigzags = {
      "zigzag 1, row 1: P | M | Q",
      "zigzag 1, row 2: End_Q M | M | Q; from row 1: p', id, id",
      "zigzag 1, row 3: Q | Q | Q; into row 2: qbar, q, id",
      "zigzag 2, row 1: P | P | P",
      "zigzag 2, row 2: End_Q M | End_Q M | End_Q M; from row 1: p', p', p'",
      "zigzag 2, row 3: Q | Q | Q; into row 2: qbar, qbar, qbar",
  };
  CheckReport diag = verify_diagram(d, c.window);
  c.construction.push_back("invariant endomorphisms closed: " + std::string(d.end.closure.ok ? "holds" : "fails"));
  c.construction.push_back("invariance constraints clipped by the window: " + std::to_string(d.end.clipped));
  bool qmu_id = true;
  for (const auto& [k, m] : d.mu.maps) {
    auto it = d.q.find(k);
    if (it == d.q.end() ? m.cols() != 0 : !(it->second * m == Matrix::identity(m.cols()))) qmu_id = false;
  }
  c.construction.push_back(std::string("q_bar checked as a ") + (qmu_id ? "unital" : "non-unital (q mu is not the identity)") +
                           " morphism");
  c.construction.push_back("diagram and equivariance squares: " + std::string(diag.ok ? "holds" : "fails") + " (" +
                           std::to_string(diag.checked) + " instances)");
  for (const auto& v : diag.violations) c.construction.push_back("  " + v);
  c.construction_ok = diag.ok && d.end.closure.ok;
  Derivation der = derive(c);
  c.transcript = std::move(der.transcript);
  c.homology_iso = std::move(der.homology_iso);
  c.valid = der.valid && c.construction_ok;
  return c;
}

const std::map<Key, Matrix>& homology_isomorphism(const ZigzagCertificate& c) {
  if (!c.valid) throw ContractError("certificate is not valid");
  return c.homology_iso;
}

// ---------------------------------------------------------------- pipeline

namespace {

StoredComplex stored_module(const std::string& name, const RightModule& M, int A) {
  StoredComplex s{name, {}};
  for (int a = 1; a <= A; ++a) s.arities.emplace(a, M.complex(a));
  return s;
}

}  // namespace

ZigzagCertificate quasi_torsor_pipeline(const BimodulePtr& M, const Window& w, const PipelineOptions& opt) {
  const int A = std::min(w.max_arity, M->max_arity());
  const Window wa{A, w.deg_lo, w.deg_hi};
  auto Qmod = std::make_shared<CanonicalBimodule>(M->right_operad());

  const bool strict = !opt.force_resolution && staged("gate", [&] { return is_torsor(*M, wa).holds; });
  if (strict) {
    ModuleMap q = staged("unit maps", [&] { return right_unit_map(M, Qmod, w.deg_hi); });
    ModuleMap mu{M, Qmod, {}};
    for (const auto& [k, m] : q.maps) {
      auto inv = inverse(m);
      if (!inv) throw ContractError("unit maps: right unit map is not invertible in " + to_string(k));
      mu.maps[k] = *inv;
    }
    InvariantEnd E = staged("invariant endomorphisms", [&] { return invariant_endomorphism_operad(M, A); });
    UnitMaps um = unit_maps(*M, wa);
    DiagramMaps d{M, E, um.left, um.right, {}, {}, {}, mu};
    d.pprime = staged("p'", [&] { return left_action_operad_map(M, E); });
    d.qbar = staged("q_bar", [&] { return build_qbar(M, E, q, mu); });
    d.iota = iota_unit(*E.sub, *M->torsor_unit(), A);
    return assemble_zigzags(d, wa, "strict");
  }

  staged("gate", [&] {
    TorsorReport t = is_quasi_torsor(*M, wa);
    if (!t.holds) throw Refused("not a quasi-torsor in the window\n" + t.summary());
    return 0;
  });
  const int D = w.deg_hi;
  ResolutionPtr R = std::dynamic_pointer_cast<const Resolution>(M);
  const bool given = R != nullptr;
  if (!R)
    R = staged("resolution", [&] { return build_resolution(M, ResolutionOptions{A, D + 2, std::nullopt}); });
  auto W = staged("truncation", [&] { return std::make_shared<const Truncation>(R, D); });
  staged("transfer", [&] {
    TorsorReport t = is_quasi_torsor(*W, wa);
    if (!t.holds) throw Refused("the truncated resolution is not a quasi-torsor\n" + t.summary());
    return 0;
  });
  Retraction ret = staged("retraction", [&] { return retraction_mu(R, D + 1); });
  if (!ret.verified.ok) throw ContractError("retraction: " + ret.verified.first());
  ModuleMap mu = staged("retraction", [&] { return descend(ret.mu, W); });
  ModuleMap q = right_unit_map(W, Qmod, D);
  InvariantEnd E = staged("invariant endomorphisms", [&] { return invariant_endomorphism_operad(W, A); });
  UnitMaps um = unit_maps(*W, wa);
  DiagramMaps d{W, E, um.left, um.right, {}, {}, {}, mu};
  d.pprime = staged("p'", [&] { return left_action_operad_map(W, E); });
  d.qbar = staged("q_bar", [&] { return build_qbar(W, E, q, mu); });
  d.iota = iota_unit(*E.sub, *W->torsor_unit(), A);

  std::vector<StoredComplex> extra;
  std::vector<Arrow> arrows;
  extra.push_back(stored_module("M_inf", *R, A));
  ModuleMap t = truncation_map(W);
  arrows.push_back(Arrow{"truncate", "module-map", "M_inf", "M", "quasi-iso", t.maps});
  if (!given) {
    extra.push_back(stored_module("input", *M, A));
    arrows.push_back(Arrow{"pi", "module-map", "M_inf", "input", "quasi-iso", projection_pi(R).maps});
  }
  return assemble_zigzags(d, wa, "resolution", std::move(extra), std::move(arrows));
}

}  // namespace optor
