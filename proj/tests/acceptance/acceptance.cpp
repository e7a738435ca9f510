// One PASS/FAIL line per acceptance criterion. Exit status 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "optor/endomorphism.hpp"
#include "optor/io.hpp"
#include "optor/lifting.hpp"
#include "optor/resolution.hpp"
#include "optor/stock.hpp"
#include "optor/torsor.hpp"
#include "optor/zigzag.hpp"

using namespace optor;

namespace {

// wall-clock budgets, seconds
constexpr double kStrictBudget = 10.0;
constexpr double kDSquaredBudget = 60.0;
constexpr int kRandomPairs = 50;
constexpr int kLiftProblems = 20;
constexpr std::uint32_t kSeed = 20240611;

struct Outcome {
  bool pass = true;
  std::string detail;
  std::size_t checks = 0;

  void require(bool ok, const std::string& why) {
    ++checks;
    if (!ok && pass) {
      pass = false;
      detail = why;
    }
  }
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt_seconds(double s) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << s << " s";
  return os.str();
}

BimodulePtr canonical(const OperadPtr& Q, std::optional<Element> unit = std::nullopt) {
  return std::make_shared<CanonicalBimodule>(Q, std::move(unit));
}

std::vector<std::string> small_groups() {
  // v4 and z2xz2 name the same group
  std::vector<std::string> out;
  for (const auto& n : named_group_names())
    if (n != "z2xz2") out.push_back(n);
  return out;
}

Matrix at_or_zero(const std::map<Key, Matrix>& m, Key k, std::size_t rows, std::size_t cols) {
  auto it = m.find(k);
  return it == m.end() ? Matrix(rows, cols) : it->second;
}

Element apply_maps(const std::map<Key, Matrix>& m, const Element& x) {
  if (x.is_zero()) return x;
  auto it = m.find(x.key);
  if (it == m.end()) return Element{x.key, {}};
  return Element{x.key, it->second.apply(x.v)};
}

Matrix scaled(const Matrix& m, const Scalar& c) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) out.set_col(j, m.col(j).scaled(c));
  return out;
}

// ---------------------------------------------------------------- independent rank oracle

std::size_t oracle_rank(std::vector<std::vector<mpq_class>> a) {
  std::size_t r = 0;
  const std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      mpq_class f = a[i][c] / a[r][c];
      for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    ++r;
  }
  return r;
}

// ---------------------------------------------------------------- criterion 1

Outcome criterion_strict() {
  Outcome o;
  const auto t0 = Clock::now();
  struct Fixture {
    std::string name;
    BimodulePtr M;
    Window w;
  };
  std::vector<Fixture> fx;
  for (const char* g : {"z2", "z3", "s3"})
    fx.push_back({std::string("canonical Q[") + g + "]", canonical(group_algebra_operad(named_group(g))), {1, 0, 0}});
  fx.push_back({"canonical Com<=4", canonical(com_operad(4)), {4, 0, 0}});
  fx.push_back({"canonical Ass<=3", canonical(ass_operad(3)), {3, 0, 0}});
  for (const auto& name : small_groups()) {
    GroupTable g = named_group(name);
    auto Q = group_algebra_operad(g);
    for (std::size_t u = 0; u < g.elements.size(); ++u)
      fx.push_back({"regular bitorsor " + name + " unit " + g.elements[u],
                    canonical(Q, basis_element(BasisRef{{1, 0}, u})), {1, 0, 0}});
  }
  for (const auto& f : fx) {
    o.require(is_torsor(*f.M, f.w).holds, f.name + ": is_torsor false");
    StrictIsomorphism s = strict_torsor_isomorphism(f.M, f.w);
    o.require(s.check.ok, f.name + ": extracted map fails check_morphism: " + s.check.first());
  }

  // S3 with a transposition t as unit: the map is g -> t^-1 g t, found by brute force
  GroupTable s3 = named_group("s3");
  const int e = s3.identity();
  auto Q = group_algebra_operad(s3);
  std::size_t transpositions = 0;
  for (int t = 0; t < static_cast<int>(s3.elements.size()); ++t) {
    if (t == e || s3.mult[t][t] != e) continue;
    ++transpositions;
    auto M = canonical(Q, basis_element(BasisRef{{1, 0}, static_cast<std::size_t>(t)}));
    const Matrix phi = strict_torsor_isomorphism(M, {1, 0, 0}).morphism.at({1, 0});
    for (int g = 0; g < static_cast<int>(s3.elements.size()); ++g) {
      int conj = -1;
      for (int x = 0; x < static_cast<int>(s3.elements.size()); ++x)
        if (s3.mult[t][x] == s3.mult[g][t]) conj = x;  // t x = g t
      o.require(phi.apply(Vec::unit(static_cast<std::size_t>(g))) == Vec::unit(static_cast<std::size_t>(conj)),
                "s3: image of " + s3.elements[g] + " is not its conjugate by " + s3.elements[t]);
    }
  }
  o.require(transpositions == 3, "s3 should have three transpositions");

  // negative control: every element acts on the left through the augmentation
  for (const char* name : {"z2", "s3"}) {
    auto T = tabulate(*canonical(group_algebra_operad(named_group(name))));
    for (const auto& [key, v] : T->left_table()) {
      (void)v;
      T->set_left(key.first, key.second, Vec::unit(key.second.front().index));
    }
    o.require(!is_torsor(*T, {1, 0, 0}).holds, std::string("trivial left action on ") + name + " accepted");
  }
  const double s = seconds_since(t0);
  o.require(s <= kStrictBudget, "runtime " + fmt_seconds(s) + " exceeds " + fmt_seconds(kStrictBudget));
  if (o.pass)
    o.detail = std::to_string(fx.size()) + " strict fixtures, conjugation on 3 transpositions, " + fmt_seconds(s);
  return o;
}

// ---------------------------------------------------------------- fixtures of criteria 2-5

struct ResolvedFixture {
  std::string name;
  OperadPtr Q;
  int A;
  ResolutionPtr R;  // enumerated to degree 5
};

std::vector<ResolvedFixture> resolved_fixtures() {
  std::vector<ResolvedFixture> out;
  for (const OperadPtr& Q : {OperadPtr(group_algebra_operad(named_group("z2"))), OperadPtr(com_operad(3)),
                             OperadPtr(ass_operad(3))}) {
    const int A = std::min(3, Q->max_arity());
    out.push_back({Q->name(), Q, A, build_resolution(canonical(Q), ResolutionOptions{A, 5, std::nullopt})});
  }
  return out;
}

Outcome criterion_d_squared(const std::vector<ResolvedFixture>& fx, double build_seconds) {
  Outcome o;
  const auto t0 = Clock::now();
  std::size_t entries = 0;
  for (const auto& f : fx) {
    for (int a = 1; a <= f.A; ++a) {
      ChainComplex C = f.R->complex(a);
      for (int k = std::max(C.lo() + 2, 2); k <= std::min(C.hi(), 4); ++k) {
        Matrix dd = C.d(k - 1) * C.d(k);
        entries += dd.rows() * dd.cols();
        o.require(dd.is_zero(), f.name + ": d d != 0 in arity " + std::to_string(a) + ", degree " + std::to_string(k));
      }
      // element by element as well
      for (int k = 0; k <= 4; ++k)
        for (std::size_t i = 0; i < f.R->basis().dim({a, k}); ++i)
          o.require(f.R->diff(f.R->diff(basis_element(BasisRef{{a, k}, i}))).is_zero(),
                    f.name + ": d d of " + f.R->basis().labels({a, k})[i] + " is not zero");
    }
  }
  const double s = seconds_since(t0) + build_seconds;
  o.require(s <= kDSquaredBudget, "runtime " + fmt_seconds(s) + " exceeds " + fmt_seconds(kDSquaredBudget));
  if (o.pass) o.detail = std::to_string(entries) + " composed entries exactly zero, " + fmt_seconds(s);
  return o;
}

// Two-sided bar complex B(Q[Z/2], augmentation ideal, Q[Z/2]) in arity 1, written out by hand.
// Basis of degree k: m (x) abar^k (x) q with m, q in {e, g}, abar = g - e; index 2m + q.
std::vector<std::vector<std::vector<mpq_class>>> z2_bar_differentials(int top) {
  // a * abar and abar * a in the group basis: x (g - e) = xg - x
  auto times_abar = [](int x) { return std::vector<std::pair<int, int>>{{x ^ 1, 1}, {x, -1}}; };
  std::vector<std::vector<std::vector<mpq_class>>> d(top + 1);
  for (int k = 1; k <= top; ++k) {
    std::vector<std::vector<mpq_class>> m(4, std::vector<mpq_class>(4, 0));
    for (int mm = 0; mm < 2; ++mm)
      for (int q = 0; q < 2; ++q) {
        const int col = 2 * mm + q;
        // face 0: absorb the first bar into m
        for (auto [x, c] : times_abar(mm)) m[2 * x + q][col] += c;
        // inner faces: abar abar = -2 abar
        for (int i = 1; i <= k - 1; ++i) m[col][col] += (i % 2 ? -1 : 1) * -2;
        // last face: absorb the last bar into q, sign (-1)^k
        for (auto [x, c] : times_abar(q)) m[2 * mm + x][col] += (k % 2 ? -1 : 1) * c;
      }
    d[k] = m;
  }
  return d;
}

Outcome criterion_projection(const std::vector<ResolvedFixture>& fx) {
  Outcome o;
  for (const auto& f : fx) {
    QuasiIsoReport r = is_quasi_iso(projection_pi(f.R).chain_maps(f.A), Window{f.A, 0, 4});
    o.require(r.holds, f.name + ": projection is not a quasi-isomorphism: " + r.summary());
    std::size_t trusted = 0;
    for (const auto& e : r.entries) trusted += e.verdict != Verdict::Unverifiable;
    o.require(trusted == static_cast<std::size_t>(5 * f.A), f.name + ": degrees 0..4 not all trusted");
  }
  // Z/2 against the hand-written bar complex
  const auto& z = fx.front();
  auto d = z2_bar_differentials(5);
  std::vector<std::size_t> oracle_h, lib_h, lib_dims;
  ChainComplex C = z.R->complex(1);
  for (int k = 0; k <= 4; ++k) {
    const std::size_t out_rank = k == 0 ? 0 : oracle_rank(d[k]);
    const std::size_t in_rank = oracle_rank(d[k + 1]);
    oracle_h.push_back(4 - out_rank - in_rank);
    lib_h.push_back(Homology(C, k).dim());
    lib_dims.push_back(z.R->basis().dim({1, k}));
  }
  for (int k = 2; k <= 5; ++k) {
    std::vector<std::vector<mpq_class>> dd(4, std::vector<mpq_class>(4, 0));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int t = 0; t < 4; ++t) dd[i][j] += d[k - 1][i][t] * d[k][t][j];
    o.require(oracle_rank(dd) == 0, "the hand-written bar complex is not a complex");
  }
  o.require(lib_dims == std::vector<std::size_t>(5, 4), "Z/2: not 4 trees per degree");
  o.require(oracle_h == std::vector<std::size_t>{2, 0, 0, 0, 0}, "Z/2: bar oracle homology is not 2 in degree 0");
  o.require(lib_h == oracle_h, "Z/2: homology of the resolution differs from the bar oracle");
  if (o.pass) o.detail = "3 fixtures quasi-isomorphic in degrees 0..4; Z/2 dims 4,4,4,4,4 and homology 2,0,0,0,0";
  return o;
}

// ---------------------------------------------------------------- criterion 4

Outcome criterion_retraction(const std::vector<ResolvedFixture>& fx) {
  Outcome o;
  const int D = 4;
  std::size_t instances = 0;
  for (const auto& f : fx) {
    Retraction ret = retraction_mu(f.R, D);
    o.require(ret.verified.ok, f.name + ": " + ret.verified.first());
    const Operad& Q = *f.Q;
    for (const Key& k : Q.basis().keys()) {
      if (k.degree > D || k.arity > f.A) continue;
      const std::size_t n = Q.basis().dim(k);
      o.require(ret.mu.at(k) * ret.q.at(k) == Matrix::identity(n), f.name + ": mu q != id in " + to_string(k));
    }
    const Window w{f.A, 0, D};
    for (const auto& m : window_basis(f.R->basis(), w)) {
      const Element x = basis_element(m);
      const Element mx = ret.mu.apply(x);
      if (m.key.degree >= 1) {
        ++instances;
        o.require(ret.mu.apply(f.R->diff(x)) == Q.diff(mx), f.name + ": mu does not commute with d");
      }
      for (const auto& c : window_basis(Q.basis(), w)) {
        if (m.key.arity + c.key.arity - 1 > f.A || m.key.degree + c.key.degree > D) continue;
        for (int s = 1; s <= m.key.arity; ++s) {
          ++instances;
          o.require(ret.mu.apply(f.R->right(x, s, basis_element(c))) == Q.compose(mx, s, basis_element(c)),
                    f.name + ": mu is not right-linear at " + f.R->basis().label(m));
        }
      }
    }
  }
  if (o.pass) o.detail = "mu q = id through degree 4; " + std::to_string(instances) + " module-map instances";
  return o;
}

// ---------------------------------------------------------------- criterion 5

Outcome criterion_diagram() {
  Outcome o;
  const int D = 2;
  std::size_t tuples = 0;
  for (const OperadPtr& Qp : {OperadPtr(group_algebra_operad(named_group("z2"))), OperadPtr(com_operad(3)),
                              OperadPtr(ass_operad(3))}) {
    const Operad& Q = *Qp;
    const std::string name = Q.name();
    const int A = std::min(3, Q.max_arity());
    const Window w{A, 0, D};
    auto R = build_resolution(canonical(Qp), ResolutionOptions{A, D + 2, std::nullopt});
    auto W = std::make_shared<const Truncation>(R, D);
    Retraction ret = retraction_mu(R, D + 1);
    ModuleMap mu = descend(ret.mu, W);
    auto Qmod = std::make_shared<CanonicalBimodule>(Qp);
    ModuleMap q = right_unit_map(W, Qmod, D);
    InvariantEnd E = invariant_endomorphism_operad(W, A);
    UnitMaps um = unit_maps(*W, w);
    DiagramMaps d{W, E, um.left, um.right, left_action_operad_map(W, E), build_qbar(W, E, q, mu),
                  iota_unit(*E.sub, *W->torsor_unit(), A), mu};

    // the two triangles, as matrix identities
    for (int a = 1; a <= A; ++a)
      for (int k = 0; k <= D; ++k) {
        const Key key{a, k};
        const std::size_t nm = W->basis().dim(key), ne = E.sub->basis().dim(key), nq = Q.basis().dim(key);
        const std::size_t np = W->left_operad()->basis().dim(key);
        const Matrix iota = at_or_zero(d.iota, key, nm, ne);
        o.require(iota * at_or_zero(d.pprime.maps, key, ne, np) == at_or_zero(d.p, key, nm, np),
                  name + ": iota p' != p in " + to_string(key));
        o.require(iota * at_or_zero(d.qbar.maps, key, ne, nq) == at_or_zero(d.q, key, nm, nq),
                  name + ": iota qbar != q in " + to_string(key));
      }
    CheckReport pm = check_morphism(d.pprime, w);
    o.require(pm.ok, name + ": p' fails check_morphism: " + pm.first());
    // compositions, differential and equivariance; the unit only up to homology since q mu != id
    CheckReport qm = check_morphism(d.qbar, w, false);
    o.require(qm.ok, name + ": qbar fails check_morphism: " + qm.first());
    Element unit_defect = d.qbar.apply(Q.unit());
    unit_defect.v = unit_defect.v - E.sub->unit().v;
    o.require(Homology(E.sub->complex(1), 0).is_boundary(unit_defect.v),
              name + ": qbar(1) is not homologous to the identity");
    QuasiIsoReport qi = is_quasi_iso(d.qbar.chain_maps(A), w);
    o.require(qi.holds, name + ": qbar is not a quasi-isomorphism: " + qi.summary());

    // qbar(c)(q c_1, .., q c_k) = q(c(c_1, .., c_k)) on all in-window tuples
    for (const auto& c : window_basis(Q.basis(), w)) {
      const Element lam = E.sub->embed(d.qbar.apply(basis_element(c)));
      for_each_tuple(Q.basis(), w, c.key.arity, A, [&](const std::vector<BasisRef>& t) {
        long long deg = c.key.degree;
        std::vector<Element> cs, qs;
        for (const auto& b : t) {
          deg += b.key.degree;
          cs.push_back(basis_element(b));
          qs.push_back(apply_maps(d.q, cs.back()));
        }
        if (deg > D) return;
        try {
          const bool ok = E.end->evaluate(lam, qs) == apply_maps(d.q, total_compose(Q, basis_element(c), cs));
          ++tuples;
          o.require(ok, name + ": bimodule identity fails at " + Q.basis().label(c));
        } catch (const WindowError&) {
          // the composite leaves the materialized arities
        }
      });
    }
    CheckReport vd = verify_diagram(d, w);
    o.require(vd.ok, name + ": verify_diagram: " + vd.first());
  }
  if (o.pass)
    o.detail = "triangles exact, qbar a quasi-isomorphic morphism (unit up to homology), " + std::to_string(tuples) +
               " bimodule-identity tuples";
  return o;
}

// ---------------------------------------------------------------- criterion 6

Outcome criterion_end_to_end() {
  Outcome o;
  struct Fixture {
    std::string name;
    BimodulePtr M;
    Window w;
    bool group = false;
  };
  std::vector<Fixture> fx;
  for (const char* g : {"z2", "z3", "s3"})
    fx.push_back({std::string("canonical Q[") + g + "]", canonical(group_algebra_operad(named_group(g))), {1, 0, 0},
                  true});
  fx.push_back({"canonical Com<=4", canonical(com_operad(4)), {4, 0, 0}});
  fx.push_back({"canonical Ass<=3", canonical(ass_operad(3)), {3, 0, 0}});
  for (const auto& name : small_groups()) {
    GroupTable g = named_group(name);
    auto Q = group_algebra_operad(g);
    for (std::size_t u = 0; u < g.elements.size(); ++u)
      fx.push_back({"regular bitorsor " + name + " unit " + g.elements[u],
                    canonical(Q, basis_element(BasisRef{{1, 0}, u})), {1, 0, 0}, true});
  }
  auto Rc = build_resolution(canonical(com_operad(3)), ResolutionOptions{3, 4, std::nullopt});
  auto Rz = build_resolution(canonical(group_algebra_operad(named_group("z2"))), ResolutionOptions{1, 4, std::nullopt});
  fx.push_back({"M_inf of Com<=3", Rc, {3, 0, 2}});
  fx.push_back({"M_inf of Q[z2]", Rz, {1, 0, 2}});

  std::size_t quasi = 0;
  for (const auto& f : fx) {
    const bool strict = is_torsor(*f.M, f.w).holds;
    if (!strict) {
      o.require(is_quasi_torsor(*f.M, f.w).holds, f.name + ": not a quasi-torsor");
      ++quasi;
    }
    ZigzagCertificate c = quasi_torsor_pipeline(f.M, f.w);
    o.require(c.valid, f.name + ": certificate invalid");
    if (!c.valid) continue;
    const auto& phi = homology_isomorphism(c);
    const Operad& P = *f.M->left_operad();
    for (int a = 1; a <= std::min(f.w.max_arity, f.M->max_arity()); ++a)
      for (int k = f.w.deg_lo; k <= f.w.deg_hi; ++k) {
        if (Homology(P.complex(a), k).dim() == 0) continue;
        auto it = phi.find({a, k});
        o.require(it != phi.end() && is_invertible(it->second),
                  f.name + ": no invertible homology map in " + to_string(Key{a, k}));
      }
    bool respects = false;
    for (const auto& l : c.transcript)
      if (l.rfind("homology isomorphism respects composition: holds", 0) == 0) respects = true;
    o.require(respects, f.name + ": compatibility with composition not established");
    if (f.group) {
      auto s = strict_torsor_isomorphism(f.M, f.w);
      o.require(s.morphism.at({1, 0}) == phi.at({1, 0}), f.name + ": disagrees with the strict isomorphism");
    }
    const std::string text = io::serialize(c);
    io::Verification v = io::verify_payload(text);
    o.require(v.reproduced && v.valid, f.name + ": re-verification differs: " +
                                           (v.differences.empty() ? std::string("invalid") : v.differences.front()));
    std::string stored, derived;
    for (const auto& l : c.transcript) stored += l + "\n";
    for (const auto& l : v.derivation.transcript) derived += l + "\n";
    o.require(stored == derived, f.name + ": transcripts are not byte-identical");
  }
  o.require(quasi == 2, "the resolution fixtures should be quasi-torsors but not torsors");
  if (o.pass)
    o.detail = std::to_string(fx.size()) + " certificates valid and re-derived byte-identically (" +
               std::to_string(quasi) + " via quasi-torsors)";
  return o;
}

// ---------------------------------------------------------------- criteria 7 and 8

class Rng {
 public:
  explicit Rng(std::uint32_t seed) : g_(seed) {}
  int below(int n) { return static_cast<int>(g_() % static_cast<std::uint32_t>(n)); }
  int coeff() { return below(5) - 2; }

 private:
  std::mt19937 g_;
};

struct Dg {
  std::shared_ptr<DgCollection> N;
  std::map<Key, std::size_t> dims;
};

// dim basis elements in arities 1-2 and degrees 0-1; d from degree 1 to degree 0 at random
Dg random_dg(Rng& rng, const std::string& name, int dim) {
  std::map<Key, std::vector<std::string>> labels;
  for (int i = 0; i < dim; ++i) {
    Key k{1 + (i == 0 ? 0 : rng.below(2)), rng.below(2)};
    labels[k].push_back(name + std::to_string(i));
  }
  Collection c;
  Dg out;
  for (auto& [k, ls] : labels) {
    out.dims[k] = ls.size();
    c.set_component(k, ls);
  }
  std::map<BasisRef, Vec> d;
  for (const auto& [k, n] : out.dims) {
    if (k.degree != 1) continue;
    const std::size_t below = c.dim({k.arity, 0});
    for (std::size_t i = 0; i < n; ++i) {
      Vec v;
      for (std::size_t j = 0; j < below; ++j) v.add(j, rng.coeff());
      d[BasisRef{k, i}] = v;
    }
  }
  out.N = std::make_shared<DgCollection>(name, c, d);
  return out;
}

Dg with_extra(const Dg& base, Rng& rng, const std::string& name) {
  Collection c = base.N->basis();
  Key k{1 + rng.below(2), rng.below(2)};
  auto labels = c.has(k) ? c.labels(k) : std::vector<std::string>{};
  labels.push_back(name + "x");
  c.set_component(k, labels);
  std::map<BasisRef, Vec> d;
  for (const Key& key : base.N->basis().keys())
    for (std::size_t i = 0; i < base.N->basis().dim(key); ++i) {
      Vec v = base.N->diff_basis(BasisRef{key, i});
      if (!v.empty()) d[BasisRef{key, i}] = v;
    }
  Dg out;
  for (const Key& key : c.keys()) out.dims[key] = c.dim(key);
  out.N = std::make_shared<DgCollection>(name, c, d);
  return out;
}

Matrix d_matrix(const RightModule& N, int arity) {
  const std::size_t top = N.basis().dim({arity, 1}), bot = N.basis().dim({arity, 0});
  Matrix m(bot, top);
  for (std::size_t j = 0; j < top; ++j) m.set_col(j, N.diff_basis(BasisRef{{arity, 1}, j}));
  return m;
}

// The space of degree-0 chain maps N -> M, by solving d F = F d.
std::vector<KeyMaps> chain_map_basis(const RightModule& N, const RightModule& M) {
  std::vector<Key> keys;
  for (int a = 1; a <= 2; ++a)
    for (int k = 0; k <= 1; ++k) keys.push_back({a, k});
  std::map<Key, std::size_t> offset;
  std::size_t unknowns = 0;
  for (const Key& k : keys) {
    offset[k] = unknowns;
    unknowns += M.basis().dim(k) * N.basis().dim(k);
  }
  auto var = [&](Key k, std::size_t r, std::size_t c) { return offset[k] + c * M.basis().dim(k) + r; };
  std::vector<Vec> rows;
  for (int a = 1; a <= 2; ++a) {
    Matrix dn = d_matrix(N, a), dm = d_matrix(M, a);
    for (std::size_t r = 0; r < M.basis().dim({a, 0}); ++r)
      for (std::size_t c = 0; c < N.basis().dim({a, 1}); ++c) {
        Vec row;
        for (std::size_t t = 0; t < M.basis().dim({a, 1}); ++t) row.add(var({a, 1}, t, c), dm.at(r, t));
        for (std::size_t s = 0; s < N.basis().dim({a, 0}); ++s) row.add(var({a, 0}, r, s), -dn.at(s, c));
        rows.push_back(row);
      }
  }
  Matrix sys(rows.size(), unknowns);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& [j, x] : rows[i]) sys.set(i, j, x);
  std::vector<Vec> ker;
  if (rows.empty()) {
    for (std::size_t j = 0; j < unknowns; ++j) ker.push_back(Vec::unit(j));
  } else {
    ker = kernel_basis(sys);
  }
  std::vector<KeyMaps> out;
  for (const Vec& v : ker) {
    KeyMaps f;
    for (const Key& k : keys) {
      Matrix m(M.basis().dim(k), N.basis().dim(k));
      for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) m.set(r, c, v.get(var(k, r, c)));
      f[k] = m;
    }
    out.push_back(f);
  }
  return out;
}

KeyMaps random_chain_map(Rng& rng, const RightModule& N, const RightModule& M) {
  auto basis = chain_map_basis(N, M);
  KeyMaps f;
  for (int a = 1; a <= 2; ++a)
    for (int k = 0; k <= 1; ++k) f[{a, k}] = Matrix(M.basis().dim({a, k}), N.basis().dim({a, k}));
  for (const auto& b : basis) {
    const int c = rng.coeff();
    for (auto& [k, m] : f) m = m + scaled(b.at(k), c);
  }
  return f;
}

// a chain map with every block invertible; the identity plus random chain maps of small weight
KeyMaps random_automorphism(Rng& rng, const RightModule& N) {
  for (int attempt = 0; attempt < 50; ++attempt) {
    KeyMaps f = random_chain_map(rng, N, N);
    bool ok = true;
    for (auto& [k, m] : f) {
      m = m + Matrix::identity(m.rows());
      if (!is_invertible(m)) ok = false;
    }
    if (ok) return f;
  }
  KeyMaps id;
  for (int a = 1; a <= 2; ++a)
    for (int k = 0; k <= 1; ++k) id[{a, k}] = Matrix::identity(N.basis().dim({a, k}));
  return id;
}

KeyMaps inverse_maps(const KeyMaps& f) {
  KeyMaps out;
  for (const auto& [k, m] : f) out[k] = *inverse(m);
  return out;
}

KeyMaps compose_maps(const KeyMaps& f, const KeyMaps& g) {
  KeyMaps out;
  for (const auto& [k, m] : g) out[k] = f.at(k) * m;
  return out;
}

enum class PairKind { Iso, Retract, General };

struct RandomPair {
  PairKind kind;
  Dg N, M;
  KeyMaps f, g;  // f: N -> M, g: M -> N
};

std::vector<RandomPair> random_pairs() {
  Rng rng(kSeed);
  std::vector<RandomPair> out;
  for (int i = 0; i < kRandomPairs; ++i) {
    const PairKind kind = static_cast<PairKind>(i % 3);
    const std::string tag = "n" + std::to_string(i) + "_";
    RandomPair p{kind, {}, {}, {}, {}};
    if (kind == PairKind::Iso) {
      p.N = random_dg(rng, tag, 2 + rng.below(2));
      p.M = p.N;
      p.f = random_automorphism(rng, *p.N.N);
      p.g = random_automorphism(rng, *p.N.N);
    } else if (kind == PairKind::Retract) {
      // N is a summand of M, moved by an automorphism phi: f = phi i, g = p phi^-1
      p.N = random_dg(rng, tag, 2);
      p.M = with_extra(p.N, rng, "m" + std::to_string(i) + "_");
      KeyMaps inc, proj;
      for (int a = 1; a <= 2; ++a)
        for (int k = 0; k <= 1; ++k) {
          const Key key{a, k};
          const std::size_t n = p.N.N->basis().dim(key), m = p.M.N->basis().dim(key);
          Matrix i_m(m, n), p_m(n, m);
          for (std::size_t j = 0; j < n; ++j) {
            i_m.set(j, j, 1);
            p_m.set(j, j, 1);
          }
          inc[key] = i_m;
          proj[key] = p_m;
        }
      KeyMaps phi = random_automorphism(rng, *p.M.N);
      p.f = compose_maps(phi, inc);
      p.g = compose_maps(proj, inverse_maps(phi));
    } else {
      p.N = random_dg(rng, tag, 2 + rng.below(2));
      p.M = random_dg(rng, "m" + std::to_string(i) + "_", 2 + rng.below(2));
      p.f = random_chain_map(rng, *p.N.N, *p.M.N);
      p.g = random_chain_map(rng, *p.M.N, *p.N.N);
    }
    out.push_back(std::move(p));
  }
  return out;
}

Outcome criterion_fbar(const std::vector<RandomPair>& pairs) {
  Outcome o;
  const int A = 2;
  std::size_t d_checks = 0, comp_checks = 0, isos = 0, retracts = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    const std::string tag = "pair " + std::to_string(i);
    // the pair really is a pair of chain maps
    for (const auto& [fm, src, dst] : {std::tuple{&p.f, p.N.N, p.M.N}, std::tuple{&p.g, p.M.N, p.N.N}})
      for (int a = 1; a <= 2; ++a)
        o.require(d_matrix(*dst, a) * fm->at({a, 1}) == fm->at({a, 0}) * d_matrix(*src, a),
                  tag + ": generated map is not a chain map");
    auto EN = std::make_shared<EndOperad>(p.N.N, A);
    auto EM = std::make_shared<EndOperad>(p.M.N, A);
    OperadMorphism fb = fbar(EN, EM, p.f, p.g);
    const Window w{A, EN->basis().keys().empty() ? 0 : EN->basis().min_degree(),
                   EN->basis().keys().empty() ? 0 : EN->basis().max_degree()};
    for (const auto& b : window_basis(EN->basis(), w)) {
      const Element lam = basis_element(b);
      ++d_checks;
      o.require(fb.apply(EN->diff(lam)) == EM->diff(fb.apply(lam)), tag + ": fbar does not commute with d");
    }
    if (p.kind == PairKind::Iso) {
      ++isos;
      OperadMorphism back = fbar(EM, EN, inverse_maps(p.f), inverse_maps(p.g));
      for (const Key& k : EN->basis().keys()) {
        o.require(is_invertible(fb.at(k)), tag + ": fbar not invertible in " + to_string(k));
        o.require(back.at(k) * fb.at(k) == Matrix::identity(EN->basis().dim(k)),
                  tag + ": fbar of the inverses is not inverse in " + to_string(k));
      }
    }
    if (p.kind == PairKind::Retract) {
      ++retracts;
      for (const auto& [k, m] : compose_maps(p.g, p.f))
        o.require(m == Matrix::identity(m.rows()), tag + ": g f != id");
      for (const auto& x : window_basis(EN->basis(), w))
        for (const auto& y : window_basis(EN->basis(), w)) {
          if (x.key.arity + y.key.arity - 1 > A) continue;
          for (int s = 1; s <= x.key.arity; ++s) {
            const Element lx = basis_element(x), ly = basis_element(y);
            ++comp_checks;
            o.require(fb.apply(EN->compose(lx, s, ly)) == EM->compose(fb.apply(lx), s, fb.apply(ly)),
                      tag + ": fbar does not preserve a composition");
          }
        }
      CheckReport r = check_morphism(fb, w, false);
      o.require(r.ok, tag + ": check_morphism: " + r.first());
    }
  }
  if (o.pass)
    o.detail = std::to_string(pairs.size()) + " pairs (" + std::to_string(isos) + " isomorphisms, " +
               std::to_string(retracts) + " retractions); " + std::to_string(d_checks) + " d-checks, " +
               std::to_string(comp_checks) + " compositions";
  return o;
}

// homology dimensions of a dg collection with differential from degree 1 to 0, by the rank oracle
std::map<Key, std::size_t> oracle_homology(const RightModule& N) {
  std::map<Key, std::size_t> h;
  for (int a = 1; a <= 2; ++a) {
    const std::size_t n1 = N.basis().dim({a, 1}), n0 = N.basis().dim({a, 0});
    std::vector<std::vector<mpq_class>> d(n0, std::vector<mpq_class>(n1, 0));
    for (std::size_t j = 0; j < n1; ++j)
      for (const auto& [i, x] : N.diff_basis(BasisRef{{a, 1}, j})) d[i][j] = x;
    const std::size_t r = n0 && n1 ? oracle_rank(d) : 0;
    if (n0 - r) h[{a, 0}] = n0 - r;
    if (n1 - r) h[{a, 1}] = n1 - r;
  }
  return h;
}

// dim End H(N)(n) in degree d: multilinear maps on N(i_1) x .. x N(i_n) -> N(i_1 + .. + i_n)
std::map<int, std::size_t> oracle_end_dims(const std::map<Key, std::size_t>& h, int n, int A) {
  std::map<int, std::size_t> out;
  std::function<void(int, int, int, std::size_t)> rec = [&](int left, int arity, int deg, std::size_t count) {
    if (left == 0) {
      for (const auto& [k, c] : h)
        if (k.arity == arity) out[k.degree - deg] += count * c;
      return;
    }
    for (const auto& [k, c] : h)
      if (arity + k.arity <= A) rec(left - 1, arity + k.arity, deg + k.degree, count * c);
  };
  rec(n, 0, 0, 1);
  for (auto it = out.begin(); it != out.end();) it = it->second ? std::next(it) : out.erase(it);
  return out;
}

Outcome criterion_kunneth(const std::vector<RandomPair>& pairs) {
  Outcome o;
  const int A = 3;
  std::size_t compared = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::string tag = "pair " + std::to_string(i);
    const auto& N = pairs[i].N.N;
    auto E = std::make_shared<EndOperad>(N, A);
    Kunneth k = kunneth_identification(E, A);
    o.require(k.invertible, tag + ": Kunneth map not invertible");
    for (const auto& [key, m] : k.matrices)
      o.require(is_invertible(m), tag + ": Kunneth matrix singular in " + to_string(key));
    const auto h = oracle_homology(*N);
    for (int n = 1; n <= A; ++n) {
      const auto expect = oracle_end_dims(h, n, A);
      std::map<int, std::size_t> got;
      ChainComplex C = E->complex(n);
      for (int d = C.lo(); d <= C.hi(); ++d)
        if (std::size_t x = Homology(C, d).dim()) got[d] = x;
      ++compared;
      o.require(got == expect, tag + ": dim H(End N)(" + std::to_string(n) + ") differs from dim End H(N)");
      std::map<int, std::size_t> built;
      for (const Key& key : k.end_homology->basis().keys())
        if (key.arity == n) built[key.degree] = k.end_homology->basis().dim(key);
      o.require(built == expect, tag + ": End H(N)(" + std::to_string(n) + ") has the wrong size");
    }
  }
  if (o.pass)
    o.detail = std::to_string(compared) + " (fixture, arity) dimension tables agree; every identification invertible";
  return o;
}

// ---------------------------------------------------------------- criterion 9

Outcome criterion_lifting() {
  Outcome o;
  const int maxdeg = 3;
  std::size_t problems = 0;
  for (const OperadPtr& Qp : {OperadPtr(group_algebra_operad(named_group("z2"))), OperadPtr(com_operad(3)),
                              OperadPtr(ass_operad(3)), OperadPtr(dual_numbers_operad())}) {
    const int A = std::min(3, Qp->max_arity());
    auto R = build_resolution(canonical(Qp), ResolutionOptions{A, maxdeg + 1, std::nullopt});
    auto Qmod = std::make_shared<CanonicalBimodule>(Qp);
    ModuleMap q = right_unit_map(R, Qmod, R->finite() ? maxdeg + 1 : R->top_degree());
    ModuleMap id{R, R, {}};
    for (const Key& k : R->basis().keys())
      if (k.degree <= maxdeg + 1) id.maps[k] = Matrix::identity(R->basis().dim(k));
    auto over_q = std::make_shared<const MappingCylinder>(Qmod, R, q);
    auto acyclic = std::make_shared<const MappingCylinder>(R, R, id);
    struct Problem {
      std::shared_ptr<const MappingCylinder> F;
      int scale;
    };
    for (const Problem& pr : {Problem{over_q, 1}, Problem{over_q, 2}, Problem{over_q, -1}, Problem{acyclic, 1},
                              Problem{acyclic, 3}}) {
      const std::string tag = Qp->name() + (pr.F == over_q ? " cylinder" : " acyclic extension") + " scale " +
                              std::to_string(pr.scale);
      ModuleMap g{R, R, {}};
      for (const auto& [k, m] : id.maps)
        if (k.degree <= maxdeg) g.maps[k] = scaled(m, pr.scale);
      ModuleMap f = cylinder_p1(pr.F);
      GeneratorFiltration filt = generator_filtration(*R, maxdeg);
      o.require(filt.hypothesis.ok, tag + ": filtration hypothesis fails: " + filt.hypothesis.first());
      if (!filt.hypothesis.ok) continue;
      LiftResult res = lift(LiftProblem{R, f, g, maxdeg, std::nullopt, std::nullopt});
      ++problems;
      o.require(res.verified.ok, tag + ": " + res.verified.first());
      for (const Key& k : R->basis().keys()) {
        if (k.degree > maxdeg) continue;
        o.require(f.at(k) * res.s.at(k) == g.at(k), tag + ": f s != g in " + to_string(k));
        for (std::size_t i = 0; i < R->basis().dim(k); ++i) {
          const Element v = basis_element(BasisRef{k, i});
          o.require(pr.F->diff(res.s.apply(v)) == res.s.apply(R->diff(v)), tag + ": d s != s d");
        }
      }
    }
  }
  o.require(problems == static_cast<std::size_t>(kLiftProblems),
            std::to_string(problems) + " lifting problems instead of " + std::to_string(kLiftProblems));
  if (o.pass) o.detail = std::to_string(problems) + " lifts with f s = g and d s = s d exactly";
  return o;
}

}  // namespace

int main() {
  bool all = true;
  auto report = [&](int n, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    all = all && o.pass;
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << " (" << o.detail << ")" << std::endl;
  };

  report(1, criterion_strict);
  std::vector<ResolvedFixture> fx;
  double build_seconds = 0;
  report(2, [&] {
    const auto t0 = Clock::now();
    fx = resolved_fixtures();
    build_seconds = seconds_since(t0);
    return criterion_d_squared(fx, build_seconds);
  });
  report(3, [&] { return criterion_projection(fx); });
  report(4, [&] { return criterion_retraction(fx); });
  report(5, criterion_diagram);
  report(6, criterion_end_to_end);
  std::vector<RandomPair> pairs;
  report(7, [&] {
    pairs = random_pairs();
    return criterion_fbar(pairs);
  });
  report(8, [&] { return criterion_kunneth(pairs); });
  report(9, criterion_lifting);
  return all ? 0 : 1;
}
