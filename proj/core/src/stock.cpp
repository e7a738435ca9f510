#include "optor/stock.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

namespace optor {

TabulatedOperad::TabulatedOperad(std::string name, Collection basis, int max_arity) {
  name_ = std::move(name);
  basis_ = std::move(basis);
  max_arity_ = max_arity;
}

void TabulatedOperad::set_composition(const BasisRef& p, int slot, const BasisRef& q, Vec v) {
  if (v.empty())
    comp_.erase({p, slot, q});
  else
    comp_[{p, slot, q}] = std::move(v);
}

void TabulatedOperad::set_differential(const BasisRef& p, Vec v) {
  if (v.empty()) {
    diff_.erase(p);
    return;
  }
  diff_[p] = std::move(v);
  has_differential_ = true;
}

void TabulatedOperad::set_action(Key k, const Perm& sigma, Matrix m) {
  if (static_cast<int>(sigma.size()) != k.arity || !is_perm(sigma))
    throw ContractError("action permutation does not match arity " + std::to_string(k.arity));
  if (m.rows() != basis_.dim(k) || m.cols() != basis_.dim(k))
    throw ContractError("action matrix has wrong shape on component " + to_string(k));
  act_[k][sigma] = std::move(m);
}

void TabulatedOperad::finalize() {
  // right action: R(st) = R(t) R(s)
  for (auto& [k, table] : act_) {
    std::size_t n = basis_.dim(k);
    table.emplace(identity_perm(k.arity), Matrix::identity(n));
    std::vector<std::pair<Perm, Matrix>> gens(table.begin(), table.end());
    std::deque<Perm> todo;
    for (const auto& [p, _] : table) todo.push_back(p);
    while (!todo.empty()) {
      Perm s = todo.front();
      todo.pop_front();
      Matrix rs = table.at(s);
      for (const auto& [t, rt] : gens) {
        Perm st = compose_perm(s, t);
        if (table.count(st)) continue;
        table.emplace(st, rt * rs);
        todo.push_back(st);
      }
    }
  }
}

Vec TabulatedOperad::compose_basis(const BasisRef& p, int slot, const BasisRef& q) const {
  composite_key(*this, p.key, slot, q.key);
  auto it = comp_.find({p, slot, q});
  return it == comp_.end() ? Vec{} : it->second;
}

Vec TabulatedOperad::diff_basis(const BasisRef& p) const {
  auto it = diff_.find(p);
  return it == diff_.end() ? Vec{} : it->second;
}

Vec TabulatedOperad::act_basis(const BasisRef& p, const Perm& sigma) const {
  if (sigma == identity_perm(p.key.arity)) return Vec::unit(p.index);
  if (!symmetric_) return Operad::act_basis(p, sigma);
  auto it = act_.find(p.key);
  if (it != act_.end()) {
    auto jt = it->second.find(sigma);
    if (jt != it->second.end()) return jt->second.col(p.index);
  }
  throw ContractError("no action of [" + format_perm(sigma) + "] stored on " + to_string(p.key) + " of '" + name_ +
                      "'");
}

std::shared_ptr<TabulatedOperad> tabulate(const Operad& P) {
  auto T = std::make_shared<TabulatedOperad>(P.name(), P.basis(), P.max_arity());
  const Collection& C = P.basis();
  auto keys = C.keys();
  for (const Key& a : keys)
    for (std::size_t i = 0; i < C.dim(a); ++i) {
      BasisRef pa{a, i};
      T->set_differential(pa, P.diff_basis(pa));
      for (const Key& b : keys) {
        if (a.arity + b.arity - 1 > P.max_arity()) continue;
        for (std::size_t j = 0; j < C.dim(b); ++j)
          for (int s = 1; s <= a.arity; ++s) T->set_composition(pa, s, BasisRef{b, j}, P.compose_basis(pa, s, BasisRef{b, j}));
      }
    }
  T->set_unit(P.unit());
  if (P.augmentation()) T->set_augmentation(*P.augmentation());
  T->set_symmetric(P.symmetric());
  if (P.symmetric())
    for (const Key& k : keys) {
      for (int t = 1; t < k.arity; ++t) {
        Perm s = identity_perm(k.arity);
        std::swap(s[t - 1], s[t]);
        T->set_action(k, s, matrix_of(C, k, C.dim(k), [&](const BasisRef& b) { return P.act_basis(b, s); }));
      }
    }
  T->finalize();
  return T;
}

// ---- groups ----

void GroupTable::validate() const {
  const int n = static_cast<int>(elements.size());
  if (n == 0) throw ContractError("not a group: empty element list");
  std::set<std::string> seen(elements.begin(), elements.end());
  if (static_cast<int>(seen.size()) != n) throw ContractError("not a group: duplicate element names");
  if (static_cast<int>(mult.size()) != n) throw ContractError("not a group: table is not square");
  for (int a = 0; a < n; ++a) {
    if (static_cast<int>(mult[a].size()) != n) throw ContractError("not a group: table is not square");
    for (int b = 0; b < n; ++b)
      if (mult[a][b] < 0 || mult[a][b] >= n)
        throw ContractError("not a group: closure fails at (" + elements[a] + ", " + elements[b] + ")");
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (mult[mult[a][b]][c] != mult[a][mult[b][c]])
          throw ContractError("not a group: associativity fails at (" + elements[a] + ", " + elements[b] + ", " +
                              elements[c] + ")");
  int e = identity();
  if (e < 0) throw ContractError("not a group: no identity element");
  for (int a = 0; a < n; ++a)
    if (inverse(a) < 0) throw ContractError("not a group: " + elements[a] + " has no inverse");
}

int GroupTable::identity() const {
  const int n = static_cast<int>(elements.size());
  for (int e = 0; e < n; ++e) {
    bool ok = true;
    for (int a = 0; a < n && ok; ++a) ok = mult[e][a] == a && mult[a][e] == a;
    if (ok) return e;
  }
  return -1;
}

int GroupTable::inverse(int a) const {
  int e = identity();
  for (int b = 0; b < static_cast<int>(elements.size()); ++b)
    if (mult[a][b] == e && mult[b][a] == e) return b;
  return -1;
}

namespace {

GroupTable cyclic(int n) {
  GroupTable g;
  g.name = "z" + std::to_string(n);
  for (int k = 0; k < n; ++k) g.elements.push_back(k == 0 ? "e" : k == 1 ? "g" : "g" + std::to_string(k));
  g.mult.assign(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) g.mult[a][b] = (a + b) % n;
  return g;
}

GroupTable klein() {
  GroupTable g;
  g.name = "v4";
  g.elements = {"e", "a", "b", "c"};
  g.mult.assign(4, std::vector<int>(4));
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) g.mult[a][b] = a ^ b;
  return g;
}

GroupTable symmetric3() {
  // products compose right to left: (ab)(x) = a(b(x))
  GroupTable g;
  g.name = "s3";
  g.elements = {"e", "(12)", "(13)", "(23)", "(123)", "(132)"};
  std::vector<Perm> p = {{1, 2, 3}, {2, 1, 3}, {3, 2, 1}, {1, 3, 2}, {2, 3, 1}, {3, 1, 2}};
  g.mult.assign(6, std::vector<int>(6));
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      Perm ab = compose_perm(p[a], p[b]);
      g.mult[a][b] = static_cast<int>(std::find(p.begin(), p.end(), ab) - p.begin());
    }
  return g;
}

}  // namespace

std::vector<std::string> named_group_names() { return {"z1", "z2", "z3", "z4", "v4", "z2xz2", "z5", "z6", "s3"}; }

GroupTable named_group(const std::string& name) {
  if (name.size() == 2 && name[0] == 'z' && name[1] >= '1' && name[1] <= '6') return cyclic(name[1] - '0');
  if (name == "v4" || name == "z2xz2") return klein();
  if (name == "s3") return symmetric3();
  throw std::invalid_argument("unknown group '" + name + "'");
}

std::shared_ptr<TabulatedOperad> group_algebra_operad(const GroupTable& g) {
  g.validate();
  Collection c;
  c.set_component(Key{1, 0}, g.elements);
  auto P = std::make_shared<TabulatedOperad>("Q[" + g.name + "]", c, 1);
  const Key k{1, 0};
  const std::size_t n = g.elements.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      P->set_composition(BasisRef{k, a}, 1, BasisRef{k, b}, Vec::unit(static_cast<std::size_t>(g.mult[a][b])));
  P->set_unit(basis_element(BasisRef{k, static_cast<std::size_t>(g.identity())}));
  Vec eps;
  for (std::size_t a = 0; a < n; ++a) eps.set(a, 1);
  P->set_augmentation(eps);
  P->set_symmetric(true);
  return P;
}

std::shared_ptr<TabulatedOperad> com_operad(int n_max) {
  if (n_max < 1) throw ContractError("com_operad: maximal arity must be at least 1");
  Collection c;
  for (int n = 1; n <= n_max; ++n) c.set_component(Key{n, 0}, {"c" + std::to_string(n)});
  auto P = std::make_shared<TabulatedOperad>("Com", c, n_max);
  for (int a = 1; a <= n_max; ++a)
    for (int b = 1; a + b - 1 <= n_max; ++b)
      for (int i = 1; i <= a; ++i) P->set_composition(BasisRef{{a, 0}, 0}, i, BasisRef{{b, 0}, 0}, Vec::unit(0));
  P->set_unit(basis_element(BasisRef{{1, 0}, 0}));
  P->set_augmentation(Vec::unit(0));
  P->set_symmetric(true);
  for (int n = 2; n <= n_max; ++n)
    for (int t = 1; t < n; ++t) {
      Perm s = identity_perm(n);
      std::swap(s[t - 1], s[t]);
      P->set_action(Key{n, 0}, s, Matrix::identity(1));
    }
  P->finalize();
  return P;
}

std::shared_ptr<TabulatedOperad> ass_operad(int n_max) {
  if (n_max < 1) throw ContractError("ass_operad: maximal arity must be at least 1");
  // the word w is the operation x_{w1} x_{w2} ... x_{wn}
  std::vector<std::vector<Perm>> words(n_max + 1);
  std::vector<std::map<Perm, std::size_t>> index(n_max + 1);
  Collection c;
  for (int n = 1; n <= n_max; ++n) {
    words[n] = all_perms(n);
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < words[n].size(); ++k) {
      index[n][words[n][k]] = k;
      std::string l;
      for (int x : words[n][k]) l += "x" + std::to_string(x);
      labels.push_back(l);
    }
    c.set_component(Key{n, 0}, labels);
  }
  auto P = std::make_shared<TabulatedOperad>("Ass", c, n_max);
  for (int n = 1; n <= n_max; ++n)
    for (int m = 1; n + m - 1 <= n_max; ++m)
      for (std::size_t a = 0; a < words[n].size(); ++a)
        for (std::size_t b = 0; b < words[m].size(); ++b)
          for (int i = 1; i <= n; ++i) {
            Perm r;
            for (int l : words[n][a]) {
              if (l == i)
                for (int u : words[m][b]) r.push_back(u + i - 1);
              else
                r.push_back(l < i ? l : l + m - 1);
            }
            P->set_composition(BasisRef{{n, 0}, a}, i, BasisRef{{m, 0}, b}, Vec::unit(index[n + m - 1].at(r)));
          }
  P->set_unit(basis_element(BasisRef{{1, 0}, 0}));
  P->set_augmentation(Vec::unit(0));
  P->set_symmetric(true);
  // w.s = s^{-1} o w
  for (int n = 2; n <= n_max; ++n)
    for (int t = 1; t < n; ++t) {
      Perm s = identity_perm(n);
      std::swap(s[t - 1], s[t]);
      Perm si = inverse_perm(s);
      Matrix m(words[n].size(), words[n].size());
      for (std::size_t a = 0; a < words[n].size(); ++a)
        m.set(index[n].at(compose_perm(si, words[n][a])), a, 1);
      P->set_action(Key{n, 0}, s, m);
    }
  P->finalize();
  return P;
}

std::shared_ptr<TabulatedOperad> dual_numbers_operad() {
  Collection c;
  c.set_component(Key{1, 0}, {"1", "y"});
  c.set_component(Key{1, 1}, {"x"});
  auto P = std::make_shared<TabulatedOperad>("Dual", c, 1);
  BasisRef one{{1, 0}, 0}, y{{1, 0}, 1}, x{{1, 1}, 0};
  for (const BasisRef& b : {one, y, x}) {
    P->set_composition(one, 1, b, Vec::unit(b.index));
    P->set_composition(b, 1, one, Vec::unit(b.index));
  }
  P->set_differential(x, Vec::unit(1));
  P->set_unit(basis_element(one));
  P->set_augmentation(Vec::unit(0));
  P->set_symmetric(true);
  return P;
}

// ---- augmentation kernel ----

namespace {

std::string combination_label(const Collection& c, Key k, const Vec& v, std::size_t lead) {
  std::string s = c.labels(k).at(lead);
  for (const auto& [i, a] : v) {
    if (i == lead) continue;
    std::string coef = format_scalar(abs(a));
    s += (sgn(a) < 0 ? "-" : "+");
    if (coef != "1") s += coef + "*";
    s += c.labels(k).at(i);
  }
  return s;
}

}  // namespace

std::optional<Vec> AugmentationKernel::coords(Key k, const Vec& v) const {
  if (v.empty()) return Vec{};
  auto it = spans_.find(k);
  if (it == spans_.end()) return std::nullopt;
  return it->second.coords(v);
}

Vec AugmentationKernel::diff_basis(const BasisRef& b) const {
  Element dv = op->diff(Element{b.key, embed(b)});
  Key t{b.key.arity, b.key.degree - 1};
  auto c = coords(t, dv.v);
  if (!c) throw ContractError("differential leaves the augmentation ideal at " + basis.label(b));
  return *c;
}

AugmentationKernel augmentation_kernel(const OperadPtr& Q) {
  if (!Q->augmentation()) throw ContractError("operad '" + Q->name() + "' is not augmented");
  AugmentationKernel K;
  K.op = Q;
  const Collection& C = Q->basis();
  for (const Key& k : C.keys()) {
    std::vector<Vec> vs;
    std::vector<std::string> labels;
    if (k == Key{1, 0}) {
      Matrix eps(1, C.dim(k));
      for (const auto& [i, a] : *Q->augmentation()) eps.set(0, i, a);
      for (const Vec& v : kernel_basis(eps)) {
        // kernel vectors carry a 1 at their dependent column; name them after it
        std::size_t lead = v.map().rbegin()->first;
        for (const auto& [i, a] : v)
          if (a == 1) lead = i;
        labels.push_back(v.nnz() == 1 ? C.labels(k).at(lead) : combination_label(C, k, v, lead));
        vs.push_back(v);
      }
    } else {
      for (std::size_t i = 0; i < C.dim(k); ++i) {
        vs.push_back(Vec::unit(i));
        labels.push_back(C.labels(k)[i]);
      }
    }
    if (vs.empty()) continue;
    K.basis.set_component(k, labels);
    Span sp;
    for (const Vec& v : vs) sp.add(v);
    K.spans_.emplace(k, std::move(sp));
    K.vectors.emplace(k, std::move(vs));
  }
  return K;
}

AugmentationKernel whole_operad(const OperadPtr& Q) {
  AugmentationKernel K;
  K.op = Q;
  const Collection& C = Q->basis();
  for (const Key& k : C.keys()) {
    std::vector<Vec> vs;
    Span sp;
    for (std::size_t i = 0; i < C.dim(k); ++i) {
      vs.push_back(Vec::unit(i));
      sp.add(vs.back());
    }
    K.basis.set_component(k, C.labels(k));
    K.spans_.emplace(k, std::move(sp));
    K.vectors.emplace(k, std::move(vs));
  }
  return K;
}

// ---- unit adjoining ----

AdjoinedUnitOperad::AdjoinedUnitOperad(OperadPtr Q) : Q_(std::move(Q)) {
  if (Q_->unit().key != Key{1, 0}) throw ContractError("adjoin_unit: unit of '" + Q_->name() + "' is malformed");
  name_ = Q_->name() + "^1";
  max_arity_ = Q_->max_arity();
  const Collection& C = Q_->basis();
  std::string u = "@1";
  while (C.find(Key{1, 0}, u)) u = "@" + u;
  for (const Key& k : C.keys()) {
    std::vector<std::string> labels = C.labels(k);
    if (k == Key{1, 0}) labels.insert(labels.begin(), u);
    basis_.set_component(k, labels);
  }
  if (!basis_.has(Key{1, 0})) basis_.set_component(Key{1, 0}, {u});
  unit_ = basis_element(BasisRef{{1, 0}, 0});
  augmentation_ = Vec::unit(0);
  symmetric_ = Q_->symmetric();
  has_differential_ = Q_->has_differential();
}

Vec AdjoinedUnitOperad::lift(Key k, const Vec& v) const {
  if (offset(k) == 0) return v;
  Vec out;
  for (const auto& [i, a] : v) out.set(i + 1, a);
  return out;
}

Vec AdjoinedUnitOperad::lower(Key k, const Vec& v) const {
  if (offset(k) == 0) return v;
  Vec out;
  for (const auto& [i, a] : v) {
    if (i == 0) throw ContractError("adjoined unit has no image in the original operad");
    out.set(i - 1, a);
  }
  return out;
}

Vec AdjoinedUnitOperad::compose_basis(const BasisRef& p, int slot, const BasisRef& q) const {
  Key r = composite_key(*this, p.key, slot, q.key);
  const bool pu = p.key == Key{1, 0} && p.index == 0;
  const bool qu = q.key == Key{1, 0} && q.index == 0;
  if (pu) return Vec::unit(q.index);
  if (qu) return Vec::unit(p.index);
  BasisRef op{p.key, p.index - offset(p.key)}, oq{q.key, q.index - offset(q.key)};
  return lift(r, Q_->compose_basis(op, slot, oq));
}

Vec AdjoinedUnitOperad::diff_basis(const BasisRef& p) const {
  if (p.key == Key{1, 0} && p.index == 0) return {};
  return lift(Key{p.key.arity, p.key.degree - 1}, Q_->diff_basis(BasisRef{p.key, p.index - offset(p.key)}));
}

Vec AdjoinedUnitOperad::act_basis(const BasisRef& p, const Perm& sigma) const {
  if (p.key == Key{1, 0} && p.index == 0) return Vec::unit(0);
  return lift(p.key, Q_->act_basis(BasisRef{p.key, p.index - offset(p.key)}, sigma));
}

UnitAdjunction adjoin_unit(const OperadPtr& Q) {
  auto A = std::make_shared<const AdjoinedUnitOperad>(Q);
  UnitAdjunction u{A, OperadMorphism{A, Q, {}}, OperadMorphism{Q, A, {}}};
  for (const Key& k : A->basis().keys()) {
    std::size_t n = Q->basis().dim(k);
    Matrix down(n, A->basis().dim(k)), up(A->basis().dim(k), n);
    for (std::size_t i = 0; i < n; ++i) {
      down.set(i, i + A->offset(k), 1);
      up.set(i + A->offset(k), i, 1);
    }
    if (k == Key{1, 0}) down.set_col(0, Q->unit().v);
    u.to_original.maps[k] = down;
    if (n) u.from_original.maps[k] = up;
  }
  return u;
}

}  // namespace optor
