#include "optor/resolution.hpp"

#include <functional>
#include <set>
#include <unordered_set>

namespace optor {

namespace {

using Kind = TreeNode::Kind;

int node_arity(const TreeNode& n) { return n.kind == Kind::Leaf ? 0 : n.label.key.arity; }

long long shifted(const TreeNode& n) { return n.label.key.degree + (n.kind == Kind::Inner ? 1 : 0); }

struct Shape {
  std::vector<std::size_t> end;     // one past the last node of the subtree
  std::vector<std::size_t> parent;  // parent index (root: itself)
  std::vector<int> slot;            // 1-based position among the parent's children
  std::vector<long long> prefix;    // prefix[i] = sum of shifted degrees of nodes < i
};

Shape shape_of(const Tree& t) {
  Shape s;
  const std::size_t n = t.size();
  s.end.assign(n, 0);
  s.parent.assign(n, 0);
  s.slot.assign(n, 0);
  s.prefix.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) s.prefix[i + 1] = s.prefix[i] + shifted(t[i]);
  std::function<std::size_t(std::size_t)> walk = [&](std::size_t i) {
    std::size_t next = i + 1;
    for (int c = 1; c <= node_arity(t[i]); ++c) {
      s.parent[next] = i;
      s.slot[next] = c;
      next = walk(next);
    }
    s.end[i] = next;
    return next;
  };
  walk(0);
  return s;
}

bool negative_degrees(const Collection& c) { return !c.keys().empty() && c.min_degree() < 0; }

}  // namespace

// ---------------------------------------------------------------- construction

Resolution::Resolution(BimodulePtr M, AugmentationKernel inner, ResolutionOptions opt)
    : M_(std::move(M)), K_(std::move(inner)), opt_(opt) {
  name_ = M_->name() + "_inf";
  left_ = M_->left_operad();
  right_ = M_->right_operad();
  max_arity_ = opt_.max_arity;
  has_differential_ = true;
  const Operad& Q = *right_;
  const Element& u = Q.unit();
  if (u.key != Key{1, 0} || u.v.nnz() != 1 || u.v.begin()->second != 1)
    throw ContractError("the unit of '" + Q.name() + "' must be a basis element");
  unit_leaf_ = u.v.begin()->first;
  for (const Key& k : Q.basis().keys())
    if (k.arity == 0) throw ContractError("operations of arity 0 are not supported in the resolution");
  enumerate();
  if (M_->torsor_unit() && M_->torsor_unit()->key == Key{1, 0}) {
    Element c{Key{1, 0}, {}};
    for (const auto& [i, a] : M_->torsor_unit()->v) {
      Tree t{TreeNode{Kind::Root, BasisRef{{1, 0}, i}}, TreeNode{Kind::Leaf, BasisRef{{1, 0}, unit_leaf_}}};
      c.v.add(locate(t, Key{1, 0}).index, a);
    }
    unit_ = c;
  }
}

void Resolution::enumerate() {
  const Collection& MB = M_->basis();
  const Collection& KB = K_.basis;
  const Collection& QB = right_->basis();
  const int A = opt_.max_arity;
  const bool negative = negative_degrees(MB) || negative_degrees(KB) || negative_degrees(QB);
  bool unary_inner = false;
  for (const Key& k : KB.keys())
    if (k.arity == 1) unary_inner = true;
  if (negative && !opt_.node_cap)
    throw WindowError("labels in negative degrees: the enumeration needs an inner-node cap");
  finite_ = !negative && !unary_inner;
  capped_ = negative;
  const bool prune = !negative && !finite_;
  const int hi = opt_.max_degree;
  const int budget = negative ? *opt_.node_cap : (finite_ ? A : hi + 1);

  auto leaves = window_basis(QB, Window{A, QB.keys().empty() ? 0 : QB.min_degree(), QB.keys().empty() ? -1 : QB.max_degree()});
  auto inners = window_basis(KB, Window{A, KB.keys().empty() ? 0 : KB.min_degree(), KB.keys().empty() ? -1 : KB.max_degree()});
  std::map<Key, std::vector<std::string>> labels;
  Tree cur;
  std::function<void(int, int, int, long long)> rec = [&](int pending, int used, int inner_used, long long deg) {
    if (pending == 0) {
      Key k{used, static_cast<int>(deg)};
      BasisRef b{k, trees_[k].size()};
      trees_[k].push_back(cur);
      index_.emplace(cur, b);
      labels[k].push_back(render(cur));
      return;
    }
    if (used + pending > A) return;
    for (const auto& q : leaves) {
      if (used + q.key.arity + (pending - 1) > A) continue;
      if (prune && deg + q.key.degree > hi) continue;
      cur.push_back(TreeNode{Kind::Leaf, q});
      rec(pending - 1, used + q.key.arity, inner_used, deg + q.key.degree);
      cur.pop_back();
    }
    if (inner_used >= budget) return;
    for (const auto& c : inners) {
      if (used + pending - 1 + c.key.arity > A) continue;
      if (prune && deg + c.key.degree + 1 > hi) continue;
      cur.push_back(TreeNode{Kind::Inner, c});
      rec(pending - 1 + c.key.arity, used, inner_used + 1, deg + c.key.degree + 1);
      cur.pop_back();
    }
  };
  for (const Key& k : MB.keys()) {
    if (k.arity > A || (prune && k.degree > hi)) continue;
    for (std::size_t i = 0; i < MB.dim(k); ++i) {
      cur.assign(1, TreeNode{Kind::Root, BasisRef{k, i}});
      rec(k.arity, 0, 0, k.degree);
    }
  }
  for (auto& [k, ls] : labels) {
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < ls.size(); ++i)
      if (!seen.insert(ls[i]).second) {
        ls[i] += "#" + std::to_string(i);
        seen.insert(ls[i]);
      }
    basis_.set_component(k, std::move(ls));
  }
  if (basis_.keys().empty()) {
    bottom_ = 0;
    top_ = finite_ ? -1 : hi;
  } else {
    bottom_ = basis_.min_degree();
    top_ = (finite_ || negative) ? basis_.max_degree() : hi;
  }
}

std::string Resolution::render(const Tree& t) const {
  std::string out;
  std::size_t pos = 0;
  std::function<void()> walk = [&]() {
    const TreeNode& n = t[pos++];
    switch (n.kind) {
      case Kind::Root: out += M_->basis().label(n.label); break;
      case Kind::Inner: out += "[" + K_.basis.label(n.label) + "]"; break;
      case Kind::Leaf: out += right_->basis().label(n.label); break;
    }
    const int a = node_arity(n);
    if (a == 0) return;
    out += "(";
    for (int c = 0; c < a; ++c) {
      if (c) out += ",";
      walk();
    }
    out += ")";
  };
  walk();
  return out;
}

std::optional<BasisRef> Resolution::find(const Tree& t) const {
  auto it = index_.find(t);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

BasisRef Resolution::locate(const Tree& t, Key expect) const {
  auto it = index_.find(t);
  if (it != index_.end()) {
    if (it->second.key != expect)
      throw ContractError("tree " + render(t) + " found in " + to_string(it->second.key) + ", expected " +
                          to_string(expect));
    return it->second;
  }
  int inner = 0;
  for (const auto& n : t)
    if (n.kind == Kind::Inner) ++inner;
  if (expect.degree > top_ || expect.arity > opt_.max_arity || (opt_.node_cap && inner > *opt_.node_cap))
    throw WindowError("tree " + render(t) + " lies outside the enumerated window");
  throw ContractError("tree " + render(t) + " is missing from the enumeration");
}

int Resolution::inner_count(const BasisRef& b) const {
  int c = 0;
  for (const auto& n : tree(b))
    if (n.kind == Kind::Inner) ++c;
  return c;
}

bool Resolution::is_skeleton(const BasisRef& b) const {
  for (const auto& n : tree(b))
    if (n.kind == Kind::Leaf && n.label != BasisRef{{1, 0}, unit_leaf_}) return false;
  return true;
}

bool Resolution::complete_above(int) const { return finite_; }

bool Resolution::complete_below(int) const {
  bool negative = negative_degrees(M_->basis()) || negative_degrees(K_.basis) || negative_degrees(right_->basis());
  return !negative;
}

std::pair<int, int> Resolution::stored_degrees(int arity) const {
  if (finite_) return RightModule::stored_degrees(arity);
  return {bottom_, top_};
}

// ---------------------------------------------------------------- differential

void Resolution::add_terms(const BasisRef& b, bool internal_only, Vec& out) const {
  const Tree& t = tree(b);
  const Key target{b.key.arity, b.key.degree - 1};
  const Shape sh = shape_of(t);
  const Operad& Q = *right_;
  const std::size_t n = t.size();
  auto emit = [&](const Tree& nt, const Scalar& c) { out.add(locate(nt, target).index, c); };

  for (std::size_t i = 0; i < n; ++i) {
    const TreeNode& node = t[i];
    const Key dk{node.label.key.arity, node.label.key.degree - 1};
    const int sign = koszul(sh.prefix[i]);
    Vec d;
    switch (node.kind) {
      case Kind::Root: d = M_->diff_basis(node.label); break;
      case Kind::Inner: d = K_.diff_basis(node.label).scaled(-1); break;
      case Kind::Leaf: d = Q.diff_basis(node.label); break;
    }
    for (const auto& [z, c] : d) {
      Tree nt = t;
      nt[i].label = BasisRef{dk, z};
      emit(nt, c * sign);
    }
  }
  if (internal_only) return;

  // an inner node j contracted into its parent i
  for (std::size_t j = 1; j < n; ++j) {
    if (t[j].kind != Kind::Inner) continue;
    const std::size_t i = sh.parent[j];
    const int k = sh.slot[j];
    const BasisRef& cj = t[j].label;
    const int move = koszul((cj.key.degree + 1) * (sh.prefix[j] - sh.prefix[i + 1]));
    const Element ej{cj.key, K_.embed(cj)};
    Tree nt = t;
    nt.erase(nt.begin() + static_cast<std::ptrdiff_t>(j));
    if (t[i].kind == Kind::Root) {
      Element x = M_->right(basis_element(t[i].label), k, ej);
      const int sign = koszul(sh.prefix[i]) * koszul(t[i].label.key.degree) * move;
      for (const auto& [z, c] : x.v) {
        nt[i].label = BasisRef{x.key, z};
        emit(nt, c * sign);
      }
    } else {
      const BasisRef& ci = t[i].label;
      Element x = Q.compose(Element{ci.key, K_.embed(ci)}, k, ej);
      auto coords = K_.coords(x.key, x.v);
      if (!coords) throw ContractError("composite of inner labels leaves the augmentation ideal");
      const int sign = koszul(sh.prefix[i]) * koszul(ci.key.degree + 1) * move;
      for (const auto& [z, c] : *coords) {
        nt[i].label = BasisRef{x.key, z};
        emit(nt, c * sign);
      }
    }
  }

  // a lowest inner node absorbing its leaves
  for (std::size_t i = 1; i < n; ++i) {
    if (t[i].kind != Kind::Inner) continue;
    const int a = node_arity(t[i]);
    bool lowest = true;
    for (int c = 1; c <= a; ++c)
      if (t[i + c].kind != Kind::Leaf) lowest = false;
    if (!lowest) continue;
    std::vector<Element> args;
    for (int c = 1; c <= a; ++c) args.push_back(basis_element(t[i + c].label));
    Element x = total_compose(Q, Element{t[i].label.key, K_.embed(t[i].label)}, args);
    const int sign = -koszul(sh.prefix[i]);
    for (const auto& [z, c] : x.v) {
      Tree nt(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(i));
      nt.push_back(TreeNode{Kind::Leaf, BasisRef{x.key, z}});
      nt.insert(nt.end(), t.begin() + static_cast<std::ptrdiff_t>(i + a + 1), t.end());
      emit(nt, c * sign);
    }
  }
}

Vec Resolution::diff_basis(const BasisRef& m) const {
  Vec out;
  add_terms(m, false, out);
  return out;
}

Vec Resolution::diff_internal(const BasisRef& m) const {
  Vec out;
  add_terms(m, true, out);
  return out;
}

// ---------------------------------------------------------------- actions

Vec Resolution::right_basis(const BasisRef& m, int slot, const BasisRef& q) const {
  const Key rk = right_key(*this, m.key, slot, q.key);
  const Tree& t = tree(m);
  const Shape sh = shape_of(t);
  int offset = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i].kind != Kind::Leaf) continue;
    const int a = t[i].label.key.arity;
    if (slot > offset + a) {
      offset += a;
      continue;
    }
    Element x = right_->compose(basis_element(t[i].label), slot - offset, basis_element(q));
    const int sign = koszul(static_cast<long long>(q.key.degree) * (sh.prefix[t.size()] - sh.prefix[i + 1]));
    Vec out;
    for (const auto& [z, c] : x.v) {
      Tree nt = t;
      nt[i].label = BasisRef{x.key, z};
      out.add(locate(nt, rk).index, c * sign);
    }
    return out;
  }
  throw ContractError("slot " + std::to_string(slot) + " out of range");
}

Vec Resolution::left_basis(const BasisRef& p, std::span<const BasisRef> ms) const {
  std::vector<Key> keys;
  for (const auto& m : ms) keys.push_back(m.key);
  const Key lk = left_key(*this, p.key, keys);
  std::vector<Element> roots;
  long long sign_exp = 0, before = 0;
  for (const auto& m : ms) {
    const BasisRef& r = tree(m).front().label;
    roots.push_back(basis_element(r));
    sign_exp += static_cast<long long>(r.key.degree) * before;
    before += m.key.degree - r.key.degree;
  }
  Element x = M_->left(basis_element(p), roots);
  Vec out;
  for (const auto& [z, c] : x.v) {
    Tree nt{TreeNode{Kind::Root, BasisRef{x.key, z}}};
    for (const auto& m : ms) {
      const Tree& t = tree(m);
      nt.insert(nt.end(), t.begin() + 1, t.end());
    }
    out.add(locate(nt, lk).index, c * koszul(sign_exp));
  }
  return out;
}

// ---------------------------------------------------------------- free generators

Resolution::Skeleton Resolution::skeleton_of(const BasisRef& b) const {
  auto it = skeleton_cache_.find(b);
  if (it != skeleton_cache_.end()) return it->second;
  Skeleton s;
  Tree sk = tree(b);
  int deg = b.key.degree;
  for (auto& n : sk) {
    if (n.kind != Kind::Leaf) continue;
    s.leaves.push_back(n.label);
    deg -= n.label.key.degree;
    n.label = BasisRef{{1, 0}, unit_leaf_};
  }
  s.skeleton = locate(sk, Key{static_cast<int>(s.leaves.size()), deg});
  std::vector<Element> qs;
  for (const auto& q : s.leaves) qs.push_back(basis_element(q));
  Element back = total_right(*this, basis_element(s.skeleton), qs);
  if (back.key != b.key || back.v.nnz() != 1 || back.v.begin()->first != b.index)
    throw ContractError("tree " + basis_.label(b) + " is not a skeleton acted on by its leaves");
  const Scalar& c = back.v.begin()->second;
  if (c != 1 && c != -1) throw ContractError("unexpected coefficient in the free decomposition");
  s.sign = c > 0 ? 1 : -1;
  skeleton_cache_.emplace(b, s);
  return s;
}

std::map<std::vector<BasisRef>, Element> Resolution::decompose(const Element& x) const {
  std::map<std::vector<BasisRef>, Element> out;
  for (const auto& [i, c] : x.v) {
    Skeleton s = skeleton_of(BasisRef{x.key, i});
    auto [it, fresh] = out.try_emplace(s.leaves, Element{s.skeleton.key, {}});
    it->second.v.add(s.skeleton.index, c * s.sign);
  }
  for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
  return out;
}

ResolutionPtr build_resolution(const BimodulePtr& M, const ResolutionOptions& opt) {
  const OperadPtr& Q = M->right_operad();
  return std::make_shared<Resolution>(M, Q->augmentation() ? augmentation_kernel(Q) : whole_operad(Q), opt);
}

// ---------------------------------------------------------------- maps

ModuleMap projection_pi(const ResolutionPtr& R) {
  const Bimodule& M = *R->base();
  ModuleMap pi{R, R->base(), {}};
  for (const Key& k : R->basis().keys()) {
    Matrix m(M.basis().dim(k), R->basis().dim(k));
    for (std::size_t i = 0; i < m.cols(); ++i) {
      const Tree& t = R->tree(BasisRef{k, i});
      if (R->inner_count(BasisRef{k, i})) continue;
      std::vector<Element> qs;
      for (std::size_t j = 1; j < t.size(); ++j) qs.push_back(basis_element(t[j].label));
      Element x = total_right(M, basis_element(t[0].label), qs);
      if (!x.is_zero() && x.key != k) throw ContractError("projection landed in the wrong component");
      m.set_col(i, x.v);
    }
    pi.maps[k] = std::move(m);
  }
  return pi;
}

ModuleMap inclusion_eta(const ResolutionPtr& R) {
  const Bimodule& M = *R->base();
  ModuleMap eta{R->base(), R, {}};
  for (const Key& k : M.basis().keys()) {
    if (k.arity > R->max_arity()) continue;
    auto [lo, hi] = R->stored_degrees(k.arity);
    if (k.degree < lo || k.degree > hi) continue;
    Matrix m(R->basis().dim(k), M.basis().dim(k));
    for (std::size_t i = 0; i < m.cols(); ++i) {
      Tree t{TreeNode{Kind::Root, BasisRef{k, i}}};
      for (int a = 0; a < k.arity; ++a) t.push_back(TreeNode{Kind::Leaf, BasisRef{{1, 0}, R->unit_leaf()}});
      auto b = R->find(t);
      if (!b) throw ContractError("corolla missing from the enumeration");
      m.set_col(i, Vec::unit(b->index));
    }
    eta.maps[k] = std::move(m);
  }
  return eta;
}

Element canonical_unit_lift(const Resolution& R) {
  const Bimodule& M = *R.base();
  if (!M.torsor_unit()) throw ContractError("bimodule '" + M.name() + "' has no torsor unit");
  const Element& u = *M.torsor_unit();
  if (u.key != Key{1, 0}) throw ContractError("torsor unit must have arity 1 and degree 0");
  if (!M.diff(u).is_zero()) throw ContractError("torsor unit is not closed");
  if (!R.torsor_unit()) throw ContractError("unit lift is missing");
  const Element& e = *R.torsor_unit();
  if (!R.diff(e).is_zero()) throw ContractError("unit lift is not closed");
  std::vector<Element> none;
  Element back{u.key, {}};
  for (const auto& [i, c] : e.v) {
    const Tree& t = R.tree(BasisRef{e.key, i});
    std::vector<Element> qs;
    for (std::size_t j = 1; j < t.size(); ++j) qs.push_back(basis_element(t[j].label));
    back.v.axpy(c, total_right(M, basis_element(t[0].label), qs).v);
  }
  if (!(back == u)) throw ContractError("unit lift does not project to the torsor unit");
  return e;
}

// ---------------------------------------------------------------- filtration

std::optional<Vec> GeneratorFiltration::coords(Key k, const Vec& skeleton) const {
  if (skeleton.empty()) return Vec{};
  auto it = spans.find(k);
  if (it == spans.end()) return std::nullopt;
  auto c = it->second.coords(skeleton);
  if (!c) return std::nullopt;
  Vec out;
  const auto& mem = members.at(k);
  for (const auto& [pos, a] : *c) out.add(mem.at(pos), a);
  return out;
}

const std::vector<std::size_t>& GeneratorFiltration::in_component(Key k) const {
  static const std::vector<std::size_t> none;
  auto it = members.find(k);
  return it == members.end() ? none : it->second;
}

GeneratorFiltration generator_filtration(const Resolution& R, int max_degree, const std::optional<Element>& first) {
  GeneratorFiltration F;
  F.max_degree = max_degree;
  std::map<int, std::map<Key, std::vector<std::size_t>>> skeletons;
  for (const Key& k : R.basis().keys()) {
    if (k.degree > max_degree) continue;
    for (std::size_t i = 0; i < R.basis().dim(k); ++i) {
      BasisRef b{k, i};
      if (R.is_skeleton(b)) skeletons[R.inner_count(b)][k].push_back(i);
    }
  }
  if (first) {
    if (first->is_zero()) throw ContractError("the normalized generator is zero");
    for (const auto& [i, c] : first->v) {
      BasisRef b{first->key, i};
      if (!R.is_skeleton(b) || R.inner_count(b) != 0)
        throw ContractError("the normalized generator is not a combination of zero-node skeletons");
    }
    if (!R.diff(*first).is_zero()) throw ContractError("the normalized generator is not closed");
  }

  auto check_and_commit = [&](std::size_t from) {
    for (std::size_t g = from; g < F.generators.size(); ++g) {
      const Generator& gen = F.generators[g];
      Element dx = R.diff(Element{gen.key, gen.skeleton});
      bool ok = true;
      for (const auto& [leaves, w] : R.decompose(dx))
        if (!F.coords(w.key, w.v)) ok = false;
      if (ok)
        F.hypothesis.pass();
      else
        F.hypothesis.fail("d of a stage-" + std::to_string(gen.stage) + " generator in " + to_string(gen.key) +
                          " leaves the free module on earlier stages");
    }
    for (std::size_t g = from; g < F.generators.size(); ++g) {
      const Generator& gen = F.generators[g];
      if (!F.spans[gen.key].add(gen.skeleton)) throw ContractError("dependent generators in " + to_string(gen.key));
      F.members[gen.key].push_back(g);
    }
  };

  for (const auto& [p, by_key] : skeletons) {
    const int closed_stage = 2 * p + 1;
    std::map<Key, Span> closed;
    std::size_t from = F.generators.size();
    for (const auto& [k, idxs] : by_key) {
      const Key below{k.arity, k.degree - 1};
      Matrix D(R.basis().dim(below), idxs.size());
      for (std::size_t c = 0; c < idxs.size(); ++c) D.set_col(c, R.diff_internal(BasisRef{k, idxs[c]}));
      Span& sp = closed[k];
      std::vector<Vec> cands;
      if (first && p == 0 && first->key == k) cands.push_back(first->v);
      for (const Vec& kv : kernel_basis(D)) {
        Vec v;
        for (const auto& [c, a] : kv) v.add(idxs[c], a);
        cands.push_back(std::move(v));
      }
      for (auto& v : cands)
        if (sp.add(v)) F.generators.push_back(Generator{k, v, closed_stage});
    }
    check_and_commit(from);
    from = F.generators.size();
    for (const auto& [k, idxs] : by_key) {
      Span& sp = closed[k];
      for (std::size_t i : idxs) {
        Vec v = Vec::unit(i);
        if (sp.add(v)) F.generators.push_back(Generator{k, v, closed_stage + 1});
      }
    }
    check_and_commit(from);
  }
  return F;
}

CheckReport verify_d_squared(const Resolution& R) {
  CheckReport r;
  for (const Key& k : R.basis().keys()) {
    auto [lo, hi] = R.stored_degrees(k.arity);
    if (k.degree - 2 < lo && R.complete_below(k.arity)) {
      // d lands below the bottom, where everything vanishes
    }
    for (std::size_t i = 0; i < R.basis().dim(k); ++i) {
      BasisRef b{k, i};
      Element dd = R.diff(R.diff(basis_element(b)));
      if (dd.is_zero())
        r.pass();
      else
        r.fail("d^2 is nonzero on " + R.basis().label(b) + " in " + to_string(k));
    }
  }
  return r;
}

// ---------------------------------------------------------------- adjoined unit

UnitAdjoinedModule::UnitAdjoinedModule(BimodulePtr M, std::shared_ptr<const AdjoinedUnitOperad> Q1)
    : M_(std::move(M)), Q1_(std::move(Q1)) {
  name_ = M_->name();
  basis_ = M_->basis();
  max_arity_ = M_->max_arity();
  left_ = M_->left_operad();
  right_ = Q1_;
  has_differential_ = M_->has_differential();
  unit_ = M_->torsor_unit();
}

Vec UnitAdjoinedModule::right_basis(const BasisRef& m, int slot, const BasisRef& q) const {
  if (q.key == Key{1, 0} && q.index == 0) return Vec::unit(m.index);
  return M_->right_basis(m, slot, BasisRef{q.key, q.index - Q1_->offset(q.key)});
}

Vec UnitAdjoinedModule::left_basis(const BasisRef& p, std::span<const BasisRef> ms) const {
  return M_->left_basis(p, ms);
}

Vec UnitAdjoinedModule::diff_basis(const BasisRef& m) const { return M_->diff_basis(m); }

namespace {

// Tree-by-tree relabelling between two resolutions; leaves may map to combinations.
ModuleMap relabel(const ResolutionPtr& from, const ResolutionPtr& to,
                  const std::function<Vec(const BasisRef&)>& leaf, const std::function<BasisRef(const BasisRef&)>& inner) {
  ModuleMap f{from, to, {}};
  for (const Key& k : from->basis().keys()) {
    Matrix m(to->basis().dim(k), from->basis().dim(k));
    for (std::size_t i = 0; i < m.cols(); ++i) {
      const Tree& t = from->tree(BasisRef{k, i});
      Vec col;
      Tree nt = t;
      std::function<void(std::size_t, const Scalar&)> rec = [&](std::size_t pos, const Scalar& c) {
        if (pos == t.size()) {
          auto b = to->find(nt);
          if (!b) throw ContractError("relabelled tree " + to->render(nt) + " is missing");
          col.add(b->index, c);
          return;
        }
        if (t[pos].kind == Kind::Inner) nt[pos].label = inner(t[pos].label);
        if (t[pos].kind != Kind::Leaf) {
          rec(pos + 1, c);
          return;
        }
        Vec img = leaf(t[pos].label);
        for (const auto& [z, a] : img) {
          nt[pos].label = BasisRef{t[pos].label.key, z};
          rec(pos + 1, c * a);
        }
      };
      rec(0, Scalar(1));
      m.set_col(i, std::move(col));
    }
    f.maps[k] = std::move(m);
  }
  return f;
}

}  // namespace

UnitAdjoinedChain unit_adjoined_chain(const BimodulePtr& M, const ResolutionOptions& opt, const Window& w) {
  const OperadPtr& Q = M->right_operad();
  UnitAdjoinedChain out;
  out.small = std::make_shared<Resolution>(M, whole_operad(Q), opt);
  UnitAdjunction adj = adjoin_unit(Q);
  auto M1 = std::make_shared<UnitAdjoinedModule>(M, adj.op);
  out.big = std::make_shared<Resolution>(M1, augmentation_kernel(adj.op), opt);
  const AugmentationKernel& Ks = out.small->inner();
  const AugmentationKernel& Kb = out.big->inner();
  auto to_big = [&](const BasisRef& c) {
    auto i = Kb.basis.find(c.key, Ks.basis.label(c));
    if (!i) throw ContractError("inner label " + Ks.basis.label(c) + " has no counterpart");
    return BasisRef{c.key, *i};
  };
  auto to_small = [&](const BasisRef& c) {
    auto i = Ks.basis.find(c.key, Kb.basis.label(c));
    if (!i) throw ContractError("inner label " + Kb.basis.label(c) + " has no counterpart");
    return BasisRef{c.key, *i};
  };
  out.include = relabel(
      out.small, out.big, [&](const BasisRef& q) { return Vec::unit(q.index + adj.op->offset(q.key)); }, to_big);
  out.collapse = relabel(
      out.big, out.small,
      [&](const BasisRef& q) {
        if (q.key == Key{1, 0} && q.index == 0) return Q->unit().v;
        return Vec::unit(q.index - adj.op->offset(q.key));
      },
      to_small);
  const int A = w.max_arity;
  out.reports.push_back(is_quasi_iso(inclusion_eta(out.small).chain_maps(A), w));
  out.reports.push_back(is_quasi_iso(out.include.chain_maps(A), w));
  out.reports.push_back(is_quasi_iso(out.collapse.chain_maps(A), w));
  out.reports.push_back(is_quasi_iso(projection_pi(out.small).chain_maps(A), w));
  out.holds = true;
  for (const auto& r : out.reports) out.holds = out.holds && r.holds;
  return out;
}

// ---------------------------------------------------------------- truncation

namespace {

void require_range(const Collection& c, int D, const std::string& what) {
  if (c.keys().empty()) return;
  if (c.min_degree() < 0 || c.max_degree() > D)
    throw WindowError("truncation at degree " + std::to_string(D) + " needs " + what + " in degrees [0, " +
                      std::to_string(D) + "]");
}

}  // namespace

Truncation::Truncation(ResolutionPtr R, int D) : R_(std::move(R)), D_(D) {
  const Bimodule& M = *R_->base();
  require_range(M.basis(), D, "the bimodule");
  require_range(R_->left_operad()->basis(), D, "the left operad");
  require_range(R_->right_operad()->basis(), D, "the right operad");
  if (!R_->finite() && R_->top_degree() < D + 1)
    throw WindowError("truncation at degree " + std::to_string(D) + " needs trees up to degree " +
                      std::to_string(D + 1));
  name_ = R_->name() + "_le" + std::to_string(D);
  left_ = R_->left_operad();
  right_ = R_->right_operad();
  max_arity_ = R_->max_arity();
  has_differential_ = true;
  for (const Key& k : R_->basis().keys()) {
    if (k.degree < D) basis_.set_component(k, R_->basis().labels(k));
    if (k.degree != D) continue;
    Span& sp = boundaries_[k.arity];
    const Key above{k.arity, D + 1};
    for (std::size_t i = 0; i < R_->basis().dim(above); ++i) sp.add(R_->diff_basis(BasisRef{above, i}));
    auto piv = sp.pivots();
    std::set<std::size_t> pivots(piv.begin(), piv.end());
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < R_->basis().dim(k); ++i) {
      if (pivots.count(i)) continue;
      kept_index_[k.arity][i] = kept_[k.arity].size();
      kept_[k.arity].push_back(i);
      labels.push_back(R_->basis().labels(k)[i]);
    }
    if (!labels.empty()) basis_.set_component(k, std::move(labels));
  }
  if (R_->torsor_unit() && D >= 0) unit_ = project(*R_->torsor_unit());
}

Element Truncation::project(const Element& x) const {
  if (x.key.degree > D_) return Element{x.key, {}};
  if (x.key.degree < D_) return x;
  Element out{x.key, {}};
  auto b = boundaries_.find(x.key.arity);
  Vec r = b == boundaries_.end() ? x.v : b->second.reduce(x.v);
  const auto& idx = kept_index_.at(x.key.arity);
  for (const auto& [i, c] : r) {
    auto it = idx.find(i);
    if (it == idx.end()) throw ContractError("reduction left a pivot coordinate");
    out.v.add(it->second, c);
  }
  return out;
}

Element Truncation::lift(const Element& w) const {
  if (w.key.degree != D_) return w;
  Element out{w.key, {}};
  const auto& kept = kept_.at(w.key.arity);
  for (const auto& [i, c] : w.v) out.v.add(kept.at(i), c);
  return out;
}

Vec Truncation::right_basis(const BasisRef& m, int slot, const BasisRef& q) const {
  Key rk = right_key(*this, m.key, slot, q.key);
  if (rk.degree > D_) return {};
  return project(R_->right(lift(basis_element(m)), slot, basis_element(q))).v;
}

Vec Truncation::left_basis(const BasisRef& p, std::span<const BasisRef> ms) const {
  std::vector<Key> keys;
  std::vector<Element> xs;
  for (const auto& m : ms) {
    keys.push_back(m.key);
    xs.push_back(lift(basis_element(m)));
  }
  Key lk = left_key(*this, p.key, keys);
  if (lk.degree > D_) return {};
  return project(R_->left(basis_element(p), xs)).v;
}

Vec Truncation::diff_basis(const BasisRef& m) const { return project(R_->diff(lift(basis_element(m)))).v; }

ModuleMap descend(const ModuleMap& f, const std::shared_ptr<const Truncation>& W) {
  const Resolution& R = *W->resolution();
  const int D = W->top();
  for (const auto& [k, m] : f.maps)
    if (k.degree > D && !m.is_zero())
      throw ContractError("map does not vanish above the truncation degree in " + to_string(k));
  ModuleMap out{W, f.target, {}};
  for (const Key& k : W->basis().keys()) {
    Matrix full = f.at(k);
    if (k.degree < D) {
      out.maps[k] = full;
      continue;
    }
    const Key above{k.arity, D + 1};
    Matrix fa = f.at(above);
    for (std::size_t i = 0; i < R.basis().dim(above); ++i)
      if (!full.apply(R.diff_basis(BasisRef{above, i})).empty())
        throw ContractError("map does not vanish on boundaries in " + to_string(k));
    Matrix m(full.rows(), W->basis().dim(k));
    for (std::size_t i = 0; i < m.cols(); ++i) m.set_col(i, full.apply(W->lift(basis_element(BasisRef{k, i})).v));
    out.maps[k] = std::move(m);
  }
  return out;
}

ModuleMap truncation_map(const std::shared_ptr<const Truncation>& W) {
  const Resolution& R = *W->resolution();
  ModuleMap out{W->resolution(), W, {}};
  for (const Key& k : R.basis().keys()) {
    if (k.degree > W->top()) continue;
    Matrix m(W->basis().dim(k), R.basis().dim(k));
    for (std::size_t i = 0; i < m.cols(); ++i) m.set_col(i, W->project(basis_element(BasisRef{k, i})).v);
    out.maps[k] = std::move(m);
  }
  return out;
}

}  // namespace optor
