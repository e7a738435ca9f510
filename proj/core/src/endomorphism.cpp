#include "optor/endomorphism.hpp"

#include <set>
#include <unordered_set>

#include "optor/stock.hpp"

namespace optor {

namespace {

long long degree_sum(const std::vector<BasisRef>& t, std::size_t from, std::size_t to) {
  long long s = 0;
  for (std::size_t l = from; l < to; ++l) s += t[l].key.degree;
  return s;
}

int arity_sum(const std::vector<BasisRef>& t) {
  int s = 0;
  for (const auto& b : t) s += b.key.arity;
  return s;
}

Window full_window(const Collection& c, int A) {
  if (c.keys().empty()) return Window{A, 0, -1};
  return Window{A, c.min_degree(), c.max_degree()};
}

// Multilinear expansion of x_1 (x) .. (x) x_n into basis tensors.
void expand(std::span<const Element> xs, std::size_t pos, std::vector<BasisRef>& cur, const Scalar& coef,
            const std::function<void(const std::vector<BasisRef>&, const Scalar&)>& fn) {
  if (pos == xs.size()) {
    fn(cur, coef);
    return;
  }
  for (const auto& [i, c] : xs[pos].v) {
    cur.push_back(BasisRef{xs[pos].key, i});
    expand(xs, pos + 1, cur, coef * c, fn);
    cur.pop_back();
  }
}

}  // namespace

// ---------------------------------------------------------------- collections

DgCollection::DgCollection(std::string name, Collection basis, std::map<BasisRef, Vec> d) : d_(std::move(d)) {
  name_ = std::move(name);
  basis_ = std::move(basis);
  max_arity_ = std::max(1, basis_.max_arity());
  right_ = trivial_operad();
  for (const auto& [b, v] : d_)
    if (!v.empty()) has_differential_ = true;
}

Vec DgCollection::right_basis(const BasisRef& m, int, const BasisRef& q) const {
  if (q.key == Key{1, 0} && q.index == 0) return Vec::unit(m.index);
  return {};
}

Vec DgCollection::diff_basis(const BasisRef& m) const {
  auto it = d_.find(m);
  return it == d_.end() ? Vec{} : it->second;
}

OperadPtr trivial_operad() {
  static const OperadPtr I = [] {
    Collection c;
    c.set_component(Key{1, 0}, {"1"});
    auto T = std::make_shared<TabulatedOperad>("I", c, 1);
    const BasisRef one{{1, 0}, 0};
    T->set_composition(one, 1, one, Vec::unit(0));
    T->set_unit(basis_element(one));
    T->set_augmentation(Vec::unit(0));
    T->finalize();
    return T;
  }();
  return I;
}

// ---------------------------------------------------------------- End N

EndOperad::EndOperad(RightModulePtr N, int max_arity) : N_(std::move(N)) {
  name_ = "End(" + N_->name() + ")";
  max_arity_ = max_arity;
  has_differential_ = N_->has_differential();
  const Collection& nb = N_->basis();
  const Window w = full_window(nb, max_arity);
  std::map<Key, std::vector<std::string>> labels;
  for (int n = 1; n <= max_arity && w.deg_lo <= w.deg_hi; ++n) {
    for_each_tuple(nb, w, n, max_arity, [&](const std::vector<BasisRef>& t) {
      const int k = arity_sum(t);
      const long long s = degree_sum(t, 0, t.size());
      std::string src = "[";
      for (std::size_t j = 0; j < t.size(); ++j) src += (j ? "|" : "") + nb.label(t[j]);
      src += "]>";
      for (int dy : nb.degrees(k)) {
        Key yk{k, dy};
        for (std::size_t i = 0; i < nb.dim(yk); ++i) {
          Key ek{n, static_cast<int>(dy - s)};
          BasisRef e{ek, entries_[ek].size()};
          BasisRef y{yk, i};
          entries_[ek].push_back(Entry{t, y});
          index_.emplace(std::make_pair(t, y), e);
          by_tensor_[t].push_back(e);
          labels[ek].push_back(src + nb.label(y));
        }
      }
    });
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
  for (const Key& k : nb.keys()) {
    if (k.arity > max_arity) continue;
    for (std::size_t i = 0; i < nb.dim(k); ++i) {
      BasisRef w0{k, i};
      Vec dw = N_->diff_basis(w0);
      for (const auto& [x, c] : dw) d_transpose_[BasisRef{{k.arity, k.degree - 1}, x}].emplace_back(w0, c);
    }
  }
  unit_ = Element{Key{1, 0}, {}};
  for (const Key& k : nb.keys()) {
    if (k.arity > max_arity) continue;
    for (std::size_t i = 0; i < nb.dim(k); ++i) {
      BasisRef y{k, i};
      unit_.v.add(index_.at({std::vector<BasisRef>{y}, y}).index, 1);
    }
  }
}

std::optional<BasisRef> EndOperad::find(const std::vector<BasisRef>& tensor, const BasisRef& out) const {
  auto it = index_.find({tensor, out});
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::vector<BasisRef>& EndOperad::with_tensor(const std::vector<BasisRef>& tensor) const {
  static const std::vector<BasisRef> none;
  auto it = by_tensor_.find(tensor);
  return it == by_tensor_.end() ? none : it->second;
}

Element EndOperad::evaluate(const Element& lambda, const std::vector<BasisRef>& t) const {
  Element out{Key{arity_sum(t), static_cast<int>(lambda.key.degree + degree_sum(t, 0, t.size()))}, {}};
  if (static_cast<int>(t.size()) != lambda.key.arity) return out;
  for (const auto& e : with_tensor(t)) {
    if (e.key != lambda.key) continue;
    Scalar c = lambda.v.get(e.index);
    if (c != 0) out.v.add(entry(e).out.index, c);
  }
  return out;
}

Element EndOperad::evaluate(const Element& lambda, std::span<const Element> xs) const {
  if (static_cast<int>(xs.size()) != lambda.key.arity)
    throw ContractError("evaluation: " + std::to_string(xs.size()) + " arguments for arity " +
                        std::to_string(lambda.key.arity));
  int k = 0;
  long long s = 0;
  for (const auto& x : xs) {
    k += x.key.arity;
    s += x.key.degree;
  }
  Element out{Key{k, static_cast<int>(lambda.key.degree + s)}, {}};
  std::vector<BasisRef> cur;
  expand(xs, 0, cur, Scalar(1), [&](const std::vector<BasisRef>& t, const Scalar& c) {
    out.v.axpy(c, evaluate(lambda, t).v);
  });
  return out;
}

Element EndOperad::from_values(Key key,
                               const std::function<Vec(const std::vector<BasisRef>&, Key out_key)>& values) const {
  Element out{key, {}};
  auto it = entries_.find(key);
  if (it == entries_.end()) return out;
  const std::vector<BasisRef>* last = nullptr;
  Vec cached;
  for (std::size_t u = 0; u < it->second.size(); ++u) {
    const Entry& e = it->second[u];
    if (!last || *last != e.tensor) {
      cached = values(e.tensor, e.out.key);
      last = &e.tensor;
    }
    Scalar c = cached.get(e.out.index);
    if (c != 0) out.v.set(u, c);
  }
  return out;
}

Vec EndOperad::compose_basis(const BasisRef& p, int slot, const BasisRef& q) const {
  composite_key(*this, p.key, slot, q.key);
  const Entry& a = entry(p);
  const Entry& b = entry(q);
  if (a.tensor[slot - 1] != b.out) return {};
  std::vector<BasisRef> t(a.tensor.begin(), a.tensor.begin() + (slot - 1));
  t.insert(t.end(), b.tensor.begin(), b.tensor.end());
  t.insert(t.end(), a.tensor.begin() + slot, a.tensor.end());
  auto r = find(t, a.out);
  if (!r) throw WindowError("composite leaves the endomorphism window");
  return Vec::unit(r->index, koszul(static_cast<long long>(q.key.degree) * degree_sum(a.tensor, 0, slot - 1)));
}

Vec EndOperad::diff_basis(const BasisRef& p) const {
  const Entry& e = entry(p);
  Vec out;
  for (const auto& [z, c] : N_->diff_basis(e.out)) {
    auto r = find(e.tensor, BasisRef{{e.out.key.arity, e.out.key.degree - 1}, z});
    if (r) out.add(r->index, c);
  }
  const int outer = -koszul(p.key.degree);
  std::vector<BasisRef> t = e.tensor;
  for (std::size_t j = 0; j < t.size(); ++j) {
    auto it = d_transpose_.find(e.tensor[j]);
    if (it == d_transpose_.end()) continue;
    const int inner = koszul(degree_sum(e.tensor, 0, j));
    for (const auto& [w, c] : it->second) {
      t[j] = w;
      auto r = find(t, e.out);
      if (r) out.add(r->index, c * (outer * inner));
    }
    t[j] = e.tensor[j];
  }
  return out;
}

// ---------------------------------------------------------------- sub-operads

SubOperad::SubOperad(std::string name, OperadPtr ambient, std::map<Key, std::vector<Vec>> vectors)
    : ambient_(std::move(ambient)), vectors_(std::move(vectors)) {
  name_ = std::move(name);
  max_arity_ = ambient_->max_arity();
  has_differential_ = ambient_->has_differential();
  for (auto it = vectors_.begin(); it != vectors_.end();) {
    if (it->second.empty()) {
      it = vectors_.erase(it);
      continue;
    }
    Span& sp = spans_[it->first];
    std::vector<std::string> labels;
    for (const auto& v : it->second) {
      if (!sp.add(v)) throw ContractError("sub-operad generators are linearly dependent in " + to_string(it->first));
      labels.push_back("v" + std::to_string(labels.size()));
    }
    basis_.set_component(it->first, std::move(labels));
    ++it;
  }
  const Element& u = ambient_->unit();
  if (u.is_zero()) {
    unit_ = Element{Key{1, 0}, {}};
  } else {
    auto c = coords(Key{1, 0}, u.v);
    if (!c) throw ContractError("sub-operad does not contain the unit");
    unit_ = Element{Key{1, 0}, *c};
  }
}

Element SubOperad::embed(const Element& x) const {
  Element out{x.key, {}};
  for (const auto& [i, c] : x.v) out.v.axpy(c, vectors_.at(x.key).at(i));
  return out;
}

std::optional<Vec> SubOperad::coords(Key k, const Vec& ambient_vec) const {
  if (ambient_vec.empty()) return Vec{};
  auto it = spans_.find(k);
  if (it == spans_.end()) return std::nullopt;
  return it->second.coords(ambient_vec);
}

Vec SubOperad::compose_basis(const BasisRef& p, int slot, const BasisRef& q) const {
  Key r = composite_key(*this, p.key, slot, q.key);
  Element x = ambient_->compose(embed(basis_element(p)), slot, embed(basis_element(q)));
  auto c = coords(r, x.v);
  if (!c) throw ContractError("sub-operad is not closed under composition in " + to_string(r));
  return *c;
}

Vec SubOperad::diff_basis(const BasisRef& p) const {
  Element x = ambient_->diff(embed(basis_element(p)));
  auto c = coords(Key{p.key.arity, p.key.degree - 1}, x.v);
  if (!c) throw ContractError("sub-operad is not closed under the differential in " + to_string(p.key));
  return *c;
}

CheckReport check_closure(const SubOperad& S, const Window& w) {
  CheckReport r;
  auto B = window_basis(S.basis(), w);
  for (const auto& p : B) {
    try {
      S.diff_basis(p);
      r.pass();
    } catch (const ContractError& e) {
      r.fail(e.what());
    }
    for (int slot = 1; slot <= p.key.arity; ++slot)
      for (const auto& q : B) {
        if (p.key.arity + q.key.arity - 1 > std::min(w.max_arity, S.max_arity())) continue;
        try {
          S.compose_basis(p, slot, q);
          r.pass();
        } catch (const ContractError& e) {
          r.fail(e.what());
        } catch (const WindowError&) {
        }
      }
  }
  return r;
}

// ---------------------------------------------------------------- End_Q N

InvariantEnd invariant_endomorphism_operad(const RightModulePtr& N, int max_arity) {
  InvariantEnd out;
  out.end = std::make_shared<EndOperad>(N, max_arity);
  const EndOperad& E = *out.end;
  const Operad& Q = *N->right_operad();
  const Collection& nb = N->basis();
  auto QB = window_basis(Q.basis(), full_window(Q.basis(), max_arity));
  auto NB = window_basis(nb, full_window(nb, max_arity));

  struct Source {
    BasisRef x;
    int slot;
    BasisRef c;
    Scalar coef;
  };
  std::map<BasisRef, std::vector<Source>> preimages;  // w -> (x, s, c) with x o_s c containing w
  for (const auto& x : NB)
    for (int s = 1; s <= x.key.arity; ++s)
      for (const auto& c : QB) {
        if (x.key.arity + c.key.arity - 1 > max_arity) continue;
        Key rk = right_key(*N, x.key, s, c.key);
        for (const auto& [i, a] : N->right_basis(x, s, c)) preimages[BasisRef{rk, i}].push_back(Source{x, s, c, a});
      }

  using Row = std::tuple<std::vector<BasisRef>, std::size_t, int, BasisRef, BasisRef>;
  std::set<std::tuple<std::vector<BasisRef>, std::size_t, int, BasisRef>> clipped;
  std::map<Key, std::vector<Vec>> vectors;
  for (const Key& K : E.basis().keys()) {
    const std::size_t cols = E.basis().dim(K);
    std::map<Row, std::size_t> rows;
    auto row = [&rows](Row r) { return rows.emplace(std::move(r), rows.size()).first->second; };
    std::vector<std::vector<std::pair<std::size_t, Scalar>>> col_entries(cols);
    for (std::size_t u = 0; u < cols; ++u) {
      const auto& e = E.entry(BasisRef{K, u});
      const int k = arity_sum(e.tensor);
      for (std::size_t j = 0; j < e.tensor.size(); ++j) {
        const int before = static_cast<int>(arity_sum({e.tensor.begin(), e.tensor.begin() + j}));
        // lambda(x) o_{s'} c, with x = t
        for (int s = 1; s <= e.tensor[j].key.arity; ++s)
          for (const auto& c : QB) {
            if (k + c.key.arity - 1 > max_arity) {
              clipped.emplace(e.tensor, j, s, c);
              continue;
            }
            Key rk = right_key(*N, e.out.key, before + s, c.key);
            for (const auto& [z, a] : N->right_basis(e.out, before + s, c))
              col_entries[u].emplace_back(row(Row{e.tensor, j, s, c, BasisRef{rk, z}}), -a);
          }
        // lambda(.., x_j o_s c, ..) with x_j o_s c containing t_j
        auto it = preimages.find(e.tensor[j]);
        if (it == preimages.end()) continue;
        const long long later = degree_sum(e.tensor, j + 1, e.tensor.size());
        for (const auto& src : it->second) {
          std::vector<BasisRef> x = e.tensor;
          x[j] = src.x;
          col_entries[u].emplace_back(row(Row{x, j, src.slot, src.c, e.out}),
                                      src.coef * koszul(static_cast<long long>(src.c.key.degree) * later));
        }
      }
    }
    Matrix m(rows.size(), cols);
    for (std::size_t u = 0; u < cols; ++u) {
      Vec v;
      for (const auto& [r, a] : col_entries[u]) v.add(r, a);
      m.set_col(u, std::move(v));
    }
    auto ker = kernel_basis(m);
    if (!ker.empty()) vectors[K] = std::move(ker);
  }
  out.clipped = clipped.size();
  out.sub = std::make_shared<SubOperad>("End_" + Q.name() + "(" + N->name() + ")", out.end, std::move(vectors));
  out.closure = check_closure(*out.sub, full_window(out.sub->basis(), max_arity));
  return out;
}

// ---------------------------------------------------------------- induced maps

OperadMorphism fbar(const std::shared_ptr<const EndOperad>& EN, const std::shared_ptr<const EndOperad>& EM,
                    const KeyMaps& f, const KeyMaps& g) {
  std::map<BasisRef, std::vector<std::pair<BasisRef, Scalar>>> g_pre;  // n -> (m, coef) with g(m) containing n
  for (const auto& [k, G] : g)
    for (std::size_t m = 0; m < G.cols(); ++m)
      for (const auto& [n, c] : G.col(m)) g_pre[BasisRef{k, n}].emplace_back(BasisRef{k, m}, c);

  OperadMorphism out{EN, EM, {}};
  for (const Key& K : EN->basis().keys()) {
    Matrix mat(EM->basis().dim(K), EN->basis().dim(K));
    for (std::size_t u = 0; u < mat.cols(); ++u) {
      const auto& e = EN->entry(BasisRef{K, u});
      auto fi = f.find(e.out.key);
      if (fi == f.end()) continue;
      Vec fy = fi->second.apply(Vec::unit(e.out.index));
      if (fy.empty()) continue;
      Vec col;
      std::vector<BasisRef> ms;
      std::function<void(std::size_t, const Scalar&)> rec = [&](std::size_t j, const Scalar& coef) {
        if (j == e.tensor.size()) {
          for (const auto& [z, c] : fy) {
            auto r = EM->find(ms, BasisRef{e.out.key, z});
            if (!r) throw ContractError("induced map leaves the endomorphism window");
            col.add(r->index, coef * c);
          }
          return;
        }
        auto it = g_pre.find(e.tensor[j]);
        if (it == g_pre.end()) return;
        for (const auto& [m, c] : it->second) {
          ms.push_back(m);
          rec(j + 1, coef * c);
          ms.pop_back();
        }
      };
      rec(0, Scalar(1));
      mat.set_col(u, std::move(col));
    }
    out.maps[K] = std::move(mat);
  }
  return out;
}

OperadMorphism fbar_restricted(const OperadMorphism& full, const std::shared_ptr<const SubOperad>& from,
                               const std::shared_ptr<const SubOperad>& to) {
  OperadMorphism out{from, to, {}};
  for (const auto& [K, vs] : from->vectors()) {
    Matrix M = full.at(K);
    Matrix mat(to->basis().dim(K), vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) {
      auto c = to->coords(K, M.apply(vs[i]));
      if (!c) throw ContractError("induced map does not preserve invariant endomorphisms in " + to_string(K));
      mat.set_col(i, std::move(*c));
    }
    out.maps[K] = std::move(mat);
  }
  return out;
}

Kunneth kunneth_identification(const std::shared_ptr<const EndOperad>& E, int max_arity,
                               const std::shared_ptr<const SubOperad>& sub) {
  const RightModule& N = *E->target();
  Kunneth out;
  Collection hb;
  std::map<Key, std::vector<Vec>> reps;
  std::map<Key, Homology> homs;
  for (int a : N.basis().arities()) {
    if (a > max_arity) continue;
    if (!N.complete_above(a) || !N.complete_below(a) || !N.exhaustive(a))
      throw WindowError("homology of '" + N.name() + "' is not finite in arity " + std::to_string(a));
    ChainComplex c = N.complex(a);
    for (int k = c.lo(); k <= c.hi(); ++k) {
      Homology h(c, k);
      if (!h.dim()) continue;
      std::vector<std::string> labels;
      for (std::size_t i = 0; i < h.dim(); ++i) labels.push_back("[" + std::to_string(a) + "," + std::to_string(k) + "]" + std::to_string(i));
      hb.set_component(Key{a, k}, std::move(labels));
      reps[Key{a, k}] = h.representatives();
      homs.emplace(Key{a, k}, std::move(h));
    }
  }
  out.homology = std::make_shared<DgCollection>("H(" + N.name() + ")", hb, std::map<BasisRef, Vec>{});
  out.end_homology = std::make_shared<EndOperad>(out.homology, max_arity);
  const EndOperad& EH = *out.end_homology;

  const Operad& dom = sub ? static_cast<const Operad&>(*sub) : static_cast<const Operad&>(*E);
  for (int n = 1; n <= max_arity; ++n) {
    std::set<int> degs;
    for (int d : dom.basis().degrees(n)) degs.insert(d);
    for (int d : EH.basis().degrees(n)) degs.insert(d);
    if (degs.empty()) continue;
    ChainComplex c = dom.complex(n);
    for (int d : degs) {
      Key K{n, d};
      std::vector<Vec> classes;
      if (dom.basis().dim(K)) {
        Homology h(c, d);
        classes = h.representatives();
      }
      Matrix mat(EH.basis().dim(K), classes.size());
      for (std::size_t i = 0; i < classes.size(); ++i) {
        Element lambda{K, classes[i]};
        if (sub) lambda = sub->embed(lambda);
        Element img = EH.from_values(K, [&](const std::vector<BasisRef>& t, Key out_key) -> Vec {
          std::vector<Element> xs;
          for (const auto& b : t) xs.push_back(Element{b.key, reps.at(b.key).at(b.index)});
          Element v = E->evaluate(lambda, xs);
          if (v.is_zero()) return {};
          if (v.key != out_key) throw ContractError("evaluation landed in an unexpected component");
          auto it = homs.find(out_key);
          if (it == homs.end()) {
            if (!N.basis().dim(out_key)) return {};
            ChainComplex cc = N.complex(out_key.arity);
            if (Homology(cc, out_key.degree).is_boundary(v.v)) return {};
            throw ContractError("evaluation on cycles is not a cycle");
          }
          return it->second.project(v.v);
        });
        mat.set_col(i, std::move(img.v));
      }
      std::size_t r = rank(mat);
      if (r < mat.cols()) out.injective = false;
      if (r < mat.cols() || r < mat.rows()) out.invertible = false;
      out.matrices[K] = std::move(mat);
    }
  }
  return out;
}

KeyMaps iota_unit(const SubOperad& E, const Element& u, int max_arity) {
  auto end = std::dynamic_pointer_cast<const EndOperad>(E.ambient());
  if (!end) throw ContractError("unit evaluation needs an endomorphism operad");
  const RightModule& M = *end->target();
  KeyMaps out;
  for (const auto& [K, vs] : E.vectors()) {
    if (K.arity > max_arity) continue;
    std::vector<Element> ones(K.arity, u);
    Matrix mat(M.basis().dim(Key{K.arity, K.degree + K.arity * u.key.degree}), vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) mat.set_col(i, end->evaluate(Element{K, vs[i]}, ones).v);
    out[K] = std::move(mat);
  }
  return out;
}

OperadMorphism left_action_operad_map(const BimodulePtr& M, const InvariantEnd& E) {
  const Operad& P = *M->left_operad();
  OperadMorphism out{M->left_operad(), E.sub, {}};
  for (const Key& K : P.basis().keys()) {
    if (K.arity > E.end->max_arity()) continue;
    Matrix mat(E.sub->basis().dim(K), P.basis().dim(K));
    for (std::size_t p = 0; p < mat.cols(); ++p) {
      BasisRef pb{K, p};
      Element lam = E.end->from_values(K, [&](const std::vector<BasisRef>& t, Key) { return M->left_basis(pb, t); });
      auto c = E.sub->coords(K, lam.v);
      if (!c) throw ContractError("left action of " + P.basis().label(pb) + " is not an invariant endomorphism");
      mat.set_col(p, std::move(*c));
    }
    out.maps[K] = std::move(mat);
  }
  return out;
}

}  // namespace optor
