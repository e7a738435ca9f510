#include "optor/io.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

namespace optor::io {

using json = nlohmann::ordered_json;

SyntaxError::SyntaxError(const std::string& msg, std::size_t line_, std::size_t column_, std::string where_)
    : std::runtime_error(msg), line(line_), column(column_), where(std::move(where_)) {}

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw SyntaxError((path.empty() ? std::string("/") : path) + ": " + what, 0, 0, path.empty() ? "/" : path);
}

// ---------------------------------------------------------------- canonical text

// Containers that fit on one line are written inline; the top level is always expanded.
void emit(const json& j, std::size_t indent, std::string& out) {
  std::string flat = j.dump();
  if (!j.is_structured() || j.empty() || (indent > 0 && indent + flat.size() <= 100)) {
    out += flat;
    return;
  }
  const std::string pad(indent + 2, ' ');
  out += j.is_object() ? "{\n" : "[\n";
  std::size_t n = 0;
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      out += pad + json(it.key()).dump() + ": ";
      emit(it.value(), indent + 2, out);
      out += ++n < j.size() ? ",\n" : "\n";
    }
  } else {
    for (const auto& e : j) {
      out += pad;
      emit(e, indent + 2, out);
      out += ++n < j.size() ? ",\n" : "\n";
    }
  }
  out += std::string(indent, ' ') + (j.is_object() ? "}" : "]");
}

std::string canonical(const json& j) {
  std::string out;
  emit(j, 0, out);
  out += "\n";
  return out;
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t upto = e.byte > 0 ? std::min<std::size_t>(e.byte - 1, text.size()) : 0;
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    auto p = msg.find("syntax error");
    if (p != std::string::npos) msg = msg.substr(p);
    throw SyntaxError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg, line, col, "");
  }
}

// ---------------------------------------------------------------- field access

const json& field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(path, std::string("missing field '") + key + "'");
  return *it;
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) bad(path, "expected an integer");
  return j.get<int>();
}

bool get_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) bad(path, "expected true or false");
  return j.get<bool>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) bad(path, "expected a string");
  return j.get<std::string>();
}

const json& get_array(const json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array");
  return j;
}

std::vector<std::string> get_strings(const json& j, const std::string& path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  for (const auto& e : get_array(j, path)) out.push_back(get_string(e, path + "/" + std::to_string(i++)));
  return out;
}

Scalar get_scalar(const json& j, const std::string& path) {
  if (j.is_number_integer()) return Scalar(mpz_class(std::to_string(j.get<long long>())));
  if (!j.is_string()) bad(path, "expected a rational string");
  try {
    return parse_scalar(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    bad(path, e.what());
  }
}

json scalar_json(const Scalar& s) { return format_scalar(s); }

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(scalar_json(m.at(i, j)));
    rows.push_back(std::move(r));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(rows)}};
}

Matrix get_matrix(const json& j, const std::string& path) {
  const int r = get_int(field(j, "rows", path), path + "/rows");
  const int c = get_int(field(j, "cols", path), path + "/cols");
  if (r < 0 || c < 0) bad(path, "negative matrix dimension");
  const json& e = get_array(field(j, "entries", path), path + "/entries");
  if (e.size() != static_cast<std::size_t>(r)) bad(path + "/entries", "expected " + std::to_string(r) + " rows");
  Matrix m(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  for (std::size_t i = 0; i < e.size(); ++i) {
    const std::string rp = path + "/entries/" + std::to_string(i);
    const json& row = get_array(e[i], rp);
    if (row.size() != static_cast<std::size_t>(c)) bad(rp, "expected " + std::to_string(c) + " entries");
    for (std::size_t k = 0; k < row.size(); ++k) m.set(i, k, get_scalar(row[k], rp + "/" + std::to_string(k)));
  }
  return m;
}

// ---------------------------------------------------------------- labels

class Labels {
 public:
  explicit Labels(const Collection& c) : c_(c) {
    for (const Key& k : c.keys())
      for (std::size_t i = 0; i < c.dim(k); ++i)
        if (!index_.emplace(c.labels(k)[i], BasisRef{k, i}).second)
          throw SemanticError("label '" + c.labels(k)[i] + "' names two basis elements");
  }

  BasisRef ref(const json& j, const std::string& path) const {
    std::string l = get_string(j, path);
    auto it = index_.find(l);
    if (it == index_.end()) throw SemanticError(path + ": unknown basis label '" + l + "'");
    return it->second;
  }
  const std::string& label(const BasisRef& b) const { return c_.label(b); }

  json coeffs(Key k, const Vec& v) const {
    json out = json::array();
    for (const auto& [i, a] : v) out.push_back(json::array({c_.labels(k).at(i), scalar_json(a)}));
    return out;
  }
  /// Coefficient list whose labels must all lie in `k`.
  Vec vec(const json& j, Key k, const std::string& path) const {
    Vec v;
    std::size_t n = 0;
    for (const auto& e : get_array(j, path)) {
      const std::string ep = path + "/" + std::to_string(n++);
      if (!e.is_array() || e.size() != 2) bad(ep, "expected [label, coefficient]");
      BasisRef b = ref(e[0], ep + "/0");
      if (b.key != k)
        throw SemanticError(ep + ": '" + label(b) + "' lies in " + to_string(b.key) + ", expected " + to_string(k));
      v.add(b.index, get_scalar(e[1], ep + "/1"));
    }
    return v;
  }

 private:
  const Collection& c_;
  std::map<std::string, BasisRef> index_;
};

json components_json(const Collection& c) {
  json out = json::object();
  for (int a : c.arities()) {
    json per = json::object();
    for (int d : c.degrees(a)) per[std::to_string(d)] = c.labels(Key{a, d});
    out[std::to_string(a)] = std::move(per);
  }
  return out;
}

int key_int(const std::string& s, const std::string& path) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  bad(path, "'" + s + "' is not an integer key");
}

Collection get_components(const json& j, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object arity -> degree -> labels");
  Collection c;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string ap = path + "/" + it.key();
    const int a = key_int(it.key(), ap);
    if (a < 1) throw SemanticError(ap + ": arity must be positive");
    if (!it.value().is_object()) bad(ap, "expected an object degree -> labels");
    for (auto jt = it.value().begin(); jt != it.value().end(); ++jt) {
      const std::string dp = ap + "/" + jt.key();
      auto labels = get_strings(jt.value(), dp);
      if (labels.empty()) continue;
      try {
        c.set_component(Key{a, key_int(jt.key(), dp)}, std::move(labels));
      } catch (const std::exception& e) {
        throw SemanticError(dp + ": " + e.what());
      }
    }
  }
  return c;
}

Window full_window(const Collection& c, int max_arity) {
  if (c.keys().empty()) return Window{max_arity, 0, 0};
  return Window{max_arity, c.min_degree(), c.max_degree()};
}

void check_d_squared(const std::string& what, const Collection& c, const std::function<ChainComplex(int)>& cx) {
  for (int a : c.arities()) {
    auto bad_degrees = cx(a).d_squared_violations();
    if (!bad_degrees.empty())
      throw SemanticError(what + ": d^2 != 0 in arity " + std::to_string(a) + ", degree " +
                          std::to_string(bad_degrees.front()));
  }
}

// ---------------------------------------------------------------- operads

json operad_json(const Operad& P0) {
  auto T = tabulate(P0);
  const Collection& C = T->basis();
  Labels L(C);
  json j = json::object();
  j["kind"] = "operad";
  j["name"] = T->name();
  j["max_arity"] = T->max_arity();
  j["symmetric"] = T->symmetric();
  j["components"] = components_json(C);
  j["unit"] = L.coeffs(T->unit().key, T->unit().v);
  if (T->augmentation()) j["augmentation"] = L.coeffs(Key{1, 0}, *T->augmentation());
  json diff = json::array();
  for (const auto& [b, v] : T->differentials())
    if (!v.empty()) diff.push_back(json::array({L.label(b), L.coeffs(Key{b.key.arity, b.key.degree - 1}, v)}));
  j["differential"] = std::move(diff);
  json comp = json::array();
  for (const auto& [key, v] : T->compositions()) {
    const auto& [p, s, q] = key;
    if (v.empty()) continue;
    comp.push_back(json::array({L.label(p), s, L.label(q), L.coeffs(composite_key(*T, p.key, s, q.key), v)}));
  }
  j["compositions"] = std::move(comp);
  json acts = json::array();
  if (T->symmetric())
    for (const Key& k : C.keys())
      for (int t = 1; t < k.arity; ++t) {
        Perm s = identity_perm(k.arity);
        std::swap(s[t - 1], s[t]);
        acts.push_back(json{{"component", json::array({k.arity, k.degree})},
                            {"perm", format_perm(s)},
                            {"matrix", matrix_json(matrix_of(C, k, C.dim(k), [&](const BasisRef& b) {
                               return T->act_basis(b, s);
                             }))}});
      }
  j["actions"] = std::move(acts);
  return j;
}

std::shared_ptr<TabulatedOperad> operad_from(const json& j, const std::string& path, const ParseOptions& opt);

std::shared_ptr<TabulatedOperad> operad_ref(const json& j, const std::string& path, const ParseOptions& opt) {
  if (j.is_object()) return operad_from(j, path, opt);
  std::filesystem::path f = opt.base_dir / get_string(j, path);
  std::ifstream in(f);
  if (!in) throw SemanticError(path + ": cannot read operad file '" + f.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  ParseOptions inner = opt;
  inner.base_dir = f.parent_path();
  return operad_from(parse_text(ss.str()), "", inner);
}

std::shared_ptr<TabulatedOperad> operad_from(const json& j, const std::string& path, const ParseOptions& opt) {
  const std::string kind = get_string(field(j, "kind", path), path + "/kind");
  if (kind != "operad") throw SemanticError(path + ": expected kind 'operad', found '" + kind + "'");
  Collection C = get_components(field(j, "components", path), path + "/components");
  Labels L(C);
  const int max_arity =
      j.contains("max_arity") ? get_int(j["max_arity"], path + "/max_arity") : std::max(1, C.max_arity());
  if (max_arity < C.max_arity()) throw SemanticError(path + ": a component exceeds max_arity");
  auto T = std::make_shared<TabulatedOperad>(j.contains("name") ? get_string(j["name"], path + "/name") : "", C,
                                             max_arity);
  const std::string name = "operad '" + T->name() + "'";
  if (j.contains("symmetric")) T->set_symmetric(get_bool(j["symmetric"], path + "/symmetric"));
  T->set_unit(Element{Key{1, 0}, L.vec(field(j, "unit", path), Key{1, 0}, path + "/unit")});
  if (T->unit().v.empty()) throw SemanticError(name + ": the unit is zero");
  if (j.contains("augmentation") && !j["augmentation"].is_null())
    T->set_augmentation(L.vec(j["augmentation"], Key{1, 0}, path + "/augmentation"));
  if (j.contains("differential")) {
    std::size_t n = 0;
    for (const auto& e : get_array(j["differential"], path + "/differential")) {
      const std::string ep = path + "/differential/" + std::to_string(n++);
      if (!e.is_array() || e.size() != 2) bad(ep, "expected [label, coefficients]");
      BasisRef b = L.ref(e[0], ep + "/0");
      T->set_differential(b, L.vec(e[1], Key{b.key.arity, b.key.degree - 1}, ep + "/1"));
    }
  }
  if (j.contains("compositions")) {
    std::size_t n = 0;
    for (const auto& e : get_array(j["compositions"], path + "/compositions")) {
      const std::string ep = path + "/compositions/" + std::to_string(n++);
      if (!e.is_array() || e.size() != 4) bad(ep, "expected [label, slot, label, coefficients]");
      BasisRef p = L.ref(e[0], ep + "/0");
      const int s = get_int(e[1], ep + "/1");
      BasisRef q = L.ref(e[2], ep + "/2");
      Key k;
      try {
        k = composite_key(*T, p.key, s, q.key);
      } catch (const std::exception& x) {
        throw SemanticError(ep + ": " + x.what());
      }
      T->set_composition(p, s, q, L.vec(e[3], k, ep + "/3"));
    }
  }
  if (j.contains("actions")) {
    std::size_t n = 0;
    for (const auto& e : get_array(j["actions"], path + "/actions")) {
      const std::string ep = path + "/actions/" + std::to_string(n++);
      const json& comp = get_array(field(e, "component", ep), ep + "/component");
      if (comp.size() != 2) bad(ep + "/component", "expected [arity, degree]");
      Key k{get_int(comp[0], ep + "/component/0"), get_int(comp[1], ep + "/component/1")};
      Perm s;
      try {
        s = parse_perm(get_string(field(e, "perm", ep), ep + "/perm"));
      } catch (const std::invalid_argument& x) {
        bad(ep + "/perm", x.what());
      }
      if (static_cast<int>(s.size()) != k.arity) throw SemanticError(ep + ": permutation size differs from arity");
      Matrix m = get_matrix(field(e, "matrix", ep), ep + "/matrix");
      if (m.rows() != C.dim(k) || m.cols() != C.dim(k))
        throw SemanticError(ep + ": action matrix does not match the component dimension");
      T->set_action(k, s, std::move(m));
    }
  }
  try {
    T->finalize();
  } catch (const std::exception& x) {
    throw SemanticError(name + ": " + x.what());
  }
  if (opt.check_axioms) {
    check_d_squared(name, C, [&](int a) { return T->complex(a); });
    CheckReport r = check_operad_axioms(*T, full_window(C, max_arity));
    if (!r.ok) throw SemanticError(name + ": operad axiom violated: " + r.first());
  }
  return T;
}

// ---------------------------------------------------------------- bimodules

json bimodule_json(const Bimodule& M) {
  auto T = tabulate(M);
  const Collection& C = T->basis();
  Labels L(C), LP(T->left_operad()->basis()), LQ(T->right_operad()->basis());
  json j = json::object();
  j["kind"] = "bimodule";
  j["name"] = T->name();
  j["max_arity"] = T->max_arity();
  j["left_operad"] = operad_json(*T->left_operad());
  j["right_operad"] = operad_json(*T->right_operad());
  j["components"] = components_json(C);
  if (T->torsor_unit()) j["torsor_unit"] = L.coeffs(Key{1, 0}, T->torsor_unit()->v);
  json diff = json::array();
  for (const auto& [b, v] : T->differentials())
    if (!v.empty()) diff.push_back(json::array({L.label(b), L.coeffs(Key{b.key.arity, b.key.degree - 1}, v)}));
  j["differential"] = std::move(diff);
  json right = json::array();
  for (const auto& [key, v] : T->right_table()) {
    const auto& [m, s, q] = key;
    if (v.empty()) continue;
    right.push_back(json::array({L.label(m), s, LQ.label(q), L.coeffs(right_key(*T, m.key, s, q.key), v)}));
  }
  j["right_action"] = std::move(right);
  json left = json::array();
  for (const auto& [key, v] : T->left_table()) {
    if (v.empty()) continue;
    json ms = json::array();
    std::vector<Key> ks;
    for (const BasisRef& m : key.second) {
      ms.push_back(L.label(m));
      ks.push_back(m.key);
    }
    left.push_back(json::array({LP.label(key.first), std::move(ms), L.coeffs(left_key(*T, key.first.key, ks), v)}));
  }
  j["left_action"] = std::move(left);
  return j;
}

std::shared_ptr<TabulatedBimodule> bimodule_from(const json& j, const ParseOptions& opt) {
  const std::string kind = get_string(field(j, "kind", ""), "/kind");
  if (kind != "bimodule") throw SemanticError("expected kind 'bimodule', found '" + kind + "'");
  OperadPtr P = operad_ref(field(j, "left_operad", ""), "/left_operad", opt);
  // identical descriptions denote one operad
  OperadPtr Q = field(j, "right_operad", "") == j["left_operad"] ? P
                                                                   : operad_ref(j["right_operad"], "/right_operad", opt);
  Collection C = get_components(field(j, "components", ""), "/components");
  Labels L(C), LP(P->basis()), LQ(Q->basis());
  const int max_arity = j.contains("max_arity") ? get_int(j["max_arity"], "/max_arity") : std::max(1, C.max_arity());
  auto T = std::make_shared<TabulatedBimodule>(j.contains("name") ? get_string(j["name"], "/name") : "", C, max_arity,
                                               P, Q);
  const std::string name = "bimodule '" + T->name() + "'";
  if (j.contains("torsor_unit") && !j["torsor_unit"].is_null())
    T->set_unit(Element{Key{1, 0}, L.vec(j["torsor_unit"], Key{1, 0}, "/torsor_unit")});
  if (j.contains("differential")) {
    std::size_t n = 0;
    for (const auto& e : get_array(j["differential"], "/differential")) {
      const std::string ep = "/differential/" + std::to_string(n++);
      if (!e.is_array() || e.size() != 2) bad(ep, "expected [label, coefficients]");
      BasisRef b = L.ref(e[0], ep + "/0");
      T->set_differential(b, L.vec(e[1], Key{b.key.arity, b.key.degree - 1}, ep + "/1"));
    }
  }
  if (j.contains("right_action")) {
    std::size_t n = 0;
    for (const auto& e : get_array(j["right_action"], "/right_action")) {
      const std::string ep = "/right_action/" + std::to_string(n++);
      if (!e.is_array() || e.size() != 4) bad(ep, "expected [label, slot, label, coefficients]");
      BasisRef m = L.ref(e[0], ep + "/0");
      const int s = get_int(e[1], ep + "/1");
      BasisRef q = LQ.ref(e[2], ep + "/2");
      Key k;
      try {
        k = right_key(*T, m.key, s, q.key);
      } catch (const std::exception& x) {
        throw SemanticError(ep + ": " + x.what());
      }
      T->set_right(m, s, q, L.vec(e[3], k, ep + "/3"));
    }
  }
  if (j.contains("left_action")) {
    std::size_t n = 0;
    for (const auto& e : get_array(j["left_action"], "/left_action")) {
      const std::string ep = "/left_action/" + std::to_string(n++);
      if (!e.is_array() || e.size() != 3) bad(ep, "expected [label, [labels], coefficients]");
      BasisRef p = LP.ref(e[0], ep + "/0");
      std::vector<BasisRef> ms;
      std::vector<Key> ks;
      std::size_t i = 0;
      for (const auto& x : get_array(e[1], ep + "/1")) {
        ms.push_back(L.ref(x, ep + "/1/" + std::to_string(i++)));
        ks.push_back(ms.back().key);
      }
      Key k;
      try {
        k = left_key(*T, p.key, ks);
      } catch (const std::exception& x) {
        throw SemanticError(ep + ": " + x.what());
      }
      T->set_left(p, std::move(ms), L.vec(e[2], k, ep + "/2"));
    }
  }
  if (opt.check_axioms) {
    check_d_squared(name, C, [&](int a) { return T->complex(a); });
    CheckReport r = check_bimodule_axioms(*T, full_window(C, max_arity));
    if (!r.ok) throw SemanticError(name + ": bimodule axiom violated: " + r.first());
  }
  return T;
}

// ---------------------------------------------------------------- certificates

json keyed_matrices(const std::map<Key, Matrix>& ms) {
  json out = json::array();
  for (const auto& [k, m] : ms) out.push_back(json{{"arity", k.arity}, {"degree", k.degree}, {"matrix", matrix_json(m)}});
  return out;
}

std::map<Key, Matrix> get_keyed_matrices(const json& j, const std::string& path) {
  std::map<Key, Matrix> out;
  std::size_t n = 0;
  for (const auto& e : get_array(j, path)) {
    const std::string ep = path + "/" + std::to_string(n++);
    Key k{get_int(field(e, "arity", ep), ep + "/arity"), get_int(field(e, "degree", ep), ep + "/degree")};
    if (!out.emplace(k, get_matrix(field(e, "matrix", ep), ep + "/matrix")).second)
      throw SemanticError(ep + ": repeated component " + to_string(k));
  }
  return out;
}

json complex_json(const ChainComplex& c) {
  json dims = json::array(), diffs = json::array();
  for (int k = c.lo(); k <= c.hi(); ++k) dims.push_back(c.dim(k));
  for (int k = c.lo() + 1; k <= c.hi(); ++k) diffs.push_back(matrix_json(c.d(k)));
  json j{{"lo", c.lo()},
         {"hi", c.hi()},
         {"complete_below", c.complete_below()},
         {"complete_above", c.complete_above()}};
  if (c.partial()) j["partial"] = true;
  j["dims"] = std::move(dims);
  j["differentials"] = std::move(diffs);
  return j;
}

ChainComplex get_complex(const json& j, const std::string& path) {
  const int lo = get_int(field(j, "lo", path), path + "/lo");
  const int hi = get_int(field(j, "hi", path), path + "/hi");
  std::vector<std::size_t> dims;
  std::size_t n = 0;
  for (const auto& e : get_array(field(j, "dims", path), path + "/dims")) {
    const int d = get_int(e, path + "/dims/" + std::to_string(n++));
    if (d < 0) throw SemanticError(path + ": negative dimension");
    dims.push_back(static_cast<std::size_t>(d));
  }
  std::vector<Matrix> diffs;
  n = 0;
  for (const auto& e : get_array(field(j, "differentials", path), path + "/differentials"))
    diffs.push_back(get_matrix(e, path + "/differentials/" + std::to_string(n++)));
  const bool cb = get_bool(field(j, "complete_below", path), path + "/complete_below");
  const bool ca = get_bool(field(j, "complete_above", path), path + "/complete_above");
  const bool partial = j.contains("partial") && get_bool(j["partial"], path + "/partial");
  try {
    ChainComplex c(lo, hi, std::move(dims), std::move(diffs), cb, ca);
    if (partial) c.mark_partial();
    return c;
  } catch (const std::invalid_argument& e) {
    throw SemanticError(path + ": " + e.what());
  }
}

json certificate_json(const ZigzagCertificate& c) {
  json j = json::object();
  j["kind"] = "certificate";
  j["name"] = "zigzag";
  j["window"] = json{{"max_arity", c.window.max_arity}, {"deg_lo", c.window.deg_lo}, {"deg_hi", c.window.deg_hi}};
  json trust = json::array();
  for (const auto& [k, m] : c.homology_iso) trust.push_back(json::array({k.arity, k.degree}));
  j["trust_region"] = std::move(trust);
  j["route"] = c.route;
  j["operads"] = json{{"P", c.P ? operad_json(*c.P) : json()}, {"Q", c.Q ? operad_json(*c.Q) : json()}};
  json cx = json::array();
  for (const auto& s : c.complexes) {
    json ar = json::array();
    for (const auto& [a, C] : s.arities) {
      json e = json{{"arity", a}};
      e.update(complex_json(C));
      ar.push_back(std::move(e));
    }
    cx.push_back(json{{"name", s.name}, {"arities", std::move(ar)}});
  }
  j["complexes"] = std::move(cx);
  json arrows = json::array();
  for (const auto& a : c.arrows)
    arrows.push_back(json{{"name", a.name},
                          {"kind", a.kind},
                          {"source", a.source},
                          {"target", a.target},
                          {"claim", a.claim},
                          {"matrices", keyed_matrices(a.matrices)}});
  j["arrows"] = std::move(arrows);
  json ids = json::array();
  for (const auto& i : c.identities) ids.push_back(json{{"lhs", i.lhs}, {"rhs", i.rhs}});
  j["identities"] = std::move(ids);
  j["zigzags"] = c.zigzags;
  j["construction"] = c.construction;
  j["construction_ok"] = c.construction_ok;
  j["transcript"] = c.transcript;
  j["homology_isomorphism"] = keyed_matrices(c.homology_iso);
  j["valid"] = c.valid;
  return j;
}

ZigzagCertificate certificate_from(const json& j, const ParseOptions& opt) {
  const std::string kind = get_string(field(j, "kind", ""), "/kind");
  if (kind != "certificate") throw SemanticError("expected kind 'certificate', found '" + kind + "'");
  ZigzagCertificate c;
  const json& w = field(j, "window", "");
  c.window = Window{get_int(field(w, "max_arity", "/window"), "/window/max_arity"),
                    get_int(field(w, "deg_lo", "/window"), "/window/deg_lo"),
                    get_int(field(w, "deg_hi", "/window"), "/window/deg_hi")};
  c.route = get_string(field(j, "route", ""), "/route");
  const json& ops = field(j, "operads", "");
  const json& P = field(ops, "P", "/operads");
  const json& Q = field(ops, "Q", "/operads");
  if (!P.is_null()) c.P = operad_from(P, "/operads/P", opt);
  if (!Q.is_null()) c.Q = P == Q ? c.P : operad_from(Q, "/operads/Q", opt);
  std::size_t n = 0;
  for (const auto& s : get_array(field(j, "complexes", ""), "/complexes")) {
    const std::string sp = "/complexes/" + std::to_string(n++);
    StoredComplex sc{get_string(field(s, "name", sp), sp + "/name"), {}};
    std::size_t m = 0;
    for (const auto& e : get_array(field(s, "arities", sp), sp + "/arities")) {
      const std::string ep = sp + "/arities/" + std::to_string(m++);
      sc.arities.emplace(get_int(field(e, "arity", ep), ep + "/arity"), get_complex(e, ep));
    }
    c.complexes.push_back(std::move(sc));
  }
  n = 0;
  for (const auto& a : get_array(field(j, "arrows", ""), "/arrows")) {
    const std::string ap = "/arrows/" + std::to_string(n++);
    c.arrows.push_back(Arrow{get_string(field(a, "name", ap), ap + "/name"),
                             get_string(field(a, "kind", ap), ap + "/kind"),
                             get_string(field(a, "source", ap), ap + "/source"),
                             get_string(field(a, "target", ap), ap + "/target"),
                             get_string(field(a, "claim", ap), ap + "/claim"),
                             get_keyed_matrices(field(a, "matrices", ap), ap + "/matrices")});
  }
  n = 0;
  for (const auto& i : get_array(field(j, "identities", ""), "/identities")) {
    const std::string ip = "/identities/" + std::to_string(n++);
    c.identities.push_back(
        Identity{get_strings(field(i, "lhs", ip), ip + "/lhs"), get_string(field(i, "rhs", ip), ip + "/rhs")});
  }
  c.zigzags = get_strings(field(j, "zigzags", ""), "/zigzags");
  c.construction = get_strings(field(j, "construction", ""), "/construction");
  c.construction_ok = get_bool(field(j, "construction_ok", ""), "/construction_ok");
  c.transcript = get_strings(field(j, "transcript", ""), "/transcript");
  c.homology_iso = get_keyed_matrices(field(j, "homology_isomorphism", ""), "/homology_isomorphism");
  c.valid = get_bool(field(j, "valid", ""), "/valid");
  // references between arrows, complexes and identities
  auto has_complex = [&](const std::string& name) {
    for (const auto& s : c.complexes)
      if (s.name == name) return true;
    return false;
  };
  auto has_arrow = [&](const std::string& name) {
    for (const auto& a : c.arrows)
      if (a.name == name) return true;
    return false;
  };
  for (const auto& a : c.arrows)
    if (!has_complex(a.source) || !has_complex(a.target))
      throw SemanticError("arrow '" + a.name + "' refers to a complex that is not stored");
  for (const char* need : {"P", "Q"})
    if (!has_complex(need)) throw SemanticError(std::string("complex '") + need + "' is not stored");
  for (const char* need : {"p'", "qbar"})
    if (!has_arrow(need)) throw SemanticError(std::string("arrow '") + need + "' is not stored");
  for (const auto& i : c.identities) {
    if (i.lhs.empty()) throw SemanticError("identity with an empty left side");
    for (const auto& x : i.lhs)
      if (!has_arrow(x)) throw SemanticError("identity refers to unknown arrow '" + x + "'");
    if (i.rhs != "id" && !has_arrow(i.rhs)) throw SemanticError("identity refers to unknown arrow '" + i.rhs + "'");
  }
  return c;
}

// ---------------------------------------------------------------- groups

json group_json(const GroupTable& g) {
  json mult = json::array();
  for (const auto& row : g.mult) {
    json r = json::array();
    for (int x : row) r.push_back(g.elements.at(static_cast<std::size_t>(x)));
    mult.push_back(std::move(r));
  }
  return json{{"kind", "group"}, {"name", g.name}, {"elements", g.elements}, {"mult", std::move(mult)}};
}

GroupTable group_from(const json& j) {
  GroupTable g;
  g.name = j.contains("name") ? get_string(j["name"], "/name") : "";
  g.elements = get_strings(field(j, "elements", ""), "/elements");
  std::map<std::string, int> idx;
  for (std::size_t i = 0; i < g.elements.size(); ++i)
    if (!idx.emplace(g.elements[i], static_cast<int>(i)).second)
      throw SemanticError("group element '" + g.elements[i] + "' listed twice");
  const json& rows = get_array(field(j, "mult", ""), "/mult");
  if (rows.size() != g.elements.size()) throw SemanticError("multiplication table is not square");
  for (std::size_t a = 0; a < rows.size(); ++a) {
    auto names = get_strings(rows[a], "/mult/" + std::to_string(a));
    if (names.size() != g.elements.size()) throw SemanticError("multiplication table is not square");
    std::vector<int> r;
    for (const auto& x : names) {
      auto it = idx.find(x);
      if (it == idx.end()) throw SemanticError("unknown group element '" + x + "'");
      r.push_back(it->second);
    }
    g.mult.push_back(std::move(r));
  }
  try {
    g.validate();
  } catch (const ContractError& e) {
    throw SemanticError(e.what());
  }
  return g;
}

}  // namespace

// ---------------------------------------------------------------- public

Document parse(const std::string& text, const ParseOptions& opt) {
  json j = parse_text(text);
  const std::string kind = get_string(field(j, "kind", ""), "/kind");
  if (kind == "operad") return operad_from(j, "", opt);
  if (kind == "bimodule") return bimodule_from(j, opt);
  if (kind == "certificate") return certificate_from(j, opt);
  if (kind == "group") return group_from(j);
  throw SemanticError("unknown document kind '" + kind + "'");
}

Document load(const std::filesystem::path& file, ParseOptions opt) {
  std::ifstream in(file);
  if (!in) throw SemanticError("cannot read '" + file.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  if (opt.base_dir == ".") opt.base_dir = file.parent_path().empty() ? "." : file.parent_path();
  return parse(ss.str(), opt);
}

std::shared_ptr<TabulatedOperad> parse_operad(const std::string& text, const ParseOptions& opt) {
  return operad_from(parse_text(text), "", opt);
}
std::shared_ptr<TabulatedBimodule> parse_bimodule(const std::string& text, const ParseOptions& opt) {
  return bimodule_from(parse_text(text), opt);
}
ZigzagCertificate parse_certificate(const std::string& text, const ParseOptions& opt) {
  return certificate_from(parse_text(text), opt);
}
GroupTable parse_group(const std::string& text) { return group_from(parse_text(text)); }

std::string serialize(const Operad& P) { return canonical(operad_json(P)); }
std::string serialize(const Bimodule& M) { return canonical(bimodule_json(M)); }
std::string serialize(const ZigzagCertificate& c) { return canonical(certificate_json(c)); }
std::string serialize(const GroupTable& g) { return canonical(group_json(g)); }

Verification verify(const ZigzagCertificate& c) {
  Verification v;
  v.derivation = derive(c);
  const auto& t = v.derivation.transcript;
  for (std::size_t i = 0; i < std::max(t.size(), c.transcript.size()); ++i) {
    const std::string a = i < c.transcript.size() ? c.transcript[i] : "<missing>";
    const std::string b = i < t.size() ? t[i] : "<missing>";
    if (a != b) v.differences.push_back("transcript line " + std::to_string(i + 1) + ": stored '" + a +
                                        "', derived '" + b + "'");
  }
  if (v.derivation.homology_iso != c.homology_iso)
    v.differences.push_back("homology isomorphism differs from the stored one");
  bool lines_ok = true;
  for (const auto& l : c.construction)
    if (l.find(": fails") != std::string::npos) lines_ok = false;
  if (lines_ok != c.construction_ok)
    v.differences.push_back("construction verdict disagrees with its recorded checks");
  v.valid = v.derivation.valid && c.construction_ok && lines_ok;
  if (v.valid != c.valid)
    v.differences.push_back(std::string("stored validity ") + (c.valid ? "true" : "false") + ", derived " +
                            (v.valid ? "true" : "false"));
  v.reproduced = v.differences.empty();
  return v;
}

Verification verify_payload(const std::string& text) {
  ParseOptions opt;
  return verify(parse_certificate(text, opt));
}

}  // namespace optor::io
