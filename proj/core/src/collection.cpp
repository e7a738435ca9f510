#include "optor/collection.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace optor {

std::string to_string(const Key& k) {
  return "(arity " + std::to_string(k.arity) + ", degree " + std::to_string(k.degree) + ")";
}

Element basis_element(const BasisRef& b, const Scalar& c) { return Element{b.key, Vec::unit(b.index, c)}; }

void Collection::set_component(Key k, std::vector<std::string> labels) {
  Component c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!c.index.emplace(labels[i], i).second)
      throw std::invalid_argument("duplicate label '" + labels[i] + "' in component " + to_string(k));
  }
  c.labels = std::move(labels);
  if (c.labels.empty())
    comps_.erase(k);
  else
    comps_[k] = std::move(c);
}

std::size_t Collection::dim(Key k) const {
  auto it = comps_.find(k);
  return it == comps_.end() ? 0 : it->second.labels.size();
}

const std::vector<std::string>& Collection::labels(Key k) const {
  static const std::vector<std::string> empty;
  auto it = comps_.find(k);
  return it == comps_.end() ? empty : it->second.labels;
}

std::optional<std::size_t> Collection::find(Key k, const std::string& label) const {
  auto it = comps_.find(k);
  if (it == comps_.end()) return std::nullopt;
  auto jt = it->second.index.find(label);
  if (jt == it->second.index.end()) return std::nullopt;
  return jt->second;
}

std::vector<Key> Collection::keys() const {
  std::vector<Key> out;
  for (const auto& [k, _] : comps_) out.push_back(k);
  return out;
}

std::vector<int> Collection::arities() const {
  std::vector<int> out;
  for (const auto& [k, _] : comps_)
    if (out.empty() || out.back() != k.arity) out.push_back(k.arity);
  return out;
}

std::vector<int> Collection::degrees(int arity) const {
  std::vector<int> out;
  for (const auto& [k, _] : comps_)
    if (k.arity == arity) out.push_back(k.degree);
  return out;
}

int Collection::max_arity() const { return comps_.empty() ? 0 : comps_.rbegin()->first.arity; }

int Collection::min_degree() const {
  int m = 0;
  bool first = true;
  for (const auto& [k, _] : comps_) {
    if (first || k.degree < m) m = k.degree;
    first = false;
  }
  return m;
}

int Collection::max_degree() const {
  int m = 0;
  bool first = true;
  for (const auto& [k, _] : comps_) {
    if (first || k.degree > m) m = k.degree;
    first = false;
  }
  return m;
}

std::size_t Collection::total_dim() const {
  std::size_t n = 0;
  for (const auto& [_, c] : comps_) n += c.labels.size();
  return n;
}

std::size_t Collection::total_dim(int arity) const {
  std::size_t n = 0;
  for (const auto& [k, c] : comps_)
    if (k.arity == arity) n += c.labels.size();
  return n;
}

Collection shift(const Collection& v, int r) {
  Collection out;
  for (const Key& k : v.keys()) out.set_component(Key{k.arity, k.degree - r}, v.labels(k));
  return out;
}

// ---- permutations ----

Perm identity_perm(int n) {
  Perm p(n);
  std::iota(p.begin(), p.end(), 1);
  return p;
}

Perm compose_perm(const Perm& a, const Perm& b) {
  if (a.size() != b.size()) throw std::invalid_argument("compose_perm: size mismatch");
  Perm r(a.size());
  for (std::size_t j = 0; j < b.size(); ++j) r[j] = a[b[j] - 1];
  return r;
}

Perm inverse_perm(const Perm& p) {
  Perm r(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) r[p[j] - 1] = static_cast<int>(j) + 1;
  return r;
}

std::vector<Perm> all_perms(int n) {
  std::vector<Perm> out;
  Perm p = identity_perm(n);
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

std::string format_perm(const Perm& p) {
  std::ostringstream os;
  for (std::size_t j = 0; j < p.size(); ++j) os << (j ? "," : "") << p[j];
  return os.str();
}

Perm parse_perm(const std::string& s) {
  Perm p;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) throw std::invalid_argument("malformed permutation '" + s + "'");
    p.push_back(std::stoi(tok));
  }
  if (!is_perm(p)) throw std::invalid_argument("not a permutation: '" + s + "'");
  return p;
}

bool is_perm(const Perm& p) {
  std::vector<bool> seen(p.size() + 1, false);
  for (int x : p) {
    if (x < 1 || x > static_cast<int>(p.size()) || seen[x]) return false;
    seen[x] = true;
  }
  return true;
}

Perm block_perm_outer(const Perm& sigma, int i, int m) {
  int n = static_cast<int>(sigma.size());
  int si = sigma[i - 1];
  auto start = [&](int c) { return c <= si ? c : c + m - 1; };
  Perm out(n + m - 1);
  for (int j = 1; j <= n + m - 1; ++j) {
    int b, o;
    if (j < i) {
      b = j;
      o = 0;
    } else if (j < i + m) {
      b = i;
      o = j - i;
    } else {
      b = j - m + 1;
      o = 0;
    }
    out[j - 1] = start(sigma[b - 1]) + o;
  }
  return out;
}

Perm block_perm_inner(int n, int i, const Perm& tau) {
  int m = static_cast<int>(tau.size());
  Perm out = identity_perm(n + m - 1);
  for (int o = 0; o < m; ++o) out[i - 1 + o] = i - 1 + tau[o];
  return out;
}

}  // namespace optor
