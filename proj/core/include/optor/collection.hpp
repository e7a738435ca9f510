#pragma once

// Arity- and degree-indexed collections of finite bases (the underlying data of
// S-modules, operads and modules), homogeneous elements, permutations.

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "optor/linear.hpp"

namespace optor {

struct Key {
  int arity = 0;
  int degree = 0;
  auto operator<=>(const Key&) const = default;
};

std::string to_string(const Key& k);

struct BasisRef {
  Key key;
  std::size_t index = 0;
  auto operator<=>(const BasisRef&) const = default;
};

/// Homogeneous element: a sparse coordinate vector in the component `key`.
struct Element {
  Key key;
  Vec v;

  bool is_zero() const { return v.empty(); }
  friend bool operator==(const Element& a, const Element& b) {
    return (a.v.empty() && b.v.empty()) || (a.key == b.key && a.v == b.v);
  }
};

Element basis_element(const BasisRef& b, const Scalar& c = 1);

/// Graded space of one arity: per-degree ordered label lists.
class Collection {
 public:
  /// Labels must be unique within the component. Replaces an existing component.
  void set_component(Key k, std::vector<std::string> labels);
  std::size_t dim(Key k) const;
  const std::vector<std::string>& labels(Key k) const;
  const std::string& label(const BasisRef& b) const { return labels(b.key).at(b.index); }
  std::optional<std::size_t> find(Key k, const std::string& label) const;
  bool has(Key k) const { return comps_.count(k) > 0; }

  /// Nonempty components in (arity, degree) order.
  std::vector<Key> keys() const;
  std::vector<int> arities() const;
  std::vector<int> degrees(int arity) const;
  int max_arity() const;
  int min_degree() const;
  int max_degree() const;
  std::size_t total_dim() const;
  std::size_t total_dim(int arity) const;

  friend bool operator==(const Collection& a, const Collection& b) { return a.comps_ == b.comps_; }

 private:
  struct Component {
    std::vector<std::string> labels;
    std::unordered_map<std::string, std::size_t> index;
    friend bool operator==(const Component& a, const Component& b) { return a.labels == b.labels; }
  };
  std::map<Key, Component> comps_;
};

/// (V[r])^d = V^{d+r}: an element of degree e in V sits in degree e - r of V[r].
Collection shift(const Collection& v, int r);

/// Permutations in one-line notation, 1-based: p[j-1] = p(j).
using Perm = std::vector<int>;

Perm identity_perm(int n);
Perm compose_perm(const Perm& a, const Perm& b);  // (a b)(j) = a(b(j))
Perm inverse_perm(const Perm& p);
std::vector<Perm> all_perms(int n);
std::string format_perm(const Perm& p);
Perm parse_perm(const std::string& s);
bool is_perm(const Perm& p);

/// Block permutation induced on inputs when slot i of an arity-n operation with
/// action sigma receives an arity-m operation: (p.sigma) o_i q = (p o_{sigma(i)} q).sigma'.
Perm block_perm_outer(const Perm& sigma, int i, int m);
/// Permutation of an arity-n operation's composite when the inserted arity-m
/// operation at slot i is acted on by tau: p o_i (q.tau) = (p o_i q).tau'.
Perm block_perm_inner(int n, int i, const Perm& tau);

inline int koszul(long long e) { return (e % 2 == 0) ? 1 : -1; }

}  // namespace optor
