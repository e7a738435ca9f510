#pragma once

// The tree resolution of a bimodule: free as a right module on trees whose root is
// decorated by M, inner nodes by the suspended augmentation ideal, and leaves by Q.
//
// Trees are stored as their depth-first node sequence (root first, children left to
// right); each node has as many children as the arity of its label. Shifted degrees:
// root |m|, inner |c| + 1, leaf |q|. A differential term acting at node i carries
// (-1)^(sum of shifted degrees of the nodes before i); moving a node past whole
// subtrees adds the usual Koszul sign.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "optor/module.hpp"
#include "optor/stock.hpp"

namespace optor {

struct TreeNode {
  enum class Kind : std::uint8_t { Root, Inner, Leaf };
  Kind kind = Kind::Root;
  BasisRef label;
  auto operator<=>(const TreeNode&) const = default;
};

using Tree = std::vector<TreeNode>;

struct ResolutionOptions {
  int max_arity = 1;
  /// Trees are enumerated up to this degree unless the resolution is finite.
  int max_degree = 0;
  /// Bound on inner nodes, used (and required) only when some label sits in negative degree.
  std::optional<int> node_cap;
};

class Resolution : public Bimodule {
 public:
  /// inner: the inner-node labels as vectors of the right operad of M.
  Resolution(BimodulePtr M, AugmentationKernel inner, ResolutionOptions opt);

  const BimodulePtr& base() const { return M_; }
  const AugmentationKernel& inner() const { return K_; }
  const ResolutionOptions& options() const { return opt_; }
  /// All trees enumerated and nothing lies beyond them.
  bool finite() const { return finite_; }
  int top_degree() const { return top_; }
  int bottom_degree() const { return bottom_; }

  const Tree& tree(const BasisRef& b) const { return trees_.at(b.key).at(b.index); }
  std::optional<BasisRef> find(const Tree& t) const;
  int inner_count(const BasisRef& b) const;
  /// The basis index of 1_Q; leaves carrying it mark free generators.
  std::size_t unit_leaf() const { return unit_leaf_; }
  bool is_skeleton(const BasisRef& b) const;
  std::string render(const Tree& t) const;

  Vec right_basis(const BasisRef& m, int slot, const BasisRef& q) const override;
  Vec left_basis(const BasisRef& p, std::span<const BasisRef> ms) const override;
  Vec diff_basis(const BasisRef& m) const override;
  /// The part of the differential coming from the internal differentials of the labels.
  Vec diff_internal(const BasisRef& m) const;
  bool complete_above(int arity) const override;
  bool complete_below(int arity) const override;
  bool exhaustive(int) const override { return !capped_; }
  std::pair<int, int> stored_degrees(int arity) const override;

  struct Skeleton {
    BasisRef skeleton;
    std::vector<BasisRef> leaves;
    int sign = 1;  // tree = sign * skeleton(leaves)
  };
  Skeleton skeleton_of(const BasisRef& b) const;
  /// x = sum over leaf tuples of w(leaves), with w a combination of skeletons.
  std::map<std::vector<BasisRef>, Element> decompose(const Element& x) const;

 private:
  void enumerate();
  BasisRef locate(const Tree& t, Key expect) const;
  void add_terms(const BasisRef& b, bool internal_only, Vec& out) const;

  BimodulePtr M_;
  AugmentationKernel K_;
  ResolutionOptions opt_;
  bool finite_ = false;
  bool capped_ = false;
  int top_ = 0;
  int bottom_ = 0;
  std::size_t unit_leaf_ = 0;
  std::map<Key, std::vector<Tree>> trees_;
  std::map<Tree, BasisRef> index_;
  mutable std::map<BasisRef, Skeleton> skeleton_cache_;
};

using ResolutionPtr = std::shared_ptr<const Resolution>;

/// Inner labels from the augmentation ideal when Q is augmented, otherwise from all of Q.
/// WindowError when negative degrees occur without a node cap.
ResolutionPtr build_resolution(const BimodulePtr& M, const ResolutionOptions& opt);

/// Zero-inner-node trees go to the total right action of their leaves on the root; all others to 0.
ModuleMap projection_pi(const ResolutionPtr& R);
/// m -> the corolla on m with unit leaves (a map of collections, not of modules).
ModuleMap inclusion_eta(const ResolutionPtr& R);
/// eta of the torsor unit; ContractError unless it is a closed degree-0 element projecting to the unit.
Element canonical_unit_lift(const Resolution& R);

struct Generator {
  Key key;
  Vec skeleton;  // coordinates in the resolution component `key`
  int stage = 0;
};

/// Generators in filtration order. Stage 2p+1: combinations of p-node skeletons closed
/// under the internal differential; stage 2p+2: the remaining p-node skeletons.
struct GeneratorFiltration {
  std::vector<Generator> generators;
  int max_degree = 0;
  CheckReport hypothesis;  // d(stage j) lies in the free module on stages < j
  /// Coordinates of a skeleton combination in the generators of its component.
  std::optional<Vec> coords(Key k, const Vec& skeleton) const;
  const std::vector<std::size_t>& in_component(Key k) const;

  std::map<Key, Span> spans;
  std::map<Key, std::vector<std::size_t>> members;
};

/// `first`, when given, becomes the first generator of its stage (it must be a closed
/// combination of zero-node skeletons).
GeneratorFiltration generator_filtration(const Resolution& R, int max_degree,
                                         const std::optional<Element>& first = std::nullopt);

/// d o d on every stored component; violations name the tree and the component.
CheckReport verify_d_squared(const Resolution& R);

/// M as a right module over Q with an adjoined unit, the new unit acting as the identity.
class UnitAdjoinedModule : public Bimodule {
 public:
  UnitAdjoinedModule(BimodulePtr M, std::shared_ptr<const AdjoinedUnitOperad> Q1);
  Vec right_basis(const BasisRef& m, int slot, const BasisRef& q) const override;
  Vec left_basis(const BasisRef& p, std::span<const BasisRef> ms) const override;
  Vec diff_basis(const BasisRef& m) const override;

 private:
  BimodulePtr M_;
  std::shared_ptr<const AdjoinedUnitOperad> Q1_;
};

/// The chain M -> M_inf -> M~_inf -> M_inf -> M for non-augmented Q, with M~_inf the
/// resolution over Q with an adjoined unit. Every induced homology map is tested.
struct UnitAdjoinedChain {
  ResolutionPtr small;
  ResolutionPtr big;
  ModuleMap include;  // M_inf -> M~_inf
  ModuleMap collapse; // M~_inf -> M_inf, sending the adjoined unit to 1_Q
  std::vector<QuasiIsoReport> reports;  // eta, include, collapse, pi
  bool holds = false;
};
UnitAdjoinedChain unit_adjoined_chain(const BimodulePtr& M, const ResolutionOptions& opt, const Window& w);

/// Good truncation at degree D: unchanged below D, the cokernel of d in degree D, zero above.
/// Needs P, Q and M concentrated in degrees [0, D] (WindowError otherwise) and trees up
/// to degree D + 1.
class Truncation : public Bimodule {
 public:
  Truncation(ResolutionPtr R, int D);

  const ResolutionPtr& resolution() const { return R_; }
  int top() const { return D_; }
  /// The quotient map on components of degree <= D.
  Element project(const Element& x) const;
  /// A representative in the resolution.
  Element lift(const Element& w) const;

  Vec right_basis(const BasisRef& m, int slot, const BasisRef& q) const override;
  Vec left_basis(const BasisRef& p, std::span<const BasisRef> ms) const override;
  Vec diff_basis(const BasisRef& m) const override;
  bool complete_above(int) const override { return true; }
  bool complete_below(int arity) const override { return R_->complete_below(arity); }
  bool exhaustive(int arity) const override { return R_->exhaustive(arity); }

 private:
  ResolutionPtr R_;
  int D_;
  std::map<int, Span> boundaries_;         // arity -> d(degree D + 1) inside degree D
  std::map<int, std::vector<std::size_t>> kept_;  // arity -> tree indices surviving in degree D
  std::map<int, std::map<std::size_t, std::size_t>> kept_index_;
};

/// Transports a map out of the resolution to the truncation (it must kill boundaries in
/// degree D and everything above). ContractError otherwise.
ModuleMap descend(const ModuleMap& f, const std::shared_ptr<const Truncation>& W);
/// The quotient map resolution -> truncation, on degrees <= D.
ModuleMap truncation_map(const std::shared_ptr<const Truncation>& W);

}  // namespace optor
