#pragma once

// Right modules and bimodules over dg operads, module maps, axiom checks.
//
// Right actions are partial: m o_i q. The total right action m(q_1, ..., q_n) and the
// left action p(m_1, ..., m_k) follow the same Koszul conventions as total_compose.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "optor/operad.hpp"

namespace optor {

class RightModule {
 public:
  virtual ~RightModule() = default;

  const std::string& name() const { return name_; }
  const Collection& basis() const { return basis_; }
  int max_arity() const { return max_arity_; }
  const OperadPtr& right_operad() const { return right_; }
  bool symmetric() const { return symmetric_; }
  bool has_differential() const { return has_differential_; }

  virtual Vec right_basis(const BasisRef& m, int slot, const BasisRef& q) const = 0;
  virtual Vec diff_basis(const BasisRef&) const { return {}; }
  virtual Vec act_basis(const BasisRef& m, const Perm& sigma) const;
  /// False when degrees above the stored ones may be nonzero.
  virtual bool complete_above(int /*arity*/) const { return true; }
  virtual bool complete_below(int /*arity*/) const { return true; }
  /// False when the stored basis is cut off inside its degree range (a node cap).
  virtual bool exhaustive(int /*arity*/) const { return true; }
  /// Degree range materialized in an arity; empty degrees inside it are genuinely zero.
  virtual std::pair<int, int> stored_degrees(int arity) const;

  Element right(const Element& m, int slot, const Element& q) const;
  Element diff(const Element& m) const;
  Element act(const Element& m, const Perm& sigma) const;
  ChainComplex complex(int arity) const;

 protected:
  std::string name_;
  Collection basis_;
  int max_arity_ = 1;
  OperadPtr right_;
  bool symmetric_ = false;
  bool has_differential_ = false;
};

class Bimodule : public RightModule {
 public:
  const OperadPtr& left_operad() const { return left_; }
  /// Degree-0 arity-1 element used by the unit maps, when present.
  const std::optional<Element>& torsor_unit() const { return unit_; }

  /// p(m_1, ..., m_k) on basis elements; k = arity of p.
  virtual Vec left_basis(const BasisRef& p, std::span<const BasisRef> ms) const = 0;
  Element left(const Element& p, std::span<const Element> ms) const;

 protected:
  OperadPtr left_;
  std::optional<Element> unit_;
};

using RightModulePtr = std::shared_ptr<const RightModule>;
using BimodulePtr = std::shared_ptr<const Bimodule>;

/// Key of m o_i q; ContractError on a bad slot, WindowError past max_arity.
Key right_key(const RightModule& M, Key m, int slot, Key q);
/// Key of p(m_1, ..., m_k); ContractError on an arity mismatch, WindowError past max_arity.
Key left_key(const Bimodule& M, Key p, std::span<const Key> ms);

/// m(q_1, ..., q_n) through partial actions in right-to-left slot order.
Element total_right(const RightModule& M, const Element& m, std::span<const Element> qs);

/// Table-driven bimodule. Missing entries are zero.
class TabulatedBimodule : public Bimodule {
 public:
  TabulatedBimodule(std::string name, Collection basis, int max_arity, OperadPtr left, OperadPtr right);

  void set_right(const BasisRef& m, int slot, const BasisRef& q, Vec v);
  void set_left(const BasisRef& p, std::vector<BasisRef> ms, Vec v);
  void set_differential(const BasisRef& m, Vec v);
  void set_unit(std::optional<Element> u) { unit_ = std::move(u); }

  Vec right_basis(const BasisRef& m, int slot, const BasisRef& q) const override;
  Vec left_basis(const BasisRef& p, std::span<const BasisRef> ms) const override;
  Vec diff_basis(const BasisRef& m) const override;

  using RightKey = std::tuple<BasisRef, int, BasisRef>;
  using LeftKey = std::pair<BasisRef, std::vector<BasisRef>>;
  const std::map<RightKey, Vec>& right_table() const { return right_tab_; }
  const std::map<LeftKey, Vec>& left_table() const { return left_tab_; }
  const std::map<BasisRef, Vec>& differentials() const { return diff_; }

 private:
  std::map<RightKey, Vec> right_tab_;
  std::map<LeftKey, Vec> left_tab_;
  std::map<BasisRef, Vec> diff_;
};

/// Copies every in-range structure constant of M.
std::shared_ptr<TabulatedBimodule> tabulate(const Bimodule& M);

/// Q as a Q-Q bimodule (left action = total composition, right = partial composition),
/// with torsor unit 1_Q unless another degree-0 arity-1 element is given.
class CanonicalBimodule : public Bimodule {
 public:
  explicit CanonicalBimodule(OperadPtr Q, std::optional<Element> unit = std::nullopt);

  Vec right_basis(const BasisRef& m, int slot, const BasisRef& q) const override;
  Vec left_basis(const BasisRef& p, std::span<const BasisRef> ms) const override;
  Vec diff_basis(const BasisRef& m) const override;
  Vec act_basis(const BasisRef& m, const Perm& sigma) const override;
};

/// Calls fn for every tuple of `length` in-window basis elements whose arities sum to at most max_total.
void for_each_tuple(const Collection& c, const Window& w, int length, int max_total,
                    const std::function<void(const std::vector<BasisRef>&)>& fn);
/// In-window basis elements of a collection.
std::vector<BasisRef> window_basis(const Collection& c, const Window& w);

/// Exhaustive in-window check of the right-module laws (and the left-module and
/// compatibility laws for bimodules). Instances whose result leaves the materialized
/// range are skipped.
CheckReport check_right_module_axioms(const RightModule& M, const Window& w);
CheckReport check_bimodule_axioms(const Bimodule& M, const Window& w);

/// Degree-preserving linear map of right modules, per component.
struct ModuleMap {
  RightModulePtr source;
  RightModulePtr target;
  std::map<Key, Matrix> maps;

  Matrix at(Key k) const;
  Element apply(const Element& x) const;
  ArityChainMap chain_maps(int max_arity) const;
};

/// Differential and right-action compatibility; with `left`, also the left action
/// (both ends must then be bimodules over the same operad).
CheckReport check_module_map(const ModuleMap& f, const Window& w, bool left = false);

}  // namespace optor
