#pragma once

// Differential graded operads given by partial compositions on basis elements.
//
// Conventions: homological grading, d of degree -1. Partial compositions satisfy
//   (a o_i b) o_{i-1+j} c = a o_i (b o_j c)
//   (a o_i b) o_{k-1+m} c = (-1)^{|b||c|} (a o_k c) o_i b      (i < k, m = arity b)
//   d(a o_i b) = da o_i b + (-1)^{|a|} a o_i db
// and, when a symmetric-group action is present (p.s)(x_1..x_n) = p(y) with y_{s(j)} = x_j.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "optor/chain.hpp"
#include "optor/collection.hpp"
#include "optor/graded.hpp"

namespace optor {

class Operad {
 public:
  virtual ~Operad() = default;

  const std::string& name() const { return name_; }
  const Collection& basis() const { return basis_; }
  /// Largest arity represented; compositions beyond it are window overflows.
  int max_arity() const { return max_arity_; }
  const Element& unit() const { return unit_; }
  /// Linear functional on the (arity 1, degree 0) component, when augmented.
  const std::optional<Vec>& augmentation() const { return augmentation_; }
  bool symmetric() const { return symmetric_; }
  bool has_differential() const { return has_differential_; }

  virtual Vec compose_basis(const BasisRef& p, int slot, const BasisRef& q) const = 0;
  virtual Vec diff_basis(const BasisRef&) const { return {}; }
  virtual Vec act_basis(const BasisRef& p, const Perm& sigma) const;

  virtual Element compose(const Element& p, int slot, const Element& q) const;
  Element diff(const Element& p) const;
  Element act(const Element& p, const Perm& sigma) const;

  ChainComplex complex(int arity) const;

 protected:
  std::string name_;
  Collection basis_;
  int max_arity_ = 1;
  Element unit_;
  std::optional<Vec> augmentation_;
  bool symmetric_ = false;
  bool has_differential_ = false;
};

using OperadPtr = std::shared_ptr<const Operad>;

/// Key of p o_i q; throws ContractError on a bad slot and WindowError past max_arity.
Key composite_key(const Operad& P, Key p, int slot, Key q);

/// p(x_1, ..., x_k) via partial compositions in right-to-left slot order, with the
/// Koszul sign relating it to the left-to-right composite.
Element total_compose(const Operad& P, const Element& p, std::span<const Element> args);

/// Exhaustive in-window verification of the operad axioms.
CheckReport check_operad_axioms(const Operad& P, const Window& w);

/// Degree-preserving linear maps between operads, per component.
struct OperadMorphism {
  OperadPtr source;
  OperadPtr target;
  std::map<Key, Matrix> maps;  // source component key -> matrix into target component with same key

  Element apply(const Element& x) const;
  Matrix at(Key k) const;
  ArityChainMap chain_maps(int max_arity) const;
};

OperadMorphism identity_morphism(const OperadPtr& P);

/// Unit, composition, differential and (when both sides are symmetric) equivariance laws.
CheckReport check_morphism(const OperadMorphism& f, const Window& w, bool unital = true);

}  // namespace optor
