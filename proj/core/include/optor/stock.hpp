#pragma once

// Table-driven operads and the stock constructors: group algebras, Com, Ass, a small
// dg test operad, augmentation kernels and unit adjoining.

#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "optor/operad.hpp"

namespace optor {

/// Operad whose structure maps are stored explicitly. Missing composition or
/// differential entries are zero.
class TabulatedOperad : public Operad {
 public:
  TabulatedOperad(std::string name, Collection basis, int max_arity);

  void set_composition(const BasisRef& p, int slot, const BasisRef& q, Vec v);
  void set_differential(const BasisRef& p, Vec v);
  /// Action matrix of one permutation on one component. finalize() closes the
  /// given permutations under products.
  void set_action(Key k, const Perm& sigma, Matrix m);
  void set_unit(Element u) { unit_ = std::move(u); }
  void set_augmentation(Vec eps) { augmentation_ = std::move(eps); }
  void set_symmetric(bool s) { symmetric_ = s; }
  void finalize();

  Vec compose_basis(const BasisRef& p, int slot, const BasisRef& q) const override;
  Vec diff_basis(const BasisRef& p) const override;
  Vec act_basis(const BasisRef& p, const Perm& sigma) const override;

  using CompKey = std::tuple<BasisRef, int, BasisRef>;
  const std::map<CompKey, Vec>& compositions() const { return comp_; }
  const std::map<BasisRef, Vec>& differentials() const { return diff_; }
  const std::map<Key, std::map<Perm, Matrix>>& actions() const { return act_; }

 private:
  std::map<CompKey, Vec> comp_;
  std::map<BasisRef, Vec> diff_;
  std::map<Key, std::map<Perm, Matrix>> act_;
};

/// Copies every in-range structure constant of P into a table.
std::shared_ptr<TabulatedOperad> tabulate(const Operad& P);

struct GroupTable {
  std::string name;
  std::vector<std::string> elements;
  std::vector<std::vector<int>> mult;  // mult[a][b] = index of a*b

  /// Throws ContractError naming the failed group axiom.
  void validate() const;
  int identity() const;
  int inverse(int a) const;
};

/// z1..z6, v4 (alias z2xz2), s3. Throws std::invalid_argument for unknown names.
GroupTable named_group(const std::string& name);
std::vector<std::string> named_group_names();

/// Arity 1, degree 0, basis = group elements, o_1 = multiplication, augmentation = sum of coefficients.
std::shared_ptr<TabulatedOperad> group_algebra_operad(const GroupTable& g);
/// Com(n) spanned by c<n> in degree 0, trivial action.
std::shared_ptr<TabulatedOperad> com_operad(int n_max);
/// Ass(n) spanned by the words x<w1>..x<wn>, the regular representation of S_n.
std::shared_ptr<TabulatedOperad> ass_operad(int n_max);
/// Unary dg operad: 1 and y in degree 0, x in degree 1, dx = y, all products of x, y zero.
/// Acyclic apart from the unit.
std::shared_ptr<TabulatedOperad> dual_numbers_operad();

/// The augmentation ideal as a sub-collection: arity 1 degree 0 is ker(eps), every
/// other component is copied.
struct AugmentationKernel {
  OperadPtr op;
  Collection basis;
  std::map<Key, std::vector<Vec>> vectors;  // basis element -> coordinates in op

  Vec embed(const BasisRef& b) const { return vectors.at(b.key).at(b.index); }
  /// Coordinates of an op-vector in the kernel basis; nullopt if outside the kernel.
  std::optional<Vec> coords(Key k, const Vec& v) const;
  Vec diff_basis(const BasisRef& b) const;

 private:
  friend AugmentationKernel augmentation_kernel(const OperadPtr& Q);
  friend AugmentationKernel whole_operad(const OperadPtr& Q);
  std::map<Key, Span> spans_;
};

/// Throws ContractError when Q carries no augmentation.
AugmentationKernel augmentation_kernel(const OperadPtr& Q);
/// Every component copied, unit included: the inner labels of the non-augmented resolution.
AugmentationKernel whole_operad(const OperadPtr& Q);

/// Q with 1_Q demoted to an ordinary operation and a fresh unit adjoined in front of the
/// arity-1 degree-0 basis. Augmented by the coefficient of the new unit.
class AdjoinedUnitOperad : public Operad {
 public:
  explicit AdjoinedUnitOperad(OperadPtr Q);

  const OperadPtr& original() const { return Q_; }
  /// Index shift between original and new basis on a component.
  std::size_t offset(Key k) const { return k == Key{1, 0} ? 1 : 0; }
  Vec lift(Key k, const Vec& v) const;   // original coordinates -> new
  Vec lower(Key k, const Vec& v) const;  // new coordinates (no unit part) -> original

  Vec compose_basis(const BasisRef& p, int slot, const BasisRef& q) const override;
  Vec diff_basis(const BasisRef& p) const override;
  Vec act_basis(const BasisRef& p, const Perm& sigma) const override;

 private:
  OperadPtr Q_;
};

struct UnitAdjunction {
  std::shared_ptr<const AdjoinedUnitOperad> op;
  OperadMorphism to_original;    // new unit -> 1_Q, identity elsewhere
  OperadMorphism from_original;  // inclusion; not unital
};

UnitAdjunction adjoin_unit(const OperadPtr& Q);

}  // namespace optor
