#pragma once

// Endomorphism operads of finite dg collections, sub-operads cut out by linear
// constraints, invariant endomorphisms of right modules, and the maps between them.
//
// End N(n) = sum over k <= A of Hom(sum_{i_1+..+i_n=k} N(i_1) x .. x N(i_n), N(k)),
// with basis E(t, y): the map sending the basis tensor t to y and all others to 0.
// Degree |y| - sum |t_j|. Composition is substitution; the Koszul sign of
// lambda o_i mu is (-1)^{|mu| (|x_1| + .. + |x_{i-1}|)}.
// The differential is d o lambda - (-1)^{|lambda|} lambda o d.

#include <map>
#include <memory>
#include <vector>

#include "optor/module.hpp"

namespace optor {

/// A plain dg collection, seen as a right module over the trivial operad.
class DgCollection : public RightModule {
 public:
  DgCollection(std::string name, Collection basis, std::map<BasisRef, Vec> d);

  Vec right_basis(const BasisRef& m, int slot, const BasisRef& q) const override;
  Vec diff_basis(const BasisRef& m) const override;

 private:
  std::map<BasisRef, Vec> d_;
};

/// The operad with only a unit, in arity 1.
OperadPtr trivial_operad();

class EndOperad : public Operad {
 public:
  struct Entry {
    std::vector<BasisRef> tensor;
    BasisRef out;
  };

  /// max_arity bounds both the operations and the arities of N that are used.
  EndOperad(RightModulePtr N, int max_arity);

  const RightModulePtr& target() const { return N_; }
  const Entry& entry(const BasisRef& b) const { return entries_.at(b.key).at(b.index); }
  std::optional<BasisRef> find(const std::vector<BasisRef>& tensor, const BasisRef& out) const;
  /// End basis elements whose source is the given tensor.
  const std::vector<BasisRef>& with_tensor(const std::vector<BasisRef>& tensor) const;

  /// lambda(t) for a basis tensor t, as coordinates in N.
  Element evaluate(const Element& lambda, const std::vector<BasisRef>& t) const;
  /// lambda(x_1, ..., x_n) for arbitrary homogeneous arguments (multilinear).
  Element evaluate(const Element& lambda, std::span<const Element> xs) const;
  /// Coordinates of the multilinear map given by its values on basis tensors.
  Element from_values(Key key, const std::function<Vec(const std::vector<BasisRef>&, Key out_key)>& values) const;

  Vec compose_basis(const BasisRef& p, int slot, const BasisRef& q) const override;
  Vec diff_basis(const BasisRef& p) const override;

 private:
  RightModulePtr N_;
  std::map<Key, std::vector<Entry>> entries_;
  std::map<std::pair<std::vector<BasisRef>, BasisRef>, BasisRef> index_;
  std::map<std::vector<BasisRef>, std::vector<BasisRef>> by_tensor_;
  std::map<BasisRef, std::vector<std::pair<BasisRef, Scalar>>> d_transpose_;
};

/// Sub-operad spanned per component by given vectors of an ambient operad. Structure
/// maps are computed in the ambient operad and read back; leaving the span is a
/// ContractError.
class SubOperad : public Operad {
 public:
  SubOperad(std::string name, OperadPtr ambient, std::map<Key, std::vector<Vec>> vectors);

  const OperadPtr& ambient() const { return ambient_; }
  const std::map<Key, std::vector<Vec>>& vectors() const { return vectors_; }
  Element embed(const Element& x) const;
  std::optional<Vec> coords(Key k, const Vec& ambient_vec) const;

  Vec compose_basis(const BasisRef& p, int slot, const BasisRef& q) const override;
  Vec diff_basis(const BasisRef& p) const override;

 private:
  OperadPtr ambient_;
  std::map<Key, std::vector<Vec>> vectors_;
  std::map<Key, Span> spans_;
};

/// Composition and differential closure of a sub-operad, checked on all in-window pairs.
CheckReport check_closure(const SubOperad& S, const Window& w);

struct InvariantEnd {
  std::shared_ptr<const EndOperad> end;
  std::shared_ptr<const SubOperad> sub;
  std::size_t clipped = 0;  // constraints not imposed because they leave the window
  CheckReport closure;
};

/// Maps lambda with lambda(.., x_j o_s c, ..) = (-1)^{|c|(|x_{j+1}|+..+|x_n|)} lambda(x) o c.
InvariantEnd invariant_endomorphism_operad(const RightModulePtr& N, int max_arity);

using KeyMaps = std::map<Key, Matrix>;

/// lambda -> (m_1..m_k -> f(lambda(g m_1, .., g m_k))) for degree-0 maps f: N -> M, g: M -> N.
OperadMorphism fbar(const std::shared_ptr<const EndOperad>& EN, const std::shared_ptr<const EndOperad>& EM,
                    const KeyMaps& f, const KeyMaps& g);
/// The restriction of fbar to invariant sub-operads; ContractError if an image leaves the target.
OperadMorphism fbar_restricted(const OperadMorphism& full, const std::shared_ptr<const SubOperad>& from,
                               const std::shared_ptr<const SubOperad>& to);

struct Kunneth {
  std::shared_ptr<const DgCollection> homology;  // H(N) with zero differential
  std::shared_ptr<const EndOperad> end_homology;
  std::map<Key, Matrix> matrices;  // H(End N)(n, d) -> End H(N)(n, d)
  bool invertible = true;
  bool injective = true;
};

/// [lambda] -> ([n_1], .., [n_k]) -> [lambda(n_1, .., n_k)] on representatives. N must be
/// finite and complete in every arity up to max_arity. With `sub`, the domain is H(sub)
/// and only injectivity is expected.
Kunneth kunneth_identification(const std::shared_ptr<const EndOperad>& E, int max_arity,
                               const std::shared_ptr<const SubOperad>& sub = nullptr);

/// lambda -> lambda(u, .., u) from a sub-operad of End M to M, per component.
KeyMaps iota_unit(const SubOperad& E, const Element& u, int max_arity);

/// p -> (m_1..m_k -> p(m_1, .., m_k)) into the invariant endomorphisms of M. ContractError
/// when an image fails the invariance constraints.
OperadMorphism left_action_operad_map(const BimodulePtr& M, const InvariantEnd& E);

}  // namespace optor
