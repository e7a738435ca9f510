#pragma once

// Lifting maps out of the tree resolution against surjective quasi-isomorphisms, the
// mapping cylinder that turns any quasi-isomorphism into one, and the retraction it yields.

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "optor/module.hpp"
#include "optor/resolution.hpp"

namespace optor {

/// One degree of a complex: C_k = H + B + E, with B the boundaries d(E_{k+1}), H cycles
/// representing homology and d mapping E_k isomorphically onto B_{k-1}.
struct Splitting {
  int degree = 0;
  std::vector<Vec> homology;
  std::vector<Vec> boundaries;  // boundaries[i] = d(preimages[i]), preimages in degree + 1
  std::vector<Vec> preimages;
  std::vector<Vec> complement;  // E_k
};

/// WindowError unless H_k is trusted.
Splitting split_complex(const ChainComplex& C, int k);

struct CompatibleSplitting {
  Splitting source;
  Splitting target;
};

/// Splittings of A and B in degree k with f(H_A) = H_B basis-wise and f(B_A) = B_B.
/// fk, fk1: f in degrees k and k + 1. ContractError when f is not surjective there or
/// fails to be a quasi-isomorphism in degree k.
CompatibleSplitting split_compatible(const ChainComplex& A, const ChainComplex& B, const Matrix& fk,
                                     const Matrix& fk1, int k);

/// X + Y + Y[1] with d(x, y, y') = (dx, dy, y - dy'), the right action componentwise.
/// p1 = (phi, id, 0) onto Y is a surjection, a quasi-isomorphism iff phi is one;
/// p2 = (id, 0, 0) onto X is always a quasi-isomorphism.
class MappingCylinder : public RightModule {
 public:
  MappingCylinder(RightModulePtr X, RightModulePtr Y, ModuleMap phi);

  const RightModulePtr& source() const { return X_; }
  const RightModulePtr& target() const { return Y_; }
  const ModuleMap& phi() const { return phi_; }
  int top_degree() const { return top_; }

  Vec right_basis(const BasisRef& m, int slot, const BasisRef& q) const override;
  Vec diff_basis(const BasisRef& m) const override;
  bool complete_above(int arity) const override;
  bool complete_below(int arity) const override;
  bool exhaustive(int arity) const override;
  std::pair<int, int> stored_degrees(int arity) const override;

  /// Position of each summand inside a component.
  struct Layout {
    std::size_t x = 0, y = 0, s = 0;
  };
  Layout layout(Key k) const;
  Element inject_x(const Element& x) const;
  Element inject_y(const Element& y) const;
  Element inject_s(const Element& y) const;  // y in degree k + 1 lands in degree k

 private:
  RightModulePtr X_, Y_;
  ModuleMap phi_;
  int bottom_ = 0, top_ = -1;
  bool complete_ = true;
};

ModuleMap cylinder_p1(const std::shared_ptr<const MappingCylinder>& F);
ModuleMap cylinder_p2(const std::shared_ptr<const MappingCylinder>& F);

/// f o g, component by component.
ModuleMap compose(const ModuleMap& f, const ModuleMap& g);

struct LiftProblem {
  ResolutionPtr N;
  ModuleMap f;  // A -> B, surjective quasi-isomorphism
  ModuleMap g;  // N -> B
  int max_degree = 0;
  /// Optional normalization: the first generator and its prescribed image in A.
  std::optional<Element> first;
  std::optional<Element> first_value;
};

struct LiftResult {
  ModuleMap s;  // N -> A in degrees <= max_degree
  GeneratorFiltration filtration;
  CheckReport verified;  // f s = g, d s = s d, s(x o q) = s(x) o q
};

/// Generator by generator up the filtration: c' solves d c' = s(dv), then a cycle z with
/// f(z) = g(v) - f(c') is found in H_A + B_A, and s(v) = z + c'. Basic (echelon) solutions
/// throughout. ContractError on a failed hypothesis, WindowError on a clipped degree.
LiftResult lift(const LiftProblem& p);

/// c -> u o_1 c for the torsor unit u of M; a map of right modules Q -> M.
ModuleMap right_unit_map(const BimodulePtr& M, const RightModulePtr& Q, int max_degree);

struct Retraction {
  ModuleMap q;   // Q -> N
  ModuleMap mu;  // N -> Q, mu q = id
  std::shared_ptr<const MappingCylinder> cylinder;
  LiftResult lift;
  CheckReport verified;  // mu q = id, mu a map of right modules
};

/// mu = p2 o s with s a section of the cylinder projection, normalized by s(q(1)) = (1, 0, 0).
/// N = R with the torsor unit of R; computed through degree max_degree (R must reach max_degree + 1
/// unless finite). ContractError when q(1) cannot be made a generator.
Retraction retraction_mu(const ResolutionPtr& R, int max_degree);

}  // namespace optor
