#include <doctest.h>

#include "optor/lifting.hpp"
#include "optor/stock.hpp"

using namespace optor;

namespace {

BimodulePtr canonical(const OperadPtr& Q) { return std::make_shared<CanonicalBimodule>(Q); }

ModuleMap identity_map(const RightModulePtr& M, int max_degree) {
  ModuleMap id{M, M, {}};
  for (const Key& k : M->basis().keys())
    if (k.degree <= max_degree) id.maps[k] = Matrix::identity(M->basis().dim(k));
  return id;
}

}  // namespace

TEST_CASE("splitting a complex") {
  // zero differential: everything is homology
  ChainComplex Z(0, 1, {2, 1}, {Matrix(2, 1)}, true, true);
  auto s = split_complex(Z, 0);
  CHECK(s.homology.size() == 2);
  CHECK(s.boundaries.empty());
  CHECK(s.complement.empty());

  // k -> k: acyclic
  ChainComplex A(0, 1, {1, 1}, {Matrix::identity(1)}, true, true);
  auto s0 = split_complex(A, 0);
  auto s1 = split_complex(A, 1);
  CHECK(s0.homology.empty());
  CHECK(s0.boundaries.size() == 1);
  CHECK(s1.complement.size() == 1);
  CHECK(s1.homology.empty());

  ChainComplex open(0, 1, {1, 1}, {Matrix(1, 1)}, true, false);
  CHECK_THROWS_AS(split_complex(open, 1), WindowError);
}

TEST_CASE("compatible splitting") {
  // A: k^2 in degree 0, k in degree 1 with d = (1, 0); B: k in degree 0; f = (0, 1)
  ChainComplex A(0, 1, {2, 1}, {Matrix::from_rows({{1}, {0}})}, true, true);
  ChainComplex B(0, 0, {1}, {}, true, true);
  Matrix f0 = Matrix::from_rows({{0, 1}});
  auto c = split_compatible(A, B, f0, Matrix(0, 1), 0);
  REQUIRE(c.source.homology.size() == 1);
  CHECK(f0.apply(c.source.homology[0]) == c.target.homology[0]);
  CHECK(c.source.boundaries.size() == 1);
  CHECK_THROWS_AS(split_compatible(A, B, Matrix(1, 2), Matrix(0, 1), 0), ContractError);
}

TEST_CASE("mapping cylinder") {
  auto Q = com_operad(3);
  auto R = build_resolution(canonical(Q), {3, 3, {}});
  auto Qm = std::make_shared<CanonicalBimodule>(Q);
  auto q = right_unit_map(R, Qm, 3);
  auto F = std::make_shared<MappingCylinder>(Qm, R, q);
  Window w{3, F->stored_degrees(1).first, F->stored_degrees(1).second};
  auto ax = check_right_module_axioms(*F, w);
  INFO(ax.summary());
  CHECK(ax.ok);
  auto p1 = cylinder_p1(F);
  auto p2 = cylinder_p2(F);
  CHECK(check_module_map(p1, w).ok);
  CHECK(check_module_map(p2, w).ok);
  CHECK(is_quasi_iso(p1.chain_maps(3), w).holds);
  CHECK(is_quasi_iso(p2.chain_maps(3), w).holds);
  for (const auto& [k, m] : p1.maps) CHECK(rank(m) == m.rows());
  // H(F) has the homology of Q
  for (int a = 1; a <= 3; ++a) CHECK(Homology(F->complex(a), 0).dim() == Q->basis().dim({a, 0}));
}

TEST_CASE("lifting against an isomorphism is composition with the inverse") {
  auto Z = group_algebra_operad(named_group("z2"));
  auto R = build_resolution(canonical(Z), {1, 3, {}});
  // f = -id, g = id: s = -id
  ModuleMap f = identity_map(R, 3);
  for (auto& [k, m] : f.maps) m = Matrix(m.rows(), m.cols()) - m;
  auto res = lift(LiftProblem{R, f, identity_map(R, 3), 2, {}, {}});
  CHECK(res.verified.ok);
  for (const auto& [k, m] : res.s.maps) CHECK(m == f.at(k));
}

TEST_CASE("lifting the zero map gives zero") {
  auto A = ass_operad(3);
  auto R = build_resolution(canonical(A), {3, 2, {}});
  ModuleMap zero{R, R, {}};
  auto res = lift(LiftProblem{R, identity_map(R, 2), zero, 2, {}, {}});
  CHECK(res.verified.ok);
  for (const auto& [k, m] : res.s.maps) CHECK(m.is_zero());
}

TEST_CASE("retraction of the unit map") {
  for (const OperadPtr& Q : {OperadPtr(group_algebra_operad(named_group("z2"))), OperadPtr(com_operad(3)),
                             OperadPtr(ass_operad(3)), OperadPtr(dual_numbers_operad())}) {
    INFO(Q->name());
    const int D = 2;
    auto R = build_resolution(canonical(Q), {Q->max_arity(), D + 1, {}});
    auto ret = retraction_mu(R, D);
    INFO(ret.verified.summary());
    CHECK(ret.verified.ok);
    CHECK(ret.lift.verified.ok);
    // the section really is a section
    auto p1 = cylinder_p1(ret.cylinder);
    for (const auto& [k, s] : ret.lift.s.maps) CHECK(p1.at(k) * s == Matrix::identity(R->basis().dim(k)));
    // normalization: mu(1) = 1_Q
    CHECK(ret.mu.apply(*R->torsor_unit()) == Q->unit());
  }
}

TEST_CASE("retraction descends to the truncation") {
  auto Q = group_algebra_operad(named_group("z2"));
  const int D = 1;
  auto R = build_resolution(canonical(Q), {1, D + 2, {}});
  auto ret = retraction_mu(R, D + 1);
  REQUIRE(ret.verified.ok);
  auto W = std::make_shared<Truncation>(R, D);
  auto mu = descend(ret.mu, W);
  CHECK(check_module_map(mu, Window{1, 0, D}).ok);
}

TEST_CASE("lift refuses non-surjective maps") {
  auto Z = group_algebra_operad(named_group("z2"));
  auto R = build_resolution(canonical(Z), {1, 2, {}});
  ModuleMap zero{R, R, {}};
  CHECK_THROWS_AS(lift(LiftProblem{R, zero, identity_map(R, 1), 1, {}, {}}), ContractError);
}
