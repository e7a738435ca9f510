#include <doctest.h>

#include "optor/stock.hpp"
#include "optor/zigzag.hpp"

using namespace optor;

namespace {

BimodulePtr canonical(const OperadPtr& Q) { return std::make_shared<CanonicalBimodule>(Q); }

// Q[G] with left and right multiplication and unit u
BimodulePtr regular_bitorsor(const GroupTable& g, int u) {
  auto Q = group_algebra_operad(g);
  return std::make_shared<CanonicalBimodule>(Q, basis_element(BasisRef{{1, 0}, static_cast<std::size_t>(u)}));
}

bool mentions_failure(const ZigzagCertificate& c) {
  for (const auto& l : c.transcript)
    if (l.find(": fails") != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("canonical torsor gives identity isomorphisms") {
  for (const OperadPtr& Q : {OperadPtr(com_operad(3)), OperadPtr(ass_operad(3))}) {
    INFO(Q->name());
    auto c = quasi_torsor_pipeline(canonical(Q), Window{3, 0, 0});
    CHECK(c.valid);
    CHECK(c.route == "strict");
    for (const auto& [k, m] : homology_isomorphism(c)) CHECK(m == Matrix::identity(m.rows()));
  }
}

TEST_CASE("transposition bitorsor gives conjugation") {
  GroupTable s3 = named_group("s3");
  int t = -1;
  for (std::size_t a = 0; a < s3.elements.size(); ++a)
    if (static_cast<int>(a) != s3.identity() && s3.mult[a][a] == s3.identity() && t < 0) t = static_cast<int>(a);
  REQUIRE(t >= 0);
  auto M = regular_bitorsor(s3, t);
  auto c = quasi_torsor_pipeline(M, Window{1, 0, 0});
  REQUIRE(c.valid);
  const Matrix& phi = homology_isomorphism(c).at({1, 0});
  // zero differential: class coordinates are group coordinates
  for (std::size_t g = 0; g < s3.elements.size(); ++g) {
    const int conj = s3.mult[s3.mult[s3.inverse(t)][g]][t];
    CHECK(phi.apply(Vec::unit(g)) == Vec::unit(static_cast<std::size_t>(conj)));
  }
  auto strict = strict_torsor_isomorphism(M, Window{1, 0, 0});
  CHECK(strict.morphism.at({1, 0}) == phi);
}

TEST_CASE("resolution route for the criterion fixtures") {
  for (const OperadPtr& Q : {OperadPtr(group_algebra_operad(named_group("z2"))), OperadPtr(com_operad(3)),
                             OperadPtr(ass_operad(3))}) {
    INFO(Q->name());
    auto c = quasi_torsor_pipeline(canonical(Q), Window{Q->max_arity(), 0, 1}, PipelineOptions{true});
    for (const auto& l : c.construction) INFO(l);
    CHECK(c.construction_ok);
    CHECK(c.valid);
    CHECK(c.route == "resolution");
    CHECK_FALSE(mentions_failure(c));
    for (const auto& [k, m] : homology_isomorphism(c)) CHECK(is_invertible(m));
  }
}

TEST_CASE("a resolution as input bimodule") {
  auto Q = com_operad(3);
  auto R = build_resolution(canonical(Q), ResolutionOptions{3, 4, std::nullopt});
  CHECK_FALSE(is_torsor(*R, Window{3, 0, 2}).holds);
  CHECK(is_quasi_torsor(*R, Window{3, 0, 2}).holds);
  auto c = quasi_torsor_pipeline(R, Window{3, 0, 2});
  CHECK(c.route == "resolution");
  CHECK(c.valid);
}

TEST_CASE("derivation reproduces the transcript") {
  auto c = quasi_torsor_pipeline(canonical(group_algebra_operad(named_group("z2"))), Window{1, 0, 1},
                                 PipelineOptions{true});
  auto d = derive(c);
  CHECK(d.transcript == c.transcript);
  CHECK(d.homology_iso == c.homology_iso);
}

TEST_CASE("a corrupted retraction is pinpointed") {
  auto Q = group_algebra_operad(named_group("z2"));
  auto c = quasi_torsor_pipeline(canonical(Q), Window{1, 0, 0});
  REQUIRE(c.valid);
  for (auto& a : c.arrows)
    if (a.name == "mu")
      for (auto& [k, m] : a.matrices) m = Matrix(m.rows(), m.cols());
  auto d = derive(c);
  CHECK_FALSE(d.valid);
  bool found = false;
  for (const auto& l : d.transcript)
    if (l.rfind("identity mu o q = id: fails", 0) == 0) found = true;
  CHECK(found);
}

TEST_CASE("non-quasi-torsors are refused") {
  // trivial left action: everything acts by the augmentation
  auto Q = group_algebra_operad(named_group("z2"));
  auto T = tabulate(*canonical(Q));
  for (const auto& [key, v] : T->left_table()) {
    (void)v;
    T->set_left(key.first, key.second, Vec::unit(key.second.front().index));
  }
  CHECK_THROWS_AS(quasi_torsor_pipeline(T, Window{1, 0, 0}), Refused);
}

TEST_CASE("q_bar requires a retraction") {
  auto Q = com_operad(2);
  auto M = canonical(Q);
  auto E = invariant_endomorphism_operad(M, 2);
  auto Qm = std::make_shared<CanonicalBimodule>(Q);
  ModuleMap q = right_unit_map(M, Qm, 0);
  ModuleMap zero{M, Qm, {}};
  CHECK_THROWS_AS(build_qbar(M, E, q, zero), ContractError);
}
