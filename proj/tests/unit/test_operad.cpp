#include <doctest.h>

#include "optor/stock.hpp"

using namespace optor;

namespace {

Window full(const Operad& P) { return Window{P.max_arity(), P.basis().min_degree(), P.basis().max_degree()}; }

}  // namespace

TEST_CASE("stock operads satisfy the axioms") {
  std::vector<OperadPtr> ops = {com_operad(4), ass_operad(3), dual_numbers_operad()};
  for (const auto& g : named_group_names()) ops.push_back(group_algebra_operad(named_group(g)));
  for (const auto& P : ops) {
    auto r = check_operad_axioms(*P, full(*P));
    INFO(P->name() << ": " << r.summary());
    CHECK(r.ok);
    CHECK(r.checked > 0);
  }
}

TEST_CASE("dimensions of Com and Ass") {
  auto C = com_operad(3);
  auto A = ass_operad(3);
  for (int n = 1; n <= 3; ++n) CHECK(C->basis().dim(Key{n, 0}) == 1);
  CHECK(A->basis().dim(Key{1, 0}) == 1);
  CHECK(A->basis().dim(Key{2, 0}) == 2);
  CHECK(A->basis().dim(Key{3, 0}) == 6);
  Element c2 = basis_element(BasisRef{{2, 0}, 0});
  CHECK(C->compose(c2, 1, c2) == basis_element(BasisRef{{3, 0}, 0}));
  std::vector<Element> args = {c2, C->unit()};
  CHECK(total_compose(*C, c2, args) == basis_element(BasisRef{{3, 0}, 0}));
  CHECK_THROWS_AS(C->compose(basis_element(BasisRef{{3, 0}, 0}), 1, c2), WindowError);
  CHECK_THROWS_AS(C->compose(c2, 3, c2), ContractError);
}

TEST_CASE("Ass composition substitutes words") {
  auto A = ass_operad(3);
  auto idx = [&](int n, const std::string& l) { return *A->basis().find(Key{n, 0}, l); };
  Element x2x1 = basis_element(BasisRef{{2, 0}, idx(2, "x2x1")});
  Element x1x2 = basis_element(BasisRef{{2, 0}, idx(2, "x1x2")});
  // (x2 x1) o_1 (x1 x2) = x3 x1 x2
  CHECK(A->compose(x2x1, 1, x1x2) == basis_element(BasisRef{{3, 0}, idx(3, "x3x1x2")}));
  // (x1 x2).(12) = x2 x1
  CHECK(A->act(x1x2, Perm{2, 1}) == x2x1);
}

TEST_CASE("group algebras") {
  auto Z2 = group_algebra_operad(named_group("z2"));
  CHECK(Z2->basis().dim(Key{1, 0}) == 2);
  Element g = basis_element(BasisRef{{1, 0}, 1});
  CHECK(Z2->compose(g, 1, g) == Z2->unit());
  CHECK(group_algebra_operad(named_group("s3"))->basis().dim(Key{1, 0}) == 6);

  GroupTable bad{"bad", {"a", "b"}, {{0, 0}, {1, 1}}};
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("identity"), ContractError);
  GroupTable nonassoc{"n", {"e", "a", "b"}, {{0, 1, 2}, {1, 0, 0}, {2, 0, 0}}};
  CHECK_THROWS_WITH_AS(nonassoc.validate(), doctest::Contains("associativity"), ContractError);
  CHECK_THROWS_AS(named_group("z7"), std::invalid_argument);
}

TEST_CASE("axiom checker names violations") {
  auto C = com_operad(4);
  auto T = tabulate(*C);
  T->set_composition(BasisRef{{2, 0}, 0}, 2, BasisRef{{2, 0}, 0}, Vec::unit(0, 2));
  auto r = check_operad_axioms(*T, full(*T));
  CHECK_FALSE(r.ok);
  INFO(r.summary());
  CHECK(r.first().find("associativity fails at") != std::string::npos);

  auto D = tabulate(*dual_numbers_operad());
  // make d(x o x) = 0 but dx o x != 0
  D->set_composition(BasisRef{{1, 0}, 1}, 1, BasisRef{{1, 1}, 0}, Vec::unit(0));
  auto l = check_operad_axioms(*D, full(*D));
  CHECK_FALSE(l.ok);
  bool leibniz = false;
  for (const auto& v : l.violations) leibniz = leibniz || v.find("Leibniz") != std::string::npos;
  CHECK(leibniz);
}

TEST_CASE("augmentation kernel") {
  auto Z2 = group_algebra_operad(named_group("z2"));
  auto K = augmentation_kernel(Z2);
  REQUIRE(K.basis.dim(Key{1, 0}) == 1);
  Vec gme;
  gme.set(0, -1);
  gme.set(1, 1);
  CHECK(K.vectors.at(Key{1, 0})[0] == gme);
  CHECK(K.basis.labels(Key{1, 0})[0] == "g-e");

  auto C = com_operad(3);
  auto KC = augmentation_kernel(C);
  CHECK(KC.basis.dim(Key{1, 0}) == 0);
  CHECK(KC.basis.dim(Key{2, 0}) == 1);

  auto plain = tabulate(*Z2);
  plain->set_augmentation(Vec{});
  auto T = std::make_shared<TabulatedOperad>("no-aug", Z2->basis(), 1);
  CHECK_THROWS_AS(augmentation_kernel(T), ContractError);
}

TEST_CASE("adjoining a unit") {
  OperadPtr C = com_operad(3);
  auto u = adjoin_unit(C);
  CHECK(u.op->basis().dim(Key{1, 0}) == 2);
  CHECK(check_operad_axioms(*u.op, full(*u.op)).ok);
  CHECK(check_morphism(u.to_original, full(*u.op)).ok);
  CHECK(check_morphism(u.from_original, full(*C), false).ok);
  auto K = augmentation_kernel(u.op);
  CHECK(K.basis == C->basis());

  OperadPtr G = group_algebra_operad(named_group("s3"));
  CHECK(adjoin_unit(G).op->basis().dim(Key{1, 0}) == 7);
}

TEST_CASE("shift") {
  Collection v;
  v.set_component(Key{1, 0}, {"a"});
  v.set_component(Key{2, 3}, {"b", "c"});
  CHECK(shift(v, -1).dim(Key{1, 1}) == 1);
  CHECK(shift(shift(v, 2), -2) == v);
  CHECK(shift(v, 0) == v);
}

TEST_CASE("morphism checks") {
  OperadPtr C = com_operad(3);
  auto id = identity_morphism(C);
  CHECK(check_morphism(id, full(*C)).ok);
  auto bad = id;
  bad.maps[Key{1, 0}] = Matrix::from_rows({{2}});
  auto r = check_morphism(bad, full(*C));
  CHECK_FALSE(r.ok);
  CHECK(r.first() == "unit is not preserved");
}

TEST_CASE("permutation helpers") {
  CHECK(compose_perm(Perm{2, 3, 1}, inverse_perm(Perm{2, 3, 1})) == identity_perm(3));
  CHECK(parse_perm("2,1,3") == Perm{2, 1, 3});
  CHECK_THROWS(parse_perm("1,1"));
  CHECK(all_perms(3).size() == 6);
}
