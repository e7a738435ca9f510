#include <doctest.h>

#include <nlohmann/json.hpp>

#include "optor/io.hpp"
#include "optor/stock.hpp"

using namespace optor;
using nlohmann::ordered_json;

namespace {

std::vector<OperadPtr> stock_operads() {
  std::vector<OperadPtr> out;
  for (const auto& g : named_group_names()) out.push_back(group_algebra_operad(named_group(g)));
  out.push_back(com_operad(4));
  out.push_back(ass_operad(3));
  out.push_back(dual_numbers_operad());
  return out;
}

}  // namespace

TEST_CASE("stock operads round-trip to identical text") {
  for (const auto& P : stock_operads()) {
    INFO(P->name());
    const std::string text = io::serialize(*P);
    auto back = io::parse_operad(text);
    CHECK(io::serialize(*back) == text);
    CHECK(back->basis() == P->basis());
    CHECK(back->unit() == P->unit());
  }
}

TEST_CASE("bimodules round-trip") {
  GroupTable s3 = named_group("s3");
  auto Q = group_algebra_operad(s3);
  auto M = std::make_shared<CanonicalBimodule>(Q, basis_element(BasisRef{{1, 0}, 1}));
  const std::string text = io::serialize(*M);
  auto back = io::parse_bimodule(text);
  CHECK(io::serialize(*back) == text);
  CHECK(back->left_operad() == back->right_operad());
  CHECK(back->torsor_unit() == M->torsor_unit());

  auto C = std::make_shared<CanonicalBimodule>(com_operad(3));
  const std::string ct = io::serialize(*C);
  CHECK(io::serialize(*io::parse_bimodule(ct)) == ct);
}

TEST_CASE("group tables round-trip") {
  for (const auto& n : named_group_names()) {
    GroupTable g = named_group(n);
    GroupTable back = io::parse_group(io::serialize(g));
    CHECK(back.elements == g.elements);
    CHECK(back.mult == g.mult);
  }
}

TEST_CASE("syntax errors carry a location") {
  try {
    io::parse_operad("{\n  \"kind\": \"operad\",\n  \"name\" \"x\"\n}");
    FAIL("accepted malformed text");
  } catch (const io::SyntaxError& e) {
    CHECK(e.line == 3);
    CHECK(e.column == 12);  // just past the offending token
  }
  ordered_json j = ordered_json::parse(io::serialize(*com_operad(2)));
  j["compositions"][0][3][0][1] = "1/0";
  try {
    io::parse_operad(j.dump());
    FAIL("accepted a zero denominator");
  } catch (const io::SyntaxError& e) {
    CHECK(e.where == "/compositions/0/3/0/1");
    CHECK(std::string(e.what()).find("zero denominator") != std::string::npos);
  }
}

TEST_CASE("semantic errors name the invariant") {
  ordered_json j = ordered_json::parse(io::serialize(*dual_numbers_operad()));
  j["components"]["1"]["2"] = {"z"};
  j["differential"].push_back(ordered_json::array({"z", ordered_json::array({ordered_json::array({"x", "1"})})}));
  try {
    io::parse_operad(j.dump());
    FAIL("accepted d^2 != 0");
  } catch (const io::SemanticError& e) {
    CHECK(std::string(e.what()).find("d^2 != 0 in arity 1, degree 2") != std::string::npos);
  }

  ordered_json a = ordered_json::parse(io::serialize(*ass_operad(2)));
  a["compositions"][0][3][0][1] = "2";
  CHECK_THROWS_AS(io::parse_operad(a.dump()), io::SemanticError);
  io::ParseOptions lax;
  lax.check_axioms = false;
  CHECK_NOTHROW(io::parse_operad(a.dump(), lax));

  ordered_json u = ordered_json::parse(io::serialize(*com_operad(2)));
  u["components"]["2"]["0"] = {"c1"};
  CHECK_THROWS_AS(io::parse_operad(u.dump()), io::SemanticError);
}

TEST_CASE("certificates round-trip and re-verify") {
  auto Z = group_algebra_operad(named_group("z2"));
  for (bool force : {false, true}) {
    auto c = quasi_torsor_pipeline(std::make_shared<CanonicalBimodule>(Z), Window{1, 0, 1}, PipelineOptions{force});
    REQUIRE(c.valid);
    const std::string text = io::serialize(c);
    auto v = io::verify_payload(text);
    CHECK(v.reproduced);
    CHECK(v.valid);
    CHECK(v.derivation.transcript == c.transcript);
    CHECK(io::serialize(io::parse_certificate(text)) == text);
  }
}

TEST_CASE("tampered certificates are detected") {
  auto c = quasi_torsor_pipeline(std::make_shared<CanonicalBimodule>(com_operad(2)), Window{2, 0, 0});
  ordered_json j = ordered_json::parse(io::serialize(c));
  j["transcript"][0] = "arrow p' commutes with d in arity 1: fails";
  auto v = io::verify_payload(j.dump());
  CHECK_FALSE(v.reproduced);
  REQUIRE_FALSE(v.differences.empty());
  CHECK(v.differences.front().rfind("transcript line 1", 0) == 0);

  ordered_json k = ordered_json::parse(io::serialize(c));
  for (auto& a : k["arrows"])
    if (a["name"] == "mu")
      for (auto& m : a["matrices"])
        for (auto& row : m["matrix"]["entries"])
          for (auto& x : row) x = "0";
  auto w = io::verify_payload(k.dump());
  CHECK_FALSE(w.reproduced);
  CHECK_FALSE(w.valid);
}
