#pragma once

// JSON documents for operads, bimodules, group tables and zig-zag certificates.
//
// Basis elements are referenced by label, so labels must be unique across a collection.
// Scalars are strings "a" or "a/b"; matrices are dense and row-major. Output is canonical:
// serialize(parse(serialize(x))) == serialize(x).

#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "optor/stock.hpp"
#include "optor/zigzag.hpp"

namespace optor::io {

/// Malformed text. line and column are 1-based; 0 when the error is inside a value
/// (then `where` holds the JSON pointer).
struct SyntaxError : std::runtime_error {
  SyntaxError(const std::string& msg, std::size_t line, std::size_t column, std::string where);
  std::size_t line = 0, column = 0;
  std::string where;
};

/// Well-formed text describing an object that violates a structural law.
struct SemanticError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseOptions {
  bool check_axioms = true;
  /// Operads given by reference are resolved relative to this directory.
  std::filesystem::path base_dir = ".";
};

using Document =
    std::variant<std::shared_ptr<TabulatedOperad>, std::shared_ptr<TabulatedBimodule>, ZigzagCertificate, GroupTable>;

Document parse(const std::string& text, const ParseOptions& opt = {});
Document load(const std::filesystem::path& file, ParseOptions opt = {});

std::shared_ptr<TabulatedOperad> parse_operad(const std::string& text, const ParseOptions& opt = {});
std::shared_ptr<TabulatedBimodule> parse_bimodule(const std::string& text, const ParseOptions& opt = {});
ZigzagCertificate parse_certificate(const std::string& text, const ParseOptions& opt = {});
GroupTable parse_group(const std::string& text);

std::string serialize(const Operad& P);
std::string serialize(const Bimodule& M);
std::string serialize(const ZigzagCertificate& c);
std::string serialize(const GroupTable& g);

/// Outcome of re-deriving a certificate from its stored data.
struct Verification {
  Derivation derivation;
  bool reproduced = false;  // transcript, isomorphism and validity identical to the stored ones
  bool valid = false;       // re-derived validity and stored construction checks
  std::vector<std::string> differences;
};

Verification verify(const ZigzagCertificate& c);
Verification verify_payload(const std::string& text);

}  // namespace optor::io
