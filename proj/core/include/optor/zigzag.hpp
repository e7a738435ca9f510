#pragma once

// The invariant-endomorphism diagram of a quasi-torsor, the two zig-zags built from it,
// and the homology isomorphism H(P) -> H(Q) they induce. Everything needed to re-derive
// the verdicts is kept in the certificate.

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "optor/endomorphism.hpp"
#include "optor/lifting.hpp"
#include "optor/torsor.hpp"

namespace optor {

/// q_bar(c)(m_1, .., m_k) = q(c(mu m_1, .., mu m_k)), with values read back in End_Q M.
/// ContractError unless mu q = id and every image is invariant.
OperadMorphism build_qbar(const BimodulePtr& M, const InvariantEnd& E, const ModuleMap& q, const ModuleMap& mu);

struct DiagramMaps {
  BimodulePtr M;
  InvariantEnd end;
  KeyMaps p, q;          // unit maps P -> M, Q -> M
  OperadMorphism pprime;  // P -> End_Q M
  OperadMorphism qbar;    // Q -> End_Q M
  KeyMaps iota;           // End_Q M -> M, evaluation at the unit
  ModuleMap mu;           // M -> Q
};

/// iota p' = p, iota q_bar = q, q_bar(c)(q c_1, .., q c_k) = q(c(c_1, .., c_k)), and both
/// operad maps are morphisms. Failures are report entries.
CheckReport verify_diagram(const DiagramMaps& d, const Window& w);

/// Per-arity chain complex as stored in a certificate.
struct StoredComplex {
  std::string name;
  std::map<int, ChainComplex> arities;
};

struct Arrow {
  std::string name;
  std::string kind;  // "operad-map" or "module-map"
  std::string source, target;
  std::string claim;  // "iso" or "quasi-iso"
  std::map<Key, Matrix> matrices;
};

/// lhs_1 o lhs_2 o .. = rhs, compared matrix by matrix; rhs "id" is the identity.
struct Identity {
  std::vector<std::string> lhs;
  std::string rhs;
};

struct ZigzagCertificate {
  Window window;
  std::string route;  // "strict" or "resolution"
  OperadPtr P, Q;
  std::vector<StoredComplex> complexes;
  std::vector<Arrow> arrows;
  std::vector<Identity> identities;
  /// The rows of both zig-zags, as "left | middle | right" with the vertical arrows.
  std::vector<std::string> zigzags;
  /// Structural checks made while building; carried, not re-derived.
  std::vector<std::string> construction;
  bool construction_ok = true;
  std::vector<std::string> transcript;
  std::map<Key, Matrix> homology_iso;  // class coordinates H(P) -> H(Q)
  bool valid = false;

  const StoredComplex& complex(const std::string& name) const;
  const Arrow& arrow(const std::string& name) const;
};

struct Derivation {
  std::vector<std::string> transcript;
  std::map<Key, Matrix> homology_iso;
  bool valid = false;
};

/// Recomputes every verdict from the stored complexes and matrices (and the operads P, Q,
/// for compatibility of the homology isomorphism with composition).
Derivation derive(const ZigzagCertificate& c);

/// Builds both zig-zags from verified diagram maps. The certificate is invalid if any
/// arrow or identity fails; its transcript says which.
ZigzagCertificate assemble_zigzags(const DiagramMaps& d, const Window& w, const std::string& route,
                                   std::vector<StoredComplex> extra_complexes = {}, std::vector<Arrow> extra_arrows = {});

/// The stored isomorphism; ContractError on an invalid certificate.
const std::map<Key, Matrix>& homology_isomorphism(const ZigzagCertificate& c);

/// The input is verified not to be a (quasi-)torsor where the pipeline needs one.
struct Refused : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PipelineOptions {
  /// Take the resolution route even for strict torsors.
  bool force_resolution = false;
};

/// Strict torsors use mu = q^{-1} on M itself. Otherwise M is replaced by its resolution
/// (or used as is when it already is one), truncated at the top of the window, and mu comes
/// from the cylinder lift. Errors carry the stage name.
ZigzagCertificate quasi_torsor_pipeline(const BimodulePtr& M, const Window& w, const PipelineOptions& opt = {});

}  // namespace optor
