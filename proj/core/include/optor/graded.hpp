#pragma once

// Glue between collections and chain complexes, plus the shared check report.

#include <functional>
#include <string>
#include <vector>

#include "optor/chain.hpp"
#include "optor/collection.hpp"

namespace optor {

/// Image of a basis element under a degree-changing linear map, as coordinates in the
/// target component determined by the caller.
using BasisFn = std::function<Vec(const BasisRef&)>;

/// The arity-`arity` complex of a collection with differential `d`, stored in degrees [lo, hi].
ChainComplex complex_of(const Collection& c, const BasisFn& d, int arity, int lo, int hi, bool complete_below,
                        bool complete_above);
/// The full (finite) arity component, complete at both ends.
ChainComplex complex_of(const Collection& c, const BasisFn& d, int arity);

/// Matrix of f on the component `src` of c, landing in a space of dimension `target_dim`.
Matrix matrix_of(const Collection& c, Key src, std::size_t target_dim, const BasisFn& f);

/// Result of an exhaustive in-window check. The first violation names the instance.
struct CheckReport {
  bool ok = true;
  std::size_t checked = 0;
  std::size_t failures = 0;
  std::vector<std::string> violations;  // first few only

  void pass() { ++checked; }
  void fail(std::string what);
  void merge(const CheckReport& o, const std::string& prefix = "");
  std::string first() const { return violations.empty() ? std::string() : violations.front(); }
  std::string summary() const;
};

}  // namespace optor
