#pragma once

// The two unit maps P -> M <- Q of a bimodule with a distinguished element, and the
// torsor / quasi-torsor decisions built on them.

#include <string>
#include <vector>

#include "optor/module.hpp"

namespace optor {

struct UnitMaps {
  std::map<Key, Matrix> left;   // p -> p(1, ..., 1), keyed by P components
  std::map<Key, Matrix> right;  // q -> 1 o_1 q, keyed by Q components
  ArityChainMap left_chain;
  ArityChainMap right_chain;
  CheckReport chain;  // both are chain maps
};

/// Throws ContractError when the unit is missing, misplaced or not closed.
UnitMaps unit_maps(const Bimodule& M, const Window& w);

struct TorsorReport {
  bool holds = false;
  std::vector<std::string> lines;
  std::string summary() const;
};

/// Both unit maps invertible in every in-window (arity, degree).
TorsorReport is_torsor(const Bimodule& M, const Window& w);
/// Both unit maps quasi-isomorphisms in the trust region of the window.
TorsorReport is_quasi_torsor(const Bimodule& M, const Window& w);

struct StrictIsomorphism {
  OperadMorphism morphism;  // right^{-1} o left : P -> Q
  CheckReport check;
};

/// Throws ContractError when M is not a strict torsor in the window.
StrictIsomorphism strict_torsor_isomorphism(const BimodulePtr& M, const Window& w);

}  // namespace optor
