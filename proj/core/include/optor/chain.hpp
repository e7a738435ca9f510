#pragma once

// Graded chain complexes (homological: d lowers degree by one), homology with
// explicit representatives, chain maps and windowed quasi-isomorphism tests.

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "optor/linear.hpp"

namespace optor {

/// A requested degree or arity lies outside what has been enumerated.
struct WindowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation does not hold for its inputs.
struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Arity bound plus the degree interval that is materialized.
struct Window {
  int max_arity = 1;
  int deg_lo = 0;
  int deg_hi = 0;
};

class ChainComplex {
 public:
  ChainComplex() = default;
  /// dims[k - lo] for k in [lo, hi]; diffs[k - lo - 1] is d_k : C_k -> C_{k-1} for k in (lo, hi].
  /// complete_below: the complex is known to vanish below lo.
  /// complete_above: the complex is known to vanish above hi.
  ChainComplex(int lo, int hi, std::vector<std::size_t> dims, std::vector<Matrix> diffs,
               bool complete_below, bool complete_above);

  int lo() const { return lo_; }
  int hi() const { return hi_; }
  bool complete_below() const { return complete_below_; }
  bool complete_above() const { return complete_above_; }
  /// The stored spaces are a proper subcomplex inside their range: no degree is trusted.
  bool partial() const { return partial_; }
  void mark_partial() { partial_ = true; }
  std::size_t dim(int k) const;
  /// d_k : C_k -> C_{k-1}. Zero maps at the boundary when the complex is complete there.
  Matrix d(int k) const;
  /// True when H_k is fully determined by the stored data.
  bool trusted(int k) const;
  /// Composite d_{k-1} d_k for every stored pair; returns the degrees where it is nonzero.
  std::vector<int> d_squared_violations() const;

 private:
  int lo_ = 0;
  int hi_ = -1;
  std::vector<std::size_t> dims_;
  std::vector<Matrix> diffs_;
  bool complete_below_ = true;
  bool complete_above_ = true;
  bool partial_ = false;
};

/// H_k with chosen cycle representatives and the projection cycles -> classes.
class Homology {
 public:
  Homology(const ChainComplex& c, int k);

  int degree() const { return degree_; }
  std::size_t dim() const { return reps_.size(); }
  std::size_t cycle_dim() const { return cycles_; }
  std::size_t boundary_dim() const { return boundaries_; }
  const std::vector<Vec>& representatives() const { return reps_; }
  bool is_cycle(const Vec& v) const;
  bool is_boundary(const Vec& v) const;
  /// Class coordinates of a cycle. Throws ContractError if v is not a cycle.
  Vec project(const Vec& cycle) const;

 private:
  int degree_;
  Matrix d_out_;
  std::size_t cycles_ = 0;
  std::size_t boundaries_ = 0;
  Span span_;  // boundary basis first, then representatives
  std::vector<Vec> reps_;
};

/// Per-degree matrices between two complexes of one arity.
struct ChainMap {
  std::shared_ptr<const ChainComplex> source;
  std::shared_ptr<const ChainComplex> target;
  std::map<int, Matrix> maps;  // degree -> (dim target_k x dim source_k)

  Matrix at(int k) const;
  /// Degrees where f d != d f (checked where both sides are stored).
  std::vector<int> commutation_violations() const;
};

Matrix induced_homology_map(const ChainMap& f, int k);

enum class Verdict { Holds, Fails, Unverifiable };
std::string to_string(Verdict v);

struct DegreeVerdict {
  int arity = 0;
  int degree = 0;
  Verdict verdict = Verdict::Unverifiable;
  std::size_t source_dim = 0;  // homology dimensions
  std::size_t target_dim = 0;
};

struct QuasiIsoReport {
  bool holds = false;
  std::vector<DegreeVerdict> entries;
  std::string summary() const;
};

/// Chain maps indexed by arity.
using ArityChainMap = std::map<int, ChainMap>;

/// True iff every trusted (arity, degree) of the window has invertible induced map.
/// Throws WindowError if no (arity, degree) of the window is trusted.
QuasiIsoReport is_quasi_iso(const ArityChainMap& f, const Window& w);

}  // namespace optor
