#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gencomp/reals.hpp"

namespace gencomp {

/// Description pairs travel through operators as naturals: <n, x> = 2n + x.
Index encode_pair(Index n, int x);
Assignment decode_pair(Index code);

/// A finite fragment of a generic description, functional in n.
class FiniteAssignment {
 public:
  FiniteAssignment() = default;
  /// kCorruptDescription when some n carries both bits.
  explicit FiniteAssignment(std::vector<Assignment> pairs);

  const std::vector<Assignment>& pairs() const noexcept { return pairs_; }
  std::size_t size() const noexcept { return pairs_.size(); }
  std::vector<Index> codes() const;

  friend auto operator<=>(const FiniteAssignment&, const FiniteAssignment&) = default;

 private:
  std::vector<Assignment> pairs_;  // sorted by n
};

struct Axiom {
  Index output = 0;
  std::vector<Index> premise;  // sorted, unique

  friend auto operator<=>(const Axiom&, const Axiom&) = default;
};

/// A finite set of axioms <output, D>; W(S) = {a : some <a, D> has D in S}.
class EnumerationOperator {
 public:
  EnumerationOperator() = default;
  explicit EnumerationOperator(std::vector<Axiom> axioms);

  const std::vector<Axiom>& axioms() const noexcept { return axioms_; }
  /// Some axiom <a, D'> with D' contained in `premise` (sorted).
  bool derives(Index output, std::span<const Index> premise) const;

  friend bool operator==(const EnumerationOperator&, const EnumerationOperator&) = default;

 private:
  std::vector<Axiom> axioms_;  // sorted, unique
};

/// An oracle set with membership decidable below `bound`.
struct BoundedSet {
  std::function<bool(Index)> member;
  Index bound = 0;

  static BoundedSet of(const std::set<Index>& elements, Index bound);
  /// Pair codes of the description's assignments below `bound_n`.
  static BoundedSet of_description(const GenericDescription& d, Index bound_n);
};

struct ApplyOptions {
  /// Treat every even (negative, <n,0>) code as absent from the oracle.
  bool positive_only = false;
};

/// kInsufficientOracle when an axiom's premise reaches the oracle bound.
std::set<Index> apply_operator(const EnumerationOperator& w, const BoundedSet& s,
                               ApplyOptions options = {});

/// A budgeted stage machine over labelled description triples. `on_read`
/// receives the sequence consumed so far and returns what the machine emits
/// upon reading its last element, so outputs at a step depend only on the
/// triples already read. Triples past `use_bound` are never read.
struct FunctionalSpec {
  std::string name;
  std::size_t use_bound = 0;
  std::function<std::vector<Assignment>(std::span<const Triple> read_so_far)> on_read;
};

/// Everything the machine emits while reading `sequence` in order.
std::set<Assignment> run_functional(const FunctionalSpec& phi, std::span<const Triple> sequence);

/// Every output over all labelled orderings (labels 0..max_label) of `d`.
std::set<Assignment> outputs_over_orderings(const FunctionalSpec& phi, const FiniteAssignment& d,
                                            Index max_label);

struct CompileBounds {
  Index element_bound = 4;  // premises mention indices n < element_bound
  Index max_label = 3;
  std::uint64_t budget = 50'000'000;  // machine steps
};

/// The operator of all <<m, y>, D> such that some labelled ordering of D
/// (labels <= max_label) makes phi emit <m, y>. Axioms are recorded at the
/// premise that was read when the output appeared; larger premises follow
/// by monotonicity. kBudget when the search exceeds `bounds.budget`.
EnumerationOperator functional_to_operator(const FunctionalSpec& phi, const CompileBounds& bounds);

/// Operator output on a finite description, decoded back into pairs.
std::set<Assignment> apply_to_assignment(const EnumerationOperator& w, const FiniteAssignment& d,
                                         ApplyOptions options = {});

/// The built-in battery: echo, ordered-pair, silent, early-labels,
/// valuation-decoder, first-read, label-liar.
std::vector<FunctionalSpec> functional_battery();
std::optional<FunctionalSpec> functional_by_name(std::string_view name);

using PartialMap = std::map<Index, int>;

/// phi(n) = 1 exactly on what Y has enumerated by stage s. Every enumerated
/// element must be in X, else kFalsifiedPremise.
PartialMap generic_computation_from_subset_enumeration(const Enumerator& y, const RealSpec& x, Stage s);
PartialMap generic_computation_from_subset_enumeration(const Enumerator& y, const BitSource& x, Stage s);

/// Y = {n : the run output <n, 1, stage>}, scheduled at the recorded
/// stages. The run must be truthful for X, else kFalsifiedPremise.
Enumerator subset_enumeration_from_generic_computation(std::span<const Triple> run, const BitSource& x,
                                                       unsigned tag = 0);

}  // namespace gencomp
