#include "gencomp/enumops.hpp"

#include <algorithm>
#include <limits>

#include "gencomp/codings.hpp"
#include "gencomp/error.hpp"

namespace gencomp {

Index encode_pair(Index n, int x) { return 2 * n + static_cast<Index>(x != 0); }

Assignment decode_pair(Index code) { return {code / 2, static_cast<int>(code % 2)}; }

// ---- FiniteAssignment / EnumerationOperator ---------------------------------

FiniteAssignment::FiniteAssignment(std::vector<Assignment> pairs) : pairs_(std::move(pairs)) {
  std::sort(pairs_.begin(), pairs_.end());
  pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    if (pairs_[k].x != 0 && pairs_[k].x != 1) throw Error(ErrorKind::kCorruptDescription, "value is not a bit");
    if (k > 0 && pairs_[k - 1].n == pairs_[k].n) {
      throw Error(ErrorKind::kCorruptDescription, "index " + std::to_string(pairs_[k].n) + " assigned both bits");
    }
  }
}

std::vector<Index> FiniteAssignment::codes() const {
  std::vector<Index> out;
  out.reserve(pairs_.size());
  for (const auto& p : pairs_) out.push_back(encode_pair(p.n, p.x));
  std::sort(out.begin(), out.end());
  return out;
}

EnumerationOperator::EnumerationOperator(std::vector<Axiom> axioms) : axioms_(std::move(axioms)) {
  for (auto& a : axioms_) {
    std::sort(a.premise.begin(), a.premise.end());
    a.premise.erase(std::unique(a.premise.begin(), a.premise.end()), a.premise.end());
  }
  std::sort(axioms_.begin(), axioms_.end());
  axioms_.erase(std::unique(axioms_.begin(), axioms_.end()), axioms_.end());
}

bool EnumerationOperator::derives(Index output, std::span<const Index> premise) const {
  auto it = std::lower_bound(axioms_.begin(), axioms_.end(), Axiom{output, {}});
  for (; it != axioms_.end() && it->output == output; ++it) {
    if (std::includes(premise.begin(), premise.end(), it->premise.begin(), it->premise.end())) return true;
  }
  return false;
}

BoundedSet BoundedSet::of(const std::set<Index>& elements, Index bound) {
  return {[elements](Index n) { return elements.count(n) > 0; }, bound};
}

BoundedSet BoundedSet::of_description(const GenericDescription& d, Index bound_n) {
  return {[d](Index code) {
            const auto p = decode_pair(code);
            auto x = d.lookup(p.n);
            return x && *x == p.x;
          },
          2 * bound_n};
}

std::set<Index> apply_operator(const EnumerationOperator& w, const BoundedSet& s, ApplyOptions options) {
  std::set<Index> out;
  for (const auto& axiom : w.axioms()) {
    if (out.count(axiom.output)) continue;
    bool holds = true;
    for (Index d : axiom.premise) {
      if (d >= s.bound) {
        throw Error(ErrorKind::kInsufficientOracle, "premise element " + std::to_string(d) +
                                                        " beyond oracle bound " + std::to_string(s.bound));
      }
      if ((options.positive_only && d % 2 == 0) || !s.member(d)) {
        holds = false;
        break;
      }
    }
    if (holds) out.insert(axiom.output);
  }
  return out;
}

std::set<Assignment> apply_to_assignment(const EnumerationOperator& w, const FiniteAssignment& d,
                                         ApplyOptions options) {
  const auto codes = d.codes();
  const std::set<Index> elems(codes.begin(), codes.end());
  std::set<Assignment> out;
  for (Index code : apply_operator(w, BoundedSet::of(elems, std::numeric_limits<Index>::max()), options)) {
    out.insert(decode_pair(code));
  }
  return out;
}

// ---- functionals ------------------------------------------------------------

std::set<Assignment> run_functional(const FunctionalSpec& phi, std::span<const Triple> sequence) {
  std::set<Assignment> out;
  const auto steps = std::min(sequence.size(), phi.use_bound);
  for (std::size_t k = 1; k <= steps; ++k) {
    for (const auto& a : phi.on_read(sequence.first(k))) out.insert(a);
  }
  return out;
}

namespace {

// Calls visit(sequence) on every labelled ordering of `pairs`.
template <typename Visit>
void for_each_labelled_ordering(std::vector<Assignment> pairs, Index max_label, Visit visit) {
  std::sort(pairs.begin(), pairs.end());
  std::vector<Triple> seq(pairs.size());
  std::vector<Index> labels(pairs.size(), 0);
  do {
    std::fill(labels.begin(), labels.end(), 0);
    while (true) {
      for (std::size_t k = 0; k < pairs.size(); ++k) seq[k] = {pairs[k].n, pairs[k].x, labels[k]};
      visit(std::span<const Triple>(seq));
      std::size_t k = 0;
      while (k < labels.size() && labels[k] == max_label) labels[k++] = 0;
      if (k == labels.size()) break;
      ++labels[k];
    }
  } while (std::next_permutation(pairs.begin(), pairs.end()));
}

struct Compiler {
  const FunctionalSpec& phi;
  const CompileBounds& bounds;
  std::set<Axiom> axioms;
  std::vector<Triple> seq;
  std::vector<bool> used;
  std::uint64_t steps = 0;

  void extend() {
    if (seq.size() >= phi.use_bound || seq.size() >= bounds.element_bound) return;
    for (Index n = 0; n < bounds.element_bound; ++n) {
      if (used[n]) continue;
      used[n] = true;
      for (int x = 0; x <= 1; ++x) {
        for (Index l = 0; l <= bounds.max_label; ++l) {
          seq.push_back({n, x, l});
          if (++steps > bounds.budget) {
            throw Error(ErrorKind::kBudget, "compiling " + phi.name + " exceeded " +
                                                std::to_string(bounds.budget) + " machine steps");
          }
          const auto emitted = phi.on_read(seq);
          if (!emitted.empty()) {
            std::vector<Index> premise;
            premise.reserve(seq.size());
            for (const auto& t : seq) premise.push_back(encode_pair(t.n, t.x));
            std::sort(premise.begin(), premise.end());
            for (const auto& a : emitted) axioms.insert({encode_pair(a.n, a.x), premise});
          }
          extend();
          seq.pop_back();
        }
      }
      used[n] = false;
    }
  }
};

}  // namespace

std::set<Assignment> outputs_over_orderings(const FunctionalSpec& phi, const FiniteAssignment& d,
                                            Index max_label) {
  std::set<Assignment> out;
  for_each_labelled_ordering(d.pairs(), max_label, [&](std::span<const Triple> seq) {
    auto got = run_functional(phi, seq);
    out.insert(got.begin(), got.end());
  });
  return out;
}

EnumerationOperator functional_to_operator(const FunctionalSpec& phi, const CompileBounds& bounds) {
  Compiler c{phi, bounds, {}, {}, std::vector<bool>(bounds.element_bound, false), 0};
  c.extend();
  return EnumerationOperator(std::vector<Axiom>(c.axioms.begin(), c.axioms.end()));
}

std::vector<FunctionalSpec> functional_battery() {
  using Out = std::vector<Assignment>;
  using Seq = std::span<const Triple>;
  std::vector<FunctionalSpec> battery;
  battery.push_back({"echo", 5, [](Seq s) { return Out{{s.back().n, s.back().x}}; }});
  battery.push_back({"ordered-pair", 5, [](Seq s) {
                       const auto& last = s.back();
                       if (last.n != 2 || last.x != 1) return Out{};
                       for (const auto& t : s.first(s.size() - 1)) {
                         if (t.n == 1 && t.x == 1) return Out{{0, 1}};
                       }
                       return Out{};
                     }});
  battery.push_back({"silent", 5, [](Seq) { return Out{}; }});
  battery.push_back({"early-labels", 5, [](Seq s) {
                       if (s.back().label > 1) return Out{};
                       return Out{{s.back().n, s.back().x}};
                     }});
  battery.push_back({"valuation-decoder", 5, [](Seq s) {
                       if (s.back().n == 0) return Out{};
                       return Out{{two_adic_valuation(s.back().n), s.back().x}};
                     }});
  battery.push_back({"first-read", 5, [](Seq s) {
                       if (s.size() != 1) return Out{};
                       return Out{{s.front().n, s.front().x}};
                     }});
  battery.push_back({"label-liar", 5, [](Seq s) {
                       if (s.back().label < 2) return Out{{s.back().n, s.back().x}};
                       return Out{{s.back().n, 1 - s.back().x}};
                     }});
  return battery;
}

std::optional<FunctionalSpec> functional_by_name(std::string_view name) {
  for (auto& f : functional_battery()) {
    if (f.name == name) return f;
  }
  return std::nullopt;
}

// ---- generic computations vs. enumerations ---------------------------------

PartialMap generic_computation_from_subset_enumeration(const Enumerator& y, const BitSource& x, Stage s) {
  PartialMap phi;
  for (Index n : y.at(s)) {
    if (x(n) != 1) {
      throw Error(ErrorKind::kFalsifiedPremise, "enumerated " + std::to_string(n) + " lies outside X");
    }
    phi.emplace(n, 1);
  }
  return phi;
}

PartialMap generic_computation_from_subset_enumeration(const Enumerator& y, const RealSpec& x, Stage s) {
  return generic_computation_from_subset_enumeration(y, BitSource([&x](Index n) { return x.bit(n); }), s);
}

Enumerator subset_enumeration_from_generic_computation(std::span<const Triple> run, const BitSource& x,
                                                       unsigned tag) {
  std::map<Stage, std::vector<Index>> script;
  for (const auto& t : run) {
    if (x(t.n) != t.x) {
      throw Error(ErrorKind::kFalsifiedPremise, "run answers " + std::to_string(t.x) + " at " +
                                                    std::to_string(t.n) + " incorrectly");
    }
    if (t.x == 1) script[static_cast<Stage>(t.label)].push_back(t.n);
  }
  return Enumerator::scripted(tag, std::move(script));
}

}  // namespace gencomp
