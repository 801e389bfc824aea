#include <algorithm>
#include <map>
#include <random>

#include "gencomp/density.hpp"
#include "gencomp/diagonal.hpp"
#include "gencomp/error.hpp"

namespace gencomp {

namespace {

Verdict fail(Verdict v, std::string detail) {
  v.passed = false;
  v.detail = std::move(detail);
  return v;
}

std::string where(Stage s, unsigned e) { return "stage " + std::to_string(s) + ", strategy " + std::to_string(e); }

Node node_from_code(std::uint64_t code, std::size_t len, Mode mode) {
  Node n;
  const unsigned width = mode == Mode::kSingle ? 1 : 2;
  const std::uint64_t mask = (1u << width) - 1;
  for (std::size_t k = 0; k < len; ++k) {
    const auto shift = width * (len - 1 - k);
    n = n.child(static_cast<int>((code >> shift) & mask), mode);
  }
  return n;
}

Node random_node(std::mt19937_64& rng, std::size_t len, Mode mode) {
  Node n;
  std::uniform_int_distribution<int> digit(0, max_digit(mode));
  for (std::size_t k = 0; k < len; ++k) n = n.child(digit(rng), mode);
  return n;
}

// Calls fn on every node of length `len` extending `base` when there are at
// most `limit` of them, else on `samples` random extensions. Returns whether
// the sweep was exhaustive; fn returning false stops early.
template <typename Fn>
bool for_extensions(const Node& base, std::size_t len, Mode mode, std::size_t limit, std::size_t samples,
                    std::mt19937_64& rng, Fn fn) {
  const std::size_t extra = len - base.length();
  const unsigned width = mode == Mode::kSingle ? 1 : 2;
  if (width * extra < 63 && (std::uint64_t{1} << (width * extra)) <= limit) {
    const std::uint64_t total = std::uint64_t{1} << (width * extra);
    for (std::uint64_t c = 0; c < total; ++c) {
      Node n = base;
      const Node tail = node_from_code(c, extra, mode);
      for (std::size_t k = 0; k < extra; ++k) n = n.child(tail.digit(k, mode), mode);
      if (!fn(n)) break;
    }
    return true;
  }
  for (std::size_t k = 0; k < samples; ++k) {
    Node n = base;
    const Node tail = random_node(rng, extra, mode);
    for (std::size_t j = 0; j < extra; ++j) n = n.child(tail.digit(j, mode), mode);
    if (!fn(n)) break;
  }
  return false;
}

// Some element of W below `bound` is definitely outside phi^X (and, in pair
// mode, outside psi^Y) for every extension of `node`: a kill found by direct
// evaluation rather than through constraints. nullopt when the evaluation
// budget runs out.
std::optional<bool> brute_force_killed(const GapRuleTable& table, const IntervalSet& w, Index bound, const Node& node,
                                       std::uint64_t& budget) {
  for (const auto& [lo, hi] : w.ranges()) {
    for (Index n = std::max<Index>(lo, 1); n < std::min(hi, bound); ++n) {
      if (budget == 0) return std::nullopt;
      --budget;
      if (table.eval(node.sigma, n, Side::kPhi) != Tri::kZero) continue;
      if (table.mode() == Mode::kPair && table.eval(node.tau, n, Side::kPsi) != Tri::kZero) continue;
      return true;
    }
  }
  return false;
}

struct PhiRule {
  Stage stage;
  Node node;
};

std::vector<PhiRule> phi_rules(const Trace& trace, unsigned e) {
  std::vector<PhiRule> out;
  for (const auto& rec : trace.log) {
    for (const auto& r : rec.rules) {
      if (r.strategy == e && r.side == Side::kPhi) out.push_back({r.stage, r.node});
    }
  }
  return out;
}

}  // namespace

Verdict check_level_hashes(const Trace& trace) {
  Verdict v{"level-hash-replay", true, ""};
  std::size_t checked = 0;
  for (const auto& rec : trace.log) {
    const Stage s = rec.stage;
    if (s == 0) continue;
    const auto table = trace.table_through(s);
    for (const auto& st : rec.strategies) {
      const bool expects_level = st.status == StrategyStatus::kActed || st.status == StrategyStatus::kDied;
      if (expects_level != st.level.has_value() || expects_level != st.level_hash.has_value()) {
        return fail(v, where(s, st.strategy) + ": level fields do not match status " + std::string(to_string(st.status)));
      }
      if (!expects_level) continue;
      if (*st.level != s - 1) return fail(v, where(s, st.strategy) + ": recorded level is not s-1");
      const auto level = tree_level(table, trace.enumerated_through(st.strategy, s - 1), s - 1);
      if (level.hash() != *st.level_hash) return fail(v, where(s, st.strategy) + ": level hash differs on replay");
      if (level.empty() != (st.status == StrategyStatus::kDied)) {
        return fail(v, where(s, st.strategy) + ": status disagrees with level emptiness");
      }
      ++checked;
    }
  }
  v.detail = std::to_string(checked) + " levels recomputed";
  return v;
}

Verdict check_marker_on_path(const Trace& trace) {
  Verdict v{"marker-on-path", true, ""};
  std::vector<std::set<Node>> marked(trace.strategy_count());
  std::vector<bool> alive(trace.strategy_count(), true);
  for (const auto& rec : trace.log) {
    const Stage s = rec.stage;
    std::vector<GapRule> expected;
    if (rec.strategies.size() != trace.strategy_count()) return fail(v, "stage " + std::to_string(s) + ": record count");
    for (unsigned e = 0; e < trace.strategy_count(); ++e) {
      const auto& st = rec.strategies[e];
      if (st.strategy != e) return fail(v, "stage " + std::to_string(s) + ": strategy records out of order");
      const StrategyStatus want_idle = s <= e ? StrategyStatus::kWaiting : StrategyStatus::kDead;
      if ((s <= e || !alive[e]) && st.status != want_idle) {
        return fail(v, where(s, e) + ": status should be " + std::string(to_string(want_idle)));
      }
      if (st.status == StrategyStatus::kDied) alive[e] = false;
      if (st.status != StrategyStatus::kActed) {
        if (st.marker || st.path) return fail(v, where(s, e) + ": marker without action");
        continue;
      }
      if (!st.marker || !st.path) return fail(v, where(s, e) + ": action without marker and path");
      const auto& marker = *st.marker;
      if (marker.length() > s) return fail(v, where(s, e) + ": marker longer than the stage");
      if (!(st.path->prefix(marker.length(), trace.mode) == marker)) {
        return fail(v, where(s, e) + ": marker " + marker.to_string(trace.mode) + " is off the selected path");
      }
      Node shortest;
      try {
        shortest = select_marker_node(*st.path, marked[e], s, trace.mode);
      } catch (const Error& err) {
        return fail(v, where(s, e) + ": " + err.what());
      }
      if (!(shortest == marker)) return fail(v, where(s, e) + ": marker is not the shortest unmarked prefix");
      marked[e].insert(marker);
      expected.push_back({e, s, marker, Side::kPhi});
      if (trace.mode == Mode::kPair) expected.push_back({e, s, marker, Side::kPsi});
    }
    if (expected != rec.rules) return fail(v, "stage " + std::to_string(s) + ": rules do not match the markers");
  }
  return v;
}

Verdict check_trap_soundness(const Trace& trace, const CheckOptions& options) {
  Verdict v{"trap-soundness", true, ""};
  std::mt19937_64 rng(options.seed);
  std::size_t traps = 0, brute = 0, skipped = 0;
  for (unsigned e = 0; e < trace.strategy_count(); ++e) {
    const auto rules = phi_rules(trace, e);
    for (const auto& rec : trace.log) {
      const Stage s = rec.stage;
      const auto& st = rec.strategies.at(e);
      if (!st.level) continue;
      const std::size_t l = *st.level;
      const auto w = trace.enumerated_through(e, s - 1);
      const auto table = trace.table_through(s);
      const auto level = tree_level(table, w, l);
      for (const auto& r : rules) {
        const GapRule g{e, r.stage, r.node, Side::kPhi};
        if (r.stage >= l || !w.intersects(g.gap_lo(), g.gap_hi())) continue;
        ++traps;
        // The trap node, pushed down to the level, must have no survivor.
        if (level.has_survivor_extending(r.node)) {
          return fail(v, where(s, e) + ": a node extending sprung trap " + r.node.to_string(trace.mode) +
                             " from stage " + std::to_string(r.stage) + " survives");
        }
        std::uint64_t budget = options.eval_budget;
        bool complete = true;
        bool sound = true;
        for_extensions(r.node, l, trace.mode, options.brute_force_nodes, options.sampled_prefixes, rng,
                       [&](const Node& n) {
                         auto killed = brute_force_killed(table, w, Index{1} << l, n, budget);
                         if (!killed) {
                           complete = false;
                           return false;
                         }
                         if (!*killed) sound = false;
                         return sound;
                       });
        if (!sound) {
          return fail(v, where(s, e) + ": direct evaluation finds a live extension of sprung trap " +
                             r.node.to_string(trace.mode));
        }
        (complete ? brute : skipped) += 1;
      }
    }
  }
  v.detail = std::to_string(traps) + " sprung traps checked, " + std::to_string(brute) +
             " also by direct evaluation, " + std::to_string(skipped) + " over the evaluation budget";
  return v;
}

Verdict check_spoiling_completeness(const Trace& trace, const CheckOptions& options) {
  Verdict v{"spoiling-completeness", true, ""};
  std::mt19937_64 rng(options.seed);
  std::size_t deaths = 0;
  for (unsigned e = 0; e < trace.strategy_count(); ++e) {
    const auto s = trace.died_at(e);
    if (!s) continue;
    ++deaths;
    const std::size_t l = *s - 1;
    const auto w = trace.enumerated_through(e, *s - 1);
    const auto table = trace.table_through(*s);
    if (!tree_level(table, w, l).empty()) return fail(v, where(*s, e) + ": died with a nonempty level");
    std::uint64_t budget = options.eval_budget;
    std::optional<Node> live;
    bool exhausted = false;
    for_extensions(Node{}, l, trace.mode, options.brute_force_nodes, options.sampled_prefixes, rng,
                   [&](const Node& n) {
                     auto killed = brute_force_killed(table, w, Index{1} << l, n, budget);
                     if (!killed) {
                       exhausted = true;
                       return false;
                     }
                     if (!*killed) live = n;
                     return !live;
                   });
    if (live) return fail(v, where(*s, e) + ": nothing enumerated spoils " + live->to_string(trace.mode));
    if (exhausted) return fail(v, where(*s, e) + ": evaluation budget ran out before the check finished");
  }
  v.detail = std::to_string(deaths) + " deaths checked";
  return v;
}

Verdict check_single_victim(const Trace& trace) {
  Verdict v{"single-victim", true, ""};
  for (unsigned e = 0; e < trace.strategy_count(); ++e) {
    const auto paths = trace.paths(e);
    if (paths.empty()) continue;
    const auto& final_path = paths.back().second;
    Stage last_change = paths.front().first;
    for (std::size_t k = 1; k < paths.size(); ++k) {
      if (!same_path(paths[k - 1].second, paths[k].second, trace.mode)) last_change = paths[k].first;
    }
    std::vector<Node> settled;
    for (const auto& m : trace.markers(e)) {
      if (m.stage < last_change) continue;
      if (!(final_path.prefix(m.node.length(), trace.mode) == m.node)) {
        return fail(v, where(m.stage, e) + ": marker " + m.node.to_string(trace.mode) +
                           " placed after the last path change is off the final path");
      }
      settled.push_back(m.node);
    }
    // A real leaving the final path at position k carries at most k+1 of
    // the settled markers: one per prefix length 0..k.
    for (std::size_t k = 0; k <= trace.stages; ++k) {
      const auto shared = final_path.prefix(k, trace.mode);
      const auto carried = std::count_if(settled.begin(), settled.end(),
                                         [&](const Node& n) { return n.is_prefix_of(shared); });
      if (static_cast<std::size_t>(carried) > k + 1) {
        return fail(v, "strategy " + std::to_string(e) + ": " + std::to_string(carried) +
                           " settled markers on a real leaving the final path at " + std::to_string(k));
      }
    }
  }
  return v;
}

Verdict check_tree_antitonicity(const Trace& trace, const CheckOptions& options) {
  Verdict v{"tree-antitonicity", true, ""};
  std::size_t pairs = 0;
  for (unsigned e = 0; e < trace.strategy_count(); ++e) {
    std::optional<LevelSet> previous;
    for (const auto& rec : trace.log) {
      const auto& st = rec.strategies.at(e);
      if (!st.level) continue;
      auto level = tree_level(trace.table_through(rec.stage), trace.enumerated_through(e, rec.stage - 1), *st.level);
      if (previous) {
        ++pairs;
        // Every constraint of the shorter level is implied by one of the
        // longer level, so no survivor has a dead ancestor.
        for (const auto& c : previous->constraints()) {
          const bool implied = std::any_of(level.constraints().begin(), level.constraints().end(), [&](const auto& d) {
            return d.sigma.is_prefix_of(c.sigma) && d.tau.is_prefix_of(c.tau);
          });
          if (!implied) return fail(v, where(rec.stage, e) + ": a pruned node came back to life");
        }
        std::vector<Node> nodes;
        try {
          nodes = level.enumerate(options.brute_force_nodes);
        } catch (const Error&) {
          nodes.clear();
          if (auto n = level.leftmost()) nodes.push_back(*n);
          if (auto n = level.rightmost()) nodes.push_back(*n);
        }
        for (const auto& n : nodes) {
          if (!previous->contains(n.prefix(previous->length()))) {
            return fail(v, where(rec.stage, e) + ": survivor " + n.to_string(trace.mode) + " has a dead ancestor");
          }
        }
      }
      previous = std::move(level);
    }
  }
  v.detail = std::to_string(pairs) + " consecutive level pairs";
  return v;
}

Verdict check_gap_census_consistency(const Trace& trace, const CheckOptions& options) {
  Verdict v{"gap-census-consistency", true, ""};
  if (trace.stages == 0) return v;
  std::mt19937_64 rng(options.seed);
  const auto table = trace.final_table();
  const Stage i_max = std::min(trace.stages, options.census_stages);
  const Mode mode = trace.mode;
  std::size_t checked = 0;

  auto check = [&](const PathApprox& path) -> std::optional<std::string> {
    const auto full = path.prefix(trace.stages, mode);
    for (Side side : {Side::kPhi, Side::kPsi}) {
      if (side == Side::kPsi && mode == Mode::kSingle) break;
      const auto members = table.members(path, side);
      const auto census = gap_census([&](Index n) { return members.contains(n); }, i_max);
      std::vector<std::optional<unsigned>> expected(i_max);
      for (const auto& r : table.rules()) {
        if (r.side != side || r.stage >= i_max || !r.oracle_node().is_prefix_of(full.component(side))) continue;
        auto& slot = expected[r.stage];
        if (!slot || r.strategy < *slot) slot = r.strategy;
      }
      if (census.max_gaps() != expected) {
        return "census of " + std::string(to_string(side)) + " along " + full.to_string(mode) +
               " disagrees with the rules on its prefixes";
      }
    }
    ++checked;
    return std::nullopt;
  };

  std::optional<std::string> problem;
  const std::size_t len = trace.stages - 1;
  for_extensions(Node{}, len, mode, options.brute_force_nodes >> 6, options.sampled_prefixes, rng,
                 [&](const Node& n) {
                   problem = check(PathApprox{n, 0});
                   return !problem;
                 });
  for (unsigned e = 0; e < trace.strategy_count() && !problem; ++e) {
    for (const auto& [s, p] : trace.paths(e)) {
      if ((problem = check(p))) break;
    }
  }
  if (problem) return fail(v, *problem);
  v.detail = std::to_string(checked) + " reals censused";
  return v;
}

Verdict check_prefix_determinism(const Trace& trace, const CheckOptions& options) {
  Verdict v{"prefix-determinism", true, ""};
  std::mt19937_64 rng(options.seed);
  const Mode mode = trace.mode;
  std::size_t prefixes = 0;
  bool all_exhaustive = true;
  for (Stage s = 0; s < trace.stages && s <= 12; ++s) {
    const auto table = trace.table_through(s + 1);
    const Index bound = Index{2} << s;
    std::optional<std::string> problem;
    const bool exhaustive = s <= options.exhaustive_prefix_stages;
    const std::size_t limit = exhaustive ? std::size_t{1} << s : 0;
    bool swept = true;
    // phi reads only sigma and psi only tau, so each side sweeps plain prefixes.
    for (Side side : {Side::kPhi, Side::kPsi}) {
      if (side == Side::kPsi && mode == Mode::kSingle) break;
      swept = for_extensions(Node{}, s, Mode::kSingle, limit, options.sampled_prefixes, rng, [&](const Node& n) {
        ++prefixes;
        const auto& sigma = n.sigma;
        for (Index k = 1; k < bound; ++k) {
          const Tri here = table.eval(sigma, k, side);
          if (here == Tri::kUnknown) {
            problem = "stage " + std::to_string(s) + ": " + std::to_string(k) + " undetermined by " +
                      std::to_string(s) + " bits";
            return false;
          }
          if (table.eval(sigma.extended(0), k, side) != here || table.eval(sigma.extended(1), k, side) != here) {
            problem = "stage " + std::to_string(s) + ": extensions of one prefix disagree at " + std::to_string(k);
            return false;
          }
        }
        return true;
      }) && swept;
      if (problem) break;
    }
    if (problem) return fail(v, *problem);
    all_exhaustive = all_exhaustive && swept;
  }
  v.detail = std::to_string(prefixes) + " prefixes" + (all_exhaustive ? ", exhaustive" : ", partly sampled");
  return v;
}

std::vector<Verdict> check_trace(const Trace& trace, const CheckOptions& options) {
  std::vector<Verdict> out;
  auto guarded = [&](const char* name, auto fn) {
    try {
      out.push_back(fn());
    } catch (const Error& err) {
      if (err.kind() == ErrorKind::kBudget) throw;
      out.push_back({name, false, err.what()});
    }
  };
  guarded("marker-on-path", [&] { return check_marker_on_path(trace); });
  guarded("level-hash-replay", [&] { return check_level_hashes(trace); });
  guarded("trap-soundness", [&] { return check_trap_soundness(trace, options); });
  guarded("spoiling-completeness", [&] { return check_spoiling_completeness(trace, options); });
  guarded("single-victim", [&] { return check_single_victim(trace); });
  guarded("tree-antitonicity", [&] { return check_tree_antitonicity(trace, options); });
  guarded("gap-census-consistency", [&] { return check_gap_census_consistency(trace, options); });
  guarded("prefix-determinism", [&] { return check_prefix_determinism(trace, options); });
  return out;
}

}  // namespace gencomp
