#include <algorithm>

#include "gencomp/diagonal.hpp"
#include "gencomp/error.hpp"

namespace gencomp {

std::string_view to_string(StrategyStatus status) {
  switch (status) {
    case StrategyStatus::kWaiting: return "waiting";
    case StrategyStatus::kActed: return "acted";
    case StrategyStatus::kDied: return "died";
    case StrategyStatus::kDead: return "dead";
  }
  return "?";
}

std::string_view to_string(TrapStatus status) {
  switch (status) {
    case TrapStatus::kPending: return "pending";
    case TrapStatus::kSprung: return "sprung";
    case TrapStatus::kInactive: return "inactive";
  }
  return "?";
}

// ---- Trace accessors --------------------------------------------------------

GapRuleTable Trace::table_through(Stage stages_defined) const {
  if (stages_defined > stages) throw Error(ErrorKind::kUndefinedRegion, "trace has fewer stages");
  std::vector<GapRule> rules;
  for (const auto& rec : log) {
    if (rec.stage >= stages_defined) break;
    rules.insert(rules.end(), rec.rules.begin(), rec.rules.end());
  }
  return GapRuleTable::from_rules(mode, stages_defined, std::move(rules));
}

IntervalSet Trace::enumerated_through(unsigned e, Stage s) const {
  IntervalSet out;
  for (const auto& rec : log) {
    if (rec.stage > s) break;
    for (const auto& en : rec.enumerations) {
      if (en.strategy == e) out.insert(en.added);
    }
  }
  return out;
}

std::vector<MarkerRecord> Trace::markers(unsigned e) const {
  std::vector<MarkerRecord> out;
  for (const auto& rec : log) {
    for (const auto& st : rec.strategies) {
      if (st.strategy == e && st.marker) out.push_back({e, rec.stage, *st.marker});
    }
  }
  return out;
}

std::vector<std::pair<Stage, PathApprox>> Trace::paths(unsigned e) const {
  std::vector<std::pair<Stage, PathApprox>> out;
  for (const auto& rec : log) {
    for (const auto& st : rec.strategies) {
      if (st.strategy == e && st.path) out.emplace_back(rec.stage, *st.path);
    }
  }
  return out;
}

std::optional<Stage> Trace::died_at(unsigned e) const {
  for (const auto& rec : log) {
    for (const auto& st : rec.strategies) {
      if (st.strategy == e && st.status == StrategyStatus::kDied) return rec.stage;
    }
  }
  return std::nullopt;
}

TrapStatus trap_status(const Trace& trace, unsigned e, Stage s) {
  if (s >= trace.stages) throw Error(ErrorKind::kUndefinedRegion, "trace does not cover stage " + std::to_string(s));
  const auto& rec = trace.log.at(s);
  for (const auto& r : rec.rules) {
    if (r.strategy != e || r.side != Side::kPhi) continue;
    const auto w = trace.enumerated_through(e, trace.stages);
    return w.intersects(r.gap_lo(), r.gap_hi()) ? TrapStatus::kSprung : TrapStatus::kPending;
  }
  return TrapStatus::kInactive;
}

std::optional<PathApprox> ConstructionState::latest_path(unsigned e) const {
  for (auto rec = trace.log.rbegin(); rec != trace.log.rend(); ++rec) {
    for (const auto& st : rec->strategies) {
      if (st.strategy == e && st.path) return st.path;
    }
  }
  return std::nullopt;
}

// ---- opponents / selectors --------------------------------------------------

ScriptedOpponent::ScriptedOpponent(Enumerator w, std::string name) : w_(std::move(w)), name_(std::move(name)) {}

IntervalSet ScriptedOpponent::enumerate(Stage s, unsigned, const ConstructionState&) const {
  IntervalSet out;
  for (Index n : w_.at(s)) out.insert(n);
  return out;
}

PathSelector PathSelector::leftmost() { return PathSelector{}; }

PathSelector PathSelector::rightmost() {
  PathSelector p;
  p.kind_ = Kind::kRightmost;
  return p;
}

PathSelector PathSelector::scripted(std::vector<std::pair<Stage, PathApprox>> script) {
  PathSelector p;
  p.kind_ = Kind::kScripted;
  std::stable_sort(script.begin(), script.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  p.script_ = std::move(script);
  return p;
}

PathSelector PathSelector::custom(std::string name, Custom fn) {
  PathSelector p;
  p.kind_ = Kind::kCustom;
  p.custom_name_ = std::move(name);
  p.custom_ = std::move(fn);
  return p;
}

std::string PathSelector::name() const {
  switch (kind_) {
    case Kind::kLeftmost: return "leftmost";
    case Kind::kRightmost: return "rightmost";
    case Kind::kScripted: return "scripted";
    case Kind::kCustom: return custom_name_;
  }
  return "?";
}

PathApprox PathSelector::select(const SelectorContext& ctx) const {
  const Mode mode = ctx.level.mode();
  PathApprox path;
  switch (kind_) {
    case Kind::kLeftmost:
    case Kind::kRightmost: {
      const bool left = kind_ == Kind::kLeftmost;
      auto node = left ? ctx.level.leftmost() : ctx.level.rightmost();
      if (!node) throw Error(ErrorKind::kSelector, "selector consulted on an empty level");
      path = {*node, left ? 0 : max_digit(mode)};
      break;
    }
    case Kind::kScripted: {
      const std::pair<Stage, PathApprox>* pick = nullptr;
      for (const auto& entry : script_) {
        if (entry.first <= ctx.stage) pick = &entry;
      }
      if (!pick) {
        throw Error(ErrorKind::kSelector, "script has no entry at or before stage " + std::to_string(ctx.stage));
      }
      path = pick->second;
      break;
    }
    case Kind::kCustom: path = custom_(ctx); break;
  }
  if (path.tail < 0 || path.tail > max_digit(mode)) throw Error(ErrorKind::kSelector, "path tail digit out of range");
  if (mode == Mode::kPair ? path.head.tau.size() != path.head.sigma.size() : !path.head.tau.empty()) {
    throw Error(ErrorKind::kSelector, "path head has the wrong shape for " + std::string(to_string(mode)) + " mode");
  }
  if (!ctx.level.contains(path.prefix(ctx.level.length(), mode))) {
    throw Error(ErrorKind::kSelector, "strategy " + std::to_string(ctx.strategy) + " at stage " +
                                          std::to_string(ctx.stage) + ": path leaves level " +
                                          std::to_string(ctx.level.length()));
  }
  return path;
}

// ---- the construction ------------------------------------------------------

Trace run_construction(const DiagonalConfig& config) {
  if (config.stages > DiagonalConfig::kMaxStages) {
    throw Error(ErrorKind::kBudget, std::to_string(config.stages) + " stages exceed the cap of " +
                                        std::to_string(DiagonalConfig::kMaxStages));
  }
  const auto count = static_cast<unsigned>(config.strategies.size());
  for (const auto& st : config.strategies) {
    if (!st.opponent) throw Error(ErrorKind::kInternalConsistency, "strategy without an opponent");
  }

  ConstructionState state;
  state.mode = config.mode;
  state.table = GapRuleTable(config.mode);
  state.strategies.resize(count);
  state.trace.mode = config.mode;
  for (const auto& st : config.strategies) {
    state.trace.opponents.push_back(st.opponent->name());
    state.trace.selectors.push_back(st.selector.name());
  }

  for (Stage s = 0; s < config.stages; ++s) {
    state.stage = s;
    StageRecord rec;
    rec.stage = s;

    std::vector<IntervalSet> before(count);
    std::vector<IntervalSet> fresh(count);
    for (unsigned e = 0; e < count; ++e) {
      before[e] = state.strategies[e].enumerated;
      const auto added = config.strategies[e].opponent->enumerate(s, e, state);
      for (const auto& [lo, hi] : added.ranges()) {
        fresh[e].insert(before[e].complement_within(lo, hi));
      }
    }
    for (unsigned e = 0; e < count; ++e) {
      if (fresh[e].empty()) continue;
      rec.enumerations.push_back({e, fresh[e]});
      for (const auto& r : state.table.rules()) {
        if (r.strategy != e || r.side != Side::kPhi) continue;
        if (auto w = fresh[e].first_in(r.gap_lo(), r.gap_hi())) rec.traps.push_back({e, r.stage, *w});
      }
      state.strategies[e].enumerated.insert(fresh[e]);
    }

    for (unsigned e = 0; e < count; ++e) {
      auto& strat = state.strategies[e];
      StrategyStageRecord sr;
      sr.strategy = e;
      if (s <= e) {
        sr.status = StrategyStatus::kWaiting;
      } else if (!strat.alive) {
        sr.status = StrategyStatus::kDead;
      } else {
        const auto level = tree_level(state.table, before[e], s - 1, config.node_budget);
        sr.level = level.length();
        sr.level_hash = level.hash();
        if (level.empty()) {
          sr.status = StrategyStatus::kDied;
          strat.alive = false;
        } else {
          const auto path = config.strategies[e].selector.select({e, s, level, state});
          const auto marker = select_marker_node(path, strat.markers, s, config.mode);
          strat.markers.insert(marker);
          sr.status = StrategyStatus::kActed;
          sr.path = path;
          sr.marker = marker;
          state.table.add({e, s, marker, Side::kPhi});
          rec.rules.push_back({e, s, marker, Side::kPhi});
          if (config.mode == Mode::kPair) {
            state.table.add({e, s, marker, Side::kPsi});
            rec.rules.push_back({e, s, marker, Side::kPsi});
          }
        }
      }
      rec.strategies.push_back(std::move(sr));
    }

    state.table.close_stage();
    state.trace.log.push_back(std::move(rec));
    state.trace.stages = s + 1;
  }
  return state.trace;
}

Trace run_single(DiagonalConfig config) {
  config.mode = Mode::kSingle;
  return run_construction(config);
}

Trace run_pair(DiagonalConfig config) {
  config.mode = Mode::kPair;
  return run_construction(config);
}

}  // namespace gencomp
