#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "gencomp/interval_set.hpp"
#include "gencomp/reals.hpp"

namespace gencomp {

// The stage-by-stage diagonalization against r.e. sets W_e.
//
// Stage s defines the functionals on P_s = [2^s, 2^{s+1}); after stage s they
// are defined on [1, 2^{s+1}). Strategy e acts at stages s > e: it reads
// level s-1 of its tree, marks the shortest unmarked node on the selected
// path, and puts a gap of size 2^{-e} (the last 2^{s-e} elements of P_s)
// into phi^X for every X extending that node. Index 0 lies in no block, is
// never removed, and never prunes a tree.
//
// In pair mode the tree is 4-ary over pairs <sigma, tau> with |sigma| = |tau|,
// child digit 2*sigma_bit + tau_bit, and each marker gaps both phi (under
// sigma) and psi (under tau).

enum class Mode { kSingle, kPair };
enum class Side { kPhi, kPsi };
enum class Tri { kZero, kOne, kUnknown };

std::string_view to_string(Mode mode);
std::string_view to_string(Side side);

struct Node {
  BitPrefix sigma;
  BitPrefix tau;  // empty in single mode

  static Node single(BitPrefix sigma);
  /// kParse unless |sigma| = |tau|.
  static Node pair(BitPrefix sigma, BitPrefix tau);

  std::size_t length() const noexcept { return sigma.size(); }
  int digit(std::size_t k, Mode mode) const;
  Node child(int digit, Mode mode) const;
  Node prefix(std::size_t len) const;
  bool is_prefix_of(const Node& other) const noexcept;
  const BitPrefix& component(Side side) const noexcept { return side == Side::kPhi ? sigma : tau; }
  std::string to_string(Mode mode) const;

  friend auto operator<=>(const Node&, const Node&) = default;
  friend bool operator==(const Node&, const Node&) = default;
};

int max_digit(Mode mode) noexcept;

/// An infinite path: a finite head followed by a constant tail digit.
struct PathApprox {
  Node head;
  int tail = 0;

  Node prefix(std::size_t len, Mode mode) const;
  friend bool operator==(const PathApprox&, const PathApprox&) = default;
};

/// Equality of the infinite sequences the two approximations denote.
bool same_path(const PathApprox& a, const PathApprox& b, Mode mode);

struct GapRule {
  unsigned strategy = 0;
  Stage stage = 0;
  Node node;
  Side side = Side::kPhi;

  const BitPrefix& oracle_node() const noexcept { return node.component(side); }
  Index gap_lo() const noexcept;
  Index gap_hi() const noexcept { return Index{2} << stage; }

  friend auto operator<=>(const GapRule&, const GapRule&) = default;
};

/// The functionals phi and psi, i.e. every gap rule issued so far.
class GapRuleTable {
 public:
  explicit GapRuleTable(Mode mode = Mode::kSingle);

  Mode mode() const noexcept { return mode_; }
  /// Stages 0 .. stages_defined()-1 are complete.
  Stage stages_defined() const noexcept { return stages_; }
  /// The functionals are defined on [1, horizon()).
  Index horizon() const noexcept { return Index{1} << stages_; }

  /// Rules go into the stage currently being defined. At most one rule per
  /// (strategy, stage, side); e < s; oracle node no longer than s.
  void add(GapRule rule);
  void close_stage();

  const std::vector<GapRule>& rules() const noexcept { return rules_; }
  std::vector<GapRule> rules_at(Stage s) const;

  /// 0 if some rule whose node is a prefix of `prefix` removes n; unknown if
  /// some rule covering n has a node extending `prefix`; 1 otherwise.
  /// kUndefinedRegion for n outside [1, horizon()).
  Tri eval(const BitPrefix& prefix, Index n, Side side) const;

  /// The set {n in [1, horizon()) : n in phi^X} (or psi^Y) along a path.
  IntervalSet members(const PathApprox& path, Side side) const;

  static GapRuleTable from_rules(Mode mode, Stage stages_defined, std::vector<GapRule> rules);

 private:
  Mode mode_;
  Stage stages_ = 0;
  std::vector<GapRule> rules_;  // in issue order, grouped by stage
  std::vector<std::vector<std::size_t>> by_stage_;
};

Tri eval_phi(const GapRuleTable& table, const BitPrefix& prefix, Index n, Side side = Side::kPhi);

/// Kills every node whose sigma extends `sigma` (and, in pair mode, whose
/// tau extends `tau`).
struct KillConstraint {
  BitPrefix sigma;
  BitPrefix tau;

  friend auto operator<=>(const KillConstraint&, const KillConstraint&) = default;
};

/// One level of a strategy's tree, held as the complement of its kill
/// constraints so it never has to be materialized.
class LevelSet {
 public:
  LevelSet(Mode mode, std::size_t length, std::vector<KillConstraint> constraints,
           std::uint64_t node_budget = 1u << 22);

  Mode mode() const noexcept { return mode_; }
  std::size_t length() const noexcept { return length_; }
  const std::vector<KillConstraint>& constraints() const noexcept { return constraints_; }

  bool contains(const Node& node) const;
  bool empty() const { return !leftmost().has_value(); }
  std::optional<Node> leftmost() const;
  std::optional<Node> rightmost() const;
  bool has_survivor_extending(const Node& node) const;
  /// Every node of the level; kBudget when there are more than `limit`.
  std::vector<Node> enumerate(std::size_t limit) const;

  /// FNV-1a over the canonical constraint list.
  std::uint64_t hash() const;

 private:
  bool killed(const Node& node) const;
  std::optional<Node> search(const Node& from, bool leftmost, std::uint64_t& visited) const;

  Mode mode_;
  std::size_t length_;
  std::vector<KillConstraint> constraints_;  // sorted, unsubsumed
  std::uint64_t node_budget_;
};

/// Level l of T_e given what W_e had enumerated by step l. Requires the
/// functionals defined on [1, 2^l) (kUndefinedRegion otherwise).
LevelSet tree_level(const GapRuleTable& table, const IntervalSet& enumerated, std::size_t l,
                    std::uint64_t node_budget = 1u << 22);

/// Shortest prefix of `path` (length <= cap) not in `markers`; kCap if all are.
Node select_marker_node(const PathApprox& path, const std::set<Node>& markers, std::size_t cap, Mode mode);

// ---- trace -----------------------------------------------------------------

struct MarkerRecord {
  unsigned strategy = 0;
  Stage stage = 0;
  Node node;
};

enum class StrategyStatus { kWaiting, kActed, kDied, kDead };
std::string_view to_string(StrategyStatus status);

struct StrategyStageRecord {
  unsigned strategy = 0;
  StrategyStatus status = StrategyStatus::kWaiting;
  std::optional<std::size_t> level;  // level length examined
  std::optional<std::uint64_t> level_hash;
  std::optional<PathApprox> path;
  std::optional<Node> marker;
};

struct EnumerationRecord {
  unsigned strategy = 0;
  IntervalSet added;
};

/// W_e entered the gap of e's stage-`trap_stage` rule during this stage.
struct TrapEvent {
  unsigned strategy = 0;
  Stage trap_stage = 0;
  Index witness = 0;
};

struct StageRecord {
  Stage stage = 0;
  std::vector<EnumerationRecord> enumerations;
  std::vector<StrategyStageRecord> strategies;
  std::vector<GapRule> rules;
  std::vector<TrapEvent> traps;
};

struct Trace {
  static constexpr int kVersion = 1;

  Mode mode = Mode::kSingle;
  Stage stages = 0;
  std::vector<std::string> opponents;  // per strategy
  std::vector<std::string> selectors;
  nlohmann::json config;  // replay input, filled in by the harness
  std::vector<StageRecord> log;

  unsigned strategy_count() const noexcept { return static_cast<unsigned>(opponents.size()); }
  GapRuleTable table_through(Stage stages_defined) const;
  GapRuleTable final_table() const { return table_through(stages); }
  /// W_e after stage s.
  IntervalSet enumerated_through(unsigned e, Stage s) const;
  std::vector<MarkerRecord> markers(unsigned e) const;
  /// (stage, path) for each stage where strategy e acted.
  std::vector<std::pair<Stage, PathApprox>> paths(unsigned e) const;
  std::optional<Stage> died_at(unsigned e) const;
};

nlohmann::json to_json(const Trace& trace);
/// kParse on any schema mismatch.
Trace trace_from_json(const nlohmann::json& j);
std::string dump_trace(const Trace& trace);

enum class TrapStatus { kPending, kSprung, kInactive };
std::string_view to_string(TrapStatus status);
TrapStatus trap_status(const Trace& trace, unsigned e, Stage s);

// ---- construction ----------------------------------------------------------

struct StrategyState {
  bool alive = true;
  std::set<Node> markers;
  IntervalSet enumerated;  // W_e so far
};

/// Everything an opponent or selector may read: the public record of the
/// stages completed so far.
struct ConstructionState {
  Mode mode = Mode::kSingle;
  Stage stage = 0;  // stage in progress
  GapRuleTable table;
  std::vector<StrategyState> strategies;
  Trace trace;  // stages < stage

  /// Latest path strategy e acted on, if any.
  std::optional<PathApprox> latest_path(unsigned e) const;
};

/// W_e as the construction sees it.
class Opponent {
 public:
  virtual ~Opponent() = default;
  virtual std::string name() const = 0;
  /// Elements W_e adds at stage s. `state.trace` covers stages < s.
  virtual IntervalSet enumerate(Stage s, unsigned e, const ConstructionState& state) const = 0;
};

/// An opponent following a fixed enumeration script.
class ScriptedOpponent : public Opponent {
 public:
  explicit ScriptedOpponent(Enumerator w, std::string name = "scripted");
  std::string name() const override { return name_; }
  IntervalSet enumerate(Stage s, unsigned e, const ConstructionState& state) const override;

 private:
  Enumerator w_;
  std::string name_;
};

struct SelectorContext {
  unsigned strategy;
  Stage stage;
  const LevelSet& level;
  const ConstructionState& state;
};

/// Chooses the infinite path through T_{e,s} that receives the marker.
/// Leftmost/rightmost take the extreme node of level s-1 with a constant
/// minimal/maximal tail. Scripted selectors replay (stage, path) entries,
/// using the latest entry at or before the current stage; custom selectors
/// may read the whole construction state. Every answer must extend a node of
/// the supplied level (kSelector otherwise).
class PathSelector {
 public:
  enum class Kind { kLeftmost, kRightmost, kScripted, kCustom };
  using Custom = std::function<PathApprox(const SelectorContext&)>;

  static PathSelector leftmost();
  static PathSelector rightmost();
  static PathSelector scripted(std::vector<std::pair<Stage, PathApprox>> script);
  static PathSelector custom(std::string name, Custom fn);

  Kind kind() const noexcept { return kind_; }
  std::string name() const;
  const std::vector<std::pair<Stage, PathApprox>>& script() const noexcept { return script_; }

  PathApprox select(const SelectorContext& ctx) const;

 private:
  Kind kind_ = Kind::kLeftmost;
  std::vector<std::pair<Stage, PathApprox>> script_;
  std::string custom_name_;
  Custom custom_;
};

struct StrategySetup {
  std::shared_ptr<const Opponent> opponent;
  PathSelector selector = PathSelector::leftmost();
};

struct DiagonalConfig {
  Mode mode = Mode::kSingle;
  Stage stages = 0;  // runs stages 0 .. stages-1
  std::vector<StrategySetup> strategies;
  std::uint64_t node_budget = 1u << 22;

  static constexpr Stage kMaxStages = 40;
};

/// kBudget when stages exceed kMaxStages or a level search exceeds the node budget.
Trace run_construction(const DiagonalConfig& config);
Trace run_single(DiagonalConfig config);
Trace run_pair(DiagonalConfig config);

// ---- trace invariants ------------------------------------------------------

struct Verdict {
  std::string invariant;
  bool passed = true;
  std::string detail;
};

struct CheckOptions {
  std::size_t brute_force_nodes = 1u << 16;  // exhaustive checks up to this many nodes
  Stage exhaustive_prefix_stages = 10;
  std::size_t sampled_prefixes = 256;
  Stage census_stages = 16;  // gap census compares blocks below 2^census_stages
  std::uint64_t eval_budget = 1u << 24;  // eval_phi calls per brute-force cross-check
  std::uint64_t seed = 1;
};

Verdict check_level_hashes(const Trace& trace);
Verdict check_marker_on_path(const Trace& trace);
Verdict check_trap_soundness(const Trace& trace, const CheckOptions& options = {});
Verdict check_spoiling_completeness(const Trace& trace, const CheckOptions& options = {});
Verdict check_single_victim(const Trace& trace);
Verdict check_tree_antitonicity(const Trace& trace, const CheckOptions& options = {});
Verdict check_gap_census_consistency(const Trace& trace, const CheckOptions& options = {});
Verdict check_prefix_determinism(const Trace& trace, const CheckOptions& options = {});

std::vector<Verdict> check_trace(const Trace& trace, const CheckOptions& options = {});

}  // namespace gencomp
