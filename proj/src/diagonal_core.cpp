#include <algorithm>
#include <bit>

#include "gencomp/density.hpp"
#include "gencomp/diagonal.hpp"
#include "gencomp/error.hpp"

namespace gencomp {

std::string_view to_string(Mode mode) { return mode == Mode::kSingle ? "single" : "pair"; }
std::string_view to_string(Side side) { return side == Side::kPhi ? "phi" : "psi"; }

int max_digit(Mode mode) noexcept { return mode == Mode::kSingle ? 1 : 3; }

// ---- Node / PathApprox ------------------------------------------------------

Node Node::single(BitPrefix sigma) { return Node{std::move(sigma), {}}; }

Node Node::pair(BitPrefix sigma, BitPrefix tau) {
  if (sigma.size() != tau.size()) throw Error(ErrorKind::kParse, "pair node components differ in length");
  return Node{std::move(sigma), std::move(tau)};
}

int Node::digit(std::size_t k, Mode mode) const {
  if (mode == Mode::kSingle) return sigma[k];
  return 2 * sigma[k] + tau[k];
}

Node Node::child(int digit, Mode mode) const {
  if (mode == Mode::kSingle) return Node{sigma.extended(digit), {}};
  return Node{sigma.extended(digit >> 1), tau.extended(digit & 1)};
}

Node Node::prefix(std::size_t len) const { return Node{sigma.prefix(len), tau.prefix(len)}; }

bool Node::is_prefix_of(const Node& other) const noexcept {
  return sigma.is_prefix_of(other.sigma) && tau.is_prefix_of(other.tau);
}

std::string Node::to_string(Mode mode) const {
  const auto show = [](const BitPrefix& b) { return b.empty() ? std::string("e") : b.to_string(); };
  if (mode == Mode::kSingle) return show(sigma);
  return "<" + show(sigma) + "," + show(tau) + ">";
}

Node PathApprox::prefix(std::size_t len, Mode mode) const {
  if (len <= head.length()) return head.prefix(len);
  Node n = head;
  while (n.length() < len) n = n.child(tail, mode);
  return n;
}

bool same_path(const PathApprox& a, const PathApprox& b, Mode mode) {
  if (a.tail != b.tail) return false;
  const auto len = std::max(a.head.length(), b.head.length());
  return a.prefix(len, mode) == b.prefix(len, mode);
}

// ---- GapRuleTable -----------------------------------------------------------

Index GapRule::gap_lo() const noexcept { return gap_hi() - (Index{1} << (stage - strategy)); }

GapRuleTable::GapRuleTable(Mode mode) : mode_(mode) {}

void GapRuleTable::add(GapRule rule) {
  if (rule.stage != stages_) {
    throw Error(ErrorKind::kInternalConsistency, "rule for stage " + std::to_string(rule.stage) +
                                                     " while defining stage " + std::to_string(stages_));
  }
  if (rule.strategy >= rule.stage) throw Error(ErrorKind::kInternalConsistency, "strategy e acts only at stages > e");
  if (rule.oracle_node().size() > rule.stage) {
    throw Error(ErrorKind::kCap, "rule node longer than its stage");
  }
  if (mode_ == Mode::kSingle && rule.side == Side::kPsi) {
    throw Error(ErrorKind::kInternalConsistency, "psi rules exist only in pair mode");
  }
  for (auto it = rules_.rbegin(); it != rules_.rend() && it->stage == rule.stage; ++it) {
    if (it->strategy == rule.strategy && it->side == rule.side) {
      throw Error(ErrorKind::kInternalConsistency, "duplicate rule for (strategy, stage, side)");
    }
  }
  if (by_stage_.size() <= rule.stage) by_stage_.resize(rule.stage + 1);
  by_stage_[rule.stage].push_back(rules_.size());
  rules_.push_back(std::move(rule));
}

void GapRuleTable::close_stage() { ++stages_; }

std::vector<GapRule> GapRuleTable::rules_at(Stage s) const {
  std::vector<GapRule> out;
  for (const auto& r : rules_) {
    if (r.stage == s) out.push_back(r);
  }
  return out;
}

Tri GapRuleTable::eval(const BitPrefix& prefix, Index n, Side side) const {
  if (n == 0 || n >= horizon()) {
    throw Error(ErrorKind::kUndefinedRegion, "functional queried at " + std::to_string(n) +
                                                 " outside [1, " + std::to_string(horizon()) + ")");
  }
  const Stage s = block_index(n);
  bool unknown = false;
  if (s >= by_stage_.size()) return Tri::kOne;
  for (std::size_t k : by_stage_[s]) {
    const auto& r = rules_[k];
    if (r.side != side || n < r.gap_lo()) continue;
    const auto& node = r.oracle_node();
    if (node.is_prefix_of(prefix)) return Tri::kZero;
    if (prefix.is_prefix_of(node)) unknown = true;
  }
  return unknown ? Tri::kUnknown : Tri::kOne;
}

IntervalSet GapRuleTable::members(const PathApprox& path, Side side) const {
  IntervalSet out;
  std::vector<Index> cut(stages_);
  for (Stage t = 0; t < stages_; ++t) cut[t] = Index{2} << t;
  const auto along = path.prefix(stages_, mode_);
  for (const auto& r : rules_) {
    if (r.side != side) continue;
    if (r.oracle_node().is_prefix_of(along.component(side))) cut[r.stage] = std::min(cut[r.stage], r.gap_lo());
  }
  for (Stage t = 0; t < stages_; ++t) out.insert(Index{1} << t, cut[t]);
  return out;
}

GapRuleTable GapRuleTable::from_rules(Mode mode, Stage stages_defined, std::vector<GapRule> rules) {
  std::stable_sort(rules.begin(), rules.end(),
                   [](const GapRule& a, const GapRule& b) { return a.stage < b.stage; });
  GapRuleTable t(mode);
  std::size_t k = 0;
  for (Stage s = 0; s < stages_defined; ++s) {
    while (k < rules.size() && rules[k].stage == s) t.add(rules[k++]);
    t.close_stage();
  }
  if (k != rules.size()) throw Error(ErrorKind::kParse, "rule beyond the defined stages");
  return t;
}

Tri eval_phi(const GapRuleTable& table, const BitPrefix& prefix, Index n, Side side) {
  return table.eval(prefix, n, side);
}

// ---- LevelSet ---------------------------------------------------------------

namespace {

bool consistent(const BitPrefix& a, const BitPrefix& b) {
  return a.is_prefix_of(b) || b.is_prefix_of(a);
}

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv(std::uint64_t& h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
}

}  // namespace

LevelSet::LevelSet(Mode mode, std::size_t length, std::vector<KillConstraint> constraints,
                   std::uint64_t node_budget)
    : mode_(mode), length_(length), node_budget_(node_budget) {
  if (mode == Mode::kSingle) {
    for (auto& c : constraints) c.tau = {};
  }
  std::sort(constraints.begin(), constraints.end());
  constraints.erase(std::unique(constraints.begin(), constraints.end()), constraints.end());
  // Drop constraints implied by a weaker one.
  for (std::size_t k = 0; k < constraints.size(); ++k) {
    bool subsumed = false;
    for (std::size_t j = 0; j < constraints.size() && !subsumed; ++j) {
      if (j == k) continue;
      subsumed = constraints[j].sigma.is_prefix_of(constraints[k].sigma) &&
                 constraints[j].tau.is_prefix_of(constraints[k].tau) && !(constraints[j] == constraints[k]);
    }
    if (!subsumed) constraints_.push_back(constraints[k]);
  }
}

bool LevelSet::killed(const Node& node) const {
  for (const auto& c : constraints_) {
    if (c.sigma.is_prefix_of(node.sigma) && c.tau.is_prefix_of(node.tau)) return true;
  }
  return false;
}

bool LevelSet::contains(const Node& node) const {
  if (node.length() != length_) return false;
  if (mode_ == Mode::kPair && node.tau.size() != node.sigma.size()) return false;
  return !killed(node);
}

std::optional<Node> LevelSet::search(const Node& from, bool leftmost, std::uint64_t& visited) const {
  if (++visited > node_budget_) {
    throw Error(ErrorKind::kBudget, "level search visited more than " + std::to_string(node_budget_) + " nodes");
  }
  if (killed(from)) return std::nullopt;
  if (from.length() == length_) return from;
  // With no constraint that could still bite below `from`, the extreme
  // extension survives.
  bool relevant = false;
  for (const auto& c : constraints_) {
    if (consistent(c.sigma, from.sigma) && consistent(c.tau, from.tau)) {
      relevant = true;
      break;
    }
  }
  const int top = max_digit(mode_);
  if (!relevant) {
    Node n = from;
    while (n.length() < length_) n = n.child(leftmost ? 0 : top, mode_);
    return n;
  }
  for (int k = 0; k <= top; ++k) {
    const int d = leftmost ? k : top - k;
    if (auto r = search(from.child(d, mode_), leftmost, visited)) return r;
  }
  return std::nullopt;
}

std::optional<Node> LevelSet::leftmost() const {
  std::uint64_t visited = 0;
  return search(Node{}, true, visited);
}

std::optional<Node> LevelSet::rightmost() const {
  std::uint64_t visited = 0;
  return search(Node{}, false, visited);
}

bool LevelSet::has_survivor_extending(const Node& node) const {
  if (node.length() > length_) return false;
  std::uint64_t visited = 0;
  return search(node, true, visited).has_value();
}

std::vector<Node> LevelSet::enumerate(std::size_t limit) const {
  std::vector<Node> out;
  std::vector<Node> stack{Node{}};
  const int top = max_digit(mode_);
  while (!stack.empty()) {
    Node n = std::move(stack.back());
    stack.pop_back();
    if (killed(n)) continue;
    if (n.length() == length_) {
      if (out.size() == limit) throw Error(ErrorKind::kBudget, "level has more than " + std::to_string(limit) + " nodes");
      out.push_back(std::move(n));
      continue;
    }
    for (int d = top; d >= 0; --d) stack.push_back(n.child(d, mode_));
  }
  return out;
}

std::uint64_t LevelSet::hash() const {
  std::uint64_t h = kFnvOffset;
  fnv(h, to_string(mode_));
  fnv(h, "|" + std::to_string(length_));
  for (const auto& c : constraints_) fnv(h, "|" + c.sigma.to_string() + "," + c.tau.to_string());
  return h;
}

LevelSet tree_level(const GapRuleTable& table, const IntervalSet& enumerated, std::size_t l,
                    std::uint64_t node_budget) {
  if (l > table.stages_defined()) {
    throw Error(ErrorKind::kUndefinedRegion, "level " + std::to_string(l) + " needs stages below " +
                                                 std::to_string(l) + " defined");
  }
  std::vector<KillConstraint> constraints;
  // Blocks P_t lie below 2^l exactly when t < l.
  for (const auto& r : table.rules()) {
    if (r.stage >= l || r.side != Side::kPhi) continue;
    if (table.mode() == Mode::kSingle) {
      if (enumerated.intersects(r.gap_lo(), r.gap_hi())) constraints.push_back({r.node.sigma, {}});
      continue;
    }
    // An element kills <sigma, tau> only if it is in a phi gap under sigma
    // and in a psi gap under tau at the same block.
    for (const auto& q : table.rules()) {
      if (q.stage != r.stage || q.side != Side::kPsi) continue;
      if (enumerated.intersects(std::max(r.gap_lo(), q.gap_lo()), r.gap_hi())) {
        constraints.push_back({r.node.sigma, q.node.tau});
      }
    }
  }
  return LevelSet(table.mode(), l, std::move(constraints), node_budget);
}

Node select_marker_node(const PathApprox& path, const std::set<Node>& markers, std::size_t cap, Mode mode) {
  for (std::size_t len = 0; len <= cap; ++len) {
    Node candidate = path.prefix(len, mode);
    if (!markers.count(candidate)) return candidate;
  }
  throw Error(ErrorKind::kCap, "every prefix of the selected path up to length " + std::to_string(cap) +
                                   " is already marked");
}

}  // namespace gencomp
