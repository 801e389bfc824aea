#include "gencomp/harness.hpp"

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "gencomp/codings.hpp"
#include "gencomp/density.hpp"
#include "gencomp/enumops.hpp"
#include "gencomp/relations.hpp"

namespace gencomp {

using nlohmann::json;

ExitCode exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kParse: return ExitCode::kParse;
    case ErrorKind::kBudget: return ExitCode::kBudget;
    case ErrorKind::kInvariantViolation:
    case ErrorKind::kInternalConsistency:
    case ErrorKind::kSelector:
    case ErrorKind::kCap: return ExitCode::kInvariant;
    default: return ExitCode::kError;
  }
}

std::string_view to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::kSingleDiagonal: return "single-diagonal";
    case Scenario::kPairDiagonal: return "pair-diagonal";
    case Scenario::kCodingRoundtrip: return "coding-roundtrip";
    case Scenario::kRelationEmbed: return "relation-embed";
    case Scenario::kOperatorCompile: return "operator-compile";
  }
  return "?";
}

json rational_json(const Rational& r) { return {{"num", r.numerator()}, {"den", r.denominator()}}; }

// ---- config validation ------------------------------------------------------

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::kParse, "config: " + what); }

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* allowed : keys) known = known || k == allowed;
    if (!known) bad("unknown field '" + k + "' in " + where);
  }
}

std::uint64_t natural(const json& j, const std::string& what, std::uint64_t max) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
    bad(what + " must be a nonnegative integer");
  }
  const auto v = j.get<std::uint64_t>();
  if (v > max) bad(what + " = " + std::to_string(v) + " exceeds the documented limit " + std::to_string(max));
  return v;
}

std::uint64_t natural_or(json& obj, const char* key, std::uint64_t fallback, std::uint64_t max) {
  if (!obj.contains(key)) obj[key] = fallback;
  return natural(obj[key], key, max);
}

std::string text(const json& j, const std::string& what) {
  if (!j.is_string()) bad(what + " must be a string");
  return j.get<std::string>();
}

BitPrefix bits(const json& j, const std::string& what) {
  const auto s = text(j, what);
  if (s.find_first_not_of("01") != std::string::npos) bad(what + " must be a 0/1 string");
  return BitPrefix::parse(s);
}

Node node_of(const json& j, Mode mode, const std::string& where) {
  if (mode == Mode::kSingle) {
    only_keys(j, where, {"sigma"});
    if (!j.contains("sigma")) bad(where + " needs sigma");
    return Node::single(bits(j["sigma"], where + ".sigma"));
  }
  only_keys(j, where, {"sigma", "tau"});
  if (!j.contains("sigma") || !j.contains("tau")) bad(where + " needs sigma and tau");
  const auto sigma = bits(j["sigma"], where + ".sigma");
  const auto tau = bits(j["tau"], where + ".tau");
  if (sigma.size() != tau.size()) bad(where + ": sigma and tau differ in length");
  return Node::pair(sigma, tau);
}

bool needs_seed(const std::string& adversary) {
  for (const auto& a : builtin_adversaries()) {
    if (a.name == adversary) return a.needs_seed;
  }
  bad("unknown adversary '" + adversary + "'");
}

void validate_strategy(json& st, Mode mode, std::size_t k, bool has_seed) {
  const std::string where = "strategies[" + std::to_string(k) + "]";
  only_keys(st, where, {"adversary", "enumerator", "selector"});
  if (st.contains("adversary") == st.contains("enumerator")) bad(where + " needs exactly one of adversary, enumerator");
  if (st.contains("adversary")) {
    if (needs_seed(text(st["adversary"], where + ".adversary")) && !has_seed) {
      bad(where + ": adversary '" + st["adversary"].get<std::string>() + "' is pseudorandom and needs a seed");
    }
  } else {
    const auto& en = st["enumerator"];
    only_keys(en, where + ".enumerator", {"script"});
    if (!en.contains("script") || !en["script"].is_object()) bad(where + ".enumerator.script must be an object");
    for (const auto& [stage, elems] : en["script"].items()) {
      if (stage.empty() || stage.find_first_not_of("0123456789") != std::string::npos || stage.size() > 3) {
        bad(where + ": script key '" + stage + "' is not a stage number");
      }
      if (!elems.is_array()) bad(where + ": script entries must be arrays");
      for (const auto& n : elems) natural(n, where + " script element", ~std::uint64_t{0} - 1);
    }
  }
  if (!st.contains("selector")) st["selector"] = "leftmost";
  const auto& sel = st["selector"];
  if (sel.is_string()) {
    const auto name = sel.get<std::string>();
    if (name != "leftmost" && name != "rightmost") bad(where + ": unknown selector '" + name + "'");
    return;
  }
  only_keys(sel, where + ".selector", {"scripted"});
  if (!sel.contains("scripted") || !sel["scripted"].is_array() || sel["scripted"].empty()) {
    bad(where + ".selector.scripted must be a nonempty array");
  }
  for (const auto& entry : sel["scripted"]) {
    only_keys(entry, where + " script entry", {"stage", "head", "tail"});
    if (!entry.contains("stage") || !entry.contains("head")) bad(where + " script entries need stage and head");
    natural(entry["stage"], "stage", DiagonalConfig::kMaxStages);
    node_of(entry["head"], mode, where + " script head");
    if (entry.contains("tail")) natural(entry["tail"], "tail", static_cast<std::uint64_t>(max_digit(mode)));
  }
}

RealSpec real_of(const json& j, const std::string& where) {
  only_keys(j, where, {"seeded", "prefix", "preamble", "period"});
  if (j.contains("seeded")) {
    if (j.size() != 1) bad(where + ": seeded takes no other fields");
    return RealSpec::seeded(natural(j["seeded"], where + ".seeded", ~std::uint64_t{0}));
  }
  if (j.contains("prefix")) {
    if (j.size() != 1) bad(where + ": prefix takes no other fields");
    return RealSpec::explicit_prefix(bits(j["prefix"], where + ".prefix"));
  }
  if (!j.contains("period")) bad(where + " needs seeded, prefix or period");
  const auto period = bits(j["period"], where + ".period");
  if (period.empty()) bad(where + ".period must be nonempty");
  return RealSpec::eventually_periodic(j.contains("preamble") ? bits(j["preamble"], where + ".preamble") : BitPrefix{},
                                       period);
}

}  // namespace

ExperimentConfig parse_config(const json& input) {
  if (!input.is_object()) bad("top level must be an object");
  json doc = input;
  if (!doc.contains("version")) bad("missing version");
  if (natural(doc["version"], "version", 1000) != ExperimentConfig::kVersion) bad("unsupported version");
  if (!doc.contains("scenario")) bad("missing scenario");
  const auto kind = text(doc["scenario"], "scenario");

  ExperimentConfig config;
  bool found = false;
  for (auto s : {Scenario::kSingleDiagonal, Scenario::kPairDiagonal, Scenario::kCodingRoundtrip,
                 Scenario::kRelationEmbed, Scenario::kOperatorCompile}) {
    if (kind == to_string(s)) {
      config.scenario = s;
      found = true;
    }
  }
  if (!found) bad("unknown scenario '" + kind + "'");

  const bool has_seed = doc.contains("seed");
  if (has_seed) natural(doc["seed"], "seed", ~std::uint64_t{0});
  if (doc.contains("description")) text(doc["description"], "description");
  if (!doc.contains("outputs")) doc["outputs"] = json::object();
  auto& outputs = doc["outputs"];
  only_keys(outputs, "outputs", {"trace", "report", "csv"});
  if (!outputs.contains("report")) outputs["report"] = "report.json";
  for (const auto& [k, v] : outputs.items()) text(v, "outputs." + k);

  auto require_seed = [&](const char* what) {
    if (!has_seed) bad(std::string(what) + " is pseudorandom and needs a seed");
  };

  switch (config.scenario) {
    case Scenario::kSingleDiagonal:
    case Scenario::kPairDiagonal: {
      only_keys(doc, "config", {"version", "scenario", "seed", "description", "outputs", "stages", "strategies",
                                "node_budget", "double_run"});
      const Mode mode = config.scenario == Scenario::kPairDiagonal ? Mode::kPair : Mode::kSingle;
      if (!doc.contains("stages")) bad("missing stages");
      natural(doc["stages"], "stages", DiagonalConfig::kMaxStages);
      natural_or(doc, "node_budget", 1u << 22, std::uint64_t{1} << 32);
      if (!doc.contains("double_run")) doc["double_run"] = false;
      if (!doc["double_run"].is_boolean()) bad("double_run must be a boolean");
      if (!outputs.contains("trace")) outputs["trace"] = "trace.json";
      if (!doc.contains("strategies")) doc["strategies"] = json::array();
      if (!doc["strategies"].is_array()) bad("strategies must be an array");
      if (doc["strategies"].size() > 64) bad("at most 64 strategies");
      for (std::size_t k = 0; k < doc["strategies"].size(); ++k) {
        validate_strategy(doc["strategies"][k], mode, k, has_seed);
        if (doc["double_run"].get<bool>() && doc["strategies"][k]["selector"] != "leftmost") {
          bad("double_run pairs leftmost with rightmost; every selector must be leftmost");
        }
      }
      break;
    }
    case Scenario::kCodingRoundtrip: {
      only_keys(doc, "config", {"version", "scenario", "seed", "description", "outputs", "reals", "m_max",
                                "robust_sets", "robust_m_max", "rtilde_sets"});
      if (!doc.contains("reals")) bad("missing reals");
      if (doc["reals"].is_array()) {
        for (std::size_t k = 0; k < doc["reals"].size(); ++k) real_of(doc["reals"][k], "reals[" + std::to_string(k) + "]");
      } else {
        natural(doc["reals"], "reals", 10'000);
        require_seed("a counted list of reals");
      }
      natural_or(doc, "m_max", 12, 40);
      if (natural_or(doc, "robust_sets", 0, 10'000) > 0) require_seed("robust decoding");
      natural_or(doc, "robust_m_max", 8, 12);
      if (natural_or(doc, "rtilde_sets", 0, 10'000) > 0) require_seed("R~ finite-loss domains");
      break;
    }
    case Scenario::kRelationEmbed: {
      only_keys(doc, "config", {"version", "scenario", "seed", "description", "outputs", "relations", "max_size"});
      if (!doc.contains("relations")) bad("missing relations");
      natural_or(doc, "max_size", 8, 16);
      if (doc["relations"].is_array()) {
        for (const auto& m : doc["relations"]) {
          if (!m.is_array() || m.size() > doc["max_size"].get<std::size_t>()) bad("relation matrix too large or malformed");
          for (const auto& row : m) {
            if (!row.is_array() || row.size() != m.size()) bad("relation matrix must be square");
            for (const auto& x : row) natural(x, "relation entry", 1);
          }
        }
      } else {
        natural(doc["relations"], "relations", 100'000);
        require_seed("random relations");
      }
      break;
    }
    case Scenario::kOperatorCompile: {
      only_keys(doc, "config", {"version", "scenario", "seed", "description", "outputs", "functionals",
                                "max_assignments", "max_label", "element_bound"});
      if (!doc.contains("functionals")) {
        doc["functionals"] = json::array();
        for (const auto& f : functional_battery()) doc["functionals"].push_back(f.name);
      }
      if (!doc["functionals"].is_array()) bad("functionals must be an array");
      for (const auto& f : doc["functionals"]) {
        if (!functional_by_name(text(f, "functional"))) bad("unknown functional '" + f.get<std::string>() + "'");
      }
      natural_or(doc, "max_assignments", 5, 6);
      natural_or(doc, "max_label", 3, 4);
      natural_or(doc, "element_bound", 5, 6);
      if (doc["max_assignments"] > doc["element_bound"]) bad("max_assignments exceeds element_bound");
      break;
    }
  }
  config.doc = std::move(doc);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kParse, "cannot read config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, "config " + path.string() + " is not JSON: " + e.what());
  }
  return parse_config(doc);
}

ExperimentConfig with_overrides(const ExperimentConfig& config, const Overrides& overrides) {
  json doc = config.doc;
  if (overrides.stages) {
    if (!doc.contains("stages")) bad("--stages applies only to diagonal scenarios");
    doc["stages"] = *overrides.stages;
  }
  if (overrides.seed) doc["seed"] = *overrides.seed;
  return parse_config(doc);
}

// ---- adversaries -------------------------------------------------------------

namespace {

class Silent : public Opponent {
 public:
  std::string name() const override { return "silent"; }
  IntervalSet enumerate(Stage, unsigned, const ConstructionState&) const override { return {}; }
};

class TrapSpringer : public Opponent {
 public:
  std::string name() const override { return "trap-springer"; }
  IntervalSet enumerate(Stage s, unsigned e, const ConstructionState& state) const override {
    IntervalSet out;
    if (s == 0) return out;
    for (const auto& r : state.table.rules_at(s - 1)) {
      if (r.strategy == e && r.side == Side::kPhi) out.insert(r.gap_lo());
    }
    return out;
  }
};

class CautiousCopier : public Opponent {
 public:
  std::string name() const override { return "cautious-copier"; }
  IntervalSet enumerate(Stage, unsigned e, const ConstructionState& state) const override {
    const auto path = state.latest_path(e).value_or(PathApprox{});
    auto out = state.table.members(path, Side::kPhi);
    if (state.mode == Mode::kPair) out.insert(state.table.members(path, Side::kPsi));
    return out;
  }
};

class PrefixFlooder : public Opponent {
 public:
  std::string name() const override { return "prefix-flooder"; }
  IntervalSet enumerate(Stage s, unsigned, const ConstructionState&) const override {
    IntervalSet out;
    out.insert(0, Index{1} << s);
    return out;
  }
};

class RandomSprinkler : public Opponent {
 public:
  explicit RandomSprinkler(std::uint64_t seed) : seed_(seed) {}
  std::string name() const override { return "random-sprinkler"; }
  IntervalSet enumerate(Stage s, unsigned e, const ConstructionState&) const override {
    IntervalSet out;
    if (s == 0) return out;
    const Index span = (Index{1} << s) - 1;
    for (std::uint64_t k = 0; k < 2; ++k) {
      const auto h = mix64(seed_ ^ mix64((std::uint64_t{e} << 32) | (std::uint64_t{s} << 1) | k));
      out.insert(1 + h % span);
    }
    return out;
  }

 private:
  std::uint64_t seed_;
};

}  // namespace

std::vector<AdversaryInfo> builtin_adversaries() {
  return {
      {"silent", "never enumerates", false},
      {"trap-springer", "at stage s enumerates the first gap element of each rule it saw issued at s-1", false},
      {"cautious-copier", "copies phi (and psi) along its strategy's latest path, avoiding that path's gaps", false},
      {"prefix-flooder", "enumerates [0, 2^s) at stage s", false},
      {"random-sprinkler", "two pseudorandom elements of [1, 2^s) per stage", true},
  };
}

std::shared_ptr<const Opponent> make_adversary(const std::string& name, std::optional<std::uint64_t> seed) {
  if (name == "silent") return std::make_shared<Silent>();
  if (name == "trap-springer") return std::make_shared<TrapSpringer>();
  if (name == "cautious-copier") return std::make_shared<CautiousCopier>();
  if (name == "prefix-flooder") return std::make_shared<PrefixFlooder>();
  if (name == "random-sprinkler") {
    if (!seed) throw Error(ErrorKind::kParse, "random-sprinkler needs a seed");
    return std::make_shared<RandomSprinkler>(*seed);
  }
  throw Error(ErrorKind::kParse, "unknown adversary '" + name + "'");
}

DiagonalConfig diagonal_config(const ExperimentConfig& config) {
  if (config.scenario != Scenario::kSingleDiagonal && config.scenario != Scenario::kPairDiagonal) {
    throw Error(ErrorKind::kParse, "not a diagonal scenario");
  }
  const auto& doc = config.doc;
  DiagonalConfig dc;
  dc.mode = config.scenario == Scenario::kPairDiagonal ? Mode::kPair : Mode::kSingle;
  dc.stages = doc["stages"].get<Stage>();
  dc.node_budget = doc["node_budget"].get<std::uint64_t>();
  const std::optional<std::uint64_t> seed =
      doc.contains("seed") ? std::optional(doc["seed"].get<std::uint64_t>()) : std::nullopt;
  unsigned k = 0;
  for (const auto& st : doc["strategies"]) {
    StrategySetup setup;
    if (st.contains("adversary")) {
      // Strategies with the same pseudorandom adversary draw differently.
      setup.opponent = make_adversary(st["adversary"].get<std::string>(), seed);
    } else {
      std::map<Stage, std::vector<Index>> script;
      for (const auto& [stage, elems] : st["enumerator"]["script"].items()) {
        auto& v = script[static_cast<Stage>(std::stoul(stage))];
        for (const auto& n : elems) v.push_back(n.get<Index>());
      }
      setup.opponent = std::make_shared<ScriptedOpponent>(Enumerator::scripted(k, std::move(script)));
    }
    const auto& sel = st["selector"];
    if (sel == "rightmost") {
      setup.selector = PathSelector::rightmost();
    } else if (sel.is_object()) {
      std::vector<std::pair<Stage, PathApprox>> script;
      for (const auto& entry : sel["scripted"]) {
        script.emplace_back(entry["stage"].get<Stage>(),
                            PathApprox{node_of(entry["head"], dc.mode, "head"), entry.value("tail", 0)});
      }
      setup.selector = PathSelector::scripted(std::move(script));
    }
    dc.strategies.push_back(std::move(setup));
    ++k;
  }
  return dc;
}

// ---- density helpers -----------------------------------------------------------

std::vector<std::pair<Index, Rational>> block_end_densities(const IntervalSet& w, Stage stages) {
  std::vector<std::pair<Index, Rational>> out;
  for (Stage i = 0; i < stages; ++i) {
    const Index n = Index{2} << i;
    out.emplace_back(n, Rational(static_cast<std::int64_t>(w.count_below(n)), static_cast<std::int64_t>(n)));
  }
  return out;
}

std::size_t density_dips(const IntervalSet& w, unsigned e, Stage stages) {
  const Rational bound = one_minus_pow2_neg(static_cast<int>(e) + 1);
  std::size_t dips = 0;
  for (const auto& [n, d] : block_end_densities(w, stages)) dips += d <= bound ? 1 : 0;
  return dips;
}

bool RunResult::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

// ---- scenarios ---------------------------------------------------------------------

namespace {

std::string path_string(const PathApprox& p, Mode mode) {
  const auto head = p.head.length() == 0 ? std::string("e") : p.head.to_string(mode);
  return head + "(" + std::to_string(p.tail) + ")^w";
}

json diagonal_results(const Trace& trace) {
  json strategies = json::array();
  const auto table = trace.final_table();
  for (unsigned e = 0; e < trace.strategy_count(); ++e) {
    const auto w = trace.enumerated_through(e, trace.stages);
    json traps = {{"pending", 0}, {"sprung", 0}, {"inactive", 0}};
    for (Stage s = 0; s < trace.stages; ++s) traps[std::string(to_string(trap_status(trace, e, s)))] =
        traps[std::string(to_string(trap_status(trace, e, s)))].get<int>() + 1;
    json densities = json::array();
    for (const auto& [n, d] : block_end_densities(w, trace.stages)) densities.push_back({{"n", n}, {"density", rational_json(d)}});
    const auto died = trace.died_at(e);
    const auto dips = density_dips(w, e, trace.stages);
    const auto paths = trace.paths(e);
    json entry = {{"strategy", e},
                  {"opponent", trace.opponents[e]},
                  {"selector", trace.selectors[e]},
                  {"died_at", died ? json(*died) : json(nullptr)},
                  {"markers", trace.markers(e).size()},
                  {"traps", traps},
                  {"enumerated", w.size()},
                  {"density_dips", dips},
                  {"tree_emptied_or_three_dips", died.has_value() || dips >= 3},
                  {"block_end_densities", densities},
                  {"victim", paths.empty() ? json(nullptr) : json(path_string(paths.back().second, trace.mode))}};
    strategies.push_back(entry);
  }
  return {{"mode", std::string(to_string(trace.mode))},
          {"stages", trace.stages},
          {"phi_horizon", table.horizon()},
          {"rules", table.rules().size()},
          {"phi_all_ones", table.rules().empty()},
          {"strategies", strategies}};
}

std::string diagonal_csv(const Trace& trace) {
  std::ostringstream out;
  out << "strategy,n,num,den\n";
  for (unsigned e = 0; e < trace.strategy_count(); ++e) {
    for (const auto& [n, d] : block_end_densities(trace.enumerated_through(e, trace.stages), trace.stages)) {
      out << e << ',' << n << ',' << d.numerator() << ',' << d.denominator() << '\n';
    }
  }
  return out.str();
}

void run_diagonal(const ExperimentConfig& config, const CheckOptions& checks, RunResult& result) {
  auto dc = diagonal_config(config);
  Trace trace = run_construction(dc);
  trace.config = config.doc;
  Trace again = run_construction(dc);
  again.config = config.doc;
  const bool identical = dump_trace(trace) == dump_trace(again);
  result.verdicts.push_back({"replay-determinism", identical, identical ? "two runs, byte-identical" : "traces differ"});
  for (auto& v : check_trace(trace, checks)) result.verdicts.push_back(std::move(v));
  result.report["results"] = diagonal_results(trace);

  if (config.doc["double_run"].get<bool>()) {
    for (auto& st : dc.strategies) st.selector = PathSelector::rightmost();
    Trace mirror = run_construction(dc);
    mirror.config = config.doc;
    for (auto& v : check_trace(mirror, checks)) {
      v.invariant = "rightmost/" + v.invariant;
      result.verdicts.push_back(std::move(v));
    }
    json victims = json::array();
    for (unsigned e = 0; e < trace.strategy_count(); ++e) {
      const auto left = trace.paths(e);
      const auto right = mirror.paths(e);
      json v = {{"strategy", e}, {"leftmost", nullptr}, {"rightmost", nullptr}, {"same_victim", false}};
      if (!left.empty()) v["leftmost"] = path_string(left.back().second, trace.mode);
      if (!right.empty()) v["rightmost"] = path_string(right.back().second, trace.mode);
      if (!left.empty() && !right.empty()) v["same_victim"] = same_path(left.back().second, right.back().second, trace.mode);
      victims.push_back(v);
    }
    result.report["results"]["double_run"] = victims;
    result.mirror = std::move(mirror);
  }
  result.csv = diagonal_csv(trace);
  result.trace = std::move(trace);
}

std::vector<RealSpec> reals_of(const json& doc) {
  std::vector<RealSpec> out;
  if (doc["reals"].is_array()) {
    for (const auto& r : doc["reals"]) out.push_back(real_of(r, "real"));
  } else {
    const auto seed = doc["seed"].get<std::uint64_t>();
    for (std::uint64_t k = 0; k < doc["reals"].get<std::uint64_t>(); ++k) out.push_back(RealSpec::seeded(mix64(seed + k)));
  }
  return out;
}

void run_coding(const ExperimentConfig& config, RunResult& result) {
  const auto& doc = config.doc;
  const auto reals = reals_of(doc);
  const auto m_max = doc["m_max"].get<unsigned>();
  const Index horizon = Index{2} << m_max;
  std::size_t decoded = 0;
  std::string problem;
  for (std::size_t k = 0; k < reals.size() && problem.empty(); ++k) {
    if (auto len = reals[k].hard_length(); len && *len <= m_max) {
      problem = "real " + std::to_string(k) + " has fewer than m_max+1 bits";
      break;
    }
    const auto d = CodedReal::r_of(reals[k]).full_description(horizon);
    for (unsigned m = 0; m <= m_max; ++m) {
      const auto got = decode_R(d, m, horizon - 1);
      if (!got || *got != reals[k].bit(m)) {
        problem = "real " + std::to_string(k) + " bit " + std::to_string(m) + " not recovered";
        break;
      }
      ++decoded;
    }
  }
  result.verdicts.push_back({"r-roundtrip", problem.empty(),
                             problem.empty() ? std::to_string(decoded) + " bits recovered" : problem});

  std::mt19937_64 rng(doc.value("seed", std::uint64_t{0}));
  const auto robust_sets = doc["robust_sets"].get<std::size_t>();
  const auto robust_m = doc["robust_m_max"].get<unsigned>();
  if (robust_sets > 0) {
    problem.clear();
    constexpr unsigned kCensusStages = 14;
    std::size_t checked = 0;
    for (std::size_t k = 0; k < robust_sets && problem.empty(); ++k) {
      const auto& x = reals[k % reals.size()];
      const auto gaps = random_gap_pattern(rng, kCensusStages);
      const auto domain = gap_only_set(gaps);
      const auto census = gap_census([&](Index n) { return domain.contains(n); }, kCensusStages);
      if (census.max_gaps() != gaps) {
        problem = "set " + std::to_string(k) + ": census disagrees with the planted gaps";
        break;
      }
      const Index bound = (Index{1} << kCensusStages) - 1;
      const auto coded = CodedReal::r_of(x);
      const auto d = GenericDescription::restricted(coded.as_source(), [&](Index n) {
        return n >= 1 && n <= bound && domain.contains(n);
      });
      for (unsigned m = 0; m <= robust_m; ++m) {
        const auto got = decode_R(d, m, bound);
        if (!got || *got != x.bit(m)) {
          problem = "set " + std::to_string(k) + ": bit " + std::to_string(m) + " not recovered";
          break;
        }
        ++checked;
      }
    }
    result.verdicts.push_back({"r-robust-decoding", problem.empty(),
                               problem.empty() ? std::to_string(checked) + " bits over gap-deleted domains" : problem});
  }

  const auto rtilde_sets = doc["rtilde_sets"].get<std::size_t>();
  if (rtilde_sets > 0) {
    problem.clear();
    constexpr unsigned kStages = 13;
    const Index bound = (Index{1} << kStages) - 1;
    std::size_t recovered = 0, lost = 0;
    for (std::size_t k = 0; k < rtilde_sets && problem.empty(); ++k) {
      const auto& x = reals[k % reals.size()];
      std::set<Index> holes;
      for (int h = 0; h < 64; ++h) holes.insert(2 + rng() % (bound - 1));
      // Wipe out one small witness interval entirely now and then.
      if (k % 3 == 0) {
        const unsigned m = static_cast<unsigned>(rng() % 4);
        for (Index n = (Index{1} << m) + 1; n <= (Index{2} << m); ++n) holes.insert(n);
      }
      const auto d = GenericDescription::restricted(CodedReal::rtilde_of(x).as_source(), [&](Index n) {
        return n >= 2 && n <= bound && !holes.count(n);
      });
      for (unsigned m = 0; m < kStages; ++m) {
        bool has_witness = false;
        for (Index n = (Index{1} << m) + 1; n <= std::min(Index{2} << m, bound) && !has_witness; ++n) {
          has_witness = !holes.count(n);
        }
        const auto got = decode_Rtilde(d, m, bound);
        if (has_witness != got.has_value() || (got && *got != x.bit(m))) {
          problem = "domain " + std::to_string(k) + ": bit " + std::to_string(m) + " decoded wrongly";
          break;
        }
        (got ? recovered : lost) += 1;
      }
    }
    result.verdicts.push_back({"rtilde-finite-loss", problem.empty(),
                               problem.empty() ? std::to_string(recovered) + " bits recovered, " + std::to_string(lost) +
                                                     " with every witness deleted"
                                               : problem});
  }
  result.report["results"] = {{"reals", reals.size()}, {"m_max", m_max}, {"horizon", horizon}};
}

void run_relations(const ExperimentConfig& config, RunResult& result) {
  const auto& doc = config.doc;
  std::vector<FiniteReflexiveRelation> rels;
  if (doc["relations"].is_array()) {
    for (const auto& m : doc["relations"]) {
      std::vector<std::vector<bool>> adj;
      for (const auto& row : m) {
        adj.emplace_back();
        for (const auto& x : row) adj.back().push_back(x.get<int>() != 0);
      }
      rels.emplace_back(std::move(adj));
    }
  } else {
    std::mt19937_64 rng(doc["seed"].get<std::uint64_t>());
    const auto max_size = doc["max_size"].get<std::size_t>();
    for (std::size_t k = 0; k < doc["relations"].get<std::size_t>(); ++k) {
      rels.push_back(FiniteReflexiveRelation::random(1 + rng() % max_size, rng));
    }
  }
  json images = json::array();
  std::string problem;
  for (std::size_t k = 0; k < rels.size() && problem.empty(); ++k) {
    const auto emb = embed_relation(rels[k], doc["max_size"].get<std::size_t>());
    json row = json::array();
    for (std::size_t a = 0; a < rels[k].size(); ++a) {
      row.push_back(emb.images[a].to_string());
      for (std::size_t b = 0; b < rels[k].size(); ++b) {
        if (universal_rel(emb.images[a], emb.images[b]) != rels[k].related(a, b)) {
          problem = "relation " + std::to_string(k) + " not preserved at (" + std::to_string(a) + "," + std::to_string(b) + ")";
        }
      }
    }
    images.push_back(row);
  }
  result.verdicts.push_back({"embedding-exact", problem.empty(),
                             problem.empty() ? std::to_string(rels.size()) + " relations embedded" : problem});
  result.report["results"] = {{"relations", rels.size()}, {"images", images}};
}

// Every finite description over indices < bound with at most `max` pairs.
std::vector<FiniteAssignment> small_descriptions(Index bound, std::size_t max) {
  std::vector<FiniteAssignment> out;
  std::vector<int> state(bound, 0);  // 0 absent, 1 -> bit 0, 2 -> bit 1
  while (true) {
    std::vector<Assignment> pairs;
    for (Index n = 0; n < bound; ++n) {
      if (state[n]) pairs.push_back({n, state[n] - 1});
    }
    if (pairs.size() <= max) out.emplace_back(std::move(pairs));
    std::size_t k = 0;
    while (k < bound && state[k] == 2) state[k++] = 0;
    if (k == bound) break;
    ++state[k];
  }
  return out;
}

void run_operators(const ExperimentConfig& config, RunResult& result) {
  const auto& doc = config.doc;
  CompileBounds bounds;
  bounds.element_bound = doc["element_bound"].get<Index>();
  bounds.max_label = doc["max_label"].get<Index>();
  const auto descriptions = small_descriptions(bounds.element_bound, doc["max_assignments"].get<std::size_t>());
  json compiled = json::array();
  for (const auto& name : doc["functionals"]) {
    const auto phi = *functional_by_name(name.get<std::string>());
    const auto w = functional_to_operator(phi, bounds);
    std::string problem;
    for (const auto& d : descriptions) {
      if (apply_to_assignment(w, d) != outputs_over_orderings(phi, d, bounds.max_label)) {
        problem = "first mismatch on a description with " + std::to_string(d.size()) + " pairs";
        break;
      }
    }
    result.verdicts.push_back({"operator-equals-orderings/" + phi.name, problem.empty(),
                               problem.empty() ? std::to_string(descriptions.size()) + " descriptions" : problem});
    compiled.push_back({{"functional", phi.name}, {"axioms", w.axioms().size()}});
  }
  result.report["results"] = {{"descriptions", descriptions.size()}, {"operators", compiled}};
}

json verdicts_json(const std::vector<Verdict>& verdicts, const json& inputs) {
  json out = json::array();
  for (const auto& v : verdicts) {
    out.push_back({{"invariant", v.invariant}, {"passed", v.passed}, {"detail", v.detail}, {"inputs", inputs}});
  }
  return out;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, const CheckOptions& checks) {
  RunResult result;
  result.report = {{"format", "gencomp-report"}, {"version", 1}, {"scenario", std::string(to_string(config.scenario))}};
  switch (config.scenario) {
    case Scenario::kSingleDiagonal:
    case Scenario::kPairDiagonal: run_diagonal(config, checks, result); break;
    case Scenario::kCodingRoundtrip: run_coding(config, result); break;
    case Scenario::kRelationEmbed: run_relations(config, result); break;
    case Scenario::kOperatorCompile: run_operators(config, result); break;
  }
  json inputs = {{"config", config.doc}};
  if (config.doc["outputs"].contains("trace") && result.trace) inputs["trace"] = config.doc["outputs"]["trace"];
  result.report["verdicts"] = verdicts_json(result.verdicts, inputs);
  result.report["passed"] = result.passed();
  return result;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw Error(ErrorKind::kRange, "cannot write " + path.string());
}

void print_verdicts(const std::vector<Verdict>& verdicts) {
  for (const auto& v : verdicts) {
    std::cout << (v.passed ? "PASS " : "FAIL ") << v.invariant;
    if (!v.detail.empty()) std::cout << ": " << v.detail;
    std::cout << '\n';
  }
}

}  // namespace

ExitCode run_experiment_file(const std::filesystem::path& config_path, const Overrides& overrides,
                             const std::filesystem::path& out_dir) {
  try {
    const auto config = with_overrides(load_config(config_path), overrides);
    const auto result = run_experiment(config);
    const auto& outputs = config.doc["outputs"];
    if (result.trace) write_file(out_dir / outputs["trace"].get<std::string>(), dump_trace(*result.trace));
    if (result.mirror) {
      auto mirror_name = std::filesystem::path(outputs["trace"].get<std::string>());
      mirror_name.replace_filename(mirror_name.stem().string() + "-rightmost" + mirror_name.extension().string());
      write_file(out_dir / mirror_name, dump_trace(*result.mirror));
    }
    write_file(out_dir / outputs["report"].get<std::string>(), result.report.dump(1) + "\n");
    if (outputs.contains("csv") && !result.csv.empty()) write_file(out_dir / outputs["csv"].get<std::string>(), result.csv);
    print_verdicts(result.verdicts);
    return result.passed() ? ExitCode::kPass : ExitCode::kInvariant;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const json::exception& e) {
    std::cerr << "error: parse error: " << e.what() << '\n';
    return ExitCode::kParse;
  }
}

std::vector<Verdict> verify_trace(const Trace& trace, const CheckOptions& checks) {
  std::vector<Verdict> out;
  if (trace.config.is_object() && !trace.config.empty()) {
    Verdict replay{"replay-determinism", true, "replayed from the embedded config"};
    try {
      const auto config = parse_config(trace.config);
      Trace again = run_construction(diagonal_config(config));
      again.config = trace.config;
      if (dump_trace(again) != dump_trace(trace)) replay = {"replay-determinism", false, "replay differs from the trace"};
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kBudget) throw;
      replay = {"replay-determinism", false, std::string("replay failed: ") + e.what()};
    }
    out.push_back(replay);
  } else {
    out.push_back({"replay-determinism", true, "no embedded config; replay skipped"});
  }
  for (auto& v : check_trace(trace, checks)) out.push_back(std::move(v));
  return out;
}

ExitCode verify_trace_file(const std::filesystem::path& trace_path) {
  try {
    std::ifstream in(trace_path);
    if (!in) throw Error(ErrorKind::kParse, "cannot read trace " + trace_path.string());
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kParse, "trace is not JSON: " + std::string(e.what()));
    }
    const auto verdicts = verify_trace(trace_from_json(doc));
    print_verdicts(verdicts);
    const bool ok = std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
    return ok ? ExitCode::kPass : ExitCode::kInvariant;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
}

}  // namespace gencomp
