#include <cstdio>
#include <initializer_list>

#include "gencomp/diagonal.hpp"
#include "gencomp/error.hpp"

namespace gencomp {

using nlohmann::json;

namespace {

json node_json(const Node& n, Mode mode) {
  json j = {{"sigma", n.sigma.to_string()}};
  if (mode == Mode::kPair) j["tau"] = n.tau.to_string();
  return j;
}

json ranges_json(const IntervalSet& s) {
  json out = json::array();
  for (const auto& [lo, hi] : s.ranges()) out.push_back({lo, hi});
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::kParse, "trace: " + what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object()) bad(std::string("expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing '") + key + "'");
  return *it;
}

void only_keys(const json& j, std::initializer_list<const char*> keys) {
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* allowed : keys) known = known || k == allowed;
    if (!known) bad("unknown field '" + k + "'");
  }
}

template <typename T>
T integer(const json& j, const char* what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    bad(std::string(what) + " is not a nonnegative integer");
  }
  return static_cast<T>(j.get<std::uint64_t>());
}

std::string text(const json& j, const char* what) {
  if (!j.is_string()) bad(std::string(what) + " is not a string");
  return j.get<std::string>();
}

BitPrefix bits(const json& j, const char* what) {
  try {
    return BitPrefix::parse(text(j, what));
  } catch (const Error&) {
    bad(std::string(what) + " is not a bit string");
  }
}

Node parse_node(const json& j, Mode mode) {
  if (mode == Mode::kSingle) {
    only_keys(j, {"sigma"});
    return Node::single(bits(field(j, "sigma"), "sigma"));
  }
  only_keys(j, {"sigma", "tau"});
  return Node::pair(bits(field(j, "sigma"), "sigma"), bits(field(j, "tau"), "tau"));
}

IntervalSet parse_ranges(const json& j) {
  if (!j.is_array()) bad("ranges must be an array");
  IntervalSet out;
  Index last = 0;
  bool first = true;
  for (const auto& r : j) {
    if (!r.is_array() || r.size() != 2) bad("range must be [lo, hi]");
    const auto lo = integer<Index>(r[0], "range lo");
    const auto hi = integer<Index>(r[1], "range hi");
    if (lo >= hi || (!first && lo <= last)) bad("ranges must be nonempty, sorted and disjoint");
    out.insert(lo, hi);
    last = hi;
    first = false;
  }
  return out;
}

Mode parse_mode(const json& j) {
  const auto s = text(j, "mode");
  if (s == "single") return Mode::kSingle;
  if (s == "pair") return Mode::kPair;
  bad("unknown mode '" + s + "'");
}

Side parse_side(const json& j) {
  const auto s = text(j, "side");
  if (s == "phi") return Side::kPhi;
  if (s == "psi") return Side::kPsi;
  bad("unknown side '" + s + "'");
}

StrategyStatus parse_status(const json& j) {
  const auto s = text(j, "status");
  for (auto st : {StrategyStatus::kWaiting, StrategyStatus::kActed, StrategyStatus::kDied, StrategyStatus::kDead}) {
    if (s == to_string(st)) return st;
  }
  bad("unknown status '" + s + "'");
}

}  // namespace

json to_json(const Trace& trace) {
  json j;
  j["format"] = "gencomp-trace";
  j["version"] = Trace::kVersion;
  j["mode"] = std::string(to_string(trace.mode));
  j["stages"] = trace.stages;
  j["config"] = trace.config.is_null() ? json::object() : trace.config;
  json strategies = json::array();
  for (unsigned e = 0; e < trace.strategy_count(); ++e) {
    strategies.push_back({{"opponent", trace.opponents[e]}, {"selector", trace.selectors.at(e)}});
  }
  j["strategies"] = strategies;

  json log = json::array();
  for (const auto& rec : trace.log) {
    json r;
    r["stage"] = rec.stage;
    r["enumerations"] = json::array();
    for (const auto& en : rec.enumerations) {
      r["enumerations"].push_back({{"strategy", en.strategy}, {"added", ranges_json(en.added)}});
    }
    r["strategies"] = json::array();
    for (const auto& st : rec.strategies) {
      json s = {{"strategy", st.strategy}, {"status", std::string(to_string(st.status))}};
      if (st.level) s["level"] = *st.level;
      if (st.level_hash) s["level_hash"] = hex64(*st.level_hash);
      if (st.path) s["path"] = {{"head", node_json(st.path->head, trace.mode)}, {"tail", st.path->tail}};
      if (st.marker) s["marker"] = node_json(*st.marker, trace.mode);
      r["strategies"].push_back(s);
    }
    r["rules"] = json::array();
    for (const auto& rule : rec.rules) {
      r["rules"].push_back({{"strategy", rule.strategy},
                            {"stage", rule.stage},
                            {"side", std::string(to_string(rule.side))},
                            {"node", node_json(rule.node, trace.mode)}});
    }
    r["traps"] = json::array();
    for (const auto& t : rec.traps) {
      r["traps"].push_back({{"strategy", t.strategy}, {"trap_stage", t.trap_stage}, {"witness", t.witness}});
    }
    log.push_back(r);
  }
  j["log"] = log;
  return j;
}

std::string dump_trace(const Trace& trace) { return to_json(trace).dump(1) + "\n"; }

Trace trace_from_json(const json& j) {
  if (!j.is_object()) bad("top level must be an object");
  only_keys(j, {"format", "version", "mode", "stages", "config", "strategies", "log"});
  if (text(field(j, "format"), "format") != "gencomp-trace") bad("format is not gencomp-trace");
  if (integer<int>(field(j, "version"), "version") != Trace::kVersion) bad("unsupported version");

  Trace t;
  t.mode = parse_mode(field(j, "mode"));
  t.stages = integer<Stage>(field(j, "stages"), "stages");
  if (t.stages > DiagonalConfig::kMaxStages) bad("too many stages");
  t.config = field(j, "config");
  if (!t.config.is_object()) bad("config must be an object");

  const auto& strategies = field(j, "strategies");
  if (!strategies.is_array()) bad("strategies must be an array");
  for (const auto& s : strategies) {
    only_keys(s, {"opponent", "selector"});
    t.opponents.push_back(text(field(s, "opponent"), "opponent"));
    t.selectors.push_back(text(field(s, "selector"), "selector"));
  }
  const unsigned count = t.strategy_count();

  const auto& log = field(j, "log");
  if (!log.is_array() || log.size() != t.stages) bad("log must hold one record per stage");
  for (std::size_t k = 0; k < log.size(); ++k) {
    const auto& r = log[k];
    only_keys(r, {"stage", "enumerations", "strategies", "rules", "traps"});
    StageRecord rec;
    rec.stage = integer<Stage>(field(r, "stage"), "stage");
    if (rec.stage != k) bad("stage records out of order");

    for (const auto& en : field(r, "enumerations")) {
      only_keys(en, {"strategy", "added"});
      EnumerationRecord er{integer<unsigned>(field(en, "strategy"), "strategy"), parse_ranges(field(en, "added"))};
      if (er.strategy >= count) bad("enumeration for an unknown strategy");
      rec.enumerations.push_back(std::move(er));
    }
    for (const auto& s : field(r, "strategies")) {
      only_keys(s, {"strategy", "status", "level", "level_hash", "path", "marker"});
      StrategyStageRecord sr;
      sr.strategy = integer<unsigned>(field(s, "strategy"), "strategy");
      if (sr.strategy >= count) bad("record for an unknown strategy");
      sr.status = parse_status(field(s, "status"));
      if (s.contains("level")) sr.level = integer<std::size_t>(s["level"], "level");
      if (s.contains("level_hash")) {
        const auto h = text(s["level_hash"], "level_hash");
        if (h.size() != 16 || h.find_first_not_of("0123456789abcdef") != std::string::npos) bad("bad level_hash");
        sr.level_hash = std::stoull(h, nullptr, 16);
      }
      if (s.contains("path")) {
        const auto& p = s["path"];
        only_keys(p, {"head", "tail"});
        sr.path = PathApprox{parse_node(field(p, "head"), t.mode), integer<int>(field(p, "tail"), "tail")};
        if (sr.path->tail > max_digit(t.mode)) bad("path tail out of range");
      }
      if (s.contains("marker")) sr.marker = parse_node(s["marker"], t.mode);
      rec.strategies.push_back(std::move(sr));
    }
    for (const auto& rule : field(r, "rules")) {
      only_keys(rule, {"strategy", "stage", "side", "node"});
      GapRule g{integer<unsigned>(field(rule, "strategy"), "strategy"), integer<Stage>(field(rule, "stage"), "stage"),
                parse_node(field(rule, "node"), t.mode), parse_side(field(rule, "side"))};
      if (g.stage != rec.stage) bad("rule filed under the wrong stage");
      if (g.strategy >= count) bad("rule for an unknown strategy");
      rec.rules.push_back(std::move(g));
    }
    for (const auto& trap : field(r, "traps")) {
      only_keys(trap, {"strategy", "trap_stage", "witness"});
      rec.traps.push_back({integer<unsigned>(field(trap, "strategy"), "strategy"),
                           integer<Stage>(field(trap, "trap_stage"), "trap_stage"),
                           integer<Index>(field(trap, "witness"), "witness")});
    }
    t.log.push_back(std::move(rec));
  }
  return t;
}

}  // namespace gencomp
