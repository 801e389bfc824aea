// Acceptance suite: one PASS/FAIL line per criterion, each under its own
// time limit. Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gencomp/codings.hpp"
#include "gencomp/density.hpp"
#include "gencomp/diagonal.hpp"
#include "gencomp/enumops.hpp"
#include "gencomp/error.hpp"
#include "gencomp/harness.hpp"
#include "gencomp/relations.hpp"
#include "oracles.hpp"

using namespace gencomp;
using nlohmann::json;

namespace {

// Collects the first failure of a criterion; later ones add nothing.
struct Outcome {
  bool ok = true;
  std::string why;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      why = what;
    }
  }
};

int failures = 0;

void criterion(int number, double limit_s, const char* title, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.expect(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.expect(secs < limit_s, "took " + std::to_string(secs) + " s, limit " + std::to_string(limit_s) + " s");
  std::printf("criterion %2d: %s  %-52s %7.3f s (limit %g s)%s%s\n", number, out.ok ? "PASS" : "FAIL", title, secs,
              limit_s, out.ok ? "" : "  -- ", out.why.c_str());
  std::fflush(stdout);
  if (!out.ok) ++failures;
}

std::vector<bool> to_vector(const IntervalSet& s, Index horizon) {
  std::vector<bool> v(horizon);
  for (Index n = 0; n < horizon; ++n) v[n] = s.contains(n);
  return v;
}

// The 200 gap-only sets shared by criteria 1 and 2.
std::vector<std::vector<std::optional<unsigned>>> gap_patterns() {
  std::mt19937_64 rng(20240601);
  std::vector<std::vector<std::optional<unsigned>>> out;
  for (int k = 0; k < 200; ++k) out.push_back(random_gap_pattern(rng, 14));
  return out;
}

// Builds a trace, keeping a second run for the replay criterion.
struct Replays {
  std::vector<std::string> mismatches;
  int runs = 0;

  Trace run(const DiagonalConfig& c, const std::string& label) {
    const auto t = run_construction(c);
    ++runs;
    if (dump_trace(t) != dump_trace(run_construction(c))) mismatches.push_back(label);
    return t;
  }
};

Replays replays;

std::string failed_verdicts(const std::vector<Verdict>& vs) {
  std::string s;
  for (const auto& v : vs)
    if (!v.passed) s += v.invariant + " (" + v.detail + ") ";
  return s;
}

const Verdict* find_verdict(const std::vector<Verdict>& vs, const std::string& name) {
  for (const auto& v : vs)
    if (v.invariant == name) return &v;
  return nullptr;
}

// Everything phi emits over every order and labelling of `pairs`.
void orderings(const FunctionalSpec& phi, const std::vector<Assignment>& pairs, Index max_label,
               std::vector<Triple>& seq, std::vector<bool>& used, std::set<Assignment>& out) {
  if (seq.size() >= phi.use_bound) return;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (used[k]) continue;
    used[k] = true;
    for (Index l = 0; l <= max_label; ++l) {
      seq.push_back({pairs[k].n, pairs[k].x, l});
      for (const auto& a : phi.on_read(seq)) out.insert(a);
      orderings(phi, pairs, max_label, seq, used, out);
      seq.pop_back();
    }
    used[k] = false;
  }
}

}  // namespace

int main() {
  const auto patterns = gap_patterns();
  const Index h14 = Index{1} << 14;

  criterion(1, 10, "gap bound law, 200 gap-only sets below 2^14", [&](Outcome& out) {
    for (const auto& gaps : patterns) {
      const auto set = gap_only_set(gaps);
      const auto census = gap_census([&](Index n) { return set.contains(n); }, 14);
      const auto ends = density_profile([&](Index n) { return set.contains(n); }, h14);
      for (unsigned i = 0; i < 14; ++i) {
        for (unsigned e = 0; e <= i; ++e) {
          if (!census.has_gap(i, e)) continue;
          out.expect(ends.values.at(Index{2} << i) <= gap_density_upper(i, e),
                     "density bound fails at i=" + std::to_string(i) + " e=" + std::to_string(e));
        }
      }
    }
  });

  criterion(2, 10, "census equals a suffix-scan recount on the same sets", [&](Outcome& out) {
    for (const auto& gaps : patterns) {
      const auto set = gap_only_set(gaps);
      const auto member = to_vector(set, h14);
      const auto census = gap_census([&](Index n) { return static_cast<bool>(member[n]); }, 14);
      for (unsigned i = 0; i < 14; ++i) {
        out.expect(census.max_gap(i) == oracle::max_gap(member, i), "census differs at block " + std::to_string(i));
        out.expect(census.max_gap(i) == gaps[i], "census misses the planted gap at block " + std::to_string(i));
      }
    }
  });

  criterion(3, 10, "intersection inequality, n <= 2^12, 100 seeded pairs", [&](Outcome& out) {
    const Index h = Index{1} << 12;
    const Rational one(1);
    for (std::uint64_t k = 0; k < 100; ++k) {
      // Thin reals (AND of seeded bits) push the bound into its interesting range.
      const auto a1 = RealSpec::seeded(2 * k), a2 = RealSpec::seeded(2 * k + 1000);
      const auto b1 = RealSpec::seeded(2 * k + 1), b2 = RealSpec::seeded(2 * k + 5000);
      const bool thin = k % 2 == 1;
      const Membership a = [&](Index n) { return a1.bit(n) == 1 && (!thin || a2.bit(n) == 1); };
      const Membership b = [&](Index n) { return b1.bit(n) == 1 || (thin && b2.bit(n) == 1); };
      const Membership ab = [&](Index n) { return a(n) && b(n); };
      const auto pa = density_profile(a, h), pb = density_profile(b, h), pab = density_profile(ab, h);
      for (Index n = 1; n <= h; ++n) {
        out.expect(pab.values.at(n) >= pa.values.at(n) + pb.values.at(n) - one,
                   "inequality fails at n=" + std::to_string(n) + " pair " + std::to_string(k));
      }
    }
  });

  criterion(4, 10, "R round trip (m <= 12) and robust decoding (m <= 8)", [&](Outcome& out) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto x = RealSpec::seeded(seed);
      const auto d = CodedReal::r_of(x).full_description(h14);
      for (unsigned m = 0; m <= 12; ++m)
        out.expect(decode_R(d, m, h14) == std::optional<int>(x.bit(m)), "round trip, seed " + std::to_string(seed));
    }
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 100; ++trial) {
      const auto x = RealSpec::seeded(rng());
      const auto r = CodedReal::r_of(x);
      // Gaps no larger than 2^{-10} on the blocks from 10 up, anything else intact.
      std::vector<std::optional<unsigned>> gaps(14);
      for (unsigned i = 10; i < 14; ++i)
        if (rng() % 4) gaps[i] = 10 + static_cast<unsigned>(rng() % (i - 9));
      const auto keep = gap_only_set(gaps);
      const auto census = gap_census([&](Index n) { return keep.contains(n); }, 14);
      out.expect(census.max_gaps() == gaps, "census disagrees with the planted gaps");
      const auto desc = GenericDescription::restricted([&](Index n) { return r.bit(n); },
                                                       [&](Index n) { return n >= 1 && keep.contains(n); });
      for (unsigned m = 0; m <= 8; ++m)
        out.expect(decode_R(desc, m, h14) == std::optional<int>(x.bit(m)), "robust decode fails at m=" + std::to_string(m));
    }
  });

  criterion(5, 5, "R-tilde finite loss below 2^13, strict power below", [&](Outcome& out) {
    const auto x = RealSpec::seeded(77);
    out.expect(encode_Rtilde(x, 8) == x.bit(2), "n=8 should carry bit 2");
    out.expect(encode_Rtilde(x, 9) == x.bit(3), "n=9 should carry bit 3");
    out.expect(encode_Rtilde(x, 2) == x.bit(0), "n=2 should carry bit 0");
    out.expect(encode_Rtilde(x, 16) == x.bit(3), "n=16 should carry bit 3");
    const Index h = Index{1} << 13;
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 100; ++trial) {
      const auto y = RealSpec::seeded(rng());
      const auto rt = CodedReal::rtilde_of(y);
      std::vector<bool> missing(h + 1, false);
      for (int k = 0; k < 64; ++k) missing[2 + rng() % (h - 1)] = true;
      if (trial % 3 == 0) {
        const unsigned w = rng() % 8;
        for (Index n = (Index{1} << w) + 1; n <= (Index{2} << w); ++n) missing[n] = true;
      }
      const auto d = GenericDescription::restricted([&](Index n) { return rt.bit(n); },
                                                    [&](Index n) { return n >= 2 && n <= h && !missing[n]; });
      for (unsigned m = 0; (Index{2} << m) <= h; ++m) {
        bool meets = false;
        for (Index n = (Index{1} << m) + 1; n <= (Index{2} << m); ++n) meets = meets || !missing[n];
        const auto got = decode_Rtilde(d, m, h);
        out.expect(meets ? got == std::optional<int>(y.bit(m)) : !got.has_value(),
                   "bit " + std::to_string(m) + " of trial " + std::to_string(trial));
      }
    }
  });

  criterion(6, 60, "universal relation: ids <= 10^4, stages <= 2, embeddings", [&](Outcome& out) {
    const UniversalRelation u;
    const Index top = 10000;
    for (Index k = 0; k <= top; ++k) out.expect(u.related(k, k), "not reflexive at " + std::to_string(k));
    std::vector<Index> lows{1, 5, 1029, top + 1};
    for (std::size_t s = 0; s + 1 < lows.size(); ++s)
      for (Index i = lows[s]; i < lows[s + 1]; ++i)
        for (Index j = lows[s]; j < lows[s + 1]; ++j)
          if (i != j && u.related(i, j)) out.expect(false, "same-stage pair " + std::to_string(i) + "," + std::to_string(j));
    for (unsigned s = 1; s <= 2; ++s) {
      const auto old_hi = u.stage_interval(s - 1).hi;
      const auto fresh = u.stage_interval(s);
      std::set<std::vector<bool>> combos;
      for (Index id = fresh.lo; id < fresh.hi; ++id) {
        std::vector<bool> c;
        for (Index o = 0; o < old_hi; ++o) {
          c.push_back(u.related(o, id));
          c.push_back(u.related(id, o));
        }
        combos.insert(c);
      }
      out.expect(combos.size() == fresh.size() && fresh.size() == (Index{1} << (2 * old_hi)),
                 "stage " + std::to_string(s) + " misses an extension");
    }
    std::mt19937_64 rng(6);
    for (int k = 0; k < 200; ++k) {
      const auto r = FiniteReflexiveRelation::random(1 + rng() % 8, rng);
      const auto e = embed_relation(r);
      for (std::size_t a = 0; a < r.size(); ++a)
        for (std::size_t b = 0; b < r.size(); ++b)
          out.expect(r.related(a, b) == universal_rel(e.images[a], e.images[b]), "embedding breaks a pair");
    }
  });

  criterion(7, 60, "single mode: hand run, prefix determinism, trap checks", [&](Outcome& out) {
    auto silent = std::make_shared<ScriptedOpponent>(Enumerator::empty(), "silent");
    DiagonalConfig hand;
    hand.stages = 5;
    hand.strategies.push_back({silent, PathSelector::leftmost()});
    const auto t = replays.run(hand, "hand");
    const auto m = t.markers(0);
    const std::vector<std::string> want{"", "0", "00", "000"};
    out.expect(m.size() == 4, "expected four markers");
    for (std::size_t k = 0; k < m.size() && k < 4; ++k)
      out.expect(m[k].node.sigma.to_string() == want[k] && m[k].stage == k + 1, "marker " + std::to_string(k));
    const auto ones = t.final_table().members({Node::single(BitPrefix::parse("1")), 1}, Side::kPhi);
    for (Index n = 1; n < 32; ++n) out.expect(ones.contains(n) == (n != 2 && n != 3), "phi of 1^w at " + std::to_string(n));

    // Ten stages against the springer and friends; every length-10 prefix checked.
    DiagonalConfig ten;
    ten.stages = 10;
    for (const char* name : {"trap-springer", "silent", "cautious-copier"})
      ten.strategies.push_back({make_adversary(name), PathSelector::leftmost()});
    CheckOptions opts;
    opts.exhaustive_prefix_stages = 10;
    const auto tt = replays.run(ten, "ten-stage");
    const auto v10 = check_trace(tt, opts);
    const auto* pd = find_verdict(v10, "prefix-determinism");
    out.expect(pd && pd->passed && pd->detail.find("exhaustive") != std::string::npos,
               "prefix determinism: " + (pd ? pd->detail : std::string("missing")));
    out.expect(failed_verdicts(v10).empty(), failed_verdicts(v10));

    for (const char* sel : {"leftmost", "rightmost"}) {
      DiagonalConfig springers;
      springers.stages = 14;
      for (int k = 0; k < 3; ++k)
        springers.strategies.push_back({make_adversary("trap-springer"),
                                        std::string(sel) == "leftmost" ? PathSelector::leftmost()
                                                                       : PathSelector::rightmost()});
      const auto ts = replays.run(springers, std::string("springers-") + sel);
      bool sprung = false;
      for (unsigned e = 0; e < 3; ++e)
        for (Stage s = 0; s < ts.stages; ++s) sprung = sprung || trap_status(ts, e, s) == TrapStatus::kSprung;
      out.expect(sprung, "no trap was sprung");
      const auto vs = check_trace(ts);
      for (const char* name : {"trap-soundness", "spoiling-completeness"}) {
        const auto* v = find_verdict(vs, name);
        out.expect(v && v->passed, std::string(name) + ": " + (v ? v->detail : "missing"));
      }
      out.expect(failed_verdicts(vs).empty(), failed_verdicts(vs));
    }
  });

  criterion(8, 120, "pair mode: 20 stages against the catalog", [&](Outcome& out) {
    std::mt19937_64 rng(8);
    for (int run = 0; run < 3; ++run) {
      DiagonalConfig c;
      c.mode = Mode::kPair;
      c.stages = 20;
      std::vector<std::string> names{"cautious-copier", "trap-springer", "silent", "prefix-flooder", "random-sprinkler"};
      std::rotate(names.begin(), names.begin() + run, names.end());
      for (const auto& n : names)
        c.strategies.push_back({make_adversary(n, 100 + run), run == 1 ? PathSelector::rightmost() : PathSelector::leftmost()});
      const auto t = replays.run(c, "pair-" + std::to_string(run));
      for (unsigned e = 0; e < t.strategy_count(); ++e) {
        const bool emptied = t.died_at(e).has_value();
        const auto dips = density_dips(t.enumerated_through(e, t.stages), e, t.stages);
        out.expect(emptied || dips >= 3, "run " + std::to_string(run) + ": " + t.opponents[e] + " as e=" +
                                             std::to_string(e) + " neither died nor dipped three times");
      }
      const auto sv = check_single_victim(t);
      out.expect(sv.passed, "single victim: " + sv.detail);
    }
  });

  criterion(9, 60, "compiled operators equal the union over orderings", [&](Outcome& out) {
    const auto battery = functional_battery();
    out.expect(battery.size() >= 5, "battery too small");
    CompileBounds bounds;
    bounds.element_bound = 5;
    bounds.max_label = 3;
    std::vector<FiniteAssignment> descriptions;
    for (int code = 0; code < 243; ++code) {  // every assignment on {0..4}
      std::vector<Assignment> pairs;
      for (int n = 0, c = code; n < 5; ++n, c /= 3)
        if (c % 3) pairs.push_back({static_cast<Index>(n), c % 3 - 1});
      descriptions.emplace_back(pairs);
    }
    for (const auto& phi : battery) {
      const auto w = functional_to_operator(phi, bounds);
      for (const auto& d : descriptions) {
        std::vector<Triple> seq;
        std::vector<bool> used(d.size(), false);
        std::set<Assignment> expect;
        orderings(phi, d.pairs(), bounds.max_label, seq, used, expect);
        out.expect(apply_to_assignment(w, d) == expect, phi.name + " differs on a description");
      }
    }
  });

  criterion(10, 120, "replay determinism across the suite", [&](Outcome& out) {
    for (const auto& m : replays.mismatches) out.expect(false, "trace differs on replay: " + m);
    out.expect(replays.runs >= 7, "too few diagonal runs recorded");
    const std::vector<json> docs{
        {{"version", 1}, {"scenario", "coding-roundtrip"}, {"seed", 4}, {"reals", 20}, {"robust_sets", 5}, {"rtilde_sets", 5}},
        {{"version", 1}, {"scenario", "relation-embed"}, {"seed", 4}, {"relations", 20}},
        {{"version", 1}, {"scenario", "operator-compile"}, {"max_assignments", 3}, {"element_bound", 3}},
        {{"version", 1}, {"scenario", "pair-diagonal"}, {"seed", 9}, {"stages", 12},
         {"strategies", {{{"adversary", "random-sprinkler"}, {"selector", "leftmost"}},
                         {{"adversary", "cautious-copier"}, {"selector", "rightmost"}}}}}};
    for (const auto& doc : docs) {
      const auto c = parse_config(doc);
      const auto a = run_experiment(c), b = run_experiment(c);
      out.expect(a.report.dump() == b.report.dump(), std::string(to_string(c.scenario)) + " report differs");
      if (a.trace) out.expect(dump_trace(*a.trace) == dump_trace(*b.trace), "scenario trace differs");
      out.expect(a.passed(), std::string(to_string(c.scenario)) + " verdicts fail: " + failed_verdicts(a.verdicts));
    }
  });

  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
