// pybind11 surface. Rationals cross as (num, den) tuples; JSON documents
// cross as strings and are parsed on the Python side.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gencomp/codings.hpp"
#include "gencomp/density.hpp"
#include "gencomp/diagonal.hpp"
#include "gencomp/enumops.hpp"
#include "gencomp/error.hpp"
#include "gencomp/harness.hpp"
#include "gencomp/relations.hpp"

namespace py = pybind11;
using namespace gencomp;

namespace {

std::pair<std::int64_t, std::int64_t> frac(const Rational& r) { return {r.numerator(), r.denominator()}; }

Membership members_of(const std::vector<bool>& v) {
  return [v](Index n) { return n < v.size() && v[n]; };
}

RealSpec real_from(py::object spec) {
  if (py::isinstance<py::int_>(spec)) return RealSpec::seeded(spec.cast<std::uint64_t>());
  return RealSpec::eventually_periodic({}, BitPrefix::parse(spec.cast<std::string>()));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "generic-computability experiment kernel";

  // Messages start with the error kind, e.g. "parse error: ...".
  py::register_exception<Error>(m, "GencompError", PyExc_ValueError);

  m.def("seeded_bits", [](std::uint64_t seed, Index count) {
    const auto x = RealSpec::seeded(seed);
    std::string s;
    for (Index n = 0; n < count; ++n) s += static_cast<char>('0' + x.bit(n));
    return s;
  }, py::arg("seed"), py::arg("count"));

  m.def("prefix_density", [](const std::vector<bool>& member, Index n) { return frac(prefix_density(members_of(member), n)); },
        py::arg("member"), py::arg("n"));
  m.def("gap_census", [](const std::vector<bool>& member, unsigned i_max) {
    return gap_census(members_of(member), i_max).max_gaps();
  }, py::arg("member"), py::arg("i_max"));
  m.def("density_threshold", [](const std::vector<bool>& member, unsigned i_max, unsigned e, Index n_max) {
    return density_threshold(gap_census(members_of(member), i_max), e, n_max);
  }, py::arg("member"), py::arg("i_max"), py::arg("e"), py::arg("n_max"));
  m.def("gap_density_upper", [](unsigned i, unsigned e) { return frac(gap_density_upper(i, e)); });
  m.def("gap_only_set", [](const std::vector<std::optional<unsigned>>& gaps) { return gap_only_set(gaps).ranges(); });

  m.def("encode_R", [](py::object x, Index n) { return encode_R(real_from(x), n); });
  m.def("encode_Rtilde", [](py::object x, Index n) { return encode_Rtilde(real_from(x), n); });
  m.def("asymmetric_join_bit", [](py::object a, py::object b, Index n) {
    return asymmetric_join_bit(real_from(a), real_from(b), n);
  });
  m.def("decode_R", [](const std::map<Index, int>& d, unsigned m_bit, Index bound) {
    std::vector<Assignment> pairs;
    for (const auto& [n, x] : d) pairs.push_back({n, x});
    return decode_R(GenericDescription::from_pairs(pairs), m_bit, bound);
  }, py::arg("description"), py::arg("m"), py::arg("bound"));
  m.def("decode_Rtilde", [](const std::map<Index, int>& d, unsigned m_bit, Index bound) {
    std::vector<Assignment> pairs;
    for (const auto& [n, x] : d) pairs.push_back({n, x});
    return decode_Rtilde(GenericDescription::from_pairs(pairs), m_bit, bound);
  }, py::arg("description"), py::arg("m"), py::arg("bound"));

  m.def("stage_interval", [](unsigned s) {
    const auto iv = stage_interval(s);
    return std::make_pair(iv.lo, iv.hi);
  });
  m.def("universal_rel", [](Index i, Index j) { return universal_rel(i, j); });
  m.def("embed_relation", [](const std::vector<std::vector<bool>>& adjacency) {
    std::vector<std::string> out;
    for (const auto& e : embed_relation(FiniteReflexiveRelation(adjacency)).images) out.push_back(e.to_string());
    return out;
  });
  m.def("cantor_pair", &cantor_pair);
  m.def("cantor_unpair", &cantor_unpair);

  m.def("functional_names", [] {
    std::vector<std::string> names;
    for (const auto& f : functional_battery()) names.push_back(f.name);
    return names;
  });
  m.def("compile_functional", [](const std::string& name, Index element_bound, Index max_label) {
    const auto phi = functional_by_name(name);
    if (!phi) throw Error(ErrorKind::kParse, "unknown functional '" + name + "'");
    CompileBounds b;
    b.element_bound = element_bound;
    b.max_label = max_label;
    std::vector<std::pair<Index, std::vector<Index>>> axioms;
    const auto op = functional_to_operator(*phi, b);
    for (const auto& a : op.axioms()) axioms.emplace_back(a.output, a.premise);
    return axioms;
  }, py::arg("name"), py::arg("element_bound") = 4, py::arg("max_label") = 3);

  m.def("catalog", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& a : builtin_adversaries()) out.emplace_back(a.name, a.summary);
    return out;
  });
  m.def("run_config", [](const std::string& doc) {
    const auto r = run_experiment(parse_config(nlohmann::json::parse(doc)));
    return std::make_tuple(r.report.dump(), r.trace ? dump_trace(*r.trace) : std::string(), r.passed());
  }, py::arg("config_json"),
        "Runs a config document; returns (report JSON, trace JSON or '', all verdicts passed).");
  m.def("verify_trace", [](const std::string& doc) {
    std::vector<std::tuple<std::string, bool, std::string>> out;
    for (const auto& v : verify_trace(trace_from_json(nlohmann::json::parse(doc))))
      out.emplace_back(v.invariant, v.passed, v.detail);
    return out;
  }, py::arg("trace_json"));
}
