#include "paraverify/report.hpp"

#include <sstream>

namespace paraverify {

using nlohmann::json;

namespace {

json termToJson(const ProtocolSpec& spec, const ParamInvariant& inv, const Term& t,
                const Term& other) {
  switch (t.kind) {
    case Term::Kind::Binder: return {{"binder", inv.binders[t.binder].name}};
    case Term::Kind::Var: {
      json idx = json::array();
      for (int b : t.indices) idx.push_back(inv.binders[b].name);
      return {{"var", spec.variables[t.var].name}, {"indices", idx}};
    }
    case Term::Kind::Const: break;
  }
  Sort s{SortKind::Bool, -1};
  if (other.kind == Term::Kind::Var) s = spec.variables[other.var].sort;
  return {{"const", spec.valueName(s, t.value)}};
}

json configToJson(const PipelineConfig& c) {
  return {{"strategy", c.strategy == Strategy::Decreasing ? "dec" : "inc"},
          {"heuristic", c.heuristic},
          {"symmetry", c.symmetry},
          {"final_sizes", c.finalSizes},
          {"impl_bound", c.implBound},
          {"state_limit", c.stateLimit},
          {"time_limit_seconds", c.timeLimitSeconds}};
}

}  // namespace

json invariantToJson(const ProtocolSpec& spec, const ParamInvariant& inv) {
  json binders = json::array();
  for (std::size_t i = 0; i < inv.binders.size(); ++i)
    binders.push_back({{"name", inv.binders[i].name},
                       {"type", spec.paramTypes[inv.binders[i].type]},
                       {"quantifier", inv.quantifiers[i] == Quantifier::Forall ? "forall" : "exists"}});
  json distinct = json::array();
  for (auto [a, b] : inv.distinct) distinct.push_back({inv.binders[a].name, inv.binders[b].name});
  json body = json::array();
  for (const auto& l : inv.body)
    body.push_back({{"lhs", termToJson(spec, inv, l.lhs, l.rhs)},
                    {"op", l.equal ? "=" : "~="},
                    {"rhs", termToJson(spec, inv, l.rhs, l.lhs)}});
  return {{"binders", binders}, {"distinct", distinct}, {"negated_conjunction", body}};
}

json reportToJson(const VerificationReport& r) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["protocol"] = r.protocol;
  j["outcome"] = outcomeName(r.outcome);
  j["message"] = r.message;
  json ref = json::object();
  for (std::size_t t = 0; t < r.typeNames.size(); ++t) ref[r.typeNames[t]] = r.referenceSizes[t];
  j["reference_sizes"] = ref;
  j["config"] = configToJson(r.config);
  j["parameterized_invariant_count"] = r.invariants.size();

  json invs = json::array();
  for (const auto& inv : r.invariants) {
    json e = {{"name", inv.name}, {"origin", inv.origin}, {"text", inv.text}};
    e["ast"] = invariantToJson(*r.spec, inv.invariant);
    invs.push_back(e);
  }
  j["invariants"] = invs;

  json aux = json::array();
  for (const auto& a : r.auxiliaries) {
    json sat = json::array();
    for (const auto& s : a.saturation)
      sat.push_back({{"type", r.typeNames[s.type]}, {"occurrences", s.occurrences}, {"size", s.size}});
    json groups = json::array();
    for (const auto& g : a.groups)
      groups.push_back({{"type", r.typeNames[g.type]},
                        {"value", g.value + 1},
                        {"extended_clause", g.extended},
                        {"extended_holds", g.extendedHolds},
                        {"universal_holds", g.universalHolds},
                        {"quantifier", g.quantifier == Quantifier::Forall ? "forall" : "exists"}});
    aux.push_back({{"name", a.name},
                   {"cti", {{"rule", a.rule}, {"invariant", a.target}, {"solution", a.solution}}},
                   {"generalization", {{"path", a.path}, {"checker_calls", a.checkerCalls}, {"result", a.concrete}}},
                   {"symmetric_images", a.symmetricImages},
                   {"promotion", {{"saturation", sat}, {"groups", groups}, {"result", a.promoted}, {"validated", a.validated}}}});
  }
  j["auxiliary_invariants"] = aux;

  json merges = json::array();
  for (const auto& m : r.mergeEvents) merges.push_back({{"kind", m.kind}, {"removed", m.removed}, {"kept", m.kept}});
  j["merge_events"] = merges;

  json finals = json::array();
  for (const auto& f : r.finalChecks)
    finals.push_back({{"sizes", f.sizes}, {"status", f.status}, {"note", f.note}, {"witness", f.witness}, {"rule", f.rule}});
  j["final_checks"] = finals;

  const Counts& c = r.counts;
  j["counts"] = {{"checker_calls", c.checkerCalls},
                 {"cache_hits", c.cacheHits},
                 {"generalize_checker_calls", c.generalizeCalls},
                 {"solver_calls", c.solverCalls},
                 {"obligations", c.obligations},
                 {"trivial_obligations", c.trivialObligations},
                 {"ctis", c.ctis},
                 {"blocked_assertions", c.blockedAssertions},
                 {"reachable_states", c.reachableStates}};
  j["failure"] = {{"property", r.failingProperty}, {"rule", r.failingRule}, {"witness", r.witness}};
  j["notes"] = r.notes;
  j["timings"] = r.timingsMicros;
  return j;
}

json withoutTimings(json j) {
  j.erase("timings");
  return j;
}

std::string emitReport(const VerificationReport& r, ReportFormat format) {
  if (format == ReportFormat::Json) return reportToJson(r).dump(2) + "\n";
  std::ostringstream out;
  out << "protocol " << r.protocol << ": " << outcomeName(r.outcome) << "\n";
  if (!r.message.empty()) out << "  " << r.message << "\n";
  if (r.outcome == Outcome::Unsafe) {
    out << "  violated: " << r.failingProperty << "\n  witness:  " << r.witness << "\n";
    return out.str();
  }
  if (r.outcome == Outcome::UnresolvedCti && !r.failingRule.empty())
    out << "  rule " << r.failingRule << " against " << r.failingProperty << "\n  state " << r.witness << "\n";
  out << r.invariants.size() << " parameterized invariants\n";
  for (const auto& inv : r.invariants) out << "  [" << inv.name << "] " << inv.text << "\n";
  for (const auto& a : r.auxiliaries)
    out << "  " << a.name << " <- " << a.rule << " vs " << a.target << ": " << a.concrete << " ("
        << a.path << ", " << a.checkerCalls << " checks)\n";
  for (const auto& f : r.finalChecks)
    out << "  final check " << f.sizes << ": " << f.status << (f.note.empty() ? "" : " - " + f.note) << "\n";
  out << "  checker calls " << r.counts.checkerCalls << " (generalize " << r.counts.generalizeCalls
      << "), solver calls " << r.counts.solverCalls << ", CTIs " << r.counts.ctis << ", trivial obligations "
      << r.counts.trivialObligations << "\n";
  return out.str();
}

}  // namespace paraverify
