#include "paraverify/cti.hpp"

#include <algorithm>
#include <stdexcept>

#include "paraverify/solver.hpp"
#include "paraverify/symmetry.hpp"

namespace paraverify {

namespace {

// Post-state value of a variable: a constant, or a pre-state variable.
struct PostValue {
  bool isVar = true;
  int value = 0;
};

PostValue postOf(const std::vector<GAssign>& action, int var) {
  for (const auto& a : action)
    if (a.target == var) return {a.fromVar, a.value};
  return {true, var};
}

}  // namespace

std::optional<IndObligation> buildIndObligation(const ConcreteProtocol& p, int rule,
                                                const Clause& invariant) {
  const GroundRule& r = p.rules[rule];
  std::vector<int> fvars;
  for (const auto& l : invariant.lits) {
    fvars.push_back(l.var);
    if (l.rhsVar) fvars.push_back(l.rhs);
  }
  std::sort(fvars.begin(), fvars.end());
  fvars.erase(std::unique(fvars.begin(), fvars.end()), fvars.end());
  bool touches = false;
  for (int v : fvars) touches |= r.assigns(v);
  if (!touches) return std::nullopt;

  IndObligation o;
  o.rule = rule;
  o.invariant = invariant;
  o.guardPart = r.guard;
  o.actionPart = r.action;
  for (int v : fvars)
    if (!r.assigns(v)) o.framePart.push_back(v);
  o.negGoal = invariant.lits;
  return o;
}

std::optional<std::vector<GLit>> IndObligation::pullBack() const {
  std::vector<GLit> out;
  for (const auto& l : negGoal) {
    const PostValue a = postOf(actionPart, l.var);
    const PostValue b = l.rhsVar ? postOf(actionPart, l.rhs) : PostValue{false, l.rhs};
    if (!a.isVar && !b.isVar) {
      if ((a.value == b.value) != l.equal) return std::nullopt;
      continue;
    }
    if (a.isVar && b.isVar && a.value == b.value) {
      if (!l.equal) return std::nullopt;
      continue;
    }
    GLit g;
    g.equal = l.equal;
    if (a.isVar) {
      g.var = a.value;
      g.rhsVar = b.isVar;
      g.rhs = b.value;
    } else {
      g.var = b.value;
      g.rhsVar = false;
      g.rhs = a.value;
    }
    out.push_back(g);
  }
  return out;
}

bool BlockedAssertionStore::add(const Clause& canonical) {
  if (!index_.insert(canonical).second) return false;
  clauses_.push_back(canonical);
  return true;
}

std::optional<EquationSet> solveObligation(const ConcreteProtocol& p, const IndObligation& o,
                                           const BlockedAssertionStore& blocked,
                                           SolveStats* stats) {
  const GroundRule& r = p.rules[o.rule];
  if (!r.satisfiable) return std::nullopt;
  auto goal = o.pullBack();
  if (!goal) return std::nullopt;

  std::vector<int> domains;
  domains.reserve(p.vars.size());
  for (const auto& v : p.vars.vars()) domains.push_back(v.domain);
  FiniteDomainSolver solver(std::move(domains));
  for (const auto& l : o.guardPart) solver.require(l);
  for (const auto& l : *goal) solver.require(l);
  for (const auto& c : blocked.clauses()) solver.addClause(c);

  std::vector<int> order;
  auto note = [&](int v) {
    if (std::find(order.begin(), order.end(), v) == order.end()) order.push_back(v);
  };
  const std::vector<GLit>& pulled = *goal;
  for (const std::vector<GLit>* part : {&o.guardPart, &pulled})
    for (const auto& l : *part) {
      note(l.var);
      if (l.rhsVar) note(l.rhs);
    }

  std::optional<State> s = solver.solve(order);
  if (stats) stats->nodes += solver.nodes();
  if (!s) return std::nullopt;
  EquationSet sol;
  for (int v : order) sol.eqs.push_back({v, (*s)[v]});
  return sol;
}

Clause candidateInvariant(const GroundVarTable& vars, const EquationSet& sol) {
  if (sol.empty()) throw std::invalid_argument("empty solution denotes false");
  Clause c;
  for (const auto& e : sol.eqs) c.lits.push_back(GLit{e.var, true, false, e.value});
  return canonicalForm(vars, std::move(c));
}

std::size_t blockAssertion(const GroundVarTable& vars, const Clause& inv,
                           const std::vector<Clause>& symmetries, BlockedAssertionStore& store) {
  std::size_t added = store.add(canonicalForm(vars, inv)) ? 1 : 0;
  for (const auto& s : symmetries) added += store.add(canonicalForm(vars, s)) ? 1 : 0;
  return added;
}

}  // namespace paraverify
