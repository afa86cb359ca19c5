#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "paraverify/checker.hpp"
#include "paraverify/ground.hpp"

namespace paraverify {

enum class Strategy { Increasing, Decreasing };

struct GeneralizeContext {
  std::vector<Clause> known;  // pre-invariants, canonical
  EquationSet eq1;            // equality terms of `known`, first appearance order
  Strategy strategy = Strategy::Decreasing;
  bool heuristic = true;

  void addKnown(const Clause& canonical);
  bool isKnown(const Clause& canonical) const { return knownSet_.count(canonical) > 0; }
  bool inEq1(const Equation& e) const { return eqSet_.count({e.var, e.value}) > 0; }

private:
  std::set<Clause> knownSet_;
  std::set<std::pair<int, int>> eqSet_;
};

struct CheckRecord {
  EquationSet tested;
  bool passed = false;
  bool cacheHit = false;
};

struct GeneralizeResult {
  std::optional<Clause> invariant;
  std::string path;  // decreasing | increasing | heuristic | heuristic-fallback
  std::vector<CheckRecord> trace;

  std::uint64_t calls() const { return trace.size(); }
};

// Checker bound to the reference instance; every query is one checker call.
class ReferenceChecker {
public:
  ReferenceChecker(ModelChecker& mc, const ConcreteProtocol& p) : mc_(mc), p_(p) {}
  bool passes(const EquationSet& eqs, std::vector<CheckRecord>& trace);
  const ConcreteProtocol& protocol() const { return p_; }

private:
  ModelChecker& mc_;
  const ConcreteProtocol& p_;
};

std::pair<EquationSet, EquationSet> computeJoinDiff(const EquationSet& sol,
                                                    const GeneralizeContext& ctx);

GeneralizeResult simplifyAuxInvDecreasingly(const EquationSet& sol, ReferenceChecker& checker);
GeneralizeResult simplifyAuxInvIncreasingly(const EquationSet& sol, ReferenceChecker& checker);

// Regular generalization with the context's strategy.
GeneralizeResult simplifyAuxInv(const EquationSet& sol, Strategy s, ReferenceChecker& checker);

GeneralizeResult heuristicGeneralize(const EquationSet& sol, const GeneralizeContext& ctx,
                                     ReferenceChecker& checker);

// Heuristic or regular generalization as selected by the context.
GeneralizeResult generalize(const EquationSet& sol, const GeneralizeContext& ctx,
                            ReferenceChecker& checker);

// Nonempty and not already known (after canonicalization).
bool isLegal(const GroundVarTable& vars, const Clause& inv, const GeneralizeContext& ctx);

}  // namespace paraverify
