#pragma once

#include <compare>
#include <functional>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "paraverify/protocol.hpp"

namespace paraverify {

using State = std::vector<std::uint8_t>;

// Ground literal: var (=|!=) constant, or var (=|!=) var.
struct GLit {
  int var = -1;
  bool equal = true;
  bool rhsVar = false;
  int rhs = 0;

  bool holds(const State& s) const {
    const bool same = rhsVar ? s[var] == s[rhs] : s[var] == rhs;
    return same == equal;
  }

  friend bool operator==(const GLit&, const GLit&) = default;
  friend auto operator<=>(const GLit&, const GLit&) = default;
};

// A concrete invariant !(l1 & ... & lW). The empty clause denotes false.
struct Clause {
  std::vector<GLit> lits;

  bool holds(const State& s) const {
    for (const auto& l : lits)
      if (!l.holds(s)) return true;
    return false;
  }
  bool empty() const { return lits.empty(); }

  friend bool operator==(const Clause&, const Clause&) = default;
  friend auto operator<=>(const Clause&, const Clause&) = default;
};

using ConcreteInvariant = Clause;

// Disjunction of clauses; ground form of a quantified invariant instance.
// An empty disjunction is false.
struct GroundConstraint {
  std::vector<Clause> alternatives;

  bool holds(const State& s) const {
    for (const auto& c : alternatives)
      if (c.holds(s)) return true;
    return false;
  }

  friend bool operator==(const GroundConstraint&, const GroundConstraint&) = default;
  friend auto operator<=>(const GroundConstraint&, const GroundConstraint&) = default;
};

struct Equation {
  int var = -1;
  int value = 0;

  friend bool operator==(const Equation&, const Equation&) = default;
  friend auto operator<=>(const Equation&, const Equation&) = default;
};

// Ordered, duplicate-free list of pre-state equalities.
struct EquationSet {
  std::vector<Equation> eqs;

  std::size_t size() const { return eqs.size(); }
  bool empty() const { return eqs.empty(); }
  friend bool operator==(const EquationSet&, const EquationSet&) = default;
};

struct GAssign {
  int target = -1;
  bool fromVar = false;
  int value = 0;  // constant, or source variable when fromVar
};

struct GroundRule {
  int rule = -1;
  std::vector<int> binderValues;  // 0-based, formal parameters only
  std::string name;               // e.g. crit(1)
  std::vector<GLit> guard;
  bool satisfiable = true;  // false when a guard literal grounds to false
  std::vector<GAssign> action;

  bool enabled(const State& s) const {
    if (!satisfiable) return false;
    for (const auto& l : guard)
      if (!l.holds(s)) return false;
    return true;
  }
  State apply(const State& s) const {
    State next = s;
    for (const auto& a : action) next[a.target] = a.fromVar ? s[a.value] : a.value;
    return next;
  }
  bool assigns(int var) const {
    for (const auto& a : action)
      if (a.target == var) return true;
    return false;
  }
};

struct PropertyInstance {
  int property = -1;
  std::vector<int> binderValues;
  Clause clause;
};

struct ConcreteProtocol {
  std::shared_ptr<const ProtocolSpec> spec;
  Concretization sizes;
  GroundVarTable vars;
  std::vector<GroundRule> rules;
  std::vector<State> initialStates;  // sorted
  std::vector<PropertyInstance> properties;
};

class ConcretizationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

ConcreteProtocol concretize(std::shared_ptr<const ProtocolSpec> spec,
                            const Concretization& sizes);

// Smallest instance size admitting every overlap pattern between an invariant
// using m values of a type and a rule using k slots of it.
int minInstanceSize(int m, int k);

// Per-type count of binders of each parameter type.
std::vector<int> binderCounts(const ProtocolSpec& spec, const std::vector<Binder>& binders,
                              std::size_t count);

Concretization minConcretization(const ProtocolSpec& spec, const SafetyProperty& f);

// Rule instances (binder tuples, 0-based) over sizes `n`, one per overlap
// pattern against fixed invariant values {0..fixed[t]-1} of each type. Order
// is lexicographic on the binder tuple; the first tuple of each pattern is
// the representative.
std::vector<std::vector<int>> enumerateRuleInstances(const ProtocolSpec& spec, const Rule& r,
                                                     const std::vector<int>& fixed,
                                                     const Concretization& n);

struct InstancePair {
  std::vector<int> property;  // invariant binder values, fixed at 0..m-1 per type
  std::vector<int> rule;
};

std::vector<InstancePair> enumerateInstancePairs(const ProtocolSpec& spec,
                                                 const SafetyProperty& f, const Rule& r,
                                                 const Concretization& n);

// Visits binder tuples (first `count` binders, 0-based values) in
// lexicographic order, skipping tuples that violate a distinct pair.
void forEachAssignment(const std::vector<Binder>& binders, std::size_t count,
                       const DistinctPairs& distinct, const std::vector<int>& sizes,
                       const std::function<void(const std::vector<int>&)>& visit);

// Grounds one rule at the given binder values (0-based).
GroundRule groundRule(const ProtocolSpec& spec, const GroundVarTable& vars,
                      const Concretization& sizes, int rule,
                      const std::vector<int>& binderValues);

// Grounds the body of a property (or any binder-scoped clause). Returns
// nullopt when a literal grounds to false, in which case the clause is true.
std::optional<Clause> groundClause(const ProtocolSpec& spec, const GroundVarTable& vars,
                                   const std::vector<Literal>& body,
                                   const std::vector<int>& binderValues);

// Rendering and parsing of ground literals, e.g. `!(lock = false & st[2] = Critical)`.
std::string renderGLit(const ProtocolSpec& spec, const GroundVarTable& vars, const GLit& l);
std::string renderClause(const ProtocolSpec& spec, const GroundVarTable& vars, const Clause& c);
std::string renderConstraint(const ProtocolSpec& spec, const GroundVarTable& vars,
                             const GroundConstraint& g);
std::string renderEquations(const ProtocolSpec& spec, const GroundVarTable& vars,
                            const EquationSet& e);
std::string renderState(const ProtocolSpec& spec, const GroundVarTable& vars, const State& s);
Clause parseClause(const ProtocolSpec& spec, const GroundVarTable& vars, std::string_view text);
EquationSet parseEquations(const ProtocolSpec& spec, const GroundVarTable& vars,
                           std::string_view text);

// Value of a parameter-typed literal side, if it denotes a parameter value of type t.
std::vector<int> paramValuesOf(const ProtocolSpec& spec, const GroundVarTable& vars,
                               const GLit& l, int type);

}  // namespace paraverify
