#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "paraverify/ground.hpp"

namespace paraverify {

// Inductive obligation for one (ground rule, ground invariant) pair. Post-state
// variables share ids with their pre-state counterparts.
struct IndObligation {
  int rule = -1;        // index into ConcreteProtocol::rules
  Clause invariant;     // F over the pre-state
  std::vector<GLit> guardPart;
  std::vector<GAssign> actionPart;  // assignments of R
  std::vector<int> framePart;       // variables of F that R leaves unchanged
  std::vector<GLit> negGoal;        // F' literals; their conjunction must hold after R

  // negGoal pulled back through the action and frame. Absent when a literal
  // reduces to a false constant comparison.
  std::optional<std::vector<GLit>> pullBack() const;
};

// Absent when R assigns no variable of F (F is then trivially preserved).
std::optional<IndObligation> buildIndObligation(const ConcreteProtocol& p, int rule,
                                                const Clause& invariant);

// Canonical clauses asserted into every obligation query.
class BlockedAssertionStore {
public:
  // Returns true when the clause was new. The clause must be canonical.
  bool add(const Clause& canonical);
  bool contains(const Clause& canonical) const { return index_.count(canonical) > 0; }
  const std::vector<Clause>& clauses() const { return clauses_; }
  std::size_t size() const { return clauses_.size(); }

private:
  std::vector<Clause> clauses_;
  std::set<Clause> index_;
};

struct SolveStats {
  std::uint64_t nodes = 0;
};

// First pre-state (variables by id, values ascending) satisfying the guard,
// the pulled-back goal and every blocked clause, projected onto the variables
// of the obligation in order of first appearance.
std::optional<EquationSet> solveObligation(const ConcreteProtocol& p, const IndObligation& o,
                                           const BlockedAssertionStore& blocked,
                                           SolveStats* stats = nullptr);

// !(eq1 & ... & eqW) in canonical literal order. Throws std::invalid_argument
// on an empty solution.
Clause candidateInvariant(const GroundVarTable& vars, const EquationSet& sol);

// Adds `inv` and its symmetric images. Returns the number of new clauses.
std::size_t blockAssertion(const GroundVarTable& vars, const Clause& inv,
                           const std::vector<Clause>& symmetries, BlockedAssertionStore& store);

}  // namespace paraverify
