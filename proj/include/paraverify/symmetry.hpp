#pragma once

#include <optional>
#include <vector>

#include "paraverify/ground.hpp"

namespace paraverify {

// Literals sorted by (variable name, index tuple, value), duplicates removed.
// The sort key uses GroundVarTable::nameRank.
Clause canonicalForm(const GroundVarTable& vars, Clause c);
GroundConstraint canonicalForm(const GroundVarTable& vars, GroundConstraint g);

enum class QuantClass { ForallOnly, ExistsOnly, Hybrid };

// Per parameter type classification; `existsValues` lists the values of a
// hybrid type that belong to the existential part.
struct TypeQuantInfo {
  QuantClass cls = QuantClass::ForallOnly;
  std::vector<int> existsValues;
};
using QuantInfo = std::vector<std::optional<TypeQuantInfo>>;

// Permutations per type that getSymmetryInvs applies.
struct PermutationPlan {
  // For each type: list of permutations (perm[v] = image of v).
  std::vector<std::vector<std::vector<int>>> perTypePermutations;
};

PermutationPlan makePermutationPlan(const ConcreteProtocol& p, const QuantInfo& info,
                                    const std::vector<int>& typesUsed);

// Applies a value permutation (one per type, identity when empty) to a clause.
Clause permute(const ConcreteProtocol& p, const Clause& c,
               const std::vector<std::vector<int>>& perms);
State permuteState(const ConcreteProtocol& p, const State& s,
                   const std::vector<std::vector<int>>& perms);

// Parameter types whose values occur in the clause.
std::vector<int> typesIn(const ConcreteProtocol& p, const Clause& c);

// Classification used before promotion: every occurring type is free.
QuantInfo provisionalQuantInfo(const ConcreteProtocol& p, const Clause& c);

// Orbit of `inv` under the permutation plan, without `inv` itself, in
// canonical order. Throws std::invalid_argument when a type occurring in
// `inv` is unclassified.
std::vector<Clause> getSymmetryInvs(const ConcreteProtocol& p, const Clause& inv,
                                    const QuantInfo& info);

// Relabels parameter values so that, per type, the values occurring in `c`
// become 0..m-1 in ascending order. Returns the per-type counts m.
Clause normalizeValues(const ConcreteProtocol& p, const Clause& c, std::vector<int>* counts);

}  // namespace paraverify
