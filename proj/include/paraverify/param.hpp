#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "paraverify/checker.hpp"
#include "paraverify/ground.hpp"
#include "paraverify/protocol.hpp"

namespace paraverify {

struct TypeSaturation {
  int type = -1;
  int occurrences = 0;  // distinct values of the type in the clause
  int size = 0;
  double gamma() const { return static_cast<double>(occurrences) / size; }
  bool saturated() const { return occurrences == size; }
};

// Types absent from the clause are absent from the report.
using SaturationReport = std::vector<TypeSaturation>;

SaturationReport computeSaturation(const ConcreteProtocol& p, const Clause& omega);

enum class Quantifier { Forall, Exists };

// forall a1..ak exists e1..em . !(l1 & ... & lW)
// Forall binders come first. Distinct pairs relate forall binders among
// themselves and exists binders to forall binders of the same type. Exists
// binders range independently, which makes several existential groups
// behave as a disjunction of their group bodies.
struct ParamInvariant {
  std::string name;
  std::vector<Binder> binders;
  std::vector<Quantifier> quantifiers;
  DistinctPairs distinct;
  std::vector<Literal> body;

  std::size_t forallCount() const;
  bool hasExists() const { return forallCount() < binders.size(); }

  friend bool operator==(const ParamInvariant&, const ParamInvariant&) = default;
};

ParamInvariant fromSafety(const SafetyProperty& f);

// e.g. forall n1:NODE, n2:NODE. n1 ~= n2 -> ~(st[n1] = Critical & st[n2] = Critical)
std::string renderInvariant(const ProtocolSpec& spec, const ParamInvariant& inv);

// Rendering that is equal for invariants differing only in binder names,
// binder order within a quantifier block, or literal order.
std::string canonicalKey(const ProtocolSpec& spec, const ParamInvariant& inv);

// One constraint per forall assignment; constraints that are trivially true
// are dropped. Canonical and duplicate-free.
std::vector<GroundConstraint> groundExpand(const ProtocolSpec& spec, const ParamInvariant& inv,
                                           const GroundVarTable& vars, const Concretization& sizes);

// Holds on every reachable state of p (each constraint is one checker call).
CheckResult checkParamInvariant(ModelChecker& mc, const ConcreteProtocol& p,
                                const ParamInvariant& inv);

// Omega at C(t)+1 with the literals of the group of value v copied to every
// value of t. The result is over the variables of `extended`.
Clause extendGroup(const ConcreteProtocol& p, const Clause& omega, int type, int value,
                   const ConcreteProtocol& extended);

struct GroupDecision {
  int type = -1;
  int value = -1;           // 0-based concrete value
  std::string extended;     // rendered extendGroup clause at N+1
  bool extendedHolds = false;
  bool universalHolds = false;  // the group value generalized to a fresh value
  Quantifier quantifier = Quantifier::Forall;
};

struct PromotionResult {
  std::optional<ParamInvariant> invariant;
  SaturationReport saturation;
  std::vector<GroupDecision> groups;
  bool validated = false;
  std::string failure;
};

// Memoizes concretizations; sizes that cannot be concretized yield nullptr.
class InstancePool {
public:
  explicit InstancePool(std::shared_ptr<const ProtocolSpec> spec) : spec_(std::move(spec)) {}
  const ConcreteProtocol* get(const Concretization& sizes);
  const std::shared_ptr<const ProtocolSpec>& spec() const { return spec_; }

private:
  std::shared_ptr<const ProtocolSpec> spec_;
  std::map<Concretization, std::unique_ptr<ConcreteProtocol>> pool_;
};

PromotionResult promote(const ConcreteProtocol& p, const Clause& omega, ModelChecker& mc,
                        InstancePool& pool);

// Bounded implication: every state satisfying the expansion of `phi`
// satisfies that of `psi`, for all sizes up to sizeBound.
bool impliesSemantically(const ProtocolSpec& spec, const std::vector<ParamInvariant>& phi,
                         const std::vector<ParamInvariant>& psi, int sizeBound);
// The same check at one size vector.
bool impliesAt(const ProtocolSpec& spec, const Concretization& sizes,
               const std::vector<ParamInvariant>& phi, const std::vector<ParamInvariant>& psi);
bool impliesSemantically(const ProtocolSpec& spec, const ParamInvariant& phi,
                         const ParamInvariant& psi, int sizeBound);

struct MergeEvent {
  std::string kind;  // duplicate | implied | strengthen-rejected | strengthened
  std::vector<std::string> removed;
  std::string kept;
};

struct MergeResult {
  std::vector<ParamInvariant> invariants;
  std::vector<MergeEvent> events;
};

// Reference check used by the strengthening step.
using ReferenceCheck = std::function<bool(const ParamInvariant&)>;

MergeResult mergeInvariants(const ProtocolSpec& spec, const std::vector<ParamInvariant>& invs,
                            int sizeBound, const ReferenceCheck& check);

}  // namespace paraverify
