#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "paraverify/generalizer.hpp"
#include "paraverify/param.hpp"
#include "paraverify/protocol.hpp"

namespace paraverify {

struct PipelineConfig {
  Strategy strategy = Strategy::Decreasing;
  bool heuristic = true;
  bool symmetry = true;
  // Final-check sizes applied to every type. Empty: reference sizes plus 0, 1, 2.
  std::vector<int> finalSizes;
  int implBound = 0;  // 0: largest reference size plus 2
  std::uint64_t stateLimit = 10'000'000;
  double timeLimitSeconds = 0;  // 0: unlimited
};

enum class Outcome { Verified, Unsafe, UnresolvedCti, ResourceLimit };

std::string outcomeName(Outcome o);

struct ReportedInvariant {
  std::string name;
  std::string origin;  // safety | auxiliary
  std::string text;
  ParamInvariant invariant;
};

struct AuxRecord {
  std::string name;
  std::string target;    // invariant instance the CTI broke
  std::string rule;      // ground rule instance
  std::string solution;  // solver equations
  std::string path;      // generalization path
  std::uint64_t checkerCalls = 0;
  std::string concrete;  // generalized concrete invariant
  int symmetricImages = 0;
  SaturationReport saturation;
  std::vector<GroupDecision> groups;
  std::string promoted;
  bool validated = false;
};

struct FinalCheck {
  std::string sizes;
  std::string status;  // pass | fail | skipped
  std::string note;
  std::string witness;
  std::string rule;
};

struct Counts {
  std::uint64_t checkerCalls = 0;
  std::uint64_t cacheHits = 0;
  std::uint64_t generalizeCalls = 0;
  std::uint64_t solverCalls = 0;
  std::uint64_t obligations = 0;
  std::uint64_t trivialObligations = 0;
  std::uint64_t ctis = 0;
  std::uint64_t blockedAssertions = 0;
  std::uint64_t reachableStates = 0;
};

struct VerificationReport {
  std::shared_ptr<const ProtocolSpec> spec;
  std::string protocol;
  Outcome outcome = Outcome::Verified;
  std::string message;
  std::vector<int> referenceSizes;
  std::vector<std::string> typeNames;
  PipelineConfig config;
  std::vector<ReportedInvariant> invariants;
  std::vector<AuxRecord> auxiliaries;
  std::vector<ParamInvariant> unmerged;  // safety plus promoted auxiliaries, before merging
  std::vector<MergeEvent> mergeEvents;
  std::vector<FinalCheck> finalChecks;
  Counts counts;
  std::vector<std::string> notes;
  // Unsafe and unresolved outcomes.
  std::string failingProperty;
  std::string failingRule;
  std::string witness;
  std::map<std::string, double> timingsMicros;  // fractional, ns resolution

  std::size_t parameterizedCount() const { return invariants.size(); }
};

VerificationReport runPipeline(std::shared_ptr<const ProtocolSpec> spec, const PipelineConfig& cfg);

// Per size vector: ground-expands the conjunction and checks inductiveness
// and implication of every safety property.
std::vector<FinalCheck> finalInductiveCheck(const std::shared_ptr<const ProtocolSpec>& spec,
                                            const std::vector<ParamInvariant>& invs,
                                            const std::vector<Concretization>& sizes,
                                            ModelChecker& mc, InstancePool& pool);

// Per-type reference concretization: the maximum over the non-trivial safety
// properties of their minimum concretization.
Concretization referenceConcretization(const ProtocolSpec& spec);

}  // namespace paraverify
