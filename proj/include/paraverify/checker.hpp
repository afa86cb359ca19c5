#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "paraverify/ground.hpp"

namespace paraverify {

class ResourceLimitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Deduplicated states in canonical (lexicographic) order.
struct StateSet {
  std::vector<State> states;

  std::size_t size() const { return states.size(); }
  bool contains(const State& s) const;

  // Bitset per (variable, value) over `states`; skipped above a memory cap.
  void buildIndex(const GroundVarTable& vars);
  // Position of the first state falsifying `c`, if any.
  std::optional<std::size_t> firstViolation(const Clause& c) const;

private:
  std::vector<std::size_t> offset_;  // per variable, into bits_
  std::vector<std::vector<std::uint64_t>> bits_;
};

enum class Verdict { Holds, Violated };

struct CheckStats {
  std::uint64_t statesVisited = 0;
  bool cacheHit = false;
};

struct CheckResult {
  Verdict verdict = Verdict::Holds;
  std::optional<State> witness;
  std::optional<std::string> failedRule;  // consecution failures only
  CheckStats stats;

  bool holds() const { return verdict == Verdict::Holds; }
};

// Insert-only store of reachable sets and invariant verdicts, keyed by
// protocol identity and sizes. Safe for concurrent readers.
class CheckerCache {
public:
  struct Key {
    const ProtocolSpec* spec = nullptr;
    std::vector<int> sizes;
    auto operator<=>(const Key&) const = default;
  };

  std::shared_ptr<const StateSet> reachable(const Key& k) const;
  void storeReachable(const Key& k, std::shared_ptr<const StateSet> s);

  const CheckResult* verdict(const Key& k, const Clause& canonical) const;
  void storeVerdict(const Key& k, const Clause& canonical, const CheckResult& r);

  std::size_t verdictCount() const;
  void clear();

private:
  mutable std::shared_mutex mutex_;
  std::map<Key, std::shared_ptr<const StateSet>> reachable_;
  std::map<Key, std::map<Clause, CheckResult>> verdicts_;
};

struct CheckerOptions {
  std::uint64_t stateLimit = 10'000'000;
};

class ModelChecker {
public:
  explicit ModelChecker(CheckerOptions opts = {},
                        std::shared_ptr<CheckerCache> cache = std::make_shared<CheckerCache>());

  const StateSet& reachableStates(const ConcreteProtocol& p);

  // Every reachable state satisfies inv. Counted as a checker call; cached.
  CheckResult checkInvariant(const ConcreteProtocol& p, const Clause& inv);
  CheckResult checkConstraint(const ConcreteProtocol& p, const GroundConstraint& inv);

  // Initiation plus consecution over all states satisfying the conjunction.
  CheckResult checkInductive(const ConcreteProtocol& p, const std::vector<GroundConstraint>& invs);
  CheckResult checkInductive(const ConcreteProtocol& p, const std::vector<Clause>& invs);

  std::uint64_t calls() const { return calls_; }
  std::uint64_t cacheHits() const { return hits_; }
  void resetCounters() { calls_ = hits_ = 0; }

  CheckerCache& cache() { return *cache_; }
  const CheckerOptions& options() const { return opts_; }

private:
  CheckerOptions opts_;
  std::shared_ptr<CheckerCache> cache_;
  std::uint64_t calls_ = 0;
  std::uint64_t hits_ = 0;
  std::map<CheckerCache::Key, std::shared_ptr<const StateSet>> local_;
  CheckerCache::Key lastKey_;

  const CheckerCache::Key& keyOf(const ConcreteProtocol& p);
};

StateSet computeReachable(const ConcreteProtocol& p, std::uint64_t stateLimit);

}  // namespace paraverify
