#include "paraverify/checker.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <mutex>
#include <string_view>
#include <unordered_set>

#include "paraverify/solver.hpp"
#include "paraverify/symmetry.hpp"

namespace paraverify {

namespace {

struct StateHash {
  std::size_t operator()(const State& s) const {
    return std::hash<std::string_view>{}(
        std::string_view(reinterpret_cast<const char*>(s.data()), s.size()));
  }
};

std::vector<int> domainSizes(const GroundVarTable& vars) {
  std::vector<int> d;
  d.reserve(vars.size());
  for (const auto& v : vars.vars()) d.push_back(v.domain);
  return d;
}

}  // namespace

bool StateSet::contains(const State& s) const {
  return std::binary_search(states.begin(), states.end(), s);
}

void StateSet::buildIndex(const GroundVarTable& vars) {
  constexpr std::size_t kMaxIndexBytes = std::size_t{256} << 20;
  const std::size_t words = (states.size() + 63) / 64;
  std::size_t values = 0;
  for (const auto& v : vars.vars()) values += v.domain;
  if (words * values * 8 > kMaxIndexBytes) return;
  offset_.clear();
  for (const auto& v : vars.vars()) {
    offset_.push_back(bits_.size());
    for (int k = 0; k < v.domain; ++k) bits_.emplace_back(words, 0);
  }
  for (std::size_t i = 0; i < states.size(); ++i)
    for (std::size_t v = 0; v < offset_.size(); ++v)
      bits_[offset_[v] + states[i][v]][i / 64] |= std::uint64_t{1} << (i % 64);
}

std::optional<std::size_t> StateSet::firstViolation(const Clause& c) const {
  const bool indexed =
      !offset_.empty() && std::none_of(c.lits.begin(), c.lits.end(), [](const GLit& l) { return l.rhsVar; });
  if (!indexed) {
    for (std::size_t i = 0; i < states.size(); ++i)
      if (!c.holds(states[i])) return i;
    return std::nullopt;
  }
  const std::size_t words = (states.size() + 63) / 64;
  for (std::size_t w = 0; w < words; ++w) {
    // states in this word where every literal holds
    std::uint64_t m = w + 1 < words || states.size() % 64 == 0
                          ? ~std::uint64_t{0}
                          : (std::uint64_t{1} << (states.size() % 64)) - 1;
    for (const auto& l : c.lits) {
      const std::uint64_t eq = bits_[offset_[l.var] + l.rhs][w];
      m &= l.equal ? eq : ~eq;
      if (!m) break;
    }
    if (m) return w * 64 + std::countr_zero(m);
  }
  return std::nullopt;
}

std::shared_ptr<const StateSet> CheckerCache::reachable(const Key& k) const {
  std::shared_lock lock(mutex_);
  auto it = reachable_.find(k);
  return it == reachable_.end() ? nullptr : it->second;
}

void CheckerCache::storeReachable(const Key& k, std::shared_ptr<const StateSet> s) {
  std::unique_lock lock(mutex_);
  reachable_.emplace(k, std::move(s));
}

// Entries are never erased outside clear(), so returned pointers stay valid.
const CheckResult* CheckerCache::verdict(const Key& k, const Clause& canonical) const {
  std::shared_lock lock(mutex_);
  auto it = verdicts_.find(k);
  if (it == verdicts_.end()) return nullptr;
  auto jt = it->second.find(canonical);
  return jt == it->second.end() ? nullptr : &jt->second;
}

void CheckerCache::storeVerdict(const Key& k, const Clause& canonical, const CheckResult& r) {
  std::unique_lock lock(mutex_);
  verdicts_[k].emplace(canonical, r);
}

std::size_t CheckerCache::verdictCount() const {
  std::shared_lock lock(mutex_);
  std::size_t n = 0;
  for (const auto& [k, m] : verdicts_) n += m.size();
  return n;
}

void CheckerCache::clear() {
  std::unique_lock lock(mutex_);
  reachable_.clear();
  verdicts_.clear();
}

StateSet computeReachable(const ConcreteProtocol& p, std::uint64_t stateLimit) {
  std::unordered_set<State, StateHash> seen;
  std::deque<State> frontier;
  for (const auto& s : p.initialStates)
    if (seen.insert(s).second) frontier.push_back(s);
  while (!frontier.empty()) {
    State s = std::move(frontier.front());
    frontier.pop_front();
    for (const auto& r : p.rules) {
      if (!r.enabled(s)) continue;
      State next = r.apply(s);
      if (seen.insert(next).second) {
        if (seen.size() > stateLimit) {
          throw ResourceLimitError("state limit of " + std::to_string(stateLimit) +
                                   " exceeded at " + formatSizes(*p.spec, p.sizes));
        }
        frontier.push_back(std::move(next));
      }
    }
  }
  StateSet out;
  out.states.assign(seen.begin(), seen.end());
  std::sort(out.states.begin(), out.states.end());
  return out;
}

ModelChecker::ModelChecker(CheckerOptions opts, std::shared_ptr<CheckerCache> cache)
    : opts_(opts), cache_(std::move(cache)) {}

const CheckerCache::Key& ModelChecker::keyOf(const ConcreteProtocol& p) {
  if (lastKey_.spec != p.spec.get() || lastKey_.sizes != p.sizes.sizes)
    lastKey_ = {p.spec.get(), p.sizes.sizes};
  return lastKey_;
}

const StateSet& ModelChecker::reachableStates(const ConcreteProtocol& p) {
  const CheckerCache::Key& key = keyOf(p);
  if (auto it = local_.find(key); it != local_.end()) return *it->second;
  auto set = cache_->reachable(key);
  if (!set) {
    auto built = std::make_shared<StateSet>(computeReachable(p, opts_.stateLimit));
    built->buildIndex(p.vars);
    set = std::move(built);
    cache_->storeReachable(key, set);
  }
  return *local_.emplace(key, set).first->second;
}

CheckResult ModelChecker::checkInvariant(const ConcreteProtocol& p, const Clause& inv) {
  ++calls_;
  const CheckerCache::Key& key = keyOf(p);
  const Clause canon = canonicalForm(p.vars, inv);
  if (const CheckResult* cached = cache_->verdict(key, canon)) {
    ++hits_;
    CheckResult r = *cached;
    r.stats.cacheHit = true;
    return r;
  }
  const StateSet& reach = reachableStates(p);
  CheckResult r;
  const auto bad = reach.firstViolation(canon);
  r.stats.statesVisited = bad ? *bad + 1 : reach.size();
  if (bad) {
    r.verdict = Verdict::Violated;
    r.witness = reach.states[*bad];
  }
  cache_->storeVerdict(key, canon, r);
  return r;
}

CheckResult ModelChecker::checkConstraint(const ConcreteProtocol& p, const GroundConstraint& inv) {
  ++calls_;
  const StateSet& reach = reachableStates(p);
  CheckResult r;
  for (const auto& s : reach.states) {
    ++r.stats.statesVisited;
    if (!inv.holds(s)) {
      r.verdict = Verdict::Violated;
      r.witness = s;
      break;
    }
  }
  return r;
}

CheckResult ModelChecker::checkInductive(const ConcreteProtocol& p,
                                         const std::vector<GroundConstraint>& invs) {
  CheckResult r;
  auto all = [&](const State& s) {
    for (const auto& c : invs)
      if (!c.holds(s)) return false;
    return true;
  };
  for (const auto& s : p.initialStates) {
    if (!all(s)) {
      r.verdict = Verdict::Violated;
      r.witness = s;
      return r;
    }
  }
  FiniteDomainSolver solver(domainSizes(p.vars));
  for (const auto& c : invs) solver.addConstraint(c);
  solver.enumerate([&](const State& s) {
    if (++r.stats.statesVisited > opts_.stateLimit) {
      throw ResourceLimitError("state limit of " + std::to_string(opts_.stateLimit) +
                               " exceeded during consecution at " +
                               formatSizes(*p.spec, p.sizes));
    }
    for (const auto& rule : p.rules) {
      if (!rule.enabled(s)) continue;
      if (!all(rule.apply(s))) {
        r.verdict = Verdict::Violated;
        r.witness = s;
        r.failedRule = rule.name;
        return false;
      }
    }
    return true;
  });
  return r;
}

CheckResult ModelChecker::checkInductive(const ConcreteProtocol& p,
                                         const std::vector<Clause>& invs) {
  std::vector<GroundConstraint> g;
  g.reserve(invs.size());
  for (const auto& c : invs) g.push_back(GroundConstraint{{c}});
  return checkInductive(p, g);
}

}  // namespace paraverify
