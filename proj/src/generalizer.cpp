#include "paraverify/generalizer.hpp"

#include <algorithm>
#include <iterator>

#include "paraverify/cti.hpp"
#include "paraverify/symmetry.hpp"

namespace paraverify {

namespace {

// Visits the k-subsets of {0..n-1} in lexicographic order until `f` returns true.
template <typename F>
bool forEachCombination(std::size_t n, std::size_t k, F&& f) {
  if (k > n) return false;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    if (f(idx)) return true;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

EquationSet pick(const EquationSet& s, const std::vector<std::size_t>& idx) {
  EquationSet out;
  for (std::size_t i : idx) out.eqs.push_back(s.eqs[i]);
  return out;
}

// Descends from a passing set through the first passing (L-1)-sublist.
EquationSet descend(EquationSet cur, ReferenceChecker& checker, std::vector<CheckRecord>& trace) {
  while (cur.size() > 1) {
    std::optional<EquationSet> next;
    forEachCombination(cur.size(), cur.size() - 1, [&](const std::vector<std::size_t>& idx) {
      EquationSet sub = pick(cur, idx);
      if (!checker.passes(sub, trace)) return false;
      next = std::move(sub);
      return true;
    });
    if (!next) break;
    cur = std::move(*next);
  }
  return cur;
}

// Smallest passing sublist by ascending length, up to length `maxLen`.
std::optional<EquationSet> ascend(const EquationSet& sol, std::size_t maxLen,
                                  ReferenceChecker& checker, std::vector<CheckRecord>& trace) {
  std::optional<EquationSet> found;
  for (std::size_t n = 1; n <= maxLen && !found; ++n) {
    forEachCombination(sol.size(), n, [&](const std::vector<std::size_t>& idx) {
      EquationSet sub = pick(sol, idx);
      if (!checker.passes(sub, trace)) return false;
      found = std::move(sub);
      return true;
    });
  }
  return found;
}

Clause toClause(const ReferenceChecker& checker, const EquationSet& eqs) {
  return candidateInvariant(checker.protocol().vars, eqs);
}

}  // namespace

void GeneralizeContext::addKnown(const Clause& canonical) {
  if (!knownSet_.insert(canonical).second) return;
  known.push_back(canonical);
  for (const auto& l : canonical.lits) {
    if (!l.equal || l.rhsVar) continue;
    if (eqSet_.insert({l.var, l.rhs}).second) eq1.eqs.push_back({l.var, l.rhs});
  }
}

bool ReferenceChecker::passes(const EquationSet& eqs, std::vector<CheckRecord>& trace) {
  CheckResult r = mc_.checkInvariant(p_, candidateInvariant(p_.vars, eqs));
  trace.push_back({eqs, r.holds(), r.stats.cacheHit});
  return r.holds();
}

std::pair<EquationSet, EquationSet> computeJoinDiff(const EquationSet& sol,
                                                    const GeneralizeContext& ctx) {
  EquationSet join, diff;
  for (const auto& e : sol.eqs) (ctx.inEq1(e) ? join : diff).eqs.push_back(e);
  return {join, diff};
}

GeneralizeResult simplifyAuxInvDecreasingly(const EquationSet& sol, ReferenceChecker& checker) {
  GeneralizeResult r;
  r.path = "decreasing";
  if (sol.empty() || !checker.passes(sol, r.trace)) return r;
  r.invariant = toClause(checker, descend(sol, checker, r.trace));
  return r;
}

GeneralizeResult simplifyAuxInvIncreasingly(const EquationSet& sol, ReferenceChecker& checker) {
  GeneralizeResult r;
  r.path = "increasing";
  if (auto found = ascend(sol, sol.size(), checker, r.trace)) r.invariant = toClause(checker, *found);
  return r;
}

GeneralizeResult simplifyAuxInv(const EquationSet& sol, Strategy s, ReferenceChecker& checker) {
  return s == Strategy::Decreasing ? simplifyAuxInvDecreasingly(sol, checker)
                                   : simplifyAuxInvIncreasingly(sol, checker);
}

GeneralizeResult heuristicGeneralize(const EquationSet& sol, const GeneralizeContext& ctx,
                                     ReferenceChecker& checker) {
  GeneralizeResult r;
  r.path = "heuristic";
  // positions of the join and diff terms within the solution
  std::vector<std::size_t> joinAt, diffAt;
  for (std::size_t i = 0; i < sol.size(); ++i) (ctx.inEq1(sol.eqs[i]) ? joinAt : diffAt).push_back(i);
  if (!joinAt.empty()) {
    std::optional<EquationSet> hit;
    std::vector<char> chosen(sol.size());
    for (std::size_t n = 1; n <= diffAt.size() && !hit; ++n) {
      forEachCombination(diffAt.size(), n, [&](const std::vector<std::size_t>& idx) {
        // join plus the chosen diff terms, kept in solution order
        std::fill(chosen.begin(), chosen.end(), 0);
        for (std::size_t i : joinAt) chosen[i] = 1;
        for (std::size_t i : idx) chosen[diffAt[i]] = 1;
        EquationSet cand;
        for (std::size_t i = 0; i < sol.size(); ++i)
          if (chosen[i]) cand.eqs.push_back(sol.eqs[i]);
        if (!checker.passes(cand, r.trace)) return false;
        hit = std::move(cand);
        return true;
      });
    }
    if (hit) {
      // The passing set is not re-checked while stripping residual terms.
      EquationSet best = *hit;
      if (ctx.strategy == Strategy::Decreasing) {
        best = descend(*hit, checker, r.trace);
      } else if (auto smaller = ascend(*hit, hit->size() - 1, checker, r.trace)) {
        best = *smaller;
      }
      r.invariant = toClause(checker, best);
      return r;
    }
  }
  GeneralizeResult fb = simplifyAuxInv(sol, ctx.strategy, checker);
  r.path = "heuristic-fallback";
  r.invariant = fb.invariant;
  r.trace.insert(r.trace.end(), std::make_move_iterator(fb.trace.begin()),
                 std::make_move_iterator(fb.trace.end()));
  return r;
}

GeneralizeResult generalize(const EquationSet& sol, const GeneralizeContext& ctx,
                            ReferenceChecker& checker) {
  return ctx.heuristic ? heuristicGeneralize(sol, ctx, checker)
                       : simplifyAuxInv(sol, ctx.strategy, checker);
}

bool isLegal(const GroundVarTable& vars, const Clause& inv, const GeneralizeContext& ctx) {
  return !inv.empty() && !ctx.isKnown(canonicalForm(vars, inv));
}

}  // namespace paraverify
