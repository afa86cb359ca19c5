#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "paraverify/checker.hpp"
#include "paraverify/corpus.hpp"

using namespace paraverify;

namespace {

ConcreteProtocol mux(int n) { return concretize(loadCorpus("mux"), {{n}}); }

std::vector<Clause> clauses(const ConcreteProtocol& p, std::initializer_list<const char*> texts) {
  std::vector<Clause> out;
  for (const char* t : texts) out.push_back(parseClause(*p.spec, p.vars, t));
  return out;
}

}  // namespace

TEST(Reachable, MuxCounts) {
  ModelChecker mc;
  EXPECT_EQ(mc.reachableStates(mux(2)).size(), 8u);
  auto p1 = concretize(std::make_shared<const ProtocolSpec>(parseProtocol(
                           "type NODE;\nenum LOC { Idle, Trying, Critical };\n"
                           "var st : array[NODE] of LOC;\nvar lock : boolean;\n"
                           "init { forall n : NODE . st[n] = Idle; lock = false; }\n"
                           "rule try(i : NODE) guard st[i] = Idle action st[i] := Trying;\n"
                           "rule crit(i : NODE) guard st[i] = Trying & lock = false action st[i] := Critical, lock := true;\n"
                           "rule exit(i : NODE) guard st[i] = Critical action st[i] := Idle, lock := false;\n")),
                       {{1}});
  EXPECT_EQ(mc.reachableStates(p1).size(), 3u);
}

TEST(Reachable, NoRulesMeansInitialStates) {
  auto spec = std::make_shared<const ProtocolSpec>(
      parseProtocol("type T;\nvar x : array[T] of boolean;\nvar y : boolean;\n"
                    "init { forall n : T . x[n] = false; }\n"));
  ConcreteProtocol p = concretize(spec, {{2}});
  EXPECT_EQ(p.initialStates.size(), 2u);  // y is unconstrained
  ModelChecker mc;
  EXPECT_EQ(mc.reachableStates(p).states, p.initialStates);
}

TEST(Reachable, MatchesNaiveFixpointOnCorpus) {
  for (const auto& name : corpusNames()) {
    auto spec = loadCorpus(name);
    for (int n = 1; n <= 3; ++n) {
      ConcreteProtocol p;
      try {
        p = concretize(spec, {std::vector<int>(spec->paramTypes.size(), n)});
      } catch (const ConcretizationError&) {
        continue;
      }
      if (oracle::totalStates(p) > 200000) continue;
      ModelChecker mc;
      const auto& got = mc.reachableStates(p);
      const auto want = oracle::reachable(p);
      EXPECT_EQ(got.states, std::vector<State>(want.begin(), want.end())) << name << " n=" << n;
    }
  }
}

TEST(Reachable, StateLimitIsAnError) {
  ModelChecker mc(CheckerOptions{5});
  EXPECT_THROW(mc.reachableStates(mux(3)), ResourceLimitError);
}

TEST(CheckInvariant, MuxExamples) {
  ModelChecker mc;
  auto p = mux(2);
  auto c = clauses(p, {"!(lock = false & st[2] = Critical)", "!(st[2] = Critical)"});
  EXPECT_TRUE(mc.checkInvariant(p, c[0]).holds());
  CheckResult bad = mc.checkInvariant(p, c[1]);
  ASSERT_FALSE(bad.holds());
  ASSERT_TRUE(bad.witness);
  EXPECT_EQ(renderState(*p.spec, p.vars, *bad.witness), "{st[1] = Idle, st[2] = Critical, lock = true}");
  CheckResult falsum = mc.checkInvariant(p, Clause{});
  ASSERT_FALSE(falsum.holds());
  EXPECT_EQ(*falsum.witness, p.initialStates[0]);
  EXPECT_EQ(mc.calls(), 3u);
}

TEST(CheckInvariant, CacheIsTransparentAndCounted) {
  auto p = mux(3);
  auto shared = std::make_shared<CheckerCache>();
  ModelChecker warm(CheckerOptions{}, shared);
  std::mt19937 rng(7);
  std::vector<Clause> cs;
  for (int i = 0; i < 40; ++i) cs.push_back(oracle::randomClause(p, rng, 3));
  std::vector<bool> first;
  for (const auto& c : cs) first.push_back(warm.checkInvariant(p, c).holds());
  for (std::size_t i = 0; i < cs.size(); ++i) {
    CheckResult again = warm.checkInvariant(p, cs[i]);
    EXPECT_TRUE(again.stats.cacheHit);
    EXPECT_EQ(again.holds(), first[i]);
    ModelChecker cold;
    EXPECT_EQ(cold.checkInvariant(p, cs[i]).holds(), first[i]);
  }
  EXPECT_EQ(warm.calls(), 80u);
  EXPECT_GE(warm.cacheHits(), 40u);
}

TEST(CheckInvariant, AgreesWithNaiveEnumerator) {
  std::mt19937 rng(42);
  for (const auto& name : corpusNames()) {
    auto spec = loadCorpus(name);
    ConcreteProtocol p = concretize(spec, minConcretization(*spec, spec->properties[0]));
    if (oracle::totalStates(p) > 100000) continue;
    const auto reach = oracle::reachable(p);
    ModelChecker mc;
    for (int i = 0; i < 60; ++i) {
      Clause c = oracle::randomClause(p, rng, 3);
      bool want = true;
      for (const auto& s : reach) want &= c.holds(s);
      CheckResult r = mc.checkInvariant(p, c);
      EXPECT_EQ(r.holds(), want) << name << " " << renderClause(*spec, p.vars, c);
      if (!r.holds()) {
        EXPECT_TRUE(reach.count(*r.witness));
        EXPECT_FALSE(c.holds(*r.witness));
      }
    }
  }
}

TEST(CheckInductive, MuxExamples) {
  ModelChecker mc;
  auto p = mux(2);
  auto full = clauses(p, {"!(st[1] = Critical & st[2] = Critical)", "!(st[2] = Critical & st[1] = Critical)",
                          "!(lock = false & st[1] = Critical)", "!(lock = false & st[2] = Critical)"});
  EXPECT_TRUE(mc.checkInductive(p, full).holds());
  std::vector<Clause> safety(full.begin(), full.begin() + 2);
  CheckResult r = mc.checkInductive(p, safety);
  ASSERT_FALSE(r.holds());
  ASSERT_TRUE(r.failedRule);
  EXPECT_EQ(*r.failedRule, "crit(1)");
  EXPECT_EQ(renderState(*p.spec, p.vars, *r.witness), "{st[1] = Trying, st[2] = Critical, lock = false}");
  EXPECT_TRUE(mc.checkInductive(p, std::vector<Clause>{}).holds());
}

TEST(CheckInductive, AgreesWithNaiveEnumeratorAndImpliesInvariance) {
  std::mt19937 rng(3);
  for (const auto& name : corpusNames()) {
    auto spec = loadCorpus(name);
    ConcreteProtocol p = concretize(spec, minConcretization(*spec, spec->properties[0]));
    if (oracle::totalStates(p) > 50000) continue;
    ModelChecker mc;
    for (int i = 0; i < 30; ++i) {
      std::vector<Clause> invs;
      for (const auto& pi : p.properties) invs.push_back(pi.clause);
      for (int k = 0; k < 3; ++k) invs.push_back(oracle::randomClause(p, rng, 2));
      const bool want = oracle::inductive(p, invs);
      EXPECT_EQ(mc.checkInductive(p, invs).holds(), want) << name;
      if (want)
        for (const auto& c : invs) EXPECT_TRUE(oracle::invariantHolds(p, c));
    }
  }
}

TEST(StateSetIndex, FirstViolationMatchesScan) {
  std::mt19937 rng(7);
  for (const auto& name : corpusNames()) {
    auto spec = loadCorpus(name);
    ConcreteProtocol p = concretize(spec, minConcretization(*spec, spec->properties[0]));
    StateSet plain = computeReachable(p, 1'000'000);
    StateSet indexed = plain;
    indexed.buildIndex(p.vars);
    for (int i = 0; i < 200; ++i) {
      Clause c = oracle::randomClause(p, rng, 4);
      // flip some literals to disequalities
      for (auto& l : c.lits) l.equal = rng() % 3 != 0;
      std::optional<std::size_t> want;
      for (std::size_t k = 0; k < plain.size() && !want; ++k)
        if (!c.holds(plain.states[k])) want = k;
      EXPECT_EQ(indexed.firstViolation(c), want) << name << " " << renderClause(*spec, p.vars, c);
      EXPECT_EQ(plain.firstViolation(c), want);
    }
  }
}
