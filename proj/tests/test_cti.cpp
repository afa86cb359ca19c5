#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "paraverify/corpus.hpp"
#include "paraverify/cti.hpp"
#include "paraverify/symmetry.hpp"

using namespace paraverify;

namespace {

struct Mux3 : ::testing::Test {
  ConcreteProtocol p = concretize(loadCorpus("mux"), {{3}});
  int rule(const std::string& name) {
    for (std::size_t i = 0; i < p.rules.size(); ++i)
      if (p.rules[i].name == name) return static_cast<int>(i);
    throw std::out_of_range(name);
  }
  Clause clause(const char* text) { return parseClause(*p.spec, p.vars, text); }
  std::string eqs(const EquationSet& e) { return renderEquations(*p.spec, p.vars, e); }
  std::string text(const Clause& c) { return renderClause(*p.spec, p.vars, c); }
};

// Exhaustive search for a pre-state from which the rule breaks F.
bool oracleSat(const ConcreteProtocol& p, int rule, const Clause& f,
               const BlockedAssertionStore& store) {
  bool found = false;
  oracle::forEachState(p, [&](const State& s) {
    if (found || !p.rules[rule].enabled(s)) return;
    for (const auto& c : store.clauses())
      if (!c.holds(s)) return;
    if (!f.holds(p.rules[rule].apply(s))) found = true;
  });
  return found;
}

}  // namespace

TEST_F(Mux3, ObligationParts) {
  const Clause f = clause("!(st[1] = Critical & st[2] = Critical)");
  auto o = buildIndObligation(p, rule("crit(1)"), f);
  ASSERT_TRUE(o);
  EXPECT_EQ(text(Clause{o->guardPart}), "!(st[1] = Trying & lock = false)");
  ASSERT_EQ(o->actionPart.size(), 2u);
  EXPECT_EQ(o->framePart, (std::vector<int>{p.vars.find("st[2]")}));
  EXPECT_EQ(text(Clause{o->negGoal}), "!(st[1] = Critical & st[2] = Critical)");
  EXPECT_FALSE(buildIndObligation(p, rule("try(3)"), f));
  EXPECT_TRUE(buildIndObligation(p, rule("exit(1)"), f));
}

TEST_F(Mux3, SolveWorkedExample) {
  const Clause f = clause("!(st[1] = Critical & st[2] = Critical)");
  auto o = buildIndObligation(p, rule("crit(1)"), f);
  BlockedAssertionStore store;
  auto sol = solveObligation(p, *o, store);
  ASSERT_TRUE(sol);
  EXPECT_EQ(eqs(*sol), "{st[1] = Trying, lock = false, st[2] = Critical}");
  EXPECT_EQ(text(candidateInvariant(p.vars, *sol)), "!(lock = false & st[1] = Trying & st[2] = Critical)");

  store.add(canonicalForm(p.vars, clause("!(lock = false & st[2] = Critical)")));
  EXPECT_FALSE(solveObligation(p, *o, store));

  auto exit1 = buildIndObligation(p, rule("exit(1)"), f);
  EXPECT_FALSE(solveObligation(p, *exit1, BlockedAssertionStore{}));
}

TEST_F(Mux3, CandidateInvariant) {
  EquationSet one{{{p.vars.find("lock"), 1}}};
  EXPECT_EQ(text(candidateInvariant(p.vars, one)), "!(lock = true)");
  EXPECT_THROW(candidateInvariant(p.vars, EquationSet{}), std::invalid_argument);
}

TEST_F(Mux3, BlockAssertion) {
  BlockedAssertionStore store;
  const Clause inv = clause("!(lock = false & st[2] = Critical)");
  QuantInfo info = provisionalQuantInfo(p, inv);
  EXPECT_EQ(blockAssertion(p.vars, inv, getSymmetryInvs(p, inv, info), store), 3u);
  EXPECT_EQ(blockAssertion(p.vars, inv, getSymmetryInvs(p, inv, info), store), 0u);
  EXPECT_EQ(store.size(), 3u);
  const Clause global = clause("!(lock = true)");
  EXPECT_EQ(blockAssertion(p.vars, global, getSymmetryInvs(p, global, provisionalQuantInfo(p, global)), store), 1u);
}

TEST(Cti, FilterIsSound) {
  for (const auto& name : corpusNames()) {
    auto spec = loadCorpus(name);
    ConcreteProtocol p = concretize(spec, minConcretization(*spec, spec->properties[0]));
    if (oracle::totalStates(p) > 100000) continue;
    for (const auto& pi : p.properties) {
      for (std::size_t r = 0; r < p.rules.size(); ++r) {
        if (buildIndObligation(p, static_cast<int>(r), pi.clause)) continue;
        oracle::forEachState(p, [&](const State& s) {
          if (p.rules[r].enabled(s) && pi.clause.holds(s))
            ASSERT_TRUE(pi.clause.holds(p.rules[r].apply(s))) << name << " " << p.rules[r].name;
        });
      }
    }
  }
}

TEST(Cti, SolverAgreesWithExhaustiveSearch) {
  std::mt19937 rng(11);
  for (const auto& name : corpusNames()) {
    auto spec = loadCorpus(name);
    ConcreteProtocol p = concretize(spec, minConcretization(*spec, spec->properties[0]));
    if (oracle::totalStates(p) > 100000) continue;
    std::vector<Clause> targets;
    for (const auto& pi : p.properties) targets.push_back(pi.clause);
    for (int i = 0; i < 10; ++i) targets.push_back(oracle::randomClause(p, rng, 3));
    for (int round = 0; round < 2; ++round) {
      BlockedAssertionStore store;
      if (round == 1)
        for (int i = 0; i < 4; ++i) store.add(canonicalForm(p.vars, oracle::randomClause(p, rng, 2)));
      for (const auto& f : targets) {
        for (std::size_t r = 0; r < p.rules.size(); ++r) {
          auto o = buildIndObligation(p, static_cast<int>(r), f);
          if (!o) continue;
          auto sol = solveObligation(p, *o, store);
          ASSERT_EQ(sol.has_value(), oracleSat(p, static_cast<int>(r), f, store))
              << name << " " << p.rules[r].name << " " << renderClause(*spec, p.vars, f);
          if (!sol) continue;
          // Any completion of the solution that respects the store breaks F.
          auto again = solveObligation(p, *o, store);
          EXPECT_EQ(again->eqs, sol->eqs);
        }
      }
    }
  }
}

TEST(Cti, BlockingIsMonotone) {
  std::mt19937 rng(5);
  auto spec = loadCorpus("mux");
  ConcreteProtocol p = concretize(spec, {{3}});
  for (int trial = 0; trial < 50; ++trial) {
    BlockedAssertionStore store;
    Clause f = oracle::randomClause(p, rng, 2);
    std::vector<bool> before;
    for (std::size_t r = 0; r < p.rules.size(); ++r) {
      auto o = buildIndObligation(p, static_cast<int>(r), f);
      before.push_back(o && solveObligation(p, *o, store));
    }
    store.add(canonicalForm(p.vars, oracle::randomClause(p, rng, 2)));
    for (std::size_t r = 0; r < p.rules.size(); ++r) {
      auto o = buildIndObligation(p, static_cast<int>(r), f);
      if (!before[r]) EXPECT_FALSE(o && solveObligation(p, *o, store));
    }
  }
}
