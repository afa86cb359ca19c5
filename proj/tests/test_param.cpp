#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "paraverify/corpus.hpp"
#include "paraverify/param.hpp"
#include "paraverify/symmetry.hpp"

using namespace paraverify;

namespace {

std::shared_ptr<const ProtocolSpec> withProps(std::string_view base, const std::string& extra) {
  return std::make_shared<const ProtocolSpec>(parseProtocol(std::string(base) + extra, "t"));
}

ParamInvariant prop(const ProtocolSpec& spec, const std::string& name) {
  return fromSafety(spec.properties[spec.findProperty(name)]);
}

const char* kArrays = R"(type T;
enum V { A, B };
enum MSG { Empty, Req };
var x : array[T] of V;
var ch : array[T][T] of MSG;
init { forall n : T . x[n] = B; }
rule set(i : T) guard x[i] = B action x[i] := A;
)";

}  // namespace

TEST(Saturation, Examples) {
  auto spec = loadCorpus("mux");
  auto p3 = concretize(spec, {{3}});
  auto r = computeSaturation(p3, parseClause(*spec, p3.vars, "!(lock = false & st[2] = Critical)"));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].occurrences, 1);
  EXPECT_DOUBLE_EQ(r[0].gamma(), 1.0 / 3.0);
  auto p2 = concretize(spec, {{2}});
  auto r2 = computeSaturation(p2, parseClause(*spec, p2.vars, "!(st[1] = Critical & st[2] = Critical)"));
  EXPECT_TRUE(r2[0].saturated());
  EXPECT_TRUE(computeSaturation(p3, parseClause(*spec, p3.vars, "!(lock = true)")).empty());
}

TEST(Saturation, AgreesWithNaiveScan) {
  std::mt19937 rng(2);
  for (const auto& name : corpusNames()) {
    auto spec = loadCorpus(name);
    auto p = concretize(spec, minConcretization(*spec, spec->properties[0]));
    for (int i = 0; i < 50; ++i) {
      Clause c = oracle::randomClause(p, rng, 4);
      std::vector<std::set<int>> seen(spec->paramTypes.size());
      for (const auto& l : c.lits) {
        auto scan = [&](int var) {
          const auto& g = p.vars[var];
          for (std::size_t k = 0; k < g.indices.size(); ++k)
            seen[spec->variables[g.decl].indexTypes[k]].insert(g.indices[k]);
        };
        scan(l.var);
        if (l.rhsVar) scan(l.rhs);
        const Sort& s = spec->variables[p.vars[l.var].decl].sort;
        if (!l.rhsVar && s.kind == SortKind::Param) seen[s.index].insert(l.rhs);
      }
      auto rep = computeSaturation(p, c);
      std::size_t k = 0;
      for (std::size_t t = 0; t < seen.size(); ++t) {
        if (seen[t].empty()) continue;
        ASSERT_LT(k, rep.size());
        EXPECT_EQ(rep[k].type, static_cast<int>(t));
        EXPECT_EQ(rep[k].occurrences, static_cast<int>(seen[t].size()));
        ++k;
      }
      EXPECT_EQ(k, rep.size());
    }
  }
}

TEST(ExtendGroup, Examples) {
  auto spec = withProps(kArrays, "");
  auto p2 = concretize(spec, {{2}});
  auto p3 = concretize(spec, {{3}});
  Clause om = parseClause(*spec, p2.vars, "!(x[1] = A & x[2] = A)");
  EXPECT_EQ(renderClause(*spec, p3.vars, extendGroup(p2, om, 0, 1, p3)),
            "!(x[1] = A & x[2] = A & x[3] = A)");
  Clause two = parseClause(*spec, p2.vars, "!(ch[2][1] = Req)");
  EXPECT_EQ(renderClause(*spec, p3.vars, extendGroup(p2, two, 0, 1, p3)),
            "!(ch[1][1] = Req & ch[2][1] = Req & ch[3][1] = Req)");
  EXPECT_THROW(extendGroup(p2, parseClause(*spec, p2.vars, "!(x[1] = A)"), 0, 1, p3),
               std::invalid_argument);
}

TEST(Promote, MuxScenarioOne) {
  auto spec = loadCorpus("mux");
  InstancePool pool(spec);
  ModelChecker mc;
  const ConcreteProtocol& p3 = *pool.get({{3}});
  auto r = promote(p3, parseClause(*spec, p3.vars, "!(lock = false & st[2] = Critical)"), mc, pool);
  ASSERT_TRUE(r.invariant);
  EXPECT_TRUE(r.validated);
  EXPECT_TRUE(r.groups.empty());
  EXPECT_EQ(renderInvariant(*spec, *r.invariant), "forall n1:NODE. ~(lock = false & st[n1] = Critical)");
}

TEST(Promote, MuxSaturatedStaysUniversal) {
  auto spec = loadCorpus("mux");
  InstancePool pool(spec);
  ModelChecker mc;
  const ConcreteProtocol& p2 = *pool.get({{2}});
  auto r = promote(p2, parseClause(*spec, p2.vars, "!(st[1] = Critical & st[2] = Critical)"), mc, pool);
  ASSERT_TRUE(r.invariant);
  ASSERT_EQ(r.groups.size(), 2u);
  for (const auto& g : r.groups) {
    EXPECT_TRUE(g.extendedHolds);
    EXPECT_TRUE(g.universalHolds);
  }
  EXPECT_EQ(r.groups[1].extended, "!(st[1] = Critical & st[2] = Critical & st[3] = Critical)");
  EXPECT_EQ(renderInvariant(*spec, *r.invariant),
            "forall n1:NODE, n2:NODE. n1 ~= n2 -> ~(st[n1] = Critical & st[n2] = Critical)");
}

TEST(Promote, QuorumNeedsExists) {
  auto spec = loadCorpus("toy_quorum");
  InstancePool pool(spec);
  ModelChecker mc;
  const ConcreteProtocol& p1 = *pool.get({{1}});
  auto r = promote(p1, parseClause(*spec, p1.vars, "!(resp = true & req[1] = false)"), mc, pool);
  ASSERT_TRUE(r.invariant);
  EXPECT_TRUE(r.validated) << r.failure;
  ASSERT_EQ(r.groups.size(), 1u);
  EXPECT_FALSE(r.groups[0].universalHolds);
  EXPECT_EQ(r.groups[0].quantifier, Quantifier::Exists);
  EXPECT_TRUE(r.invariant->hasExists());
  EXPECT_EQ(renderInvariant(*spec, *r.invariant), "exists n1:NODE. ~(req[n1] = false & resp = true)");
  for (int n = 1; n <= 5; ++n) {
    auto p = concretize(spec, {{n}});
    EXPECT_TRUE(checkParamInvariant(mc, p, *r.invariant).holds()) << n;
  }
}

TEST(GroundExpand, ExistsDistinctFromForall) {
  auto spec = withProps(kArrays, "");
  ParamInvariant inv;
  inv.binders = {{"a", 0}, {"e", 0}};
  inv.quantifiers = {Quantifier::Forall, Quantifier::Exists};
  inv.distinct = {{0, 1}};
  Literal l;
  l.lhs.kind = Term::Kind::Var;
  l.lhs.var = spec->findVariable("x");
  l.lhs.indices = {1};
  l.rhs.kind = Term::Kind::Const;
  l.rhs.value = 0;
  inv.body = {l};
  EXPECT_EQ(renderInvariant(*spec, inv), "forall a:T. exists e:T. e ~= a & ~(x[e] = A)");
  auto p3 = concretize(spec, {{3}});
  auto g = groundExpand(*spec, inv, p3.vars, p3.sizes);
  ASSERT_EQ(g.size(), 3u);
  std::set<std::string> texts;
  for (const auto& c : g) texts.insert(renderConstraint(*spec, p3.vars, c));
  EXPECT_EQ(texts.count("!(x[2] = A) | !(x[3] = A)"), 1u);
  auto p1 = concretize(spec, {{1}});
  auto g1 = groundExpand(*spec, inv, p1.vars, p1.sizes);
  ASSERT_EQ(g1.size(), 1u);
  EXPECT_TRUE(g1[0].alternatives.empty());
}

TEST(CanonicalKey, IgnoresNamesAndOrder) {
  auto spec = withProps(corpusSource("mux").value(),
                        "invariant m2(b : NODE, a : NODE) where a != b : !(st[a] = Critical & st[b] = Critical);\n"
                        "invariant other(a : NODE, b : NODE) where a != b : !(st[a] = Critical & st[b] = Trying);\n");
  EXPECT_EQ(canonicalKey(*spec, prop(*spec, "mutual")), canonicalKey(*spec, prop(*spec, "m2")));
  EXPECT_NE(canonicalKey(*spec, prop(*spec, "mutual")), canonicalKey(*spec, prop(*spec, "other")));
}

TEST(Implies, Examples) {
  auto spec = withProps(corpusSource("mux").value(),
                        "invariant lockcrit(n : NODE) : !(lock = false & st[n] = Critical);\n"
                        "invariant lockcrit1(n : NODE, m : NODE) where n != m : !(lock = false & st[n] = Critical & st[m] = Idle);\n"
                        "invariant allIdle(n : NODE) : !(st[n] != Idle);\n"
                        "invariant locked : !(lock = false);\n"
                        "invariant weak(i : NODE, j : NODE) where i != j : !(st[i] = Critical & st[j] = Critical & lock = true);\n");
  auto p = [&](const char* n) { return prop(*spec, n); };
  EXPECT_TRUE(impliesSemantically(*spec, p("lockcrit"), p("lockcrit"), 4));
  EXPECT_TRUE(impliesSemantically(*spec, p("lockcrit"), p("lockcrit1"), 4));
  EXPECT_FALSE(impliesSemantically(*spec, p("lockcrit1"), p("lockcrit"), 4));
  EXPECT_FALSE(impliesSemantically(*spec, p("allIdle"), p("locked"), 4));
  EXPECT_TRUE(impliesSemantically(*spec, p("mutual"), p("weak"), 4));
}

TEST(Merge, DuplicateAndImplication) {
  auto spec = withProps(corpusSource("mux").value(),
                        "invariant lockcrit(n : NODE) : !(lock = false & st[n] = Critical);\n"
                        "invariant lockcrit2(m : NODE) : !(st[m] = Critical & lock = false);\n"
                        "invariant weak(i : NODE, j : NODE) where i != j : !(st[i] = Critical & st[j] = Critical & lock = true);\n");
  auto accept = [](const ParamInvariant&) { return true; };
  std::vector<ParamInvariant> in{prop(*spec, "lockcrit"), prop(*spec, "lockcrit2")};
  auto r = mergeInvariants(*spec, in, 4, accept);
  ASSERT_EQ(r.invariants.size(), 1u);
  EXPECT_EQ(r.events[0].kind, "duplicate");

  std::vector<ParamInvariant> in2{prop(*spec, "weak"), prop(*spec, "mutual"), prop(*spec, "lockcrit")};
  auto r2 = mergeInvariants(*spec, in2, 4, accept);
  ASSERT_EQ(r2.invariants.size(), 2u);
  EXPECT_EQ(r2.invariants[0].name, "mutual");
  EXPECT_EQ(r2.events[0].kind, "implied");
  EXPECT_TRUE(impliesSemantically(*spec, r2.invariants, in2, 4));
  EXPECT_TRUE(impliesSemantically(*spec, in2, r2.invariants, 4));
}

TEST(Merge, ExistentialPairIsNotWeakened) {
  auto spec = loadCorpus("toy_quorum");
  InstancePool pool(spec);
  ModelChecker mc;
  const ConcreteProtocol& p1 = *pool.get({{1}});
  auto a = promote(p1, parseClause(*spec, p1.vars, "!(resp = true & req[1] = false)"), mc, pool);
  auto b = promote(p1, parseClause(*spec, p1.vars, "!(err[1] = false & resp = true & req[1] = false)"), mc, pool);
  ASSERT_TRUE(a.invariant && b.invariant);
  a.invariant->name = "a";
  b.invariant->name = "b";
  std::vector<ParamInvariant> in{*a.invariant, *b.invariant};
  auto r = mergeInvariants(*spec, in, 3, [](const ParamInvariant&) { return true; });
  EXPECT_TRUE(impliesSemantically(*spec, r.invariants, in, 3));
  EXPECT_TRUE(impliesSemantically(*spec, in, r.invariants, 3));
}
