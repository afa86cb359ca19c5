#include <gtest/gtest.h>

#include <algorithm>

#include "paraverify/corpus.hpp"
#include "paraverify/protocol.hpp"

using namespace paraverify;

namespace {

const char* kMux = R"(type NODE;
enum LOC { Idle, Trying, Critical };
var st   : array[NODE] of LOC;
var lock : boolean;
init { forall n : NODE . st[n] = Idle; lock = false; }
rule try(i : NODE)  guard st[i] = Idle                    action st[i] := Trying;
rule crit(i : NODE) guard st[i] = Trying & lock = false   action st[i] := Critical, lock := true;
rule exit(i : NODE) guard st[i] = Critical                action st[i] := Idle, lock := false;
invariant mutual(i : NODE, j : NODE) where i != j : !(st[i] = Critical & st[j] = Critical);
)";

ParseError parseFailure(const std::string& text) {
  try {
    parseProtocol(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "expected a parse error for:\n" << text;
  return ParseError(0, 0, "none");
}

}  // namespace

TEST(Parse, MuxDeclarationCounts) {
  const ProtocolSpec spec = parseProtocol(kMux, "mux");
  EXPECT_EQ(spec.paramTypes.size(), 1u);
  EXPECT_EQ(spec.rules.size(), 3u);
  EXPECT_EQ(spec.properties.size(), 1u);
  EXPECT_EQ(spec.variables.size(), 2u);
  EXPECT_EQ(spec.properties[0].distinct.size(), 1u);
  EXPECT_EQ(spec.rules[1].guard.size(), 2u);
  EXPECT_EQ(spec.rules[1].action.size(), 2u);
}

TEST(Parse, BundledMuxMatchesReferenceText) {
  auto bundled = loadCorpus("mux");
  EXPECT_EQ(*bundled, parseProtocol(kMux, "mux"));
}

TEST(Parse, UndeclaredBinderIsReported) {
  const std::string src = "type NODE;\nenum L { A, B };\nvar st : array[NODE] of L;\n"
                          "rule r guard true action st[i] := A;\n";
  ParseError e = parseFailure(src);
  EXPECT_NE(e.detail().find("unresolved identifier 'i'"), std::string::npos) << e.what();
  EXPECT_EQ(e.line(), 4);
}

TEST(Parse, EmptyFile) {
  ParseError e = parseFailure("");
  EXPECT_NE(e.detail().find("expected declaration"), std::string::npos);
  parseFailure("   // only a comment\n");
}

TEST(Parse, DuplicateDeclaration) {
  ParseError e = parseFailure("type NODE;\ntype NODE;\n");
  EXPECT_NE(e.detail().find("duplicate declaration"), std::string::npos);
  EXPECT_EQ(e.line(), 2);
}

TEST(Parse, ArityMismatch) {
  ParseError e = parseFailure(
      "type NODE;\nvar x : array[NODE] of boolean;\nrule r(i : NODE) guard x = true action x[i] := false;\n");
  EXPECT_NE(e.detail().find("arity"), std::string::npos) << e.what();
}

TEST(Parse, AssignedTwice) {
  parseFailure("var b : boolean;\nrule r guard true action b := true, b := false;\n");
}

TEST(Parse, TypeMismatch) {
  parseFailure("enum L { A, B };\nvar b : boolean;\nrule r guard b = A action b := true;\n");
}

TEST(Parse, ColumnPointsAtOffendingToken) {
  ParseError e = parseFailure("type NODE;\nvar x : boolean;\nrule r guard y = true action x := true;\n");
  EXPECT_EQ(e.line(), 3);
  EXPECT_EQ(e.column(), 14);
}

TEST(Parse, ForallGuardAndTwoDimensionalArray) {
  auto spec = loadCorpus("mux2d");
  bool twoDim = false;
  for (const auto& v : spec->variables) twoDim |= v.indexTypes.size() == 2;
  EXPECT_TRUE(twoDim);
  auto quorum = loadCorpus("toy_quorum");
  bool hasForall = false;
  for (const auto& r : quorum->rules) hasForall |= r.forallLiteral.has_value();
  EXPECT_TRUE(hasForall);
}

TEST(Parse, PrintParseRoundTripOnCorpus) {
  for (const auto& name : corpusNames()) {
    auto spec = loadCorpus(name);
    const std::string printed = printProtocol(*spec);
    const ProtocolSpec again = parseProtocol(printed, spec->name);
    EXPECT_EQ(again, *spec) << name << "\n" << printed;
    EXPECT_EQ(printProtocol(again), printed) << name;
  }
}

TEST(Parse, TrivialProperty) {
  auto spec = parseProtocol("var b : boolean;\ninit { b = false; }\nrule r guard true action b := true;\n"
                            "invariant ok : true;\n");
  ASSERT_EQ(spec.properties.size(), 1u);
  EXPECT_TRUE(spec.properties[0].trivial);
}

TEST(Corpus, ListsBundledProtocols) {
  const auto names = corpusNames();
  for (const char* n : {"mux", "mux2d", "lock_server", "decentralized_lock", "two_phase_commit",
                        "toy_quorum", "mux_broken"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
  }
  EXPECT_THROW(loadCorpus("nope"), std::out_of_range);
}
