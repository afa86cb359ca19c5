#include <gtest/gtest.h>

#include <json.hpp>

#include "paraverify/corpus.hpp"
#include "paraverify/pipeline.hpp"
#include "paraverify/report.hpp"

using namespace paraverify;

TEST(Report, TextCountsInvariants) {
  auto r = runPipeline(loadCorpus("mux"), {});
  const std::string text = emitReport(r, ReportFormat::Text);
  EXPECT_NE(text.find("2 parameterized invariants"), std::string::npos) << text;
  EXPECT_NE(text.find("verified"), std::string::npos);
}

TEST(Report, JsonRoundTripsByteForByte) {
  for (auto name : {"mux", "toy_quorum", "mux_broken"}) {
    const std::string once = emitReport(runPipeline(loadCorpus(name), {}), ReportFormat::Json);
    const std::string twice = nlohmann::json::parse(once).dump(2) + "\n";
    EXPECT_EQ(once, twice) << name;
  }
}

TEST(Report, SchemaFields) {
  auto j = nlohmann::json::parse(emitReport(runPipeline(loadCorpus("toy_quorum"), {}), ReportFormat::Json));
  EXPECT_EQ(j["schema_version"], kReportSchemaVersion);
  EXPECT_EQ(j["protocol"], "toy_quorum");
  EXPECT_EQ(j["outcome"], "verified");
  for (const char* key : {"checker_calls", "solver_calls", "ctis", "trivial_obligations"})
    EXPECT_TRUE(j["counts"].contains(key)) << key;
  ASSERT_FALSE(j["invariants"].empty());
  for (const auto& inv : j["invariants"]) {
    EXPECT_TRUE(inv.contains("text"));
    EXPECT_TRUE(inv.contains("ast"));
  }
  EXPECT_TRUE(j["timings"].contains("total"));
  EXPECT_FALSE(withoutTimings(j).contains("timings"));
}

TEST(Report, UnresolvedNamesThePair) {
  VerificationReport r;
  r.spec = loadCorpus("mux");
  r.protocol = "mux";
  r.outcome = Outcome::UnresolvedCti;
  r.message = "no generalization of the CTI is an invariant";
  r.failingRule = "crit(1)";
  r.failingProperty = "!(st[1] = Critical & st[2] = Critical)";
  r.witness = "{st[1] = Trying, lock = false, st[2] = Critical}";
  const std::string text = emitReport(r, ReportFormat::Text);
  EXPECT_NE(text.find("crit(1)"), std::string::npos) << text;
  EXPECT_NE(text.find("!(st[1] = Critical & st[2] = Critical)"), std::string::npos) << text;
  auto j = nlohmann::json::parse(emitReport(r, ReportFormat::Json));
  EXPECT_EQ(j["outcome"], "unresolved-cti");
  EXPECT_EQ(j["failure"]["rule"], "crit(1)");
  EXPECT_EQ(j["failure"]["property"], "!(st[1] = Critical & st[2] = Critical)");
}
