#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "paraverify/corpus.hpp"
#include "paraverify/report.hpp"

using namespace paraverify;

namespace {

enum Exit { kVerified = 0, kUnresolved = 1, kResource = 2, kInputError = 3 };

int exitCode(Outcome o) {
  switch (o) {
    case Outcome::Verified: return kVerified;
    case Outcome::Unsafe:
    case Outcome::UnresolvedCti: return kUnresolved;
    case Outcome::ResourceLimit: return kResource;
  }
  return kUnresolved;
}

std::string stemOf(const std::string& path) {
  auto slash = path.find_last_of('/');
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  return base.substr(0, base.rfind('.'));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inductive invariant inference for parameterized protocols"};
  app.require_subcommand(1);

  auto* check = app.add_subcommand("check", "verify the safety properties of a protocol");
  std::string file, strategy = "dec", heuristic = "on", symmetry = "on", format = "text", out;
  std::vector<int> finalSizes;
  int implBound = 0;
  std::uint64_t stateLimit = 10'000'000;
  double timeLimit = 0;
  check->add_option("file", file, "protocol source (.pv), or corpus:<name>")->required();
  check->add_option("--strategy", strategy, "generalization strategy")->check(CLI::IsMember({"inc", "dec"}));
  check->add_option("--heuristic", heuristic, "join/diff heuristic")->check(CLI::IsMember({"on", "off"}));
  check->add_option("--symmetry", symmetry, "block symmetric images")->check(CLI::IsMember({"on", "off"}));
  check->add_option("--final-sizes", finalSizes, "sizes for the final inductive check")->delimiter(',');
  check->add_option("--impl-bound", implBound, "size bound for implication checks");
  check->add_option("--state-limit", stateLimit, "maximum number of explored states");
  check->add_option("--time-limit", timeLimit, "seconds before giving up (0 = none)");
  check->add_option("--report", format, "report format")->check(CLI::IsMember({"json", "text"}));
  check->add_option("--out", out, "write the report to this file");

  app.add_subcommand("corpus", "list bundled protocols");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  if (app.got_subcommand("corpus")) {
    for (auto name : corpusNames()) std::cout << name << "\n";
    return 0;
  }

  std::shared_ptr<const ProtocolSpec> spec;
  try {
    if (file.rfind("corpus:", 0) == 0) {
      spec = loadCorpus(file.substr(7));
    } else {
      std::ifstream in(file);
      if (!in) {
        std::cerr << "cannot read " << file << "\n";
        return kInputError;
      }
      std::stringstream buf;
      buf << in.rdbuf();
      spec = std::make_shared<const ProtocolSpec>(parseProtocol(buf.str(), stemOf(file)));
    }
  } catch (const ParseError& e) {
    std::cerr << file << ":" << e.line() << ":" << e.column() << ": " << e.detail() << "\n";
    return kInputError;
  } catch (const std::out_of_range&) {
    std::cerr << "no bundled protocol named " << file.substr(7) << "\n";
    return kInputError;
  }

  PipelineConfig cfg;
  cfg.strategy = strategy == "inc" ? Strategy::Increasing : Strategy::Decreasing;
  cfg.heuristic = heuristic == "on";
  cfg.symmetry = symmetry == "on";
  cfg.finalSizes = finalSizes;
  cfg.implBound = implBound;
  cfg.stateLimit = stateLimit;
  cfg.timeLimitSeconds = timeLimit;

  VerificationReport rep;
  try {
    rep = runPipeline(spec, cfg);
  } catch (const ConcretizationError& e) {
    std::cerr << e.what() << "\n";
    return kInputError;
  }
  const std::string text = emitReport(rep, format == "json" ? ReportFormat::Json : ReportFormat::Text);
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream o(out);
    o << text;
    if (!o) {
      std::cerr << "cannot write " << out << "\n";
      return kInputError;
    }
  }
  return exitCode(rep.outcome);
}
