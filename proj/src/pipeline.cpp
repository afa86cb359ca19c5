#include "paraverify/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <set>

#include "paraverify/checker.hpp"
#include "paraverify/cti.hpp"
#include "paraverify/symmetry.hpp"

namespace paraverify {

namespace {

using Clock = std::chrono::steady_clock;

double micros(Clock::time_point from) {
  return std::chrono::duration<double, std::micro>(Clock::now() - from).count();
}

// Instance of a property with binder values 0..m-1 per type, in binder order.
std::optional<Clause> fixedInstance(const ConcreteProtocol& p, const SafetyProperty& f) {
  std::vector<int> next(p.spec->paramTypes.size(), 0), bv;
  for (const auto& b : f.binders) bv.push_back(next[b.type]++);
  auto c = groundClause(*p.spec, p.vars, f.body, bv);
  if (!c) return std::nullopt;
  return canonicalForm(p.vars, *c);
}

struct Target {
  Clause clause;  // normalized: values of each type are 0..m-1
  std::vector<int> counts;
};

class Deadline {
public:
  Deadline(double seconds) : limit_(seconds), start_(Clock::now()) {}
  void check() const {
    if (limit_ <= 0) return;
    const double elapsed = std::chrono::duration<double>(Clock::now() - start_).count();
    if (elapsed > limit_) throw ResourceLimitError("time limit exceeded");
  }

private:
  double limit_;
  Clock::time_point start_;
};

}  // namespace

std::string outcomeName(Outcome o) {
  switch (o) {
    case Outcome::Verified: return "verified";
    case Outcome::Unsafe: return "unsafe";
    case Outcome::UnresolvedCti: return "unresolved-cti";
    case Outcome::ResourceLimit: return "resource-limit";
  }
  return "?";
}

Concretization referenceConcretization(const ProtocolSpec& spec) {
  Concretization n{std::vector<int>(spec.paramTypes.size(), 1)};
  for (const auto& f : spec.properties) {
    if (f.trivial) continue;
    const Concretization m = minConcretization(spec, f);
    for (std::size_t t = 0; t < n.sizes.size(); ++t) n.sizes[t] = std::max(n.sizes[t], m.sizes[t]);
  }
  return n;
}

std::vector<FinalCheck> finalInductiveCheck(const std::shared_ptr<const ProtocolSpec>& spec,
                                            const std::vector<ParamInvariant>& invs,
                                            const std::vector<Concretization>& sizes,
                                            ModelChecker& mc, InstancePool& pool) {
  std::vector<ParamInvariant> safety;
  for (const auto& f : spec->properties)
    if (!f.trivial) safety.push_back(fromSafety(f));
  std::vector<FinalCheck> out;
  for (const auto& s : sizes) {
    FinalCheck fc;
    fc.sizes = formatSizes(*spec, s);
    const ConcreteProtocol* p = pool.get(s);
    if (!p) {
      fc.status = "skipped";
      fc.note = "size below the binder minimum";
      out.push_back(fc);
      continue;
    }
    std::vector<GroundConstraint> ground;
    for (const auto& inv : invs)
      for (auto& g : groundExpand(*spec, inv, p->vars, p->sizes)) ground.push_back(std::move(g));
    CheckResult r = mc.checkInductive(*p, ground);
    if (!r.holds()) {
      fc.status = "fail";
      fc.witness = renderState(*spec, p->vars, *r.witness);
      if (r.failedRule) {
        fc.rule = *r.failedRule;
        fc.note = "consecution fails";
      } else {
        fc.note = "initiation fails";
      }
    } else if (!impliesAt(*spec, s, invs, safety)) {
      fc.status = "fail";
      fc.note = "invariants do not imply the safety properties";
    } else {
      fc.status = "pass";
    }
    out.push_back(fc);
  }
  return out;
}

VerificationReport runPipeline(std::shared_ptr<const ProtocolSpec> spec, const PipelineConfig& cfg) {
  const auto start = Clock::now();
  VerificationReport rep;
  rep.spec = spec;
  rep.protocol = spec->name;
  rep.config = cfg;
  rep.typeNames = spec->paramTypes;
  rep.notes.push_back("safety properties are processed jointly with one blocking store");

  ModelChecker mc(CheckerOptions{cfg.stateLimit});
  InstancePool pool(spec);
  Deadline deadline(cfg.timeLimitSeconds);
  const Concretization ref = referenceConcretization(*spec);
  rep.referenceSizes = ref.sizes;
  int bound = cfg.implBound;
  if (bound <= 0) bound = *std::max_element(ref.sizes.begin(), ref.sizes.end()) + 2;
  if (ref.sizes.empty()) bound = std::max(bound, 1);
  rep.notes.push_back("implication checks are bounded to sizes <= " + std::to_string(bound));

  auto finish = [&]() {
    rep.counts.checkerCalls = mc.calls();
    rep.counts.cacheHits = mc.cacheHits();
    rep.timingsMicros["total"] = micros(start);
    return rep;
  };

  try {
    auto phase = Clock::now();
    const ConcreteProtocol* pp = pool.get(ref);
    if (!pp) throw ConcretizationError("cannot concretize at " + formatSizes(*spec, ref));
    const ConcreteProtocol& p = *pp;

    // Safety pre-pass on the reference instance.
    const StateSet& reach = mc.reachableStates(p);
    rep.counts.reachableStates = reach.size();
    for (const auto& s : reach.states) {
      for (const auto& pi : p.properties) {
        if (pi.clause.holds(s)) continue;
        rep.outcome = Outcome::Unsafe;
        rep.failingProperty = renderClause(*spec, p.vars, pi.clause);
        rep.witness = renderState(*spec, p.vars, s);
        rep.message = "safety property " + spec->properties[pi.property].name +
                      " is violated by a reachable state at " + formatSizes(*spec, ref);
        rep.timingsMicros["prepass"] = micros(phase);
        return finish();
      }
    }
    rep.timingsMicros["prepass"] = micros(phase);

    // Invariant search on the reference instance.
    phase = Clock::now();
    BlockedAssertionStore store;
    GeneralizeContext ctx;
    ctx.strategy = cfg.strategy;
    ctx.heuristic = cfg.heuristic;
    for (const auto& pi : p.properties) {
      const Clause c = canonicalForm(p.vars, pi.clause);
      blockAssertion(p.vars, c, {}, store);
      ctx.addKnown(c);
    }
    std::deque<Target> work;
    std::set<Clause> queued;
    for (const auto& f : spec->properties) {
      if (f.trivial) continue;
      auto c = fixedInstance(p, f);
      if (!c) continue;
      Target t;
      t.clause = normalizeValues(p, *c, &t.counts);
      if (queued.insert(t.clause).second) work.push_back(std::move(t));
    }
    std::map<std::pair<int, std::vector<int>>, int> ruleIndex;
    for (std::size_t i = 0; i < p.rules.size(); ++i)
      ruleIndex[{p.rules[i].rule, p.rules[i].binderValues}] = static_cast<int>(i);

    ReferenceChecker checker(mc, p);
    rep.timingsMicros["generalize"] = 0;
    std::vector<Clause> found;
    while (!work.empty()) {
      const Target target = work.front();
      work.pop_front();
      for (std::size_t r = 0; r < spec->rules.size(); ++r) {
        for (const auto& inst : enumerateRuleInstances(*spec, spec->rules[r], target.counts, ref)) {
          const int ri = ruleIndex.at({static_cast<int>(r), inst});
          while (true) {
            deadline.check();
            ++rep.counts.obligations;
            auto o = buildIndObligation(p, ri, target.clause);
            if (!o) {
              ++rep.counts.trivialObligations;
              break;
            }
            ++rep.counts.solverCalls;
            auto sol = solveObligation(p, *o, store);
            if (!sol) break;
            ++rep.counts.ctis;
            const auto genStart = Clock::now();
            GeneralizeResult g = generalize(*sol, ctx, checker);
            rep.timingsMicros["generalize"] += micros(genStart);
            rep.counts.generalizeCalls += g.calls();
            if (!g.invariant || !isLegal(p.vars, *g.invariant, ctx)) {
              rep.outcome = Outcome::UnresolvedCti;
              rep.failingProperty = renderClause(*spec, p.vars, target.clause);
              rep.failingRule = p.rules[ri].name;
              rep.witness = renderEquations(*spec, p.vars, *sol);
              rep.message = g.invariant ? "generalization returned a known invariant"
                                        : "no generalization of the CTI is an invariant";
              rep.counts.blockedAssertions = store.size();
              rep.timingsMicros["invariant_search"] = micros(phase);
              return finish();
            }
            const Clause aux = canonicalForm(p.vars, *g.invariant);
            AuxRecord rec;
            rec.name = "aux" + std::to_string(found.size() + 1);
            rec.target = renderClause(*spec, p.vars, target.clause);
            rec.rule = p.rules[ri].name;
            rec.solution = renderEquations(*spec, p.vars, *sol);
            rec.path = g.path;
            rec.checkerCalls = g.calls();
            rec.concrete = renderClause(*spec, p.vars, aux);
            std::vector<Clause> images;
            if (cfg.symmetry) images = getSymmetryInvs(p, aux, provisionalQuantInfo(p, aux));
            rec.symmetricImages = static_cast<int>(images.size());
            blockAssertion(p.vars, aux, images, store);
            ctx.addKnown(aux);
            for (const auto& im : images) ctx.addKnown(im);
            found.push_back(aux);
            rep.auxiliaries.push_back(std::move(rec));
            Target next;
            next.clause = normalizeValues(p, aux, &next.counts);
            if (queued.insert(next.clause).second) work.push_back(std::move(next));
          }
        }
      }
    }
    rep.counts.blockedAssertions = store.size();
    rep.timingsMicros["invariant_search"] = micros(phase);

    // Promotion.
    phase = Clock::now();
    std::vector<ParamInvariant> all;
    for (const auto& f : spec->properties)
      if (!f.trivial) all.push_back(fromSafety(f));
    for (std::size_t i = 0; i < found.size(); ++i) {
      deadline.check();
      PromotionResult pr = promote(p, found[i], mc, pool);
      AuxRecord& rec = rep.auxiliaries[i];
      rec.saturation = pr.saturation;
      rec.groups = pr.groups;
      rec.validated = pr.validated;
      if (pr.invariant) {
        pr.invariant->name = rec.name;
        rec.promoted = renderInvariant(*spec, *pr.invariant);
      }
      if (!pr.validated) {
        rep.outcome = Outcome::UnresolvedCti;
        rep.failingProperty = rec.concrete;
        rep.message = "promotion of " + rec.name + " failed: " + pr.failure;
        rep.timingsMicros["promotion"] = micros(phase);
        return finish();
      }
      all.push_back(*pr.invariant);
    }
    rep.timingsMicros["promotion"] = micros(phase);

    // Merging.
    phase = Clock::now();
    rep.unmerged = all;
    MergeResult merged = mergeInvariants(*spec, all, bound, [&](const ParamInvariant& inv) {
      return checkParamInvariant(mc, p, inv).holds();
    });
    rep.mergeEvents = merged.events;
    for (const auto& inv : merged.invariants) {
      const bool safety = spec->findProperty(inv.name) >= 0;
      rep.invariants.push_back({inv.name, safety ? "safety" : "auxiliary", renderInvariant(*spec, inv), inv});
    }
    rep.timingsMicros["merge"] = micros(phase);

    // Final inductive check.
    phase = Clock::now();
    std::vector<Concretization> sizes;
    if (cfg.finalSizes.empty()) {
      for (int k = 0; k <= 2; ++k) {
        Concretization c = ref;
        for (auto& s : c.sizes) s += k;
        sizes.push_back(c);
      }
    } else {
      for (int s : cfg.finalSizes) sizes.push_back({std::vector<int>(spec->paramTypes.size(), s)});
    }
    rep.finalChecks = finalInductiveCheck(spec, merged.invariants, sizes, mc, pool);
    rep.timingsMicros["final_check"] = micros(phase);
    bool anyPass = false;
    for (const auto& fc : rep.finalChecks) {
      anyPass |= fc.status == "pass";
      if (fc.status != "fail") continue;
      rep.outcome = Outcome::UnresolvedCti;
      rep.message = "final inductive check fails at " + fc.sizes + " (" + fc.note + ")";
      rep.failingRule = fc.rule;
      rep.witness = fc.witness;
      return finish();
    }
    if (!anyPass) {
      rep.outcome = Outcome::UnresolvedCti;
      rep.message = "no final check size could be instantiated";
      return finish();
    }
    rep.outcome = Outcome::Verified;
  } catch (const ResourceLimitError& e) {
    rep.outcome = Outcome::ResourceLimit;
    rep.message = e.what();
  }
  return finish();
}

}  // namespace paraverify
