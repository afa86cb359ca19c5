#pragma once

// Brute-force reference implementations used by the tests.

#include <functional>
#include <random>
#include <set>
#include <vector>

#include "paraverify/ground.hpp"

namespace oracle {

using paraverify::Clause;
using paraverify::ConcreteProtocol;
using paraverify::GLit;
using paraverify::State;

inline void forEachState(const ConcreteProtocol& p, const std::function<void(const State&)>& f) {
  State s(p.vars.size(), 0);
  while (true) {
    f(s);
    std::size_t i = 0;
    while (i < s.size() && ++s[i] == p.vars[i].domain) s[i++] = 0;
    if (i == s.size()) return;
  }
}

inline std::set<State> reachable(const ConcreteProtocol& p) {
  std::set<State> r(p.initialStates.begin(), p.initialStates.end());
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<State> add;
    for (const auto& s : r)
      for (const auto& rule : p.rules) {
        if (!rule.satisfiable) continue;
        bool on = true;
        for (const auto& g : rule.guard) on &= g.holds(s);
        if (!on) continue;
        State t = s;
        for (const auto& a : rule.action) t[a.target] = a.fromVar ? s[a.value] : a.value;
        if (!r.count(t)) add.push_back(t);
      }
    for (auto& t : add) grew |= r.insert(t).second;
  }
  return r;
}

inline bool invariantHolds(const ConcreteProtocol& p, const Clause& c) {
  for (const auto& s : reachable(p))
    if (!c.holds(s)) return false;
  return true;
}

// Inductiveness by enumerating every total state.
inline bool inductive(const ConcreteProtocol& p, const std::vector<Clause>& invs) {
  auto all = [&](const State& s) {
    for (const auto& c : invs)
      if (!c.holds(s)) return false;
    return true;
  };
  for (const auto& s : p.initialStates)
    if (!all(s)) return false;
  bool ok = true;
  forEachState(p, [&](const State& s) {
    if (!ok || !all(s)) return;
    for (const auto& r : p.rules)
      if (r.enabled(s) && !all(r.apply(s))) ok = false;
  });
  return ok;
}

inline std::uint64_t totalStates(const ConcreteProtocol& p) {
  std::uint64_t n = 1;
  for (const auto& v : p.vars.vars()) n *= v.domain;
  return n;
}

// Random clause of 1..maxLits equality literals over distinct variables.
inline Clause randomClause(const ConcreteProtocol& p, std::mt19937& rng, int maxLits) {
  std::uniform_int_distribution<int> len(1, maxLits);
  std::uniform_int_distribution<int> var(0, static_cast<int>(p.vars.size()) - 1);
  const int n = len(rng);
  std::set<int> used;
  Clause c;
  for (int i = 0; i < n && used.size() < p.vars.size(); ++i) {
    int v = var(rng);
    while (used.count(v)) v = var(rng);
    used.insert(v);
    std::uniform_int_distribution<int> val(0, p.vars[v].domain - 1);
    c.lits.push_back(GLit{v, true, false, val(rng)});
  }
  return c;
}

}  // namespace oracle
