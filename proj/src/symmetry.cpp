#include "paraverify/symmetry.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace paraverify {

namespace {

GLit orient(const GroundVarTable& vars, GLit l) {
  if (l.rhsVar && vars.nameRank(l.rhs) < vars.nameRank(l.var)) std::swap(l.var, l.rhs);
  return l;
}

bool litLess(const GroundVarTable& vars, const GLit& a, const GLit& b) {
  const int ra = vars.nameRank(a.var), rb = vars.nameRank(b.var);
  if (ra != rb) return ra < rb;
  if (a.rhsVar != b.rhsVar) return !a.rhsVar;
  const int va = a.rhsVar ? vars.nameRank(a.rhs) : a.rhs;
  const int vb = b.rhsVar ? vars.nameRank(b.rhs) : b.rhs;
  if (va != vb) return va < vb;
  return a.equal > b.equal;
}

void allPermutations(std::vector<int> values, int n,
                     std::vector<std::vector<int>>& out) {
  // Permutations of `values` among themselves; all other values fixed.
  std::vector<int> targets = values;
  std::sort(values.begin(), values.end());
  std::sort(targets.begin(), targets.end());
  do {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = 0; i < values.size(); ++i) perm[values[i]] = targets[i];
    out.push_back(std::move(perm));
  } while (std::next_permutation(targets.begin(), targets.end()));
}

int mapVar(const ConcreteProtocol& p, int v, const std::vector<std::vector<int>>& perms) {
  const GroundVar& g = p.vars[v];
  const VarDecl& d = p.spec->variables[g.decl];
  std::vector<int> idx = g.indices;
  bool changed = false;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto& perm = perms[d.indexTypes[k]];
    if (!perm.empty()) {
      idx[k] = perm[idx[k]];
      changed = true;
    }
  }
  return changed ? p.vars.id(g.decl, idx) : v;
}

}  // namespace

Clause canonicalForm(const GroundVarTable& vars, Clause c) {
  for (auto& l : c.lits) l = orient(vars, l);
  std::sort(c.lits.begin(), c.lits.end(),
            [&](const GLit& a, const GLit& b) { return litLess(vars, a, b); });
  c.lits.erase(std::unique(c.lits.begin(), c.lits.end()), c.lits.end());
  return c;
}

GroundConstraint canonicalForm(const GroundVarTable& vars, GroundConstraint g) {
  for (auto& c : g.alternatives) c = canonicalForm(vars, std::move(c));
  std::sort(g.alternatives.begin(), g.alternatives.end(), [&](const Clause& a, const Clause& b) {
    return std::lexicographical_compare(
        a.lits.begin(), a.lits.end(), b.lits.begin(), b.lits.end(),
        [&](const GLit& x, const GLit& y) { return litLess(vars, x, y); });
  });
  g.alternatives.erase(std::unique(g.alternatives.begin(), g.alternatives.end()),
                       g.alternatives.end());
  return g;
}

std::vector<int> typesIn(const ConcreteProtocol& p, const Clause& c) {
  std::vector<int> out;
  for (std::size_t t = 0; t < p.spec->paramTypes.size(); ++t) {
    for (const auto& l : c.lits) {
      if (!paramValuesOf(*p.spec, p.vars, l, static_cast<int>(t)).empty()) {
        out.push_back(static_cast<int>(t));
        break;
      }
    }
  }
  return out;
}

QuantInfo provisionalQuantInfo(const ConcreteProtocol& p, const Clause& c) {
  QuantInfo info(p.spec->paramTypes.size());
  for (int t : typesIn(p, c)) info[t] = TypeQuantInfo{};
  return info;
}

Clause permute(const ConcreteProtocol& p, const Clause& c,
               const std::vector<std::vector<int>>& perms) {
  Clause out;
  for (const auto& l : c.lits) {
    GLit m = l;
    m.var = mapVar(p, l.var, perms);
    if (l.rhsVar) {
      m.rhs = mapVar(p, l.rhs, perms);
    } else {
      const Sort& s = p.spec->variables[p.vars[l.var].decl].sort;
      if (s.kind == SortKind::Param && !perms[s.index].empty()) m.rhs = perms[s.index][l.rhs];
    }
    out.lits.push_back(m);
  }
  return out;
}

State permuteState(const ConcreteProtocol& p, const State& s,
                   const std::vector<std::vector<int>>& perms) {
  State out(s.size());
  for (std::size_t v = 0; v < s.size(); ++v) {
    int value = s[v];
    const Sort& sort = p.spec->variables[p.vars[v].decl].sort;
    if (sort.kind == SortKind::Param && !perms[sort.index].empty()) value = perms[sort.index][value];
    out[mapVar(p, static_cast<int>(v), perms)] = static_cast<std::uint8_t>(value);
  }
  return out;
}

PermutationPlan makePermutationPlan(const ConcreteProtocol& p, const QuantInfo& info,
                                    const std::vector<int>& typesUsed) {
  PermutationPlan plan;
  plan.perTypePermutations.resize(p.spec->paramTypes.size());
  for (int t : typesUsed) {
    if (!info[t]) {
      throw std::invalid_argument("type " + p.spec->paramTypes[t] +
                                  " has no quantifier classification");
    }
    const int n = p.sizes.sizes[t];
    auto& out = plan.perTypePermutations[t];
    if (info[t]->cls == QuantClass::ForallOnly) {
      std::vector<int> all(n);
      std::iota(all.begin(), all.end(), 0);
      allPermutations(all, n, out);
      continue;
    }
    // Existential part and forall part are permuted separately.
    std::vector<int> ex = info[t]->existsValues;
    if (info[t]->cls == QuantClass::ExistsOnly && ex.empty()) {
      ex.resize(n);
      std::iota(ex.begin(), ex.end(), 0);
    }
    std::vector<int> rest;
    for (int v = 0; v < n; ++v)
      if (std::find(ex.begin(), ex.end(), v) == ex.end()) rest.push_back(v);
    std::vector<std::vector<int>> exPerms, restPerms;
    allPermutations(ex, n, exPerms);
    allPermutations(rest, n, restPerms);
    for (const auto& a : exPerms)
      for (const auto& b : restPerms) {
        std::vector<int> perm(n);
        for (int v = 0; v < n; ++v) perm[v] = b[a[v]];
        out.push_back(std::move(perm));
      }
  }
  return plan;
}

std::vector<Clause> getSymmetryInvs(const ConcreteProtocol& p, const Clause& inv,
                                    const QuantInfo& info) {
  const std::vector<int> used = typesIn(p, inv);
  const PermutationPlan plan = makePermutationPlan(p, info, used);
  const Clause original = canonicalForm(p.vars, inv);
  std::set<Clause> seen{original};
  std::vector<Clause> out;
  std::vector<std::vector<int>> current(p.spec->paramTypes.size());
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == used.size()) {
      Clause img = canonicalForm(p.vars, permute(p, inv, current));
      if (seen.insert(img).second) out.push_back(std::move(img));
      return;
    }
    for (const auto& perm : plan.perTypePermutations[used[i]]) {
      current[used[i]] = perm;
      self(self, i + 1);
    }
    current[used[i]].clear();
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end(), [&](const Clause& a, const Clause& b) {
    return canonicalForm(p.vars, a).lits < canonicalForm(p.vars, b).lits;
  });
  return out;
}

Clause normalizeValues(const ConcreteProtocol& p, const Clause& c, std::vector<int>* counts) {
  const std::size_t types = p.spec->paramTypes.size();
  std::vector<std::vector<int>> perms(types);
  if (counts) counts->assign(types, 0);
  for (std::size_t t = 0; t < types; ++t) {
    std::set<int> used;
    for (const auto& l : c.lits)
      for (int v : paramValuesOf(*p.spec, p.vars, l, static_cast<int>(t))) used.insert(v);
    if (counts) (*counts)[t] = static_cast<int>(used.size());
    if (used.empty()) continue;
    const int n = p.sizes.sizes[t];
    std::vector<int> perm(n, -1);
    int next = 0;
    for (int v : used) perm[v] = next++;
    for (int v = 0; v < n; ++v)
      if (perm[v] < 0) perm[v] = next++;
    perms[t] = std::move(perm);
  }
  return canonicalForm(p.vars, permute(p, c, perms));
}

}  // namespace paraverify
