#include "paraverify/param.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <stdexcept>

#include "paraverify/solver.hpp"
#include "paraverify/symmetry.hpp"

namespace paraverify {

namespace {

const Sort& varSort(const ProtocolSpec& spec, const GroundVarTable& vars, int v) {
  return spec.variables[vars[v].decl].sort;
}

// Re-targets a literal to another variable table, mapping value `from` of
// type t to `to` (no renaming when from < 0).
GLit transfer(const ProtocolSpec& spec, const GroundVarTable& src, const GroundVarTable& dst,
              const GLit& l, int t, int from, int to) {
  auto mapVar = [&](int v) {
    const GroundVar& g = src[v];
    std::vector<int> idx = g.indices;
    const VarDecl& d = spec.variables[g.decl];
    for (std::size_t k = 0; k < idx.size(); ++k)
      if (d.indexTypes[k] == t && idx[k] == from) idx[k] = to;
    return dst.id(g.decl, idx);
  };
  GLit out = l;
  out.var = mapVar(l.var);
  if (l.rhsVar) {
    out.rhs = mapVar(l.rhs);
  } else {
    const Sort& s = varSort(spec, src, l.var);
    if (s.kind == SortKind::Param && s.index == t && l.rhs == from) out.rhs = to;
  }
  return out;
}

bool mentions(const ProtocolSpec& spec, const GroundVarTable& vars, const GLit& l, int t, int v) {
  auto vals = paramValuesOf(spec, vars, l, t);
  return std::find(vals.begin(), vals.end(), v) != vals.end();
}

std::string binderPrefix(const ProtocolSpec& spec, int type) {
  std::string base(1, static_cast<char>(std::tolower(static_cast<unsigned char>(spec.paramTypes[type][0]))));
  auto taken = [&](const std::string& s) {
    if (spec.findVariable(s) >= 0 || spec.findParamType(s) >= 0) return true;
    for (const auto& e : spec.enumTypes)
      if (e.name == s || std::find(e.members.begin(), e.members.end(), s) != e.members.end())
        return true;
    return false;
  };
  for (int i = 1; i <= 9; ++i)
    if (taken(base + std::to_string(i))) {
      base += "_";
      break;
    }
  return base;
}

// Converts a canonical clause to a quantified invariant. `quant` decides the
// quantifier of each (type, value) pair occurring in the clause.
ParamInvariant abstractClause(const ConcreteProtocol& p, const Clause& omega,
                              const std::map<std::pair<int, int>, Quantifier>& quant) {
  const ProtocolSpec& spec = *p.spec;
  std::vector<std::pair<int, int>> order;  // (type, value) by first occurrence
  auto note = [&](int t, int v) {
    if (std::find(order.begin(), order.end(), std::make_pair(t, v)) == order.end())
      order.push_back({t, v});
  };
  auto noteVar = [&](int var) {
    const GroundVar& g = p.vars[var];
    const VarDecl& d = spec.variables[g.decl];
    for (std::size_t k = 0; k < g.indices.size(); ++k) note(d.indexTypes[k], g.indices[k]);
  };
  for (const auto& l : omega.lits) {
    noteVar(l.var);
    if (l.rhsVar) {
      noteVar(l.rhs);
    } else if (const Sort& s = varSort(spec, p.vars, l.var); s.kind == SortKind::Param) {
      note(s.index, l.rhs);
    }
  }
  std::stable_partition(order.begin(), order.end(),
                        [&](const auto& tv) { return quant.at(tv) == Quantifier::Forall; });

  ParamInvariant inv;
  std::map<std::pair<int, int>, int> binderOf;
  std::map<int, int> counter;
  for (const auto& tv : order) {
    const int id = static_cast<int>(inv.binders.size());
    binderOf[tv] = id;
    inv.binders.push_back({binderPrefix(spec, tv.first) + std::to_string(++counter[tv.first]), tv.first});
    inv.quantifiers.push_back(quant.at(tv));
  }
  const std::size_t fc = inv.forallCount();
  for (std::size_t a = 0; a < inv.binders.size(); ++a)
    for (std::size_t b = a + 1; b < inv.binders.size(); ++b)
      if (inv.binders[a].type == inv.binders[b].type && a < fc)
        inv.distinct.push_back({static_cast<int>(a), static_cast<int>(b)});

  auto termOf = [&](int var) {
    const GroundVar& g = p.vars[var];
    const VarDecl& d = spec.variables[g.decl];
    Term t;
    t.kind = Term::Kind::Var;
    t.var = g.decl;
    for (std::size_t k = 0; k < g.indices.size(); ++k)
      t.indices.push_back(binderOf.at({d.indexTypes[k], g.indices[k]}));
    return t;
  };
  for (const auto& l : omega.lits) {
    Literal lit;
    lit.lhs = termOf(l.var);
    lit.equal = l.equal;
    if (l.rhsVar) {
      lit.rhs = termOf(l.rhs);
    } else if (const Sort& s = varSort(spec, p.vars, l.var); s.kind == SortKind::Param) {
      lit.rhs.kind = Term::Kind::Binder;
      lit.rhs.binder = binderOf.at({s.index, l.rhs});
    } else {
      lit.rhs.kind = Term::Kind::Const;
      lit.rhs.value = l.rhs;
    }
    inv.body.push_back(lit);
  }
  return inv;
}

Term renameTerm(Term t, const std::vector<int>& map) {
  for (auto& i : t.indices) i = map[i];
  if (t.kind == Term::Kind::Binder) t.binder = map[t.binder];
  return t;
}

// Minimum size of type t for the invariant's binders to be instantiable.
int need(const ParamInvariant& inv, int t) {
  int forall = 0;
  bool exists = false;
  for (std::size_t i = 0; i < inv.binders.size(); ++i) {
    if (inv.binders[i].type != t) continue;
    if (inv.quantifiers[i] == Quantifier::Forall) ++forall;
    else exists = true;
  }
  return forall + (exists ? 1 : 0);
}

}  // namespace

std::size_t ParamInvariant::forallCount() const {
  return static_cast<std::size_t>(
      std::count(quantifiers.begin(), quantifiers.end(), Quantifier::Forall));
}

SaturationReport computeSaturation(const ConcreteProtocol& p, const Clause& omega) {
  SaturationReport out;
  for (std::size_t t = 0; t < p.spec->paramTypes.size(); ++t) {
    std::set<int> vals;
    for (const auto& l : omega.lits)
      for (int v : paramValuesOf(*p.spec, p.vars, l, static_cast<int>(t))) vals.insert(v);
    if (vals.empty()) continue;
    out.push_back({static_cast<int>(t), static_cast<int>(vals.size()), p.sizes.sizes[t]});
  }
  return out;
}

ParamInvariant fromSafety(const SafetyProperty& f) {
  ParamInvariant inv;
  inv.name = f.name;
  inv.binders = f.binders;
  inv.quantifiers.assign(f.binders.size(), Quantifier::Forall);
  inv.distinct = f.distinct;
  inv.body = f.body;
  return inv;
}

std::string renderInvariant(const ProtocolSpec& spec, const ParamInvariant& inv) {
  const std::size_t fc = inv.forallCount();
  auto decls = [&](std::size_t from, std::size_t to) {
    std::string s;
    for (std::size_t i = from; i < to; ++i)
      s += (i > from ? ", " : "") + inv.binders[i].name + ":" + spec.paramTypes[inv.binders[i].type];
    return s;
  };
  std::string pre, exPre;
  for (const auto& [a, b] : inv.distinct) {
    std::string cond = inv.binders[b].name + " ~= " + inv.binders[a].name;
    if (static_cast<std::size_t>(b) < fc) {
      cond = inv.binders[a].name + " ~= " + inv.binders[b].name;
      pre += (pre.empty() ? "" : " & ") + cond;
    } else {
      exPre += cond + " & ";
    }
  }
  std::string body;
  for (std::size_t i = 0; i < inv.body.size(); ++i)
    body += (i ? " & " : "") + renderLiteral(spec, inv.binders, inv.body[i], "~=");
  std::string s = "~(" + body + ")";
  if (fc < inv.binders.size()) s = "exists " + decls(fc, inv.binders.size()) + ". " + exPre + s;
  if (!pre.empty()) s = pre + " -> " + s;
  if (fc > 0) s = "forall " + decls(0, fc) + ". " + s;
  return s;
}

std::string canonicalKey(const ProtocolSpec& spec, const ParamInvariant& inv) {
  // Blocks of binders sharing quantifier and type may be permuted freely.
  const std::size_t n = inv.binders.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::make_pair(inv.quantifiers[a], inv.binders[a].type) <
           std::make_pair(inv.quantifiers[b], inv.binders[b].type);
  });
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && inv.quantifiers[order[j]] == inv.quantifiers[order[i]] &&
           inv.binders[order[j]].type == inv.binders[order[i]].type)
      ++j;
    blocks.push_back({i, j});
    i = j;
  }
  std::string best;
  bool first = true;
  std::vector<std::size_t> perm = order;
  auto evaluate = [&]() {
    std::vector<int> map(n);
    std::vector<Binder> names(n);
    for (std::size_t pos = 0; pos < n; ++pos) {
      map[perm[pos]] = static_cast<int>(pos);
      names[pos] = {"b" + std::to_string(pos), inv.binders[perm[pos]].type};
    }
    std::vector<std::string> lits;
    for (const auto& l : inv.body) {
      Literal r{renameTerm(l.lhs, map), l.equal, renameTerm(l.rhs, map)};
      lits.push_back(renderLiteral(spec, names, r));
    }
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    std::vector<std::pair<int, int>> d;
    for (auto [a, b] : inv.distinct) d.push_back(std::minmax(map[a], map[b]));
    std::sort(d.begin(), d.end());
    std::string key;
    for (std::size_t pos = 0; pos < n; ++pos)
      key += (inv.quantifiers[perm[pos]] == Quantifier::Forall ? "A:" : "E:") +
             spec.paramTypes[names[pos].type] + ",";
    key += "|";
    for (auto [a, b] : d) key += std::to_string(a) + "!=" + std::to_string(b) + ",";
    key += "|";
    for (const auto& l : lits) key += l + ";";
    if (first || key < best) best = key;
    first = false;
  };
  auto rec = [&](auto&& self, std::size_t bi) -> void {
    if (bi == blocks.size()) {
      evaluate();
      return;
    }
    auto [lo, hi] = blocks[bi];
    std::sort(perm.begin() + lo, perm.begin() + hi);
    do {
      self(self, bi + 1);
    } while (std::next_permutation(perm.begin() + lo, perm.begin() + hi));
  };
  rec(rec, 0);
  return best;
}

std::vector<GroundConstraint> groundExpand(const ProtocolSpec& spec, const ParamInvariant& inv,
                                           const GroundVarTable& vars, const Concretization& sizes) {
  const std::size_t fc = inv.forallCount();
  const std::size_t n = inv.binders.size();
  std::set<GroundConstraint> seen;
  std::vector<GroundConstraint> out;
  forEachAssignment(inv.binders, fc, inv.distinct, sizes.sizes, [&](const std::vector<int>& fv) {
    std::vector<int> bv = fv;
    bv.resize(n, 0);
    GroundConstraint g;
    bool trivial = false;
    auto rec = [&](auto&& self, std::size_t i) -> void {
      if (trivial) return;
      if (i == n) {
        auto c = groundClause(spec, vars, inv.body, bv);
        if (!c) trivial = true;
        else g.alternatives.push_back(std::move(*c));
        return;
      }
      for (int v = 0; v < sizes.sizes[inv.binders[i].type]; ++v) {
        bool ok = true;
        for (auto [a, b] : inv.distinct) {
          if (static_cast<std::size_t>(b) == i && static_cast<std::size_t>(a) < fc && bv[a] == v) ok = false;
          if (static_cast<std::size_t>(a) == i && static_cast<std::size_t>(b) < fc && bv[b] == v) ok = false;
        }
        if (!ok) continue;
        bv[i] = v;
        self(self, i + 1);
      }
    };
    rec(rec, fc);
    if (trivial) return;
    g = canonicalForm(vars, std::move(g));
    if (seen.insert(g).second) out.push_back(std::move(g));
  });
  std::sort(out.begin(), out.end());
  return out;
}

CheckResult checkParamInvariant(ModelChecker& mc, const ConcreteProtocol& p,
                                const ParamInvariant& inv) {
  for (const auto& g : groundExpand(*p.spec, inv, p.vars, p.sizes)) {
    CheckResult r = g.alternatives.size() == 1 ? mc.checkInvariant(p, g.alternatives[0])
                                               : mc.checkConstraint(p, g);
    if (!r.holds()) return r;
  }
  return CheckResult{};
}

Clause extendGroup(const ConcreteProtocol& p, const Clause& omega, int type, int value,
                   const ConcreteProtocol& extended) {
  const ProtocolSpec& spec = *p.spec;
  Clause out;
  bool any = false;
  for (const auto& l : omega.lits) out.lits.push_back(transfer(spec, p.vars, extended.vars, l, type, -1, -1));
  for (const auto& l : omega.lits) {
    if (!mentions(spec, p.vars, l, type, value)) continue;
    any = true;
    for (int w = 0; w < extended.sizes.sizes[type]; ++w)
      out.lits.push_back(transfer(spec, p.vars, extended.vars, l, type, value, w));
  }
  if (!any) throw std::invalid_argument("group not found in clause");
  return canonicalForm(extended.vars, std::move(out));
}

const ConcreteProtocol* InstancePool::get(const Concretization& sizes) {
  auto it = pool_.find(sizes);
  if (it == pool_.end()) {
    std::unique_ptr<ConcreteProtocol> p;
    try {
      p = std::make_unique<ConcreteProtocol>(concretize(spec_, sizes));
    } catch (const ConcretizationError&) {
    }
    it = pool_.emplace(sizes, std::move(p)).first;
  }
  return it->second.get();
}

PromotionResult promote(const ConcreteProtocol& p, const Clause& omega, ModelChecker& mc,
                        InstancePool& pool) {
  const ProtocolSpec& spec = *p.spec;
  const Clause canon = canonicalForm(p.vars, omega);
  PromotionResult res;
  res.saturation = computeSaturation(p, canon);
  std::map<std::pair<int, int>, Quantifier> quant;
  Concretization bigger = p.sizes;
  for (const auto& ts : res.saturation) {
    std::set<int> vals;
    for (const auto& l : canon.lits)
      for (int v : paramValuesOf(spec, p.vars, l, ts.type)) vals.insert(v);
    ++bigger.sizes[ts.type];
    if (!ts.saturated()) {
      for (int v : vals) quant[{ts.type, v}] = Quantifier::Forall;
      continue;
    }
    Concretization ext = p.sizes;
    ++ext.sizes[ts.type];
    const ConcreteProtocol* next = pool.get(ext);
    if (!next) {
      res.failure = "cannot concretize at " + formatSizes(spec, ext);
      return res;
    }
    for (int v : vals) {
      GroupDecision d;
      d.type = ts.type;
      d.value = v;
      Clause e = extendGroup(p, canon, ts.type, v, *next);
      d.extended = renderClause(spec, next->vars, e);
      d.extendedHolds = mc.checkInvariant(*next, e).holds();
      Clause fresh;
      for (const auto& l : canon.lits)
        fresh.lits.push_back(transfer(spec, p.vars, next->vars, l, ts.type, v, ext.sizes[ts.type] - 1));
      d.universalHolds = mc.checkInvariant(*next, fresh).holds();
      d.quantifier = d.universalHolds ? Quantifier::Forall : Quantifier::Exists;
      quant[{ts.type, v}] = d.quantifier;
      res.groups.push_back(std::move(d));
    }
  }
  res.invariant = abstractClause(p, canon, quant);

  for (const Concretization* sizes : {&p.sizes, static_cast<const Concretization*>(&bigger)}) {
    const ConcreteProtocol* inst = pool.get(*sizes);
    if (!inst) continue;
    CheckResult r = checkParamInvariant(mc, *inst, *res.invariant);
    if (!r.holds()) {
      res.failure = "promoted invariant fails at " + formatSizes(spec, *sizes);
      return res;
    }
  }
  res.validated = true;
  return res;
}

bool impliesAt(const ProtocolSpec& spec, const Concretization& sizes,
               const std::vector<ParamInvariant>& phi, const std::vector<ParamInvariant>& psi) {
  GroundVarTable vars(spec, sizes);
  std::vector<GroundConstraint> a, b;
  for (const auto& inv : phi)
    for (auto& g : groundExpand(spec, inv, vars, sizes)) a.push_back(std::move(g));
  for (const auto& inv : psi)
    for (auto& g : groundExpand(spec, inv, vars, sizes)) b.push_back(std::move(g));
  std::set<GroundConstraint> have(a.begin(), a.end());
  std::vector<int> domains;
  for (const auto& v : vars.vars()) domains.push_back(v.domain);
  for (const auto& goal : b) {
    if (have.count(goal)) continue;
    FiniteDomainSolver solver(domains);
    for (const auto& g : a) solver.addConstraint(g);
    // goal fails iff every alternative clause fails, i.e. all its literals hold
    for (const auto& alt : goal.alternatives)
      for (const auto& l : alt.lits) solver.require(l);
    if (solver.solve({})) return false;
  }
  return true;
}

bool impliesSemantically(const ProtocolSpec& spec, const std::vector<ParamInvariant>& phi,
                         const std::vector<ParamInvariant>& psi, int sizeBound) {
  const std::size_t types = spec.paramTypes.size();
  std::vector<int> lo(types, 1), hi(types, 1);
  for (std::size_t t = 0; t < types; ++t) {
    bool used = false;
    for (const auto* set : {&phi, &psi})
      for (const auto& inv : *set) {
        for (const auto& b : inv.binders) used |= b.type == static_cast<int>(t);
        lo[t] = std::max(lo[t], need(inv, static_cast<int>(t)));
      }
    hi[t] = used ? std::max(lo[t], sizeBound) : lo[t];
  }
  Concretization sizes{lo};
  while (true) {
    if (!impliesAt(spec, sizes, phi, psi)) return false;
    std::size_t t = 0;
    for (; t < types; ++t) {
      if (++sizes.sizes[t] <= hi[t]) break;
      sizes.sizes[t] = lo[t];
    }
    if (t == types) return true;
  }
}

bool impliesSemantically(const ProtocolSpec& spec, const ParamInvariant& phi,
                         const ParamInvariant& psi, int sizeBound) {
  return impliesSemantically(spec, std::vector<ParamInvariant>{phi},
                             std::vector<ParamInvariant>{psi}, sizeBound);
}

namespace {

// The invariant without its existential binders and their literals.
ParamInvariant forallPart(const ParamInvariant& inv) {
  const std::size_t fc = inv.forallCount();
  ParamInvariant out;
  out.binders.assign(inv.binders.begin(), inv.binders.begin() + fc);
  out.quantifiers.assign(fc, Quantifier::Forall);
  for (auto [a, b] : inv.distinct)
    if (static_cast<std::size_t>(a) < fc && static_cast<std::size_t>(b) < fc) out.distinct.push_back({a, b});
  auto usesExists = [&](const Term& t) {
    for (int i : t.indices)
      if (static_cast<std::size_t>(i) >= fc) return true;
    return t.kind == Term::Kind::Binder && static_cast<std::size_t>(t.binder) >= fc;
  };
  for (const auto& l : inv.body)
    if (!usesExists(l.lhs) && !usesExists(l.rhs)) out.body.push_back(l);
  return out;
}

// a's body with b's existential groups appended under fresh binders.
ParamInvariant unify(const ParamInvariant& a, const ParamInvariant& b) {
  ParamInvariant out = a;
  const std::size_t fc = b.forallCount();
  std::vector<int> map(b.binders.size());
  for (std::size_t i = 0; i < fc; ++i) map[i] = static_cast<int>(i);
  std::map<int, int> counter;
  for (const auto& bd : a.binders) ++counter[bd.type];
  for (std::size_t i = fc; i < b.binders.size(); ++i) {
    map[i] = static_cast<int>(out.binders.size());
    Binder nb = b.binders[i];
    nb.name = nb.name.substr(0, nb.name.find_first_of("0123456789")) + std::to_string(++counter[nb.type]);
    out.binders.push_back(nb);
    out.quantifiers.push_back(Quantifier::Exists);
  }
  for (auto [x, y] : b.distinct)
    if (static_cast<std::size_t>(y) >= fc) out.distinct.push_back({map[x], map[y]});
  const ParamInvariant shared = forallPart(b);
  for (const auto& l : b.body)
    if (std::find(shared.body.begin(), shared.body.end(), l) == shared.body.end())
      out.body.push_back({renameTerm(l.lhs, map), l.equal, renameTerm(l.rhs, map)});
  return out;
}

}  // namespace

MergeResult mergeInvariants(const ProtocolSpec& spec, const std::vector<ParamInvariant>& invs,
                            int sizeBound, const ReferenceCheck& check) {
  MergeResult res;
  std::vector<ParamInvariant> cur;
  std::map<std::string, std::size_t> byKey;
  for (const auto& inv : invs) {
    const std::string key = canonicalKey(spec, inv);
    if (auto it = byKey.find(key); it != byKey.end()) {
      res.events.push_back({"duplicate", {inv.name}, cur[it->second].name});
      continue;
    }
    byKey[key] = cur.size();
    cur.push_back(inv);
  }

  std::vector<bool> present(cur.size(), true);
  for (std::size_t i = 0; i < cur.size(); ++i) {
    for (std::size_t k = 0; k < cur.size(); ++k) {
      if (k == i || !present[k]) continue;
      if (!impliesSemantically(spec, cur[k], cur[i], sizeBound)) continue;
      if (k > i && impliesSemantically(spec, cur[i], cur[k], sizeBound)) continue;
      present[i] = false;
      res.events.push_back({"implied", {cur[i].name}, cur[k].name});
      break;
    }
  }
  std::vector<ParamInvariant> kept;
  for (std::size_t i = 0; i < cur.size(); ++i)
    if (present[i]) kept.push_back(cur[i]);

  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (!kept[i].hasExists()) continue;
    for (std::size_t j = i + 1; j < kept.size(); ++j) {
      if (!kept[j].hasExists()) continue;
      const ParamInvariant fi = forallPart(kept[i]), fj = forallPart(kept[j]);
      if (fi.binders != fj.binders || fi.body != fj.body || fi.distinct != fj.distinct) continue;
      ParamInvariant cand = unify(kept[i], kept[j]);
      cand.name = kept[i].name + "+" + kept[j].name;
      const std::vector<ParamInvariant> pair{kept[i], kept[j]};
      const std::vector<ParamInvariant> one{cand};
      const bool stronger = impliesSemantically(spec, one, pair, sizeBound) &&
                            !impliesSemantically(spec, pair, one, sizeBound) && check(cand);
      if (!stronger) {
        res.events.push_back({"strengthen-rejected", {kept[i].name, kept[j].name}, cand.name});
        continue;
      }
      res.events.push_back({"strengthened", {kept[i].name, kept[j].name}, cand.name});
      kept[i] = cand;
      kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(j));
      --j;
    }
  }
  res.invariants = std::move(kept);
  return res;
}

}  // namespace paraverify
