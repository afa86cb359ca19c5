#include "paraverify/ground.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include "paraverify/solver.hpp"

namespace paraverify {

// Lexicographic walk over binder tuples honoring distinctness pairs.
void forEachAssignment(const std::vector<Binder>& binders, std::size_t count,
                       const DistinctPairs& distinct, const std::vector<int>& sizes,
                       const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> values(count, 0);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == count) {
      visit(values);
      return;
    }
    for (int v = 0; v < sizes[binders[i].type]; ++v) {
      bool ok = true;
      for (const auto& [a, b] : distinct) {
        const std::size_t other = static_cast<std::size_t>(a) == i ? b : (static_cast<std::size_t>(b) == i ? a : count);
        if (other < i && values[other] == v) ok = false;
      }
      if (!ok) continue;
      values[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
}

namespace {

// A grounded literal side: a ground variable or a constant.
struct Side {
  bool isVar = false;
  int value = 0;
};

Side groundTerm(const GroundVarTable& vars, const Term& t, const std::vector<int>& bv) {
  switch (t.kind) {
    case Term::Kind::Var: {
      std::vector<int> idx;
      for (int b : t.indices) idx.push_back(bv[b]);
      return {true, vars.id(t.var, idx)};
    }
    case Term::Kind::Binder: return {false, bv[t.binder]};
    case Term::Kind::Const: return {false, t.value};
  }
  return {};
}

// Either a decided truth value or a ground literal.
std::variant<bool, GLit> groundLiteral(const GroundVarTable& vars, const Literal& l,
                                       const std::vector<int>& bv) {
  Side a = groundTerm(vars, l.lhs, bv);
  Side b = groundTerm(vars, l.rhs, bv);
  if (!a.isVar && b.isVar) std::swap(a, b);
  if (!a.isVar) return (a.value == b.value) == l.equal;
  if (b.isVar && a.value == b.value) return l.equal;
  return GLit{a.value, l.equal, b.isVar, b.value};
}

}  // namespace

int minInstanceSize(int m, int k) { return std::max(1, m + k); }

std::vector<int> binderCounts(const ProtocolSpec& spec, const std::vector<Binder>& binders,
                              std::size_t count) {
  std::vector<int> out(spec.paramTypes.size(), 0);
  for (std::size_t i = 0; i < count; ++i) ++out[binders[i].type];
  return out;
}

Concretization minConcretization(const ProtocolSpec& spec, const SafetyProperty& f) {
  const std::vector<int> m = binderCounts(spec, f.binders, f.binders.size());
  Concretization c;
  for (std::size_t t = 0; t < spec.paramTypes.size(); ++t) {
    int k = 0;
    for (const auto& r : spec.rules)
      k = std::max(k, binderCounts(spec, r.binders, r.paramCount)[t]);
    c.sizes.push_back(minInstanceSize(m[t], k));
  }
  return c;
}

std::vector<std::vector<int>> enumerateRuleInstances(const ProtocolSpec& spec, const Rule& r,
                                                     const std::vector<int>& fixed,
                                                     const Concretization& n) {
  std::vector<std::vector<int>> out;
  std::set<std::vector<int>> seen;
  forEachAssignment(r.binders, r.paramCount, r.distinct, n.sizes, [&](const std::vector<int>& vals) {
    // Signature: invariant values stay, other values are renamed by first
    // appearance within their type.
    std::vector<int> sig;
    std::map<std::pair<int, int>, int> fresh;
    std::vector<int> nextFresh(spec.paramTypes.size(), 0);
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const int t = r.binders[i].type;
      if (vals[i] < fixed[t]) {
        sig.push_back(vals[i]);
      } else {
        auto [it, inserted] = fresh.try_emplace({t, vals[i]}, 0);
        if (inserted) it->second = fixed[t] + nextFresh[t]++;
        sig.push_back(it->second);
      }
    }
    if (seen.insert(sig).second) out.push_back(vals);
  });
  return out;
}

std::vector<InstancePair> enumerateInstancePairs(const ProtocolSpec& spec,
                                                 const SafetyProperty& f, const Rule& r,
                                                 const Concretization& n) {
  std::vector<int> fixed(spec.paramTypes.size(), 0);
  std::vector<int> propValues;
  for (const auto& b : f.binders) propValues.push_back(fixed[b.type]++);
  std::vector<InstancePair> out;
  for (auto& ri : enumerateRuleInstances(spec, r, fixed, n)) out.push_back({propValues, ri});
  return out;
}

GroundRule groundRule(const ProtocolSpec& spec, const GroundVarTable& vars,
                      const Concretization& sizes, int rule,
                      const std::vector<int>& binderValues) {
  const Rule& r = spec.rules[rule];
  GroundRule g;
  g.rule = rule;
  g.binderValues = binderValues;
  g.name = r.name;
  if (r.paramCount) {
    g.name += "(";
    for (std::size_t i = 0; i < binderValues.size(); ++i)
      g.name += (i ? "," : "") + std::to_string(binderValues[i] + 1);
    g.name += ")";
  }
  auto addGuard = [&](const Literal& l, const std::vector<int>& bv) {
    auto res = groundLiteral(vars, l, bv);
    if (auto* b = std::get_if<bool>(&res)) {
      if (!*b) g.satisfiable = false;
    } else {
      const GLit& gl = std::get<GLit>(res);
      if (std::find(g.guard.begin(), g.guard.end(), gl) == g.guard.end()) g.guard.push_back(gl);
    }
  };
  for (const auto& l : r.guard) addGuard(l, binderValues);
  if (r.forallLiteral) {
    const int qt = r.binders[r.paramCount].type;
    std::vector<int> bv = binderValues;
    bv.push_back(0);
    for (int v = 0; v < sizes.sizes[qt]; ++v) {
      bv.back() = v;
      addGuard(*r.forallLiteral, bv);
    }
  }
  for (const auto& a : r.action) {
    const Side target = groundTerm(vars, a.target, binderValues);
    const Side value = groundTerm(vars, a.value, binderValues);
    for (const auto& prev : g.action)
      if (prev.target == target.value)
        throw ConcretizationError("rule " + g.name + " assigns " + vars[target.value].name +
                                  " twice");
    g.action.push_back({target.value, value.isVar, value.value});
  }
  return g;
}

std::optional<Clause> groundClause(const ProtocolSpec&, const GroundVarTable& vars,
                                   const std::vector<Literal>& body,
                                   const std::vector<int>& binderValues) {
  Clause c;
  for (const auto& l : body) {
    auto res = groundLiteral(vars, l, binderValues);
    if (auto* b = std::get_if<bool>(&res)) {
      if (!*b) return std::nullopt;
      continue;
    }
    const GLit& gl = std::get<GLit>(res);
    if (std::find(c.lits.begin(), c.lits.end(), gl) == c.lits.end()) c.lits.push_back(gl);
  }
  return c;
}

ConcreteProtocol concretize(std::shared_ptr<const ProtocolSpec> spec,
                            const Concretization& sizes) {
  const ProtocolSpec& s = *spec;
  if (sizes.sizes.size() != s.paramTypes.size())
    throw ConcretizationError("concretization must size every parameter type");
  for (std::size_t t = 0; t < sizes.sizes.size(); ++t)
    if (sizes.sizes[t] < 1)
      throw ConcretizationError("size of " + s.paramTypes[t] + " must be at least 1");

  ConcreteProtocol p;
  p.spec = spec;
  p.sizes = sizes;
  p.vars = GroundVarTable(s, sizes);
  for (const auto& v : p.vars.vars())
    if (v.domain > 64) throw ConcretizationError("domain of " + v.name + " exceeds 64 values");

  for (std::size_t r = 0; r < s.rules.size(); ++r) {
    const Rule& rule = s.rules[r];
    std::size_t count = 0;
    forEachAssignment(rule.binders, rule.paramCount, rule.distinct, sizes.sizes,
                      [&](const std::vector<int>& bv) {
                        p.rules.push_back(groundRule(s, p.vars, sizes, static_cast<int>(r), bv));
                        ++count;
                      });
    if (count == 0)
      throw ConcretizationError("rule " + rule.name + " has no instance at sizes " +
                                formatSizes(s, sizes));
  }

  for (std::size_t i = 0; i < s.properties.size(); ++i) {
    const SafetyProperty& f = s.properties[i];
    if (f.trivial) continue;
    std::size_t count = 0;
    forEachAssignment(f.binders, f.binders.size(), f.distinct, sizes.sizes,
                      [&](const std::vector<int>& bv) {
                        ++count;
                        if (auto c = groundClause(s, p.vars, f.body, bv))
                          p.properties.push_back({static_cast<int>(i), bv, std::move(*c)});
                      });
    if (count == 0)
      throw ConcretizationError("invariant " + f.name + " has no instance at sizes " +
                                formatSizes(s, sizes));
  }

  std::vector<int> domains;
  for (const auto& v : p.vars.vars()) domains.push_back(v.domain);
  FiniteDomainSolver init(domains);
  for (const auto& c : s.init) {
    forEachAssignment(c.binders, c.binders.size(), {}, sizes.sizes,
                      [&](const std::vector<int>& bv) {
                        auto res = groundLiteral(p.vars, c.literal, bv);
                        if (auto* b = std::get_if<bool>(&res)) {
                          if (!*b) init.addClause(Clause{});
                        } else {
                          init.require(std::get<GLit>(res));
                        }
                      });
  }
  init.enumerate([&](const State& st) {
    p.initialStates.push_back(st);
    return true;
  });
  return p;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

const Sort& sortOfVar(const ProtocolSpec& spec, const GroundVarTable& vars, int v) {
  return spec.variables[vars[v].decl].sort;
}

}  // namespace

std::string renderGLit(const ProtocolSpec& spec, const GroundVarTable& vars, const GLit& l) {
  std::string s = vars[l.var].name + (l.equal ? " = " : " != ");
  if (l.rhsVar) return s + vars[l.rhs].name;
  return s + spec.valueName(sortOfVar(spec, vars, l.var), l.rhs);
}

std::string renderClause(const ProtocolSpec& spec, const GroundVarTable& vars, const Clause& c) {
  if (c.lits.empty()) return "false";
  std::string s = "!(";
  for (std::size_t i = 0; i < c.lits.size(); ++i)
    s += (i ? " & " : "") + renderGLit(spec, vars, c.lits[i]);
  return s + ")";
}

std::string renderConstraint(const ProtocolSpec& spec, const GroundVarTable& vars,
                             const GroundConstraint& g) {
  if (g.alternatives.empty()) return "false";
  std::string s;
  for (std::size_t i = 0; i < g.alternatives.size(); ++i)
    s += (i ? " | " : "") + renderClause(spec, vars, g.alternatives[i]);
  return s;
}

std::string renderEquations(const ProtocolSpec& spec, const GroundVarTable& vars,
                            const EquationSet& e) {
  std::string s = "{";
  for (std::size_t i = 0; i < e.eqs.size(); ++i) {
    s += (i ? ", " : "") + vars[e.eqs[i].var].name + " = " +
         spec.valueName(sortOfVar(spec, vars, e.eqs[i].var), e.eqs[i].value);
  }
  return s + "}";
}

std::string renderState(const ProtocolSpec& spec, const GroundVarTable& vars, const State& s) {
  std::string out = "{";
  for (std::size_t v = 0; v < vars.size(); ++v) {
    out += (v ? ", " : "") + vars[v].name + " = " +
           spec.valueName(sortOfVar(spec, vars, static_cast<int>(v)), s[v]);
  }
  return out + "}";
}

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

int parseValue(const ProtocolSpec& spec, const Sort& sort, const std::string& text) {
  const int n = spec.domainSize(sort, std::vector<int>(spec.paramTypes.size(), 64));
  for (int v = 0; v < n; ++v)
    if (spec.valueName(sort, v) == text) return v;
  throw std::invalid_argument("unknown value '" + text + "' for sort " + spec.sortName(sort));
}

GLit parseGLit(const ProtocolSpec& spec, const GroundVarTable& vars, const std::string& text) {
  bool equal = true;
  std::size_t op = text.find("!=");
  std::size_t width = 2;
  if (op == std::string::npos) {
    op = text.find('=');
    width = 1;
    if (op == std::string::npos) throw std::invalid_argument("expected literal: " + text);
  } else {
    equal = false;
  }
  const std::string lhs = trim(std::string_view(text).substr(0, op));
  const std::string rhs = trim(std::string_view(text).substr(op + width));
  const int v = vars.find(lhs);
  if (v < 0) throw std::invalid_argument("unknown ground variable '" + lhs + "'");
  const int w = vars.find(rhs);
  if (w >= 0) return {v, equal, true, w};
  const int value = parseValue(spec, sortOfVar(spec, vars, v), rhs);
  if (value >= vars[v].domain) throw std::invalid_argument("value out of range: " + text);
  return {v, equal, false, value};
}

}  // namespace

Clause parseClause(const ProtocolSpec& spec, const GroundVarTable& vars, std::string_view text) {
  std::string s = trim(text);
  if (s == "false") return {};
  if (s.size() < 3 || s.substr(0, 2) != "!(" || s.back() != ')')
    throw std::invalid_argument("expected !( ... ): " + s);
  Clause c;
  for (const auto& part : split(std::string_view(s).substr(2, s.size() - 3), '&'))
    c.lits.push_back(parseGLit(spec, vars, part));
  return c;
}

EquationSet parseEquations(const ProtocolSpec& spec, const GroundVarTable& vars,
                           std::string_view text) {
  std::string s = trim(text);
  if (!s.empty() && s.front() == '{') s = trim(std::string_view(s).substr(1, s.size() - 2));
  EquationSet e;
  if (s.empty()) return e;
  for (const auto& part : split(s, ',')) {
    const GLit l = parseGLit(spec, vars, part);
    if (!l.equal || l.rhsVar) throw std::invalid_argument("expected var = value: " + part);
    e.eqs.push_back({l.var, l.rhs});
  }
  return e;
}

std::vector<int> paramValuesOf(const ProtocolSpec& spec, const GroundVarTable& vars,
                               const GLit& l, int type) {
  std::vector<int> out;
  auto fromVar = [&](int v) {
    const GroundVar& g = vars[v];
    const VarDecl& d = spec.variables[g.decl];
    for (std::size_t k = 0; k < g.indices.size(); ++k)
      if (d.indexTypes[k] == type) out.push_back(g.indices[k]);
  };
  fromVar(l.var);
  if (l.rhsVar) {
    fromVar(l.rhs);
  } else {
    const Sort& s = sortOfVar(spec, vars, l.var);
    if (s.kind == SortKind::Param && s.index == type) out.push_back(l.rhs);
  }
  return out;
}

}  // namespace paraverify
