#include "paraverify/protocol.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace paraverify {

ParseError::ParseError(int line, int column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      detail_(message) {}

int ProtocolSpec::findParamType(std::string_view n) const {
  for (std::size_t i = 0; i < paramTypes.size(); ++i)
    if (paramTypes[i] == n) return static_cast<int>(i);
  return -1;
}

int ProtocolSpec::findVariable(std::string_view n) const {
  for (std::size_t i = 0; i < variables.size(); ++i)
    if (variables[i].name == n) return static_cast<int>(i);
  return -1;
}

int ProtocolSpec::findProperty(std::string_view n) const {
  for (std::size_t i = 0; i < properties.size(); ++i)
    if (properties[i].name == n) return static_cast<int>(i);
  return -1;
}

std::string ProtocolSpec::sortName(const Sort& s) const {
  switch (s.kind) {
    case SortKind::Bool: return "boolean";
    case SortKind::Enum: return enumTypes[s.index].name;
    case SortKind::Param: return paramTypes[s.index];
  }
  return "?";
}

std::string ProtocolSpec::valueName(const Sort& s, int value) const {
  switch (s.kind) {
    case SortKind::Bool: return value ? "true" : "false";
    case SortKind::Enum: return enumTypes[s.index].members[value];
    case SortKind::Param: return std::to_string(value + 1);
  }
  return "?";
}

int ProtocolSpec::domainSize(const Sort& s, const std::vector<int>& sizes) const {
  switch (s.kind) {
    case SortKind::Bool: return 2;
    case SortKind::Enum: return static_cast<int>(enumTypes[s.index].members.size());
    case SortKind::Param: return sizes[s.index];
  }
  return 0;
}

std::string formatSizes(const ProtocolSpec& spec, const Concretization& c) {
  std::string out;
  for (std::size_t t = 0; t < c.sizes.size(); ++t) {
    if (t) out += ",";
    out += spec.paramTypes[t] + "=" + std::to_string(c.sizes[t]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

struct Token {
  enum class Kind { Ident, Number, Symbol, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 1;
  int column = 1;
};

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  static const char* twoChar[] = {"!=", ":=", "~=", "->"};
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      t.kind = Token::Kind::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Token::Kind::Number;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else {
      t.kind = Token::Kind::Symbol;
      bool matched = false;
      for (const char* two : twoChar) {
        if (src.substr(i, 2) == two) {
          t.text = two;
          advance(2);
          matched = true;
          break;
        }
      }
      if (!matched) {
        if (std::string_view("{}[](),;:.=&!~|").find(c) == std::string_view::npos)
          throw ParseError(line, col, std::string("unexpected character '") + c + "'");
        t.text = std::string(1, c);
        advance(1);
      }
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
public:
  Parser(std::string_view text, std::string name) : toks_(tokenize(text)) {
    spec_.name = std::move(name);
  }

  ProtocolSpec run() {
    if (peek().kind == Token::Kind::End) fail(peek(), "expected declaration");
    while (peek().kind != Token::Kind::End) declaration();
    return std::move(spec_);
  }

private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  ProtocolSpec spec_;
  std::set<std::string> names_;
  std::map<std::string, std::pair<int, int>> members_;  // name -> (enum, index)

  [[noreturn]] static void fail(const Token& t, const std::string& msg) {
    throw ParseError(t.line, t.column, msg);
  }
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool isSym(std::string_view s) const {
    return peek().kind == Token::Kind::Symbol && peek().text == s;
  }
  bool isWord(std::string_view s) const {
    return peek().kind == Token::Kind::Ident && peek().text == s;
  }
  bool acceptSym(std::string_view s) {
    if (!isSym(s)) return false;
    next();
    return true;
  }
  bool acceptWord(std::string_view s) {
    if (!isWord(s)) return false;
    next();
    return true;
  }
  void expectSym(std::string_view s) {
    if (!acceptSym(s)) fail(peek(), "expected '" + std::string(s) + "'");
  }
  void expectWord(std::string_view s) {
    if (!acceptWord(s)) fail(peek(), "expected '" + std::string(s) + "'");
  }
  const Token& ident(const char* what) {
    if (peek().kind != Token::Kind::Ident) fail(peek(), std::string("expected ") + what);
    return next();
  }
  void declareName(const Token& t) {
    if (!names_.insert(t.text).second) fail(t, "duplicate declaration of '" + t.text + "'");
  }

  static bool reserved(const std::string& s) {
    static const std::set<std::string> kw = {"type", "enum", "var", "init", "rule",
                                             "invariant", "guard", "action", "where",
                                             "forall", "array", "of", "boolean",
                                             "true", "false"};
    return kw.count(s) > 0;
  }

  void declaration() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Ident) fail(t, "expected declaration");
    if (t.text == "type") return typeDecl();
    if (t.text == "enum") return enumDecl();
    if (t.text == "var") return varDecl();
    if (t.text == "init") return initDecl();
    if (t.text == "rule") return ruleDecl();
    if (t.text == "invariant") return invariantDecl();
    fail(t, "expected declaration");
  }

  const Token& newName(const char* what) {
    const Token& t = ident(what);
    if (reserved(t.text)) fail(t, "reserved word '" + t.text + "'");
    declareName(t);
    return t;
  }

  void typeDecl() {
    next();
    spec_.paramTypes.push_back(newName("type name").text);
    expectSym(";");
  }

  void enumDecl() {
    next();
    EnumType e;
    e.name = newName("enum name").text;
    expectSym("{");
    const int idx = static_cast<int>(spec_.enumTypes.size());
    do {
      const Token& m = newName("enum member");
      members_[m.text] = {idx, static_cast<int>(e.members.size())};
      e.members.push_back(m.text);
    } while (acceptSym(","));
    expectSym("}");
    expectSym(";");
    spec_.enumTypes.push_back(std::move(e));
  }

  Sort scalarSort() {
    const Token& t = ident("sort");
    if (t.text == "boolean") return {SortKind::Bool, -1};
    for (std::size_t i = 0; i < spec_.enumTypes.size(); ++i)
      if (spec_.enumTypes[i].name == t.text) return {SortKind::Enum, static_cast<int>(i)};
    const int p = spec_.findParamType(t.text);
    if (p >= 0) return {SortKind::Param, p};
    fail(t, "unresolved identifier '" + t.text + "'");
  }

  int paramType() {
    const Token& t = ident("parameter type");
    const int p = spec_.findParamType(t.text);
    if (p < 0) fail(t, "unresolved identifier '" + t.text + "'");
    return p;
  }

  void varDecl() {
    next();
    VarDecl v;
    v.name = newName("variable name").text;
    expectSym(":");
    if (acceptWord("array")) {
      do {
        const Token& at = peek();
        expectSym("[");
        v.indexTypes.push_back(paramType());
        expectSym("]");
        if (v.indexTypes.size() > 2) fail(at, "arrays have at most two dimensions");
      } while (isSym("["));
      expectWord("of");
    }
    v.sort = scalarSort();
    expectSym(";");
    spec_.variables.push_back(std::move(v));
  }

  std::vector<Binder> binderList(std::vector<Binder> scope) {
    do {
      const Token& n = ident("binder name");
      if (reserved(n.text)) fail(n, "reserved word '" + n.text + "'");
      for (const auto& b : scope)
        if (b.name == n.text) fail(n, "duplicate declaration of '" + n.text + "'");
      expectSym(":");
      scope.push_back({n.text, paramType()});
    } while (acceptSym(","));
    return scope;
  }

  static int findBinder(const std::vector<Binder>& scope, const std::string& name) {
    for (std::size_t i = scope.size(); i-- > 0;)
      if (scope[i].name == name) return static_cast<int>(i);
    return -1;
  }

  DistinctPairs whereClause(const std::vector<Binder>& scope) {
    DistinctPairs out;
    if (!acceptWord("where")) return out;
    do {
      const Token& a = ident("binder");
      const int ia = findBinder(scope, a.text);
      if (ia < 0) fail(a, "unresolved identifier '" + a.text + "'");
      expectSym("!=");
      const Token& b = ident("binder");
      const int ib = findBinder(scope, b.text);
      if (ib < 0) fail(b, "unresolved identifier '" + b.text + "'");
      if (ia == ib || scope[ia].type != scope[ib].type)
        fail(a, "distinctness needs two binders of one type");
      out.emplace_back(std::min(ia, ib), std::max(ia, ib));
    } while (acceptSym("&") || acceptSym(","));
    return out;
  }

  std::pair<Term, Sort> term(const std::vector<Binder>& scope) {
    const Token& t = ident("term");
    Term out;
    if (t.text == "true" || t.text == "false") {
      out.kind = Term::Kind::Const;
      out.value = t.text == "true";
      return {out, {SortKind::Bool, -1}};
    }
    const int b = findBinder(scope, t.text);
    if (b >= 0) {
      if (isSym("[")) fail(peek(), "arity mismatch: binder '" + t.text + "' is not an array");
      out.kind = Term::Kind::Binder;
      out.binder = b;
      return {out, {SortKind::Param, scope[b].type}};
    }
    const int v = spec_.findVariable(t.text);
    if (v >= 0) {
      const VarDecl& d = spec_.variables[v];
      out.kind = Term::Kind::Var;
      out.var = v;
      while (acceptSym("[")) {
        const Token& ix = ident("index binder");
        const int ib = findBinder(scope, ix.text);
        if (ib < 0) fail(ix, "unresolved identifier '" + ix.text + "'");
        if (out.indices.size() >= d.indexTypes.size())
          fail(ix, "arity mismatch for '" + d.name + "'");
        if (scope[ib].type != d.indexTypes[out.indices.size()])
          fail(ix, "index '" + ix.text + "' has the wrong type for '" + d.name + "'");
        out.indices.push_back(ib);
        expectSym("]");
      }
      if (out.indices.size() != d.indexTypes.size())
        fail(t, "arity mismatch for '" + d.name + "'");
      return {out, d.sort};
    }
    auto m = members_.find(t.text);
    if (m != members_.end()) {
      if (isSym("[")) fail(peek(), "arity mismatch: '" + t.text + "' is not an array");
      out.kind = Term::Kind::Const;
      out.value = m->second.second;
      return {out, {SortKind::Enum, m->second.first}};
    }
    fail(t, "unresolved identifier '" + t.text + "'");
  }

  Literal literal(const std::vector<Binder>& scope) {
    const Token& at = peek();
    auto [lhs, ls] = term(scope);
    bool equal = true;
    if (acceptSym("!=")) {
      equal = false;
    } else {
      expectSym("=");
    }
    auto [rhs, rs] = term(scope);
    if (!(ls == rs)) fail(at, "type mismatch between '" + spec_.sortName(ls) + "' and '" +
                                  spec_.sortName(rs) + "'");
    // Keep variables on the left.
    if (lhs.kind != Term::Kind::Var && rhs.kind == Term::Kind::Var) std::swap(lhs, rhs);
    return {std::move(lhs), equal, std::move(rhs)};
  }

  void initDecl() {
    next();
    expectSym("{");
    while (!acceptSym("}")) {
      InitClause c;
      if (acceptWord("forall")) {
        c.binders = binderList({});
        expectSym(".");
      }
      const Token& at = peek();
      c.literal = literal(c.binders);
      if (c.literal.lhs.kind != Term::Kind::Var) fail(at, "init literal must mention a variable");
      expectSym(";");
      spec_.init.push_back(std::move(c));
    }
  }

  void ruleDecl() {
    next();
    Rule r;
    r.name = newName("rule name").text;
    if (acceptSym("(")) {
      if (!isSym(")")) r.binders = binderList({});
      expectSym(")");
    }
    r.paramCount = r.binders.size();
    r.distinct = whereClause(r.binders);
    expectWord("guard");
    if (isWord("true") && peek(1).text == "action") {
      next();
    } else {
      do {
        if (acceptWord("forall")) {
          const Token& at = peek();
          if (r.forallLiteral) fail(at, "at most one forall literal per guard");
          const Token& n = ident("binder name");
          if (findBinder(r.binders, n.text) >= 0)
            fail(n, "duplicate declaration of '" + n.text + "'");
          expectSym(":");
          const int ty = paramType();
          expectSym(".");
          r.binders.push_back({n.text, ty});
          r.forallLiteral = literal(r.binders);
        } else {
          // The forall binder is only visible inside its own literal.
          std::vector<Binder> params(r.binders.begin(), r.binders.begin() + r.paramCount);
          r.guard.push_back(literal(params));
        }
      } while (acceptSym("&"));
    }
    expectWord("action");
    std::vector<Binder> params(r.binders.begin(), r.binders.begin() + r.paramCount);
    do {
      const Token& at = peek();
      auto [target, ts] = term(params);
      if (target.kind != Term::Kind::Var) fail(at, "assignment target must be a variable");
      expectSym(":=");
      auto [value, vs] = term(params);
      if (!(ts == vs)) fail(at, "type mismatch in assignment");
      for (const auto& a : r.action)
        if (a.target == target) fail(at, "variable assigned twice");
      r.action.push_back({std::move(target), std::move(value)});
    } while (acceptSym(","));
    expectSym(";");
    spec_.rules.push_back(std::move(r));
  }

  void invariantDecl() {
    next();
    SafetyProperty p;
    p.name = newName("invariant name").text;
    if (acceptSym("(")) {
      if (!isSym(")")) p.binders = binderList({});
      expectSym(")");
    }
    p.distinct = whereClause(p.binders);
    expectSym(":");
    if (acceptWord("true")) {
      p.trivial = true;
    } else {
      expectSym("!");
      expectSym("(");
      do {
        p.body.push_back(literal(p.binders));
      } while (acceptSym("&"));
      expectSym(")");
    }
    expectSym(";");
    spec_.properties.push_back(std::move(p));
  }
};

}  // namespace

ProtocolSpec parseProtocol(std::string_view text, std::string name) {
  return Parser(text, std::move(name)).run();
}

// ---------------------------------------------------------------------------
// Printer

std::string renderTerm(const ProtocolSpec& spec, const std::vector<Binder>& binders,
                       const Term& t) {
  switch (t.kind) {
    case Term::Kind::Binder: return binders[t.binder].name;
    case Term::Kind::Var: {
      std::string s = spec.variables[t.var].name;
      for (int b : t.indices) s += "[" + binders[b].name + "]";
      return s;
    }
    case Term::Kind::Const: break;
  }
  return "?";
}

std::string renderLiteral(const ProtocolSpec& spec, const std::vector<Binder>& binders,
                          const Literal& l, std::string_view neq) {
  auto side = [&](const Term& t, const Term& other) {
    if (t.kind != Term::Kind::Const) return renderTerm(spec, binders, t);
    Sort s{SortKind::Bool, -1};
    if (other.kind == Term::Kind::Var) s = spec.variables[other.var].sort;
    return spec.valueName(s, t.value);
  };
  return side(l.lhs, l.rhs) + (l.equal ? " = " : " " + std::string(neq) + " ") +
         side(l.rhs, l.lhs);
}

namespace {

std::string binderDecl(const ProtocolSpec& spec, const std::vector<Binder>& bs, std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += ", ";
    s += bs[i].name + " : " + spec.paramTypes[bs[i].type];
  }
  return s;
}

std::string whereText(const std::vector<Binder>& bs, const DistinctPairs& d) {
  if (d.empty()) return "";
  std::string s = " where ";
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i) s += " & ";
    s += bs[d[i].first].name + " != " + bs[d[i].second].name;
  }
  return s;
}

}  // namespace

std::string printProtocol(const ProtocolSpec& spec) {
  std::ostringstream out;
  for (const auto& t : spec.paramTypes) out << "type " << t << ";\n";
  for (const auto& e : spec.enumTypes) {
    out << "enum " << e.name << " { ";
    for (std::size_t i = 0; i < e.members.size(); ++i) out << (i ? ", " : "") << e.members[i];
    out << " };\n";
  }
  for (const auto& v : spec.variables) {
    out << "var " << v.name << " : ";
    if (!v.indexTypes.empty()) {
      out << "array";
      for (int t : v.indexTypes) out << "[" << spec.paramTypes[t] << "]";
      out << " of ";
    }
    out << spec.sortName(v.sort) << ";\n";
  }
  if (!spec.init.empty()) {
    out << "init {\n";
    for (const auto& c : spec.init) {
      out << "  ";
      if (!c.binders.empty())
        out << "forall " << binderDecl(spec, c.binders, c.binders.size()) << " . ";
      out << renderLiteral(spec, c.binders, c.literal) << ";\n";
    }
    out << "}\n";
  }
  for (const auto& r : spec.rules) {
    out << "rule " << r.name;
    if (r.paramCount) out << "(" << binderDecl(spec, r.binders, r.paramCount) << ")";
    out << whereText(r.binders, r.distinct) << "\n  guard ";
    std::vector<std::string> items;
    for (const auto& l : r.guard) items.push_back(renderLiteral(spec, r.binders, l));
    if (r.forallLiteral) {
      const Binder& b = r.binders[r.paramCount];
      items.push_back("forall " + b.name + " : " + spec.paramTypes[b.type] + " . " +
                      renderLiteral(spec, r.binders, *r.forallLiteral));
    }
    if (items.empty()) items.push_back("true");
    for (std::size_t i = 0; i < items.size(); ++i) out << (i ? " & " : "") << items[i];
    out << "\n  action ";
    for (std::size_t i = 0; i < r.action.size(); ++i) {
      const auto& a = r.action[i];
      Literal asLit{a.target, true, a.value};
      std::string txt = renderLiteral(spec, r.binders, asLit);
      txt.replace(txt.find(" = "), 3, " := ");
      out << (i ? ", " : "") << txt;
    }
    out << ";\n";
  }
  for (const auto& p : spec.properties) {
    out << "invariant " << p.name;
    if (!p.binders.empty()) out << "(" << binderDecl(spec, p.binders, p.binders.size()) << ")";
    out << whereText(p.binders, p.distinct) << " : ";
    if (p.trivial) {
      out << "true";
    } else {
      out << "!(";
      for (std::size_t i = 0; i < p.body.size(); ++i)
        out << (i ? " & " : "") << renderLiteral(spec, p.binders, p.body[i]);
      out << ")";
    }
    out << ";\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Ground variables

GroundVarTable::GroundVarTable(const ProtocolSpec& spec, const Concretization& sizes) {
  for (std::size_t d = 0; d < spec.variables.size(); ++d) {
    const VarDecl& decl = spec.variables[d];
    offsets_.push_back(static_cast<int>(vars_.size()));
    std::vector<int> dims;
    for (int t : decl.indexTypes) dims.push_back(sizes.sizes[t]);
    std::vector<int> strides(dims.size(), 1);
    for (std::size_t k = dims.size(); k-- > 1;) strides[k - 1] = strides[k] * dims[k];
    strides_.push_back(strides);
    const int count =
        std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<int>());
    for (int flat = 0; flat < count; ++flat) {
      GroundVar g;
      g.decl = static_cast<int>(d);
      g.domain = spec.domainSize(decl.sort, sizes.sizes);
      g.name = decl.name;
      int rest = flat;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        g.indices.push_back(rest / strides[k]);
        rest %= strides[k];
        g.name += "[" + std::to_string(g.indices.back() + 1) + "]";
      }
      vars_.push_back(std::move(g));
    }
  }
  std::vector<int> order(vars_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& va = vars_[a];
    const auto& vb = vars_[b];
    const auto& na = spec.variables[va.decl].name;
    const auto& nb = spec.variables[vb.decl].name;
    if (na != nb) return na < nb;
    return va.indices < vb.indices;
  });
  nameRank_.assign(vars_.size(), 0);
  for (std::size_t r = 0; r < order.size(); ++r) nameRank_[order[r]] = static_cast<int>(r);
}

int GroundVarTable::id(int decl, const std::vector<int>& indices) const {
  int flat = 0;
  for (std::size_t k = 0; k < indices.size(); ++k) flat += indices[k] * strides_[decl][k];
  return offsets_[decl] + flat;
}

int GroundVarTable::find(std::string_view name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].name == name) return static_cast<int>(i);
  return -1;
}

}  // namespace paraverify
