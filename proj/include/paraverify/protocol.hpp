#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace paraverify {

// Value sorts. Enum and parameter sorts refer to the spec's tables by index.
enum class SortKind { Bool, Enum, Param };

struct Sort {
  SortKind kind = SortKind::Bool;
  int index = -1;

  friend bool operator==(const Sort&, const Sort&) = default;
};

struct EnumType {
  std::string name;
  std::vector<std::string> members;

  friend bool operator==(const EnumType&, const EnumType&) = default;
};

struct VarDecl {
  std::string name;
  std::vector<int> indexTypes;  // parameter types, at most two
  Sort sort;

  friend bool operator==(const VarDecl&, const VarDecl&) = default;
};

struct Binder {
  std::string name;
  int type = -1;

  friend bool operator==(const Binder&, const Binder&) = default;
};

// A term inside a rule, init clause or property. Binder ids index the
// binder list of the enclosing construct.
struct Term {
  enum class Kind { Var, Const, Binder };
  Kind kind = Kind::Const;
  int var = -1;
  std::vector<int> indices;
  int value = 0;
  int binder = -1;

  friend bool operator==(const Term&, const Term&) = default;
};

struct Literal {
  Term lhs;
  bool equal = true;
  Term rhs;

  friend bool operator==(const Literal&, const Literal&) = default;
};

struct Assignment {
  Term target;
  Term value;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

using DistinctPairs = std::vector<std::pair<int, int>>;

struct Rule {
  std::string name;
  std::vector<Binder> binders;  // formal parameters, then the forall binder if any
  std::size_t paramCount = 0;
  DistinctPairs distinct;
  std::vector<Literal> guard;
  std::optional<Literal> forallLiteral;  // quantified over binders[paramCount]
  std::vector<Assignment> action;

  friend bool operator==(const Rule&, const Rule&) = default;
};

struct InitClause {
  std::vector<Binder> binders;  // universally closed
  Literal literal;

  friend bool operator==(const InitClause&, const InitClause&) = default;
};

struct SafetyProperty {
  std::string name;
  std::vector<Binder> binders;
  DistinctPairs distinct;
  std::vector<Literal> body;  // !(l1 & l2 & ...)
  bool trivial = false;       // declared as `true`

  friend bool operator==(const SafetyProperty&, const SafetyProperty&) = default;
};

struct ProtocolSpec {
  std::string name;
  std::vector<std::string> paramTypes;
  std::vector<EnumType> enumTypes;
  std::vector<VarDecl> variables;
  std::vector<InitClause> init;
  std::vector<Rule> rules;
  std::vector<SafetyProperty> properties;

  int findParamType(std::string_view n) const;
  int findVariable(std::string_view n) const;
  int findProperty(std::string_view n) const;
  std::string sortName(const Sort& s) const;
  std::string valueName(const Sort& s, int value) const;
  int domainSize(const Sort& s, const std::vector<int>& sizes) const;

  friend bool operator==(const ProtocolSpec&, const ProtocolSpec&) = default;
};

class ParseError : public std::runtime_error {
public:
  ParseError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& detail() const { return detail_; }

private:
  int line_;
  int column_;
  std::string detail_;
};

// Parses the protocol DSL. `name` becomes ProtocolSpec::name.
ProtocolSpec parseProtocol(std::string_view text, std::string name = "protocol");

// Prints a spec back to DSL text that parses to the same spec.
std::string printProtocol(const ProtocolSpec& spec);

// Renders a term/literal with binder names taken from `binders`.
std::string renderTerm(const ProtocolSpec& spec, const std::vector<Binder>& binders,
                       const Term& t);
std::string renderLiteral(const ProtocolSpec& spec, const std::vector<Binder>& binders,
                          const Literal& l, std::string_view neq = "!=");

// ---------------------------------------------------------------------------
// Concrete instances

struct Concretization {
  std::vector<int> sizes;  // indexed by parameter type

  friend bool operator==(const Concretization&, const Concretization&) = default;
  friend auto operator<=>(const Concretization&, const Concretization&) = default;
};

std::string formatSizes(const ProtocolSpec& spec, const Concretization& c);

struct GroundVar {
  int decl = -1;
  std::vector<int> indices;  // 0-based parameter values
  int domain = 0;
  std::string name;  // e.g. st[2], indices printed 1-based
};

// Ground variables for one concretization, in declaration order then index
// order. This order is the canonical state order.
class GroundVarTable {
public:
  GroundVarTable() = default;
  GroundVarTable(const ProtocolSpec& spec, const Concretization& sizes);

  std::size_t size() const { return vars_.size(); }
  const GroundVar& operator[](std::size_t i) const { return vars_[i]; }
  const std::vector<GroundVar>& vars() const { return vars_; }
  int id(int decl, const std::vector<int>& indices) const;
  int find(std::string_view name) const;
  // Position of each variable in (name, index tuple) order.
  int nameRank(int var) const { return nameRank_[var]; }

private:
  std::vector<GroundVar> vars_;
  std::vector<int> offsets_;
  std::vector<std::vector<int>> strides_;
  std::vector<int> nameRank_;
};

}  // namespace paraverify
