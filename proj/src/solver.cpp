#include "paraverify/solver.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace paraverify {

namespace {

using Domain = std::uint64_t;

Domain full(int size) { return size >= 64 ? ~Domain{0} : (Domain{1} << size) - 1; }
bool single(Domain d) { return d && !(d & (d - 1)); }
int valueOf(Domain d) { return std::countr_zero(d); }

}  // namespace

FiniteDomainSolver::FiniteDomainSolver(std::vector<int> domainSizes)
    : sizes_(std::move(domainSizes)), occurs_(sizes_.size()) {
  initial_.reserve(sizes_.size());
  for (int s : sizes_) {
    if (s < 1 || s > 64) throw std::invalid_argument("domain size must be in 1..64");
    initial_.push_back(full(s));
  }
}

FiniteDomainSolver::Truth FiniteDomainSolver::litTruth(const GLit& l,
                                                       const std::vector<Domain>& d) {
  const Domain a = d[l.var];
  bool definitelySame = false;
  bool definitelyDiff = false;
  if (l.rhsVar) {
    const Domain b = d[l.rhs];
    definitelyDiff = (a & b) == 0;
    definitelySame = single(a) && a == b;
  } else {
    const Domain bit = Domain{1} << l.rhs;
    definitelyDiff = (a & bit) == 0;
    definitelySame = a == bit;
  }
  if (definitelySame) return l.equal ? Truth::True : Truth::False;
  if (definitelyDiff) return l.equal ? Truth::False : Truth::True;
  return Truth::Unknown;
}

// Narrows domains so that `l` is false. Returns false on wipe-out.
bool FiniteDomainSolver::restrictFalse(const GLit& l, std::vector<Domain>& d) const {
  if (!l.rhsVar) {
    const Domain bit = Domain{1} << l.rhs;
    d[l.var] = l.equal ? (d[l.var] & ~bit) : (d[l.var] & bit);
    return d[l.var] != 0;
  }
  // var-var literal: only narrows once one side is fixed
  const Domain a = d[l.var];
  const Domain b = d[l.rhs];
  if (l.equal) {
    if (single(a)) d[l.rhs] &= ~a;
    else if (single(b)) d[l.var] &= ~b;
  } else {
    d[l.var] &= b;
    d[l.rhs] &= a;
  }
  return d[l.var] != 0 && d[l.rhs] != 0;
}

void FiniteDomainSolver::index(Constraint c) {
  std::vector<int> vars;
  for (const auto& it : c.items)
    for (const auto& l : it.cube) {
      vars.push_back(l.var);
      if (l.rhsVar) vars.push_back(l.rhs);
    }
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  c.vars = vars;
  const int id = static_cast<int>(constraints_.size());
  for (int v : vars) occurs_[v].push_back(id);
  constraints_.push_back(std::move(c));
}

void FiniteDomainSolver::require(const GLit& lit) {
  // lit holds  <=>  !(!lit) : a single item whose cube is the negation
  GLit neg = lit;
  neg.equal = !lit.equal;
  Constraint c;
  c.items.push_back({{neg}});
  index(std::move(c));
}

void FiniteDomainSolver::addClause(const Clause& cl) {
  Constraint c;
  c.items.push_back({cl.lits});
  if (cl.lits.empty()) contradiction_ = true;
  index(std::move(c));
}

void FiniteDomainSolver::addConstraint(const GroundConstraint& g) {
  Constraint c;
  for (const auto& cl : g.alternatives) c.items.push_back({cl.lits});
  bool anyNonEmpty = false;
  for (const auto& it : c.items) anyNonEmpty |= !it.cube.empty();
  if (!anyNonEmpty) {
    contradiction_ = true;
    return;
  }
  index(std::move(c));
}

bool FiniteDomainSolver::propagate(std::vector<Domain>& d, std::vector<int> queue) const {
  std::vector<char> queued(constraints_.size(), 0);
  for (int c : queue) queued[c] = 1;
  while (!queue.empty()) {
    const int ci = queue.back();
    queue.pop_back();
    queued[ci] = 0;
    const Constraint& c = constraints_[ci];
    // Count items that may still hold; an item holds iff its cube is false.
    int open = 0;
    const Item* lastOpen = nullptr;
    bool satisfied = false;
    for (const auto& it : c.items) {
      bool cubeFalse = false;
      bool cubeTrue = true;
      for (const auto& l : it.cube) {
        const Truth t = litTruth(l, d);
        if (t == Truth::False) {
          cubeFalse = true;
          break;
        }
        if (t == Truth::Unknown) cubeTrue = false;
      }
      if (cubeFalse) {
        satisfied = true;
        break;
      }
      if (!cubeTrue) {
        ++open;
        lastOpen = &it;
      }
    }
    if (satisfied) continue;
    if (open == 0) return false;
    if (open > 1) continue;
    // Exactly one item left: its cube must become false. Propagate only
    // when a single literal is undecided.
    const GLit* pending = nullptr;
    int unknown = 0;
    for (const auto& l : lastOpen->cube) {
      if (litTruth(l, d) == Truth::Unknown) {
        ++unknown;
        pending = &l;
      }
    }
    if (unknown != 1) continue;
    const Domain beforeA = d[pending->var];
    const Domain beforeB = pending->rhsVar ? d[pending->rhs] : 0;
    if (!restrictFalse(*pending, d)) return false;
    auto wake = [&](int v) {
      for (int o : occurs_[v])
        if (!queued[o]) {
          queued[o] = 1;
          queue.push_back(o);
        }
    };
    if (d[pending->var] != beforeA) wake(pending->var);
    if (pending->rhsVar && d[pending->rhs] != beforeB) wake(pending->rhs);
  }
  return true;
}

bool FiniteDomainSolver::search(std::vector<Domain>& d, const std::vector<int>& order,
                                std::size_t depth,
                                const std::function<bool(const std::vector<Domain>&)>& leaf) {
  ++nodes_;
  if (depth == order.size()) return leaf(d);
  const int v = order[depth];
  Domain dom = d[v];
  while (dom) {
    const Domain bit = dom & (~dom + 1);
    dom &= ~bit;
    std::vector<Domain> child = d;
    child[v] = bit;
    if (!propagate(child, occurs_[v])) continue;
    if (!search(child, order, depth + 1, leaf)) return false;
  }
  return true;
}

std::optional<State> FiniteDomainSolver::solve(const std::vector<int>& vars) {
  if (contradiction_) return std::nullopt;
  std::vector<Domain> d = initial_;
  std::vector<int> all(constraints_.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  if (!propagate(d, all)) return std::nullopt;

  std::vector<char> mark(sizes_.size(), 0);
  for (int v : vars) mark[v] = 1;
  for (const auto& c : constraints_)
    for (int v : c.vars) mark[v] = 1;
  std::vector<int> order;
  for (std::size_t v = 0; v < mark.size(); ++v)
    if (mark[v]) order.push_back(static_cast<int>(v));

  std::optional<State> found;
  search(d, order, 0, [&](const std::vector<Domain>& leaf) {
    State s(sizes_.size(), 0);
    for (int v : order) s[v] = static_cast<std::uint8_t>(valueOf(leaf[v]));
    found = std::move(s);
    return false;
  });
  return found;
}

bool FiniteDomainSolver::enumerate(const std::function<bool(const State&)>& visit) {
  if (contradiction_) return true;
  std::vector<Domain> d = initial_;
  std::vector<int> all(constraints_.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  if (!propagate(d, all)) return true;
  std::vector<int> order(sizes_.size());
  for (std::size_t v = 0; v < order.size(); ++v) order[v] = static_cast<int>(v);
  State s(sizes_.size(), 0);
  return search(d, order, 0, [&](const std::vector<Domain>& leaf) {
    for (std::size_t v = 0; v < s.size(); ++v) s[v] = static_cast<std::uint8_t>(valueOf(leaf[v]));
    return visit(s);
  });
}

}  // namespace paraverify
