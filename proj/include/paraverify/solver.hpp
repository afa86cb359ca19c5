#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "paraverify/ground.hpp"

namespace paraverify {

// Backtracking search over finite domains with unit propagation. Variables
// are tried in ascending id order and values in ascending order, so the
// first solution is the lexicographically smallest one; propagation only
// removes values that cannot extend to a solution.
class FiniteDomainSolver {
public:
  explicit FiniteDomainSolver(std::vector<int> domainSizes);

  void require(const GLit& lit);
  void addClause(const Clause& c);
  void addConstraint(const GroundConstraint& g);

  // First solution over `vars`. Variables outside `vars` that occur in a
  // constraint are searched as well; the returned state holds 0 for
  // variables that no constraint mentions and that are not in `vars`.
  std::optional<State> solve(const std::vector<int>& vars);

  // Enumerates every total assignment satisfying the constraints in
  // lexicographic order. The visitor returns false to stop early. Returns
  // false if stopped early.
  bool enumerate(const std::function<bool(const State&)>& visit);

  std::uint64_t nodes() const { return nodes_; }

private:
  using Domain = std::uint64_t;

  struct Item {
    std::vector<GLit> cube;  // item holds iff the cube is false
  };
  struct Constraint {
    std::vector<Item> items;  // disjunction
    std::vector<int> vars;
  };

  std::vector<int> sizes_;
  std::vector<Domain> initial_;
  std::vector<Constraint> constraints_;
  std::vector<std::vector<int>> occurs_;
  bool contradiction_ = false;
  std::uint64_t nodes_ = 0;

  enum class Truth { False, True, Unknown };
  static Truth litTruth(const GLit& l, const std::vector<Domain>& d);
  bool restrictFalse(const GLit& l, std::vector<Domain>& d) const;
  bool propagate(std::vector<Domain>& d, std::vector<int> queue) const;
  void index(Constraint c);
  bool search(std::vector<Domain>& d, const std::vector<int>& order, std::size_t depth,
              const std::function<bool(const std::vector<Domain>&)>& leaf);
};

}  // namespace paraverify
