#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "grouptest/dp.hpp"
#include "grouptest/model.hpp"

namespace grouptest {

// Exhaustive, duplicate-free enumeration of every complete ONP strategy
// tree over the same action space as the dynamic program: prefix tests in
// binomial states, prefix sub-tests in contaminated states. Branches choose
// their continuations independently, so the count is the recursive product
// over action sets. Hard-capped at n = 5 (TooLarge).
class StrategySpace {
 public:
  explicit StrategySpace(int n);

  int n() const { return n_; }
  std::uint64_t size() const;
  StrategyTree materialize(std::uint64_t index) const;
  void for_each(const std::function<void(const StrategyTree&)>& visit) const;

 private:
  struct Variant {
    std::int32_t action;  // prefix end k (binomial) or sub-test end m (contaminated)
    std::uint32_t contam_child;
    std::uint32_t pure_child;
  };

  int append_subtree_binomial(int i, std::uint32_t variant, StrategyTree& out) const;
  int append_subtree_contaminated(int i, int j, std::uint32_t variant,
                                  StrategyTree& out) const;

  int n_ = 0;
  // binomial_[i-1] = variants of the binomial state i, i = 1..n+1
  std::vector<std::vector<Variant>> binomial_;
  // contaminated_[(i-1)*n + (j-1)] = variants of segment (i,j), j > i
  std::vector<std::vector<Variant>> contaminated_;
};

// Strategy count by direct recursion over the action sets, with no tree
// construction; independent check for StrategySpace::size().
std::uint64_t count_onp_strategies(int n);

// Throws InvalidTree unless every tested range is legal in the state that
// reaches it and every done-leaf sits at the fully classified state.
void validate_strategy_tree(const StrategyTree& t, int n);

// Replay test counts per defect pattern, indexed by pattern mask
// (bit i-1 = unit i defective). A range test reads contaminated iff the
// pattern has a defective unit inside it.
std::vector<std::uint32_t> strategy_test_counts(const StrategyTree& t, int n);

// Sum over all 2^n patterns of pattern_probability * tests; deliberately
// pattern-by-pattern (no conditional-probability algebra) so it can catch
// errors in the DP's conditionals. Throws InvalidTree, TooLarge (n > 20).
double exact_strategy_cost(const StrategyTree& t, const ProbabilityVector& v);

// The pairwise procedure as an explicit strategy tree (sorted input; the
// shape depends only on n).
StrategyTree gpta_as_strategy_tree(int n);

// One singleton test per unit.
StrategyTree individual_chain_tree(int n);

enum class OrderingPolicy { Gpta, DpOptimal };

struct BestOrdering {
  std::vector<int> permutation;  // permutation[k-1] = original index played at position k
  double cost;
};

// Minimizes the policy's exact expected test count over all n! input
// orderings; ties resolve to the lexicographically smallest permutation.
// n <= 8 (TooLarge).
BestOrdering best_ordering_bruteforce(const ProbabilityVector& v, OrderingPolicy policy);

}  // namespace grouptest
