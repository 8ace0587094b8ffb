#pragma once

#include <vector>

#include "grouptest/model.hpp"

namespace grouptest {

// Value/argmin tables of the ordered-nested-procedure dynamic program.
//
// States: G(i) is the optimal expected number of remaining tests when units
// i..n form a binomial set (G(n+1) = 0). H(i,j) is the optimum when the
// segment i..j is known contaminated and j+1..n is binomial; a contaminated
// singleton costs nothing (H(i,i) = G(i+1)). Actions test leftmost
// contiguous prefixes; after a contaminated sub-test the untested remainder
// of the segment reverts to the binomial suffix, which is why (i,j) states
// suffice.
struct DPTables {
  int n = 0;
  std::vector<double> g;         // g[i-1] = G(i), i = 1..n+1
  std::vector<int> arg_g;        // arg_g[i-1] = minimizing prefix end k for G(i)
  std::vector<double> margin_g;  // runner-up cost minus best (inf if one action)
  std::vector<double> h;         // dense (n+2)^2, h(i,j) valid for i <= j
  std::vector<int> arg_h;

  double G(int i) const { return g[static_cast<std::size_t>(i - 1)]; }
  double H(int i, int j) const {
    return h[static_cast<std::size_t>(i * (n + 2) + j)];
  }
  int argmin_g(int i) const { return arg_g[static_cast<std::size_t>(i - 1)]; }
  int argmin_h(int i, int j) const {
    return arg_h[static_cast<std::size_t>(i * (n + 2) + j)];
  }
  double margin(int i) const { return margin_g[static_cast<std::size_t>(i - 1)]; }
};

struct OnpOptimum {
  DPTables tables;
  double cost;  // G(1)
};

// Exact optimum over order-preserving nested procedures, O(n^3) time,
// O(n^2) space. Requires v sorted non-decreasing (NotSorted).
OnpOptimum optimal_onp(const ProbabilityVector& v);

// Binary decision tree over composite states. Internal nodes test a
// contiguous range; "done" leaves mean every unit is classified. Tests with
// inferable outcomes (contaminated singletons) are never materialized.
class StrategyTree {
 public:
  struct Node {
    int from = 0;
    int to = 0;  // done leaf iff from == 0
    int contam = -1;
    int pure = -1;
    bool done() const { return from == 0; }
  };

  int root() const { return root_; }
  const Node& node(int idx) const { return nodes_[static_cast<std::size_t>(idx)]; }
  int node_count() const { return static_cast<int>(nodes_.size()); }

  int add_done();
  int add_test(int from, int to, int contam, int pure);
  void set_root(int idx) { root_ = idx; }

  bool operator==(const StrategyTree& other) const;  // structural equality

 private:
  std::vector<Node> nodes_;
  int root_ = -1;
};

// Depth-first realization of the argmin tables into an explicit tree.
StrategyTree extract_strategy(const DPTables& tables, const ProbabilityVector& v);

enum class Verdict { OptimalAndUnique, OptimalNotUnique, Suboptimal };

struct OptimalityReport {
  Verdict verdict;
  double dp_cost;
  double gpta_cost;
  double gap;         // gpta_cost - dp_cost (0 when optimal within tol)
  double min_margin;  // smallest pair-first argmin margin over binomial states
};

// Compares the pairwise procedure against the exact ONP optimum.
// Optimal when |G(1) - gpta| <= tol; unique when the pair k = i+1 is the
// strict argmin (margin > uniqueness_tol) at every binomial state with at
// least two remaining units.
OptimalityReport is_gpta_optimal(const ProbabilityVector& v, double tol,
                                 double uniqueness_tol = 1e-9);

struct FirstActionCost {
  int k;        // first test covers units 1..k
  double cost;  // forced first move, optimal play afterwards
};

// cost(k) = 1 + Q(1,k) G(k+1) + (1 - Q(1,k)) H(1,k) for k = 1..n.
// Requires sorted v (NotSorted) and n >= 2 (TooSmall).
std::vector<FirstActionCost> first_action_costs(const ProbabilityVector& v);

namespace detail {
// Table construction without the sortedness precondition; the ordering
// search evaluates the ONP optimum of permuted tuples.
DPTables build_onp_tables(const ProbabilityVector& v);
}  // namespace detail

}  // namespace grouptest
