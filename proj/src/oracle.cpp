#include "grouptest/oracle.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "grouptest/gpta.hpp"

namespace grouptest {

namespace {

constexpr int kMaxEnumerationUnits = 5;
constexpr int kMaxOrderingUnits = 8;

[[noreturn]] void throw_invalid_tree(const std::string& why) {
  throw Error(ErrorKind::InvalidTree, "invalid strategy tree: " + why);
}

}  // namespace

StrategySpace::StrategySpace(int n) : n_(n) {
  if (n < 1 || n > kMaxEnumerationUnits) {
    throw Error(ErrorKind::TooLarge,
                "strategy enumeration supports 1 <= n <= 5, got " + std::to_string(n), n);
  }
  binomial_.resize(static_cast<std::size_t>(n + 1));
  contaminated_.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));

  auto contaminated_at = [&](int i, int j) -> std::vector<Variant>& {
    return contaminated_[static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(n) +
                         static_cast<std::size_t>(j - 1)];
  };
  // Variant count of a contaminated state; a singleton passes through to
  // the binomial suffix without a node.
  auto contaminated_count = [&](int i, int j) -> std::size_t {
    if (i == j) {
      return binomial_[static_cast<std::size_t>(i)].size();  // state i+1
    }
    return contaminated_at(i, j).size();
  };

  // binomial_[i-1] holds state i; fill states from the back.
  binomial_[static_cast<std::size_t>(n)].push_back(Variant{0, 0, 0});  // state n+1: done

  for (int i = n; i >= 1; --i) {
    for (int j = i + 1; j <= n; ++j) {
      auto& variants = contaminated_at(i, j);
      for (int m = i; m < j; ++m) {
        const std::size_t contam_options = contaminated_count(i, m);
        const std::size_t pure_options = contaminated_count(m + 1, j);
        for (std::size_t c = 0; c < contam_options; ++c) {
          for (std::size_t p = 0; p < pure_options; ++p) {
            variants.push_back(Variant{m, static_cast<std::uint32_t>(c),
                                       static_cast<std::uint32_t>(p)});
          }
        }
      }
    }
    auto& variants = binomial_[static_cast<std::size_t>(i - 1)];
    for (int k = i; k <= n; ++k) {
      const std::size_t contam_options = contaminated_count(i, k);
      const std::size_t pure_options = binomial_[static_cast<std::size_t>(k)].size();
      for (std::size_t c = 0; c < contam_options; ++c) {
        for (std::size_t p = 0; p < pure_options; ++p) {
          variants.push_back(
              Variant{k, static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(p)});
        }
      }
    }
  }
}

std::uint64_t StrategySpace::size() const {
  return binomial_[0].size();
}

int StrategySpace::append_subtree_binomial(int i, std::uint32_t variant,
                                           StrategyTree& out) const {
  if (i == n_ + 1) {
    return out.add_done();
  }
  const Variant& var = binomial_[static_cast<std::size_t>(i - 1)][variant];
  const int k = var.action;
  const int contam = k == i ? append_subtree_binomial(i + 1, var.contam_child, out)
                            : append_subtree_contaminated(i, k, var.contam_child, out);
  const int pure = append_subtree_binomial(k + 1, var.pure_child, out);
  return out.add_test(i, k, contam, pure);
}

int StrategySpace::append_subtree_contaminated(int i, int j, std::uint32_t variant,
                                               StrategyTree& out) const {
  const Variant& var = contaminated_[static_cast<std::size_t>(i - 1) *
                                         static_cast<std::size_t>(n_) +
                                     static_cast<std::size_t>(j - 1)][variant];
  const int m = var.action;
  const int contam = m == i ? append_subtree_binomial(i + 1, var.contam_child, out)
                            : append_subtree_contaminated(i, m, var.contam_child, out);
  const int pure = m + 1 == j
                       ? append_subtree_binomial(j + 1, var.pure_child, out)
                       : append_subtree_contaminated(m + 1, j, var.pure_child, out);
  return out.add_test(i, m, contam, pure);
}

StrategyTree StrategySpace::materialize(std::uint64_t index) const {
  StrategyTree tree;
  tree.set_root(append_subtree_binomial(1, static_cast<std::uint32_t>(index), tree));
  return tree;
}

void StrategySpace::for_each(const std::function<void(const StrategyTree&)>& visit) const {
  const std::uint64_t total = size();
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    visit(materialize(idx));
  }
}

std::uint64_t count_onp_strategies(int n) {
  if (n < 1 || n > kMaxEnumerationUnits) {
    throw Error(ErrorKind::TooLarge,
                "strategy enumeration supports 1 <= n <= 5, got " + std::to_string(n), n);
  }
  // count_b[i-1] = strategies from binomial state i; count_c over segments.
  std::vector<std::uint64_t> count_b(static_cast<std::size_t>(n + 1), 0);
  std::vector<std::vector<std::uint64_t>> count_c(
      static_cast<std::size_t>(n + 2), std::vector<std::uint64_t>(static_cast<std::size_t>(n + 2), 0));
  count_b[static_cast<std::size_t>(n)] = 1;
  auto c_of = [&](int i, int j) -> std::uint64_t {
    return i == j ? count_b[static_cast<std::size_t>(i)]
                  : count_c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  };
  for (int i = n; i >= 1; --i) {
    for (int j = i + 1; j <= n; ++j) {
      std::uint64_t total = 0;
      for (int m = i; m < j; ++m) {
        total += c_of(i, m) * c_of(m + 1, j);
      }
      count_c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = total;
    }
    std::uint64_t total = 0;
    for (int k = i; k <= n; ++k) {
      total += c_of(i, k) * count_b[static_cast<std::size_t>(k)];
    }
    count_b[static_cast<std::size_t>(i - 1)] = total;
  }
  return count_b[0];
}

namespace {

// State machine mirroring the DP's action space.
struct LiveState {
  bool contaminated;
  int i;
  int j;  // segment end (contaminated) or unused (binomial)
};

void validate_node(const StrategyTree& t, int idx, LiveState state, int n) {
  const StrategyTree::Node& node = t.node(idx);
  if (!state.contaminated) {
    const int i = state.i;
    if (i > n) {
      if (!node.done()) {
        throw_invalid_tree("test after all units are classified");
      }
      return;
    }
    if (node.done()) {
      throw_invalid_tree("done leaf with unclassified units");
    }
    if (node.from != i || node.to < i || node.to > n) {
      throw_invalid_tree("binomial test must cover a prefix of the remaining suffix");
    }
    const int k = node.to;
    if (k == i) {
      validate_node(t, node.contam, LiveState{false, i + 1, 0}, n);
    } else {
      validate_node(t, node.contam, LiveState{true, i, k}, n);
    }
    validate_node(t, node.pure, LiveState{false, k + 1, 0}, n);
    return;
  }

  const int i = state.i;
  const int j = state.j;
  // Contaminated singletons are classified by inference, so no node may
  // test them; the state advances before any node is consulted.
  if (i == j) {
    validate_node(t, idx, LiveState{false, i + 1, 0}, n);
    return;
  }
  if (node.done()) {
    throw_invalid_tree("done leaf inside a contaminated segment");
  }
  if (node.from != i || node.to < i || node.to >= j) {
    throw_invalid_tree("contaminated sub-test must cover a proper prefix of the segment");
  }
  const int m = node.to;
  if (m == i) {
    validate_node(t, node.contam, LiveState{false, i + 1, 0}, n);
  } else {
    validate_node(t, node.contam, LiveState{true, i, m}, n);
  }
  if (m + 1 == j) {
    validate_node(t, node.pure, LiveState{false, j + 1, 0}, n);
  } else {
    validate_node(t, node.pure, LiveState{true, m + 1, j}, n);
  }
}

}  // namespace

void validate_strategy_tree(const StrategyTree& t, int n) {
  if (t.root() < 0) {
    throw_invalid_tree("empty tree");
  }
  validate_node(t, t.root(), LiveState{false, 1, 0}, n);
}

std::vector<std::uint32_t> strategy_test_counts(const StrategyTree& t, int n) {
  if (n > 20) {
    throw Error(ErrorKind::TooLarge,
                "pattern replay capped at n = 20, got " + std::to_string(n), n);
  }
  validate_strategy_tree(t, n);

  // Bitmask of units covered by each node's test.
  std::vector<std::uint32_t> range_mask(static_cast<std::size_t>(t.node_count()), 0);
  for (int idx = 0; idx < t.node_count(); ++idx) {
    const auto& node = t.node(idx);
    if (!node.done()) {
      for (int u = node.from; u <= node.to; ++u) {
        range_mask[static_cast<std::size_t>(idx)] |= std::uint32_t{1} << (u - 1);
      }
    }
  }

  const std::uint64_t patterns = std::uint64_t{1} << n;
  std::vector<std::uint32_t> counts(static_cast<std::size_t>(patterns), 0);
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    std::uint32_t tests = 0;
    int idx = t.root();
    while (!t.node(idx).done()) {
      ++tests;
      const bool contaminated = (mask & range_mask[static_cast<std::size_t>(idx)]) != 0;
      idx = contaminated ? t.node(idx).contam : t.node(idx).pure;
    }
    counts[static_cast<std::size_t>(mask)] = tests;
  }
  return counts;
}

double exact_strategy_cost(const StrategyTree& t, const ProbabilityVector& v) {
  const int n = v.size();
  const std::vector<std::uint32_t> counts = strategy_test_counts(t, n);
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < counts.size(); ++mask) {
    total += pattern_probability(v, DefectPattern::from_mask(mask, n)) *
             counts[static_cast<std::size_t>(mask)];
  }
  return total;
}

namespace {

// Subtrees for identical binomial states are shared, keeping the tree at
// O(n) nodes; replay and structural equality are agnostic to sharing.
int gpta_tree_binomial(int i, int n, std::vector<int>& memo, StrategyTree& out) {
  if (memo[static_cast<std::size_t>(i - 1)] >= 0) {
    return memo[static_cast<std::size_t>(i - 1)];
  }
  int result = -1;
  if (i > n) {
    result = out.add_done();
  } else if (i == n) {
    const int after = gpta_tree_binomial(n + 1, n, memo, out);
    result = out.add_test(n, n, after, after);
  } else {
    // Pair i, i+1. Contaminated: test unit i; if pure, unit i+1 is
    // defective by inference; if defective, unit i+1 rejoins the binomial
    // suffix.
    const int after_defective = gpta_tree_binomial(i + 1, n, memo, out);
    const int after_pair = gpta_tree_binomial(i + 2, n, memo, out);
    const int step2 = out.add_test(i, i, after_defective, after_pair);
    result = out.add_test(i, i + 1, step2, after_pair);
  }
  memo[static_cast<std::size_t>(i - 1)] = result;
  return result;
}

}  // namespace

StrategyTree gpta_as_strategy_tree(int n) {
  StrategyTree tree;
  std::vector<int> memo(static_cast<std::size_t>(n + 2), -1);
  tree.set_root(gpta_tree_binomial(1, n, memo, tree));
  return tree;
}

StrategyTree individual_chain_tree(int n) {
  StrategyTree tree;
  int next = tree.add_done();
  for (int i = n; i >= 1; --i) {
    next = tree.add_test(i, i, next, next);
  }
  tree.set_root(next);
  return tree;
}

BestOrdering best_ordering_bruteforce(const ProbabilityVector& v, OrderingPolicy policy) {
  const int n = v.size();
  if (n > kMaxOrderingUnits) {
    throw Error(ErrorKind::TooLarge,
                "ordering search capped at n = 8, got " + std::to_string(n), n);
  }
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 1);

  BestOrdering best;
  best.cost = std::numeric_limits<double>::infinity();
  std::vector<double> values(static_cast<std::size_t>(n));
  do {
    for (int k = 0; k < n; ++k) {
      values[static_cast<std::size_t>(k)] = v.p(perm[static_cast<std::size_t>(k)]);
    }
    const ProbabilityVector permuted = validate_probabilities(values);
    double cost = 0.0;
    if (policy == OrderingPolicy::Gpta) {
      cost = exact_expected_by_enumeration(permuted, detail::run_gpta_unchecked, 1);
    } else {
      cost = detail::build_onp_tables(permuted).G(1);
    }
    // Permutations arrive in lexicographic order, so a strict improvement
    // rule resolves ties toward the smallest permutation.
    if (cost < best.cost) {
      best.cost = cost;
      best.permutation = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace grouptest
