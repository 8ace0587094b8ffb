#include "grouptest/oat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

namespace grouptest {

WeightVector::WeightVector(std::vector<double> weights) : w(std::move(weights)) {
  if (w.empty()) {
    throw Error(ErrorKind::EmptyInput, "weight vector is empty");
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w[i]) || w[i] <= 0.0) {
      throw Error(ErrorKind::OutOfUnitInterval,
                  "weight at index " + std::to_string(i + 1) + " is not positive",
                  static_cast<std::int64_t>(i + 1));
    }
  }
}

double WeightVector::sum() const {
  double s = 0.0;
  for (double x : w) {
    s += x;
  }
  return s;
}

AlphabeticTree AlphabeticTree::single_leaf(int label) {
  AlphabeticTree t;
  t.set_root(t.add_leaf(label));
  return t;
}

int AlphabeticTree::leaf_count() const {
  int count = 0;
  for (const Node& node : nodes_) {
    count += node.leaf() ? 1 : 0;
  }
  return count;
}

int AlphabeticTree::add_leaf(int label) {
  Node node;
  node.label = label;
  node.lo = label;
  node.hi = label;
  nodes_.push_back(node);
  return static_cast<int>(nodes_.size()) - 1;
}

int AlphabeticTree::add_internal(int left, int right) {
  Node node;
  node.left = left;
  node.right = right;
  node.lo = nodes_[static_cast<std::size_t>(left)].lo;
  node.hi = nodes_[static_cast<std::size_t>(right)].hi;
  nodes_.push_back(node);
  return static_cast<int>(nodes_.size()) - 1;
}

std::vector<int> AlphabeticTree::leaf_depths() const {
  std::vector<int> depths(static_cast<std::size_t>(leaf_count()), 0);
  if (root_ < 0) {
    return depths;
  }
  std::vector<std::pair<int, int>> stack{{root_, 0}};
  while (!stack.empty()) {
    auto [idx, depth] = stack.back();
    stack.pop_back();
    const Node& node = nodes_[static_cast<std::size_t>(idx)];
    if (node.leaf()) {
      depths[static_cast<std::size_t>(node.label - 1)] = depth;
    } else {
      stack.emplace_back(node.left, depth + 1);
      stack.emplace_back(node.right, depth + 1);
    }
  }
  return depths;
}

std::vector<int> AlphabeticTree::in_order_leaf_labels() const {
  std::vector<int> labels;
  if (root_ < 0) {
    return labels;
  }
  std::vector<int> stack{root_};
  while (!stack.empty()) {
    const int idx = stack.back();
    stack.pop_back();
    const Node& node = nodes_[static_cast<std::size_t>(idx)];
    if (node.leaf()) {
      labels.push_back(node.label);
    } else {
      stack.push_back(node.right);
      stack.push_back(node.left);
    }
  }
  return labels;
}

std::pair<int, int> AlphabeticTree::test_range(int internal_idx) const {
  const Node& node = nodes_[static_cast<std::size_t>(internal_idx)];
  const Node& left = nodes_[static_cast<std::size_t>(node.left)];
  return {left.lo, left.hi};
}

bool AlphabeticTree::operator==(const AlphabeticTree& other) const {
  // Structural comparison from the roots.
  if ((root_ < 0) != (other.root_ < 0)) {
    return false;
  }
  if (root_ < 0) {
    return true;
  }
  std::vector<std::pair<int, int>> stack{{root_, other.root_}};
  while (!stack.empty()) {
    auto [a, b] = stack.back();
    stack.pop_back();
    const Node& na = nodes_[static_cast<std::size_t>(a)];
    const Node& nb = other.nodes_[static_cast<std::size_t>(b)];
    if (na.leaf() != nb.leaf()) {
      return false;
    }
    if (na.leaf()) {
      if (na.label != nb.label) {
        return false;
      }
    } else {
      stack.emplace_back(na.left, nb.left);
      stack.emplace_back(na.right, nb.right);
    }
  }
  return true;
}

WeightVector lemma2_weights(const ProbabilityVector& v) {
  const int n = v.size();
  double survive = 1.0;  // q_1 ... q_{i-1}
  std::vector<double> raw(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    raw[static_cast<std::size_t>(i - 1)] = v.p(i) * survive;
    survive *= v.q(i);
  }
  const double alpha = 1.0 - survive;
  for (double& x : raw) {
    x /= alpha;
  }
  return WeightVector(std::move(raw));
}

namespace {

// Combination phase of Hu-Tucker. Working nodes keep their sequence
// position; merged (internal) nodes are transparent when deciding
// compatibility, terminal (leaf) nodes block it.
struct WorkNode {
  double weight;
  bool terminal;
  int tree_index;  // node in the combination tree
};

struct CombineTreeNode {
  int left = -1;
  int right = -1;
  int leaf = 0;  // 1-based leaf label; 0 for internal
};

std::vector<int> hu_tucker_levels(const WeightVector& w) {
  const int n = w.size();
  std::vector<CombineTreeNode> combine;
  combine.reserve(static_cast<std::size_t>(2 * n));
  std::vector<WorkNode> work;
  work.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    combine.push_back(CombineTreeNode{-1, -1, i});
    work.push_back(WorkNode{w.at(i), true, i - 1});
  }

  for (int round = 0; round + 1 < n; ++round) {
    int best_a = -1;
    int best_b = -1;
    double best_sum = std::numeric_limits<double>::infinity();
    const int m = static_cast<int>(work.size());
    for (int a = 0; a < m; ++a) {
      for (int b = a + 1; b < m; ++b) {
        const double sum = work[static_cast<std::size_t>(a)].weight +
                           work[static_cast<std::size_t>(b)].weight;
        if (sum < best_sum) {
          best_sum = sum;
          best_a = a;
          best_b = b;
        }
        if (work[static_cast<std::size_t>(b)].terminal) {
          break;  // anything past b is blocked from a
        }
      }
    }
    const int tree_index = static_cast<int>(combine.size());
    combine.push_back(CombineTreeNode{work[static_cast<std::size_t>(best_a)].tree_index,
                                      work[static_cast<std::size_t>(best_b)].tree_index,
                                      0});
    work[static_cast<std::size_t>(best_a)] = WorkNode{best_sum, false, tree_index};
    work.erase(work.begin() + best_b);
  }

  // Level assignment: leaf depths in the combination tree.
  std::vector<int> levels(static_cast<std::size_t>(n), 0);
  std::vector<std::pair<int, int>> stack{{work.front().tree_index, 0}};
  while (!stack.empty()) {
    auto [idx, depth] = stack.back();
    stack.pop_back();
    const CombineTreeNode& node = combine[static_cast<std::size_t>(idx)];
    if (node.leaf != 0) {
      levels[static_cast<std::size_t>(node.leaf - 1)] = depth;
    } else {
      stack.emplace_back(node.left, depth + 1);
      stack.emplace_back(node.right, depth + 1);
    }
  }
  return levels;
}

// Reconstruction phase: repeatedly merge the leftmost adjacent pair at the
// current deepest level into a parent one level up, preserving order.
AlphabeticTree reconstruct_from_levels(const std::vector<int>& levels) {
  const int n = static_cast<int>(levels.size());
  AlphabeticTree tree;
  std::vector<std::pair<int, int>> seq;  // (level, node index)
  seq.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    seq.emplace_back(levels[static_cast<std::size_t>(i - 1)], tree.add_leaf(i));
  }
  while (seq.size() > 1) {
    int deepest = 0;
    for (const auto& [level, idx] : seq) {
      deepest = std::max(deepest, level);
    }
    bool merged = false;
    for (std::size_t s = 0; s + 1 < seq.size(); ++s) {
      if (seq[s].first == deepest && seq[s + 1].first == deepest) {
        const int parent = tree.add_internal(seq[s].second, seq[s + 1].second);
        seq[s] = {deepest - 1, parent};
        seq.erase(seq.begin() + static_cast<std::ptrdiff_t>(s) + 1);
        merged = true;
        break;
      }
    }
    if (!merged) {
      throw std::logic_error("hu_tucker: level sequence is not reconstructible");
    }
  }
  tree.set_root(seq.front().second);
  return tree;
}

}  // namespace

AlphabeticTree hu_tucker(const WeightVector& w) {
  if (w.size() == 1) {
    return AlphabeticTree::single_leaf(1);
  }
  return reconstruct_from_levels(hu_tucker_levels(w));
}

double gilbert_moore_cost(const WeightVector& w) {
  const int n = w.size();
  std::vector<double> prefix(static_cast<std::size_t>(n + 1), 0.0);
  for (int i = 1; i <= n; ++i) {
    prefix[static_cast<std::size_t>(i)] = prefix[static_cast<std::size_t>(i - 1)] + w.at(i);
  }
  auto weight_sum = [&](int i, int j) {
    return prefix[static_cast<std::size_t>(j)] - prefix[static_cast<std::size_t>(i - 1)];
  };

  // cost[i][j] over 1-based inclusive leaf ranges.
  std::vector<std::vector<double>> cost(
      static_cast<std::size_t>(n + 1),
      std::vector<double>(static_cast<std::size_t>(n + 1), 0.0));
  for (int len = 2; len <= n; ++len) {
    for (int i = 1; i + len - 1 <= n; ++i) {
      const int j = i + len - 1;
      double best = std::numeric_limits<double>::infinity();
      for (int k = i; k < j; ++k) {
        best = std::min(best, cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] +
                                  cost[static_cast<std::size_t>(k + 1)][static_cast<std::size_t>(j)]);
      }
      cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = weight_sum(i, j) + best;
    }
  }
  return cost[1][static_cast<std::size_t>(n)];
}

double tree_cost(const AlphabeticTree& t, const WeightVector& w) {
  if (t.leaf_count() != w.size()) {
    throw Error(ErrorKind::LeafCountMismatch,
                "tree has " + std::to_string(t.leaf_count()) + " leaves, weights have " +
                    std::to_string(w.size()));
  }
  const std::vector<int> depths = t.leaf_depths();
  double cost = 0.0;
  for (int i = 1; i <= w.size(); ++i) {
    cost += w.at(i) * depths[static_cast<std::size_t>(i - 1)];
  }
  return cost;
}

double huffman_cost(const WeightVector& w) {
  if (w.size() == 1) {
    return 0.0;
  }
  // (weight, insertion id) ordering keeps merges deterministic under ties.
  using Entry = std::pair<double, std::uint64_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  std::uint64_t next_id = 0;
  for (int i = 1; i <= w.size(); ++i) {
    heap.emplace(w.at(i), next_id++);
  }
  double cost = 0.0;
  while (heap.size() > 1) {
    const double a = heap.top().first;
    heap.pop();
    const double b = heap.top().first;
    heap.pop();
    cost += a + b;
    heap.emplace(a + b, next_id++);
  }
  return cost;
}

IsolationTree isolation_tree(const ProbabilityVector& v) {
  if (v.size() == 1) {
    // A contaminated singleton is defective without a test.
    return IsolationTree{AlphabeticTree::single_leaf(1), 0.0};
  }
  const WeightVector w = lemma2_weights(v);
  AlphabeticTree tree = hu_tucker(w);
  const double cost = tree_cost(tree, w);
  return IsolationTree{std::move(tree), cost};
}

bool check_lemma3_structure(const AlphabeticTree& t) {
  const int n = t.leaf_count();
  if (n < 3) {
    throw Error(ErrorKind::TooSmall, "structure check requires n >= 3");
  }
  const auto [root_from, root_to] = t.test_range(t.root());
  if (root_from != 1 || root_to > n - 2) {
    return false;
  }
  // Leaves n-1 and n are siblings iff some internal node spans exactly
  // [n-1, n] with two leaf children.
  for (int idx = 0; idx < t.node_count(); ++idx) {
    const auto& node = t.node(idx);
    if (node.leaf() || node.lo != n - 1 || node.hi != n) {
      continue;
    }
    const auto& left = t.node(node.left);
    const auto& right = t.node(node.right);
    if (left.leaf() && right.leaf()) {
      return true;
    }
  }
  return false;
}

double lemma3_bound(const ProbabilityVector& v) {
  const int n = v.size();
  if (n < 3) {
    throw Error(ErrorKind::TooSmall, "lemma3_bound requires n >= 3");
  }
  return v.q(n - 2) * (1.0 + v.q(n - 1) * (1.0 - v.q(n)));
}

}  // namespace grouptest
