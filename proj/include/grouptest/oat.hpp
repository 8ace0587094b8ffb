#pragma once

#include <span>
#include <utility>
#include <vector>

#include "grouptest/model.hpp"

namespace grouptest {

// Positive leaf weights, left-to-right. Weights produced by lemma2_weights
// sum to 1; general weight vectors need not.
struct WeightVector {
  std::vector<double> w;

  explicit WeightVector(std::vector<double> weights);
  int size() const { return static_cast<int>(w.size()); }
  double at(int i) const { return w[static_cast<std::size_t>(i - 1)]; }
  double sum() const;
};

// Extended binary tree whose leaves carry labels 1..n in left-to-right
// order. Every internal node has exactly two children and records the
// contiguous leaf range of its subtree; the tested group of an internal
// node is the leaf range of its left (contaminated-branch) child.
class AlphabeticTree {
 public:
  struct Node {
    int left = -1;
    int right = -1;
    int label = 0;  // leaf label, 1-based (leaves only)
    int lo = 0;
    int hi = 0;  // leaf-label range covered by the subtree
    bool leaf() const { return left < 0; }
  };

  static AlphabeticTree single_leaf(int label = 1);

  int root() const { return root_; }
  const Node& node(int idx) const { return nodes_[static_cast<std::size_t>(idx)]; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int leaf_count() const;

  // Depth of leaf i at index i-1.
  std::vector<int> leaf_depths() const;
  std::vector<int> in_order_leaf_labels() const;
  // Tested group of an internal node: leaf range of its left child.
  std::pair<int, int> test_range(int internal_idx) const;

  int add_leaf(int label);
  int add_internal(int left, int right);
  void set_root(int idx) { root_ = idx; }

  bool operator==(const AlphabeticTree& other) const;

 private:
  std::vector<Node> nodes_;
  int root_ = -1;
};

// Isolation weights for a contaminated ordered group:
// w_i = p_i q_1...q_{i-1} / alpha with alpha = 1 - q_1...q_n.
WeightVector lemma2_weights(const ProbabilityVector& v);

// Optimal alphabetic tree by the Hu-Tucker construction: combination of
// minimal-sum compatible pairs, level assignment, and order-preserving
// reconstruction from the level sequence. Ties in the combination phase
// are broken by smallest left position, then smallest right position.
AlphabeticTree hu_tucker(const WeightVector& w);

// Optimal alphabetic tree cost by the classical interval dynamic program
// C(i,j) = W(i,j) + min_k (C(i,k) + C(k+1,j)); independent oracle for
// hu_tucker.
double gilbert_moore_cost(const WeightVector& w);

// Weighted external path length sum w_i * depth(leaf i).
// Throws LeafCountMismatch.
double tree_cost(const AlphabeticTree& t, const WeightVector& w);

// Optimal unordered prefix-code cost (two-smallest merging); lower bound
// for any alphabetic tree cost over the same weights.
double huffman_cost(const WeightVector& w);

struct IsolationTree {
  AlphabeticTree tree;
  double cost;
};

// Optimal procedure for isolating the first defective of a contaminated
// ordered group: hu_tucker over lemma2_weights. Internal nodes test the
// leftmost remaining portion; leaf i means "u_i is the first defective".
IsolationTree isolation_tree(const ProbabilityVector& v);

// For n >= 3 (TooSmall otherwise): the root's tested group stays within
// leaves 1..n-2 and leaves n-1, n are siblings.
bool check_lemma3_structure(const AlphabeticTree& t);

// q_{n-2} (1 + q_{n-1} (1 - q_n)); value < 1 is equivalent to
// w_n < w_{n-2} and forces the structure checked above. n >= 3 (TooSmall).
double lemma3_bound(const ProbabilityVector& v);

}  // namespace grouptest
