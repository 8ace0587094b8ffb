#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "grouptest/dp.hpp"
#include "grouptest/model.hpp"
#include "grouptest/rng.hpp"

namespace grouptest {

// Each bit independently defective with probability p_i, drawn from the
// given stream (exactly n draws).
DefectPattern sample_pattern(const ProbabilityVector& v, SplitMix64& stream);

// Ordered partition of 1..n into contiguous groups.
struct Partition {
  std::vector<std::pair<int, int>> groups;  // [from, to], 1-based

  static Partition singletons(int n);
  static Partition single_group(int n);
  int unit_count() const;
  bool operator==(const Partition&) const = default;
};

enum class PolicyKind { Gpta, Individual, Dorfman, ModifiedDorfman, Tree };

struct SimPolicy {
  PolicyKind kind = PolicyKind::Gpta;
  Partition partition;  // Dorfman variants
  StrategyTree tree;    // Tree policy

  static SimPolicy gpta();
  static SimPolicy individual();
  static SimPolicy dorfman(Partition p);
  static SimPolicy modified_dorfman(Partition p);
  static SimPolicy strategy(StrategyTree t);

  std::string id() const;
};

struct McReport {
  std::string policy;
  int n = 0;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double std_error = 0.0;
  std::optional<double> exact;
  std::optional<double> z;  // |mean - exact| / std_error

  bool operator==(const McReport&) const = default;
};

// Monte Carlo estimate of a policy's expected test count. Per-replicate
// counts land in fixed-index slots and statistics are reduced in index
// order, so the report is byte-identical across runs and worker counts.
// The exact expectation is attached where a closed form exists.
McReport simulate(const SimPolicy& policy, const ProbabilityVector& v,
                  std::uint64_t reps, std::uint64_t seed, int workers = 0);

// Reference implementation of the replicate loop, no parallel region.
McReport simulate_serial(const SimPolicy& policy, const ProbabilityVector& v,
                         std::uint64_t reps, std::uint64_t seed);

// Tests consumed by one replay of a Dorfman-style group schedule.
int dorfman_tests(const Partition& partition, const DefectPattern& d);
int modified_dorfman_tests(const Partition& partition, const DefectPattern& d);

// Expected tests for one group with the given q values.
// Plain Dorfman retests every member of a contaminated group:
// 1 + k (1 - Q). The modified variant skips the last member when its state
// is implied: 1 + (k-1)(1 - Q(a,b)) + (1 - Q(a,b-1)). A singleton group
// costs exactly its own pool test for both variants.
double dorfman_group_cost(std::span<const double> group_q);
double modified_dorfman_group_cost(std::span<const double> group_q);

double dorfman_exact_cost(const ProbabilityVector& v, const Partition& partition);
double modified_dorfman_exact_cost(const ProbabilityVector& v, const Partition& partition);

struct PartitionSearch {
  Partition partition;
  double cost;
  // True when contiguous search is only a heuristic for the policy
  // (modified Dorfman; its optimal partition need not be ordered).
  bool heuristic;
};

// Contiguous-partition dynamic program
// best(i) = min_j group_cost(i..j) + best(j+1), O(n^2).
// Requires sorted input for plain Dorfman (NotSorted), where ordered
// partitions are known optimal; UnknownPolicy for non-Dorfman kinds.
PartitionSearch hwang_optimal_partition(const ProbabilityVector& v, PolicyKind policy);

}  // namespace grouptest
