#include "grouptest/sim.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "grouptest/gpta.hpp"
#include "grouptest/oracle.hpp"

namespace grouptest {

DefectPattern sample_pattern(const ProbabilityVector& v, SplitMix64& stream) {
  std::vector<bool> bits(static_cast<std::size_t>(v.size()));
  for (int i = 1; i <= v.size(); ++i) {
    bits[static_cast<std::size_t>(i - 1)] = stream.next_double() < v.p(i);
  }
  return DefectPattern(bits);
}

Partition Partition::singletons(int n) {
  Partition p;
  p.groups.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    p.groups.emplace_back(i, i);
  }
  return p;
}

Partition Partition::single_group(int n) {
  Partition p;
  p.groups.emplace_back(1, n);
  return p;
}

int Partition::unit_count() const {
  int total = 0;
  for (const auto& [from, to] : groups) {
    total += to - from + 1;
  }
  return total;
}

SimPolicy SimPolicy::gpta() { return SimPolicy{PolicyKind::Gpta, {}, {}}; }
SimPolicy SimPolicy::individual() { return SimPolicy{PolicyKind::Individual, {}, {}}; }
SimPolicy SimPolicy::dorfman(Partition p) {
  return SimPolicy{PolicyKind::Dorfman, std::move(p), {}};
}
SimPolicy SimPolicy::modified_dorfman(Partition p) {
  return SimPolicy{PolicyKind::ModifiedDorfman, std::move(p), {}};
}
SimPolicy SimPolicy::strategy(StrategyTree t) {
  return SimPolicy{PolicyKind::Tree, {}, std::move(t)};
}

std::string SimPolicy::id() const {
  switch (kind) {
    case PolicyKind::Gpta:
      return "gpta";
    case PolicyKind::Individual:
      return "individual";
    case PolicyKind::Dorfman:
      return "dorfman";
    case PolicyKind::ModifiedDorfman:
      return "mdorfman";
    case PolicyKind::Tree:
      return "tree";
  }
  return "unknown";
}

int dorfman_tests(const Partition& partition, const DefectPattern& d) {
  int tests = 0;
  for (const auto& [from, to] : partition.groups) {
    const int k = to - from + 1;
    tests += 1;  // pool test classifies a singleton outright
    if (k >= 2 && d.any_defective(from, to)) {
      tests += k;
    }
  }
  return tests;
}

int modified_dorfman_tests(const Partition& partition, const DefectPattern& d) {
  int tests = 0;
  for (const auto& [from, to] : partition.groups) {
    const int k = to - from + 1;
    tests += 1;
    if (k >= 2 && d.any_defective(from, to)) {
      tests += k - 1;
      // The last member is tested only when an earlier defective leaves its
      // state undetermined; otherwise it is defective by inference.
      if (d.any_defective(from, to - 1)) {
        tests += 1;
      }
    }
  }
  return tests;
}

double dorfman_group_cost(std::span<const double> group_q) {
  const int k = static_cast<int>(group_q.size());
  if (k == 1) {
    return 1.0;
  }
  double all_pure = 1.0;
  for (double q : group_q) {
    all_pure *= q;
  }
  return 1.0 + k * (1.0 - all_pure);
}

double modified_dorfman_group_cost(std::span<const double> group_q) {
  const int k = static_cast<int>(group_q.size());
  if (k == 1) {
    return 1.0;
  }
  double pure_butlast = 1.0;
  for (int i = 0; i + 1 < k; ++i) {
    pure_butlast *= group_q[static_cast<std::size_t>(i)];
  }
  const double all_pure = pure_butlast * group_q[static_cast<std::size_t>(k - 1)];
  return 1.0 + (k - 1) * (1.0 - all_pure) + (1.0 - pure_butlast);
}

namespace {

std::vector<double> group_qs(const ProbabilityVector& v, int from, int to) {
  std::vector<double> qs(static_cast<std::size_t>(to - from + 1));
  for (int i = from; i <= to; ++i) {
    qs[static_cast<std::size_t>(i - from)] = v.q(i);
  }
  return qs;
}

void require_partition_of(const ProbabilityVector& v, const Partition& partition) {
  int expected = 1;
  for (const auto& [from, to] : partition.groups) {
    if (from != expected || to < from || to > v.size()) {
      throw Error(ErrorKind::LengthMismatch, "partition does not cover 1..n contiguously");
    }
    expected = to + 1;
  }
  if (expected != v.size() + 1) {
    throw Error(ErrorKind::LengthMismatch, "partition does not cover 1..n contiguously");
  }
}

// Right-associated sum, matching the partition DP's composition order so
// exhaustive comparisons can assert exact equality.
double partition_cost(const ProbabilityVector& v, const Partition& partition,
                      double (*group_cost)(std::span<const double>)) {
  require_partition_of(v, partition);
  double total = 0.0;
  for (auto it = partition.groups.rbegin(); it != partition.groups.rend(); ++it) {
    const std::vector<double> qs = group_qs(v, it->first, it->second);
    total = group_cost(std::span<const double>(qs)) + total;
  }
  return total;
}

}  // namespace

double dorfman_exact_cost(const ProbabilityVector& v, const Partition& partition) {
  return partition_cost(v, partition, dorfman_group_cost);
}

double modified_dorfman_exact_cost(const ProbabilityVector& v, const Partition& partition) {
  return partition_cost(v, partition, modified_dorfman_group_cost);
}

namespace {

int tests_for_pattern(const SimPolicy& policy, const ProbabilityVector& v,
                      const DefectPattern& pattern) {
  switch (policy.kind) {
    case PolicyKind::Gpta:
      return run_gpta(v, pattern).log.total();
    case PolicyKind::Individual:
      return v.size();
    case PolicyKind::Dorfman:
      return dorfman_tests(policy.partition, pattern);
    case PolicyKind::ModifiedDorfman:
      return modified_dorfman_tests(policy.partition, pattern);
    case PolicyKind::Tree: {
      const StrategyTree& t = policy.tree;
      int tests = 0;
      int idx = t.root();
      while (!t.node(idx).done()) {
        ++tests;
        const auto& node = t.node(idx);
        idx = pattern.any_defective(node.from, node.to) ? node.contam : node.pure;
      }
      return tests;
    }
  }
  throw Error(ErrorKind::UnknownPolicy, "unknown policy kind");
}

std::optional<double> exact_expectation(const SimPolicy& policy,
                                        const ProbabilityVector& v) {
  switch (policy.kind) {
    case PolicyKind::Gpta:
      return expected_tests_gpta(v);
    case PolicyKind::Individual:
      return static_cast<double>(v.size());
    case PolicyKind::Dorfman:
      return dorfman_exact_cost(v, policy.partition);
    case PolicyKind::ModifiedDorfman:
      return modified_dorfman_exact_cost(v, policy.partition);
    case PolicyKind::Tree:
      if (v.size() <= 20) {
        return exact_strategy_cost(policy.tree, v);
      }
      return std::nullopt;
  }
  return std::nullopt;
}

void validate_policy(const SimPolicy& policy, const ProbabilityVector& v) {
  switch (policy.kind) {
    case PolicyKind::Gpta:
      if (!v.sorted_nondecreasing()) {
        throw Error(ErrorKind::NotSorted, "gpta policy requires sorted probabilities");
      }
      return;
    case PolicyKind::Individual:
      return;
    case PolicyKind::Dorfman:
    case PolicyKind::ModifiedDorfman:
      require_partition_of(v, policy.partition);
      return;
    case PolicyKind::Tree:
      validate_strategy_tree(policy.tree, v.size());
      return;
  }
  throw Error(ErrorKind::UnknownPolicy, "unknown policy kind");
}

McReport report_from_slots(const SimPolicy& policy, const ProbabilityVector& v,
                           std::uint64_t reps, std::uint64_t seed,
                           const std::vector<std::uint32_t>& slots) {
  McReport report;
  report.policy = policy.id();
  report.n = v.size();
  report.reps = reps;
  report.seed = seed;

  // Index-order reduction keeps the numbers independent of scheduling.
  double sum = 0.0;
  for (std::uint32_t c : slots) {
    sum += static_cast<double>(c);
  }
  const double mean = sum / static_cast<double>(reps);
  double sq = 0.0;
  for (std::uint32_t c : slots) {
    const double d = static_cast<double>(c) - mean;
    sq += d * d;
  }
  const double variance = reps > 1 ? sq / static_cast<double>(reps - 1) : 0.0;
  report.mean = mean;
  report.stddev = std::sqrt(variance);
  report.std_error = report.stddev / std::sqrt(static_cast<double>(reps));
  report.exact = exact_expectation(policy, v);
  if (report.exact) {
    const double diff = std::abs(mean - *report.exact);
    report.z = report.std_error > 0.0 ? diff / report.std_error : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  }
  return report;
}

}  // namespace

McReport simulate(const SimPolicy& policy, const ProbabilityVector& v,
                  std::uint64_t reps, std::uint64_t seed, int workers) {
  if (reps < 1) {
    throw Error(ErrorKind::TooSmall, "simulate requires reps >= 1");
  }
  validate_policy(policy, v);

  std::vector<std::uint32_t> slots(static_cast<std::size_t>(reps), 0);
  const int threads = workers > 0 ? workers : omp_get_max_threads();

#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t rep = 0; rep < static_cast<std::int64_t>(reps); ++rep) {
    SplitMix64 stream = replicate_stream(seed, static_cast<std::uint64_t>(rep));
    const DefectPattern pattern = sample_pattern(v, stream);
    slots[static_cast<std::size_t>(rep)] =
        static_cast<std::uint32_t>(tests_for_pattern(policy, v, pattern));
  }
  return report_from_slots(policy, v, reps, seed, slots);
}

McReport simulate_serial(const SimPolicy& policy, const ProbabilityVector& v,
                         std::uint64_t reps, std::uint64_t seed) {
  if (reps < 1) {
    throw Error(ErrorKind::TooSmall, "simulate requires reps >= 1");
  }
  validate_policy(policy, v);

  std::vector<std::uint32_t> slots(static_cast<std::size_t>(reps), 0);
  for (std::uint64_t rep = 0; rep < reps; ++rep) {
    SplitMix64 stream = replicate_stream(seed, rep);
    const DefectPattern pattern = sample_pattern(v, stream);
    slots[static_cast<std::size_t>(rep)] =
        static_cast<std::uint32_t>(tests_for_pattern(policy, v, pattern));
  }
  return report_from_slots(policy, v, reps, seed, slots);
}

PartitionSearch hwang_optimal_partition(const ProbabilityVector& v, PolicyKind policy) {
  if (policy != PolicyKind::Dorfman && policy != PolicyKind::ModifiedDorfman) {
    throw Error(ErrorKind::UnknownPolicy,
                "partition search supports dorfman and mdorfman policies");
  }
  if (policy == PolicyKind::Dorfman && !v.sorted_nondecreasing()) {
    // Ordered partitions are provably optimal only on sorted input.
    throw Error(ErrorKind::NotSorted, "dorfman partition search requires sorted input");
  }
  const int n = v.size();
  auto cost_of = policy == PolicyKind::Dorfman ? dorfman_group_cost
                                               : modified_dorfman_group_cost;

  std::vector<double> best(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<int> cut(static_cast<std::size_t>(n + 1), 0);
  for (int i = n; i >= 1; --i) {
    double best_cost = std::numeric_limits<double>::infinity();
    int best_j = i;
    for (int j = i; j <= n; ++j) {
      const std::vector<double> qs = group_qs(v, i, j);
      const double cost = cost_of(std::span<const double>(qs)) +
                          best[static_cast<std::size_t>(j)];
      if (cost < best_cost) {
        best_cost = cost;
        best_j = j;
      }
    }
    best[static_cast<std::size_t>(i - 1)] = best_cost;
    cut[static_cast<std::size_t>(i - 1)] = best_j;
  }

  Partition partition;
  int i = 1;
  while (i <= n) {
    const int j = cut[static_cast<std::size_t>(i - 1)];
    partition.groups.emplace_back(i, j);
    i = j + 1;
  }
  return PartitionSearch{std::move(partition), best[0],
                         policy == PolicyKind::ModifiedDorfman};
}

}  // namespace grouptest
