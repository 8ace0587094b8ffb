#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"

#include "grouptest/dp.hpp"
#include "grouptest/gpta.hpp"
#include "grouptest/io.hpp"
#include "grouptest/model.hpp"
#include "grouptest/oracle.hpp"
#include "grouptest/rng.hpp"
#include "test_oracles.hpp"

using namespace grouptest;

TEST_SUITE_BEGIN("oracle");

TEST_CASE("strategy counts match the action-set recursion") {
  // n=2: the only choice is the first move, singleton or pair.
  CHECK(count_onp_strategies(1) == 1);
  CHECK(count_onp_strategies(2) == 2);
  // n=3: S(1) = C(1,1)*S(2) + C(1,2)*S(3) + C(1,3)*1 = 4 + 2 + 4 = 10.
  CHECK(count_onp_strategies(3) == 10);
  CHECK(count_onp_strategies(4) == 280);
  CHECK(count_onp_strategies(5) == 235200);

  for (int n = 1; n <= 5; ++n) {
    CHECK(StrategySpace(n).size() == count_onp_strategies(n));
  }
  CHECK_THROWS_AS(StrategySpace(6), Error);
  CHECK_THROWS_AS(count_onp_strategies(6), Error);
}

TEST_CASE("enumeration yields valid, distinct strategies") {
  for (int n = 1; n <= 4; ++n) {
    std::set<std::string> seen;
    StrategySpace space(n);
    space.for_each([&](const StrategyTree& t) {
      validate_strategy_tree(t, n);
      seen.insert(strategy_tree_to_json(t).dump());
    });
    CHECK(seen.size() == space.size());
  }
}

TEST_CASE("exact_strategy_cost baselines") {
  const ProbabilityVector v = validate_probabilities({0.3, 0.3, 0.3});
  CHECK(exact_strategy_cost(individual_chain_tree(3), v) == 3.0);
  CHECK(exact_strategy_cost(gpta_as_strategy_tree(3), v) ==
        doctest::Approx(2.753).epsilon(1e-12));

  const OnpOptimum opt = optimal_onp(v);
  CHECK(exact_strategy_cost(extract_strategy(opt.tables, v), v) ==
        doctest::Approx(opt.cost).epsilon(1e-12));
}

TEST_CASE("gpta tree replays exactly like the procedure") {
  SplitMix64 stream(107);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + static_cast<int>(stream.next() % 10);
    const ProbabilityVector v = testing::random_sorted_vector(stream, n, 0.05, 0.95);
    const StrategyTree tree = gpta_as_strategy_tree(n);
    const std::vector<std::uint32_t> counts = strategy_test_counts(tree, n);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      const GptaRun run = run_gpta(v, DefectPattern::from_mask(mask, n));
      REQUIRE(counts[static_cast<std::size_t>(mask)] ==
              static_cast<std::uint32_t>(run.log.total()));
    }
    CHECK(exact_strategy_cost(tree, v) ==
          doctest::Approx(expected_tests_gpta(v)).epsilon(1e-12));
  }
}

TEST_CASE("invalid trees are rejected") {
  // Test range outside the live binomial prefix.
  StrategyTree bad;
  const int done = bad.add_done();
  bad.set_root(bad.add_test(2, 2, done, done));
  CHECK_THROWS_AS(validate_strategy_tree(bad, 3), Error);

  // Done leaf while units remain.
  StrategyTree early;
  early.set_root(early.add_done());
  CHECK_THROWS_AS(validate_strategy_tree(early, 1), Error);

  // Contaminated sub-test must be a proper prefix.
  StrategyTree full;
  const int d0 = full.add_done();
  const int inner = full.add_test(1, 2, d0, d0);  // states below are wrong too
  full.set_root(full.add_test(1, 2, inner, d0));
  CHECK_THROWS_AS(validate_strategy_tree(full, 2), Error);

  // The valid two-unit trees pass.
  validate_strategy_tree(gpta_as_strategy_tree(2), 2);
  validate_strategy_tree(individual_chain_tree(2), 2);
}

TEST_CASE("exhaustive minimum equals the DP optimum") {
  SplitMix64 stream(109);
  for (int n = 1; n <= 5; ++n) {
    StrategySpace space(n);
    for (int trial = 0; trial < 20; ++trial) {
      const ProbabilityVector v = testing::random_sorted_vector(stream, n, 0.0, 1.0);
      double best = std::numeric_limits<double>::infinity();
      std::uint64_t best_count = 0;
      space.for_each([&](const StrategyTree& t) {
        const double c = exact_strategy_cost(t, v);
        if (c < best - 1e-12) {
          best = c;
          best_count = 1;
        } else if (c <= best + 1e-12) {
          ++best_count;
        }
      });
      const OnpOptimum opt = optimal_onp(v);
      CHECK(best == doctest::Approx(opt.cost).epsilon(1e-12));

      if (n >= 2 && in_admissible_interval(v, Openness::Open)) {
        const bool unique_by_dp =
            is_gpta_optimal(v, 1e-10).verdict == Verdict::OptimalAndUnique;
        CHECK(unique_by_dp == (best_count == 1));
      }
    }
  }
}

TEST_CASE("best ordering on symmetric input keeps the identity") {
  const BestOrdering sym = best_ordering_bruteforce(homogeneous(3, 0.33), OrderingPolicy::Gpta);
  CHECK(sym.permutation == std::vector<int>{1, 2, 3});
  CHECK(sym.cost == doctest::Approx(expected_tests_gpta(homogeneous(3, 0.33))).epsilon(1e-12));

  const BestOrdering symdp =
      best_ordering_bruteforce(homogeneous(3, 0.33), OrderingPolicy::DpOptimal);
  CHECK(symdp.permutation == std::vector<int>{1, 2, 3});
}

TEST_CASE("best ordering evaluates both orders of a pair") {
  // Either order of (0.3, 0.35) costs 3 - q(0.3) - q(0.3) q(0.35) = 1.845:
  // the procedure always tests the lower-probability unit of the pair.
  const ProbabilityVector v = validate_probabilities({0.3, 0.35});
  const BestOrdering best = best_ordering_bruteforce(v, OrderingPolicy::Gpta);
  CHECK(best.cost == doctest::Approx(1.845).epsilon(1e-12));
  CHECK(best.permutation == std::vector<int>{1, 2});
}

TEST_CASE("best ordering never loses to the sorted order") {
  SplitMix64 stream(113);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + static_cast<int>(stream.next() % 5);
    const ProbabilityVector v = testing::random_interval_vector(stream, n);
    const BestOrdering best = best_ordering_bruteforce(v, OrderingPolicy::Gpta);
    CHECK(best.cost <= expected_tests_gpta(v) + 1e-12);

    const BestOrdering bestdp = best_ordering_bruteforce(v, OrderingPolicy::DpOptimal);
    CHECK(bestdp.cost <= optimal_onp(v).cost + 1e-12);
  }
}

TEST_CASE("ordering search size guard") {
  CHECK_THROWS_AS(best_ordering_bruteforce(homogeneous(9, 0.3), OrderingPolicy::Gpta),
                  Error);
}

TEST_CASE("replay determinism") {
  const ProbabilityVector v = validate_probabilities({0.31, 0.32, 0.33});
  const StrategyTree tree = gpta_as_strategy_tree(3);
  const double a = exact_strategy_cost(tree, v);
  const double b = exact_strategy_cost(tree, v);
  CHECK(a == b);
}

TEST_SUITE_END();
