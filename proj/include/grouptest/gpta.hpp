#pragma once

#include <functional>
#include <vector>

#include "grouptest/model.hpp"

namespace grouptest {

enum class TestOutcome { Pure, Contaminated };

struct TestRecord {
  int from = 0;
  int to = 0;
  TestOutcome outcome = TestOutcome::Pure;

  bool operator==(const TestRecord&) const = default;
};

struct TestLog {
  std::vector<TestRecord> tests;
  int total() const { return static_cast<int>(tests.size()); }
};

struct GptaRun {
  TestLog log;
  DefectPattern classification;
};

// Runs the generalized pairwise procedure against ground truth d:
// pairs are drawn from the front of the binomial set, a contaminated pair
// is resolved by testing its lower-probability unit, and a unit whose
// state is implied by a pair outcome is classified without a test.
// Requires v sorted non-decreasing (NotSorted otherwise); LengthMismatch
// if d has a different length.
GptaRun run_gpta(const ProbabilityVector& v, const DefectPattern& d);

// delta[i-1] = Delta_{i:n} = t_{i:n} - t_{i+1:n}; delta[n-1] = 1.
using DeltaVector = std::vector<double>;

// Backward recursion Delta_{i:n} = 2 - q_i q_{i+1} - q_i Delta_{i+1:n}.
DeltaVector delta_recursive(const ProbabilityVector& v);

// Alternating-sum closed form of Delta_{i:n}; agrees with the recursion
// to ~1e-15 but is kept separate as a cross-check route.
// Throws IndexOutOfRange.
double delta_closed_form(int i, const ProbabilityVector& v);

// Expected number of tests of the pairwise procedure: sum of the deltas.
double expected_tests_gpta(const ProbabilityVector& v);

// Delta_{1:n} < 1, strict. Requires n >= 2 (TooSmall).
bool check_delta_lt_one(const ProbabilityVector& v);

using ClassificationPolicy =
    std::function<GptaRun(const ProbabilityVector&, const DefectPattern&)>;

// Exact expectation of a deterministic policy's test count, summing
// pattern_probability * trace length over all 2^n defect patterns.
// Verifies the policy classifies every pattern correctly
// (MisclassifiedPattern with the failing mask otherwise). n <= 20
// (TooLarge). The pattern space is split into fixed blocks whose partial
// sums are combined in index order, so the result is identical for any
// worker count.
double exact_expected_by_enumeration(const ProbabilityVector& v,
                                     const ClassificationPolicy& policy,
                                     int workers = 0);

// Plain single-loop reference for the blocked kernel above.
double exact_expected_by_enumeration_serial(const ProbabilityVector& v,
                                            const ClassificationPolicy& policy);

// One test per unit, front to back; baseline policy.
GptaRun individual_testing_run(const ProbabilityVector& v, const DefectPattern& d);

namespace detail {
// Definition of the pairwise procedure without the sortedness precondition;
// needed by the ordering search, where permuted tuples are evaluated.
GptaRun run_gpta_unchecked(const ProbabilityVector& v, const DefectPattern& d);
}  // namespace detail

}  // namespace grouptest
