#include "grouptest/gpta.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace grouptest {

namespace {

constexpr std::uint64_t kEnumerationBlock = 4096;

void require_same_length(const ProbabilityVector& v, const DefectPattern& d) {
  if (v.size() != d.size()) {
    throw Error(ErrorKind::LengthMismatch,
                "pattern length " + std::to_string(d.size()) +
                    " does not match vector length " + std::to_string(v.size()));
  }
}

}  // namespace

namespace detail {

GptaRun run_gpta_unchecked(const ProbabilityVector& v, const DefectPattern& d) {
  require_same_length(v, d);
  const int n = v.size();

  GptaRun run;
  std::vector<bool> defective(static_cast<std::size_t>(n), false);

  // The binomial set is always {carry (if any)} followed by cursor..n, in
  // the fixed input order.
  int carry = 0;  // 0 = none
  int cursor = 1;

  auto classify = [&](int unit, bool is_defective) {
    defective[static_cast<std::size_t>(unit - 1)] = is_defective;
  };
  auto record = [&](int from, int to, bool contaminated) {
    run.log.tests.push_back(TestRecord{
        from, to, contaminated ? TestOutcome::Contaminated : TestOutcome::Pure});
  };

  while (true) {
    const int remaining = (carry != 0 ? 1 : 0) + std::max(0, n - cursor + 1);
    if (remaining == 0) {
      break;
    }
    if (remaining == 1) {
      const int lone = carry != 0 ? carry : cursor;
      const bool def = d.defective(lone);
      record(lone, lone, def);
      classify(lone, def);
      break;
    }

    // The front pair. On sorted input a and b are always adjacent, so the
    // logged range a..b is exactly the tested pair.
    const int a = carry != 0 ? carry : cursor;
    const int b = carry != 0 ? cursor : cursor + 1;
    const bool contaminated = d.defective(a) || d.defective(b);
    record(a, b, contaminated);
    if (!contaminated) {
      classify(a, false);
      classify(b, false);
      carry = 0;
      cursor = b + 1;
      continue;
    }

    // Contaminated pair: test the lower-probability unit, first on ties.
    const int tested = v.p(a) <= v.p(b) ? a : b;
    const int other = tested == a ? b : a;
    const bool tested_def = d.defective(tested);
    record(tested, tested, tested_def);
    classify(tested, tested_def);
    if (!tested_def) {
      // The pair is contaminated and the tested unit is pure, so the other
      // unit is defective without a test.
      classify(other, true);
      carry = 0;
      cursor = b + 1;
    } else {
      // The other unit rejoins the binomial set at the front.
      carry = other;
      cursor = b + 1;
    }
  }

  std::vector<bool> bits(defective.begin(), defective.end());
  run.classification = DefectPattern(bits);
  return run;
}

}  // namespace detail

GptaRun run_gpta(const ProbabilityVector& v, const DefectPattern& d) {
  if (!v.sorted_nondecreasing()) {
    throw Error(ErrorKind::NotSorted, "run_gpta requires non-decreasing probabilities");
  }
  return detail::run_gpta_unchecked(v, d);
}

DeltaVector delta_recursive(const ProbabilityVector& v) {
  const int n = v.size();
  DeltaVector delta(static_cast<std::size_t>(n));
  if (n == 0) {
    return delta;
  }
  delta[static_cast<std::size_t>(n - 1)] = 1.0;
  for (int i = n - 1; i >= 1; --i) {
    const double qi = v.q(i);
    delta[static_cast<std::size_t>(i - 1)] =
        2.0 - qi * v.q(i + 1) - qi * delta[static_cast<std::size_t>(i)];
  }
  return delta;
}

double delta_closed_form(int i, const ProbabilityVector& v) {
  const int n = v.size();
  if (i < 1 || i > n) {
    throw Error(ErrorKind::IndexOutOfRange,
                "delta index " + std::to_string(i) + " outside 1.." + std::to_string(n),
                i);
  }
  if (i == n) {
    return 1.0;
  }
  double value = 2.0 - v.q(i) * v.q(i + 1);
  double prefix = 1.0;  // q_i ... q_{i+j-1}
  double sign = 1.0;
  for (int j = 1; j <= n - i - 1; ++j) {
    prefix *= v.q(i + j - 1);
    sign = -sign;
    value += sign * prefix * (2.0 - v.q(i + j) * v.q(i + j + 1));
  }
  prefix *= v.q(n - 1);  // now q_i ... q_{n-1}
  sign = (n - i) % 2 == 0 ? 1.0 : -1.0;
  value += sign * prefix;
  return value;
}

double expected_tests_gpta(const ProbabilityVector& v) {
  const DeltaVector delta = delta_recursive(v);
  double total = 0.0;
  for (double d : delta) {
    total += d;
  }
  return total;
}

bool check_delta_lt_one(const ProbabilityVector& v) {
  if (v.size() < 2) {
    throw Error(ErrorKind::TooSmall, "check_delta_lt_one requires n >= 2");
  }
  return delta_recursive(v)[0] < 1.0;
}

GptaRun individual_testing_run(const ProbabilityVector& v, const DefectPattern& d) {
  require_same_length(v, d);
  GptaRun run;
  std::vector<bool> bits(static_cast<std::size_t>(v.size()));
  for (int i = 1; i <= v.size(); ++i) {
    const bool def = d.defective(i);
    run.log.tests.push_back(
        TestRecord{i, i, def ? TestOutcome::Contaminated : TestOutcome::Pure});
    bits[static_cast<std::size_t>(i - 1)] = def;
  }
  run.classification = DefectPattern(bits);
  return run;
}

namespace {

// Shared by the blocked and serial enumeration paths: expectation over one
// contiguous run of pattern masks, accumulated in mask order.
double enumerate_range(const ProbabilityVector& v, const ClassificationPolicy& policy,
                       std::uint64_t begin, std::uint64_t end,
                       std::uint64_t& first_bad_mask) {
  const int n = v.size();
  double sum = 0.0;
  for (std::uint64_t mask = begin; mask < end; ++mask) {
    const DefectPattern pattern = DefectPattern::from_mask(mask, n);
    const GptaRun run = policy(v, pattern);
    if (!(run.classification == pattern)) {
      first_bad_mask = std::min(first_bad_mask, mask);
      return sum;
    }
    sum += pattern_probability(v, pattern) * run.log.total();
  }
  return sum;
}

constexpr std::uint64_t kNoBadMask = ~std::uint64_t{0};

}  // namespace

double exact_expected_by_enumeration(const ProbabilityVector& v,
                                     const ClassificationPolicy& policy, int workers) {
  const int n = v.size();
  if (n > 20) {
    throw Error(ErrorKind::TooLarge,
                "pattern enumeration capped at n = 20, got " + std::to_string(n), n);
  }
  const std::uint64_t patterns = std::uint64_t{1} << n;
  const std::uint64_t blocks = (patterns + kEnumerationBlock - 1) / kEnumerationBlock;

  std::vector<double> block_sums(static_cast<std::size_t>(blocks), 0.0);
  std::uint64_t bad_mask = kNoBadMask;
  const int threads = workers > 0 ? workers : omp_get_max_threads();

#pragma omp parallel for schedule(static) num_threads(threads) \
    reduction(min : bad_mask)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
    const std::uint64_t begin = static_cast<std::uint64_t>(b) * kEnumerationBlock;
    const std::uint64_t end = std::min(patterns, begin + kEnumerationBlock);
    std::uint64_t local_bad = kNoBadMask;
    block_sums[static_cast<std::size_t>(b)] =
        enumerate_range(v, policy, begin, end, local_bad);
    bad_mask = std::min(bad_mask, local_bad);
  }

  if (bad_mask != kNoBadMask) {
    throw Error(ErrorKind::MisclassifiedPattern,
                "policy misclassified pattern mask " + std::to_string(bad_mask),
                static_cast<std::int64_t>(bad_mask));
  }
  double total = 0.0;
  for (double s : block_sums) {
    total += s;
  }
  return total;
}

double exact_expected_by_enumeration_serial(const ProbabilityVector& v,
                                            const ClassificationPolicy& policy) {
  const int n = v.size();
  if (n > 20) {
    throw Error(ErrorKind::TooLarge,
                "pattern enumeration capped at n = 20, got " + std::to_string(n), n);
  }
  std::uint64_t bad_mask = kNoBadMask;
  const double sum = enumerate_range(v, policy, 0, std::uint64_t{1} << n, bad_mask);
  if (bad_mask != kNoBadMask) {
    throw Error(ErrorKind::MisclassifiedPattern,
                "policy misclassified pattern mask " + std::to_string(bad_mask),
                static_cast<std::int64_t>(bad_mask));
  }
  return sum;
}

}  // namespace grouptest
