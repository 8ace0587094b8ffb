#include "grouptest/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace grouptest {

bool ProbabilityVector::sorted_nondecreasing() const {
  return std::is_sorted(p_.begin(), p_.end());
}

ProbabilityVector validate_probabilities(const std::vector<double>& raw) {
  if (raw.empty()) {
    throw Error(ErrorKind::EmptyInput, "probability vector is empty");
  }
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double x = raw[i];
    const auto idx = static_cast<std::int64_t>(i + 1);
    if (!std::isfinite(x)) {
      throw Error(ErrorKind::NotFinite,
                  "probability at index " + std::to_string(idx) + " is not finite", idx);
    }
    if (!(x > 0.0 && x < 1.0)) {
      throw Error(ErrorKind::OutOfUnitInterval,
                  "probability at index " + std::to_string(idx) + " is outside (0,1)",
                  idx);
    }
  }
  return ProbabilityVector(raw);
}

ProbabilityVector homogeneous(int n, double p) {
  return validate_probabilities(std::vector<double>(static_cast<std::size_t>(n), p));
}

SortedVector sort_nondecreasing(const ProbabilityVector& v) {
  const int n = v.size();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(),
                   [&v](int a, int b) { return v.p(a) < v.p(b); });
  std::vector<double> sorted(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    sorted[static_cast<std::size_t>(k - 1)] = v.p(order[static_cast<std::size_t>(k - 1)]);
  }
  return SortedVector{validate_probabilities(sorted), std::move(order)};
}

double AdmissibleInterval::lower_endpoint() {
  static const double value = 1.0 - 1.0 / std::sqrt(2.0);
  return value;
}

double AdmissibleInterval::upper_endpoint() {
  static const double value = (3.0 - std::sqrt(5.0)) / 2.0;
  return value;
}

AdmissibleInterval AdmissibleInterval::open() {
  return AdmissibleInterval{lower_endpoint(), upper_endpoint(), Openness::Open};
}

AdmissibleInterval AdmissibleInterval::closed() {
  return AdmissibleInterval{lower_endpoint(), upper_endpoint(), Openness::Closed};
}

bool AdmissibleInterval::contains(double p) const {
  if (openness == Openness::Open) {
    return lower < p && p < upper;
  }
  return lower <= p && p <= upper;
}

bool in_admissible_interval(const ProbabilityVector& v, Openness openness) {
  const AdmissibleInterval interval =
      openness == Openness::Open ? AdmissibleInterval::open() : AdmissibleInterval::closed();
  for (int i = 1; i <= v.size(); ++i) {
    if (!interval.contains(v.p(i))) {
      return false;
    }
  }
  return true;
}

DefectPattern::DefectPattern(std::vector<bool> bits) {
  bits_.reserve(bits.size());
  for (bool b : bits) {
    bits_.push_back(b ? 1 : 0);
  }
}

DefectPattern DefectPattern::from_mask(std::uint64_t mask, int n) {
  DefectPattern d;
  d.bits_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    d.bits_[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
  }
  return d;
}

bool DefectPattern::any_defective(int from, int to) const {
  for (int i = from; i <= to; ++i) {
    if (defective(i)) {
      return true;
    }
  }
  return false;
}

std::uint64_t DefectPattern::mask() const {
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) {
      m |= std::uint64_t{1} << i;
    }
  }
  return m;
}

int DefectPattern::count_defective() const {
  int c = 0;
  for (std::uint8_t b : bits_) {
    c += b;
  }
  return c;
}

double pattern_probability(const ProbabilityVector& v, const DefectPattern& d) {
  if (v.size() != d.size()) {
    throw Error(ErrorKind::LengthMismatch,
                "pattern length " + std::to_string(d.size()) +
                    " does not match vector length " + std::to_string(v.size()));
  }
  double prob = 1.0;
  for (int i = 1; i <= v.size(); ++i) {
    prob *= d.defective(i) ? v.p(i) : v.q(i);
  }
  return prob;
}

}  // namespace grouptest
