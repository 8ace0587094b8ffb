#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace grouptest {

enum class ErrorKind {
  EmptyInput,
  OutOfUnitInterval,
  NotFinite,
  LengthMismatch,
  IndexOutOfRange,
  NotSorted,
  TooSmall,
  TooLarge,
  MisclassifiedPattern,
  UnknownPolicy,
  InvalidTree,
  LeafCountMismatch,
  UnknownCheck,
  ParseError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::int64_t index = -1)
      : std::runtime_error(what), kind_(kind), index_(index) {}

  ErrorKind kind() const noexcept { return kind_; }
  // 1-based unit index, line number, or pattern mask, depending on the error.
  std::int64_t index() const noexcept { return index_; }

 private:
  ErrorKind kind_;
  std::int64_t index_;
};

// Defect probabilities p_1..p_n with every p_i in the open unit interval.
// Unit indices are 1-based throughout the library, matching the u_1..u_n
// naming used in reports and serialized trees.
class ProbabilityVector {
 public:
  ProbabilityVector() = default;  // n = 0

  int size() const { return static_cast<int>(p_.size()); }
  double p(int i) const { return p_[static_cast<std::size_t>(i - 1)]; }
  double q(int i) const { return 1.0 - p(i); }
  const std::vector<double>& values() const { return p_; }
  bool sorted_nondecreasing() const;

 private:
  explicit ProbabilityVector(std::vector<double> p) : p_(std::move(p)) {}
  friend ProbabilityVector validate_probabilities(const std::vector<double>& raw);

  std::vector<double> p_;
};

// Validates 0 < p_i < 1 and finiteness; preserves input order.
// Throws EmptyInput, OutOfUnitInterval(i), NotFinite(i).
ProbabilityVector validate_probabilities(const std::vector<double>& raw);

// n copies of the same probability.
ProbabilityVector homogeneous(int n, double p);

struct SortedVector {
  ProbabilityVector vector;
  // permutation[k-1] = original 1-based index of the unit at sorted position k
  std::vector<int> permutation;
};

// Stable non-decreasing sort; equal values keep their relative order.
SortedVector sort_nondecreasing(const ProbabilityVector& v);

enum class Openness { Open, Closed };

// The probability range (1 - 1/sqrt(2), (3 - sqrt(5))/2) where pairwise
// testing is the unique optimal order-preserving nested procedure.
// Endpoints are computed from the radical expressions, and membership uses
// exact floating-point comparison: endpoint inputs are classified as
// outside the open interval and inside the closed one.
struct AdmissibleInterval {
  double lower;
  double upper;
  Openness openness;

  static double lower_endpoint();  // 1 - 1/sqrt(2)
  static double upper_endpoint();  // (3 - sqrt(5))/2
  static AdmissibleInterval open();
  static AdmissibleInterval closed();

  bool contains(double p) const;
};

bool in_admissible_interval(const ProbabilityVector& v, Openness openness);

// Ground-truth defective/pure assignment for simulation and enumeration.
class DefectPattern {
 public:
  DefectPattern() = default;
  explicit DefectPattern(std::vector<bool> bits);
  static DefectPattern from_mask(std::uint64_t mask, int n);

  int size() const { return static_cast<int>(bits_.size()); }
  bool defective(int i) const { return bits_[static_cast<std::size_t>(i - 1)] != 0; }
  bool any_defective(int from, int to) const;
  std::uint64_t mask() const;  // requires n <= 64
  int count_defective() const;

  bool operator==(const DefectPattern& other) const { return bits_ == other.bits_; }

 private:
  std::vector<std::uint8_t> bits_;
};

// Product of p_i over defective units times q_i over pure units.
// Throws LengthMismatch.
double pattern_probability(const ProbabilityVector& v, const DefectPattern& d);

}  // namespace grouptest
