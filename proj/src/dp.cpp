#include "grouptest/dp.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "grouptest/gpta.hpp"

namespace grouptest {

int StrategyTree::add_done() {
  nodes_.push_back(Node{});
  return static_cast<int>(nodes_.size()) - 1;
}

int StrategyTree::add_test(int from, int to, int contam, int pure) {
  nodes_.push_back(Node{from, to, contam, pure});
  return static_cast<int>(nodes_.size()) - 1;
}

bool StrategyTree::operator==(const StrategyTree& other) const {
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
    if (na.done() != nb.done()) {
      return false;
    }
    if (na.done()) {
      continue;
    }
    if (na.from != nb.from || na.to != nb.to) {
      return false;
    }
    stack.emplace_back(na.contam, nb.contam);
    stack.emplace_back(na.pure, nb.pure);
  }
  return true;
}

namespace detail {

DPTables build_onp_tables(const ProbabilityVector& v) {
  const int n = v.size();
  const int stride = n + 2;
  DPTables tables;
  tables.n = n;
  tables.g.assign(static_cast<std::size_t>(n + 1), 0.0);
  tables.arg_g.assign(static_cast<std::size_t>(n), 0);
  tables.margin_g.assign(static_cast<std::size_t>(n),
                         std::numeric_limits<double>::infinity());
  tables.h.assign(static_cast<std::size_t>(stride * stride), 0.0);
  tables.arg_h.assign(static_cast<std::size_t>(stride * stride), 0);

  // Q(i,j) = q_i ... q_j, built row-wise by pure multiplication.
  std::vector<double> qprod(static_cast<std::size_t>(stride * stride), 1.0);
  auto Q = [&](int i, int j) -> double {
    return qprod[static_cast<std::size_t>(i * stride + j)];
  };
  for (int i = 1; i <= n; ++i) {
    double running = 1.0;
    for (int j = i; j <= n; ++j) {
      running *= v.q(j);
      qprod[static_cast<std::size_t>(i * stride + j)] = running;
    }
  }

  auto h_at = [&](int i, int j) -> double& {
    return tables.h[static_cast<std::size_t>(i * stride + j)];
  };
  auto arg_h_at = [&](int i, int j) -> int& {
    return tables.arg_h[static_cast<std::size_t>(i * stride + j)];
  };

  tables.g[static_cast<std::size_t>(n)] = 0.0;  // G(n+1)

  for (int i = n; i >= 1; --i) {
    // A contaminated singleton is defective without a test.
    h_at(i, i) = tables.g[static_cast<std::size_t>(i)];
    arg_h_at(i, i) = i;

    for (int j = i + 1; j <= n; ++j) {
      double best = std::numeric_limits<double>::infinity();
      int best_m = i;
      for (int m = i; m < j; ++m) {
        // Sub-test of the prefix i..m. Contaminated: segment shrinks to
        // i..m, the rest reverts to the binomial suffix -> H(i,m).
        // Pure: i..m classified, m+1..j contaminated -> H(m+1,j).
        const double contam_prob = (1.0 - Q(i, m)) / (1.0 - Q(i, j));
        const double h_contam = h_at(i, m);
        const double h_pure = h_at(m + 1, j);
        const double cost = 1.0 + h_pure + contam_prob * (h_contam - h_pure);
        if (cost < best) {
          best = cost;
          best_m = m;
        }
      }
      h_at(i, j) = best;
      arg_h_at(i, j) = best_m;
    }

    double best = std::numeric_limits<double>::infinity();
    double runner_up = std::numeric_limits<double>::infinity();
    int best_k = i;
    for (int k = i; k <= n; ++k) {
      const double g_pure = tables.g[static_cast<std::size_t>(k)];  // G(k+1)
      const double h_contam = h_at(i, k);
      const double cost = 1.0 + h_contam + Q(i, k) * (g_pure - h_contam);
      if (cost < best) {
        runner_up = best;
        best = cost;
        best_k = k;
      } else if (cost < runner_up) {
        runner_up = cost;
      }
    }
    tables.g[static_cast<std::size_t>(i - 1)] = best;
    tables.arg_g[static_cast<std::size_t>(i - 1)] = best_k;
    tables.margin_g[static_cast<std::size_t>(i - 1)] = runner_up - best;
  }
  return tables;
}

}  // namespace detail

OnpOptimum optimal_onp(const ProbabilityVector& v) {
  if (!v.sorted_nondecreasing()) {
    throw Error(ErrorKind::NotSorted, "optimal_onp requires non-decreasing probabilities");
  }
  DPTables tables = detail::build_onp_tables(v);
  const double cost = v.size() == 0 ? 0.0 : tables.G(1);
  return OnpOptimum{std::move(tables), cost};
}

namespace {

int realize_binomial(const DPTables& tables, int i, StrategyTree& out);

int realize_contaminated(const DPTables& tables, int i, int j, StrategyTree& out) {
  if (i == j) {
    // Defective by inference; continue with the binomial suffix.
    return realize_binomial(tables, i + 1, out);
  }
  const int m = tables.argmin_h(i, j);
  const int contam = realize_contaminated(tables, i, m, out);
  const int pure = realize_contaminated(tables, m + 1, j, out);
  return out.add_test(i, m, contam, pure);
}

int realize_binomial(const DPTables& tables, int i, StrategyTree& out) {
  if (i > tables.n) {
    return out.add_done();
  }
  const int k = tables.argmin_g(i);
  const int contam = realize_contaminated(tables, i, k, out);
  const int pure = realize_binomial(tables, k + 1, out);
  return out.add_test(i, k, contam, pure);
}

}  // namespace

StrategyTree extract_strategy(const DPTables& tables, const ProbabilityVector& v) {
  (void)v;
  StrategyTree tree;
  tree.set_root(realize_binomial(tables, 1, tree));
  return tree;
}

OptimalityReport is_gpta_optimal(const ProbabilityVector& v, double tol,
                                 double uniqueness_tol) {
  const OnpOptimum optimum = optimal_onp(v);
  const double gpta_cost = expected_tests_gpta(v);
  OptimalityReport report;
  report.dp_cost = optimum.cost;
  report.gpta_cost = gpta_cost;
  report.gap = gpta_cost - optimum.cost;
  report.min_margin = std::numeric_limits<double>::infinity();

  if (!(std::abs(report.gap) <= tol)) {
    report.verdict = Verdict::Suboptimal;
    return report;
  }
  bool unique = true;
  for (int i = 1; i <= v.size() - 1; ++i) {
    // Pair-first must be the strict argmin at every binomial state with at
    // least two remaining units; contaminated-pair states have one action.
    if (optimum.tables.argmin_g(i) != i + 1) {
      unique = false;
      report.min_margin = 0.0;
      continue;
    }
    report.min_margin = std::min(report.min_margin, optimum.tables.margin(i));
    if (!(optimum.tables.margin(i) > uniqueness_tol)) {
      unique = false;
    }
  }
  report.verdict = unique ? Verdict::OptimalAndUnique : Verdict::OptimalNotUnique;
  return report;
}

std::vector<FirstActionCost> first_action_costs(const ProbabilityVector& v) {
  const int n = v.size();
  if (n < 2) {
    throw Error(ErrorKind::TooSmall, "first_action_costs requires n >= 2");
  }
  const OnpOptimum optimum = optimal_onp(v);  // NotSorted surfaces here

  std::vector<FirstActionCost> costs;
  costs.reserve(static_cast<std::size_t>(n));
  double q_prefix = 1.0;
  for (int k = 1; k <= n; ++k) {
    q_prefix *= v.q(k);
    const double g_pure = optimum.tables.G(k + 1);
    const double h_contam = optimum.tables.H(1, k);
    costs.push_back(FirstActionCost{k, 1.0 + h_contam + q_prefix * (g_pure - h_contam)});
  }
  return costs;
}

}  // namespace grouptest
