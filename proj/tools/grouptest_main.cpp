// Command-line driver: expected | optimal | verify | simulate | oat | sweep | orders.
// Exit codes: 0 success, 1 verification/expectation failure, 2 usage or input error.

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "grouptest/dp.hpp"
#include "grouptest/gpta.hpp"
#include "grouptest/io.hpp"
#include "grouptest/model.hpp"
#include "grouptest/oat.hpp"
#include "grouptest/oracle.hpp"
#include "grouptest/rng.hpp"
#include "grouptest/sim.hpp"

namespace gt = grouptest;

namespace {

struct InputOpts {
  std::vector<double> p;
  std::string input_file;
  int n = 0;
  double p_const = -1.0;
  bool sort = false;
};

struct OutputOpts {
  std::string format;  // "json" or "csv"; commands pick their default
  std::string out_path;
};

void add_input_options(CLI::App* cmd, InputOpts& in) {
  cmd->add_option("--p", in.p, "comma-separated probabilities")->delimiter(',');
  cmd->add_option("--input", in.input_file,
                  "file with newline-separated probabilities or {\"p\": [...]}");
  cmd->add_option("--n", in.n, "unit count for the homogeneous shorthand");
  cmd->add_option("--p-const", in.p_const, "shared probability for --n units");
  cmd->add_flag("--sort", in.sort, "sort the input non-decreasing, reporting the permutation");
}

void add_output_options(CLI::App* cmd, OutputOpts& out) {
  cmd->add_option("--format", out.format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", out.out_path, "write the report to a file instead of stdout");
}

// Builds the probability vector from exactly one input source; fills the
// sorting permutation when --sort rearranged anything.
gt::ProbabilityVector resolve_input(const InputOpts& in, std::vector<int>* permutation) {
  const bool has_list = !in.p.empty();
  const bool has_file = !in.input_file.empty();
  const bool has_const = in.n > 0 || in.p_const >= 0.0;
  if (has_list + has_file + has_const != 1) {
    throw gt::Error(gt::ErrorKind::ParseError,
                    "exactly one of --p, --input, or --n/--p-const is required");
  }
  std::vector<double> raw;
  if (has_list) {
    raw = in.p;
  } else if (has_file) {
    raw = gt::load_probability_file(in.input_file);
  } else {
    if (in.n <= 0 || in.p_const < 0.0) {
      throw gt::Error(gt::ErrorKind::ParseError, "--n and --p-const must be given together");
    }
    raw.assign(static_cast<std::size_t>(in.n), in.p_const);
  }
  gt::ProbabilityVector v = gt::validate_probabilities(raw);
  if (in.sort) {
    gt::SortedVector sorted = gt::sort_nondecreasing(v);
    if (permutation != nullptr) {
      *permutation = sorted.permutation;
    }
    return sorted.vector;
  }
  return v;
}

void emit(const OutputOpts& out, const std::string& text) {
  if (out.out_path.empty()) {
    std::cout << text << '\n';
  } else {
    std::ofstream file(out.out_path);
    if (!file) {
      throw gt::Error(gt::ErrorKind::ParseError, "cannot write to " + out.out_path);
    }
    file << text << '\n';
  }
}

void require_json(const OutputOpts& out, const std::string& cmd) {
  if (!out.format.empty() && out.format != "json") {
    throw gt::Error(gt::ErrorKind::ParseError, cmd + " emits json only");
  }
}

gt::Json permutation_json(const std::vector<int>& perm) {
  gt::Json arr = gt::Json::array();
  for (int idx : perm) {
    arr.push_back(idx);
  }
  return arr;
}

// ---------------------------------------------------------------------------
// expected

int cmd_expected(const InputOpts& in, const OutputOpts& out, bool deltas) {
  require_json(out, "expected");
  std::vector<int> perm;
  const gt::ProbabilityVector v = resolve_input(in, &perm);
  if (!v.sorted_nondecreasing()) {
    throw gt::Error(gt::ErrorKind::NotSorted,
                    "input is not sorted non-decreasing; pass --sort to reorder");
  }
  gt::Json report{{"n", v.size()}, {"t", gt::expected_tests_gpta(v)}};
  if (deltas) {
    gt::Json d = gt::Json::array();
    for (double x : gt::delta_recursive(v)) {
      d.push_back(x);
    }
    report["deltas"] = std::move(d);
  }
  if (!perm.empty()) {
    report["permutation"] = permutation_json(perm);
  }
  emit(out, report.dump(2));
  return 0;
}

// ---------------------------------------------------------------------------
// optimal

int cmd_optimal(const InputOpts& in, const OutputOpts& out, double tol,
                const std::string& emit_tree, bool expect_optimal) {
  require_json(out, "optimal");
  std::vector<int> perm;
  const gt::ProbabilityVector v = resolve_input(in, &perm);
  const gt::OptimalityReport report = gt::is_gpta_optimal(v, tol);

  const char* verdict = report.verdict == gt::Verdict::OptimalAndUnique
                            ? "optimal_and_unique"
                            : report.verdict == gt::Verdict::OptimalNotUnique
                                  ? "optimal_not_unique"
                                  : "suboptimal";
  gt::Json j{{"n", v.size()},
             {"dp_cost", report.dp_cost},
             {"gpta_cost", report.gpta_cost},
             {"verdict", verdict},
             {"gap", report.gap}};
  if (!perm.empty()) {
    j["permutation"] = permutation_json(perm);
  }
  if (!emit_tree.empty()) {
    const gt::OnpOptimum optimum = gt::optimal_onp(v);
    std::ofstream file(emit_tree);
    if (!file) {
      throw gt::Error(gt::ErrorKind::ParseError, "cannot write to " + emit_tree);
    }
    file << gt::strategy_tree_to_json(gt::extract_strategy(optimum.tables, v)).dump(2)
         << '\n';
  }
  emit(out, j.dump(2));
  return expect_optimal && report.verdict == gt::Verdict::Suboptimal ? 1 : 0;
}

// ---------------------------------------------------------------------------
// verify

struct SweepBounds {
  int n_min;
  int n_max;
};

gt::ProbabilityVector random_sorted_vector(gt::SplitMix64& stream, int n, double lo,
                                           double hi) {
  std::vector<double> p(static_cast<std::size_t>(n));
  for (double& x : p) {
    do {
      x = lo + stream.next_double_open() * (hi - lo);
    } while (!(lo < x && x < hi));
  }
  std::sort(p.begin(), p.end());
  return gt::validate_probabilities(p);
}

struct CheckOutcome {
  std::int64_t failures = 0;
  std::int64_t first_bad_trial = -1;
  std::vector<double> counterexample;
};

template <typename TrialFn>
CheckOutcome run_trials(std::int64_t trials, int workers, const TrialFn& trial_fn) {
  CheckOutcome outcome;
  std::int64_t first_bad = std::numeric_limits<std::int64_t>::max();
  std::int64_t failures = 0;
  const int threads = workers > 0 ? workers : omp_get_max_threads();

#pragma omp parallel for schedule(static) num_threads(threads) \
    reduction(+ : failures) reduction(min : first_bad)
  for (std::int64_t t = 0; t < trials; ++t) {
    if (!trial_fn(t)) {
      ++failures;
      first_bad = std::min(first_bad, t);
    }
  }
  outcome.failures = failures;
  if (failures > 0) {
    outcome.first_bad_trial = first_bad;
  }
  return outcome;
}

int cmd_verify(const std::string& check, std::int64_t trials, SweepBounds bounds,
               std::uint64_t seed, double tol, int workers, const OutputOpts& out) {
  require_json(out, "verify");
  const double lo = gt::AdmissibleInterval::lower_endpoint();
  const double hi = gt::AdmissibleInterval::upper_endpoint();

  auto draw_n = [&](gt::SplitMix64& s, int n_min, int n_max) {
    return n_min + static_cast<int>(s.next() % static_cast<std::uint64_t>(n_max - n_min + 1));
  };
  auto vector_for_trial = [&](std::int64_t t, int n_min, int n_max, double a, double b) {
    gt::SplitMix64 s = gt::replicate_stream(seed, static_cast<std::uint64_t>(t));
    return random_sorted_vector(s, draw_n(s, n_min, n_max), a, b);
  };

  CheckOutcome outcome;
  if (check == "lemma1") {
    const int n_min = std::max(2, bounds.n_min);
    const int n_max = bounds.n_max > 0 ? bounds.n_max : 20;
    outcome = run_trials(trials, workers, [&](std::int64_t t) {
      const gt::ProbabilityVector v = vector_for_trial(t, n_min, n_max, lo, hi);
      if (!gt::check_delta_lt_one(v)) {
        return false;
      }
      const gt::DeltaVector d = gt::delta_recursive(v);
      for (int i = 1; i <= v.size(); ++i) {
        if (std::abs(gt::delta_closed_form(i, v) - d[static_cast<std::size_t>(i - 1)]) > tol) {
          return false;
        }
      }
      return true;
    });
  } else if (check == "theorem2") {
    const int n_min = std::max(2, bounds.n_min);
    const int n_max = bounds.n_max > 0 ? std::min(bounds.n_max, 12) : 10;
    outcome = run_trials(trials, workers, [&](std::int64_t t) {
      const gt::ProbabilityVector v = vector_for_trial(t, n_min, n_max, lo, hi);
      return gt::is_gpta_optimal(v, tol).verdict == gt::Verdict::OptimalAndUnique;
    });
  } else if (check == "lemma3") {
    const int n_min = std::max(3, bounds.n_min);
    const int n_max = bounds.n_max > 0 ? bounds.n_max : 12;
    outcome = run_trials(trials, workers, [&](std::int64_t t) {
      const gt::ProbabilityVector v = vector_for_trial(t, n_min, n_max, lo, hi);
      return gt::check_lemma3_structure(gt::isolation_tree(v).tree) &&
             gt::lemma3_bound(v) < 1.0;
    });
  } else if (check == "hutucker") {
    const int n_min = std::max(1, bounds.n_min);
    const int n_max = bounds.n_max > 0 ? bounds.n_max : 12;
    outcome = run_trials(trials, workers, [&](std::int64_t t) {
      gt::SplitMix64 s = gt::replicate_stream(seed, static_cast<std::uint64_t>(t));
      const int n = draw_n(s, n_min, n_max);
      std::vector<double> w(static_cast<std::size_t>(n));
      for (double& x : w) {
        x = 0.01 + s.next_double();
      }
      const gt::WeightVector wv(w);
      return std::abs(gt::tree_cost(gt::hu_tucker(wv), wv) - gt::gilbert_moore_cost(wv)) <=
             tol;
    });
  } else if (check == "dp-oracle") {
    const int n_min = std::max(1, bounds.n_min);
    const int n_max = bounds.n_max > 0 ? std::min(bounds.n_max, 5) : 5;
    outcome = run_trials(trials, workers, [&](std::int64_t t) {
      const gt::ProbabilityVector v = vector_for_trial(t, n_min, n_max, 0.0, 1.0);
      const double g1 = gt::optimal_onp(v).cost;
      double best = std::numeric_limits<double>::infinity();
      gt::StrategySpace(v.size()).for_each([&](const gt::StrategyTree& tree) {
        best = std::min(best, gt::exact_strategy_cost(tree, v));
      });
      return std::abs(best - g1) <= tol;
    });
  } else {
    throw gt::Error(gt::ErrorKind::UnknownCheck, "unknown check: " + check);
  }

  gt::Json j{{"check", check},
             {"trials", trials},
             {"failures", outcome.failures},
             {"seed", seed},
             {"tol", tol}};
  if (outcome.failures > 0) {
    const std::int64_t t = outcome.first_bad_trial;
    j["first_failure_trial"] = t;
    // Reproduce the failing input for the report.
    if (check != "hutucker") {
      gt::SplitMix64 s = gt::replicate_stream(seed, static_cast<std::uint64_t>(t));
      int n_min = check == "lemma3" ? 3 : check == "dp-oracle" ? 1 : 2;
      int n_max = bounds.n_max > 0 ? bounds.n_max
                  : check == "lemma1"    ? 20
                  : check == "dp-oracle" ? 5
                  : check == "lemma3"    ? 12
                                         : 10;
      n_min = std::max(n_min, bounds.n_min);
      if (check == "dp-oracle") {
        n_max = std::min(n_max, 5);
      }
      const double a = check == "dp-oracle" ? 0.0 : lo;
      const double b = check == "dp-oracle" ? 1.0 : hi;
      j["counterexample"] = random_sorted_vector(s, draw_n(s, n_min, n_max), a, b).values();
    }
  }
  emit(out, j.dump(2));
  return outcome.failures > 0 ? 1 : 0;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const InputOpts& in, const OutputOpts& out, const std::string& policy_name,
                 const std::string& tree_path, std::uint64_t reps, std::uint64_t seed,
                 int workers) {
  std::vector<int> perm;
  const gt::ProbabilityVector v = resolve_input(in, &perm);

  gt::SimPolicy policy;
  if (policy_name == "gpta") {
    policy = gt::SimPolicy::gpta();
  } else if (policy_name == "individual") {
    policy = gt::SimPolicy::individual();
  } else if (policy_name == "dorfman") {
    policy = gt::SimPolicy::dorfman(
        gt::hwang_optimal_partition(v, gt::PolicyKind::Dorfman).partition);
  } else if (policy_name == "mdorfman") {
    policy = gt::SimPolicy::modified_dorfman(
        gt::hwang_optimal_partition(v, gt::PolicyKind::ModifiedDorfman).partition);
  } else if (policy_name == "tree") {
    if (tree_path.empty()) {
      throw gt::Error(gt::ErrorKind::ParseError, "--tree FILE is required for policy tree");
    }
    std::ifstream file(tree_path);
    if (!file) {
      throw gt::Error(gt::ErrorKind::ParseError, "cannot open " + tree_path);
    }
    gt::Json j;
    try {
      file >> j;
    } catch (const nlohmann::json::exception& e) {
      throw gt::Error(gt::ErrorKind::ParseError, std::string("invalid tree JSON: ") + e.what());
    }
    policy = gt::SimPolicy::strategy(gt::strategy_tree_from_json(j));
  } else {
    throw gt::Error(gt::ErrorKind::UnknownPolicy, "unknown policy: " + policy_name);
  }

  const gt::McReport report = gt::simulate(policy, v, reps, seed, workers);
  if (out.format == "csv") {
    emit(out, gt::mc_report_csv_header() + "\n" + gt::mc_report_csv_row(report));
  } else {
    emit(out, gt::mc_report_to_json(report).dump(2));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// oat

int cmd_oat(const InputOpts& in, const OutputOpts& out) {
  require_json(out, "oat");
  std::vector<int> perm;
  const gt::ProbabilityVector v = resolve_input(in, &perm);
  const gt::WeightVector w = gt::lemma2_weights(v);
  const gt::IsolationTree iso = gt::isolation_tree(v);

  gt::Json weights = gt::Json::array();
  for (double x : w.w) {
    weights.push_back(x);
  }
  gt::Json j{{"n", v.size()},
             {"weights", std::move(weights)},
             {"cost", iso.cost},
             {"tree", gt::alphabetic_tree_to_json(iso.tree)}};
  emit(out, j.dump(2));
  return 0;
}

// ---------------------------------------------------------------------------
// sweep

int cmd_sweep(int n, const std::string& grid, const OutputOpts& out, int workers) {
  if (!out.format.empty() && out.format != "csv") {
    throw gt::Error(gt::ErrorKind::ParseError, "sweep emits csv only");
  }
  const auto first = grid.find(':');
  const auto second = grid.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos) {
    throw gt::Error(gt::ErrorKind::ParseError, "--p-grid expects lo:hi:step");
  }
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;
  try {
    lo = std::stod(grid.substr(0, first));
    hi = std::stod(grid.substr(first + 1, second - first - 1));
    step = std::stod(grid.substr(second + 1));
  } catch (const std::exception&) {
    throw gt::Error(gt::ErrorKind::ParseError, "--p-grid expects lo:hi:step");
  }
  if (!(step > 0.0) || hi < lo) {
    throw gt::Error(gt::ErrorKind::ParseError, "--p-grid needs lo <= hi and step > 0");
  }
  if (n < 1) {
    throw gt::Error(gt::ErrorKind::ParseError, "sweep requires --n >= 1");
  }

  std::vector<double> points;
  for (int k = 0;; ++k) {
    const double p = lo + k * step;
    if (p > hi + step * 1e-9) {
      break;
    }
    points.push_back(p);
  }

  std::vector<std::string> rows(points.size());
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(points.size()); ++idx) {
    const double p = points[static_cast<std::size_t>(idx)];
    const gt::ProbabilityVector v = gt::homogeneous(n, p);
    const double gpta_t = gt::expected_tests_gpta(v);
    const double dp_t = gt::optimal_onp(v).cost;
    const double dorf = gt::hwang_optimal_partition(v, gt::PolicyKind::Dorfman).cost;
    const double mdorf =
        gt::hwang_optimal_partition(v, gt::PolicyKind::ModifiedDorfman).cost;
    rows[static_cast<std::size_t>(idx)] =
        gt::format_number(p) + ',' + gt::format_number(gpta_t) + ',' +
        gt::format_number(dp_t) + ',' + gt::format_number(n) + ',' +
        gt::format_number(dorf) + ',' + gt::format_number(mdorf);
  }

  std::string csv = "p,gpta_t,dp_t,individual,dorfman,mdorfman";
  for (const std::string& row : rows) {
    csv += '\n' + row;
  }
  emit(out, csv);
  return 0;
}

// ---------------------------------------------------------------------------
// orders

int cmd_orders(const InputOpts& in, const OutputOpts& out, const std::string& policy_name) {
  require_json(out, "orders");
  std::vector<int> perm;
  const gt::ProbabilityVector v = resolve_input(in, &perm);

  gt::OrderingPolicy policy;
  if (policy_name == "gpta") {
    policy = gt::OrderingPolicy::Gpta;
  } else if (policy_name == "dp_optimal") {
    policy = gt::OrderingPolicy::DpOptimal;
  } else {
    throw gt::Error(gt::ErrorKind::UnknownPolicy, "unknown ordering policy: " + policy_name);
  }
  const gt::BestOrdering best = gt::best_ordering_bruteforce(v, policy);
  gt::Json j{{"n", v.size()},
             {"policy", policy_name},
             {"permutation", permutation_json(best.permutation)},
             {"cost", best.cost}};
  emit(out, j.dump(2));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"design, cost and verify adaptive group-testing strategies"};
  app.require_subcommand(1);

  InputOpts in;
  OutputOpts out;
  std::uint64_t seed = 12345;
  std::uint64_t reps = 100000;
  double tol = 1e-9;
  int workers = 0;

  auto* expected = app.add_subcommand("expected", "exact expected test count of the pairwise procedure");
  bool deltas = false;
  add_input_options(expected, in);
  add_output_options(expected, out);
  expected->add_flag("--deltas", deltas, "include the marginal-cost vector");

  auto* optimal = app.add_subcommand("optimal", "compare the pairwise procedure to the exact ONP optimum");
  std::string emit_tree;
  bool expect_optimal = false;
  add_input_options(optimal, in);
  add_output_options(optimal, out);
  optimal->add_option("--tol", tol, "optimality tolerance");
  optimal->add_option("--emit-tree", emit_tree, "write the optimal strategy tree JSON here");
  optimal->add_flag("--expect-optimal", expect_optimal, "exit 1 unless the verdict is optimal");

  auto* verify = app.add_subcommand("verify", "randomized property sweeps");
  std::string check;
  std::int64_t trials = 1000;
  SweepBounds bounds{0, 0};
  verify->add_option("--check", check, "lemma1|theorem2|lemma3|hutucker|dp-oracle")
      ->required();
  verify->add_option("--trials", trials, "number of random trials");
  verify->add_option("--n-min", bounds.n_min, "smallest n to draw");
  verify->add_option("--n-max", bounds.n_max, "largest n to draw");
  verify->add_option("--seed", seed, "master seed");
  verify->add_option("--tol", tol, "comparison tolerance");
  verify->add_option("--workers", workers, "worker threads (0 = machine parallelism)");
  add_output_options(verify, out);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo cost estimate for a policy");
  std::string policy_name = "gpta";
  std::string tree_path;
  add_input_options(simulate, in);
  add_output_options(simulate, out);
  simulate->add_option("--policy", policy_name, "gpta|individual|dorfman|mdorfman|tree");
  simulate->add_option("--tree", tree_path, "strategy tree JSON for policy tree");
  simulate->add_option("--reps", reps, "replications");
  simulate->add_option("--seed", seed, "master seed");
  simulate->add_option("--workers", workers, "worker threads (0 = machine parallelism)");

  auto* oat = app.add_subcommand("oat", "isolation weights and optimal alphabetic testing tree");
  add_input_options(oat, in);
  add_output_options(oat, out);

  auto* sweep = app.add_subcommand("sweep", "policy cost columns over a homogeneous p grid");
  int sweep_n = 0;
  std::string grid;
  sweep->add_option("--n", sweep_n, "unit count")->required();
  sweep->add_option("--p-grid", grid, "lo:hi:step")->required();
  sweep->add_option("--workers", workers, "worker threads (0 = machine parallelism)");
  add_output_options(sweep, out);

  auto* orders = app.add_subcommand("orders", "brute-force best input ordering (n <= 8)");
  std::string ordering_policy = "gpta";
  add_input_options(orders, in);
  add_output_options(orders, out);
  orders->add_option("--policy", ordering_policy, "gpta|dp_optimal");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help
    }
    app.exit(e);
    return 2;
  }

  try {
    if (expected->parsed()) {
      return cmd_expected(in, out, deltas);
    }
    if (optimal->parsed()) {
      return cmd_optimal(in, out, tol, emit_tree, expect_optimal);
    }
    if (verify->parsed()) {
      return cmd_verify(check, trials, bounds, seed, tol, workers, out);
    }
    if (simulate->parsed()) {
      return cmd_simulate(in, out, policy_name, tree_path, reps, seed, workers);
    }
    if (oat->parsed()) {
      return cmd_oat(in, out);
    }
    if (sweep->parsed()) {
      return cmd_sweep(sweep_n, grid, out, workers);
    }
    if (orders->parsed()) {
      return cmd_orders(in, out, ordering_policy);
    }
  } catch (const gt::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
