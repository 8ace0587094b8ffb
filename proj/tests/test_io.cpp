#include <algorithm>
#include <sstream>
#include <string>

#include "doctest.h"

#include "grouptest/dp.hpp"
#include "grouptest/gpta.hpp"
#include "grouptest/io.hpp"
#include "grouptest/oat.hpp"
#include "grouptest/oracle.hpp"
#include "grouptest/rng.hpp"
#include "grouptest/sim.hpp"
#include "test_oracles.hpp"

using namespace grouptest;

TEST_SUITE_BEGIN("io");

TEST_CASE("test log serializes with the documented shape") {
  const ProbabilityVector v = validate_probabilities({0.3, 0.3});
  const GptaRun run = run_gpta(v, DefectPattern(std::vector<bool>{false, true}));
  const std::string expected =
      R"({"tests":[{"from":1,"to":2,"outcome":"contaminated"},)"
      R"({"from":1,"to":1,"outcome":"pure"}],"total":2})";
  CHECK(test_log_to_json(run.log).dump() == expected);
}

TEST_CASE("isolation tree JSON round-trips and marks the contaminated branch left") {
  const IsolationTree iso = isolation_tree(homogeneous(5, 0.3));
  const Json j = alphabetic_tree_to_json(iso.tree);
  CHECK(j.contains("test"));
  CHECK(j.contains("contaminated"));
  CHECK(j.contains("pure"));
  const AlphabeticTree back = alphabetic_tree_from_json(j);
  CHECK(back == iso.tree);
  CHECK(alphabetic_tree_to_json(back) == j);

  const Json leaf = alphabetic_tree_to_json(AlphabeticTree::single_leaf());
  CHECK(leaf.dump() == R"({"defective":1})");
}

TEST_CASE("isolation tree parser rejects malformed nodes") {
  CHECK_THROWS_AS(alphabetic_tree_from_json(Json{{"bogus", 1}}), Error);
  // Range contradicting the subtree.
  Json j{{"test", Json{{"from", 1}, {"to", 2}}},
         {"contaminated", Json{{"defective", 1}}},
         {"pure", Json{{"defective", 2}}}};
  CHECK_THROWS_AS(alphabetic_tree_from_json(j), Error);
}

TEST_CASE("strategy tree JSON round-trips") {
  const StrategyTree gpta3 = gpta_as_strategy_tree(3);
  const Json j = strategy_tree_to_json(gpta3);
  CHECK(strategy_tree_from_json(j) == gpta3);

  SplitMix64 stream(139);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(stream.next() % 10);
    const ProbabilityVector v = testing::random_sorted_vector(stream, n, 0.05, 0.95);
    const OnpOptimum opt = optimal_onp(v);
    const StrategyTree tree = extract_strategy(opt.tables, v);
    CHECK(strategy_tree_from_json(strategy_tree_to_json(tree)) == tree);
  }

  const Json done{{"done", true}};
  CHECK(strategy_tree_to_json(strategy_tree_from_json(done)) == done);
}

TEST_CASE("mc report round-trips through JSON and formats CSV rows") {
  const McReport report = simulate(SimPolicy::gpta(), homogeneous(5, 0.31), 5000, 11);
  CHECK(mc_report_from_json(mc_report_to_json(report)) == report);

  CHECK(mc_report_csv_header() == "policy,n,reps,seed,mean,stddev,stderr,exact,z");
  const std::string row = mc_report_csv_row(report);
  CHECK(row.substr(0, 5) == "gpta,");
  CHECK(std::count(row.begin(), row.end(), ',') == 8);

  McReport no_exact = report;
  no_exact.exact.reset();
  no_exact.z.reset();
  const std::string bare = mc_report_csv_row(no_exact);
  CHECK(bare.substr(bare.size() - 2) == ",,");
  CHECK(mc_report_from_json(mc_report_to_json(no_exact)) == no_exact);
}

TEST_CASE("format_number uses 12 significant digits") {
  CHECK(format_number(2.753) == "2.753");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(10.0) == "10");
  CHECK(format_number(0.29289321881345254) == "0.292893218813");
}

TEST_CASE("parsing newline-separated probabilities") {
  std::istringstream in("0.3\n0.31\n\n0.35\n");
  CHECK(parse_probability_lines(in) == std::vector<double>{0.3, 0.31, 0.35});

  std::istringstream bad("0.3\n0.5x\n");
  try {
    parse_probability_lines(bad);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK(e.index() == 2);
  }

  std::istringstream out_of_range("0.3\n0.4\n1.5\n");
  try {
    parse_probability_lines(out_of_range);
    FAIL("expected OutOfUnitInterval");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OutOfUnitInterval);
    CHECK(e.index() == 3);
  }

  std::istringstream empty("\n\n");
  CHECK_THROWS_AS(parse_probability_lines(empty), Error);
}

TEST_CASE("parsing the JSON input document") {
  CHECK(parse_probability_json(R"({"p": [0.3, 0.31, 0.35]})") ==
        std::vector<double>{0.3, 0.31, 0.35});

  CHECK_THROWS_AS(parse_probability_json("not json"), Error);
  CHECK_THROWS_AS(parse_probability_json(R"({"q": [0.3]})"), Error);
  try {
    parse_probability_json(R"({"p": [0.3, 2.0]})");
    FAIL("expected OutOfUnitInterval");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OutOfUnitInterval);
    CHECK(e.index() == 2);
  }
}

TEST_SUITE_END();
