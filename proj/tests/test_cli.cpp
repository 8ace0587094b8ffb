// Drives the built CLI binary end to end: output schemas, exit codes,
// determinism across reruns and worker counts.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#ifndef GROUPTEST_CLI_PATH
#error "GROUPTEST_CLI_PATH must point at the grouptest binary"
#endif

namespace {

using Json = nlohmann::ordered_json;

struct CliResult {
  int exit_code;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const std::string command = std::string(GROUPTEST_CLI_PATH) + " " + args + " 2>/dev/null";
  std::array<char, 4096> buffer{};
  std::string out;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::size_t got = 0;
  while ((got = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
    out.append(buffer.data(), got);
  }
  const int status = pclose(pipe);
  return CliResult{WEXITSTATUS(status), out};
}

Json parse(const CliResult& result) {
  return Json::parse(result.out);
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("expected on inline probabilities") {
  const CliResult r = run_cli("expected --p 0.3,0.3,0.3 --deltas");
  REQUIRE(r.exit_code == 0);
  const Json j = parse(r);
  CHECK(j.at("n") == 3);
  CHECK(j.at("t").get<double>() == doctest::Approx(2.753).epsilon(1e-12));
  REQUIRE(j.at("deltas").size() == 3);
  CHECK(j.at("deltas")[2].get<double>() == 1.0);
}

TEST_CASE("expected via the homogeneous shorthand hits the boundary tie") {
  const CliResult r = run_cli("expected --n 5 --p-const 0.38196601125010515");
  REQUIRE(r.exit_code == 0);
  CHECK(parse(r).at("t").get<double>() == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("expected on a single unit") {
  const CliResult r = run_cli("expected --p 0.3");
  REQUIRE(r.exit_code == 0);
  CHECK(parse(r).at("t").get<double>() == 1.0);
}

TEST_CASE("expected rejects unsorted input without --sort") {
  CHECK(run_cli("expected --p 0.35,0.30").exit_code == 2);
  const CliResult sorted = run_cli("expected --p 0.35,0.30 --sort");
  REQUIRE(sorted.exit_code == 0);
  const Json j = parse(sorted);
  CHECK(j.at("permutation") == Json::array({2, 1}));
}

TEST_CASE("optimal verdicts and exit codes") {
  const CliResult good = run_cli("optimal --p 0.30,0.31,0.35");
  REQUIRE(good.exit_code == 0);
  CHECK(parse(good).at("verdict") == "optimal_and_unique");

  const CliResult sub = run_cli("optimal --p 0.45,0.45");
  REQUIRE(sub.exit_code == 0);
  const Json j = parse(sub);
  CHECK(j.at("verdict") == "suboptimal");
  CHECK(j.at("gap").get<double>() == doctest::Approx(0.1475).epsilon(1e-10));

  CHECK(run_cli("optimal --p 0.35,0.30").exit_code == 2);
  CHECK(run_cli("optimal --p 0.45,0.45 --expect-optimal").exit_code == 1);
}

TEST_CASE("optimal emits a parseable strategy tree") {
  const std::string path = "/tmp/grouptest_cli_tree.json";
  const CliResult r = run_cli("optimal --p 0.30,0.31,0.35 --emit-tree " + path);
  REQUIRE(r.exit_code == 0);
  std::ifstream file(path);
  REQUIRE(file.good());
  Json tree;
  file >> tree;
  CHECK(tree.contains("test"));
  CHECK(tree.at("test").at("from") == 1);
  CHECK(tree.at("test").at("to") == 2);
  std::remove(path.c_str());
}

TEST_CASE("verify sweeps pass and unknown checks fail with usage errors") {
  for (const std::string check : {"lemma1", "theorem2", "lemma3", "hutucker", "dp-oracle"}) {
    const CliResult r =
        run_cli("verify --check " + check + " --trials 100 --seed 5 --workers 2");
    REQUIRE(r.exit_code == 0);
    const Json j = parse(r);
    CHECK(j.at("failures") == 0);
    CHECK(j.at("trials") == 100);
  }
  CHECK(run_cli("verify --check bogus --trials 10").exit_code == 2);
}

TEST_CASE("simulate is reproducible and respects format flags") {
  const std::string args = "simulate --policy gpta --p 0.3,0.3,0.3 --reps 20000 --seed 7";
  const CliResult a = run_cli(args);
  const CliResult b = run_cli(args + " --workers 3");
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);

  const Json j = parse(a);
  CHECK(j.at("policy") == "gpta");
  CHECK(j.at("exact").get<double>() == doctest::Approx(2.753).epsilon(1e-12));
  CHECK(std::abs(j.at("mean").get<double>() - 2.753) <=
        4.0 * j.at("stderr").get<double>());

  const CliResult csv = run_cli(args + " --format csv");
  REQUIRE(csv.exit_code == 0);
  CHECK(csv.out.substr(0, 45) == "policy,n,reps,seed,mean,stddev,stderr,exact,z\n");
}

TEST_CASE("oat prints the isolation weights and tree") {
  const CliResult r = run_cli("oat --p 0.3,0.3,0.3");
  REQUIRE(r.exit_code == 0);
  const Json j = parse(r);
  CHECK(j.at("weights")[0].get<double>() == doctest::Approx(0.456621).epsilon(1e-6));
  CHECK(j.at("weights")[1].get<double>() == doctest::Approx(0.319635).epsilon(1e-6));
  CHECK(j.at("weights")[2].get<double>() == doctest::Approx(0.223744).epsilon(1e-6));
  CHECK(j.at("tree").contains("test"));
}

TEST_CASE("sweep emits the documented CSV columns") {
  const CliResult r = run_cli("sweep --n 10 --p-grid 0.29:0.39:0.005 --workers 2");
  REQUIRE(r.exit_code == 0);
  std::istringstream lines(r.out);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "p,gpta_t,dp_t,individual,dorfman,mdorfman");

  double at_038 = 0.0;
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    std::istringstream cells(line);
    std::string p_text;
    std::string gpta_text;
    std::getline(cells, p_text, ',');
    std::getline(cells, gpta_text, ',');
    if (p_text.substr(0, 4) == "0.38" && p_text.size() == 4) {
      at_038 = std::stod(gpta_text);
    }
  }
  CHECK(rows == 21);
  CHECK(at_038 > 0.0);
  CHECK(at_038 < 10.0);

  // Right at the upper endpoint the pairwise cost meets individual testing.
  const CliResult near = run_cli("sweep --n 10 --p-grid 0.382:0.382:0.001");
  REQUIRE(near.exit_code == 0);
  std::istringstream near_lines(near.out);
  std::string skip;
  std::getline(near_lines, skip);
  std::string row;
  std::getline(near_lines, row);
  const double gpta_at_endpoint = std::stod(row.substr(row.find(',') + 1));
  CHECK(gpta_at_endpoint == doctest::Approx(10.0).epsilon(2e-3));
}

TEST_CASE("orders reports the argmin ordering") {
  const CliResult r = run_cli("orders --p 0.3,0.35 --policy gpta");
  REQUIRE(r.exit_code == 0);
  const Json j = parse(r);
  CHECK(j.at("permutation") == Json::array({1, 2}));
  CHECK(j.at("cost").get<double>() == doctest::Approx(1.845).epsilon(1e-12));

  CHECK(run_cli("orders --p 0.3,0.35 --policy bogus").exit_code == 2);
}

TEST_CASE("input files in both formats") {
  {
    std::ofstream f("/tmp/grouptest_cli_p.txt");
    f << "0.30\n0.31\n0.35\n";
  }
  const CliResult text = run_cli("expected --input /tmp/grouptest_cli_p.txt");
  REQUIRE(text.exit_code == 0);
  CHECK(parse(text).at("n") == 3);

  {
    std::ofstream f("/tmp/grouptest_cli_p.json");
    f << R"({"p": [0.30, 0.31, 0.35]})";
  }
  const CliResult json = run_cli("expected --input /tmp/grouptest_cli_p.json");
  REQUIRE(json.exit_code == 0);
  CHECK(parse(json).at("t") == parse(text).at("t"));

  CHECK(run_cli("expected --input /tmp/no_such_file_here.txt").exit_code == 2);
  std::remove("/tmp/grouptest_cli_p.txt");
  std::remove("/tmp/grouptest_cli_p.json");
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("expected").exit_code == 2);                       // no input source
  CHECK(run_cli("expected --p 0.3 --n 2 --p-const 0.3").exit_code == 2);
  CHECK(run_cli("bogus-subcommand").exit_code == 2);
  CHECK(run_cli("expected --p 0.3 --format csv").exit_code == 2);  // json-only command
  CHECK(run_cli("sweep --n 4 --p-grid nonsense").exit_code == 2);
}

TEST_SUITE_END();
