#include "grouptest/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace grouptest {

Json test_log_to_json(const TestLog& log) {
  Json tests = Json::array();
  for (const TestRecord& r : log.tests) {
    tests.push_back(Json{
        {"from", r.from},
        {"to", r.to},
        {"outcome", r.outcome == TestOutcome::Pure ? "pure" : "contaminated"},
    });
  }
  return Json{{"tests", std::move(tests)}, {"total", log.total()}};
}

namespace {

Json alphabetic_node_to_json(const AlphabeticTree& t, int idx) {
  const auto& node = t.node(idx);
  if (node.leaf()) {
    return Json{{"defective", node.label}};
  }
  const auto [from, to] = t.test_range(idx);
  return Json{
      {"test", Json{{"from", from}, {"to", to}}},
      {"contaminated", alphabetic_node_to_json(t, node.left)},
      {"pure", alphabetic_node_to_json(t, node.right)},
  };
}

int alphabetic_node_from_json(const Json& j, AlphabeticTree& t) {
  if (j.contains("defective")) {
    return t.add_leaf(j.at("defective").get<int>());
  }
  if (!j.contains("test") || !j.contains("contaminated") || !j.contains("pure")) {
    throw Error(ErrorKind::ParseError, "isolation tree node needs test/contaminated/pure");
  }
  const int left = alphabetic_node_from_json(j.at("contaminated"), t);
  const int right = alphabetic_node_from_json(j.at("pure"), t);
  const int idx = t.add_internal(left, right);
  const auto [from, to] = t.test_range(idx);
  if (from != j.at("test").at("from").get<int>() || to != j.at("test").at("to").get<int>()) {
    throw Error(ErrorKind::ParseError, "isolation tree test range does not match subtree");
  }
  return idx;
}

}  // namespace

Json alphabetic_tree_to_json(const AlphabeticTree& t) {
  return alphabetic_node_to_json(t, t.root());
}

AlphabeticTree alphabetic_tree_from_json(const Json& j) {
  AlphabeticTree t;
  t.set_root(alphabetic_node_from_json(j, t));
  const std::vector<int> labels = t.in_order_leaf_labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != static_cast<int>(i) + 1) {
      throw Error(ErrorKind::ParseError, "isolation tree leaves are not 1..n in order");
    }
  }
  return t;
}

namespace {

Json strategy_node_to_json(const StrategyTree& t, int idx) {
  const auto& node = t.node(idx);
  if (node.done()) {
    return Json{{"done", true}};
  }
  return Json{
      {"test", Json{{"from", node.from}, {"to", node.to}}},
      {"pure", strategy_node_to_json(t, node.pure)},
      {"contam", strategy_node_to_json(t, node.contam)},
  };
}

int strategy_node_from_json(const Json& j, StrategyTree& t) {
  if (j.contains("done")) {
    return t.add_done();
  }
  if (!j.contains("test") || !j.contains("pure") || !j.contains("contam")) {
    throw Error(ErrorKind::ParseError, "strategy node needs test/pure/contam");
  }
  const int pure = strategy_node_from_json(j.at("pure"), t);
  const int contam = strategy_node_from_json(j.at("contam"), t);
  return t.add_test(j.at("test").at("from").get<int>(), j.at("test").at("to").get<int>(),
                    contam, pure);
}

}  // namespace

Json strategy_tree_to_json(const StrategyTree& t) {
  return strategy_node_to_json(t, t.root());
}

StrategyTree strategy_tree_from_json(const Json& j) {
  StrategyTree t;
  t.set_root(strategy_node_from_json(j, t));
  return t;
}

Json mc_report_to_json(const McReport& r) {
  Json j{
      {"policy", r.policy}, {"n", r.n},           {"reps", r.reps},
      {"seed", r.seed},     {"mean", r.mean},     {"stddev", r.stddev},
      {"stderr", r.std_error},
  };
  if (r.exact) {
    j["exact"] = *r.exact;
  }
  if (r.z) {
    j["z"] = *r.z;
  }
  return j;
}

McReport mc_report_from_json(const Json& j) {
  McReport r;
  r.policy = j.at("policy").get<std::string>();
  r.n = j.at("n").get<int>();
  r.reps = j.at("reps").get<std::uint64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.mean = j.at("mean").get<double>();
  r.stddev = j.at("stddev").get<double>();
  r.std_error = j.at("stderr").get<double>();
  if (j.contains("exact")) {
    r.exact = j.at("exact").get<double>();
  }
  if (j.contains("z")) {
    r.z = j.at("z").get<double>();
  }
  return r;
}

std::string mc_report_csv_header() {
  return "policy,n,reps,seed,mean,stddev,stderr,exact,z";
}

std::string mc_report_csv_row(const McReport& r) {
  std::string row = r.policy;
  row += ',' + std::to_string(r.n);
  row += ',' + std::to_string(r.reps);
  row += ',' + std::to_string(r.seed);
  row += ',' + format_number(r.mean);
  row += ',' + format_number(r.stddev);
  row += ',' + format_number(r.std_error);
  row += ',';
  if (r.exact) {
    row += format_number(*r.exact);
  }
  row += ',';
  if (r.z) {
    row += format_number(*r.z);
  }
  return row;
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

namespace {

double parse_double_token(const std::string& token, std::int64_t where, ErrorKind kind) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw Error(kind, "cannot parse '" + token + "' as a probability at position " +
                          std::to_string(where),
                where);
  }
  return value;
}

std::string trimmed(const std::string& line) {
  std::size_t first = 0;
  std::size_t last = line.size();
  while (first < last && std::isspace(static_cast<unsigned char>(line[first]))) {
    ++first;
  }
  while (last > first && std::isspace(static_cast<unsigned char>(line[last - 1]))) {
    --last;
  }
  return line.substr(first, last - first);
}

void check_value(double x, std::int64_t where) {
  if (!std::isfinite(x)) {
    throw Error(ErrorKind::NotFinite,
                "value at position " + std::to_string(where) + " is not finite", where);
  }
  if (!(x > 0.0 && x < 1.0)) {
    throw Error(ErrorKind::OutOfUnitInterval,
                "value at position " + std::to_string(where) + " is outside (0,1)", where);
  }
}

}  // namespace

std::vector<double> parse_probability_lines(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string token = trimmed(line);
    if (token.empty()) {
      continue;
    }
    const double x = parse_double_token(token, line_no, ErrorKind::ParseError);
    check_value(x, line_no);
    values.push_back(x);
  }
  if (values.empty()) {
    throw Error(ErrorKind::EmptyInput, "no probabilities in input");
  }
  return values;
}

std::vector<double> parse_probability_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("p") || !j.at("p").is_array()) {
    throw Error(ErrorKind::ParseError, R"(expected {"p": [ ... ]})");
  }
  const Json& arr = j.at("p");
  std::vector<double> values;
  values.reserve(arr.size());
  std::int64_t index = 0;
  for (const Json& item : arr) {
    ++index;
    if (!item.is_number()) {
      throw Error(ErrorKind::ParseError,
                  "element " + std::to_string(index) + " of \"p\" is not a number", index);
    }
    const double x = item.get<double>();
    check_value(x, index);
    values.push_back(x);
  }
  if (values.empty()) {
    throw Error(ErrorKind::EmptyInput, "\"p\" array is empty");
  }
  return values;
}

std::vector<double> load_probability_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) {
    throw Error(ErrorKind::ParseError, "cannot open input file: " + path);
  }
  std::stringstream buffer;
  buffer << file.rdbuf();
  const std::string content = buffer.str();
  for (char c : content) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      continue;
    }
    if (c == '{') {
      return parse_probability_json(content);
    }
    break;
  }
  std::istringstream lines(content);
  return parse_probability_lines(lines);
}

}  // namespace grouptest
