#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "grouptest/dp.hpp"
#include "grouptest/gpta.hpp"
#include "grouptest/oat.hpp"
#include "grouptest/sim.hpp"

namespace grouptest {

using Json = nlohmann::ordered_json;

// {"tests":[{"from":i,"to":k,"outcome":"pure"|"contaminated"},...],"total":T}
Json test_log_to_json(const TestLog& log);

// Isolation trees: internal {"test":{"from":i,"to":k},"contaminated":c,"pure":p},
// leaf {"defective":i}; the contaminated branch is the left subtree.
Json alphabetic_tree_to_json(const AlphabeticTree& t);
AlphabeticTree alphabetic_tree_from_json(const Json& j);

// Strategy trees: internal {"test":{"from":i,"to":k},"pure":p,"contam":c},
// leaf {"done":true}.
Json strategy_tree_to_json(const StrategyTree& t);
StrategyTree strategy_tree_from_json(const Json& j);

Json mc_report_to_json(const McReport& r);
McReport mc_report_from_json(const Json& j);

// CSV with fields in declaration order; empty cells for absent optionals.
std::string mc_report_csv_header();
std::string mc_report_csv_row(const McReport& r);

// 12 significant digits, '.' decimal separator, locale-independent.
std::string format_number(double x);

// Newline-separated decimal probabilities; blank lines are skipped.
// Errors carry the offending 1-based line number.
std::vector<double> parse_probability_lines(std::istream& in);

// {"p": [0.3, 0.31, ...]}; errors carry the 1-based element index.
std::vector<double> parse_probability_json(const std::string& text);

// Sniffs JSON (first non-space byte '{') vs plain text.
std::vector<double> load_probability_file(const std::string& path);

}  // namespace grouptest
