#include "doctest.h"

#include "q3/cli.hpp"
#include "q3/errors.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace q3;
using nlohmann::json;

namespace {

std::string data(const std::string& name) { return std::string(Q3_TEST_DATA) + "/" + name; }

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "quartic3");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "q3_cli_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

const char* ex_text = R"({"base": "Q3", "curve": {"normal": {"A2": [], "A1": ["0", "0", "3", "2"],
                          "A0": ["-1", "0", "-2", "0", "-3"]}}})";

}  // namespace

TEST_CASE("rationals") {
    CHECK(cli::parse_rational("7", "a") == 7);
    CHECK(cli::parse_rational("-2/4", "a") == mpq_class(-1, 2));
    CHECK(cli::parse_rational("+3", "a") == 3);
    CHECK_THROWS_AS(cli::parse_rational("1.5", "a"), ParseError);
    CHECK_THROWS_AS(cli::parse_rational("1/0", "a"), ParseError);
    CHECK_THROWS_AS(cli::parse_rational("", "a"), ParseError);
    CHECK_THROWS_AS(cli::parse_rational("2/x", "a"), ParseError);
}

TEST_CASE("input documents") {
    auto in = cli::parse_input_text(ex_text);
    CHECK(in.K->is_rational());
    CHECK_FALSE(in.normal_form);
    CHECK(in.curve.A0.size() == 5);

    // the echo parses back to itself
    auto again = cli::parse_input_json(in.echo);
    CHECK(again.echo == in.echo);
    auto perm = cli::parse_input(data("genus1_tail_permuted.json"));
    CHECK(perm.echo == in.echo);

    auto xns = cli::parse_input(data("xns27_ternary.json"));
    CHECK(xns.normal_form);
    CHECK(cli::parse_input_json(xns.echo).echo == xns.echo);

    CHECK_THROWS_AS(cli::parse_input_text("{"), ParseError);
    CHECK_THROWS_AS(cli::parse_input_text(R"({"base": "Q3"})"), ParseError);
    CHECK_THROWS_AS(cli::parse_input_text(R"({"base": "Q3", "curve": {"normal": {"A2": [1.5], "A1": [], "A0": ["1"]}}})"),
                    ParseError);
    CHECK_THROWS_AS(cli::parse_input_text(R"({"base": "Q2", "curve": {"normal": {"A2": [], "A1": [], "A0": ["1"]}}})"),
                    InputError);
    // x^2 - 1 splits over Q_3
    CHECK_THROWS_AS(cli::parse_input_text(
                        R"({"base": {"minpoly": ["-1", "0", "1"]}, "curve": {"normal": {"A2": [], "A1": [], "A0": ["1"]}}})"),
                    InvalidBase);
    CHECK_THROWS_AS(cli::parse_input("/nonexistent/q3.json"), IoError);
}

TEST_CASE("integer JSON literals are accepted as rationals") {
    auto a = cli::parse_input_text(R"({"base": "Q3", "curve": {"normal": {"A2": [], "A1": [0, 0, 3, 2],
                                      "A0": [-1, 0, -2, 0, -3]}}})");
    CHECK(a.echo == cli::parse_input_text(ex_text).echo);
}

TEST_CASE("exit codes and outputs") {
    auto js = scratch("ex.json"), dot = scratch("ex.dot"), txt = scratch("ex.txt");
    CHECK(run_cli({"reduce", "--input", data("genus1_tail.json"), "--json", js.string(), "--dot", dot.string(), "--text",
                   txt.string()}) == 0);
    json rep = json::parse(slurp(js));
    CHECK(rep["schema"] == "quartic3/1");
    CHECK(rep["assumptions"].size() == 2);
    CHECK(rep["tails"].size() == 1);
    CHECK(rep["tails"][0]["reduction"] == "y^3 - y = x^2");
    CHECK(!rep["tails"][0].contains("residue_vectors"));
    CHECK(slurp(dot).rfind("digraph", 0) == 0);
    CHECK(!slurp(txt).empty());

    // the written report is the canonical one
    auto in = cli::parse_input(data("genus1_tail.json"));
    CHECK(rep == cli::report_json(run_algorithm(in.curve, RunOptions{}), in));

    CHECK(run_cli({"reduce", "--input", data("genus1_tail.json"), "--json", js.string(), "--text", txt.string(),
                   "--residue-vectors"}) == 0);
    CHECK(json::parse(slurp(js))["tails"][0].contains("residue_vectors"));

    CHECK(run_cli({"reduce", "--input", "/nonexistent/q3.json", "--text", txt.string()}) == 4);
    CHECK(run_cli({"reduce"}) == 4);
    CHECK(run_cli({"reduce", "--input", data("genus1_tail.json"), "--selector", "other"}) == 4);
    CHECK(run_cli({"reduce", "--input", data("genus1_tail.json"), "--precision", "512", "--max-precision", "256"}) == 4);
    auto bad = scratch("bad.json");
    std::ofstream(bad) << R"({"base": "Q3", "curve": {"normal": {"A2": ["1.5"], "A1": [], "A0": ["1"]}}})";
    CHECK(run_cli({"reduce", "--input", bad.string()}) == 4);
    CHECK(run_cli({"reduce", "--input", data("genus1_tail.json"), "--precision", "2", "--max-precision", "2", "--text",
                   txt.string()}) == 2);
}
