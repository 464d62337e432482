#include "tor/cli.hpp"

#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

using namespace tor;
namespace fs = std::filesystem;

namespace {

std::string data(const std::string &name) { return std::string(EXAMPLE_DIR) + "/" + name; }

int run(std::vector<std::string> args, std::string *stdout_text = nullptr)
{
    args.insert(args.begin(), "torctl");
    std::vector<char *> argv;
    for (auto &a : args)
        argv.push_back(a.data());
    std::ostringstream out, err;
    int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    if (stdout_text)
        *stdout_text = out.str();
    return rc;
}

fs::path scratch(const std::string &name)
{
    fs::path p = fs::temp_directory_path() / ("torctl_unit_" + name);
    fs::remove_all(p);
    return p;
}

std::string first_line(const fs::path &p)
{
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

} // namespace

TEST_CASE("config hash depends on results-relevant settings only")
{
    RunConfig a = default_config(), b = default_config();
    b.out = "elsewhere";
    CHECK(config_hash(a, "analyze") == config_hash(b, "analyze"));
    CHECK(config_hash(a, "analyze").size() == 16);
    b.seed = 2;
    CHECK(config_hash(a, "analyze") != config_hash(b, "analyze"));
    CHECK(config_hash(a, "analyze") != config_hash(a, "orbit"));
}

TEST_CASE("config loading")
{
    RunConfig c = load_config(data("config_large_ideals.json"));
    CHECK(c.seed == 7);
    CHECK(c.ideal_norm_cap == 200000);
    CHECK(c.precision_bits == 128);

    fs::path dir = scratch("config");
    fs::create_directories(dir);
    std::ofstream(dir / "bad.json") << R"({"sede": 3})";
    std::ofstream(dir / "neg.json") << R"({"constants": {"c3": -1}})";
    CHECK_THROWS_AS(load_config((dir / "bad.json").string()), Error);
    CHECK_THROWS_AS(load_config((dir / "neg.json").string()), Error);
    fs::remove_all(dir);
}

TEST_CASE("exit codes by failure kind")
{
    CHECK(exit_code_for("InvalidInput") == 2);
    CHECK(exit_code_for("NotCommuting") == 2);
    CHECK(exit_code_for("BudgetExceeded") == 3);
    CHECK(exit_code_for("SearchBudgetExceeded") == 3);
    CHECK(exit_code_for("InvariantViolation") == 4);
    CHECK(exit_code_for("ConjugationResidualTooLarge") == 4);

    fs::path dir = scratch("codes");
    CHECK(run({"--out", dir.string(), "analyze", data("malformed.json")}) == 2);
    CHECK(run({"--out", dir.string(), "analyze", data("noncommuting.json")}) == 2);
    CHECK(run({"analyze"}) == 2);
    CHECK(run({"--help"}) == 0);
    CHECK(run({"--out", dir.string(), "--precision", "32", "analyze", data("cubic.json")}) == 2);
    fs::remove_all(dir);
}

TEST_CASE("analyze and ideal write hashed outputs")
{
    fs::path dir = scratch("outputs");
    std::string text;
    REQUIRE(run({"--out", dir.string(), "analyze", data("cubic.json")}, &text) == 0);
    CHECK(text.find("signature") != std::string::npos);
    CHECK(fs::exists(dir / "conjugacy.json"));

    REQUIRE(run({"--out", dir.string(), "ideal", data("cubic.json"), "--cap", "20"}) == 0);
    std::string head = first_line(dir / "ideal.csv");
    CHECK(head.rfind("# config_hash=", 0) == 0);
    std::ifstream csv(dir / "ideal.csv");
    std::string line;
    int rows = 0;
    while (std::getline(csv, line))
        rows++;
    /* hash line, header, and one row per ideal of norm <= 20 */
    CHECK(rows > 2);
    fs::remove_all(dir);
}
