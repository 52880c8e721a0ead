#include <array>
#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "nctest/fixtures.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string binary_path()
{
    const char* env = std::getenv("NCTEST_BIN");
    return env ? env : "";
}

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cmd(const std::string& cmd)
{
    RunResult res;
    FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.out.append(buf.data(), n);
    int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

fs::path write_temp(const std::string& name, const std::string& content)
{
    fs::path dir = fs::temp_directory_path() / "nctest_cli_tests";
    fs::create_directories(dir);
    fs::path p = dir / name;
    std::ofstream out(p);
    out << content;
    return p;
}

}  // namespace

TEST_CASE("cli end-to-end")
{
    std::string bin = binary_path();
    if (bin.empty()) SKIP("NCTEST_BIN not set");

    fs::path classical = write_temp("classical.json", nctest::fixtures::kQubitXZGpt);
    fs::path boxworld = write_temp("boxworld.json", nctest::fixtures::kBoxworldGpt);
    fs::path qudit = write_temp("qudit.json", nctest::fixtures::kDiagonalQuditGpt);
    fs::path quantum = write_temp("quantum.json", nctest::fixtures::kQubitXZQuantum);

    SECTION("check exits 0 on a classical fragment and prints a report")
    {
        RunResult res = run_cmd(bin + " check " + classical.string());
        REQUIRE(res.exit_code == 0);
        json report = json::parse(res.out);
        REQUIRE(report["verdict"] == "classical");
        REQUIRE(report["robustness"] == "0");
    }

    SECTION("check exits 3 on the boxworld fragment")
    {
        RunResult res = run_cmd(bin + " check " + boxworld.string());
        REQUIRE(res.exit_code == 3);
        json report = json::parse(res.out);
        REQUIRE(report["verdict"] == "nonclassical");
    }

    SECTION("robustness prints r = 1/2 exactly in exact mode")
    {
        RunResult res = run_cmd(bin + " robustness " + boxworld.string());
        REQUIRE(res.exit_code == 0);
        json report = json::parse(res.out);
        REQUIRE(report["robustness"] == "1/2");
        REQUIRE(report.contains("model"));
        REQUIRE(report["model"]["response_functions"].size() == 6);
    }

    SECTION("robustness in float mode is within 1e-6 of one half")
    {
        RunResult res = run_cmd(bin + " robustness --arithmetic float " + boxworld.string());
        REQUIRE(res.exit_code == 0);
        json report = json::parse(res.out);
        REQUIRE(std::fabs(report["robustness"].get<double>() - 0.5) <= 1e-6);
    }

    SECTION("quantum input runs in float mode by default")
    {
        RunResult res = run_cmd(bin + " check " + quantum.string());
        REQUIRE(res.exit_code == 0);
        json report = json::parse(res.out);
        REQUIRE(report["diagnostics"]["arithmetic"] == "float");
    }

    SECTION("quantum input with exact arithmetic is rejected")
    {
        RunResult res = run_cmd(bin + " check --arithmetic exact " + quantum.string());
        REQUIRE(res.exit_code == 2);
        REQUIRE(res.out.empty());
    }

    SECTION("report includes the facet and inclusion matrices")
    {
        RunResult res = run_cmd(bin + " report " + qudit.string());
        REQUIRE(res.exit_code == 0);
        json report = json::parse(res.out);
        REQUIRE(report.contains("H_states"));
        REQUIRE(report.contains("H_effects"));
        REQUIRE(report.contains("inclusion_states"));
        REQUIRE(report.contains("projection_effects"));
        REQUIRE(report["H_states"].size() == 4);
        REQUIRE(report["H_effects"].size() == 4);
    }

    SECTION("malformed input exits 2 with no report")
    {
        fs::path bad = write_temp("bad.json", R"({"format": "gpt", "gpt": {
            "states": [["1", "0"], ["1"]], "effects": [["1", "0"]], "unit_effect": ["1", "0"]}})");
        RunResult res = run_cmd(bin + " check " + bad.string());
        REQUIRE(res.exit_code == 2);
        REQUIRE(res.out.empty());
    }

    SECTION("empty effects list exits 2")
    {
        fs::path bad = write_temp("empty_effects.json", R"({"format": "gpt", "gpt": {
            "states": [["1", "0"]], "effects": [], "unit_effect": ["1", "0"]}})");
        RunResult res = run_cmd(bin + " check " + bad.string());
        REQUIRE(res.exit_code == 2);
        REQUIRE(res.out.empty());
    }

    SECTION("--output writes the report to a file")
    {
        fs::path out = fs::temp_directory_path() / "nctest_cli_tests" / "report_out.json";
        fs::remove(out);
        RunResult res =
            run_cmd(bin + " robustness --output " + out.string() + " " + boxworld.string());
        REQUIRE(res.exit_code == 0);
        REQUIRE(res.out.empty());
        std::ifstream in(out);
        REQUIRE(in.good());
        json report = json::parse(in);
        REQUIRE(report["robustness"] == "1/2");
    }

    SECTION("--quiet trims the report to verdict and robustness")
    {
        RunResult res = run_cmd(bin + " robustness --quiet " + boxworld.string());
        REQUIRE(res.exit_code == 0);
        json report = json::parse(res.out);
        REQUIRE(report.size() == 2);
    }

    SECTION("batch input processes documents in order")
    {
        std::string batch = std::string("[") + nctest::fixtures::kQubitXZGpt + ",\n" +
                            nctest::fixtures::kBoxworldGpt + "]";
        fs::path p = write_temp("batch.json", batch);
        RunResult res = run_cmd(bin + " check " + p.string());
        REQUIRE(res.exit_code == 3);  // one document is nonclassical
        json reports = json::parse(res.out);
        REQUIRE(reports.is_array());
        REQUIRE(reports.size() == 2);
        REQUIRE(reports[0]["verdict"] == "classical");
        REQUIRE(reports[1]["verdict"] == "nonclassical");
    }

    SECTION("batch input mixes quantum and gpt documents")
    {
        std::string batch = std::string("[") + nctest::fixtures::kQubitXZQuantum + ",\n" +
                            nctest::fixtures::kDiagonalQuditGpt + ",\n" +
                            nctest::fixtures::kBoxworldGpt + ",\n" +
                            nctest::fixtures::kQubitXZGpt + "]";
        fs::path p = write_temp("batch_mixed.json", batch);
        RunResult res = run_cmd(bin + " robustness " + p.string());
        REQUIRE(res.exit_code == 0);
        json reports = json::parse(res.out);
        REQUIRE(reports.size() == 4);
        REQUIRE(reports[0]["diagnostics"]["arithmetic"] == "float");
        REQUIRE(reports[1]["diagnostics"]["arithmetic"] == "exact");
        REQUIRE(reports[2]["robustness"] == "1/2");
        REQUIRE(reports[3]["robustness"] == "0");
    }

    SECTION("custom noise channel can come from the document options")
    {
        json doc = json::parse(nctest::fixtures::kBoxworldGpt);
        doc["options"] = {{"noise", "custom"},
                          {"noise_matrix", json::parse(R"([["1","0","0"],["0","0","0"],["0","0","0"]])")}};
        fs::path p = write_temp("custom_opts.json", doc.dump());
        RunResult res = run_cmd(bin + " robustness " + p.string());
        REQUIRE(res.exit_code == 0);
        json report = json::parse(res.out);
        // This channel is the depolarizer toward [1,0,0], so r = 1/2 again.
        REQUIRE(report["robustness"] == "1/2");
    }

    SECTION("custom noise requires a channel matrix")
    {
        RunResult res = run_cmd(bin + " robustness --noise custom " + boxworld.string());
        REQUIRE(res.exit_code == 2);
    }

    SECTION("custom identity noise cannot be embedded for boxworld")
    {
        fs::path channel = write_temp("identity_channel.json",
                                      R"([["1","0","0"],["0","1","0"],["0","0","1"]])");
        RunResult res = run_cmd(bin + " robustness --noise custom --noise-matrix " +
                                channel.string() + " " + boxworld.string());
        REQUIRE(res.exit_code == 0);
        json report = json::parse(res.out);
        REQUIRE(report["robustness"].is_null());
        REQUIRE(report["verdict"] == "nonclassical");
    }

    SECTION("--max-mixed overrides the depolarizing target")
    {
        // Mixing toward the first state instead of the central one still
        // reaches a classical model at some strictly positive weight.
        RunResult res =
            run_cmd(bin + " robustness --max-mixed '[\"1\",\"1\",\"0\"]' " + boxworld.string());
        REQUIRE(res.exit_code == 0);
        json report = json::parse(res.out);
        REQUIRE(report["robustness"].is_string());
        REQUIRE(report["robustness"] != "0");
        REQUIRE(json::parse(res.out)["max_mixed_state"][1] == "1");
    }

    SECTION("NCTEST_TOLERANCE provides the default tolerance")
    {
        RunResult res = run_cmd("NCTEST_TOLERANCE=1e-6 " + bin + " check --arithmetic float " +
                                classical.string());
        REQUIRE(res.exit_code == 0);
        json report = json::parse(res.out);
        REQUIRE(report["diagnostics"]["tolerance"].get<double>() == 1e-6);
    }

    SECTION("the tolerance flag outranks the environment")
    {
        RunResult res = run_cmd("NCTEST_TOLERANCE=1e-6 " + bin +
                                " check --arithmetic float --tolerance 1e-8 " +
                                classical.string());
        REQUIRE(res.exit_code == 0);
        json report = json::parse(res.out);
        REQUIRE(report["diagnostics"]["tolerance"].get<double>() == 1e-8);
    }

    SECTION("fixtures subcommand lists and emits the demo inputs")
    {
        RunResult list = run_cmd(bin + " fixtures");
        REQUIRE(list.exit_code == 0);
        REQUIRE(list.out.find("boxworld-gpt") != std::string::npos);
        RunResult one = run_cmd(bin + " fixtures boxworld-gpt");
        REQUIRE(one.exit_code == 0);
        json doc = json::parse(one.out);
        REQUIRE(doc["format"] == "gpt");
        RunResult missing = run_cmd(bin + " fixtures nonexistent");
        REQUIRE(missing.exit_code == 2);
    }

    SECTION("output is byte-identical across repeated runs")
    {
        RunResult a = run_cmd(bin + " report " + boxworld.string());
        RunResult b = run_cmd(bin + " report " + boxworld.string());
        REQUIRE(a.exit_code == 0);
        REQUIRE(a.out == b.out);
        RunResult c = run_cmd(bin + " report --arithmetic float " + boxworld.string());
        RunResult d = run_cmd(bin + " report --arithmetic float " + boxworld.string());
        REQUIRE(c.out == d.out);
    }

    SECTION("skip-validation admits out-of-range gpt data")
    {
        fs::path odd = write_temp("subnormal_bad.json", R"({"format": "gpt", "gpt": {
            "states": [["2", "0"]], "effects": [["1", "0"]], "unit_effect": ["1", "0"]}})");
        RunResult strict = run_cmd(bin + " check " + odd.string());
        REQUIRE(strict.exit_code == 2);
        RunResult relaxed = run_cmd(bin + " check --skip-validation " + odd.string());
        REQUIRE(relaxed.exit_code == 0);
    }
}
