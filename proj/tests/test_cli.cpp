#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "optquad/real.hpp"

#include "test_util.hpp"

using json = nlohmann::json;
using optquad::real_t;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

// Run the CLI with stdout captured; stderr goes to a scratch file so usage
// errors stay quiet in the test log.
RunResult run_cli(const std::string& args)
{
    const std::string cmd = std::string(OPTQUAD_CLI_PATH) + " " + args + " 2>/tmp/optquad_cli_err";
    RunResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.output.append(buf.data(), got);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

double payload_num(const json& j) { return j.get<double>(); }

} // namespace

TEST_CASE("construct emits the corrected trapezoid", "[cli]")
{
    const auto res = run_cli("construct --m 2 --N 2");
    REQUIRE(res.exit_code == 0);
    const json doc = json::parse(res.output);
    CHECK(doc["schema_version"] == "1");
    CHECK(doc["command"] == "construct");
    CHECK(doc["params"]["m"] == 2);
    const auto& payload = doc["payload"];
    REQUIRE(payload["C"].size() == 3);
    CHECK(payload_num(payload["C"][0]) == Catch::Approx(0.25).epsilon(1e-13));
    CHECK(payload_num(payload["C"][1]) == Catch::Approx(0.5).epsilon(1e-13));
    CHECK(payload_num(payload["C"][2]) == Catch::Approx(0.25).epsilon(1e-13));
    CHECK(payload_num(payload["A"]) == Catch::Approx(1.0 / 48).epsilon(1e-13));
    CHECK(payload_num(payload["B"]) == Catch::Approx(-1.0 / 48).epsilon(1e-13));
    CHECK(doc["diagnostics"].contains("precision_bits"));
}

TEST_CASE("numbers carry at least 17 significant digits", "[cli]")
{
    const auto res = run_cli("construct --m 2 --N 2");
    REQUIRE(res.exit_code == 0);
    // every real payload value is scientific with 17 fractional digits
    CHECK(res.output.find("5.00000000000000000e-01") != std::string::npos);
    CHECK(res.output.find("2.08333333333333333e-02") != std::string::npos);
}

TEST_CASE("construct rejects out-of-range order", "[cli]")
{
    CHECK(run_cli("construct --m 1 --N 4").exit_code == 2);
    CHECK(run_cli("construct --m 21 --N 4").exit_code == 2);
    CHECK(run_cli("construct --m 4 --N 1").exit_code == 2);
    CHECK(run_cli("construct --m 4 --N 8 --precision-bits 16").exit_code == 2);
    CHECK(run_cli("construct --m 4 --N 8 --format xml").exit_code == 2);
    CHECK(run_cli("bogus --m 4 --N 8").exit_code == 2);
}

TEST_CASE("csv format lists the weights plus A and B", "[cli]")
{
    const auto res = run_cli("construct --m 3 --N 4 --format csv");
    REQUIRE(res.exit_code == 0);
    std::istringstream lines(res.output);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(lines, line)) rows.push_back(line);
    REQUIRE(rows.size() == 8); // header + 5 weights + A + B
    CHECK(rows[0] == "label,value");
    CHECK(rows[1].rfind("C[0],", 0) == 0);
    CHECK(rows[6].rfind("A,", 0) == 0);
    CHECK(rows[7].rfind("B,", 0) == 0);
}

TEST_CASE("norm with all methods agrees with the closed value", "[cli]")
{
    const auto res = run_cli("norm --m 2 --N 2 --method all");
    REQUIRE(res.exit_code == 0);
    const json doc = json::parse(res.output);
    const auto& norms = doc["payload"]["norm_sq"];
    for (const char* key : {"closed", "direct", "extremal"})
        CHECK(payload_num(norms[key]) == Catch::Approx(1.0 / 11520).epsilon(1e-10));
    for (const auto& [key, val] : doc["payload"]["pairwise_rel_diff"].items())
        CHECK(payload_num(val) < 1e-8);

    const auto res34 = run_cli("norm --m 3 --N 4 --method closed");
    const json doc34 = json::parse(res34.output);
    const double expected = std::pow(0.25, 6) / 30240;
    CHECK(payload_num(doc34["payload"]["norm_sq"]["closed"]) ==
          Catch::Approx(expected).epsilon(1e-10));
}

TEST_CASE("verify passes on healthy grids", "[cli]")
{
    const auto res = run_cli("verify --m 4 --N 10");
    REQUIRE(res.exit_code == 0);
    const json doc = json::parse(res.output);
    CHECK(doc["payload"]["all_pass"] == true);
    bool saw_lambda = false;
    for (const auto& check : doc["payload"]["checks"]) {
        CHECK(check["pass"] == true);
        if (check["name"] == "lambda_match_normalized") saw_lambda = true;
    }
    CHECK(saw_lambda);
}

TEST_CASE("verify passes at order six on twenty subintervals", "[cli]")
{
    const auto res = run_cli("verify --m 6 --N 20");
    REQUIRE(res.exit_code == 0);
    const json doc = json::parse(res.output);
    CHECK(doc["payload"]["all_pass"] == true);
}

TEST_CASE("too few nodes for the order exits with the numeric failure code", "[cli]")
{
    // N+3 < m: the amplitude and multiplier systems are exactly singular
    CHECK(run_cli("verify --m 6 --N 2").exit_code == 3);
    CHECK(run_cli("construct --m 6 --N 2").exit_code == 3);
}

TEST_CASE("verify on a single subinterval runs the dense route only", "[cli]")
{
    const auto res = run_cli("verify --m 2 --N 1");
    REQUIRE(res.exit_code == 0);
    const json doc = json::parse(res.output);
    bool coefficient_check_skipped = false;
    for (const auto& check : doc["payload"]["checks"])
        if (check["name"] == "oracle_coefficient_match")
            coefficient_check_skipped = check["skipped"] == true;
    CHECK(coefficient_check_skipped);
}

TEST_CASE("integrate reports error, bound and ratio", "[cli]")
{
    const auto res = run_cli("integrate --m 2 --N 8 --function expx");
    REQUIRE(res.exit_code == 0);
    const json doc = json::parse(res.output);
    const auto& payload = doc["payload"];
    CHECK(payload_num(payload["ratio"]) <= 1.0 + 1e-10);
    CHECK(payload_num(payload["error"]) > 0.0);
    CHECK(payload_num(payload["exact"]) == Catch::Approx(std::exp(1.0) - 1).epsilon(1e-15));

    const auto poly = run_cli("integrate --m 4 --N 8 --function x3");
    const json poly_doc = json::parse(poly.output);
    CHECK(payload_num(poly_doc["payload"]["error"]) < 1e-13);

    CHECK(run_cli("integrate --m 2 --N 8 --function nosuch").exit_code == 2);
}

TEST_CASE("convergence sweep reports orders at or above m", "[cli]")
{
    const auto res = run_cli("convergence --m 3 --N-list 8,16,32 --function inv1px");
    REQUIRE(res.exit_code == 0);
    const json doc = json::parse(res.output);
    const auto& sweep = doc["payload"]["sweep"];
    REQUIRE(sweep.size() == 3);
    CHECK(sweep[0]["observed_order"].is_null());
    for (std::size_t i = 1; i < sweep.size(); ++i) {
        CHECK(payload_num(sweep[i]["observed_order"]) >= 3.0);
        CHECK(sweep[i]["theoretical_order"] == 3);
    }

    // the sinusoid's error vanishes identically: order column stays null
    const auto sin_res = run_cli("convergence --m 3 --N-list 8,16 --function sin2pix");
    const json sin_doc = json::parse(sin_res.output);
    for (const auto& row : sin_doc["payload"]["sweep"])
        CHECK(row["observed_order"].is_null());
}

TEST_CASE("identical invocations are byte-identical", "[cli]")
{
    const auto a = run_cli("construct --m 4 --N 10");
    const auto b = run_cli("construct --m 4 --N 10");
    CHECK(a.output == b.output);
    const auto c = run_cli("verify --m 3 --N 6");
    const auto d = run_cli("verify --m 3 --N 6");
    CHECK(c.output == d.output);
}

TEST_CASE("output flag writes a file", "[cli]")
{
    const std::string path = "/tmp/optquad_cli_out.json";
    std::remove(path.c_str());
    const auto res = run_cli("construct --m 2 --N 4 --output " + path);
    REQUIRE(res.exit_code == 0);
    CHECK(res.output.empty());
    std::ifstream in(path);
    REQUIRE(in.good());
    const json doc = json::parse(in);
    CHECK(doc["command"] == "construct");
    std::remove(path.c_str());
}

TEST_CASE("precision bits come from the environment unless overridden", "[cli]")
{
    auto run_with_env = [](const std::string& args) {
        RunResult res;
        const std::string cmd = std::string("env OPTQUAD_PRECISION_BITS=96 ") + OPTQUAD_CLI_PATH +
                                " " + args + " 2>/dev/null";
        FILE* pipe = popen(cmd.c_str(), "r");
        REQUIRE(pipe != nullptr);
        std::array<char, 4096> buf{};
        std::size_t got = 0;
        while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
            res.output.append(buf.data(), got);
        res.exit_code = WEXITSTATUS(pclose(pipe));
        return res;
    };

    const auto env_run = run_with_env("construct --m 2 --N 2");
    REQUIRE(env_run.exit_code == 0);
    const json doc = json::parse(env_run.output);
    CHECK(doc["params"]["precision_bits"] == 96);
    CHECK(doc["diagnostics"]["precision_bits"] == 96);

    const auto flag_run = run_with_env("construct --m 2 --N 2 --precision-bits 80");
    REQUIRE(flag_run.exit_code == 0);
    const json flag_doc = json::parse(flag_run.output);
    CHECK(flag_doc["params"]["precision_bits"] == 80);
}
