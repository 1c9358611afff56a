#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace cassini;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

// Runs the CLI through the shell and captures stdout; `redirect` defaults to dropping stderr.
Run cli(const std::string& args, const std::string& redirect = "2>/dev/null")
{
    const std::string cmd = std::string(CASSINI_CLI) + " " + args + " " + redirect;
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        return r;
    }
    std::array<char, 4096> buf{};
    while (std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe)) {
        r.out.append(buf.data(), got);
    }
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

Run cli_err(const std::string& args)
{
    return cli(args, "2>&1 >/dev/null");
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir = fs::temp_directory_path() / ("cassini_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    std::string at(const std::string& name) const { return (dir / name).string(); }
    fs::path dir;
};

} // namespace

TEST_F(Cli, GenWritesSeededClouds)
{
    ASSERT_EQ(cli("gen --n 4 --seed 1 --out " + at("a.csv")).code, 0);
    const auto text = slurp(at("a.csv"));
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
    ASSERT_EQ(cli("gen --n 4 --seed 1 --out " + at("b.csv")).code, 0);
    EXPECT_EQ(text, slurp(at("b.csv")));

    ASSERT_EQ(cli("gen --n 40 --dim 2 --seed 9 --out " + at("c.json")).code, 0);
    const auto c = load_cloud(at("c.json"));
    Rng rng(9);
    EXPECT_EQ(c.raw(), random_cloud(40, 2, rng).raw());

    EXPECT_EQ(cli("gen --n 0").code, 2);
    EXPECT_EQ(cli("gen --n 3 --out /nonexistent-dir/x.csv").code, 2);
}

TEST_F(Cli, DistVariantsAndDomainErrors)
{
    ASSERT_EQ(cli("gen --n 12 --seed 2 --out " + at("c.csv")).code, 0);
    ASSERT_EQ(cli("dist --cloud " + at("c.csv") + " --punctures 0 --variant tau_p --out " + at("tau.json")).code, 0);
    ASSERT_EQ(cli("dist --cloud " + at("c.csv") + " --punctures 0 --variant avg_tau --out " + at("avg.json")).code, 0);
    EXPECT_EQ(slurp(at("tau.json")), slurp(at("avg.json")));
    EXPECT_EQ(load_matrix(at("tau.json")).size(), 11u);

    std::ofstream(at("dup.csv")) << "x1,x2\n0,0\n1,1\n0,0\n2,3\n";
    const auto err = cli_err("dist --cloud " + at("dup.csv") + " --punctures 0 --variant tau_p");
    EXPECT_EQ(err.code, 2);
    EXPECT_NE(err.out.find("point on puncture"), std::string::npos);
    EXPECT_NE(err.out.find("point index 2"), std::string::npos);

    EXPECT_EQ(cli("dist --cloud " + at("c.csv") + " --punctures 0 --variant bogus").code, 2);
    EXPECT_EQ(cli("dist --cloud " + at("c.csv") + " --variant tau_p").code, 2);
    EXPECT_EQ(cli("dist").code, 2);
}

TEST_F(Cli, DeltaModes)
{
    std::ofstream(at("line.csv")) << "x\n0\n1\n2.5\n4\n7\n";
    const auto collinear = json::parse(cli("delta --cloud " + at("line.csv")).out);
    EXPECT_EQ(collinear.at("delta").get<double>(), 0.0);

    ASSERT_EQ(cli("gen --n 30 --seed 4 --out " + at("c.csv")).code, 0);
    const std::string in = "--cloud " + at("c.csv") + " --punctures 0,1 --variant avg_tau";
    const auto one = json::parse(cli("delta " + in + " --workers 1").out);
    const auto eight = json::parse(cli("delta " + in + " --workers 8").out);
    EXPECT_EQ(one.at("delta"), eight.at("delta"));
    EXPECT_EQ(one.at("witness"), eight.at("witness"));
    const auto sampled = json::parse(cli("delta " + in + " --mode sampled --samples 2000 --seed 5").out);
    EXPECT_LE(sampled.at("delta").get<double>(), one.at("delta").get<double>());
    EXPECT_EQ(sampled.at("seed").get<int>(), 5);
    EXPECT_EQ(cli("delta " + in + " --mode bogus").code, 2);

    std::ofstream(at("three.csv")) << "x\n0\n1\n2\n";
    EXPECT_EQ(cli("delta --cloud " + at("three.csv")).code, 2);
}

TEST_F(Cli, VerifyExitCodes)
{
    ASSERT_EQ(cli("gen --n 25 --seed 6 --out " + at("c.csv")).code, 0);
    EXPECT_EQ(cli("verify axioms --cloud " + at("c.csv")).code, 0);
    EXPECT_EQ(cli("verify ptolemy --cloud " + at("c.csv")).code, 0);
    EXPECT_EQ(cli("verify sandwich --cloud " + at("c.csv") + " --punctures 0,1").code, 0);
    const auto lemmas = cli("verify lemmas --cloud " + at("c.csv") + " --k 8 --samples 5000");
    EXPECT_EQ(lemmas.code, 0);
    EXPECT_TRUE(json::parse(lemmas.out).at("passed").get<bool>());

    write_text(at("counter.json"), to_json(counterexample_space()).dump());
    ASSERT_EQ(cli("dist --matrix " + at("counter.json") + " --punctures 0 --variant tilde_tau_p --out " + at("tt.json"))
                  .code,
              0);
    const auto bad = cli("verify axioms --matrix " + at("tt.json"));
    EXPECT_EQ(bad.code, 1);
    const auto report = json::parse(bad.out).at("reports").at(0);
    EXPECT_EQ(report.at("violation_count").get<int>(), 1);
    EXPECT_EQ(report.at("violations").size(), 1u);

    EXPECT_EQ(cli("verify nonsense --cloud " + at("c.csv")).code, 2);
    EXPECT_EQ(cli("verify axioms --cloud " + at("c.csv") + " --tol 0").code, 2);
    EXPECT_EQ(cli("verify axioms --cloud " + at("c.csv") + " --tol -1").code, 2);
}

TEST_F(Cli, SpecInput)
{
    write_text(at("spec.json"),
               R"({"base": {"points": [[0], [2], [5], [10]]}, "punctures": [0, 3], "variant": "j"})");
    const auto m = json::parse(cli("dist --spec " + at("spec.json")).out);
    EXPECT_NEAR(m.at("entries").at(0).at(1).get<double>(), std::numbers::ln2, 1e-15);
    write_text(at("onpuncture.json"), R"({"base": {"points": [[0], [2], [5]]}, "punctures": [[2]]})");
    EXPECT_EQ(cli("dist --spec " + at("onpuncture.json")).code, 2);
}

TEST_F(Cli, ReproScenarios)
{
    EXPECT_EQ(cli("repro four-point").code, 0);
    EXPECT_EQ(cli("repro arctan --samples 5000").code, 0);
    EXPECT_EQ(cli("repro sweep --n 10 --trials 2 --k 1,2").code, 0);
    EXPECT_EQ(cli("repro bogus").code, 2);

    const auto out = dir / "reports";
    const auto r = cli("repro all --n 8 --trials 2 --k 1,2 --samples 2000 --out-dir " + out.string());
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(fs::exists(out / "four-point.json"));
    EXPECT_TRUE(fs::exists(out / "arctan.json"));
    EXPECT_TRUE(fs::exists(out / "sweep.json"));

    const auto env = dir / "from_env";
    const std::string cmd = "CASSINI_OUT_DIR=" + env.string() + " " + std::string(CASSINI_CLI)
                            + " repro all --n 8 --trials 1 --k 1 --samples 1000 >/dev/null 2>&1";
    EXPECT_EQ(std::system(cmd.c_str()), 0);
    EXPECT_TRUE(fs::exists(env / "sweep.json"));
}

TEST_F(Cli, HelpExitsZero)
{
    EXPECT_EQ(cli("--help").code, 0);
    EXPECT_EQ(cli("").code, 2);
}
