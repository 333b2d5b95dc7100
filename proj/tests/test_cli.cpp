#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch()
{
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("sphom_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Run run(const std::string& args)
{
    const auto out = scratch() / "stdout.txt";
    const auto err = scratch() / "stderr.txt";
    const std::string cmd = std::string("\"") + SPHOM_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                            err.string() + "\"";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string data(const std::string& name) { return "\"" + std::string(SPHOM_DATA_DIR) + "/" + name + "\""; }

} // namespace

TEST(Cli, SolveMotivatingSystem)
{
    auto r = run("solve " + data("motivating.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    bool found = false;
    for (const auto& s : j["sample_sets"]["0"]) {
        const double re0 = s["x"][0][0], im0 = s["x"][0][1], re1 = s["x"][1][0], im1 = s["x"][1][1];
        found |= std::hypot(re0 - 2.0, im0) + std::hypot(re1 - 1.0, im1) < 1e-8;
    }
    EXPECT_TRUE(found);
    EXPECT_FALSE(j["sample_sets"]["1"].empty());
}

TEST(Cli, SolveWritesOutputFile)
{
    const auto path = scratch() / "report.json";
    auto r = run("solve " + data("motivating.json") + " --schedule combined --dmax 1 --workers 2 -o \"" +
                 path.string() + "\"");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    const auto j = json::parse(slurp(path));
    EXPECT_EQ(j["schedule"]["kind"], "combined");
    EXPECT_EQ(j["schedule"]["d_max"], 1);
    EXPECT_EQ(j["schedule"]["segments"], 2);
}

TEST(Cli, MalformedInputExitsOne)
{
    auto r = run("solve " + data("malformed.json"));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("line"), std::string::npos) << r.err;
}

TEST(Cli, BinomialInputIsDegenerate)
{
    auto r = run("solve " + data("binomial.json"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("degenerate: m ≤ n+1"), std::string::npos) << r.err;
}

TEST(Cli, UsageErrorsExitOne)
{
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("solve").code, 1);
    EXPECT_EQ(run("solve " + data("motivating.json") + " --schedule zigzag").code, 1);
    EXPECT_EQ(run("solve /nonexistent/file.json").code, 1);
}

TEST(Cli, Volume)
{
    auto r = run("volume " + data("unit_square.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(json::parse(r.out)["normalized_volume"], 2);
    r = run("volume " + data("motivating.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(json::parse(r.out)["normalized_volume"], 9);
    r = run("volume " + data("simplex.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(json::parse(r.out)["normalized_volume"], 1);
    EXPECT_EQ(json::parse(r.out)["cells"].size(), 1u);
}

TEST(Cli, Snf)
{
    auto r = run("snf " + data("identity_matrix.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    for (const auto& d : j["invariant_factors"])
        EXPECT_EQ(d, 1);
    r = run("snf " + data("torsion_matrix.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    j = json::parse(r.out);
    bool large = false;
    for (const auto& d : j["invariant_factors"])
        large |= d.get<long long>() > 1;
    EXPECT_TRUE(large);
}

TEST(Cli, BootstrapHasNineStarts)
{
    auto r = run("bootstrap " + data("motivating.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["start_points"].size(), 9u);
    for (const auto& p : j["start_points"])
        EXPECT_LT(p["residual"].get<double>(), 1e-10);
}

TEST(Cli, VerifyReproducesResiduals)
{
    const auto path = scratch() / "verify_report.json";
    auto r = run("solve " + data("motivating.json") + " -o \"" + path.string() + "\"");
    ASSERT_EQ(r.code, 0) << r.err;
    r = run("verify " + data("motivating.json") + " \"" + path.string() + "\"");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_GT(j["checked"].get<int>(), 0);
    EXPECT_EQ(j["mismatched"], 0);

    // a tampered residual is caught
    auto rep = json::parse(slurp(path));
    rep["sample_sets"]["0"][0]["residual"] = 0.5;
    std::ofstream(path) << rep.dump();
    r = run("verify " + data("motivating.json") + " \"" + path.string() + "\"");
    EXPECT_EQ(r.code, 4);
}

TEST(Cli, SameSeedSameReport)
{
    const auto a = scratch() / "a.json", b = scratch() / "b.json";
    ASSERT_EQ(run("solve " + data("motivating.json") + " --seed 3 -o \"" + a.string() + "\"").code, 0);
    ASSERT_EQ(run("solve " + data("motivating.json") + " --seed 3 --workers 3 -o \"" + b.string() + "\"").code, 0);
    auto ja = json::parse(slurp(a)), jb = json::parse(slurp(b));
    ja.erase("timestamp");
    jb.erase("timestamp");
    EXPECT_EQ(ja.dump(), jb.dump());
}
