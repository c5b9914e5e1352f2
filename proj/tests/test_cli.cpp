#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include "focklift/cli.hpp"

using namespace focklift;
using focklift::cli::json;

namespace {

namespace fs = std::filesystem;

struct Run {
    int code = -1;
    std::string out;
};

std::string binary()
{
    const char* b = std::getenv("FOCKLIFT_BIN");
    return b ? b : "";
}

fs::path scratch(const std::string& name, const std::string& body)
{
    const fs::path dir = fs::temp_directory_path() / "focklift_cli_test";
    fs::create_directories(dir);
    const fs::path p = dir / name;
    std::ofstream(p) << body;
    return p;
}

// stdout only; stderr is discarded
Run exec(const std::string& args)
{
    Run r;
    const std::string cmd = binary() + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe)
        return r;
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0)
        r.out.append(buf.data(), got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

cli::Outcome run_json(const json& spec, cli::Params p = {})
{
    return cli::guarded([&] { return cli::run(spec, p); });
}

} // namespace

TEST(CliRun, ScalarNpExitCodes)
{
    const auto a = run_json({{"kind", "scalar_np"}, {"points", {{0, 0}}}, {"values", {0.5}}, {"k", 3}});
    EXPECT_EQ(a.code, 0);
    EXPECT_TRUE(a.report["feasible"].get<bool>());
    EXPECT_NEAR(a.report["min_norm"].get<double>(), 0.5, 1e-12);

    const auto b = run_json({{"kind", "scalar_np"}, {"points", {{0, 0}}}, {"values", {1.5}}, {"k", 0}});
    EXPECT_EQ(b.code, 1);
    EXPECT_FALSE(b.report["feasible"].get<bool>());
}

TEST(CliRun, InvalidInputs)
{
    EXPECT_EQ(run_json({{"kind", "nonsense"}}).code, 2);
    EXPECT_EQ(run_json({{"points", {{0}}}}).code, 2);
    EXPECT_EQ(run_json({{"kind", "scalar_np"}, {"points", {{1.0}}}, {"values", {0.1}}, {"k", 1}}).code, 2);
    const auto e = run_json({{"kind", "fock_info"}, {"n", 0}, {"degree", 1}});
    EXPECT_EQ(e.code, 2);
    EXPECT_EQ(e.report["error"]["kind"], "invalid_input");
}

TEST(CliRun, FockInfo)
{
    const auto o = run_json({{"kind", "fock_info"}, {"n", 2}, {"degree", 2}});
    EXPECT_EQ(o.code, 0);
    EXPECT_EQ(o.report["dim"], 7);
    EXPECT_EQ(o.report["words"][4], "g1g2");
}

TEST(CliRun, SweepEmptyAndInjected)
{
    const auto empty = run_json({{"kind", "verify_sweep"}, {"count", 0}});
    EXPECT_EQ(empty.code, 0);
    EXPECT_EQ(empty.report["passed"], 0);
    EXPECT_TRUE(empty.report["certificates"]["records"].empty());

    const auto inj = run_json({{"kind", "verify_sweep"}, {"count", 3}, {"seed", 5}, {"inject", {1}}});
    const auto& recs = inj.report["certificates"]["records"];
    ASSERT_EQ(recs.size(), 3u);
    EXPECT_EQ(recs[1]["exit_code"], 2);
    EXPECT_EQ(recs[0]["exit_code"], 0);
    EXPECT_EQ(recs[2]["exit_code"], 0);
    EXPECT_EQ(inj.report["errors"], 1);
}

TEST(CliRun, Deterministic)
{
    const json spec = {{"kind", "verify_sweep"}, {"count", 4}, {"seed", 9}};
    EXPECT_EQ(run_json(spec).report.dump(), run_json(spec).report.dump());
    const json np = {{"kind", "scalar_np"}, {"points", {{0.1, 0.2}, {-0.3, 0.1}}}, {"values", {0.2, 0.4}},
                     {"k", 2}, {"solve", true}};
    EXPECT_EQ(run_json(np).report.dump(), run_json(np).report.dump());
}

TEST(CliRun, QuietDropsCertificates)
{
    cli::Params p;
    p.quiet = true;
    const auto o = run_json({{"kind", "pick"}, {"points", {{0.5}}}, {"values", {1.0}}, {"k", 1}}, p);
    EXPECT_EQ(o.code, 0);
    EXPECT_FALSE(o.report.contains("certificates"));
}

TEST(CliRun, SchurAndSarason)
{
    const json coeffs = {{"n", 1}, {"blocks", {{{"word", json::array()}, {"value", {{0.3}}}},
                                               {{"word", {1}}, {"value", {{0.5}}}}}}};
    const auto s = run_json({{"kind", "schur"}, {"k", 2}, {"coefficients", coeffs}});
    EXPECT_EQ(s.code, 0);
    Matrix A(2, 2);
    A << 0.3, 0.0, 0.5, 0.3;
    EXPECT_NEAR(s.report["min_norm"].get<double>(), Eigen::JacobiSVD<Matrix>(A).singularValues()(0), 1e-12);
    EXPECT_TRUE(s.report.contains("phi"));

    const json phi = {{"n", 2}, {"blocks", {{{"word", json::array()}, {"value", {{0.6}}}}}}};
    const json theta = {{"n", 2}, {"blocks", {{{"word", {1}}, {"value", {{1.0}}}}}}};
    const auto d = run_json({{"kind", "sarason"}, {"k", 1}, {"phi", phi}, {"theta", theta}});
    EXPECT_EQ(d.code, 0);
    EXPECT_NEAR(d.report["distance"].get<double>(), 0.6, 1e-10);
}

TEST(CliRun, LiftCommutator)
{
    // T = Y = 0.5, A = 0.3: intertwining, the lift has norm 0.3
    const json spec = {{"kind", "lift"},
                       {"T", {{{0.5}}}},
                       {"Y", {{{0.5}}}},
                       {"A", {{0.3}}},
                       {"degree", 6}};
    const auto o = run_json(spec);
    EXPECT_EQ(o.code, 0) << o.report.dump();
    EXPECT_EQ(o.report["verdict"], "pass");
}

TEST(CliRun, ReportsReparse)
{
    const auto o = run_json({{"kind", "scalar_np"}, {"points", {{0.2}}}, {"values", {0.4}}, {"k", 1}, {"solve", true}});
    const json back = json::parse(o.report.dump());
    EXPECT_EQ(back, o.report);
    const Symbol phi = io::symbol_from_json(back["phi"], "phi");
    EXPECT_EQ(phi.n, 1);
}

class CliBinary : public ::testing::Test {
protected:
    void SetUp() override
    {
        if (binary().empty())
            GTEST_SKIP() << "FOCKLIFT_BIN not set";
    }
};

TEST_F(CliBinary, ExitCodesFromProcess)
{
    const auto ok = scratch("ok.json", R"({"kind":"scalar_np","points":[[0,0]],"values":[0.5],"k":3})");
    const auto bad = scratch("bad.json", R"({"kind":"scalar_np","points":[[0,0]],"values":[1.5],"k":0})");
    const auto broken = scratch("broken.json", R"({"kind": "scalar_np", "points": [[0,0]],)");
    EXPECT_EQ(exec("run --spec " + ok.string()).code, 0);
    EXPECT_EQ(exec("run --spec " + bad.string()).code, 1);
    EXPECT_EQ(exec("run --spec " + broken.string()).code, 2);
    EXPECT_EQ(exec("run --spec /nonexistent/file.json").code, 2);
    EXPECT_EQ(exec("fock info --n 0 --degree 1").code, 2);
    EXPECT_EQ(exec("no-such-command").code, 2);
}

TEST_F(CliBinary, SubcommandsAndQuiet)
{
    const auto r = exec("fock info --n 3 --degree 2");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(json::parse(r.out)["dim"], 13);

    const auto spec = scratch("np.json", R"({"k":1,"points":[[0.5]],"values":[1.0]})");
    const auto a = exec("np check --spec " + spec.string());
    ASSERT_EQ(a.code, 0);
    EXPECT_TRUE(json::parse(a.out).contains("certificates"));
    const auto q = exec("--quiet np solve --spec " + spec.string());
    ASSERT_EQ(q.code, 0);
    const json jq = json::parse(q.out);
    EXPECT_FALSE(jq.contains("certificates"));
    EXPECT_TRUE(jq.contains("phi"));
}

TEST_F(CliBinary, SweepIsByteIdentical)
{
    const auto a = exec("lift sweep --seed 3 --count 3");
    const auto b = exec("lift sweep --seed 3 --count 3");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(exec("lift sweep --count 0").code, 0);
}

TEST_F(CliBinary, SamplesRun)
{
    const char* env = std::getenv("FOCKLIFT_SAMPLES");
    const std::string dir = env ? env : FOCKLIFT_SAMPLES_DIR;
    int seen = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() != ".json")
            continue;
        ++seen;
        const auto r = exec("run --spec " + e.path().string());
        // samples named *_infeasible.json are expected to exit 1
        const bool infeasible = e.path().stem().string().find("infeasible") != std::string::npos;
        EXPECT_EQ(r.code, infeasible ? 1 : 0) << e.path();
        EXPECT_NO_THROW((void)json::parse(r.out)) << e.path();
    }
    EXPECT_GT(seen, 0);
}
