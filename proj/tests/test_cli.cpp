#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kData = ORCHARD_TEST_DATA_DIR;

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("orchard_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) + "_" +
                std::to_string(::getpid()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    Result run(const std::string& args) {
        const auto out = dir_ / ".stdout", err = dir_ / ".stderr";
        const std::string cmd = std::string("'") + ORCHARD_CLI_PATH + "' " + args + " >'" + out.string() + "' 2>'" +
                                err.string() + "'";
        const int raw = std::system(cmd.c_str());
        Result r;
        r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
        r.out = slurp(out);
        r.err = slurp(err);
        return r;
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    fs::path dir_;
};

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_F(Cli, RouteDiamond) {
    auto r = run("route " + (kData / "fixtures/diamond.json").string());
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(first_line(r.out), "Hybrid, stages 3");
    EXPECT_NE(r.out.find("width: exact 2, approx 2"), std::string::npos);
    EXPECT_NE(r.out.find("elapsed:"), std::string::npos);
}

TEST_F(Cli, RouteChain) {
    auto r = run("route " + (kData / "fixtures/chain.json").string());
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(first_line(r.out), "Sequential");
}

TEST_F(Cli, RouteCyclicPrintsWitness) {
    auto r = run("route " + (kData / "fixtures/cyclic.json").string());
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("a -> b -> a"), std::string::npos) << r.err;
}

TEST_F(Cli, RouteWritesLogRecord) {
    auto r = run("route " + (kData / "fixtures/diamond.json").string() + " --log " + path("route.jsonl"));
    ASSERT_EQ(r.code, 0);
    auto rec = json::parse(first_line(slurp(path("route.jsonl"))));
    EXPECT_EQ(rec["kind"], "routing");
    EXPECT_EQ(rec["schema_version"], 1);
}

TEST_F(Cli, RouteMissingFile) {
    auto r = run("route " + path("absent.json"));
    EXPECT_EQ(r.code, 3);
}

TEST_F(Cli, Ratio) {
    EXPECT_EQ(run("ratio --omega 3.4 --gamma 0.35 --k 5 --eps 0.05").out, "48.672\n");
    EXPECT_EQ(run("ratio --omega 3 --gamma 0.4 --k 6 --eps 0.05").out, "24.000\n");
    EXPECT_EQ(run("ratio --omega 1 --gamma 0.4 --k 6 --eps 0.05").out, "0.000\n");
    auto d = run("ratio --omega 3 --gamma 0.4 --k 6 --eps 0");
    EXPECT_EQ(d.code, 0);
    EXPECT_EQ(d.out, "diverges\n");
    EXPECT_EQ(run("ratio --omega 3 --gamma 1.4 --k 6 --eps 0.05").code, 2);
    EXPECT_EQ(run("ratio --omega 3 --gamma 0.4 --k 0 --eps 0.05").code, 2);
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(run("no-such-command").code, 2);
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, ExecDiamondScriptedIsByteIdentical) {
    const std::string manifest = (kData / "fixtures/diamond_manifest.json").string();
    auto a = run("exec " + manifest + " --out " + path("one"));
    auto b = run("exec " + manifest + " --out " + path("two"));
    ASSERT_EQ(a.code, 0) << a.err;
    ASSERT_EQ(b.code, 0) << b.err;
    for (auto f : {"trace.json", "ledger.json", "report.json"})
        EXPECT_EQ(slurp(dir_ / "one" / f), slurp(dir_ / "two" / f)) << f;
    auto trace = json::parse(slurp(dir_ / "one/trace.json"));
    EXPECT_EQ(trace["rounds"][0]["execution"]["invocations"].size(), 4u);
    EXPECT_TRUE(trace.contains("synthesis"));
    auto report = json::parse(slurp(dir_ / "one/report.json"));
    EXPECT_EQ(report["topology"], "Hybrid");
    EXPECT_TRUE(fs::exists(dir_ / "one/run.jsonl"));
}

TEST_F(Cli, ExecSingleVertex) {
    auto r = run("exec --dag " + (kData / "fixtures/single.json").string() + " --out " + path("s"));
    ASSERT_EQ(r.code, 0) << r.err;
    auto report = json::parse(slurp(dir_ / "s/report.json"));
    // one execution call, then the merge of the lone output (consistency 1.0)
    EXPECT_EQ(report["agent_calls"], 2);
    EXPECT_EQ(report["iterations"], 1);
    EXPECT_EQ(report["tokens_by_phase"]["execute"], 20);
    EXPECT_FALSE(report["escalated"].get<bool>());
}

TEST_F(Cli, ExecInjectedFailureLeavesPartialArtifacts) {
    auto r = run("exec --dag " + (kData / "fixtures/diamond.json").string() + " --fail c --out " + path("f"));
    EXPECT_EQ(r.code, 4) << r.err;
    EXPECT_NE(r.err.find("execute"), std::string::npos) << r.err;
    EXPECT_TRUE(fs::exists(dir_ / "f/trace.json"));
    EXPECT_TRUE(fs::exists(dir_ / "f/ledger.json"));
    auto ledger = json::parse(slurp(dir_ / "f/ledger.json"));
    EXPECT_GE(ledger["entries"].size(), 1u);
}

TEST_F(Cli, ExecMockIsDeterministic) {
    const std::string base = "exec --dag " + (kData / "fixtures/wide.json").string() + " --pool-size 3 --seed 7 --out ";
    ASSERT_EQ(run(base + path("x")).code, 0);
    ASSERT_EQ(run(base + path("y")).code, 0);
    for (auto f : {"trace.json", "ledger.json", "report.json"}) EXPECT_EQ(slurp(dir_ / "x" / f), slurp(dir_ / "y" / f));
}

TEST_F(Cli, SimulateDiamond) {
    auto r = run("simulate --archetype diamond --trials 1000 --seed 42 --out " + path("sim"));
    ASSERT_EQ(r.code, 0) << r.err;
    auto summary = json::parse(slurp(dir_ / "sim/summary.json"));
    EXPECT_TRUE(summary["ratio_exceeds_bound"].get<bool>());
    EXPECT_GE(summary["ratio_of_means"].get<double>(), summary["mean_bound"].get<double>());
    ASSERT_EQ(run("simulate --archetype diamond --trials 1000 --seed 42 --out " + path("sim2")).code, 0);
    EXPECT_EQ(slurp(dir_ / "sim/simulation.csv"), slurp(dir_ / "sim2/simulation.csv"));
}

TEST_F(Cli, SimulateChain) {
    ASSERT_EQ(run("simulate --archetype chain --out " + path("c")).code, 0);
    auto summary = json::parse(slurp(dir_ / "c/summary.json"));
    EXPECT_LT(summary["mean_var_tau"].get<double>(), 1e-3);
}

TEST_F(Cli, CalibrateCorpus) {
    ASSERT_EQ(run("gen-corpus --count 500 --seed 42 --out " + path("corpus")).code, 0);
    auto r = run("calibrate " + path("corpus") + " --out " + path("cal"));
    ASSERT_EQ(r.code, 0) << r.err;
    auto split = json::parse(slurp(dir_ / "cal/split.json"));
    EXPECT_EQ(split["dev"].size(), 75u);
    EXPECT_EQ(split["test"].size(), 425u);
    auto csv = slurp(dir_ / "cal/calibration.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
    auto frozen = json::parse(slurp(dir_ / "cal/router.frozen.json"));
    EXPECT_TRUE(frozen["theta_gamma"].is_number());

    ASSERT_EQ(run("calibrate " + path("corpus") + " --grid 0.45 --out " + path("one")).code, 0);
    EXPECT_DOUBLE_EQ(json::parse(slurp(dir_ / "one/router.frozen.json"))["theta_gamma"].get<double>(), 0.45);
}

TEST_F(Cli, CalibrateEqualScoresFreezesDefault) {
    fs::create_directories(dir_ / "flat");
    ASSERT_EQ(run("gen-corpus --count 40 --noise 0 --out " + path("flat")).code, 0);
    for (auto& e : fs::directory_iterator(dir_ / "flat")) {
        auto doc = json::parse(slurp(e.path()));
        for (auto& [k, v] : doc["scores"].items()) v = 0.5;
        std::ofstream(e.path()) << doc.dump();
    }
    ASSERT_EQ(run("calibrate " + path("flat") + " --out " + path("cal")).code, 0);
    EXPECT_DOUBLE_EQ(json::parse(slurp(dir_ / "cal/router.frozen.json"))["theta_gamma"].get<double>(), 0.6);
}

TEST_F(Cli, CalibrateEmptyDirIsUsageError) {
    fs::create_directories(dir_ / "empty");
    EXPECT_EQ(run("calibrate " + path("empty")).code, 2);
}

TEST_F(Cli, BatchThenReport) {
    ASSERT_EQ(run("gen-corpus --count 100 --out " + path("corpus")).code, 0);
    ASSERT_EQ(run("batch " + path("corpus") + " --out " + path("logs")).code, 0);
    auto r = run("report " + path("logs") + " --out " + path("rep"));
    ASSERT_EQ(r.code, 0) << r.err;
    for (auto f : {"topology_distribution.csv", "confusion_matrix.csv", "iteration_histogram.csv"})
        EXPECT_TRUE(fs::exists(dir_ / "rep" / f)) << f;
    EXPECT_NE(r.out.find("Router\\Oracle"), std::string::npos);
}

TEST_F(Cli, ReportEmptyDirIsUsageError) {
    fs::create_directories(dir_ / "nothing");
    EXPECT_EQ(run("report " + path("nothing")).code, 2);
}

TEST_F(Cli, ReportAllSequentialHistogram) {
    for (int i = 0; i < 3; ++i)
        ASSERT_EQ(run("exec --dag " + (kData / "fixtures/chain.json").string() + " --seed " + std::to_string(i) +
                      " --out " + path("logs/r" + std::to_string(i)))
                      .code,
                  0);
    ASSERT_EQ(run("report " + path("logs") + " --out " + path("rep")).code, 0);
    auto hist = slurp(dir_ / "rep/iteration_histogram.csv");
    EXPECT_EQ(hist, "iterations,runs,percent,cumulative_percent\n1,3,100.00,100.00\n");
}
