#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mixcert/cli.hpp"
#include "oracles.hpp"

using namespace mixcert;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code = 0;
    std::string out, err;
    Json json() const { return Json::parse(out); }
};

Outcome run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "mixcert");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Outcome o;
    o.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("mixcert_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path(name)) << text;
        return path(name);
    }

    static std::string read(const std::string& p) {
        std::ifstream in(p);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }

    fs::path dir_;
};

const Json* find_claim(const Json& report, const std::string& id) {
    for (const auto& c : report["verdicts"])
        if (c["claim"] == id) return &c;
    return nullptr;
}

}  // namespace

TEST_F(CliTest, GenWritesEdgeList) {
    auto o = run_cli({"gen", "hypercube:D=3", "-o", path("q3.edges")});
    EXPECT_EQ(o.code, 0) << o.err;
    auto text = read(path("q3.edges"));
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 12);
    EXPECT_EQ(parse_edge_list(text), hypercube(3));

    auto s = run_cli({"gen", "random_regular:n=20,D=3,seed=4"});
    EXPECT_EQ(s.code, 0);
    EXPECT_EQ(parse_edge_list(s.out), random_regular(20, 3, 4));
}

TEST_F(CliTest, ProfileOnGeneratedFile) {
    ASSERT_EQ(run_cli({"gen", "hypercube:D=3", "-o", path("q3.edges")}).code, 0);
    auto o = run_cli({"profile", path("q3.edges"), "--tau", "auto", "--delta", "0.25"});
    EXPECT_EQ(o.code, 0) << o.err;
    auto j = o.json();
    EXPECT_EQ(j["schema_version"], kSchemaVersion);
    EXPECT_EQ(j["command"], "profile");
    EXPECT_EQ(j["input"]["file"], path("q3.edges"));
    EXPECT_EQ(j["result"]["records"].size(), 8u);
    // The cube is bipartite, so every vertex hits the cap.
    EXPECT_TRUE(j["result"]["any_capped"].get<bool>());
    EXPECT_EQ(j["parameters"]["tau_source"], "auto (capped at t_max)");
    EXPECT_TRUE(j.contains("wall_time_ms"));
}

TEST_F(CliTest, ProfileValuesAreExactRationals) {
    auto o = run_cli({"profile", "complete:n=5", "--tau", "1", "--delta", "1/4", "--backend", "exact", "--no-timing"});
    EXPECT_EQ(o.code, 0) << o.err;
    auto j = o.json();
    for (const auto& rec : j["result"]["records"]) {
        EXPECT_EQ(rec["tv_at_tau"], "1/5");
        EXPECT_EQ(rec["mixing_time"], 1);
    }
    EXPECT_EQ(j["result"]["well_mixing"]["size"], 5);
    EXPECT_FALSE(j.contains("wall_time_ms"));
}

TEST_F(CliTest, ProfileCsv) {
    auto o = run_cli({"profile", "complete:n=4", "--tau", "2", "--csv"});
    EXPECT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(o.out.substr(0, o.out.find('\n')).find("vertex"), 0u);
    EXPECT_EQ(std::count(o.out.begin(), o.out.end(), '\n'), 5);
}

TEST_F(CliTest, CertifyVerdicts) {
    ASSERT_EQ(run_cli({"gen", "hypercube:D=3", "-o", path("q3.edges")}).code, 0);
    auto ok = run_cli({"certify", path("q3.edges"), "--c", "1.0", "--range", "1:4", "--mode", "exact"});
    EXPECT_EQ(ok.code, 0) << ok.err;
    EXPECT_EQ(ok.json()["result"]["verdict"], "certified");

    auto bad = run_cli({"certify", "cycle:n=6", "--c", "1", "--range", "3:3", "--mode", "exact"});
    EXPECT_EQ(bad.code, 1);
    auto j = bad.json();
    EXPECT_EQ(j["result"]["verdict"], "violated");
    EXPECT_EQ(j["result"]["witness"]["boundary"], 2);
    ASSERT_TRUE(find_claim(j, "edge_expansion"));
    EXPECT_FALSE((*find_claim(j, "edge_expansion"))["holds"].get<bool>());
}

TEST_F(CliTest, ConductanceAndSandwich) {
    auto c = run_cli({"conductance", "complete:n=5", "--no-timing"});
    EXPECT_EQ(c.code, 0) << c.err;
    EXPECT_EQ(c.json()["result"]["value"], "5/4");

    auto s = run_cli({"sandwich", "complete:n=5", "--no-timing"});
    EXPECT_EQ(s.code, 0) << s.err;
    EXPECT_EQ(s.json()["result"]["mix"], 1);
    EXPECT_EQ(s.json()["verdicts"].size(), 2u);

    auto bip = run_cli({"sandwich", "cycle:n=4", "--no-timing"});
    EXPECT_EQ(bip.code, 0);
    EXPECT_FALSE(bip.json()["result"]["applicable"].get<bool>());
}

TEST_F(CliTest, SeparatorAndCycle) {
    auto s = run_cli({"separator", "complete:n=6", "--no-timing"});
    EXPECT_EQ(s.code, 0) << s.err;
    EXPECT_EQ(s.json()["result"]["size"], 2);
    EXPECT_EQ(s.json()["result"]["mode"], "exact");

    std::string petersen = write("petersen.edges", write_edge_list(oracle::petersen()));
    auto c = run_cli({"cycle", petersen, "--k", "4", "--ell", "4", "--mode", "exact", "--no-timing"});
    EXPECT_EQ(c.code, 0) << c.err;
    auto j = c.json();
    EXPECT_GE(j["result"]["length"].get<int>(), 5);
    EXPECT_TRUE(j["result"]["condition"]["holds"].get<bool>());

    auto e = run_cli({"cycle", "random_regular:n=20,D=3,seed=2", "--eps", "0.5", "--tau", "30", "--no-timing"});
    EXPECT_EQ(e.code, 0) << e.err;
    EXPECT_EQ(e.json()["result"]["trace"]["condition"], "verified");
}

TEST_F(CliTest, AmplifyReport) {
    auto o = run_cli({"amplify", "random_regular:n=20,D=4,seed=3", "--tau", "20", "--delta", "1/10", "--eps", "1/2",
                      "--M", "2", "--no-timing"});
    EXPECT_EQ(o.code, 0) << o.err;
    auto j = o.json();
    EXPECT_EQ(j["backend"], "exact");
    ASSERT_TRUE(find_claim(j, "claim_b0"));
    for (const auto& v : j["verdicts"]) EXPECT_TRUE(v["holds"].get<bool>()) << v.dump();
}

TEST_F(CliTest, HypothesisErrorExitsTwo) {
    auto o = run_cli({"extract", "cycle:n=40", "--eps", "0.5", "--delta", "1/30", "--tau", "6"});
    EXPECT_EQ(o.code, 2);
    EXPECT_NE(o.err.find("0 well-mixing vertices"), std::string::npos) << o.err;
    EXPECT_TRUE(o.out.empty());
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(run_cli({}).code, 2);
    EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
    EXPECT_EQ(run_cli({"profile"}).code, 2);
    EXPECT_EQ(run_cli({"profile", path("missing.edges")}).code, 2);
    EXPECT_EQ(run_cli({"profile", "moebius:n=4"}).code, 2);
    EXPECT_EQ(run_cli({"certify", "complete:n=5", "--c", "1"}).code, 2);
    EXPECT_EQ(run_cli({"certify", "complete:n=5", "--c", "1", "--range", "1-2"}).code, 2);
    EXPECT_EQ(run_cli({"profile", "complete:n=5", "--tau", "-3"}).code, 2);
    EXPECT_EQ(run_cli({"profile", "complete:n=5", "--backend", "quad"}).code, 2);
    auto bad_edges = write("bad.edges", "0 1\n1 1\n");
    auto o = run_cli({"profile", bad_edges});
    EXPECT_EQ(o.code, 2);
    EXPECT_NE(o.err.find("line 2"), std::string::npos) << o.err;
    EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST_F(CliTest, ConfigFiles) {
    auto empty = write("empty.cfg", "");
    auto base = run_cli({"profile", "complete:n=5", "--tau", "1", "--no-timing"});
    auto with_empty = run_cli({"profile", "complete:n=5", "--tau", "1", "--no-timing", "--config", empty});
    EXPECT_EQ(with_empty.json()["parameters"]["threshold"], "1/4");
    EXPECT_EQ(with_empty.code, 0);
    EXPECT_EQ(base.json()["result"], with_empty.json()["result"]);

    auto threshold = write("t.cfg", "# tighter\nthreshold=0.2\n");
    auto o = run_cli({"profile", "complete:n=5", "--tau", "1", "--config", threshold, "--backend", "exact",
                      "--no-timing"});
    EXPECT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(o.json()["parameters"]["threshold"], "1/5");
    // TV after one step is exactly 1/5, not below it.
    EXPECT_EQ(o.json()["result"]["records"][0]["mixing_time"], 2);

    auto flag_wins = run_cli({"profile", "complete:n=5", "--tau", "1", "--config", threshold, "--threshold", "1/4"});
    EXPECT_EQ(flag_wins.json()["parameters"]["threshold"], "1/4");

    auto backend = write("b.cfg", "backend=float\n");
    EXPECT_EQ(run_cli({"profile", "complete:n=5", "--tau", "1", "--config", backend}).json()["backend"], "float");

    auto unknown = write("u.cfg", "threshold=0.2\nwarp_speed=9\n");
    auto u = run_cli({"profile", "complete:n=5", "--config", unknown});
    EXPECT_EQ(u.code, 2);
    EXPECT_NE(u.err.find("warp_speed"), std::string::npos);
}

TEST_F(CliTest, ThreadsFromEnvironment) {
    ::setenv("MIXCERT_THREADS", "1", 1);
    auto o = run_cli({"conductance", "complete:n=6"});
    EXPECT_EQ(o.json()["threads"], 1);
    auto flag = run_cli({"conductance", "complete:n=6", "--threads", "2"});
    EXPECT_EQ(flag.json()["threads"], 2);
    ::unsetenv("MIXCERT_THREADS");
    set_thread_count(0);
}

TEST_F(CliTest, DeterministicReports) {
    const std::vector<std::string> args{"amplify", "merged_expanders:n=32,D=4,m=4,seed=1", "--tau", "6",
                                        "--delta", "1/4", "--eps", "1/3", "--M", "2", "--threads", "1", "--no-timing"};
    auto a = run_cli(args), b = run_cli(args);
    EXPECT_EQ(a.out, b.out);
    auto c = run_cli({"separator", "random_regular:n=40,D=3,seed=5", "--mode", "sweep", "--threads", "1",
                      "--no-timing", "-o", path("s1.json")});
    auto d = run_cli({"separator", "random_regular:n=40,D=3,seed=5", "--mode", "sweep", "--threads", "1",
                      "--no-timing", "-o", path("s2.json")});
    EXPECT_EQ(c.code, 0);
    EXPECT_TRUE(c.out.empty());
    EXPECT_EQ(read(path("s1.json")), read(path("s2.json")));
    set_thread_count(0);
}
