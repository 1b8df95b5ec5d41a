// End-to-end checks of the tsvsim executable. TSVSIM_CLI is the binary path.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string output;
};

Result run(const std::string& args) {
    static int counter = 0;
    const fs::path log = fs::temp_directory_path() / ("tsvsim_cli_" + std::to_string(counter++) + ".log");
    const std::string cmd = std::string(TSVSIM_CLI) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    fs::remove(log);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string without_duration(std::string manifest) {
    const auto at = manifest.find("duration_s");
    if (at != std::string::npos) manifest.erase(at, manifest.find('\n', at) - at);
    return manifest;
}

class Cli : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("tsvsim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string out(const std::string& sub) const { return (dir_ / sub).string(); }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, VersionAndHelp) {
    EXPECT_EQ(run("--version").code, 0);
    EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, RunIsByteIdenticalExceptDuration) {
    const std::string args = "run-single --n 200 --lambda 3 --bob-evening-deg 60 --seed 5 --threads ";
    ASSERT_EQ(run(args + "1 --out " + out("a")).code, 0);
    ASSERT_EQ(run(args + "3 --out " + out("b")).code, 0);
    for (const char* f : {"ledger.csv", "coded_morning.csv", "coded_evening.csv", "key.sealed"}) {
        EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
    }
    EXPECT_EQ(without_duration(slurp(dir_ / "a/manifest.txt")), without_duration(slurp(dir_ / "b/manifest.txt")));
    EXPECT_FALSE(fs::exists(dir_ / "a/key.txt"));
}

TEST_F(Cli, OddNRejected) {
    const auto r = run("run-single --n 7 --out " + out("x"));
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.output.find("even"), std::string::npos) << r.output;
}

TEST_F(Cli, MissingOutRejected) {
    const auto r = run("run-single --n 8");
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.output.find("--out"), std::string::npos) << r.output;
}

TEST_F(Cli, FreeEveningChoiceReproducible) {
    ASSERT_EQ(run("run-epr --n 20 --bob-free --seed 9 --out " + out("a")).code, 0);
    ASSERT_EQ(run("run-epr --n 20 --bob-free --seed 9 --out " + out("b")).code, 0);
    EXPECT_EQ(without_duration(slurp(dir_ / "a/manifest.txt")), without_duration(slurp(dir_ / "b/manifest.txt")));
    EXPECT_EQ(slurp(dir_ / "a/coded_left.csv"), slurp(dir_ / "b/coded_left.csv"));
    EXPECT_NE(slurp(dir_ / "a/manifest.txt").find("evening_left_deg"), std::string::npos);
}

TEST_F(Cli, DecodeUnsealsAndScores) {
    ASSERT_EQ(run("run-single --n 4000 --lambda 19 --bob-evening-deg 60 --seed 3 --out " + out("r")).code, 0);
    const auto r = run("analyze --mode decode --ledger " + out("r/ledger.csv") + " --coded " +
                       out("r/coded_morning.csv") + " --coded " + out("r/coded_evening.csv"));
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_NE(r.output.find("score: 1.0"), std::string::npos) << r.output;
    EXPECT_TRUE(fs::exists(dir_ / "r/key.txt"));
    EXPECT_TRUE(fs::exists(dir_ / "r/report_decode.csv"));
}

TEST_F(Cli, MalformedLedgerNamesLine) {
    ASSERT_EQ(run("run-single --n 10 --out " + out("r")).code, 0);
    std::string text = slurp(dir_ / "r/ledger.csv");
    const auto at = text.find("\n1,S,2,");
    ASSERT_NE(at, std::string::npos);
    const std::size_t line = static_cast<std::size_t>(std::count(text.begin(), text.begin() + at + 1, '\n')) + 1;
    text.insert(at + 1, "1,S,2,garbage\n");
    std::ofstream(dir_ / "r/ledger.csv") << text;
    const auto r = run("analyze --mode correlate --ledger " + out("r/ledger.csv") + " --coded " +
                       out("r/coded_evening.csv"));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.output.find(std::to_string(line)), std::string::npos) << r.output;
}

TEST_F(Cli, AttackEnumeratesBinomialSlicings) {
    ASSERT_EQ(run("run-single --n 16 --lambda 0.04 --bob-evening-deg 120 --seed 2 --out " + out("r")).code, 0);
    const auto r = run("attack --ledger " + out("r/ledger.csv") + " --coded " + out("r/coded_evening.csv") +
                       " --row 9");
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_NE(r.output.find("12870"), std::string::npos) << r.output;
    EXPECT_TRUE(fs::exists(dir_ / "r/report_attack.csv"));
}

TEST_F(Cli, AttackRefusesLargeN) {
    ASSERT_EQ(run("run-single --n 100 --out " + out("r")).code, 0);
    const auto r = run("attack --ledger " + out("r/ledger.csv"));
    EXPECT_EQ(r.code, 3);
}

TEST_F(Cli, ChshFromFourRuns) {
    const char* settings[][2] = {{"0", "45"}, {"0", "135"}, {"90", "45"}, {"90", "135"}};
    std::string manifests;
    for (int i = 0; i < 4; ++i) {
        const std::string d = out("run" + std::to_string(i));
        ASSERT_EQ(run(std::string("run-epr --n 4000 --lambda 0.5 --bob-left-deg ") + settings[i][0] +
                      " --bob-right-deg " + settings[i][1] + " --seed " + std::to_string(40 + i) + " --out " + d)
                      .code,
                  0);
        manifests += " --manifest " + d + "/manifest.txt";
    }
    const auto r = run("analyze --mode chsh" + manifests + " --out " + out("chsh"));
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_TRUE(fs::exists(dir_ / "chsh/report_chsh.csv"));
    EXPECT_NE(r.output.find("S = 2."), std::string::npos) << r.output;
}
