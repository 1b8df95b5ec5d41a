#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include <tsvsim/ledger_io.hpp>

using namespace tsvsim;

namespace {

SingleParticleRun small_run() {
    auto cfg = make_config(ExperimentKind::SingleParticle, 12, 0.4, 21);
    return run_single_particle(cfg);
}

std::string replace_line(const std::string& text, std::size_t line_number, const std::string& line) {
    std::istringstream in(text);
    std::string out, l;
    for (std::size_t n = 1; std::getline(in, l); ++n) out += (n == line_number ? line : l) + "\n";
    return out;
}

std::size_t header_line(const std::string& text, std::string_view header) {
    std::istringstream in(text);
    std::string l;
    for (std::size_t n = 1; std::getline(in, l); ++n) {
        if (l == header) return n;
    }
    return 0;
}

}  // namespace

TEST(LedgerCsv, RoundTripsExactly) {
    const auto run = small_run();
    const std::string text = ledger_csv(run.ledger);
    std::istringstream in(text);
    const StoneLedger back = read_ledger_csv(in, "mem");
    ASSERT_EQ(back.size(), run.ledger.size());
    for (std::size_t i = 0; i < back.size(); ++i) EXPECT_EQ(back.entries()[i], run.ledger.entries()[i]);
    EXPECT_EQ(ledger_csv(back), text);
    EXPECT_EQ(back.config().seed, 21u);
}

TEST(LedgerCsv, MalformedLineIsNamed) {
    const std::string text = ledger_csv(small_run().ledger);
    const std::size_t bad = header_line(text, kLedgerHeader) + 3;
    const std::string broken = replace_line(text, bad, "3,S,1,0,notanumber,U");
    std::istringstream in(broken);
    try {
        read_ledger_csv(in, "ledger.csv");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), bad);
        EXPECT_NE(std::string(e.what()).find("notanumber"), std::string::npos);
    }
}

TEST(LedgerCsv, RejectsWrongFieldCountAndSide) {
    const std::string text = ledger_csv(small_run().ledger);
    const std::size_t row = header_line(text, kLedgerHeader) + 1;
    for (const std::string bad : {"1,S,1,0,0.5", "1,Q,1,0,0.5,U", "1,S,1,0,0.5,X", "1,S,1,0,0.5,D"}) {
        std::istringstream in(replace_line(text, row, bad));
        EXPECT_THROW(read_ledger_csv(in, "t"), ParseError) << bad;
    }
}

TEST(LedgerCsv, MissingHeaderRejected) {
    std::istringstream in("# seed = 1\n1,S,1,0,0.5,U\n");
    EXPECT_THROW(read_ledger_csv(in, "t"), ParseError);
}

TEST(CodedCsv, RoundTrips) {
    const auto run = small_run();
    std::istringstream in(coded_csv(run.morning));
    const auto back = read_coded_csv(in, "mem");
    EXPECT_EQ(back.records, run.morning.records);
    EXPECT_EQ(back.key, nullptr);
}

TEST(CodedCsv, RejectsUnknownCodes) {
    std::istringstream bad_letter(std::string(kCodedHeader) + "\n1,q,above\n");
    EXPECT_THROW(read_coded_csv(bad_letter, "t"), ParseError);
    std::istringstream bad_value(std::string(kCodedHeader) + "\n1,x,sideways\n");
    try {
        read_coded_csv(bad_value, "t");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(Files, AtomicWriteReplacesContent) {
    const auto dir = std::filesystem::temp_directory_path() / "tsvsim_io_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "f.txt";
    write_file_atomic(path, "one");
    write_file_atomic(path, "two");
    EXPECT_EQ(read_file(path), "two");
    EXPECT_FALSE(std::filesystem::exists(dir / "f.txt.tmp"));
    EXPECT_THROW(read_ledger_file(dir / "missing.csv"), ParseError);
    std::filesystem::remove_all(dir);
}
