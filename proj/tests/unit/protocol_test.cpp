#include <algorithm>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include <tsvsim/analysis.hpp>
#include <tsvsim/ledger_io.hpp>
#include <tsvsim/protocol.hpp>

using namespace tsvsim;

namespace {

ExperimentConfig single(long long n, double r, std::uint64_t seed) {
    auto cfg = make_config(ExperimentKind::SingleParticle, n, r, seed);
    cfg.bob_morning = cfg.alpha;
    return cfg;
}

RunOptions threads(unsigned t) {
    RunOptions o;
    o.threads = t;
    return o;
}

// Readings only; the metadata header records the evening setting.
bool same_entries(const StoneLedger& a, const StoneLedger& b) {
    return std::equal(a.entries().begin(), a.entries().end(), b.entries().begin(), b.entries().end());
}

}  // namespace

TEST(Config, Validation) {
    auto cfg = single(10, 0.1, 1);
    EXPECT_NO_THROW(cfg.validate());
    auto odd = single(11, 0.1, 1);
    EXPECT_THROW(odd.validate(), std::invalid_argument);
    auto same = cfg;
    same.gamma = same.alpha;
    EXPECT_THROW(same.validate(), std::invalid_argument);
    auto empty_free = cfg;
    empty_free.bob_evening = FreeChoice{};
    EXPECT_THROW(empty_free.validate(), std::invalid_argument);
}

TEST(Config, RowScheduleCyclesAlphaBetaGamma) {
    const auto cfg = single(2, 0.1, 1);
    for (int r = 1; r <= kWeakRows; ++r) {
        EXPECT_EQ(cfg.row_orientation(r), cfg.weak_orientations()[static_cast<std::size_t>((r - 1) % 3)]);
    }
    EXPECT_THROW(cfg.row_orientation(0), std::out_of_range);
    EXPECT_THROW(cfg.row_orientation(10), std::out_of_range);
}

TEST(Config, KeyValueRoundTrip) {
    auto cfg = make_config(ExperimentKind::EprPair, 64, 0.05, 99);
    cfg.bob_evening_left = FreeChoice{default_free_candidates(cfg, Side::Left)};
    const auto kv = to_key_values(cfg);
    const auto back = config_from_key_values(kv);
    EXPECT_EQ(to_key_values(back).items(), kv.items());
    EXPECT_NEAR(back.pointer.coupling(), cfg.pointer.coupling(), 1e-15);
    EXPECT_TRUE(std::holds_alternative<FreeChoice>(back.bob_evening_left));
}

TEST(Config, UnknownKeyRejected) {
    KeyValues kv = to_key_values(single(4, 0.1, 1));
    kv.set("colour", "blue");
    EXPECT_THROW(config_from_key_values(kv), ParseError);
}

TEST(Ledger, AppendRejectsInconsistentEntries) {
    StoneLedger ledger(single(2, 0.1, 1));
    EXPECT_THROW(ledger.append({0, LedgerSide::Single, 1, Orientation(), 0.5, Binary::Up}), std::invalid_argument);
    EXPECT_THROW(ledger.append({1, LedgerSide::Single, 10, Orientation(), 0.5, Binary::Up}), std::invalid_argument);
    EXPECT_THROW(ledger.append({1, LedgerSide::Single, 1, Orientation(), 0.5, Binary::Down}), std::invalid_argument);
    EXPECT_NO_THROW(ledger.append({1, LedgerSide::Single, 1, Orientation(), -0.5, Binary::Down}));
}

TEST(Run, SingleParticleLedgerHasNineRowsPerSerial) {
    const auto run = run_single_particle(single(50, 0.1, 3));
    EXPECT_EQ(run.ledger.size(), 9u * 50u);
    EXPECT_NO_THROW(run.ledger.validate_schedule());
    EXPECT_EQ(run.morning.records.size(), 50u);
    EXPECT_EQ(run.evening.records.size(), 50u);
}

TEST(Run, EprLedgerHasEighteenEntriesPerPair) {
    const auto run = run_epr(make_config(ExperimentKind::EprPair, 40, 0.1, 3));
    EXPECT_EQ(run.ledger.size(), 18u * 40u);
    EXPECT_NO_THROW(run.ledger.validate_schedule());
    const auto sides = run.ledger.sides();
    EXPECT_EQ(std::set<LedgerSide>(sides.begin(), sides.end()),
              (std::set<LedgerSide>{LedgerSide::Left, LedgerSide::Right}));
}

TEST(Run, RejectsWrongKind) {
    EXPECT_THROW(run_epr(single(4, 0.1, 1)), std::invalid_argument);
    EXPECT_THROW(run_single_particle(make_config(ExperimentKind::EprPair, 4, 0.1, 1)), std::invalid_argument);
}

TEST(Run, StrongLimitRepeatsMorningOutcome) {
    // Zero coupling: the weak rows do nothing, so evening along the morning
    // axis repeats the morning outcome on every serial.
    auto cfg = single(200, 0.0, 5);
    cfg.bob_evening = cfg.bob_morning;
    const auto run = run_single_particle(cfg);
    EXPECT_EQ(run.morning.records, run.evening.records);
}

TEST(Run, StrongLimitEprAntiCorrelated) {
    auto cfg = make_config(ExperimentKind::EprPair, 200, 0.0, 5);
    cfg.bob_evening_left = Orientation::from_degrees(30.0);
    cfg.bob_evening_right = Orientation::from_degrees(30.0);
    const auto run = run_epr(cfg);
    const HiddenKey k = generate_key(cfg.seed);
    const auto l = decoded_line(run.left, k).signs();
    const auto r = decoded_line(run.right, k).signs();
    EXPECT_DOUBLE_EQ(correlation(l, r), -1.0);
}

TEST(Run, ReplayReproducesLedgerEntries) {
    const auto cfg = single(20, 0.3, 8);
    const auto run = run_single_particle(cfg);
    const auto entries = run.ledger.entries();
    for (long long serial : {1LL, 7LL, 20LL}) {
        const auto trace = simulate_morning(cfg, serial);
        std::vector<LedgerEntry> recorded;
        std::copy_if(entries.begin(), entries.end(), std::back_inserter(recorded),
                     [&](const LedgerEntry& e) { return e.serial == serial; });
        EXPECT_EQ(trace.entries, recorded) << "serial " << serial;
    }
}

TEST(Run, LedgerIndependentOfThreadCount) {
    const auto cfg = single(300, 0.2, 9);
    const auto a = ledger_csv(run_single_particle(cfg, threads(1)).ledger);
    const auto b = ledger_csv(run_single_particle(cfg, threads(3)).ledger);
    EXPECT_EQ(a, b);
}

TEST(Run, LedgerDoesNotDependOnEveningChoice) {
    // No signalling from the evening into the recorded past.
    auto a = single(100, 0.3, 12);
    auto b = a;
    a.bob_evening = Orientation::from_degrees(0.0);
    b.bob_evening = Orientation::from_degrees(77.0);
    EXPECT_TRUE(same_entries(run_single_particle(a).ledger, run_single_particle(b).ledger));

    auto c = make_config(ExperimentKind::EprPair, 100, 0.3, 12);
    auto d = c;
    d.bob_evening_right = Orientation::from_degrees(135.0);
    d.bob_evening_left = Orientation::from_degrees(90.0);
    EXPECT_TRUE(same_entries(run_epr(c).ledger, run_epr(d).ledger));
}

TEST(Run, LedgerSealedBeforeEvening) {
    std::size_t seen = 0;
    RunOptions o;
    o.on_ledger_sealed = [&](const StoneLedger& l) { seen = l.size(); };
    const auto run = run_single_particle(single(30, 0.1, 2), o);
    EXPECT_EQ(seen, run.ledger.size());
}

TEST(Run, FreeEveningChoiceIsSeededAndAmongCandidates) {
    auto cfg = single(10, 0.1, 4);
    cfg.bob_evening = FreeChoice{default_free_candidates_single(cfg)};
    const auto a = run_single_particle(cfg);
    const auto b = run_single_particle(cfg);
    EXPECT_EQ(a.evening_orientation, b.evening_orientation);
    EXPECT_TRUE(cfg.orientation_index(a.evening_orientation).has_value());

    std::set<double> drawn;
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        drawn.insert(resolve_evening(FreeChoice{default_free_candidates(cfg, Side::Right)}, seed, 0).degrees());
    }
    EXPECT_EQ(drawn.size(), 2u);
}

TEST(Coding, LettersFollowKeyAndOutsideAxisIsW) {
    auto cfg = single(20, 0.1, 6);
    cfg.bob_evening = Orientation::from_degrees(25.0);
    const auto run = run_single_particle(cfg);
    const HiddenKey k = generate_key(cfg.seed);
    for (const auto& rec : run.morning.records) EXPECT_EQ(rec.coded_orientation, k.code_for(0));
    for (const auto& rec : run.evening.records) EXPECT_EQ(rec.coded_orientation, 'w');
}

TEST(HiddenKey, AllTwelveDistinct) {
    const auto all = HiddenKey::all();
    ASSERT_EQ(all.size(), 12u);
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = i + 1; j < all.size(); ++j) EXPECT_FALSE(all[i] == all[j]);
    }
    for (const auto& k : all) {
        for (Spin s : {Spin::Up, Spin::Down}) EXPECT_EQ(k.spin_of(k.value_of(s)), s);
        for (int i = 0; i < 3; ++i) EXPECT_EQ(k.orientation_index_of(k.code_for(i)), i);
    }
}

TEST(SealedKey, UnsealRequiresRegisteredGuess) {
    const HiddenKey truth{{'z', 'x', 'y'}, false};
    SealedKey key(truth);
    EXPECT_THROW(key.unseal(), ProtocolOrderError);
    EXPECT_THROW(key.plain_text(), ProtocolOrderError);
    EXPECT_THROW(key.score(), ProtocolOrderError);
    key.register_guess(HiddenKey{{'x', 'y', 'z'}, true});
    EXPECT_THROW(key.score(), ProtocolOrderError);
    EXPECT_EQ(key.unseal(), truth);
    EXPECT_DOUBLE_EQ(key.score(), 0.0);

    SealedKey right(truth);
    right.register_guess(truth);
    right.unseal();
    EXPECT_DOUBLE_EQ(right.score(), 1.0);
}

TEST(SealedKey, SealedTextRoundTripsAndHidesKey) {
    for (const auto& k : HiddenKey::all()) {
        SealedKey key(k);
        const auto text = key.sealed_text();
        SealedKey back = SealedKey::from_sealed_text(text);
        EXPECT_FALSE(back.is_unsealed());
        back.register_guess(k);
        EXPECT_EQ(back.unseal(), k);
        EXPECT_EQ(text.find("above"), std::string::npos);
    }
    EXPECT_THROW(SealedKey::from_sealed_text("garbage"), ParseError);
}
