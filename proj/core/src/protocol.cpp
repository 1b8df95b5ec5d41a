#include "tsvsim/protocol.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <thread>

#include <fmt/format.h>

namespace tsvsim {

namespace {

// Runs fn(i) for i in [0, n) over `threads` workers in contiguous blocks.
// Callers write only to slot i, so the result is schedule-independent.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    threads = std::max(1u, threads);
    if (threads == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::size_t workers = std::min<std::size_t>(threads, n);
    std::size_t block = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                std::size_t lo = w * block;
                std::size_t hi = std::min(n, lo + block);
                for (std::size_t i = lo; i < hi; ++i) {
                    fn(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

std::string format_degrees(Orientation o) {
    return fmt::format("{:.12g}", o.degrees());
}

std::string format_setting(const EveningSetting& s) {
    if (const auto* o = std::get_if<Orientation>(&s)) {
        return format_degrees(*o);
    }
    const auto& free = std::get<FreeChoice>(s);
    std::string out = "free";
    if (!free.candidates.empty()) {
        out += ":";
        for (std::size_t i = 0; i < free.candidates.size(); ++i) {
            out += (i ? "/" : "") + format_degrees(free.candidates[i]);
        }
    }
    return out;
}

// "free" uses the defaults supplied by the caller; "free:a/b/c" lists candidates.
EveningSetting parse_setting(const std::string& text, const std::string& source, std::string_view what,
                             std::vector<Orientation> defaults) {
    auto t = trim(text);
    if (t.rfind("free", 0) == 0) {
        FreeChoice choice;
        auto rest = t.substr(4);
        if (rest.empty()) {
            choice.candidates = std::move(defaults);
        } else {
            if (rest.front() != ':') {
                throw ParseError(source, 0, fmt::format("invalid free choice for {}: '{}'", what, t));
            }
            rest.remove_prefix(1);
            while (!rest.empty()) {
                auto slash = rest.find('/');
                auto item = rest.substr(0, slash);
                choice.candidates.push_back(Orientation::from_degrees(parse_double(item, source, 0, what)));
                if (slash == std::string_view::npos) {
                    break;
                }
                rest.remove_prefix(slash + 1);
            }
        }
        return choice;
    }
    return Orientation::from_degrees(parse_double(t, source, 0, what));
}

constexpr std::array<std::array<char, 3>, 6> kPermutations{{
    {'x', 'y', 'z'},
    {'x', 'z', 'y'},
    {'y', 'x', 'z'},
    {'y', 'z', 'x'},
    {'z', 'x', 'y'},
    {'z', 'y', 'x'},
}};

// Fixed keystream for the sealed key file. Sealing is an access-order
// contract, not cryptography.
std::string keystream_xor(std::string_view text) {
    RandomStream ks(0x5EA1EDC0DEULL, 0, Stage::KeyGeneration);
    std::string out(text);
    for (char& c : out) {
        c = static_cast<char>(static_cast<unsigned char>(c) ^ static_cast<unsigned char>(ks() & 0xFF));
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------- config

void ExperimentConfig::validate() const {
    if (n_particles < 2 || n_particles % 2 != 0) {
        throw std::invalid_argument(fmt::format("n_particles must be even and >= 2, got {}", n_particles));
    }
    if (alpha.same_as(beta) || alpha.same_as(gamma) || beta.same_as(gamma)) {
        throw std::invalid_argument("alpha, beta and gamma must be pairwise distinct");
    }
    if (pointer.ensemble_size() != n_particles) {
        throw std::invalid_argument(fmt::format("pointer ensemble size {} differs from n_particles {}",
                                                pointer.ensemble_size(), n_particles));
    }
    auto check_free = [](const EveningSetting& s, const char* name) {
        if (const auto* f = std::get_if<FreeChoice>(&s); f && f->candidates.empty()) {
            throw std::invalid_argument(fmt::format("{}: free choice needs at least one candidate", name));
        }
    };
    check_free(bob_evening, "bob_evening");
    check_free(bob_evening_left, "bob_evening_left");
    check_free(bob_evening_right, "bob_evening_right");
}

Orientation ExperimentConfig::row_orientation(int row) const {
    if (row < 1 || row > kWeakRows) {
        throw std::out_of_range(fmt::format("weak row {} outside 1..{}", row, kWeakRows));
    }
    return weak_orientations()[static_cast<std::size_t>((row - 1) % 3)];
}

std::optional<int> ExperimentConfig::orientation_index(Orientation o) const {
    auto w = weak_orientations();
    for (int i = 0; i < 3; ++i) {
        if (w[static_cast<std::size_t>(i)].same_as(o, 1e-9)) {
            return i;
        }
    }
    return std::nullopt;
}

ExperimentConfig make_config(ExperimentKind kind, long long n_particles, double coupling_over_delta,
                             std::uint64_t seed, double delta) {
    ExperimentConfig cfg;
    cfg.kind = kind;
    cfg.n_particles = n_particles;
    cfg.pointer = PointerConfig::from_ratio(coupling_over_delta, delta, n_particles);
    cfg.seed = seed;
    return cfg;
}

std::vector<Orientation> default_free_candidates(const ExperimentConfig&, Side side) {
    if (side == Side::Left) {
        return {Orientation::from_degrees(0.0), Orientation::from_degrees(90.0)};
    }
    return {Orientation::from_degrees(45.0), Orientation::from_degrees(135.0)};
}

std::vector<Orientation> default_free_candidates_single(const ExperimentConfig& cfg) {
    auto w = cfg.weak_orientations();
    return {w.begin(), w.end()};
}

KeyValues to_key_values(const ExperimentConfig& cfg) {
    KeyValues kv;
    kv.set("experiment_kind", cfg.kind == ExperimentKind::SingleParticle ? "single" : "epr");
    kv.set("n_particles", std::to_string(cfg.n_particles));
    kv.set("alpha_deg", format_degrees(cfg.alpha));
    kv.set("beta_deg", format_degrees(cfg.beta));
    kv.set("gamma_deg", format_degrees(cfg.gamma));
    kv.set("lambda", format_double(cfg.pointer.lambda()));
    kv.set("delta", format_double(cfg.pointer.delta()));
    kv.set("coupling_exponent", format_double(cfg.pointer.coupling_exponent()));
    if (cfg.kind == ExperimentKind::SingleParticle) {
        kv.set("bob_morning_deg", format_degrees(cfg.bob_morning));
        kv.set("bob_evening_deg", format_setting(cfg.bob_evening));
    } else {
        kv.set("bob_evening_right_deg", format_setting(cfg.bob_evening_right));
        kv.set("bob_evening_left_deg", format_setting(cfg.bob_evening_left));
    }
    kv.set("seed", std::to_string(cfg.seed));
    return kv;
}

ExperimentConfig config_from_key_values(const KeyValues& kv, const std::string& source) {
    static const std::set<std::string> known{
        "experiment_kind", "n_particles",     "alpha_deg",       "beta_deg",
        "gamma_deg",       "lambda",          "delta",           "coupling_exponent",
        "bob_morning_deg", "bob_evening_deg", "bob_evening_left_deg", "bob_evening_right_deg",
        "seed"};
    for (const auto& [k, v] : kv.items()) {
        if (!known.count(k)) {
            throw ParseError(source, 0, fmt::format("unknown config key '{}'", k));
        }
    }

    ExperimentConfig cfg;
    if (auto kind = kv.get("experiment_kind")) {
        if (*kind == "single") {
            cfg.kind = ExperimentKind::SingleParticle;
        } else if (*kind == "epr") {
            cfg.kind = ExperimentKind::EprPair;
        } else {
            throw ParseError(source, 0, fmt::format("experiment_kind must be 'single' or 'epr', got '{}'", *kind));
        }
    }
    cfg.n_particles = parse_integer(kv.require("n_particles", source), source, 0, "n_particles");
    auto angle = [&](const char* key, Orientation fallback) {
        auto v = kv.get(key);
        return v ? Orientation::from_degrees(parse_double(*v, source, 0, key)) : fallback;
    };
    cfg.alpha = angle("alpha_deg", cfg.alpha);
    cfg.beta = angle("beta_deg", cfg.beta);
    cfg.gamma = angle("gamma_deg", cfg.gamma);
    cfg.bob_morning = angle("bob_morning_deg", cfg.alpha);

    double lambda = parse_double(kv.require("lambda", source), source, 0, "lambda");
    double delta = parse_double(kv.require("delta", source), source, 0, "delta");
    double exponent = 0.5;
    if (auto e = kv.get("coupling_exponent")) {
        exponent = parse_double(*e, source, 0, "coupling_exponent");
    }
    if (cfg.n_particles < 1) {
        throw ParseError(source, 0, "n_particles must be positive");
    }
    try {
        cfg.pointer = PointerConfig(lambda, delta, cfg.n_particles, exponent);
    } catch (const std::invalid_argument& e) {
        throw ParseError(source, 0, e.what());
    }

    if (auto v = kv.get("bob_evening_deg")) {
        cfg.bob_evening = parse_setting(*v, source, "bob_evening_deg", default_free_candidates_single(cfg));
    } else {
        cfg.bob_evening = cfg.beta;
    }
    if (auto v = kv.get("bob_evening_right_deg")) {
        cfg.bob_evening_right =
            parse_setting(*v, source, "bob_evening_right_deg", default_free_candidates(cfg, Side::Right));
    }
    if (auto v = kv.get("bob_evening_left_deg")) {
        cfg.bob_evening_left =
            parse_setting(*v, source, "bob_evening_left_deg", default_free_candidates(cfg, Side::Left));
    }
    if (auto s = kv.get("seed")) {
        long long seed = parse_integer(*s, source, 0, "seed");
        if (seed < 0) {
            throw ParseError(source, 0, "seed must be non-negative");
        }
        cfg.seed = static_cast<std::uint64_t>(seed);
    }
    return cfg;
}

// ---------------------------------------------------------------- ledger

std::optional<LedgerSide> side_from_code(char c) noexcept {
    switch (c) {
        case 'L': return LedgerSide::Left;
        case 'R': return LedgerSide::Right;
        case 'S': return LedgerSide::Single;
        default: return std::nullopt;
    }
}

StoneLedger::StoneLedger(ExperimentConfig snapshot) : config_(std::move(snapshot)) {}

void StoneLedger::append(const LedgerEntry& e) {
    if (e.serial < 1) {
        throw std::invalid_argument(fmt::format("ledger: serial must be >= 1, got {}", e.serial));
    }
    if (e.row < 1 || e.row > kWeakRows) {
        throw std::invalid_argument(fmt::format("ledger: row must be in 1..{}, got {}", kWeakRows, e.row));
    }
    if (e.binarized != binarize(e.reading)) {
        throw std::invalid_argument(fmt::format("ledger: binarized value inconsistent with reading {}", e.reading));
    }
    entries_.push_back(e);
}

std::vector<LedgerSide> StoneLedger::sides() const {
    std::vector<LedgerSide> out;
    for (const auto& e : entries_) {
        if (std::find(out.begin(), out.end(), e.side) == out.end()) {
            out.push_back(e.side);
        }
    }
    return out;
}

std::vector<long long> StoneLedger::serials() const {
    std::set<long long> s;
    for (const auto& e : entries_) {
        s.insert(e.serial);
    }
    return {s.begin(), s.end()};
}

LedgerRow StoneLedger::row(LedgerSide side, int row_index) const {
    LedgerRow r;
    r.side = side;
    r.row = row_index;
    r.orientation = config_.row_orientation(row_index);
    std::vector<const LedgerEntry*> picked;
    for (const auto& e : entries_) {
        if (e.side == side && e.row == row_index) {
            picked.push_back(&e);
        }
    }
    std::stable_sort(picked.begin(), picked.end(),
                     [](const LedgerEntry* a, const LedgerEntry* b) { return a->serial < b->serial; });
    r.serials.reserve(picked.size());
    r.readings.reserve(picked.size());
    r.binarized.reserve(picked.size());
    for (const auto* e : picked) {
        r.serials.push_back(e->serial);
        r.readings.push_back(e->reading);
        r.binarized.push_back(e->binarized);
    }
    return r;
}

void StoneLedger::validate_schedule() const {
    std::map<std::pair<long long, LedgerSide>, std::array<int, kWeakRows>> counts;
    for (const auto& e : entries_) {
        counts[{e.serial, e.side}][static_cast<std::size_t>(e.row - 1)]++;
        if (!e.orientation.same_as(config_.row_orientation(e.row), 1e-7)) {
            throw std::invalid_argument(fmt::format("ledger: serial {} side {} row {} has orientation {} deg",
                                                    e.serial, side_code(e.side), e.row, e.orientation.degrees()));
        }
    }
    for (const auto& [key, rows] : counts) {
        for (int r = 0; r < kWeakRows; ++r) {
            if (rows[static_cast<std::size_t>(r)] != 1) {
                throw std::invalid_argument(fmt::format("ledger: serial {} side {} has {} entries for row {}",
                                                        key.first, side_code(key.second),
                                                        rows[static_cast<std::size_t>(r)], r + 1));
            }
        }
    }
}

// ----------------------------------------------------------- coded lists

std::optional<int> HiddenKey::orientation_index_of(char code) const {
    for (int i = 0; i < 3; ++i) {
        if (code_of[static_cast<std::size_t>(i)] == code) {
            return i;
        }
    }
    return std::nullopt;
}

Spin HiddenKey::spin_of(CodedValue v) const {
    bool above = v == CodedValue::Above;
    return above == above_is_up ? Spin::Up : Spin::Down;
}

CodedValue HiddenKey::value_of(Spin s) const {
    bool up = s == Spin::Up;
    return up == above_is_up ? CodedValue::Above : CodedValue::Below;
}

std::vector<HiddenKey> HiddenKey::all() {
    std::vector<HiddenKey> out;
    for (const auto& perm : kPermutations) {
        for (bool up : {true, false}) {
            out.push_back(HiddenKey{perm, up});
        }
    }
    return out;
}

const HiddenKey& SealedKey::unseal() {
    if (!guess_) {
        throw ProtocolOrderError("unseal requested before a decoding guess was registered");
    }
    unsealed_ = true;
    return key_;
}

double SealedKey::score() const {
    if (!unsealed_) {
        throw ProtocolOrderError("score requested before the key was unsealed");
    }
    return *guess_ == key_ ? 1.0 : 0.0;
}

std::string SealedKey::sealed_text() const {
    std::string plain{key_.code_of[0], key_.code_of[1], key_.code_of[2], key_.above_is_up ? '+' : '-'};
    std::string masked = keystream_xor(plain);
    std::string hex;
    for (unsigned char c : masked) {
        hex += fmt::format("{:02x}", c);
    }
    return "sealed:" + hex;
}

SealedKey SealedKey::from_sealed_text(std::string_view text, const std::string& source) {
    auto t = trim(text);
    if (t.rfind("sealed:", 0) != 0 || t.size() != 7 + 8) {
        throw ParseError(source, 1, "not a sealed key");
    }
    std::string masked;
    for (std::size_t i = 7; i < t.size(); i += 2) {
        unsigned value = 0;
        auto [ptr, ec] = std::from_chars(t.data() + i, t.data() + i + 2, value, 16);
        if (ec != std::errc() || ptr != t.data() + i + 2) {
            throw ParseError(source, 1, "corrupt sealed key");
        }
        masked.push_back(static_cast<char>(value));
    }
    std::string plain = keystream_xor(masked);
    HiddenKey key{{plain[0], plain[1], plain[2]}, plain[3] == '+'};
    auto sorted = key.code_of;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != std::array<char, 3>{'x', 'y', 'z'} || (plain[3] != '+' && plain[3] != '-')) {
        throw ParseError(source, 1, "corrupt sealed key");
    }
    return SealedKey(key);
}

std::string SealedKey::plain_text() const {
    if (!unsealed_) {
        throw ProtocolOrderError("plain-text key requested before unseal");
    }
    return fmt::format("alpha = {}\nbeta = {}\ngamma = {}\nabove = {}\n", key_.code_of[0], key_.code_of[1],
                       key_.code_of[2], key_.above_is_up ? "up" : "down");
}

HiddenKey generate_key(std::uint64_t seed) {
    RandomStream rng(seed, 0, Stage::KeyGeneration);
    auto perm = kPermutations[static_cast<std::size_t>(rng.uniform() * 6.0)];
    bool above_is_up = rng.uniform() < 0.5;
    return HiddenKey{perm, above_is_up};
}

CodedList code_outcomes(std::span<const StrongOutcome> outcomes, const ExperimentConfig& cfg,
                        const std::shared_ptr<SealedKey>& key, const HiddenKey& plain) {
    CodedList list;
    list.key = key;
    list.records.reserve(outcomes.size());
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& o = outcomes[i];
        char letter = 'w';
        if (o.orientation) {
            if (auto idx = cfg.orientation_index(*o.orientation)) {
                letter = plain.code_for(*idx);
            }
        }
        list.records.push_back(CodedRecord{static_cast<long long>(i) + 1, letter, plain.value_of(o.sign)});
    }
    return list;
}

// ------------------------------------------------------------------ runs

Orientation resolve_evening(const EveningSetting& setting, std::uint64_t seed, int slot) {
    if (const auto* o = std::get_if<Orientation>(&setting)) {
        return *o;
    }
    const auto& free = std::get<FreeChoice>(setting);
    if (free.candidates.empty()) {
        throw std::invalid_argument("free choice without candidates");
    }
    RandomStream rng(seed, static_cast<std::uint64_t>(slot), Stage::FreeChoice);
    auto idx = static_cast<std::size_t>(rng.uniform() * static_cast<double>(free.candidates.size()));
    return free.candidates[std::min(idx, free.candidates.size() - 1)];
}

MorningTrace simulate_morning(const ExperimentConfig& cfg, long long serial) {
    MorningTrace trace;
    trace.serial = serial;
    const auto& pointer = cfg.pointer;
    RandomStream weak_rng(cfg.seed, static_cast<std::uint64_t>(serial), Stage::Weak);

    auto record = [&](LedgerSide side, int row, const WeakReading& r) {
        trace.entries.push_back(
            LedgerEntry{serial, side, row, cfg.row_orientation(row), r.value, r.binarized});
    };

    if (cfg.kind == ExperimentKind::SingleParticle) {
        RandomStream prep_rng(cfg.seed, static_cast<std::uint64_t>(serial), Stage::Preparation);
        PureState state = PureState::basis(2, prep_rng.uniform() < 0.5 ? 0 : 1);

        RandomStream morning_rng(cfg.seed, static_cast<std::uint64_t>(serial), Stage::Morning);
        auto morning = strong_measure(state, spin_operator(cfg.bob_morning), morning_rng);
        trace.bob_morning = morning.outcome;
        state = morning.state;

        for (int row = 1; row <= kWeakRows; ++row) {
            auto result = weak_measure(state, spin_operator(cfg.row_orientation(row)), pointer, weak_rng);
            record(LedgerSide::Single, row, result.reading);
            state = result.state;
        }
        trace.state = state;
        return trace;
    }

    PureState state = singlet_state();
    for (Side side : {Side::Right, Side::Left}) {
        for (int row = 1; row <= kWeakRows; ++row) {
            auto result = weak_measure_pair(state, spin_operator(cfg.row_orientation(row)), side, pointer, weak_rng);
            record(to_ledger_side(side), row, result.reading);
            state = result.state;
        }
    }
    trace.state = state;
    return trace;
}

std::vector<StrongOutcome> simulate_evening(const ExperimentConfig& cfg, long long serial, const PureState& state,
                                            Orientation first, std::optional<Orientation> second) {
    RandomStream rng(cfg.seed, static_cast<std::uint64_t>(serial), Stage::Evening);
    if (cfg.kind == ExperimentKind::SingleParticle) {
        auto r = strong_measure(state, spin_operator(first), rng);
        return {r.outcome};
    }
    if (!second) {
        throw std::invalid_argument("simulate_evening: a pair needs two orientations");
    }
    auto right = strong_measure(state, embed(spin_operator(first), Side::Right), rng);
    auto left = strong_measure(right.state, embed(spin_operator(*second), Side::Left), rng);
    return {right.outcome, left.outcome};
}

namespace {

struct Morning {
    StoneLedger ledger;
    std::vector<MorningTrace> traces;
};

Morning run_morning(const ExperimentConfig& cfg, const RunOptions& options) {
    cfg.validate();
    auto n = static_cast<std::size_t>(cfg.n_particles);
    std::vector<MorningTrace> traces(n);
    parallel_for(n, options.threads,
                 [&](std::size_t i) { traces[i] = simulate_morning(cfg, static_cast<long long>(i) + 1); });

    StoneLedger ledger(cfg);
    for (const auto& t : traces) {
        for (const auto& e : t.entries) {
            ledger.append(e);
        }
    }
    if (options.on_ledger_sealed) {
        options.on_ledger_sealed(ledger);
    }
    return Morning{std::move(ledger), std::move(traces)};
}

}  // namespace

SingleParticleRun run_single_particle(const ExperimentConfig& cfg, const RunOptions& options) {
    if (cfg.kind != ExperimentKind::SingleParticle) {
        throw std::invalid_argument("run_single_particle: config is not a single-particle experiment");
    }
    Morning m = run_morning(cfg, options);

    // Drawn only after the ledger is complete; the choice stream never sees it.
    Orientation evening = resolve_evening(cfg.bob_evening, cfg.seed, 0);

    auto n = m.traces.size();
    std::vector<StrongOutcome> morning_outcomes(n);
    std::vector<StrongOutcome> evening_outcomes(n);
    parallel_for(n, options.threads, [&](std::size_t i) {
        const auto& t = m.traces[i];
        morning_outcomes[i] = *t.bob_morning;
        evening_outcomes[i] = simulate_evening(cfg, t.serial, t.state, evening).front();
    });

    HiddenKey plain = generate_key(cfg.seed);
    auto key = std::make_shared<SealedKey>(plain);
    return SingleParticleRun{std::move(m.ledger), code_outcomes(morning_outcomes, cfg, key, plain),
                             code_outcomes(evening_outcomes, cfg, key, plain), key, evening};
}

EprRun run_epr(const ExperimentConfig& cfg, const RunOptions& options) {
    if (cfg.kind != ExperimentKind::EprPair) {
        throw std::invalid_argument("run_epr: config is not an EPR experiment");
    }
    Morning m = run_morning(cfg, options);

    Orientation right_angle = resolve_evening(cfg.bob_evening_right, cfg.seed, 0);
    Orientation left_angle = resolve_evening(cfg.bob_evening_left, cfg.seed, 1);

    auto n = m.traces.size();
    std::vector<StrongOutcome> right(n);
    std::vector<StrongOutcome> left(n);
    parallel_for(n, options.threads, [&](std::size_t i) {
        const auto& t = m.traces[i];
        auto out = simulate_evening(cfg, t.serial, t.state, right_angle, left_angle);
        right[i] = out[0];
        left[i] = out[1];
    });

    HiddenKey plain = generate_key(cfg.seed);
    auto key = std::make_shared<SealedKey>(plain);
    return EprRun{std::move(m.ledger), code_outcomes(right, cfg, key, plain), code_outcomes(left, cfg, key, plain),
                  key, right_angle, left_angle};
}

}  // namespace tsvsim
