#pragma once

// The two measurement schedules, run exactly as scripted:
//
// Single particle, per serial:
//   prepare (unpolarized) -> Bob strong along bob_morning
//   -> Alice weak rows 1..9 along alpha, beta, gamma, alpha, ... (recorded)
//   -> Bob strong along bob_evening
//
// EPR pair, per serial:
//   singlet -> Alice weak rows 1..9 on Right, then rows 1..9 on Left
//   -> Bob strong on Right along bob_evening_right, then Left along
//      bob_evening_left
//
// Every weak reading is appended to a StoneLedger. The ledger is complete and
// handed to RunOptions::on_ledger_sealed before any evening choice is drawn or
// evening measurement made. Bob's strong outcomes leave the run only as coded
// lists whose key stays sealed until a decoding guess has been registered.

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "tsvsim/config_io.hpp"
#include "tsvsim/measurement.hpp"
#include "tsvsim/random_stream.hpp"
#include "tsvsim/spinalg.hpp"

namespace tsvsim {

inline constexpr int kWeakRows = 9;

enum class ExperimentKind { SingleParticle, EprPair };

/// Evening orientation chosen at run time from a seeded stream.
struct FreeChoice {
    std::vector<Orientation> candidates;
};

using EveningSetting = std::variant<Orientation, FreeChoice>;

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::SingleParticle;
    long long n_particles = 2;
    Orientation alpha = Orientation::from_degrees(0.0);
    Orientation beta = Orientation::from_degrees(60.0);
    Orientation gamma = Orientation::from_degrees(120.0);
    PointerConfig pointer{0.01, 1.0, 2};
    Orientation bob_morning = Orientation::from_degrees(0.0);
    EveningSetting bob_evening = Orientation::from_degrees(60.0);
    EveningSetting bob_evening_left = Orientation::from_degrees(0.0);
    EveningSetting bob_evening_right = Orientation::from_degrees(45.0);
    std::uint64_t seed = 1;

    /// Throws std::invalid_argument describing the first violated rule.
    void validate() const;

    /// [alpha, beta, gamma]
    std::array<Orientation, 3> weak_orientations() const { return {alpha, beta, gamma}; }

    /// Orientation of weak row 1..9.
    Orientation row_orientation(int row) const;

    /// Index 0/1/2 when `o` is alpha/beta/gamma.
    std::optional<int> orientation_index(Orientation o) const;
};

/// Builds a config whose pointer coupling g is `coupling_over_delta * delta`
/// for N = n_particles.
ExperimentConfig make_config(ExperimentKind kind, long long n_particles, double coupling_over_delta,
                             std::uint64_t seed, double delta = 1.0);

KeyValues to_key_values(const ExperimentConfig& cfg);
ExperimentConfig config_from_key_values(const KeyValues& kv, const std::string& source = "config");

std::vector<Orientation> default_free_candidates(const ExperimentConfig& cfg, Side side);
std::vector<Orientation> default_free_candidates_single(const ExperimentConfig& cfg);

// ------------------------------------------------------------------- ledger

enum class LedgerSide { Left, Right, Single };

constexpr char side_code(LedgerSide s) noexcept {
    return s == LedgerSide::Left ? 'L' : s == LedgerSide::Right ? 'R' : 'S';
}
std::optional<LedgerSide> side_from_code(char c) noexcept;
constexpr LedgerSide to_ledger_side(Side s) noexcept { return s == Side::Left ? LedgerSide::Left : LedgerSide::Right; }

struct LedgerEntry {
    long long serial = 0;
    LedgerSide side = LedgerSide::Single;
    int row = 1;
    Orientation orientation;
    double reading = 0.0;
    Binary binarized = Binary::Up;

    friend bool operator==(const LedgerEntry&, const LedgerEntry&) = default;
};

/// One row of readings for one side, in serial order.
struct LedgerRow {
    LedgerSide side = LedgerSide::Single;
    int row = 1;
    Orientation orientation;
    std::vector<long long> serials;
    std::vector<double> readings;
    std::vector<Binary> binarized;
};

/// Append-only record of every weak reading.
class StoneLedger {
  public:
    explicit StoneLedger(ExperimentConfig snapshot);

    /// Validates row range, serial and binarization consistency.
    void append(const LedgerEntry& entry);

    std::span<const LedgerEntry> entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    const ExperimentConfig& config() const noexcept { return config_; }

    std::vector<LedgerSide> sides() const;
    std::vector<long long> serials() const;
    LedgerRow row(LedgerSide side, int row_index) const;

    /// Exactly 9 entries per (serial, side), row r along the schedule's
    /// orientation. Throws std::invalid_argument otherwise.
    void validate_schedule() const;

  private:
    ExperimentConfig config_;
    std::vector<LedgerEntry> entries_;
};

// ------------------------------------------------------------- coded lists

enum class CodedValue { Above, Below };

struct CodedRecord {
    long long serial = 0;
    char coded_orientation = 'x';  // x, y, z, or w for an orientation outside {alpha, beta, gamma}
    CodedValue value = CodedValue::Above;

    friend bool operator==(const CodedRecord&, const CodedRecord&) = default;
};

/// Code letters for alpha, beta, gamma and the meaning of "above the line".
struct HiddenKey {
    std::array<char, 3> code_of{'x', 'y', 'z'};
    bool above_is_up = true;

    char code_for(int orientation_index) const { return code_of.at(static_cast<std::size_t>(orientation_index)); }
    std::optional<int> orientation_index_of(char code) const;
    Spin spin_of(CodedValue v) const;
    CodedValue value_of(Spin s) const;

    /// All 6 permutations x 2 sign conventions.
    static std::vector<HiddenKey> all();

    friend bool operator==(const HiddenKey&, const HiddenKey&) = default;
};

class ProtocolOrderError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// The coding key, readable only after a guess has been registered.
class SealedKey {
  public:
    explicit SealedKey(HiddenKey key) : key_(key) {}

    void register_guess(const HiddenKey& guess) { guess_ = guess; }
    bool has_guess() const noexcept { return guess_.has_value(); }
    bool is_unsealed() const noexcept { return unsealed_; }

    /// Throws ProtocolOrderError if no guess is registered.
    const HiddenKey& unseal();

    /// 1.0 when the registered guess equals the key, else 0.0. Requires unseal().
    double score() const;

    /// Obfuscated single-line form for storage next to the coded lists.
    std::string sealed_text() const;
    static SealedKey from_sealed_text(std::string_view text, const std::string& source = "key.sealed");

    /// Plain-text map written at unseal time.
    std::string plain_text() const;

  private:
    HiddenKey key_;
    std::optional<HiddenKey> guess_;
    bool unsealed_ = false;
};

struct CodedList {
    std::vector<CodedRecord> records;
    std::shared_ptr<SealedKey> key;
};

// -------------------------------------------------------------------- runs

struct RunOptions {
    unsigned threads = 1;
    std::function<void(const StoneLedger&)> on_ledger_sealed;
};

struct SingleParticleRun {
    StoneLedger ledger;
    CodedList morning;
    CodedList evening;
    std::shared_ptr<SealedKey> key;
    Orientation evening_orientation;
};

struct EprRun {
    StoneLedger ledger;
    CodedList right;
    CodedList left;
    std::shared_ptr<SealedKey> key;
    Orientation evening_right;
    Orientation evening_left;
};

SingleParticleRun run_single_particle(const ExperimentConfig& cfg, const RunOptions& options = {});
EprRun run_epr(const ExperimentConfig& cfg, const RunOptions& options = {});

/// Everything that happens to one serial before the evening.
struct MorningTrace {
    long long serial = 0;
    std::optional<StrongOutcome> bob_morning;  // single-particle only
    std::vector<LedgerEntry> entries;
    PureState state = PureState::basis(2, 0);
};

/// Re-simulates the pre-evening part of one serial from its derived streams.
MorningTrace simulate_morning(const ExperimentConfig& cfg, long long serial);

/// Evening strong measurements for one serial: one outcome for a single
/// particle, {right, left} for a pair.
std::vector<StrongOutcome> simulate_evening(const ExperimentConfig& cfg, long long serial, const PureState& state,
                                            Orientation first, std::optional<Orientation> second = std::nullopt);

/// Draws the evening orientation for `slot` (0 = single/right, 1 = left).
Orientation resolve_evening(const EveningSetting& setting, std::uint64_t seed, int slot);

/// Key for a run, drawn from the run's KeyGeneration stream.
HiddenKey generate_key(std::uint64_t seed);

CodedList code_outcomes(std::span<const StrongOutcome> outcomes, const ExperimentConfig& cfg,
                        const std::shared_ptr<SealedKey>& key, const HiddenKey& plain);

}  // namespace tsvsim
