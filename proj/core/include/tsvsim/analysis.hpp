#pragma once

// Slicing analysis over a finished ledger: partition a row of weak readings
// by a strong-outcome list, re-sum each half, decode the coded lists, and
// estimate correlations, CHSH and unknown orientations. The exhaustive
// prediction attack lives here too.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsvsim/protocol.hpp"

namespace tsvsim {

enum class LinePosition { Above, Below };

/// Above/below assignment for every serial, in serial order.
struct BinaryLine {
    std::vector<long long> serials;
    std::vector<LinePosition> positions;

    std::size_t size() const noexcept { return serials.size(); }

    /// +1 above, -1 below.
    std::vector<int> signs() const;
};

/// Above/below exactly as written on a coded list.
BinaryLine line_from_coded(const CodedList& list);

/// Above = Up.
BinaryLine line_from_spins(std::span<const long long> serials, std::span<const Spin> spins);

/// Coded list translated through a key: Above = Up on the returned line.
BinaryLine decoded_line(const CodedList& list, const HiddenKey& key);

struct SliceStats {
    std::size_t subset_size = 0;
    double sum = 0.0;
    double mean = 0.0;
    double z_score = 0.0;  // sum / (delta * sqrt(subset_size)); 0 for an empty half
};

SliceStats make_slice_stats(double sum, std::size_t size, double delta);

struct SliceResult {
    SliceStats above;
    SliceStats below;
};

/// Throws std::invalid_argument when the row and line serials differ.
SliceResult slice(const LedgerRow& row, const BinaryLine& line, double delta);

/// mean(reading * s) / g with s = +1 above, -1 below. For a weak row this
/// estimates the correlation between the row's observable and the line.
double sliced_correlation(const LedgerRow& row, const BinaryLine& line, double coupling);

/// Mean of per-serial sign products. Throws on empty or unequal input.
double correlation(std::span<const int> a, std::span<const int> b);
double correlation(std::span<const Binary> a, std::span<const Binary> b);

// ------------------------------------------------------------------ decode

/// A coded list together with the ledger side whose rows it slices.
struct CodedBinding {
    LedgerSide side;
    const CodedList* list;
};

inline constexpr double kDecodeThreshold = 5.0;

struct DecodeResult {
    HiddenKey guess;
    /// (best - second best) / sqrt(2 * rows used): the lead in null
    /// standard deviations. Second best ranges over hypotheses that the lists
    /// can tell apart from the guess; codes absent from every list stay
    /// undetermined.
    double confidence = 0.0;
    double best_score = 0.0;
    double second_score = 0.0;
    std::vector<std::pair<HiddenKey, double>> scores;

    bool decisive() const noexcept { return confidence >= kDecodeThreshold; }
};

/// Scores all 6 x 2 hypotheses: for each coded list and each row whose
/// orientation the hypothesis assigns to the list's code letter, add
/// sign * (z_above - z_below). Records coded 'w' do not constrain the
/// permutation. Returns the argmax.
DecodeResult decode(const StoneLedger& ledger, std::span<const CodedBinding> lists);

// -------------------------------------------------------------------- CHSH

struct ChshRun {
    BinaryLine left;
    BinaryLine right;
    Orientation left_angle;
    Orientation right_angle;
};

struct ChshResult {
    double s = 0.0;
    std::array<double, 4> correlations{};
    std::array<double, 4> standard_errors{};
    double standard_error = 0.0;
};

/// S = |E(a,b) - E(a,b') + E(a',b) + E(a',b')| from four runs given in the
/// order (a,b), (a,b'), (a',b), (a',b'), with a on the left and b on the
/// right. Throws std::invalid_argument on mismatched N or angle layout.
ChshResult chsh(std::span<const ChshRun> runs);

// ------------------------------------------------------ orientation fitting

struct OrientationInference {
    double angle_deg = 0.0;
    std::array<double, 3> correlations{};  // alpha, beta, gamma
    double correlation_error = 0.0;        // standard error of each correlation
    double residual = 0.0;
    bool degenerate = false;
    double half_width_deg = 180.0;  // approximate 3-sigma interval
};

/// Least-squares fit of the sliced correlations c_o against cos(theta_o - phi),
/// dense scan at 0.1 degree then Brent refinement.
OrientationInference infer_orientation(const StoneLedger& ledger, const BinaryLine& line, LedgerSide side);

// ---------------------------------------------------------- prediction attack

class EnumerationLimitError : public std::length_error {
  public:
    using std::length_error::length_error;
};

struct AttackReport {
    unsigned n = 0;
    std::uint64_t total_slicings = 0;
    std::vector<std::uint32_t> masks;  // bit i set: serial i+1 above
    std::vector<double> statistics;    // sum over rows of z_above - z_below
    double max_statistic = 0.0;  // also the largest |statistic|: complements negate it
    double shift = 0.0;  // statistic change for one reading moved by delta
    std::uint64_t ties_within_shift = 0;  // |statistic| within shift of the reference (truth, else max)
    std::optional<double> true_statistic;
    std::optional<std::uint64_t> true_rank;  // 1 + #{slicings with larger |statistic|}

    /// (rank - 0.5) / total, in (0, 1).
    std::optional<double> true_quantile() const;
};

/// Enumerates every balanced slicing of the given rows. Ranking uses
/// |statistic|, so it does not depend on which half is called above. Throws
/// EnumerationLimitError when N exceeds n_cap (at most 20).
AttackReport prediction_attack(std::span<const LedgerRow> rows, double delta,
                               const std::optional<BinaryLine>& truth = std::nullopt, unsigned n_cap = 20);

std::string attack_report_csv(const AttackReport& report);

}  // namespace tsvsim
