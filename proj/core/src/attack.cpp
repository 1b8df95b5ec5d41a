#include <algorithm>
#include <bit>
#include <cmath>

#include <fmt/format.h>

#include "tsvsim/analysis.hpp"
#include "tsvsim/stats.hpp"

namespace tsvsim {

namespace {

constexpr unsigned kHardCap = 20;

// Sum over rows of z_above - z_below for an arbitrary assignment.
double line_statistic(std::span<const LedgerRow> rows, std::span<const LinePosition> positions, double delta) {
    double stat = 0.0;
    for (const auto& row : rows) {
        double above = 0.0, below = 0.0;
        std::size_t na = 0;
        for (std::size_t i = 0; i < row.readings.size(); ++i) {
            if (positions[i] == LinePosition::Above) {
                above += row.readings[i];
                ++na;
            } else {
                below += row.readings[i];
            }
        }
        stat += make_slice_stats(above, na, delta).z_score -
                make_slice_stats(below, row.readings.size() - na, delta).z_score;
    }
    return stat;
}

}  // namespace

std::optional<double> AttackReport::true_quantile() const {
    if (!true_rank || total_slicings == 0) {
        return std::nullopt;
    }
    return (static_cast<double>(*true_rank) - 0.5) / static_cast<double>(total_slicings);
}

AttackReport prediction_attack(std::span<const LedgerRow> rows, double delta, const std::optional<BinaryLine>& truth,
                               unsigned n_cap) {
    if (rows.empty()) {
        throw std::invalid_argument("prediction_attack: no rows");
    }
    if (!(delta > 0.0)) {
        throw std::invalid_argument("prediction_attack: delta must be positive");
    }
    const auto& serials = rows.front().serials;
    const std::size_t n = serials.size();
    const unsigned cap = std::min(n_cap, kHardCap);
    if (n > cap) {
        throw EnumerationLimitError(
            fmt::format("prediction_attack: N = {} exceeds the enumeration cap of {}", n, cap));
    }
    if (n < 2 || n % 2 != 0) {
        throw std::invalid_argument(fmt::format("prediction_attack: N must be even and >= 2, got {}", n));
    }
    for (const auto& row : rows) {
        if (!std::equal(row.serials.begin(), row.serials.end(), serials.begin(), serials.end())) {
            throw std::invalid_argument("prediction_attack: rows cover different serials");
        }
    }

    // Balanced halves share the same size, so the statistic reduces to
    // (sum_A T_i - sum_B T_i) / (delta * sqrt(N/2)) with T_i the per-serial
    // total over rows.
    std::vector<double> total(n, 0.0);
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < n; ++i) {
            total[i] += row.readings[i];
        }
    }
    double grand = 0.0;
    for (double t : total) grand += t;
    const unsigned half = static_cast<unsigned>(n / 2);
    const double scale = 1.0 / (delta * std::sqrt(static_cast<double>(half)));

    AttackReport report;
    report.n = static_cast<unsigned>(n);
    report.total_slicings = stats::binomial(report.n, half);
    report.masks.reserve(report.total_slicings);
    report.statistics.reserve(report.total_slicings);
    report.shift = 1.0 / std::sqrt(static_cast<double>(half));

    const std::uint32_t limit = std::uint32_t{1} << n;
    for (std::uint32_t m = (std::uint32_t{1} << half) - 1; m < limit;) {
        double above = 0.0;
        for (std::uint32_t bits = m; bits != 0; bits &= bits - 1) {
            above += total[static_cast<std::size_t>(std::countr_zero(bits))];
        }
        report.masks.push_back(m);
        report.statistics.push_back((2.0 * above - grand) * scale);
        // Gosper's hack: next integer with the same popcount.
        const std::uint32_t c = m & (~m + 1);
        const std::uint32_t r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
    report.max_statistic = *std::max_element(report.statistics.begin(), report.statistics.end());

    double reference = report.max_statistic;
    if (truth) {
        if (!std::equal(truth->serials.begin(), truth->serials.end(), serials.begin(), serials.end())) {
            throw std::invalid_argument("prediction_attack: true line covers different serials");
        }
        report.true_statistic = line_statistic(rows, truth->positions, delta);
        reference = std::abs(*report.true_statistic);
        // A balanced true line is itself a candidate; the two summation
        // orders may differ in the last bits.
        const double above = reference + 1e-9 * std::max(1.0, reference);
        report.true_rank = 1 + static_cast<std::uint64_t>(std::count_if(
                                   report.statistics.begin(), report.statistics.end(),
                                   [&](double s) { return std::abs(s) > above; }));
    }
    report.ties_within_shift = static_cast<std::uint64_t>(
        std::count_if(report.statistics.begin(), report.statistics.end(),
                      [&](double s) { return std::abs(std::abs(s) - reference) <= report.shift; }));
    return report;
}

std::string attack_report_csv(const AttackReport& report) {
    std::string out;
    out += fmt::format("# n = {}\n# total_slicings = {}\n# max_statistic = {}\n# shift = {}\n# ties_within_shift = {}\n",
                       report.n, report.total_slicings, report.max_statistic, report.shift, report.ties_within_shift);
    if (report.true_statistic) {
        out += fmt::format("# true_statistic = {}\n# true_rank = {}\n", *report.true_statistic, *report.true_rank);
    }
    out += "mask,above_serials,statistic\n";
    for (std::size_t k = 0; k < report.masks.size(); ++k) {
        std::string members;
        for (std::uint32_t bits = report.masks[k]; bits != 0; bits &= bits - 1) {
            if (!members.empty()) members += ' ';
            members += std::to_string(std::countr_zero(bits) + 1);
        }
        out += fmt::format("{},{},{}\n", report.masks[k], members, report.statistics[k]);
    }
    return out;
}

}  // namespace tsvsim
