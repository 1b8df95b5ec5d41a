#include "tsvsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

namespace tsvsim {

namespace {

void require_same_serials(std::span<const long long> a, std::span<const long long> b, const char* what) {
    if (!std::equal(a.begin(), a.end(), b.begin(), b.end())) {
        throw std::invalid_argument(fmt::format("{}: serial sets differ", what));
    }
}

int sign_of(LinePosition p) noexcept { return p == LinePosition::Above ? 1 : -1; }

}  // namespace

std::vector<int> BinaryLine::signs() const {
    std::vector<int> out(positions.size());
    std::transform(positions.begin(), positions.end(), out.begin(), sign_of);
    return out;
}

BinaryLine line_from_coded(const CodedList& list) {
    BinaryLine line;
    line.serials.reserve(list.records.size());
    line.positions.reserve(list.records.size());
    for (const auto& r : list.records) {
        line.serials.push_back(r.serial);
        line.positions.push_back(r.value == CodedValue::Above ? LinePosition::Above : LinePosition::Below);
    }
    return line;
}

BinaryLine line_from_spins(std::span<const long long> serials, std::span<const Spin> spins) {
    if (serials.size() != spins.size()) {
        throw std::invalid_argument("line_from_spins: size mismatch");
    }
    BinaryLine line;
    line.serials.assign(serials.begin(), serials.end());
    line.positions.reserve(spins.size());
    for (Spin s : spins) {
        line.positions.push_back(s == Spin::Up ? LinePosition::Above : LinePosition::Below);
    }
    return line;
}

BinaryLine decoded_line(const CodedList& list, const HiddenKey& key) {
    BinaryLine line;
    line.serials.reserve(list.records.size());
    line.positions.reserve(list.records.size());
    for (const auto& r : list.records) {
        line.serials.push_back(r.serial);
        line.positions.push_back(key.spin_of(r.value) == Spin::Up ? LinePosition::Above : LinePosition::Below);
    }
    return line;
}

SliceStats make_slice_stats(double sum, std::size_t size, double delta) {
    SliceStats s;
    s.subset_size = size;
    s.sum = sum;
    if (size > 0) {
        s.mean = sum / static_cast<double>(size);
        s.z_score = sum / (delta * std::sqrt(static_cast<double>(size)));
    }
    return s;
}

SliceResult slice(const LedgerRow& row, const BinaryLine& line, double delta) {
    if (!(delta > 0.0)) {
        throw std::invalid_argument("slice: delta must be positive");
    }
    require_same_serials(row.serials, line.serials, "slice");
    double above = 0.0, below = 0.0;
    std::size_t n_above = 0;
    for (std::size_t i = 0; i < row.readings.size(); ++i) {
        if (line.positions[i] == LinePosition::Above) {
            above += row.readings[i];
            ++n_above;
        } else {
            below += row.readings[i];
        }
    }
    return {make_slice_stats(above, n_above, delta), make_slice_stats(below, row.readings.size() - n_above, delta)};
}

double sliced_correlation(const LedgerRow& row, const BinaryLine& line, double coupling) {
    if (coupling == 0.0) {
        throw std::invalid_argument("sliced_correlation: zero coupling");
    }
    require_same_serials(row.serials, line.serials, "sliced_correlation");
    if (row.readings.empty()) {
        throw std::invalid_argument("sliced_correlation: empty row");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < row.readings.size(); ++i) {
        acc += row.readings[i] * sign_of(line.positions[i]);
    }
    return acc / (static_cast<double>(row.readings.size()) * coupling);
}

double correlation(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size() || a.empty()) {
        throw std::invalid_argument("correlation: inputs must be non-empty and of equal length");
    }
    long long acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += static_cast<long long>(a[i]) * b[i];
    }
    return static_cast<double>(acc) / static_cast<double>(a.size());
}

double correlation(std::span<const Binary> a, std::span<const Binary> b) {
    std::vector<int> x(a.size()), y(b.size());
    std::transform(a.begin(), a.end(), x.begin(), [](Binary v) { return value(to_spin(v)); });
    std::transform(b.begin(), b.end(), y.begin(), [](Binary v) { return value(to_spin(v)); });
    return correlation(x, y);
}

// ------------------------------------------------------------------ decode

DecodeResult decode(const StoneLedger& ledger, std::span<const CodedBinding> lists) {
    const auto& cfg = ledger.config();
    const double delta = cfg.pointer.delta();

    struct Prepared {
        std::vector<LedgerRow> rows;
        char code;
        const CodedList* list;
    };
    std::vector<Prepared> prepared;
    for (const auto& b : lists) {
        if (b.list == nullptr || b.list->records.empty()) {
            throw std::invalid_argument("decode: empty coded list");
        }
        const char code = b.list->records.front().coded_orientation;
        for (const auto& r : b.list->records) {
            if (r.coded_orientation != code) {
                throw std::invalid_argument("decode: coded list mixes orientation codes");
            }
        }
        Prepared p{{}, code, b.list};
        for (int r = 1; r <= kWeakRows; ++r) {
            p.rows.push_back(ledger.row(b.side, r));
        }
        prepared.push_back(std::move(p));
    }

    DecodeResult result;
    std::size_t rows_used = 0;
    for (const auto& hypothesis : HiddenKey::all()) {
        double score = 0.0;
        std::size_t used = 0;
        for (const auto& p : prepared) {
            auto index = hypothesis.orientation_index_of(p.code);
            if (!index) {
                continue;
            }
            const BinaryLine line = decoded_line(*p.list, hypothesis);
            const Orientation target = cfg.weak_orientations()[static_cast<std::size_t>(*index)];
            for (const auto& row : p.rows) {
                if (!row.orientation.same_as(target)) {
                    continue;
                }
                const auto s = slice(row, line, delta);
                score += s.above.z_score - s.below.z_score;
                ++used;
            }
        }
        rows_used = std::max(rows_used, used);
        result.scores.emplace_back(hypothesis, score);
    }

    // Hypotheses that agree on every code letter present and on the sign are
    // indistinguishable by the data; the runner-up must differ from the guess.
    auto signature = [&](const HiddenKey& k) {
        std::vector<int> sig{k.above_is_up ? 1 : 0};
        for (const auto& p : prepared) {
            sig.push_back(k.orientation_index_of(p.code).value_or(-1));
        }
        return sig;
    };
    const auto best = std::max_element(result.scores.begin(), result.scores.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
    result.guess = best->first;
    result.best_score = best->second;
    result.second_score = -std::numeric_limits<double>::infinity();
    const auto guess_sig = signature(result.guess);
    for (const auto& [k, score] : result.scores) {
        if (signature(k) != guess_sig) {
            result.second_score = std::max(result.second_score, score);
        }
    }
    if (!std::isfinite(result.second_score)) {
        result.second_score = result.best_score;
    }
    result.confidence =
        rows_used > 0 ? (result.best_score - result.second_score) / std::sqrt(2.0 * static_cast<double>(rows_used))
                      : 0.0;
    return result;
}

// -------------------------------------------------------------------- CHSH

ChshResult chsh(std::span<const ChshRun> runs) {
    if (runs.size() != 4) {
        throw std::invalid_argument("chsh: exactly four runs required");
    }
    const std::size_t n = runs[0].left.size();
    for (const auto& r : runs) {
        if (r.left.size() != n || r.right.size() != n || n == 0) {
            throw std::invalid_argument("chsh: all runs must have the same non-zero N");
        }
        require_same_serials(r.left.serials, r.right.serials, "chsh");
    }
    auto same = [](Orientation a, Orientation b) { return a.same_as(b); };
    if (!same(runs[0].left_angle, runs[1].left_angle) || !same(runs[2].left_angle, runs[3].left_angle) ||
        !same(runs[0].right_angle, runs[2].right_angle) || !same(runs[1].right_angle, runs[3].right_angle)) {
        throw std::invalid_argument("chsh: runs must be ordered (a,b), (a,b'), (a',b), (a',b')");
    }

    ChshResult out;
    double var = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        const auto l = runs[i].left.signs();
        const auto r = runs[i].right.signs();
        out.correlations[i] = correlation(l, r);
        const double v = (1.0 - out.correlations[i] * out.correlations[i]) / static_cast<double>(n);
        out.standard_errors[i] = std::sqrt(std::max(v, 0.0));
        var += v;
    }
    const auto& e = out.correlations;
    out.s = std::abs(e[0] - e[1] + e[2] + e[3]);
    out.standard_error = std::sqrt(var);
    return out;
}

// ------------------------------------------------------ orientation fitting

OrientationInference infer_orientation(const StoneLedger& ledger, const BinaryLine& line, LedgerSide side) {
    const auto& cfg = ledger.config();
    const double g = cfg.pointer.coupling();
    if (g == 0.0) {
        throw std::invalid_argument("infer_orientation: zero coupling carries no information");
    }
    const auto axes = cfg.weak_orientations();

    OrientationInference out;
    std::array<std::vector<double>, 3> samples;
    for (int r = 1; r <= kWeakRows; ++r) {
        const LedgerRow row = ledger.row(side, r);
        require_same_serials(row.serials, line.serials, "infer_orientation");
        const auto idx = static_cast<std::size_t>(*cfg.orientation_index(row.orientation));
        for (std::size_t i = 0; i < row.readings.size(); ++i) {
            samples[idx].push_back(row.readings[i] * sign_of(line.positions[i]) / g);
        }
    }
    double var_sum = 0.0;
    for (std::size_t o = 0; o < 3; ++o) {
        const auto& s = samples[o];
        double m = 0.0;
        for (double x : s) m += x;
        m /= static_cast<double>(s.size());
        double v = 0.0;
        for (double x : s) v += (x - m) * (x - m);
        v /= static_cast<double>(s.size() - 1);
        out.correlations[o] = m;
        var_sum += v / static_cast<double>(s.size());
    }
    out.correlation_error = std::sqrt(var_sum / 3.0);

    // Profile least squares: amplitude A >= 0 solved in closed form per phi.
    const auto& c = out.correlations;
    auto residual = [&](double phi) {
        double cc = 0.0, kk = 0.0;
        for (std::size_t o = 0; o < 3; ++o) {
            const double k = std::cos(axes[o].radians() - phi);
            cc += c[o] * k;
            kk += k * k;
        }
        const double a = std::max(cc / kk, 0.0);
        double r = 0.0;
        for (std::size_t o = 0; o < 3; ++o) {
            const double d = c[o] - a * std::cos(axes[o].radians() - phi);
            r += d * d;
        }
        return r;
    };

    constexpr double step = 0.1 * kPi / 180.0;
    double best_phi = 0.0, best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3600; ++i) {
        const double phi = i * step;
        const double r = residual(phi);
        if (r < best) {
            best = r;
            best_phi = phi;
        }
    }
    auto [phi, res] =
        boost::math::tools::brent_find_minima(residual, best_phi - step, best_phi + step, std::numeric_limits<double>::digits / 2);
    if (res > best) {
        phi = best_phi;
        res = best;
    }
    out.angle_deg = Orientation(phi).degrees();
    out.residual = res;

    const double norm = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
    out.degenerate = norm < 4.0 * out.correlation_error;
    if (out.degenerate) {
        out.half_width_deg = 180.0;
    } else {
        double cc = 0.0, kk = 0.0, ss = 0.0;
        for (std::size_t o = 0; o < 3; ++o) {
            const double k = std::cos(axes[o].radians() - phi);
            cc += c[o] * k;
            kk += k * k;
            const double sn = std::sin(axes[o].radians() - phi);
            ss += sn * sn;
        }
        const double amplitude = std::max(cc / kk, 1e-12);
        const double sigma = out.correlation_error / (amplitude * std::sqrt(std::max(ss, 1e-12)));
        out.half_width_deg = std::min(180.0, 3.0 * sigma * 180.0 / kPi);
    }
    return out;
}

}  // namespace tsvsim
