#include <algorithm>

#include <fmt/format.h>

#include <tsvsim/ledger_io.hpp>
#include <tsvsim/stats.hpp>

#include "cli_common.hpp"

namespace tsvsim::cli {

namespace {

std::vector<LedgerRow> select_rows(const StoneLedger& ledger, LedgerSide side, const std::vector<int>& rows) {
    std::vector<LedgerRow> out;
    if (rows.empty()) {
        for (int r = 1; r <= kWeakRows; ++r) out.push_back(ledger.row(side, r));
    } else {
        for (int r : rows) out.push_back(ledger.row(side, r));
    }
    return out;
}

LedgerSide pick_side(const AttackFlags& f, const ExperimentConfig& cfg) {
    if (cfg.kind == ExperimentKind::SingleParticle) {
        if (!f.side.empty() && f.side != "S") {
            throw UsageError("single-particle ledgers only have side S");
        }
        return LedgerSide::Single;
    }
    if (f.side.empty() || f.side == "R") return LedgerSide::Right;
    if (f.side == "L") return LedgerSide::Left;
    throw UsageError(fmt::format("--side must be L or R for an EPR ledger, got '{}'", f.side));
}

// Bob's evening line for the chosen side, from an in-process run.
struct Simulated {
    StoneLedger ledger;
    BinaryLine truth;
};

Simulated simulate(const ExperimentConfig& cfg, LedgerSide side, unsigned threads) {
    RunOptions options;
    options.threads = threads;
    if (cfg.kind == ExperimentKind::SingleParticle) {
        auto run = run_single_particle(cfg, options);
        return {std::move(run.ledger), line_from_coded(run.evening)};
    }
    auto run = run_epr(cfg, options);
    return {std::move(run.ledger), line_from_coded(side == LedgerSide::Left ? run.left : run.right)};
}

}  // namespace

int cmd_attack(const AttackFlags& f) {
    const StoneLedger ledger = read_ledger_file(f.ledger);
    const auto& cfg = ledger.config();
    const LedgerSide side = pick_side(f, cfg);
    for (int r : f.rows) {
        if (r < 1 || r > kWeakRows) {
            throw UsageError(fmt::format("--row must be in 1..{}, got {}", kWeakRows, r));
        }
    }
    const fs::path out = output_dir(f.out, f.ledger);

    if (cfg.n_particles > static_cast<long long>(std::min(f.n_cap, 20u))) {
        fmt::print(stderr,
                   "refused: N = {} exceeds the enumeration cap of {}. The attack enumerates all C(N, N/2) "
                   "balanced slicings exactly and does not fall back to sampling.\n",
                   cfg.n_particles, std::min(f.n_cap, 20u));
        return kExitRefused;
    }

    std::optional<BinaryLine> truth;
    if (!f.coded.empty()) {
        truth = line_from_coded(read_coded_file(f.coded));
    }
    const auto rows = select_rows(ledger, side, f.rows);
    const AttackReport report = prediction_attack(rows, cfg.pointer.delta(), truth, f.n_cap);
    write_file_atomic(out / "report_attack.csv", attack_report_csv(report));

    fmt::print("N = {}: {} balanced slicings, max statistic {:.3f}, {} within one delta-shift ({:.3f})\n", report.n,
               report.total_slicings, report.max_statistic, report.ties_within_shift, report.shift);
    if (report.true_rank) {
        fmt::print("true slicing: statistic {:.3f}, rank {} of {}{}\n", *report.true_statistic, *report.true_rank,
                   report.total_slicings, *report.true_rank == 1 ? " (RANK 1)" : "");
    }

    if (f.repetitions > 1) {
        std::string csv = "repetition,seed,true_statistic,rank,quantile,ties_within_shift\n";
        std::vector<double> quantiles;
        unsigned first = 0;
        for (unsigned k = 0; k < f.repetitions; ++k) {
            ExperimentConfig rep = cfg;
            rep.seed = cfg.seed + k;
            const Simulated sim = simulate(rep, side, f.threads);
            const auto rep_rows = select_rows(sim.ledger, side, f.rows);
            const AttackReport r = prediction_attack(rep_rows, rep.pointer.delta(), sim.truth, f.n_cap);
            quantiles.push_back(*r.true_quantile());
            first += *r.true_rank == 1 ? 1 : 0;
            csv += fmt::format("{},{},{},{},{},{}\n", k, rep.seed, *r.true_statistic, *r.true_rank,
                               *r.true_quantile(), r.ties_within_shift);
        }
        write_file_atomic(out / "report_attack_ranks.csv", csv);
        const auto ks = stats::ks_uniform(quantiles);
        fmt::print("repetitions: {}, true slicing ranked first in {} ({:.1f}%)\n", f.repetitions, first,
                   100.0 * first / f.repetitions);
        fmt::print("rank uniformity: KS D = {:.4f}, p = {:.4g}\n", ks.statistic, ks.p_value);
    }
    return 0;
}

}  // namespace tsvsim::cli
