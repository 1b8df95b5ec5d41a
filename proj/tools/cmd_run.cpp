#include <cstdio>

#include <fmt/format.h>

#include <tsvsim/ledger_io.hpp>

#include "cli_common.hpp"

namespace tsvsim::cli {

namespace {

void print_slice_table(const StoneLedger& ledger, LedgerSide side,
                       const std::vector<std::pair<std::string, const CodedList*>>& lines) {
    const double delta = ledger.config().pointer.delta();
    std::string header = fmt::format("{:>4} {:>8}", "row", "deg");
    for (const auto& [name, _] : lines) {
        header += fmt::format(" | {:>12} {:>12} {:>8} {:>8}", name + " sum+", "sum-", "z+", "z-");
    }
    fmt::print("{}\n", header);
    std::vector<BinaryLine> parsed;
    for (const auto& [_, list] : lines) {
        parsed.push_back(line_from_coded(*list));
    }
    for (int r = 1; r <= kWeakRows; ++r) {
        const LedgerRow row = ledger.row(side, r);
        std::string line = fmt::format("{:>4} {:>8.2f}", r, row.orientation.degrees());
        for (const auto& l : parsed) {
            const auto s = slice(row, l, delta);
            line += fmt::format(" | {:>12.4f} {:>12.4f} {:>8.2f} {:>8.2f}", s.above.sum, s.below.sum, s.above.z_score,
                                s.below.z_score);
        }
        fmt::print("{}\n", line);
    }
}

// The key is shared, so the product of coded values equals the product of spins.
double coded_correlation(const CodedList& a, const CodedList& b) {
    const auto x = line_from_coded(a).signs();
    const auto y = line_from_coded(b).signs();
    return correlation(x, y);
}

}  // namespace

int cmd_run(const RunFlags& flags, ExperimentKind kind, const std::string& command) {
    const auto started = std::chrono::steady_clock::now();
    const ExperimentConfig cfg = build_config(flags, kind);
    const fs::path out = flags.out;
    fs::create_directories(out);

    RunOptions options;
    options.threads = flags.threads;
    options.on_ledger_sealed = [&](const StoneLedger& ledger) {
        write_file_atomic(out / "ledger.csv", ledger_csv(ledger));
    };

    std::vector<std::string> files{"ledger.csv"};
    KeyValues extra;
    if (kind == ExperimentKind::SingleParticle) {
        const SingleParticleRun run = run_single_particle(cfg, options);
        write_file_atomic(out / "coded_morning.csv", coded_csv(run.morning));
        write_file_atomic(out / "coded_evening.csv", coded_csv(run.evening));
        write_file_atomic(out / "key.sealed", run.key->sealed_text() + "\n");
        files.insert(files.end(), {"coded_morning.csv", "coded_evening.csv", "key.sealed"});
        extra.set("evening_deg", fmt::format("{:.12g}", run.evening_orientation.degrees()));

        fmt::print("single-particle run: N = {}, g = {}, delta = {}, seed = {}\n", cfg.n_particles,
                   cfg.pointer.coupling(), cfg.pointer.delta(), cfg.seed);
        print_slice_table(run.ledger, LedgerSide::Single, {{"morning", &run.morning}, {"evening", &run.evening}});
        fmt::print("morning/evening correlation: {:.4f}\n", coded_correlation(run.morning, run.evening));
    } else {
        const EprRun run = run_epr(cfg, options);
        write_file_atomic(out / "coded_right.csv", coded_csv(run.right));
        write_file_atomic(out / "coded_left.csv", coded_csv(run.left));
        write_file_atomic(out / "key.sealed", run.key->sealed_text() + "\n");
        files.insert(files.end(), {"coded_right.csv", "coded_left.csv", "key.sealed"});
        extra.set("evening_right_deg", fmt::format("{:.12g}", run.evening_right.degrees()));
        extra.set("evening_left_deg", fmt::format("{:.12g}", run.evening_left.degrees()));

        fmt::print("EPR run: N = {}, g = {}, delta = {}, seed = {}\n", cfg.n_particles, cfg.pointer.coupling(),
                   cfg.pointer.delta(), cfg.seed);
        fmt::print("right rows sliced by the right list\n");
        print_slice_table(run.ledger, LedgerSide::Right, {{"right", &run.right}});
        fmt::print("left rows sliced by the left list\n");
        print_slice_table(run.ledger, LedgerSide::Left, {{"left", &run.left}});
        fmt::print("evening right {:.2f} deg, left {:.2f} deg\n", run.evening_right.degrees(),
                   run.evening_left.degrees());
        fmt::print("evening correlation: {:.4f}\n", coded_correlation(run.right, run.left));
    }

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    write_file_atomic(out / "manifest.txt", format_manifest(command, cfg, extra, files, seconds));
    return 0;
}

}  // namespace tsvsim::cli
