#include <cstdio>
#include <exception>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <tsvsim/version.hpp>

#include "cli_common.hpp"

using namespace tsvsim;
using namespace tsvsim::cli;

int main(int argc, char** argv) {
    CLI::App app{"Weak and strong spin measurement simulator with stone-ledger slicing analysis"};
    app.set_version_flag("--version", std::string(version()));
    app.require_subcommand(1);

    RunFlags single_flags;
    auto* single = app.add_subcommand("run-single", "single-particle morning/weak/evening experiment");
    add_run_flags(*single, single_flags, ExperimentKind::SingleParticle);

    RunFlags epr_flags;
    auto* epr = app.add_subcommand("run-epr", "EPR pair with weak rows on both spins");
    add_run_flags(*epr, epr_flags, ExperimentKind::EprPair);

    AnalyzeFlags analyze_flags;
    auto* analyze = app.add_subcommand("analyze", "slice a ledger by coded strong lists");
    analyze->add_option("--ledger", analyze_flags.ledger, "ledger.csv")->check(CLI::ExistingFile);
    analyze->add_option("--coded", analyze_flags.coded, "coded list CSV (repeatable); side is read from the name")
        ->check(CLI::ExistingFile);
    analyze->add_option("--manifest", analyze_flags.manifests, "run manifest (chsh: four, in CHSH order)")
        ->check(CLI::ExistingFile);
    analyze->add_option("--mode", analyze_flags.mode, "decode | correlate | infer | chsh")
        ->check(CLI::IsMember({"decode", "correlate", "infer", "chsh"}));
    analyze->add_option("--key", analyze_flags.key, "key.sealed (default: next to the first coded list)");
    analyze->add_option("--true-deg", analyze_flags.true_deg, "infer: reference angle, used only for the report");
    analyze->add_option("--out", analyze_flags.out, "report directory (default: the ledger's directory)");

    AttackFlags attack_flags;
    auto* attack = app.add_subcommand("attack", "exhaustive balanced-slicing prediction attack");
    attack->add_option("--ledger", attack_flags.ledger, "ledger.csv")->required()->check(CLI::ExistingFile);
    attack->add_option("--coded", attack_flags.coded, "Bob's coded evening list, ranked as the true slicing")
        ->check(CLI::ExistingFile);
    attack->add_option("--n-cap", attack_flags.n_cap, "largest N to enumerate (at most 20)")
        ->check(CLI::Range(2u, 20u));
    attack->add_option("--repetitions", attack_flags.repetitions,
                       "re-run the ledger's config with seeds seed, seed+1, ... and rank each true slicing")
        ->check(CLI::Range(1u, 100000u));
    attack->add_option("--row", attack_flags.rows, "weak row(s) to use (repeatable; default all nine)");
    attack->add_option("--side", attack_flags.side, "L or R for EPR ledgers (default R)");
    attack->add_option("--threads", attack_flags.threads, "worker threads for repetitions")
        ->check(CLI::Range(1u, 1024u));
    attack->add_option("--out", attack_flags.out, "report directory (default: the ledger's directory)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (single->parsed()) return cmd_run(single_flags, ExperimentKind::SingleParticle, "run-single");
        if (epr->parsed()) return cmd_run(epr_flags, ExperimentKind::EprPair, "run-epr");
        if (analyze->parsed()) return cmd_analyze(analyze_flags);
        if (attack->parsed()) return cmd_attack(attack_flags);
    } catch (const UsageError& e) {
        fmt::print(stderr, "usage error: {}\n", e.what());
        return kExitUsage;
    } catch (const EnumerationLimitError& e) {
        fmt::print(stderr, "refused: {}\n", e.what());
        return kExitRefused;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitFailure;
    }
    return kExitFailure;
}
