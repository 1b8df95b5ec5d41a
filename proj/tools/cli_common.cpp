#include "cli_common.hpp"

#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <tsvsim/ledger_io.hpp>
#include <tsvsim/version.hpp>

namespace tsvsim::cli {

namespace {

constexpr std::string_view kConfigPrefix = "config.";

std::string deg(double d) { return fmt::format("{:.12g}", d); }

}  // namespace

void add_run_flags(CLI::App& cmd, RunFlags& f, ExperimentKind kind) {
    cmd.add_option("--config", f.config_path, "flat key = value config file; flags override it")
        ->check(CLI::ExistingFile);
    cmd.add_option("--n", f.n, "ensemble size N (even)");
    cmd.add_option("--alpha-deg", f.alpha_deg, "weak orientation alpha");
    cmd.add_option("--beta-deg", f.beta_deg, "weak orientation beta");
    cmd.add_option("--gamma-deg", f.gamma_deg, "weak orientation gamma");
    cmd.add_option("--lambda", f.lambda, "pointer kick lambda (g = lambda / N^exponent), default 1");
    cmd.add_option("--delta", f.delta, "pointer noise width, default 1");
    cmd.add_option("--coupling-exponent", f.coupling_exponent, "0.5 or 1");
    if (kind == ExperimentKind::SingleParticle) {
        cmd.add_option("--bob-morning-deg", f.bob_morning_deg, "Bob's morning orientation");
        auto* evening = cmd.add_option("--bob-evening-deg", f.bob_evening_deg, "Bob's evening orientation");
        cmd.add_flag("--bob-free", f.bob_free, "draw the evening orientation from {alpha, beta, gamma} at run time")
            ->excludes(evening);
    } else {
        auto* right = cmd.add_option("--bob-right-deg", f.bob_right_deg, "evening orientation on the right spin");
        auto* left = cmd.add_option("--bob-left-deg", f.bob_left_deg, "evening orientation on the left spin");
        cmd.add_flag("--bob-free", f.bob_free, "draw both evening orientations at run time (CHSH settings)")
            ->excludes(right)
            ->excludes(left);
    }
    cmd.add_option("--seed", f.seed, "master seed");
    cmd.add_option("--threads", f.threads, "worker threads")->check(CLI::Range(1u, 1024u));
    cmd.add_option("--out", f.out, "output directory")->required();
}

ExperimentConfig build_config(const RunFlags& f, ExperimentKind kind) {
    KeyValues kv;
    std::string source = "flags";
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in) {
            throw std::runtime_error(fmt::format("cannot open config '{}'", f.config_path));
        }
        kv = parse_key_values(in, f.config_path);
        source = f.config_path;
        if (auto k = kv.get("experiment_kind")) {
            const bool single = *k == "single";
            if (single != (kind == ExperimentKind::SingleParticle)) {
                throw ParseError(source, 0, fmt::format("experiment_kind '{}' does not match this command", *k));
            }
        }
    }
    kv.set("experiment_kind", kind == ExperimentKind::SingleParticle ? "single" : "epr");
    if (f.n) kv.set("n_particles", std::to_string(*f.n));
    if (f.alpha_deg) kv.set("alpha_deg", deg(*f.alpha_deg));
    if (f.beta_deg) kv.set("beta_deg", deg(*f.beta_deg));
    if (f.gamma_deg) kv.set("gamma_deg", deg(*f.gamma_deg));
    if (f.lambda) kv.set("lambda", format_double(*f.lambda));
    if (!kv.contains("lambda")) kv.set("lambda", "1");
    if (f.delta) kv.set("delta", format_double(*f.delta));
    if (!kv.contains("delta")) kv.set("delta", "1");
    if (f.coupling_exponent) kv.set("coupling_exponent", format_double(*f.coupling_exponent));
    if (f.bob_morning_deg) kv.set("bob_morning_deg", deg(*f.bob_morning_deg));
    if (f.bob_evening_deg) kv.set("bob_evening_deg", deg(*f.bob_evening_deg));
    if (f.bob_right_deg) kv.set("bob_evening_right_deg", deg(*f.bob_right_deg));
    if (f.bob_left_deg) kv.set("bob_evening_left_deg", deg(*f.bob_left_deg));
    if (f.bob_free) {
        if (kind == ExperimentKind::SingleParticle) {
            kv.set("bob_evening_deg", "free");
        } else {
            kv.set("bob_evening_right_deg", "free");
            kv.set("bob_evening_left_deg", "free");
        }
    }
    if (f.seed) kv.set("seed", std::to_string(*f.seed));
    if (!kv.contains("n_particles")) {
        throw UsageError("--n is required (or n_particles in --config)");
    }

    ExperimentConfig cfg = config_from_key_values(kv, source);
    cfg.validate();
    return cfg;
}

fs::path Manifest::file(const std::string& name) const {
    for (const auto& f : files) {
        if (f == name) {
            return directory / f;
        }
    }
    throw std::runtime_error(fmt::format("manifest in '{}' lists no '{}'", directory.string(), name));
}

std::string format_manifest(const std::string& command, const ExperimentConfig& cfg, const KeyValues& extra,
                            const std::vector<std::string>& files, double duration_s) {
    KeyValues kv;
    kv.set("version", std::string(version()));
    kv.set("command", command);
    const KeyValues config = to_key_values(cfg);
    for (const auto& [k, v] : config.items()) {
        kv.set(std::string(kConfigPrefix) + k, v);
    }
    for (const auto& [k, v] : extra.items()) {
        kv.set(k, v);
    }
    std::string joined;
    for (const auto& f : files) {
        joined += joined.empty() ? f : "," + f;
    }
    kv.set("files", joined);
    kv.set("duration_s", fmt::format("{:.3f}", duration_s));
    return format_key_values(kv);
}

Manifest read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error(fmt::format("cannot open manifest '{}'", path.string()));
    }
    Manifest m;
    m.directory = path.parent_path();
    m.values = parse_key_values(in, path.string());
    KeyValues cfg_kv;
    for (const auto& [k, v] : m.values.items()) {
        if (k.starts_with(kConfigPrefix)) {
            cfg_kv.set(k.substr(kConfigPrefix.size()), v);
        }
    }
    m.config = config_from_key_values(cfg_kv, path.string());
    std::stringstream files(m.values.require("files", path.string()));
    for (std::string item; std::getline(files, item, ',');) {
        if (!item.empty()) {
            m.files.push_back(item);
        }
    }
    return m;
}

LedgerSide side_from_coded_name(const fs::path& path) {
    const auto stem = path.stem().string();
    if (stem.find("right") != std::string::npos) return LedgerSide::Right;
    if (stem.find("left") != std::string::npos) return LedgerSide::Left;
    return LedgerSide::Single;
}

fs::path output_dir(const std::string& explicit_out, const fs::path& fallback_from) {
    fs::path dir = explicit_out.empty() ? fallback_from.parent_path() : fs::path(explicit_out);
    if (dir.empty()) {
        dir = ".";
    }
    fs::create_directories(dir);
    return dir;
}

}  // namespace tsvsim::cli
