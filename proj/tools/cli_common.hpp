#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <tsvsim/analysis.hpp>
#include <tsvsim/config_io.hpp>
#include <tsvsim/protocol.hpp>

namespace CLI {
class App;
}

namespace tsvsim::cli {

namespace fs = std::filesystem;

/// Bad flag combination detected after parsing; exits with the usage code.
class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRefused = 3;

struct RunFlags {
    std::string config_path;
    std::optional<long long> n;
    std::optional<double> alpha_deg, beta_deg, gamma_deg;
    std::optional<double> lambda, delta, coupling_exponent;
    std::optional<double> bob_morning_deg, bob_evening_deg;
    std::optional<double> bob_right_deg, bob_left_deg;
    bool bob_free = false;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::string out;
};

struct AnalyzeFlags {
    std::string ledger;
    std::vector<std::string> coded;
    std::vector<std::string> manifests;
    std::string mode = "decode";
    std::string key;
    std::optional<double> true_deg;
    std::string out;
};

struct AttackFlags {
    std::string ledger;
    std::string coded;
    unsigned n_cap = 20;
    unsigned repetitions = 1;
    std::vector<int> rows;
    std::string side;
    unsigned threads = 1;
    std::string out;
};

void add_run_flags(CLI::App& cmd, RunFlags& flags, ExperimentKind kind);

/// Defaults, then --config, then explicit flags.
ExperimentConfig build_config(const RunFlags& flags, ExperimentKind kind);

int cmd_run(const RunFlags& flags, ExperimentKind kind, const std::string& command);
int cmd_analyze(const AnalyzeFlags& flags);
int cmd_attack(const AttackFlags& flags);

/// Run manifest: `key = value` lines, config keys prefixed with "config.".
struct Manifest {
    fs::path directory;
    KeyValues values;
    ExperimentConfig config;
    std::vector<std::string> files;

    fs::path file(const std::string& name) const;
};

std::string format_manifest(const std::string& command, const ExperimentConfig& cfg, const KeyValues& extra,
                            const std::vector<std::string>& files, double duration_s);
Manifest read_manifest(const fs::path& path);

/// L, R or S from a coded-list file name (coded_left / coded_right / other).
LedgerSide side_from_coded_name(const fs::path& path);

fs::path output_dir(const std::string& explicit_out, const fs::path& fallback_from);

}  // namespace tsvsim::cli
