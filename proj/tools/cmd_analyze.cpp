#include <cmath>

#include <fmt/format.h>

#include <tsvsim/ledger_io.hpp>

#include "cli_common.hpp"

namespace tsvsim::cli {

namespace {

struct LoadedList {
    fs::path path;
    LedgerSide side;
    CodedList list;
};

std::vector<LoadedList> load_coded(const std::vector<std::string>& paths) {
    std::vector<LoadedList> out;
    for (const auto& p : paths) {
        out.push_back({p, side_from_coded_name(p), read_coded_file(p)});
    }
    return out;
}

std::string key_letters(const HiddenKey& k) {
    return fmt::format("{}{}{}", k.code_of[0], k.code_of[1], k.code_of[2]);
}

int run_decode(const AnalyzeFlags& f, const StoneLedger& ledger, std::vector<LoadedList>& lists, const fs::path& out) {
    const fs::path key_path = f.key.empty() ? lists.front().path.parent_path() / "key.sealed" : fs::path(f.key);
    auto key = std::make_shared<SealedKey>(SealedKey::from_sealed_text(trim(read_file(key_path)), key_path.string()));

    std::vector<CodedBinding> bindings;
    for (auto& l : lists) {
        l.list.key = key;
        bindings.push_back({l.side, &l.list});
    }
    const DecodeResult result = decode(ledger, bindings);

    std::string csv = "alpha_code,beta_code,gamma_code,above,score\n";
    for (const auto& [k, score] : result.scores) {
        csv += fmt::format("{},{},{},{},{}\n", k.code_of[0], k.code_of[1], k.code_of[2],
                           k.above_is_up ? "up" : "down", score);
    }
    write_file_atomic(out / "report_decode.csv", csv);

    key->register_guess(result.guess);
    key->unseal();
    write_file_atomic(key_path.parent_path() / "key.txt", key->plain_text());

    fmt::print("guess: alpha,beta,gamma = {}, above = {}\n", key_letters(result.guess),
               result.guess.above_is_up ? "up" : "down");
    fmt::print("confidence: {:.2f} ({})\n", result.confidence, result.decisive() ? "decisive" : "below threshold");
    fmt::print("score: {:.1f}\n", key->score());
    return 0;
}

int run_correlate(const StoneLedger& ledger, const std::vector<LoadedList>& lists, const fs::path& out) {
    const auto& cfg = ledger.config();
    const double delta = cfg.pointer.delta();
    const double g = cfg.pointer.coupling();
    std::string csv =
        "list,side,row,orientation_deg,n_above,sum_above,mean_above,z_above,n_below,sum_below,mean_below,z_below,"
        "sliced_correlation\n";
    fmt::print("{:>16} {:>4} {:>8} {:>9} {:>9} {:>9}\n", "list", "row", "deg", "z+", "z-", "corr");
    for (const auto& l : lists) {
        const BinaryLine line = line_from_coded(l.list);
        const std::string name = l.path.stem().string();
        for (int r = 1; r <= kWeakRows; ++r) {
            const LedgerRow row = ledger.row(l.side, r);
            const auto s = slice(row, line, delta);
            const double c = g > 0.0 ? sliced_correlation(row, line, g) : 0.0;
            csv += fmt::format("{},{},{},{:.12g},{},{},{},{},{},{},{},{},{}\n", name, side_code(l.side), r,
                               row.orientation.degrees(), s.above.subset_size, s.above.sum, s.above.mean,
                               s.above.z_score, s.below.subset_size, s.below.sum, s.below.mean, s.below.z_score, c);
            fmt::print("{:>16} {:>4} {:>8.2f} {:>9.2f} {:>9.2f} {:>9.4f}\n", name, r, row.orientation.degrees(),
                       s.above.z_score, s.below.z_score, c);
        }
    }
    write_file_atomic(out / "report_correlate.csv", csv);
    if (lists.size() == 2) {
        const auto a = line_from_coded(lists[0].list).signs();
        const auto b = line_from_coded(lists[1].list).signs();
        fmt::print("strong-list correlation: {:.4f}\n", correlation(a, b));
    }
    return 0;
}

int run_infer(const AnalyzeFlags& f, const StoneLedger& ledger, const std::vector<LoadedList>& lists,
              const fs::path& out) {
    // The last list is the one whose orientation is inferred. Earlier lists
    // (coded along alpha, beta or gamma) fix the above/below sign convention
    // through decode; without them the axis is only known modulo 180 deg.
    const auto& l = lists.back();
    BinaryLine line = line_from_coded(l.list);
    if (lists.size() > 1) {
        std::vector<CodedBinding> bindings;
        for (const auto& item : lists) {
            bindings.push_back({item.side, &item.list});
        }
        const DecodeResult d = decode(ledger, bindings);
        fmt::print("sign convention from decode: above = {} (confidence {:.2f})\n", d.guess.above_is_up ? "up" : "down",
                   d.confidence);
        line = decoded_line(l.list, d.guess);
    } else {
        fmt::print("single list: above/below convention unknown, axis determined modulo 180 deg\n");
    }
    const auto r = infer_orientation(ledger, line, l.side);
    std::string csv = "angle_deg,half_width_deg,degenerate,c_alpha,c_beta,c_gamma,correlation_error,residual";
    std::string row = fmt::format("{},{},{},{},{},{},{},{}", r.angle_deg, r.half_width_deg, r.degenerate ? 1 : 0,
                                  r.correlations[0], r.correlations[1], r.correlations[2], r.correlation_error,
                                  r.residual);
    if (f.true_deg) {
        const double err = Orientation(r.angle_deg * kPi / 180.0).angle_to(Orientation::from_degrees(*f.true_deg)) *
                           180.0 / kPi;
        csv += ",true_deg,error_deg";
        row += fmt::format(",{},{}", *f.true_deg, err);
    }
    write_file_atomic(out / "report_infer.csv", csv + "\n" + row + "\n");

    fmt::print("correlations: alpha {:.4f}, beta {:.4f}, gamma {:.4f} (+- {:.4f})\n", r.correlations[0],
               r.correlations[1], r.correlations[2], r.correlation_error);
    fmt::print("estimated orientation: {:.2f} deg (+- {:.2f}){}\n", r.angle_deg, r.half_width_deg,
               r.degenerate ? ", degenerate" : "");
    if (f.true_deg) {
        const double err = Orientation(r.angle_deg * kPi / 180.0).angle_to(Orientation::from_degrees(*f.true_deg)) *
                           180.0 / kPi;
        fmt::print("error against {:.2f} deg: {:+.2f} deg\n", *f.true_deg, err);
    }
    return 0;
}

int run_chsh(const AnalyzeFlags& f, const fs::path& out) {
    if (f.manifests.size() != 4) {
        throw UsageError("--mode chsh needs four --manifest files ordered (a,b), (a,b'), (a',b), (a',b')");
    }
    std::vector<ChshRun> runs;
    for (const auto& p : f.manifests) {
        const Manifest m = read_manifest(p);
        if (m.config.kind != ExperimentKind::EprPair) {
            throw std::runtime_error(fmt::format("{}: not an EPR run", p));
        }
        const double left = parse_double(m.values.require("evening_left_deg", p), p, 0, "evening_left_deg");
        const double right = parse_double(m.values.require("evening_right_deg", p), p, 0, "evening_right_deg");
        runs.push_back(ChshRun{line_from_coded(read_coded_file(m.file("coded_left.csv"))),
                               line_from_coded(read_coded_file(m.file("coded_right.csv"))),
                               Orientation::from_degrees(left), Orientation::from_degrees(right)});
    }
    const ChshResult r = chsh(runs);
    std::string csv = "pair,left_deg,right_deg,correlation,standard_error\n";
    const char* names[] = {"ab", "ab'", "a'b", "a'b'"};
    for (std::size_t i = 0; i < 4; ++i) {
        csv += fmt::format("{},{:.12g},{:.12g},{},{}\n", names[i], runs[i].left_angle.degrees(),
                           runs[i].right_angle.degrees(), r.correlations[i], r.standard_errors[i]);
        fmt::print("E({}) = {:+.4f} +- {:.4f}\n", names[i], r.correlations[i], r.standard_errors[i]);
    }
    csv += fmt::format("S,,,{},{}\n", r.s, r.standard_error);
    write_file_atomic(out / "report_chsh.csv", csv);
    fmt::print("S = {:.4f} +- {:.4f}\n", r.s, r.standard_error);
    return 0;
}

}  // namespace

int cmd_analyze(const AnalyzeFlags& f) {
    if (f.mode == "chsh") {
        return run_chsh(f, output_dir(f.out, f.manifests.empty() ? fs::path() : fs::path(f.manifests.front())));
    }
    if (f.ledger.empty()) {
        throw UsageError(fmt::format("--mode {} needs --ledger", f.mode));
    }
    if (f.coded.empty()) {
        throw UsageError(fmt::format("--mode {} needs at least one --coded list", f.mode));
    }
    const StoneLedger ledger = read_ledger_file(f.ledger);
    auto lists = load_coded(f.coded);
    const fs::path out = output_dir(f.out, f.ledger);
    if (f.mode == "decode") return run_decode(f, ledger, lists, out);
    if (f.mode == "correlate") return run_correlate(ledger, lists, out);
    return run_infer(f, ledger, lists, out);
}

}  // namespace tsvsim::cli
