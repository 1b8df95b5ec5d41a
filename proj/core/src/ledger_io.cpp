#include "tsvsim/ledger_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include <fmt/format.h>

namespace tsvsim {

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

}  // namespace

void write_ledger_csv(std::ostream& out, const StoneLedger& ledger) {
    out << format_key_values(to_key_values(ledger.config()), "# ");
    out << kLedgerHeader << '\n';
    for (const auto& e : ledger.entries()) {
        out << fmt::format("{},{},{},{:.12g},{},{}\n", e.serial, side_code(e.side), e.row, e.orientation.degrees(),
                           format_double(e.reading), code(e.binarized));
    }
}

std::string ledger_csv(const StoneLedger& ledger) {
    std::ostringstream out;
    write_ledger_csv(out, ledger);
    return out.str();
}

StoneLedger read_ledger_csv(std::istream& in, const std::string& source) {
    KeyValues meta;
    std::string line;
    std::size_t n = 0;
    bool header_seen = false;
    std::optional<StoneLedger> ledger;

    while (std::getline(in, line)) {
        ++n;
        auto t = trim(line);
        if (t.empty()) {
            continue;
        }
        if (!header_seen) {
            if (t.front() == '#') {
                if (auto item = parse_key_value_line(t.substr(1), source, n)) {
                    meta.set(item->first, item->second);
                }
                continue;
            }
            if (t != kLedgerHeader) {
                throw ParseError(source, n, fmt::format("expected header '{}'", kLedgerHeader));
            }
            header_seen = true;
            ExperimentConfig cfg;
            try {
                cfg = config_from_key_values(meta, source + " (metadata)");
                cfg.validate();
            } catch (const std::invalid_argument& e) {
                throw ParseError(source, n, fmt::format("invalid metadata: {}", e.what()));
            }
            ledger.emplace(cfg);
            continue;
        }
        auto f = split_csv(t);
        if (f.size() != 6) {
            throw ParseError(source, n, fmt::format("expected 6 fields, got {}", f.size()));
        }
        LedgerEntry e;
        e.serial = parse_integer(f[0], source, n, "serial");
        auto side = f[1].size() == 1 ? side_from_code(f[1][0]) : std::nullopt;
        if (!side) {
            throw ParseError(source, n, fmt::format("invalid side '{}'", f[1]));
        }
        e.side = *side;
        e.row = static_cast<int>(parse_integer(f[2], source, n, "row"));
        e.orientation = Orientation::from_degrees(parse_double(f[3], source, n, "orientation_deg"));
        e.reading = parse_double(f[4], source, n, "reading");
        if (f[5] == "U") {
            e.binarized = Binary::Up;
        } else if (f[5] == "D") {
            e.binarized = Binary::Down;
        } else {
            throw ParseError(source, n, fmt::format("invalid binarized value '{}'", f[5]));
        }
        try {
            ledger->append(e);
        } catch (const std::invalid_argument& ex) {
            throw ParseError(source, n, ex.what());
        }
    }
    if (!ledger) {
        throw ParseError(source, n, "missing ledger header");
    }
    try {
        ledger->validate_schedule();
    } catch (const std::invalid_argument& ex) {
        throw ParseError(source, 0, ex.what());
    }
    return std::move(*ledger);
}

StoneLedger read_ledger_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path.string(), 0, "cannot open file");
    }
    return read_ledger_csv(in, path.string());
}

void write_coded_csv(std::ostream& out, const CodedList& list) {
    out << kCodedHeader << '\n';
    for (const auto& r : list.records) {
        out << fmt::format("{},{},{}\n", r.serial, r.coded_orientation,
                           r.value == CodedValue::Above ? "above" : "below");
    }
}

std::string coded_csv(const CodedList& list) {
    std::ostringstream out;
    write_coded_csv(out, list);
    return out.str();
}

CodedList read_coded_csv(std::istream& in, const std::string& source) {
    CodedList list;
    std::string line;
    std::size_t n = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++n;
        auto t = trim(line);
        if (t.empty()) {
            continue;
        }
        if (!header_seen) {
            if (t != kCodedHeader) {
                throw ParseError(source, n, fmt::format("expected header '{}'", kCodedHeader));
            }
            header_seen = true;
            continue;
        }
        auto f = split_csv(t);
        if (f.size() != 3) {
            throw ParseError(source, n, fmt::format("expected 3 fields, got {}", f.size()));
        }
        CodedRecord r;
        r.serial = parse_integer(f[0], source, n, "serial");
        if (f[1].size() != 1 || std::string_view("xyzw").find(f[1][0]) == std::string_view::npos) {
            throw ParseError(source, n, fmt::format("invalid coded orientation '{}'", f[1]));
        }
        r.coded_orientation = f[1][0];
        if (f[2] == "above") {
            r.value = CodedValue::Above;
        } else if (f[2] == "below") {
            r.value = CodedValue::Below;
        } else {
            throw ParseError(source, n, fmt::format("invalid coded value '{}'", f[2]));
        }
        list.records.push_back(r);
    }
    if (!header_seen) {
        throw ParseError(source, n, "missing coded-list header");
    }
    return list;
}

CodedList read_coded_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path.string(), 0, "cannot open file");
    }
    return read_coded_csv(in, path.string());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error(fmt::format("cannot write {}", tmp.string()));
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            throw std::runtime_error(fmt::format("short write to {}", tmp.string()));
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError(path.string(), 0, "cannot open file");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace tsvsim
