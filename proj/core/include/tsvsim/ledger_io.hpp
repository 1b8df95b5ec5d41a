#pragma once

// On-disk formats.
//
// Ledger CSV: `# key = value` metadata lines (config snapshot and seed),
// then the header `serial,side,row,orientation_deg,reading,binarized` and one
// line per weak reading. side is L, R or S; binarized is U or D; readings are
// written as the shortest decimal that round-trips.
//
// Coded-list CSV: header `serial,coded_orientation,coded_value`, values
// x|y|z|w and above|below.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "tsvsim/protocol.hpp"

namespace tsvsim {

inline constexpr std::string_view kLedgerHeader = "serial,side,row,orientation_deg,reading,binarized";
inline constexpr std::string_view kCodedHeader = "serial,coded_orientation,coded_value";

void write_ledger_csv(std::ostream& out, const StoneLedger& ledger);
std::string ledger_csv(const StoneLedger& ledger);

/// Throws ParseError naming the offending line.
StoneLedger read_ledger_csv(std::istream& in, const std::string& source);
StoneLedger read_ledger_file(const std::filesystem::path& path);

void write_coded_csv(std::ostream& out, const CodedList& list);
std::string coded_csv(const CodedList& list);

/// Records only; the key is attached separately.
CodedList read_coded_csv(std::istream& in, const std::string& source);
CodedList read_coded_file(const std::filesystem::path& path);

/// Writes to `<path>.tmp` and renames over `path`, so readers never observe a
/// partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace tsvsim
