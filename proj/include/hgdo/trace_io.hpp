// Trace CSV and metrics JSON files.
//
// The CSV has one header row followed by one row per sample. Doubles are
// written in shortest round-trip form, so parsing a written file gives back
// the same bits. The last column carries the scenario labels joined by ';'.
#pragma once

#include "hgdo/simulation.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace hgdo::io {

/// Column names in file order.
const std::vector<std::string>& trace_columns();

std::string trace_header();

void write_trace_csv(const sim::SimTrace& trace, std::ostream& out);
void write_trace_csv(const sim::SimTrace& trace, const std::filesystem::path& path);

/// Parses a trace written by write_trace_csv. dt is taken from the first two
/// samples (0 for fewer samples). Throws IoError on malformed input.
sim::SimTrace read_trace_csv(std::istream& in, const std::string& source = "<stream>");
sim::SimTrace read_trace_csv(const std::filesystem::path& path);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);

/// Splits one CSV record (RFC 4180 quoting, no embedded newlines).
std::vector<std::string> split_csv_record(const std::string& line);

/// Quotes a field if it contains a comma, quote or whitespace at either end.
std::string quote_csv_field(const std::string& field);

}  // namespace hgdo::io
