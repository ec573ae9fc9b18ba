#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mifo/matrix.hpp"

namespace mifo {

inline constexpr std::string_view kDefaultNaToken = "NA";

/// Reads a header + numeric CSV. Fields equal to `na_token` become missing.
/// Throws ParseError for unparseable fields, DataError for ragged rows,
/// duplicate names or fully missing columns.
DataMatrix load_csv(const std::filesystem::path& path, std::string_view na_token = kDefaultNaToken);
DataMatrix parse_csv(std::istream& in, std::string_view na_token = kDefaultNaToken,
                     std::string_view source = "<stream>");

/// Values are written with 17 significant digits so a reload is bit-exact.
void write_csv(const DataMatrix& m, const std::filesystem::path& path,
               std::string_view na_token = kDefaultNaToken);
void write_csv(const DataMatrix& m, std::ostream& out, std::string_view na_token = kDefaultNaToken);

/// "row,col" file with 0-based indices.
std::vector<Cell> load_positions(const std::filesystem::path& path);
void write_positions(const std::vector<Cell>& cells, const std::filesystem::path& path);

/// 17 significant digits, shortest form that round-trips ("2", "0.1", "1e-300").
std::string format_double(double v);
/// Strict full-field parse; returns false on any trailing garbage.
bool parse_double(std::string_view field, double& out);

/// Splits one CSV line on commas (no quoting); strips a trailing '\r'.
std::vector<std::string_view> split_csv_line(std::string_view line);

}  // namespace mifo
