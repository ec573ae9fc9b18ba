#include "mifo/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "mifo/error.hpp"

namespace mifo {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

std::vector<std::string_view> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string format_double(double v) {
  char buf[64];
  // Shortest repr is never longer than 17 digits and always round-trips.
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool parse_double(std::string_view field, double& out) {
  if (field.empty()) return false;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

DataMatrix parse_csv(std::istream& in, std::string_view na_token, std::string_view source) {
  const std::string src(source);
  std::string line;
  if (!std::getline(in, line)) throw DataError(src + ": empty file, header row required");
  std::vector<std::string> names;
  for (auto f : split_csv_line(line)) names.emplace_back(f);
  const std::size_t p = names.size();

  std::vector<double> values;
  std::vector<bool> missing;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++n;
    const auto fields = split_csv_line(line);
    if (fields.size() != p) {
      throw DataError(src + ": row " + std::to_string(n) + " has " + std::to_string(fields.size()) +
                      " fields, header has " + std::to_string(p));
    }
    for (std::size_t c = 0; c < p; ++c) {
      if (fields[c] == na_token) {
        values.push_back(0.0);
        missing.push_back(true);
        continue;
      }
      double v = 0.0;
      if (!parse_double(fields[c], v)) throw ParseError(src, n, c + 1, std::string(fields[c]));
      values.push_back(v);
      missing.push_back(false);
    }
  }

  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  Mask mask(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < p; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * p + c];
      mask(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = missing[r * p + c];
    }
  }
  for (std::size_t c = 0; c < p && n > 0; ++c) {
    if (mask.col(static_cast<Eigen::Index>(c)).all()) {
      throw DataError(src + ": column \"" + names[c] + "\" is fully missing");
    }
  }
  try {
    return DataMatrix(std::move(m), std::move(mask), std::move(names));
  } catch (const DataError& e) {
    throw DataError(src + ": " + e.what());
  }
}

DataMatrix load_csv(const std::filesystem::path& path, std::string_view na_token) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_csv(in, na_token, path.string());
}

void write_csv(const DataMatrix& m, std::ostream& out, std::string_view na_token) {
  const auto& names = m.col_names();
  for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
  out << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      if (m.is_missing(r, c)) {
        out << na_token;
      } else {
        out << format_double(m.at(r, c));
      }
    }
    out << '\n';
  }
}

void write_csv(const DataMatrix& m, const std::filesystem::path& path, std::string_view na_token) {
  auto out = open_for_write(path);
  write_csv(m, out, na_token);
  if (!out) throw DataError("write to " + path.string() + " failed");
}

std::vector<Cell> load_positions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty positions file");
  const auto header = split_csv_line(line);
  if (header.size() != 2 || header[0] != "row" || header[1] != "col") {
    throw DataError(path.string() + ": positions header must be \"row,col\"");
  }
  std::vector<Cell> cells;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++n;
    const auto f = split_csv_line(line);
    if (f.size() != 2) throw DataError(path.string() + ": row " + std::to_string(n) + " needs 2 fields");
    Cell cell;
    for (std::size_t k = 0; k < 2; ++k) {
      std::size_t v = 0;
      const auto res = std::from_chars(f[k].data(), f[k].data() + f[k].size(), v);
      if (res.ec != std::errc() || res.ptr != f[k].data() + f[k].size()) {
        throw ParseError(path.string(), n, k + 1, std::string(f[k]));
      }
      (k == 0 ? cell.row : cell.col) = v;
    }
    cells.push_back(cell);
  }
  return cells;
}

void write_positions(const std::vector<Cell>& cells, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "row,col\n";
  for (const auto& c : cells) out << c.row << ',' << c.col << '\n';
  if (!out) throw DataError("write to " + path.string() + " failed");
}

}  // namespace mifo
