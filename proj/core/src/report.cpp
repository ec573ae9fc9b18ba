#include "mifo/report.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "mifo/csv.hpp"
#include "mifo/error.hpp"

namespace mifo {

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

std::string short_number(double v, const char* fmt = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::string rate_label(double rate) { return short_number(rate * 100.0, "%g") + "%"; }

void pivot(std::ostringstream& out, const BenchmarkGrid& grid, const std::string& title,
           std::optional<double> (BenchmarkGrid::*stat)(std::string_view, double) const) {
  out << "## " << title << "\n\n| method |";
  for (double r : grid.rates) out << ' ' << rate_label(r) << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < grid.rates.size(); ++i) out << "---|";
  out << '\n';
  for (const auto& m : grid.methods) {
    out << "| " << m << " |";
    for (double r : grid.rates) {
      const auto v = (grid.*stat)(m, r);
      out << ' ' << (v ? short_number(*v, "%.6g") : std::string("error")) << " |";
    }
    out << '\n';
  }
  out << '\n';
}

}  // namespace

std::string render_report(const BenchmarkGrid& grid, ReportFormat format) {
  std::ostringstream out;
  if (format == ReportFormat::csv) {
    out << kGridCsvHeader << '\n';
    for (const auto& c : grid.cells) {
      out << c.method << ',' << format_double(c.rate) << ',' << c.seed << ',';
      if (c.ok()) {
        out << opt(c.nrmse) << ',' << opt(c.nmae) << ',' << format_double(c.wall_seconds) << ','
            << (c.converged ? "true" : "false");
      } else {
        out << "NA,NA,NA,error";
      }
      out << '\n';
    }
    return out.str();
  }

  pivot(out, grid, "NRMSE (median over seeds)", &BenchmarkGrid::median_nrmse);
  pivot(out, grid, "NMAE (median over seeds)", &BenchmarkGrid::median_nmae);
  pivot(out, grid, "Runtime in seconds (median over seeds)", &BenchmarkGrid::median_seconds);
  bool header = false;
  for (const auto& c : grid.cells) {
    if (c.ok()) continue;
    if (!header) {
      out << "## Failed cells\n\n";
      header = true;
    }
    out << "- " << c.method << " at " << rate_label(c.rate) << ", seed " << c.seed << ": " << c.error << '\n';
  }
  return out.str();
}

std::string render_report(const SweepGrid& grid, ReportFormat format) {
  std::ostringstream out;
  if (format == ReportFormat::csv) {
    out << kSweepCsvHeader << '\n';
    for (const auto& c : grid.cells) {
      out << c.mtry << ',' << c.ntree << ',' << c.mtry_used << ',' << opt(c.nrmse_pct) << ','
          << opt(c.nmae_pct) << ',' << (c.ok() ? format_double(c.wall_seconds) : "NA") << ','
          << c.iterations << ',' << (c.clamped ? "true" : "false") << '\n';
    }
    return out.str();
  }

  out << "## NRMSE% / NMAE% and runtime at " << rate_label(grid.rate) << " missing\n\n| mtry \\ ntree |";
  for (auto t : grid.ntree_values) out << ' ' << t << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < grid.ntree_values.size(); ++i) out << "---|";
  out << '\n';
  for (auto m : grid.mtry_values) {
    out << "| " << m;
    if (const auto* first = grid.find(m, grid.ntree_values.front()); first && first->clamped) {
      out << " (used " << first->mtry_used << ")";
    }
    out << " |";
    for (auto t : grid.ntree_values) {
      const auto* c = grid.find(m, t);
      if (c == nullptr || !c->ok()) {
        out << " error |";
        continue;
      }
      out << ' ' << short_number(*c->nrmse_pct, "%.2f") << '/' << short_number(*c->nmae_pct, "%.2f") << ' '
          << short_number(c->wall_seconds, "%.2f") << "s |";
    }
    out << '\n';
  }
  return out.str();
}

std::vector<BenchmarkCell> parse_grid_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line).size() != 7 ||
      (line.back() == '\r' ? line.substr(0, line.size() - 1) : line) != kGridCsvHeader) {
    throw DataError("grid CSV must start with \"" + std::string(kGridCsvHeader) + "\"");
  }
  auto number = [](std::string_view f, std::size_t row, std::size_t col) {
    double v = 0.0;
    if (!parse_double(f, v)) throw ParseError("grid csv", row, col, std::string(f));
    return v;
  };
  std::vector<BenchmarkCell> cells;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    const auto f = split_csv_line(line);
    if (f.size() != 7) throw DataError("grid csv row " + std::to_string(row) + " needs 7 fields");
    BenchmarkCell c;
    c.method = std::string(f[0]);
    c.rate = number(f[1], row, 2);
    const auto res = std::from_chars(f[2].data(), f[2].data() + f[2].size(), c.seed);
    if (res.ec != std::errc() || res.ptr != f[2].data() + f[2].size()) {
      throw ParseError("grid csv", row, 3, std::string(f[2]));
    }
    if (f[6] == "error") {
      c.error = "error";
    } else {
      if (f[3] != "NA") c.nrmse = number(f[3], row, 4);
      if (f[4] != "NA") c.nmae = number(f[4], row, 5);
      c.wall_seconds = number(f[5], row, 6);
      c.converged = f[6] == "true";
    }
    cells.push_back(std::move(c));
  }
  return cells;
}

}  // namespace mifo
