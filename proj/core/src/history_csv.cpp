#include "birgn/history_csv.hpp"

#include <fstream>
#include <sstream>

#include "birgn/errors.hpp"
#include "birgn/field_csv.hpp"

namespace birgn {

namespace {
constexpr const char* kHeader = "n,alpha,residual,inner_iters,error_to_truth";
}

void write_history_csv(std::ostream& out, const std::vector<IterationRecord>& records) {
  out << kHeader << '\n';
  for (const auto& r : records) {
    out << r.n << ',' << format_double(r.alpha_n) << ',' << format_double(r.residual_norm) << ','
        << r.inner_iterations << ',';
    if (r.error_to_truth) out << format_double(*r.error_to_truth);
    out << '\n';
  }
}

void write_history_csv(const std::string& path, const std::vector<IterationRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_history_csv(out, records);
}

std::vector<IterationRecord> read_history_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("history CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) throw ParseError("history CSV: unexpected header '" + line + "'");
  std::vector<IterationRecord> out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() == 4) cells.emplace_back();
    if (cells.size() != 5) throw ParseError("history CSV: bad row '" + line + "'");
    IterationRecord r;
    r.n = std::stoi(cells[0]);
    r.alpha_n = parse_double(cells[1]);
    r.residual_norm = parse_double(cells[2]);
    r.inner_iterations = std::stoi(cells[3]);
    if (!cells[4].empty()) r.error_to_truth = parse_double(cells[4]);
    out.push_back(r);
  }
  return out;
}

std::vector<IterationRecord> read_history_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_history_csv(in);
}

}  // namespace birgn
