#include "birgn/field_csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "birgn/errors.hpp"

namespace birgn {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  // from_chars rejects a leading '+', which other writers sometimes emit.
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ParseError("not a number: '" + text + "'");
  }
  return v;
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  return cells;
}

}  // namespace

void write_field_csv(std::ostream& out, const Field& f) {
  const auto& g = *f.grid();
  out << (g.dimension() == 1 ? "index,coord,value\n" : "index,coord,coord2,value\n");
  for (std::size_t k = 0; k < f.size(); ++k) {
    out << k << ',' << format_double(g.coord(k, 0)) << ',';
    if (g.dimension() == 2) out << format_double(g.coord(k, 1)) << ',';
    out << format_double(f[k]) << '\n';
  }
}

void write_field_csv(const std::string& path, const Field& f) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_field_csv(out, f);
}

Field read_field_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("field CSV: empty input");
  const auto header = split_row(line);
  int dimension = 0;
  if (header == std::vector<std::string>{"index", "coord", "value"}) {
    dimension = 1;
  } else if (header == std::vector<std::string>{"index", "coord", "coord2", "value"}) {
    dimension = 2;
  } else {
    throw ParseError("field CSV: unexpected header '" + line + "'");
  }

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_row(line);
    if (cells.size() != static_cast<std::size_t>(dimension) + 2) {
      throw ParseError("field CSV: wrong column count in row '" + line + "'");
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_double(c));
    rows.push_back(std::move(row));
  }

  int subdivisions = 0;
  if (dimension == 1) {
    subdivisions = static_cast<int>(rows.size()) - 1;
  } else {
    const auto m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(rows.size()))));
    if (static_cast<std::size_t>(m) * static_cast<std::size_t>(m) != rows.size()) {
      throw ParseError("field CSV: 2D row count is not a perfect square");
    }
    subdivisions = m - 1;
  }
  if (subdivisions < 1) throw ParseError("field CSV: too few rows");

  auto grid = dimension == 1 ? Grid::unit_interval(subdivisions) : Grid::unit_square(subdivisions);
  Field f(grid);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& row = rows[k];
    if (row[0] != static_cast<double>(k)) throw ParseError("field CSV: rows out of order");
    for (int axis = 0; axis < dimension; ++axis) {
      if (std::abs(row[1 + axis] - grid->coord(k, axis)) > 1e-9) {
        throw ParseError("field CSV: coordinates do not match a uniform grid at row " +
                         std::to_string(k));
      }
    }
    f[k] = row.back();
  }
  if (!f.all_finite()) throw InvalidField("field CSV: non-finite value");
  return f;
}

Field read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_field_csv(in);
}

}  // namespace birgn
