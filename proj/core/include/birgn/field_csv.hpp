#pragma once

#include <iosfwd>
#include <string>

#include "birgn/field.hpp"

namespace birgn {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);
double parse_double(const std::string& text);

/// CSV with header `index,coord,value` (1D) or `index,coord,coord2,value` (2D),
/// one node per row in grid order.
void write_field_csv(std::ostream& out, const Field& f);
void write_field_csv(const std::string& path, const Field& f);

/// Infers dimension from the header and subdivisions from the row count.
Field read_field_csv(std::istream& in);
Field read_field_csv(const std::string& path);

}  // namespace birgn
