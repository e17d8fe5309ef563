#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "birgn/schedule.hpp"

namespace birgn {

/// `n,alpha,residual,inner_iters,error_to_truth`; error_to_truth is left empty
/// when no truth was supplied. Doubles use shortest round-trip text.
void write_history_csv(std::ostream& out, const std::vector<IterationRecord>& records);
void write_history_csv(const std::string& path, const std::vector<IterationRecord>& records);

std::vector<IterationRecord> read_history_csv(std::istream& in);
std::vector<IterationRecord> read_history_csv(const std::string& path);

}  // namespace birgn
