#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sdi::cli {

/// Entry point for the `sdi` tool. Subcommands: simulate, extract, estimate,
/// check-farfield, report. Returns the process exit code:
/// 0 success, 2 invalid input, 3 numerical failure, 4 degenerate data.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

/// Same, taking arguments without the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

enum class FarFieldVerdict { Pass, Warn, Fail };

/// pass: standoff >= 2 d_F, warn: d_F <= standoff < 2 d_F, fail: below d_F.
FarFieldVerdict far_field_verdict(double standoff_m, double fraunhofer_m);
std::string to_string(FarFieldVerdict verdict);

} // namespace sdi::cli
