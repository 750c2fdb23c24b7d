#pragma once

// Command-line front end. Subcommands: price, implied-vol, calibrate,
// simulate, fit-returns, capm, table1. Exit codes: 0 success, 1 domain or
// numerical error, 2 usage error.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "expopt/calibration_data.hpp"
#include "expopt/dynamics.hpp"
#include "expopt/returns_distributions.hpp"

namespace expopt::cli {

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Two-column CSV plot data with a one-line header. Empty payloads throw.
std::string plotdata_histogram(const Histogram& h);
std::string plotdata_smile(std::span<const ReportRow> rows);
std::string plotdata_density(const DensityGrid& g);

/// %.{digits}g formatting.
std::string format_number(double v, int digits);

}  // namespace expopt::cli
