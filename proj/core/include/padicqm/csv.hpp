#pragma once

#include <complex>
#include <string>
#include <vector>

namespace padicqm {

/// Shortest round-trip decimal rendering of a double ("%.17g"), byte-stable
/// for deterministic output files.
std::string format_double(double v);
std::string format_complex_pair(const std::complex<double>& v);

std::vector<std::string> split(const std::string& line, char sep);

/// Strips leading/trailing whitespace.
std::string trim(const std::string& s);

double parse_double(const std::string& s, const std::string& context);
long long parse_int(const std::string& s, const std::string& context);

}  // namespace padicqm
