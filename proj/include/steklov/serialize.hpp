#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "steklov/analytic.hpp"
#include "steklov/diagnostics.hpp"

namespace steklov::io {

inline constexpr const char* kSchema = "steklov-lab/1";

// 12 significant digits; an exact zero prints as 0.000000000000.
std::string format_real(double v);
// Real rounded to 12 significant digits, for JSON output.
double round12(double v);

nlohmann::ordered_json domain_json(const geometry::DomainSpec& spec);

// index,value,multiplicity,label (no header line).
std::string spectrum_csv(const analytic::Spectrum& s);
nlohmann::ordered_json spectrum_json(const analytic::Spectrum& s);
std::string spectrum_text(const analytic::Spectrum& s);

// Per-eigenvalue comparison with multiplicities expanded.
struct ComparisonRow {
  int index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double relative_error = 0.0;  // absolute error when the analytic value is 0
  std::string label;
};
std::vector<ComparisonRow> compare_spectra(const analytic::Spectrum& exact, const std::vector<double>& numeric);

nlohmann::ordered_json report_json(const diagnostics::SolvabilityReport& r);
std::string report_text(const diagnostics::SolvabilityReport& r);

}  // namespace steklov::io
