#include <cmath>
#include <limits>

#include "doctest.h"
#include "steklov/serialize.hpp"

using namespace steklov;
using geometry::DomainSpec;

TEST_CASE("real formatting") {
  CHECK(io::format_real(0.0) == "0.000000000000");
  CHECK(io::format_real(-0.0) == "0.000000000000");
  CHECK(io::format_real(0.5) == "0.5");
  CHECK(io::format_real(1.0) == "1");
  CHECK(io::format_real(1.0 / 3.0) == "0.333333333333");
  CHECK(io::format_real(1.19967864026193) == "1.19967864026");
  CHECK(io::format_real(1e-20) == "1e-20");
  CHECK(io::round12(1.0 / 3.0) == 0.333333333333);
  CHECK(io::round12(2.0) == 2.0);
}

TEST_CASE("spectrum CSV") {
  const auto s = analytic::cylinder_spectrum(2.0, 3);
  const std::string csv = io::spectrum_csv(s);
  CHECK(csv.rfind("0,0.000000000000,1,const\n1,0.5,1,linear-t\n", 0) == 0);
  CHECK(csv.find("\n2,0.964027580076,2,k1-cosh\n3,1.03731472073,2,k1-sinh\n") != std::string::npos);
  int lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == static_cast<int>(s.entries.size()));
  CHECK(csv == io::spectrum_csv(analytic::cylinder_spectrum(2.0, 3)));
}

TEST_CASE("spectrum JSON") {
  const auto j = io::spectrum_json(analytic::disk_spectrum(1.0, 2));
  CHECK(j["schema"] == io::kSchema);
  CHECK(j["source"] == "analytic");
  CHECK(j["domain"]["kind"] == "disk");
  REQUIRE(j["entries"].size() == 3);
  CHECK(j["entries"][1]["value"] == 1.0);
  CHECK(j["entries"][1]["multiplicity"] == 2);
  const auto again = nlohmann::ordered_json::parse(j.dump());
  CHECK(again == j);
}

TEST_CASE("spectrum comparison") {
  const auto rows = io::compare_spectra(analytic::disk_spectrum(1.0, 2), {1e-12, 0.99, 1.01, 2.02});
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].relative_error == doctest::Approx(1e-12));
  CHECK(rows[1].analytic == 1.0);
  CHECK(rows[1].relative_error == doctest::Approx(0.01));
  CHECK(rows[2].index == 2);
  CHECK(rows[3].relative_error == doctest::Approx(0.01));
}

TEST_CASE("report JSON") {
  const auto r = diagnostics::run_full_report(DomainSpec::flat_cylinder(2.0), 12);
  const auto j = io::report_json(r);
  CHECK(j["schema"] == io::kSchema);
  for (const char* key : {"domain", "resolution", "sigma1", "sigma1_multiplicity", "sigma1_analytic", "eigenvalues",
                          "gradient_stats", "eigenspace_scan", "trace_constant", "delta_flags", "weinstock_product",
                          "boundary_length", "component_lengths", "topology", "verdict_numeric", "verdict_analytic",
                          "threshold_zone", "verdicts_agree", "gauss_bonnet", "trace_check", "mean_values",
                          "boundary_orthogonality", "thresholds"}) {
    CHECK_MESSAGE(j.contains(key), key);
  }
  CHECK(j["weinstock_product"].is_null());
  CHECK(j["topology"]["euler_char"] == 0);
  CHECK(j["delta_flags"] == nlohmann::json::array({false, false}));
  CHECK(j["verdict_analytic"]["equivalence_class"] == "cylinder-type");
  CHECK(j.dump() == io::report_json(diagnostics::run_full_report(DomainSpec::flat_cylinder(2.0), 12)).dump());
  CHECK(nlohmann::ordered_json::parse(j.dump()) == j);
  const std::string text = io::report_text(r);
  CHECK(text.find("solvable") != std::string::npos);
}

TEST_CASE("non-finite values become null") {
  diagnostics::SolvabilityReport r = diagnostics::run_full_report(DomainSpec::flat_disk(1.0), 6);
  r.boundary_orthogonality = std::numeric_limits<double>::quiet_NaN();
  CHECK(io::report_json(r)["boundary_orthogonality"].is_null());
}
