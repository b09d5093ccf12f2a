#include "steklov/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace steklov::io {

using nlohmann::ordered_json;

std::string format_real(double v) {
  if (v == 0.0) return "0.000000000000";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double round12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

namespace {

ordered_json real(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round12(v);
}

ordered_json stats_json(const diagnostics::GradientStats& s) {
  return ordered_json{{"mean", real(s.mean)}, {"min", real(s.min)}, {"max", real(s.max)}, {"cv", real(s.cv)}};
}

ordered_json stats_list(const std::vector<diagnostics::GradientStats>& v) {
  ordered_json out = ordered_json::array();
  for (const auto& s : v) out.push_back(stats_json(s));
  return out;
}

ordered_json residual_json(const diagnostics::IdentityResidual& r) {
  return ordered_json{{"name", r.name},
                      {"max_abs_residual", real(r.max_abs_residual)},
                      {"sample_count", r.sample_count},
                      {"resolution", r.resolution},
                      {"skipped", r.skipped}};
}

}  // namespace

ordered_json domain_json(const geometry::DomainSpec& spec) {
  ordered_json d{{"kind", geometry::to_string(spec.kind)}};
  switch (spec.kind) {
    case geometry::DomainKind::FlatCylinder:
      d["half_length"] = real(spec.half_length);
      break;
    case geometry::DomainKind::PerturbedDisk:
      d["perturb_eps"] = real(spec.perturb_eps);
      d["perturb_mode"] = spec.perturb_mode;
      break;
    default:
      d["radius"] = real(spec.radius);
      break;
  }
  return d;
}

std::string spectrum_csv(const analytic::Spectrum& s) {
  std::ostringstream os;
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    const auto& e = s.entries[i];
    os << i << ',' << format_real(e.value) << ',' << e.multiplicity << ',' << e.label << '\n';
  }
  return os.str();
}

ordered_json spectrum_json(const analytic::Spectrum& s) {
  ordered_json entries = ordered_json::array();
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    const auto& e = s.entries[i];
    entries.push_back({{"index", i}, {"value", real(e.value)}, {"multiplicity", e.multiplicity}, {"label", e.label}});
  }
  return ordered_json{{"schema", kSchema},
                      {"source", analytic::to_string(s.source)},
                      {"domain", domain_json(s.domain)},
                      {"entries", std::move(entries)}};
}

std::string spectrum_text(const analytic::Spectrum& s) {
  std::ostringstream os;
  os << analytic::to_string(s.source) << " spectrum of " << s.domain.describe() << '\n';
  char buf[160];
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    const auto& e = s.entries[i];
    std::snprintf(buf, sizeof buf, "  %3zu  %-20s x%d  %s\n", i, format_real(e.value).c_str(), e.multiplicity,
                  e.label.c_str());
    os << buf;
  }
  return os.str();
}

std::vector<ComparisonRow> compare_spectra(const analytic::Spectrum& exact, const std::vector<double>& numeric) {
  std::vector<ComparisonRow> rows;
  std::vector<std::pair<double, std::string>> expanded;
  for (const auto& e : exact.entries) {
    for (int m = 0; m < e.multiplicity; ++m) expanded.emplace_back(e.value, e.label);
  }
  const std::size_t n = std::min(expanded.size(), numeric.size());
  for (std::size_t i = 0; i < n; ++i) {
    ComparisonRow r;
    r.index = static_cast<int>(i);
    r.analytic = expanded[i].first;
    r.numeric = numeric[i];
    r.label = expanded[i].second;
    const double err = std::abs(r.numeric - r.analytic);
    r.relative_error = r.analytic != 0.0 ? err / std::abs(r.analytic) : err;
    rows.push_back(r);
  }
  return rows;
}

ordered_json report_json(const diagnostics::SolvabilityReport& r) {
  ordered_json j;
  j["schema"] = kSchema;
  j["domain"] = domain_json(r.domain);
  j["resolution"] = r.resolution;
  j["sigma1"] = real(r.sigma1);
  j["sigma1_multiplicity"] = r.sigma1_multiplicity;
  j["sigma1_analytic"] = r.sigma1_analytic ? real(*r.sigma1_analytic) : ordered_json(nullptr);
  ordered_json eig = ordered_json::array();
  for (double v : r.eigenvalues) eig.push_back(real(v));
  j["eigenvalues"] = std::move(eig);

  ordered_json grads = ordered_json::array();
  for (const auto& g : r.gradient_stats) grads.push_back(stats_list(g));
  j["gradient_stats"] = std::move(grads);
  ordered_json coeffs = ordered_json::array();
  for (double c : r.scan.coefficients) coeffs.push_back(real(c));
  j["eigenspace_scan"] = {{"best_cv", real(r.scan.best_cv)},
                          {"coefficients", std::move(coeffs)},
                          {"stats", stats_list(r.scan.stats)},
                          {"worst_scanned_cv", real(r.scan.worst_scanned_cv)},
                          {"evaluations", r.scan.evaluations}};
  j["trace_constant"] = r.trace_constant;
  j["delta_flags"] = r.delta_flags;
  j["weinstock_product"] = r.weinstock_product ? real(*r.weinstock_product) : ordered_json(nullptr);
  j["boundary_length"] = real(r.boundary_length);
  ordered_json lengths = ordered_json::array();
  for (double l : r.component_lengths) lengths.push_back(real(l));
  j["component_lengths"] = std::move(lengths);
  j["topology"] = {{"genus", r.topology.genus},
                   {"boundary_count", r.topology.boundary_count},
                   {"euler_char", r.topology.euler_char}};
  j["verdict_numeric"] = r.verdict_numeric;
  j["verdict_analytic"] = {{"solvable", r.verdict_analytic.solvable},
                           {"equivalence_class", analytic::to_string(r.verdict_analytic.equivalence_class)},
                           {"cylinder_length", r.verdict_analytic.equivalence_class ==
                                                       analytic::EquivalenceClass::CylinderType
                                                   ? real(r.verdict_analytic.cylinder_length)
                                                   : ordered_json(nullptr)},
                           {"witness", r.verdict_analytic.witness}};
  j["threshold_zone"] = r.threshold_zone;
  j["verdicts_agree"] = r.verdicts_agree;
  j["gauss_bonnet"] = r.gauss_bonnet ? residual_json(*r.gauss_bonnet) : ordered_json(nullptr);
  ordered_json comps = ordered_json::array();
  for (const auto& c : r.trace_check.components) {
    comps.push_back({{"is_constant", c.is_constant}, {"value", real(c.value)}, {"cv", real(c.cv)}});
  }
  j["trace_check"] = {{"applicable", r.trace_check.applicable},
                      {"all_constant", r.trace_check.all_constant},
                      {"components", std::move(comps)},
                      {"sum_residual", real(r.trace_check.sum_residual)},
                      {"magnitude_residual", real(r.trace_check.magnitude_residual)},
                      {"consistent", r.trace_check.consistent}};
  ordered_json means = ordered_json::array();
  for (double m : r.mean_values) means.push_back(real(m));
  j["mean_values"] = std::move(means);
  j["boundary_orthogonality"] = real(r.boundary_orthogonality);
  j["thresholds"] = {{"tau_solv", real(r.thresholds.tau_solv)},
                     {"tau_const", real(r.thresholds.tau_const)},
                     {"scan_steps", r.thresholds.scan_steps},
                     {"fibonacci_points", r.thresholds.fibonacci_points}};
  return j;
}

std::string report_text(const diagnostics::SolvabilityReport& r) {
  std::ostringstream os;
  auto yes = [](bool b) { return b ? "yes" : "no"; };
  os << "domain            " << r.domain.describe() << "  (resolution " << r.resolution << ")\n";
  os << "topology          genus " << r.topology.genus << ", boundary components " << r.topology.boundary_count
     << ", euler characteristic " << r.topology.euler_char << '\n';
  os << "sigma1            " << format_real(r.sigma1) << "  multiplicity " << r.sigma1_multiplicity;
  if (r.sigma1_analytic) os << "  (closed form " << format_real(*r.sigma1_analytic) << ")";
  os << '\n';
  os << "best scan CV      " << format_real(r.scan.best_cv) << "  (tau_solv " << format_real(r.thresholds.tau_solv)
     << ")\n";
  os << "traces            ";
  for (std::size_t i = 0; i < r.trace_check.components.size(); ++i) {
    const auto& c = r.trace_check.components[i];
    os << (i ? ", " : "") << (c.is_constant ? "constant " + format_real(c.value) : std::string("varying"));
  }
  os << '\n';
  os << "boundary length   " << format_real(r.boundary_length) << '\n';
  if (r.weinstock_product) {
    os << "weinstock         sigma1 * L = " << format_real(*r.weinstock_product) << "  (2 pi = "
       << format_real(2.0 * geometry::kPi) << ")\n";
  }
  if (r.gauss_bonnet) os << "gauss-bonnet      residual " << format_real(r.gauss_bonnet->max_abs_residual) << '\n';
  os << "orthogonality     max |int rho u_k| = " << format_real(r.boundary_orthogonality) << '\n';
  os << "verdict           numeric " << (r.verdict_numeric ? "solvable" : "unsolvable") << ", analytic "
     << (r.verdict_analytic.solvable ? "solvable" : "unsolvable") << " ("
     << analytic::to_string(r.verdict_analytic.equivalence_class) << ")\n";
  os << "agreement         " << yes(r.verdicts_agree) << (r.threshold_zone ? "  [threshold zone]" : "") << '\n';
  os << "witness           " << r.verdict_analytic.witness << '\n';
  return os.str();
}

}  // namespace steklov::io
