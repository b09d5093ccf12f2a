// steklov-lab: Steklov spectra, solvability reports, parameter sweeps and
// the verification suite from the command line.
//
// Exit codes: 0 success, 1 computation failure, 2 usage error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "steklov/analytic.hpp"
#include "steklov/diagnostics.hpp"
#include "steklov/geometry.hpp"
#include "steklov/parallel.hpp"
#include "steklov/serialize.hpp"
#include "steklov/solver.hpp"
#include "steklov/verify.hpp"

namespace {

using namespace steklov;
using geometry::DomainKind;
using geometry::DomainSpec;
using nlohmann::ordered_json;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DomainFlags {
  std::string domain;
  std::optional<double> L;
  std::optional<double> R;
  std::optional<double> radius;
  std::optional<double> eps;
  std::optional<int> mode_m;
};

struct OutputFlags {
  std::string format;
  std::string out;
};

void add_domain_flags(CLI::App* cmd, DomainFlags& f) {
  cmd->add_option("--domain", f.domain, "disk | cylinder | band | cap | hyperbolic-disk | perturbed-disk")->required();
  cmd->add_option("--L", f.L, "half-length of a flat cylinder");
  cmd->add_option("--R", f.R, "geodesic radius of a cap or hyperbolic disk, half-angle of a band");
  cmd->add_option("--radius", f.radius, "radius of a flat or perturbed disk (default 1)");
  cmd->add_option("--eps", f.eps, "perturbation amplitude of a perturbed disk");
  cmd->add_option("--mode-m", f.mode_m, "angular mode of a perturbed disk");
}

void add_output_flags(CLI::App* cmd, OutputFlags& f, const std::string& default_format,
                      const std::vector<std::string>& formats) {
  f.format = default_format;
  cmd->add_option("--format", f.format, "output format")->check(CLI::IsMember(formats))->capture_default_str();
  cmd->add_option("--out", f.out, "write output to this file instead of stdout");
}

DomainSpec build_spec(const DomainFlags& f) {
  DomainKind kind;
  try {
    kind = geometry::domain_kind_from_string(f.domain);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  auto reject = [&](bool present, const char* flag) {
    if (present) throw UsageError(std::string(flag) + " does not apply to --domain " + f.domain);
  };
  auto need = [&](const auto& value, const char* flag) {
    if (!value) throw UsageError("--domain " + f.domain + " requires " + flag);
    return *value;
  };
  DomainSpec spec;
  switch (kind) {
    case DomainKind::FlatDisk:
      reject(f.L.has_value(), "--L");
      reject(f.R.has_value(), "--R");
      reject(f.eps.has_value(), "--eps");
      reject(f.mode_m.has_value(), "--mode-m");
      spec = DomainSpec::flat_disk(f.radius.value_or(1.0));
      break;
    case DomainKind::FlatCylinder:
      reject(f.R.has_value(), "--R");
      reject(f.radius.has_value(), "--radius");
      reject(f.eps.has_value(), "--eps");
      reject(f.mode_m.has_value(), "--mode-m");
      spec = DomainSpec::flat_cylinder(need(f.L, "--L"));
      break;
    case DomainKind::SphericalBand:
    case DomainKind::SphericalCap:
    case DomainKind::HyperbolicDisk: {
      reject(f.L.has_value(), "--L");
      reject(f.radius.has_value(), "--radius");
      reject(f.eps.has_value(), "--eps");
      reject(f.mode_m.has_value(), "--mode-m");
      const double R = need(f.R, "--R");
      spec = kind == DomainKind::SphericalBand  ? DomainSpec::spherical_band(R)
             : kind == DomainKind::SphericalCap ? DomainSpec::spherical_cap(R)
                                                : DomainSpec::hyperbolic_disk(R);
      break;
    }
    case DomainKind::PerturbedDisk:
      reject(f.L.has_value(), "--L");
      reject(f.R.has_value(), "--R");
      if (f.radius && *f.radius != 1.0) throw UsageError("perturbed disks have unit mean radius");
      spec = DomainSpec::perturbed_disk(need(f.eps, "--eps"), need(f.mode_m, "--mode-m"));
      break;
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return spec;
}

void check_resolution(int n) {
  if (n < 4) throw UsageError("--resolution must be at least 4");
}

void emit(const OutputFlags& out, const std::string& text) {
  if (out.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream file(out.out, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + out.out + " for writing");
  file << text;
  if (!file) throw std::runtime_error("write to " + out.out + " failed");
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

// Leading eigenvalues of the closed-form spectrum, grown until the first
// `count` values no longer change when more modes are admitted.
std::vector<std::pair<double, std::string>> analytic_prefix(const DomainSpec& spec, std::size_t count) {
  auto expand = [&](int kmax) {
    std::vector<std::pair<double, std::string>> out;
    const auto spectrum = analytic::analytic_spectrum(spec, kmax);
    for (const auto& e : spectrum->entries) {
      for (int m = 0; m < e.multiplicity; ++m) out.emplace_back(e.value, e.label);
    }
    return out;
  };
  int kmax = std::max<int>(2, static_cast<int>(count));
  auto current = expand(kmax);
  for (;;) {
    auto wider = expand(2 * kmax);
    bool stable = current.size() >= count;
    for (std::size_t i = 0; stable && i < count; ++i) stable = current[i].first == wider[i].first;
    if (stable) break;
    kmax *= 2;
    current = std::move(wider);
  }
  current.resize(count);
  return current;
}

// ---------------------------------------------------------------- spectrum

struct SpectrumArgs {
  DomainFlags domain;
  OutputFlags output;
  int kmax = 3;
  std::string method = "analytic";
  int resolution = 32;
};

analytic::Spectrum fem_spectrum(const DomainSpec& spec, int resolution, int count,
                                std::vector<double>* sigmas = nullptr) {
  const auto build = geometry::make_mesh(spec, resolution);
  const fem::SteklovProblem problem(build.mesh);
  const fem::SolverConfig config;
  const auto sols = problem.solve(count, config);
  if (sigmas) {
    for (const auto& s : sols) sigmas->push_back(s.sigma);
  }
  return fem::numeric_spectrum(sols, config.cluster_gap, spec);
}

std::string run_spectrum(const SpectrumArgs& a) {
  const DomainSpec spec = build_spec(a.domain);
  if (a.kmax < 1) throw UsageError("--kmax must be at least 1");
  check_resolution(a.resolution);
  const auto exact = analytic::analytic_spectrum(spec, a.kmax);
  if (!exact && a.method != "fem") {
    throw UsageError("no closed-form spectrum for " + spec.describe() + "; use --method fem");
  }
  const int count = exact ? static_cast<int>(exact->expanded().size()) : 2 * a.kmax + 1;
  const std::string& fmt = a.output.format;

  if (a.method == "analytic") {
    if (fmt == "csv") return io::spectrum_csv(*exact);
    if (fmt == "json") return dump(io::spectrum_json(*exact));
    return io::spectrum_text(*exact);
  }

  std::vector<double> sigmas;
  const auto numeric = fem_spectrum(spec, a.resolution, count, &sigmas);
  if (a.method == "fem") {
    if (fmt == "csv") return io::spectrum_csv(numeric);
    if (fmt == "json") {
      ordered_json j = io::spectrum_json(numeric);
      j["resolution"] = a.resolution;
      return dump(j);
    }
    return io::spectrum_text(numeric);
  }

  const auto prefix = analytic_prefix(spec, sigmas.size());
  analytic::Spectrum flat;
  flat.domain = spec;
  for (const auto& [value, label] : prefix) flat.entries.push_back({value, 1, label});
  const auto rows = io::compare_spectra(flat, sigmas);
  if (fmt == "csv") {
    std::ostringstream os;
    for (const auto& r : rows) {
      os << r.index << ',' << io::format_real(r.analytic) << ',' << io::format_real(r.numeric) << ','
         << io::format_real(r.relative_error) << ',' << r.label << '\n';
    }
    return os.str();
  }
  if (fmt == "json") {
    ordered_json cmp = ordered_json::array();
    for (const auto& r : rows) {
      cmp.push_back({{"index", r.index},
                     {"analytic", io::round12(r.analytic)},
                     {"numeric", io::round12(r.numeric)},
                     {"relative_error", io::round12(r.relative_error)},
                     {"label", r.label}});
    }
    ordered_json ana = io::spectrum_json(*exact);
    ordered_json num = io::spectrum_json(numeric);
    ana.erase("schema");
    num.erase("schema");
    return dump({{"schema", io::kSchema},
                 {"domain", io::domain_json(spec)},
                 {"resolution", a.resolution},
                 {"analytic", std::move(ana)},
                 {"numeric", std::move(num)},
                 {"comparison", std::move(cmp)}});
  }
  std::ostringstream os;
  os << "spectrum of " << spec.describe() << ", resolution " << a.resolution << '\n';
  char line[200];
  std::snprintf(line, sizeof line, "  %5s  %-20s %-20s %-20s %s\n", "index", "analytic", "numeric", "rel.error",
                "label");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "  %5d  %-20s %-20s %-20s %s\n", r.index, io::format_real(r.analytic).c_str(),
                  io::format_real(r.numeric).c_str(), io::format_real(r.relative_error).c_str(), r.label.c_str());
    os << line;
  }
  return os.str();
}

// ---------------------------------------------------------------- report

struct ReportArgs {
  DomainFlags domain;
  OutputFlags output;
  int resolution = 32;
};

std::string run_report(const ReportArgs& a) {
  const DomainSpec spec = build_spec(a.domain);
  check_resolution(a.resolution);
  const auto report = diagnostics::run_full_report(spec, a.resolution);
  if (a.output.format == "json") return dump(io::report_json(report));
  return io::report_text(report);
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::string domain = "cylinder";
  double from = 0.0;
  double to = 0.0;
  int steps = 17;
  std::string method = "both";
  int resolution = 32;
  OutputFlags output;
};

struct SweepRow {
  double param = 0.0;
  double length = 0.0;  // half-length of the (equivalent) flat cylinder
  double gap = 0.0;     // 1/L - tanh L
  analytic::Sigma1 exact;
  bool verdict_analytic = false;
  std::optional<diagnostics::SolvabilityReport> report;
};

double crossing_gap(double L) { return 1.0 / L - std::tanh(L); }

std::string run_sweep(const SweepArgs& a) {
  const bool band = a.domain == "band";
  if (!band && a.domain != "cylinder") throw UsageError("sweep supports --domain cylinder or band");
  if (a.steps < 2) throw UsageError("--steps must be at least 2");
  if (!(a.from < a.to)) throw UsageError("empty range: --from must be below --to");
  check_resolution(a.resolution);
  const bool fem = a.method != "analytic";
  auto spec_at = [&](double x) { return band ? DomainSpec::spherical_band(x) : DomainSpec::flat_cylinder(x); };
  auto length_at = [&](double x) { return band ? geometry::band_cylinder_map(x) : x; };

  std::vector<SweepRow> rows(a.steps);
  for (int i = 0; i < a.steps; ++i) {
    SweepRow& r = rows[i];
    r.param = a.from + (a.to - a.from) * i / (a.steps - 1);
    const DomainSpec spec = spec_at(r.param);
    try {
      spec.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    r.length = length_at(r.param);
    r.gap = crossing_gap(r.length);
    r.exact = analytic::sigma1_cylinder(r.length);
    if (band) r.exact.value *= std::cosh(r.length);
    r.verdict_analytic = analytic::solvability_verdict(spec).solvable;
  }
  if (fem) {
    std::vector<std::string> errors(rows.size());
    parallel_for(
        a.steps,
        [&](int i) {
          try {
            rows[i].report = diagnostics::run_full_report(spec_at(rows[i].param), a.resolution);
          } catch (const std::exception& e) {
            errors[i] = e.what();
          }
        },
        1);
    for (const auto& e : errors) {
      if (!e.empty()) throw std::runtime_error(e);
    }
  }

  // Bracket the sign change of 1/L - tanh L and refine by bisection.
  std::optional<double> crossing;
  for (int i = 0; i + 1 < a.steps && !crossing; ++i) {
    if ((rows[i].gap > 0.0) != (rows[i + 1].gap > 0.0)) {
      double lo = rows[i].param;
      double hi = rows[i + 1].param;
      const bool lo_positive = rows[i].gap > 0.0;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((crossing_gap(length_at(mid)) > 0.0) == lo_positive) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      crossing = 0.5 * (lo + hi);
    }
  }
  auto verdict = [&](const SweepRow& r) { return fem ? r.report->verdict_numeric : r.verdict_analytic; };
  int flips = 0;
  std::optional<std::pair<double, double>> flip_bracket;
  for (int i = 0; i + 1 < a.steps; ++i) {
    if (verdict(rows[i]) != verdict(rows[i + 1])) {
      ++flips;
      if (!flip_bracket) flip_bracket = {rows[i].param, rows[i + 1].param};
    }
  }
  const char* pname = band ? "R" : "L";

  if (a.output.format == "json") {
    ordered_json jr = ordered_json::array();
    for (const auto& r : rows) {
      ordered_json j{{pname, io::round12(r.param)},
                     {"cylinder_length", io::round12(r.length)},
                     {"gap", io::round12(r.gap)},
                     {"sigma1_analytic", io::round12(r.exact.value)},
                     {"multiplicity_analytic", r.exact.multiplicity},
                     {"verdict_analytic", r.verdict_analytic}};
      if (fem) {
        j["sigma1_fem"] = io::round12(r.report->sigma1);
        j["cluster_size"] = r.report->sigma1_multiplicity;
        j["best_cv"] = io::round12(r.report->scan.best_cv);
        j["verdict_numeric"] = r.report->verdict_numeric;
        j["threshold_zone"] = r.report->threshold_zone;
      }
      jr.push_back(std::move(j));
    }
    ordered_json flip = nullptr;
    if (flip_bracket) flip = {io::round12(flip_bracket->first), io::round12(flip_bracket->second)};
    return dump({{"schema", io::kSchema},
                 {"domain", a.domain},
                 {"parameter", pname},
                 {"method", a.method},
                 {"resolution", fem ? ordered_json(a.resolution) : ordered_json(nullptr)},
                 {"rows", std::move(jr)},
                 {"crossing", crossing ? ordered_json(io::round12(*crossing)) : ordered_json(nullptr)},
                 {"verdict_flips", flips},
                 {"first_flip", std::move(flip)}});
  }

  const bool csv = a.output.format == "csv";
  const char* sep = csv ? "," : " ";
  std::ostringstream os;
  std::vector<std::string> cols{pname, "cylinder_length", "gap", "sigma1_analytic", "mult_analytic",
                                "verdict_analytic"};
  if (fem) {
    for (const char* c : {"sigma1_fem", "cluster_size", "best_cv", "verdict_numeric", "threshold_zone"}) {
      cols.emplace_back(c);
    }
  }
  if (!csv) {
    os << "# steklov-lab sweep domain=" << a.domain << " method=" << a.method;
    if (fem) os << " resolution=" << a.resolution;
    os << "\n# ";
  }
  for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? sep : "") << cols[c];
  os << '\n';
  for (const auto& r : rows) {
    os << io::format_real(r.param) << sep << io::format_real(r.length) << sep << io::format_real(r.gap) << sep
       << io::format_real(r.exact.value) << sep << r.exact.multiplicity << sep << (r.verdict_analytic ? 1 : 0);
    if (fem) {
      os << sep << io::format_real(r.report->sigma1) << sep << r.report->sigma1_multiplicity << sep
         << io::format_real(r.report->scan.best_cv) << sep << (r.report->verdict_numeric ? 1 : 0) << sep
         << (r.report->threshold_zone ? 1 : 0);
    }
    os << '\n';
  }
  if (!csv) {
    os << "# crossing " << pname << " = " << (crossing ? io::format_real(*crossing) : std::string("none")) << '\n';
    os << "# verdict flips: " << flips;
    if (flip_bracket) {
      os << " (first between " << io::format_real(flip_bracket->first) << " and "
         << io::format_real(flip_bracket->second) << ")";
    }
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------- constants

std::string run_constants(const OutputFlags& out) {
  const double L0 = analytic::critical_length();
  const double R0 = analytic::critical_band_radius();
  const double res_L = std::abs(L0 * std::tanh(L0) - 1.0);
  const double res_R = std::abs(R0 - 2.0 * std::atan(std::tanh(L0 / 2.0)));
  if (out.format == "json") {
    return dump({{"schema", io::kSchema},
                 {"L0", io::round12(L0)},
                 {"R0", io::round12(R0)},
                 {"residual_L0", io::round12(res_L)},
                 {"residual_R0", io::round12(res_R)}});
  }
  std::ostringstream os;
  if (out.format == "csv") {
    os << "L0," << io::format_real(L0) << "\nR0," << io::format_real(R0) << "\nresidual_L0,"
       << io::format_real(res_L) << "\nresidual_R0," << io::format_real(res_R) << '\n';
    return os.str();
  }
  os << "L0           " << io::format_real(L0) << "   (L0 tanh L0 = 1)\n";
  os << "R0           " << io::format_real(R0) << "   (2 atan tanh(L0/2))\n";
  os << "|L0 tanh L0 - 1|            " << io::format_real(res_L) << '\n';
  os << "|R0 - 2 atan tanh(L0/2)|    " << io::format_real(res_R) << '\n';
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steklov eigenvalues and overdetermined-problem diagnostics on model surfaces", "steklov-lab"};
  app.require_subcommand(1, 1);

  SpectrumArgs spectrum;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "closed-form and finite element Steklov spectra");
  add_domain_flags(spectrum_cmd, spectrum.domain);
  spectrum_cmd->add_option("--kmax", spectrum.kmax, "highest angular frequency")->capture_default_str();
  spectrum_cmd->add_option("--method", spectrum.method, "analytic | fem | both")
      ->check(CLI::IsMember({"analytic", "fem", "both"}))
      ->capture_default_str();
  spectrum_cmd->add_option("--resolution", spectrum.resolution, "mesh resolution")->capture_default_str();
  add_output_flags(spectrum_cmd, spectrum.output, "csv", {"csv", "json", "text"});

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "full solvability report for one domain");
  add_domain_flags(report_cmd, report.domain);
  report_cmd->add_option("--resolution", report.resolution, "mesh resolution")->capture_default_str();
  add_output_flags(report_cmd, report.output, "json", {"json", "text"});

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "sweep cylinder half-length or band half-angle");
  sweep_cmd->add_option("--domain", sweep.domain, "cylinder | band")->capture_default_str();
  sweep_cmd->add_option("--from", sweep.from, "first parameter value")->required();
  sweep_cmd->add_option("--to", sweep.to, "last parameter value")->required();
  sweep_cmd->add_option("--steps", sweep.steps, "number of grid points")->capture_default_str();
  sweep_cmd->add_option("--method", sweep.method, "analytic | fem | both")
      ->check(CLI::IsMember({"analytic", "fem", "both"}))
      ->capture_default_str();
  sweep_cmd->add_option("--resolution", sweep.resolution, "mesh resolution")->capture_default_str();
  add_output_flags(sweep_cmd, sweep.output, "text", {"text", "csv", "json"});

  OutputFlags constants;
  auto* constants_cmd = app.add_subcommand("constants", "critical length L0 and band radius R0");
  add_output_flags(constants_cmd, constants, "text", {"text", "csv", "json"});

  verify::Options verify_opts;
  std::string fault = "none";
  OutputFlags verify_out;
  auto* verify_cmd = app.add_subcommand("verify", "run the invariant and acceptance checks");
  verify_cmd->add_option("--resolution", verify_opts.resolution, "mesh resolution")->capture_default_str();
  verify_cmd->add_option("--fault", fault, "inject a defect: none | mass-unscaled")
      ->check(CLI::IsMember({"none", "mass-unscaled"}))
      ->capture_default_str();
  add_output_flags(verify_cmd, verify_out, "text", {"text", "json"});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (spectrum_cmd->parsed()) {
      emit(spectrum.output, run_spectrum(spectrum));
    } else if (report_cmd->parsed()) {
      emit(report.output, run_report(report));
    } else if (sweep_cmd->parsed()) {
      emit(sweep.output, run_sweep(sweep));
    } else if (constants_cmd->parsed()) {
      emit(constants, run_constants(constants));
    } else if (verify_cmd->parsed()) {
      check_resolution(verify_opts.resolution);
      verify_opts.fault = verify::fault_from_string(fault);
      const auto summary = verify::run(verify_opts);
      emit(verify_out, verify_out.format == "json" ? dump(verify::summary_json(summary))
                                                   : verify::summary_text(summary));
      return summary.ok() ? 0 : kExitFailure;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\nRun with --help for more information.\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
