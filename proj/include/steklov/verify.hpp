#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "steklov/diagnostics.hpp"

namespace steklov::verify {

// Deliberate defects used to check that the suite can fail.
enum class Fault {
  None,
  MassUnscaled,  // boundary mass ignores a rescaled boundary weight
};

Fault fault_from_string(const std::string& name);
std::string to_string(Fault fault);

struct Options {
  int resolution = 32;
  Fault fault = Fault::None;
  diagnostics::Thresholds thresholds;
};

struct Check {
  std::string suite;
  std::string name;
  bool passed = false;
  bool skipped = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string note;
};

struct Summary {
  int resolution = 0;
  std::string fault;
  std::vector<Check> checks;

  int passed() const;
  int failed() const;
  int skipped() const;
  bool ok() const { return failed() == 0; }
};

// Convergence-order checks need the resolution halved to stay meaningful.
inline constexpr int kMinConvergenceResolution = 16;
// Accuracy tolerances are pinned at this resolution and skipped below it.
inline constexpr int kReferenceResolution = 32;

Summary run(const Options& options);

nlohmann::ordered_json summary_json(const Summary& s);
std::string summary_text(const Summary& s);

}  // namespace steklov::verify
