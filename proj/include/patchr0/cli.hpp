#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "patchr0/asymptotics.hpp"
#include "patchr0/config.hpp"

namespace patchr0 {

// Command-line settings. Anything set here overrides the config's [run]
// table.
struct CliOptions {
  Command command = Command::kEig;
  std::string config_path;  // optional for reproduce-figure1
  std::optional<double> d;
  std::optional<GridSpec> grid;
  std::optional<int> steps_per_period;
  std::optional<Integrator> integrator;
  std::optional<double> r0_tolerance;
  std::optional<unsigned> threads;
  std::string output_path;  // sweep CSV; stdout when empty
};

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitNumerical = 2,
};

// Writes the sweep CSV: hash comment, header, one row per grid point, then
// the limits as comment lines.
void write_sweep_csv(std::ostream& os, const SweepResult& result, const std::string& hash);

struct ShapeCheck {
  std::size_t local_min = 0;  // grid index, valid when ok
  std::size_t local_max = 0;
  bool ok = false;
};

// Looks for an interior local minimum of R0 followed by a later interior
// local maximum. Rows with a failed R0 break the search.
ShapeCheck decrease_increase_decrease(const std::vector<SweepPoint>& points);

int run(const CliOptions& options, std::ostream& out, std::ostream& err);

}  // namespace patchr0
