#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "patchr0/errors.hpp"
#include "patchr0/models.hpp"
#include "patchr0/periodic_system.hpp"
#include "patchr0/reproduction_ratio.hpp"

namespace patchr0 {

enum class Command { kReduce, kEig, kR0, kSweep, kReproduceFigure1 };

const char* to_string(Command c);
std::optional<Command> parse_command(const std::string& name);

enum class ConfigErrorCode {
  kIo = 10,
  kSyntax = 11,
  kSchema = 12,
  kH1 = 13,
  kNegativeRate = 14,
  kH2 = 15,
};

const char* to_string(ConfigErrorCode code);

// A model file problem, anchored to a source line when one is known (0
// otherwise).
class ConfigError : public PreconditionError {
 public:
  ConfigError(ConfigErrorCode code, const std::string& source, std::uint32_t line,
              const std::string& message);

  ConfigErrorCode code() const noexcept { return code_; }
  std::uint32_t line() const noexcept { return line_; }

 private:
  ConfigErrorCode code_;
  std::uint32_t line_;
};

enum class ModelKind { kRossMacdonald, kSis, kGeneric };

struct GridSpec {
  std::vector<double> values;  // explicit values win over the range
  double min = 1e-3;
  double max = 1e3;
  std::size_t points = 61;
  std::vector<double> anchors;
  std::vector<double> resolve() const;
};

struct RunConfig {
  Command command = Command::kEig;
  std::string model_source;
  std::optional<double> d;
  std::optional<GridSpec> grid;
  SolverOptions solver;
  double r0_tolerance = 1e-9;
  std::string output_path;
  unsigned threads = 0;
};

struct Model {
  ModelKind kind = ModelKind::kGeneric;
  std::optional<RossMacdonaldParams> ross_macdonald;
  // The linear problem at d = 0; commands apply their own d.
  std::optional<PeriodicVFProblem> problem;
};

struct ParsedConfig {
  RunConfig run;  // settings from the optional [run] table
  Model model;
  // FNV-1a 64-bit hash of the file contents, hex encoded.
  std::string content_hash;
};

// Parses and validates a model file. Throws ConfigError.
ParsedConfig parse_config(const std::string& path);
ParsedConfig parse_config_text(const std::string& text, const std::string& source_name);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace patchr0
