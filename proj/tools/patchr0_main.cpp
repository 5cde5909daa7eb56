#include <CLI11.hpp>

#include <iostream>
#include <map>

#include "patchr0/cli.hpp"

int main(int argc, char** argv) {
  using namespace patchr0;

  CLI::App app{"Periodic patch-model reproduction ratios"};
  app.require_subcommand(1);

  CliOptions opts;
  double d = 0.0, grid_min = 1e-3, grid_max = 1e3;
  std::size_t grid_points = 61;
  std::vector<double> grid_values;
  int steps = 0;
  std::string integrator;
  double tol = 0.0;
  unsigned threads = 0;

  const std::map<std::string, Command> commands{{"reduce", Command::kReduce},
                                                {"eig", Command::kEig},
                                                {"r0", Command::kR0},
                                                {"sweep", Command::kSweep},
                                                {"reproduce-figure1", Command::kReproduceFigure1}};
  const std::map<std::string, std::string> help{
      {"reduce", "Print the zero-eigenspace blocks, alpha0, P and Q"},
      {"eig", "Principal eigenvalue at one dispersal rate"},
      {"r0", "Periodic basic reproduction ratio at one dispersal rate"},
      {"sweep", "R0 and principal eigenvalue over a dispersal grid (CSV)"},
      {"reproduce-figure1", "Baseline Ross-Macdonald headline numbers and R0(d) shape"}};

  std::vector<CLI::App*> subs;
  for (const auto& [name, cmd] : commands) {
    auto* sub = app.add_subcommand(name, help.at(name));
    const bool needs_model = cmd != Command::kReproduceFigure1;
    auto* model = sub->add_option("model", opts.config_path, "Model file (TOML)");
    if (needs_model) model->required()->check(CLI::ExistingFile);
    if (cmd == Command::kEig || cmd == Command::kR0) {
      sub->add_option("--d", d, "Dispersal rate")->check(CLI::NonNegativeNumber);
    }
    if (cmd == Command::kSweep || cmd == Command::kReproduceFigure1) {
      sub->add_option("--grid-min", grid_min, "Smallest d of the geometric grid")->check(CLI::PositiveNumber);
      sub->add_option("--grid-max", grid_max, "Largest d of the geometric grid")->check(CLI::PositiveNumber);
      sub->add_option("--grid-points", grid_points, "Grid size")->check(CLI::Range(1, 100000));
      sub->add_option("--grid", grid_values, "Explicit d values")->delimiter(',');
      sub->add_option("-o,--output", opts.output_path, "CSV output path");
      sub->add_option("--threads", threads, "Worker threads (0: automatic)");
    }
    sub->add_option("--steps", steps, "Integration steps per period")->check(CLI::Range(kMinStepsPerPeriod, 1 << 24));
    sub->add_option("--integrator", integrator, "rk4, magnus4 or auto")
        ->check(CLI::IsMember({"rk4", "magnus4", "auto"}));
    sub->add_option("--tol", tol, "Relative R0 tolerance")->check(CLI::PositiveNumber);
    sub->callback([&opts, cmd = cmd]() { opts.command = cmd; });
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  for (auto* sub : subs) {
    if (!sub->parsed()) continue;
    auto given = [sub](const char* name) {
      const auto* opt = sub->get_option_no_throw(name);
      return opt != nullptr && opt->count() > 0;
    };
    if (given("--d")) opts.d = d;
    if (given("--steps")) opts.steps_per_period = steps;
    if (given("--tol")) opts.r0_tolerance = tol;
    if (given("--threads")) opts.threads = threads;
    if (given("--integrator")) {
      opts.integrator = integrator == "rk4"       ? Integrator::kRk4
                        : integrator == "magnus4" ? Integrator::kMagnus4
                                                  : Integrator::kAuto;
    }
    const bool range = given("--grid-min") || given("--grid-max") ||
                       given("--grid-points");
    if (given("--grid") || range) {
      GridSpec g;
      g.values = grid_values;
      g.min = grid_min;
      g.max = grid_max;
      g.points = grid_points;
      opts.grid = g;
    }
  }
  return run(opts, std::cout, std::cerr);
}
