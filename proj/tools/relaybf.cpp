// relaybf: Monte Carlo driver for relay beamforming experiments.
//
//   relaybf <solve|region|sweep|compare> --config FILE [--seed N] [--out PATH]
//           [--jobs N] [--formulation direct|reduced|combined] [--grid N]
//           [--format csv|json] [--timing]
//
// Exit codes: 0 success, 2 configuration error, 3 I/O error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "relaybf/experiment.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kIoError = 3;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int jobs = 1;
  std::string formulation;
  std::optional<int> grid;
  std::string format = "csv";
  bool timing = false;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "Experiment config (flat key: value)");
  sub->add_option("--seed", f.seed, "Master seed (overrides config)");
  sub->add_option("--out", f.out, "Output file (default stdout)");
  sub->add_option("--jobs", f.jobs, "Concurrent trials")->check(CLI::PositiveNumber);
  sub->add_option("--formulation", f.formulation, "direct, reduced or combined")
      ->check(CLI::IsMember({"direct", "reduced", "combined", "auto"}));
  sub->add_option("--grid", f.grid, "Region grid points")->check(CLI::Range(2, 100000));
  sub->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_flag("--timing", f.timing, "Fill the solver_ms column");
}

int execute(const std::string& cmd_name, const Flags& f) {
  using namespace relaybf;
  ExperimentConfig cfg;
  std::vector<Record> records;
  try {
    if (!f.config.empty()) cfg = load_config(f.config);
    if (f.seed) cfg.seed = f.seed;
    if (f.grid) cfg.grid = *f.grid;
    if (!f.formulation.empty()) {
      cfg.formulation = f.formulation == "auto"
                            ? std::nullopt
                            : std::optional<FormulationKind>(formulation_from_string(f.formulation));
    }
    RunOptions opt;
    opt.jobs = f.jobs;
    opt.timing = f.timing;
    records = run(command_from_string(cmd_name), cfg, opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  auto emit = [&](std::ostream& os) {
    if (f.format == "json") write_json(os, records);
    else write_csv(os, records);
  };
  if (f.out.empty()) {
    emit(std::cout);
    std::cout.flush();
    if (!std::cout) {
      std::cerr << "I/O error: failed writing to stdout\n";
      return kIoError;
    }
    return 0;
  }
  std::ofstream out(f.out, std::ios::binary);
  if (!out) {
    std::cerr << "I/O error: cannot open " << f.out << '\n';
    return kIoError;
  }
  emit(out);
  out.flush();
  if (!out) {
    std::cerr << "I/O error: failed writing " << f.out << '\n';
    return kIoError;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal relay beamforming under jamming with energy harvesting"};
  app.require_subcommand(1);
  Flags flags;
  for (const char* name : {"solve", "region", "sweep", "compare"}) {
    add_flags(app.add_subcommand(name, std::string("Run the ") + name + " experiment"), flags);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  return execute(app.get_subcommands().front()->get_name(), flags);
}
