#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relaybf/liftings.hpp"
#include "relaybf/model.hpp"

namespace relaybf {

/// Invalid or unreadable configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Output could not be written (CLI exit code 3).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { kSolve, kRegion, kSweep, kCompare };
Command command_from_string(const std::string& name);
std::string to_string(Command cmd);

struct SweepSpec {
  std::string parameter = "p_j_dbw";  // p_j_dbw, p_s_dbw, p_r_max_dbw, q_watts
  double from = 0.0;
  double to = 30.0;
  double step = 5.0;
  std::vector<double> values() const;
};

struct ExperimentConfig {
  int k = 4;
  double p_s_dbw = 6.0;
  double p_j_dbw = 15.0;
  double p_r_max_dbw = 6.0;
  double sigma_r2 = 1.0;
  double sigma_d2 = 1.0;
  double epsilon = 0.99;
  double q_watts = 0.0;
  int grid = 21;
  int n_trials = 1000;
  std::optional<std::uint64_t> seed;
  std::optional<FormulationKind> formulation;  // unset: direct for K <= 4, reduced above
  std::vector<std::string> schemes;            // empty: command default
  SweepSpec sweep;

  SystemParams params() const;
  void validate() const;  // throws ConfigError naming the field
};

/// Flat "key: value" file. Unknown keys, malformed values and failed
/// validation throw ConfigError. A missing seed is only an error at run time
/// since --seed may supply it.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

struct Record {
  std::string experiment;
  int trial = -1;  // -1 for across-trial means
  std::string scheme;
  std::string formulation;
  int k = 0;
  double p_s_dbw = 0.0;
  double p_j_dbw = 0.0;
  double p_r_max_dbw = 0.0;
  double epsilon = 0.0;
  double q_watts = 0.0;
  double rate_bits = 0.0;
  std::optional<double> q_max_watts;
  std::string status;
  std::optional<double> rank1_gap;
  std::optional<double> solver_ms;
};

struct RunOptions {
  int jobs = 1;
  bool timing = false;  // fill solver_ms (makes output non-reproducible)
};

/// Per-trial records ordered by (trial, sweep index, scheme), then the mean
/// rows. Trial t draws its channels from Rng(seed ^ t).
std::vector<Record> run(Command cmd, const ExperimentConfig& cfg, const RunOptions& opt = {});

extern const char* const kCsvHeader;

/// Numbers in 12 significant digits, locale independent.
std::string format_number(double v);

void write_csv(std::ostream& os, const std::vector<Record>& records);
void write_json(std::ostream& os, const std::vector<Record>& records);
void write_csv(const std::vector<Record>& records, const std::string& path);  // throws IoError

}  // namespace relaybf
