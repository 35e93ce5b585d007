#include "relaybf/experiment.hpp"

#include <yaml-cpp/yaml.h>

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "relaybf/baselines.hpp"
#include "relaybf/region.hpp"

namespace relaybf {

Command command_from_string(const std::string& name) {
  if (name == "solve") return Command::kSolve;
  if (name == "region") return Command::kRegion;
  if (name == "sweep") return Command::kSweep;
  if (name == "compare") return Command::kCompare;
  throw ConfigError("unknown command: " + name);
}

std::string to_string(Command cmd) {
  switch (cmd) {
    case Command::kSolve: return "solve";
    case Command::kRegion: return "region";
    case Command::kSweep: return "sweep";
    case Command::kCompare: return "compare";
  }
  return "?";
}

std::vector<double> SweepSpec::values() const {
  std::vector<double> out;
  const long n = std::lround(std::floor((to - from) / step + 1e-9)) + 1;
  for (long i = 0; i < n; ++i) out.push_back(from + static_cast<double>(i) * step);
  return out;
}

SystemParams ExperimentConfig::params() const {
  SystemParams p;
  p.k = k;
  p.p_s = db_to_watts(p_s_dbw);
  p.p_j = db_to_watts(p_j_dbw);
  p.p_r_max = db_to_watts(p_r_max_dbw);
  p.sigma_r2 = sigma_r2;
  p.sigma_d2 = sigma_d2;
  p.q_target = q_watts;
  p.epsilon = epsilon;
  return p;
}

namespace {

const std::set<std::string> kSchemes = {"proposed", "no_jammer", "pmf", "zf", "dr"};
const std::set<std::string> kSweepParams = {"p_j_dbw", "p_s_dbw", "p_r_max_dbw", "q_watts"};

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field + ": " + what);
}

}  // namespace

void ExperimentConfig::validate() const {
  require(k >= 1, "k", "must be >= 1");
  for (auto [name, v] : {std::pair{"p_s_dbw", p_s_dbw}, {"p_j_dbw", p_j_dbw},
                         {"p_r_max_dbw", p_r_max_dbw}}) {
    require(std::isfinite(v), name, "must be finite");
  }
  require(sigma_r2 > 0.0, "sigma_r2", "must be > 0");
  require(sigma_d2 > 0.0, "sigma_d2", "must be > 0");
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon", "must lie in (0, 1)");
  require(q_watts >= 0.0 && std::isfinite(q_watts), "q_watts", "must be finite and >= 0");
  require(grid >= 2, "grid", "must be >= 2");
  require(n_trials >= 1, "n_trials", "must be >= 1");
  for (const auto& s : schemes) require(kSchemes.count(s) > 0, "schemes", "unknown scheme " + s);
  require(kSweepParams.count(sweep.parameter) > 0, "sweep_parameter",
          "unknown parameter " + sweep.parameter);
  require(std::isfinite(sweep.from) && std::isfinite(sweep.to), "sweep_from",
          "sweep bounds must be finite");
  require(std::isfinite(sweep.step) && sweep.step > 0.0, "sweep_step", "must be > 0");
  require(sweep.to >= sweep.from, "sweep_to", "must be >= sweep_from");
  if (sweep.parameter == "q_watts") {
    require(sweep.from >= 0.0, "sweep_from", "q_watts must be >= 0");
  }
}

namespace {

std::string where(const YAML::Node& node) {
  return "line " + std::to_string(node.Mark().line + 1);
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw ConfigError(key + ": expected a scalar (" + where(node) + ")");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(key + ": malformed value '" + node.Scalar() + "' (" + where(node) + ")");
  }
}

std::vector<std::string> scheme_list(const YAML::Node& node) {
  std::vector<std::string> out;
  if (node.IsSequence()) {
    for (const auto& item : node) out.push_back(scalar<std::string>(item, "schemes"));
    return out;
  }
  std::stringstream ss(scalar<std::string>(node, "schemes"));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("parse error at line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  ExperimentConfig cfg;
  if (root.IsNull()) {
    cfg.validate();
    return cfg;
  }
  if (!root.IsMap()) throw ConfigError("config must be a flat key: value mapping");
  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    const YAML::Node& v = kv.second;
    if (key == "k") cfg.k = scalar<int>(v, key);
    else if (key == "p_s_dbw") cfg.p_s_dbw = scalar<double>(v, key);
    else if (key == "p_j_dbw") cfg.p_j_dbw = scalar<double>(v, key);
    else if (key == "p_r_max_dbw") cfg.p_r_max_dbw = scalar<double>(v, key);
    else if (key == "sigma_r2") cfg.sigma_r2 = scalar<double>(v, key);
    else if (key == "sigma_d2") cfg.sigma_d2 = scalar<double>(v, key);
    else if (key == "epsilon") cfg.epsilon = scalar<double>(v, key);
    else if (key == "q_watts") cfg.q_watts = scalar<double>(v, key);
    else if (key == "grid") cfg.grid = scalar<int>(v, key);
    else if (key == "n_trials") cfg.n_trials = scalar<int>(v, key);
    else if (key == "seed") cfg.seed = scalar<std::uint64_t>(v, key);
    else if (key == "formulation") {
      const auto name = scalar<std::string>(v, key);
      if (name != "auto") {
        try {
          cfg.formulation = formulation_from_string(name);
        } catch (const std::invalid_argument&) {
          throw ConfigError("formulation: unknown value '" + name + "' (" + where(v) + ")");
        }
      }
    } else if (key == "schemes") cfg.schemes = scheme_list(v);
    else if (key == "sweep_parameter") cfg.sweep.parameter = scalar<std::string>(v, key);
    else if (key == "sweep_from") cfg.sweep.from = scalar<double>(v, key);
    else if (key == "sweep_to") cfg.sweep.to = scalar<double>(v, key);
    else if (key == "sweep_step") cfg.sweep.step = scalar<double>(v, key);
    else throw ConfigError("unknown key '" + key + "' (" + where(kv.first) + ")");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// ---------------------------------------------------------------------------

namespace {

struct Point {
  double p_s_dbw, p_j_dbw, p_r_max_dbw, q_watts;
};

std::vector<Point> sweep_points(Command cmd, const ExperimentConfig& cfg) {
  const Point base{cfg.p_s_dbw, cfg.p_j_dbw, cfg.p_r_max_dbw, cfg.q_watts};
  if (cmd == Command::kSolve || cmd == Command::kRegion) return {base};
  std::vector<Point> out;
  for (double v : cfg.sweep.values()) {
    Point pt = base;
    if (cfg.sweep.parameter == "p_j_dbw") pt.p_j_dbw = v;
    else if (cfg.sweep.parameter == "p_s_dbw") pt.p_s_dbw = v;
    else if (cfg.sweep.parameter == "p_r_max_dbw") pt.p_r_max_dbw = v;
    else pt.q_watts = v;
    out.push_back(pt);
  }
  return out;
}

std::vector<std::string> schemes_for(Command cmd, const ExperimentConfig& cfg) {
  if (cmd == Command::kRegion) return {"proposed"};
  if (!cfg.schemes.empty()) return cfg.schemes;
  if (cmd == Command::kCompare) return {"proposed", "no_jammer", "pmf", "zf", "dr"};
  return {"proposed"};
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

class TrialRunner {
 public:
  TrialRunner(Command cmd, const ExperimentConfig& cfg, const RunOptions& opt)
      : cmd_(cmd), cfg_(cfg), opt_(opt), points_(sweep_points(cmd, cfg)),
        schemes_(schemes_for(cmd, cfg)) {
    region_opt_.auto_formulation = !cfg.formulation.has_value();
    if (cfg.formulation) region_opt_.kind = *cfg.formulation;
  }

  std::vector<Record> trial(int t) const {
    const std::uint64_t trial_seed = *cfg_.seed ^ static_cast<std::uint64_t>(t);
    Rng rng(trial_seed);
    const ChannelSet ch = sample_channels(rng, cfg_.k);
    std::vector<Record> out;
    for (const Point& pt : points_) {
      const SystemParams p = params_at(pt);
      if (cmd_ == Command::kRegion) {
        region_rows(t, pt, ch, p, out);
        continue;
      }
      for (const auto& scheme : schemes_) {
        // ZF draws its null-space direction from a stream of its own, shared
        // across sweep points.
        Rng zf_rng(splitmix64(trial_seed) ^ 0x5a5a5a5a5a5a5a5aULL);
        out.push_back(scheme_row(t, pt, scheme, ch, p, zf_rng));
      }
    }
    return out;
  }

  std::string formulation_name() const {
    return to_string(region_opt_.auto_formulation ? default_formulation(cfg_.k) : region_opt_.kind);
  }

 private:
  SystemParams params_at(const Point& pt) const {
    ExperimentConfig c = cfg_;
    c.p_s_dbw = pt.p_s_dbw;
    c.p_j_dbw = pt.p_j_dbw;
    c.p_r_max_dbw = pt.p_r_max_dbw;
    c.q_watts = pt.q_watts;
    return c.params();
  }

  Record base(int t, const Point& pt, const std::string& scheme) const {
    Record r;
    r.experiment = to_string(cmd_);
    r.trial = t;
    r.scheme = scheme;
    r.formulation = scheme == "proposed" || scheme == "no_jammer" ? formulation_name() : "";
    r.k = cfg_.k;
    r.p_s_dbw = pt.p_s_dbw;
    r.p_j_dbw = pt.p_j_dbw;
    r.p_r_max_dbw = pt.p_r_max_dbw;
    r.epsilon = cfg_.epsilon;
    r.q_watts = pt.q_watts;
    return r;
  }

  Record scheme_row(int t, const Point& pt, const std::string& scheme, const ChannelSet& ch,
                    const SystemParams& p, Rng& zf_rng) const {
    Record r = base(t, pt, scheme);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if (scheme == "proposed") {
        const RatePoint qp = compute_qmax(ch, p, region_opt_);
        r.q_max_watts = qp.q;
        const RatePoint rp = p.q_target > 0.0 ? compute_rate_at(ch, p, p.q_target, region_opt_)
                                              : compute_rmax(ch, p, region_opt_);
        r.rate_bits = rp.rate;
        r.status = to_string(rp.status);
        if (rp.status == SdpStatus::kOptimal) r.rank1_gap = std::max(0.0, rp.rank1_gap);
      } else {
        Beamformer bf;
        if (scheme == "no_jammer") {
          const FormulationKind kind =
              region_opt_.auto_formulation ? default_formulation(cfg_.k) : region_opt_.kind;
          bf = no_jammer_optimal(ch, p, kind);
        } else if (scheme == "pmf") {
          bf = pmf(ch, p);
        } else if (scheme == "zf") {
          bf = zf(ch, p, zf_rng);
        } else {
          bf = dr(ch, p);
        }
        r.rate_bits = capacity(bf, ch, p);
        r.status = "ok";
      }
    } catch (const std::exception&) {
      r.rate_bits = 0.0;
      r.status = "error";
    }
    if (opt_.timing) r.solver_ms = elapsed_ms(t0);
    return r;
  }

  void region_rows(int t, const Point& pt, const ChannelSet& ch, const SystemParams& p,
                   std::vector<Record>& out) const {
    const auto t0 = std::chrono::steady_clock::now();
    RegionResult res;
    bool failed = false;
    try {
      res = region_sweep(ch, p, cfg_.grid, region_opt_);
    } catch (const std::exception&) {
      failed = true;
    }
    const double ms = elapsed_ms(t0);
    for (int i = 0; i < cfg_.grid; ++i) {
      Record r = base(t, pt, "proposed");
      if (failed) {
        r.status = "error";
      } else {
        const RatePoint& rp = res.points[i];
        r.q_watts = rp.q;
        r.rate_bits = rp.rate;
        r.q_max_watts = res.q_max;
        r.status = to_string(rp.status);
        if (rp.status == SdpStatus::kOptimal) r.rank1_gap = std::max(0.0, rp.rank1_gap);
      }
      if (opt_.timing) r.solver_ms = ms / cfg_.grid;
      out.push_back(r);
    }
  }

  Command cmd_;
  const ExperimentConfig& cfg_;
  RunOptions opt_;
  std::vector<Point> points_;
  std::vector<std::string> schemes_;
  RegionOptions region_opt_;
};

// Means over trials of every row slot (sweep or grid index, scheme).
std::vector<Record> mean_rows(const std::vector<std::vector<Record>>& per_trial) {
  std::vector<Record> means;
  if (per_trial.empty()) return means;
  const std::size_t slots = per_trial.front().size();
  for (std::size_t s = 0; s < slots; ++s) {
    Record m = per_trial.front()[s];
    m.trial = -1;
    m.status = "mean";
    double rate = 0.0, q = 0.0, qmax = 0.0, gap = 0.0, ms = 0.0;
    int n_qmax = 0, n_gap = 0, n_ms = 0;
    for (const auto& rows : per_trial) {
      const Record& r = rows[s];
      rate += r.rate_bits;
      q += r.q_watts;
      if (r.q_max_watts) qmax += *r.q_max_watts, ++n_qmax;
      if (r.rank1_gap) gap += *r.rank1_gap, ++n_gap;
      if (r.solver_ms) ms += *r.solver_ms, ++n_ms;
    }
    const double n = static_cast<double>(per_trial.size());
    m.rate_bits = rate / n;
    m.q_watts = q / n;
    m.q_max_watts = n_qmax ? std::optional<double>(qmax / n_qmax) : std::nullopt;
    m.rank1_gap = n_gap ? std::optional<double>(gap / n_gap) : std::nullopt;
    m.solver_ms = n_ms ? std::optional<double>(ms / n_ms) : std::nullopt;
    means.push_back(m);
  }
  return means;
}

}  // namespace

std::vector<Record> run(Command cmd, const ExperimentConfig& cfg, const RunOptions& opt) {
  cfg.validate();
  if (!cfg.seed) throw ConfigError("seed: required (config key or --seed)");
  const TrialRunner runner(cmd, cfg, opt);
  std::vector<std::vector<Record>> per_trial(cfg.n_trials);

  const int jobs = std::max(1, std::min(opt.jobs, cfg.n_trials));
  std::atomic<int> next{0};
  auto work = [&]() {
    for (int t = next++; t < cfg.n_trials; t = next++) per_trial[t] = runner.trial(t);
  };
  if (jobs == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  std::vector<Record> out;
  for (const auto& rows : per_trial) out.insert(out.end(), rows.begin(), rows.end());
  const auto means = mean_rows(per_trial);
  out.insert(out.end(), means.begin(), means.end());
  return out;
}

// ---------------------------------------------------------------------------

const char* const kCsvHeader =
    "experiment,trial,scheme,formulation,k,p_s_dbw,p_j_dbw,p_r_max_dbw,epsilon,q_watts,"
    "rate_bits,q_max_watts,status,rank1_gap,solver_ms";

std::string format_number(double v) {
  if (v == 0.0) return "0";  // also folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

namespace {

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

std::string trial_label(int trial) { return trial < 0 ? "mean" : std::to_string(trial); }

}  // namespace

void write_csv(std::ostream& os, const std::vector<Record>& records) {
  os << kCsvHeader << '\n';
  for (const auto& r : records) {
    os << r.experiment << ',' << trial_label(r.trial) << ',' << r.scheme << ',' << r.formulation
       << ',' << r.k << ',' << format_number(r.p_s_dbw) << ',' << format_number(r.p_j_dbw) << ','
       << format_number(r.p_r_max_dbw) << ',' << format_number(r.epsilon) << ','
       << format_number(r.q_watts) << ',' << format_number(r.rate_bits) << ','
       << opt_number(r.q_max_watts) << ',' << r.status << ',' << opt_number(r.rank1_gap) << ','
       << opt_number(r.solver_ms) << '\n';
  }
}

void write_json(std::ostream& os, const std::vector<Record>& records) {
  auto opt_json = [](const std::optional<double>& v) -> nlohmann::json {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) {
    arr.push_back({{"experiment", r.experiment},
                   {"trial", trial_label(r.trial)},
                   {"scheme", r.scheme},
                   {"formulation", r.formulation},
                   {"k", r.k},
                   {"p_s_dbw", r.p_s_dbw},
                   {"p_j_dbw", r.p_j_dbw},
                   {"p_r_max_dbw", r.p_r_max_dbw},
                   {"epsilon", r.epsilon},
                   {"q_watts", r.q_watts},
                   {"rate_bits", r.rate_bits},
                   {"q_max_watts", opt_json(r.q_max_watts)},
                   {"status", r.status},
                   {"rank1_gap", opt_json(r.rank1_gap)},
                   {"solver_ms", opt_json(r.solver_ms)}});
  }
  os << arr.dump(2) << '\n';
}

void write_csv(const std::vector<Record>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_csv(out, records);
  out.flush();
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace relaybf
