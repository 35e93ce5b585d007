#include <doctest.h>

#include <map>
#include <sstream>

#include "relaybf/baselines.hpp"
#include "relaybf/closedform.hpp"
#include "relaybf/experiment.hpp"
#include "relaybf/oracle.hpp"
#include "relaybf/region.hpp"
#include "../support.hpp"

using namespace relaybf;
using namespace relaybf::testing;

namespace {

struct Frozen {
  int seed;
  int k;
  double r_max;
  double q_max;
  double mid_rate;  // rate at Q = Q_max / 2
  double pmf_rate;
};

// P_S = 6 dBW, P_J = 15 dBW, P_R,max = 6 dBW, unit noise, eps = 0.99.
const Frozen kFrozen[] = {
    {7, 2, 0.926274555025, 13.5215692661, 0.926136545543, 0.0},
    {8, 4, 1.42400561528, 5.40035399888, 1.4240056108, 0.491462640366},
    {9, 6, 1.45379634154, 19.1431234974, 1.17140212112, 0.596703253402},
};

}  // namespace

TEST_CASE("regression values") {
  for (const Frozen& f : kFrozen) {
    CAPTURE(f.seed);
    const ChannelSet ch = channels(f.seed, f.k);
    const SystemParams p = params_db(f.k, 6, 15, 6);
    const RatePoint rm = compute_rmax(ch, p);
    const RatePoint qm = compute_qmax(ch, p);
    CHECK(rm.rate == doctest::Approx(f.r_max).epsilon(1e-6));
    CHECK(qm.q == doctest::Approx(f.q_max).epsilon(1e-6));
    CHECK(compute_rate_at(ch, p, 0.5 * qm.q).rate == doctest::Approx(f.mid_rate).epsilon(1e-6));
    CHECK(capacity(pmf(ch, p), ch, p) == doctest::Approx(f.pmf_rate).epsilon(1e-9));
  }
}

TEST_CASE("region agrees across formulations") {
  const ChannelSet ch = channels(21, 5);
  const SystemParams p = params_db(5, 6, 10, 6);
  RegionOptions opt;
  opt.auto_formulation = false;
  std::vector<RegionResult> res;
  for (FormulationKind kind :
       {FormulationKind::kDirect, FormulationKind::kReduced, FormulationKind::kCombined}) {
    opt.kind = kind;
    res.push_back(region_sweep(ch, p, 5, opt));
  }
  for (std::size_t i = 1; i < res.size(); ++i) {
    CHECK(res[i].q_max == doctest::Approx(res[0].q_max).epsilon(1e-5));
    // The R_EH end may settle on a different backoff, where the rate is steep.
    for (std::size_t j = 0; j + 1 < res[0].points.size(); ++j) {
      CHECK(res[i].points[j].rate == doctest::Approx(res[0].points[j].rate).epsilon(1e-6));
    }
    CHECK(res[i].points.back().q == doctest::Approx(res[0].points.back().q).epsilon(1e-4));
  }
}

TEST_CASE("extracted beamformers pass independent feasibility checks") {
  Rng rng(22);
  for (int t = 0; t < 6; ++t) {
    const int k = 2 + t % 3;
    const ChannelSet ch = sample_channels(rng, k);
    const SystemParams p = params_db(k, 6, 10, 6);
    const RegionResult r = region_sweep(ch, p, 5);
    for (const RatePoint& pt : r.points) {
      SystemParams at = p;
      at.q_target = pt.q;
      const FeasibilityReport rep = check_feasibility(pt.beamformer, ch, at, 1e-6);
      CHECK(rep.pass);
      CHECK(capacity(pt.beamformer, ch, p) == doctest::Approx(pt.rate).epsilon(1e-12));
    }
  }
}

TEST_CASE("proposed design dominates the baselines on every channel") {
  Rng rng(23);
  for (int t = 0; t < 8; ++t) {
    const ChannelSet ch = sample_channels(rng, 4);
    const SystemParams p = params_db(4, 6, 5.0 * t / 2.0, 6);
    const double proposed = compute_rmax(ch, p).rate;
    Rng zrng(static_cast<std::uint64_t>(100 + t));
    for (const Beamformer& b : {pmf(ch, p), zf(ch, p, zrng), dr(ch, p), no_jammer_optimal(ch, p)}) {
      CHECK(relay_power(b, ch, p) <= p.p_r_max * (1 + 1e-9));
      CHECK(capacity(b, ch, p) <= proposed + 1e-6);
    }
  }
}

TEST_CASE("parallel jammer matches the closed form through the region code") {
  ChannelSet ch = channels(24, 3);
  const Complex rho(0.4, 0.2);
  ch.h_j = rho * ch.h_s;
  const SystemParams p = params_db(3, 6, 6, 6);
  const RatePoint rm = compute_rmax(ch, p);
  const ClosedFormResult cf = rmax_parallel(lift(ch, p), rho, p);
  CHECK(rm.rate == doctest::Approx(rate_from_sinr(cf.value)).epsilon(1e-4));
}

TEST_CASE("compare run means follow the per-trial rows") {
  ExperimentConfig cfg = parse_config("k: 3\nn_trials: 4\nseed: 5\np_j_dbw: 10\n");
  const auto rows = run(Command::kCompare, cfg);
  using Key = std::pair<double, std::string>;  // (P_J in dBW, scheme)
  std::map<Key, std::pair<double, int>> sums;
  std::map<Key, double> means;
  for (const Record& r : rows) {
    const Key key{r.p_j_dbw, r.scheme};
    if (r.trial >= 0) {
      sums[key].first += r.rate_bits;
      ++sums[key].second;
    } else {
      means[key] = r.rate_bits;
    }
  }
  REQUIRE(means.size() == sums.size());
  for (const auto& [key, s] : sums) {
    CAPTURE(key.first);
    CAPTURE(key.second);
    CHECK(s.second == 4);
    CHECK(means.at(key) == doctest::Approx(s.first / s.second).epsilon(1e-12));
    CHECK(means.at(key) <= means.at({key.first, "proposed"}) + 1e-6);
  }
}

TEST_CASE("problem dump is deterministic and self-describing") {
  const ChannelSet ch = channels(25, 2);
  const SystemParams p = params_db(2, 6, 6, 6, 1.0);
  const Formulation f = build(FormulationKind::kDirect, ch, p);
  std::ostringstream a, b;
  write_problem(a, f.problem);
  write_problem(b, build(FormulationKind::kDirect, ch, p).problem);
  CHECK(a.str() == b.str());
  CHECK(a.str().find("dim 4") != std::string::npos);
  for (const SdpConstraint& con : f.problem.constraints) {
    CHECK(a.str().find(con.label) != std::string::npos);
  }
}
