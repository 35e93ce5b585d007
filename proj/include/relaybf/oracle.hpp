#pragma once

#include <functional>

#include "relaybf/model.hpp"

namespace relaybf {

struct OracleResult {
  bool found = false;
  double best_rate = 0.0;
  Beamformer best_a;
  long feasible_samples = 0;
};

struct OracleOptions {
  bool polish = true;
  int polish_steps = 100;
  int tries_per_step = 8;
  double initial_step = 0.3;
};

/// Brute-force lower bound on the optimal rate: Gaussian K x K samples scaled
/// onto the power sphere, filtered by the EH and symmetrizability constraints,
/// then the best one polished by random perturbations.
OracleResult random_feasible_search(const ChannelSet& ch, const SystemParams& p, long n_samples,
                                    Rng& rng, const OracleOptions& opt = {});

/// Max of |h^H x|^2 / (x^H d x) by random sampling plus adaptive local search.
/// Every evaluated point is a valid quotient, so the result never exceeds
/// the true maximum.
double sample_rayleigh_max(const CVector& h, const CMatrix& d, long n_evaluations, Rng& rng);

struct FeasibilityReport {
  double power = 0.0;
  double power_ratio = 0.0;  // power / P_R,max
  double eh = 0.0;
  double eh_slack = 0.0;     // eh - Q
  double ratio = 0.0;        // symmetrizability ratio (NaN if undefined)
  bool ratio_defined = true;
  bool power_ok = true;
  bool eh_ok = true;
  bool ratio_ok = true;
  bool pass = true;
};

FeasibilityReport check_feasibility(const Beamformer& a, const ChannelSet& ch,
                                    const SystemParams& p, double tol);

}  // namespace relaybf
