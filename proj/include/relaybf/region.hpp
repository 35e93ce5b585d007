#pragma once

#include <string>
#include <vector>

#include "relaybf/liftings.hpp"
#include "relaybf/model.hpp"
#include "relaybf/sdp.hpp"

namespace relaybf {

struct RatePoint {
  double q = 0.0;     // demanded harvested power, watts
  double rate = 0.0;  // capacity of the recovered beamformer, bits/use
  Beamformer beamformer;
  std::string source;  // sdp_direct, sdp_reduced, sdp_combined, closed_form, baseline:<name>
  SdpStatus status = SdpStatus::kOptimal;
  double sinr_bound = 0.0;  // relaxation value (or closed-form value)
  double rank1_gap = 0.0;
  double backoff = 0.0;     // relative backoff from Q_max, r_eh only
};

struct RegionResult {
  std::vector<RatePoint> points;  // q ascending
  double r_max = 0.0;
  double q_max = 0.0;
  double r_eh = 0.0;
};

struct RegionOptions {
  // Direct for K <= 4, reduced above unless overridden.
  bool auto_formulation = true;
  FormulationKind kind = FormulationKind::kDirect;
  SdpSettings settings;
};

FormulationKind default_formulation(int k);

/// Max rate with no EH demand. Parallel channels with |rho|^2 P_J >= P_S
/// short-circuit to the zero-capacity closed form.
RatePoint compute_rmax(const ChannelSet& ch, const SystemParams& p, const RegionOptions& opt = {});

/// Max harvested power over the power budget; rate reports the capacity of
/// the energy-optimal beamformer.
RatePoint compute_qmax(const ChannelSet& ch, const SystemParams& p, const RegionOptions& opt = {});

/// Max rate while delivering Q_max (1 - 1e-9), retried at 1 - 1e-6.
RatePoint compute_r_eh(const ChannelSet& ch, const SystemParams& p, double q_max,
                       const RegionOptions& opt = {});

/// Max rate subject to harvesting at least q.
RatePoint compute_rate_at(const ChannelSet& ch, const SystemParams& p, double q,
                          const RegionOptions& opt = {});

/// Uniform grid q_i = i Q_max / (n_grid - 1). Failed points keep their status
/// and rate 0; the sweep continues.
RegionResult region_sweep(const ChannelSet& ch, const SystemParams& p, int n_grid = 21,
                          const RegionOptions& opt = {});

}  // namespace relaybf
