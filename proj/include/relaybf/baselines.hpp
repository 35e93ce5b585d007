#pragma once

#include "relaybf/liftings.hpp"
#include "relaybf/model.hpp"

namespace relaybf {

// Comparison schemes. Each meets the relay power budget with equality.

/// Pseudo matched forwarding: A = mu conj(h_D) h_S^H.
Beamformer pmf(const ChannelSet& ch, const SystemParams& p);

/// Zero forcing: every row of A is the same unit row vector r with r h_J = 0,
/// drawn uniformly from that (K-1)-dimensional subspace. Requires K >= 2.
Beamformer zf(const ChannelSet& ch, const SystemParams& p, Rng& rng);

/// Direct relaying: A = xi I.
Beamformer dr(const ChannelSet& ch, const SystemParams& p);

/// Optimal beamformer designed as if P_J = 0, rescaled onto the power budget
/// under the true P_J.
Beamformer no_jammer_optimal(const ChannelSet& ch, const SystemParams& p,
                             FormulationKind kind = FormulationKind::kDirect);

/// Multiplies A so that relay_power(A) = P_R,max (A = 0 is returned as is).
Beamformer scale_to_budget(const Beamformer& bf, const ChannelSet& ch, const SystemParams& p);

}  // namespace relaybf
