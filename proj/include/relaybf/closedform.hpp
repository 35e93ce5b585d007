#pragma once

#include "relaybf/liftings.hpp"
#include "relaybf/matrixkit.hpp"
#include "relaybf/model.hpp"

namespace relaybf {

struct ParallelInfo {
  bool is_parallel = false;
  Complex rho{0.0, 0.0};  // h_J = rho h_S when parallel
};

/// Parallel iff 1 - |h_S^H h_J| / (||h_S|| ||h_J||) <= tol.
ParallelInfo detect_parallel(const CVector& h_s, const CVector& h_j, double tol = 1e-8);

struct ClosedFormResult {
  double value = 0.0;  // SINR for the rate points, watts for Q_max
  CVector alpha;       // lifted beamformer vec(A), on the power sphere
  bool exact = true;
};

/// R_max point for h_J = rho h_S. The jammer ratio at the destination is
/// |rho|^2 P_J / P_S for every A, so the point reduces to a generalized
/// Rayleigh quotient on the power sphere:
///   SINR = P_S h1^H D^-1 h1,
///   D = |rho|^2 P_J h1 h1^H + sigma_R^2 H1 H1^H + sigma_D^2 Sigma / P_R,max.
/// Returns value 0 and alpha = 0 when |rho|^2 P_J >= P_S.
ClosedFormResult rmax_parallel(const LiftedData& ld, Complex rho, const SystemParams& p,
                               double theta = 0.0);

/// Lower bound on R_max for non-parallel channels: restricts alpha to the
/// orthogonal complement of h2 (the jammer never reaches the destination).
ClosedFormResult rmax_nonparallel_suboptimal(const LiftedData& ld, const SystemParams& p);

/// Q_max = lambda_max(Sigma^-1 T) P_R,max with
/// T = h3 h3^H P_S + h4 h4^H P_J + sigma_R^2 H4 H4^H.
ClosedFormResult qmax_closed(const LiftedData& ld, const SystemParams& p);

}  // namespace relaybf
