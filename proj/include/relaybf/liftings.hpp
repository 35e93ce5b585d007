#pragma once

#include <optional>
#include <string>

#include "relaybf/matrixkit.hpp"
#include "relaybf/model.hpp"
#include "relaybf/sdp.hpp"

namespace relaybf {

/// Kronecker-lifted channel data for alpha = vec(A).
///
/// With column-stacking vec, |h_D^T A h_S|^2 = |h1^H alpha|^2 requires both
/// factors conjugated: h1 = conj(h_S) (x) conj(h_D). The other vectors and
/// operators follow the same convention:
///   h2 = conj(h_J) (x) conj(h_D)   h3 = conj(h_S) (x) conj(h_E)
///   h4 = conj(h_J) (x) conj(h_E)
///   H1 = I (x) conj(h_D)   H2 = conj(h_S) (x) I   H3 = conj(h_J) (x) I
///   H4 = I (x) conj(h_E)
/// so that ||h_D^T A||^2 = ||H1^H alpha||^2, ||A h_S||^2 = ||H2^H alpha||^2, ...
struct LiftedData {
  int k = 0;
  CVector h1, h2, h3, h4;
  CMatrix big_h1, big_h2, big_h3, big_h4;  // K^2 x K
  CMatrix sigma;  // relay power form: alpha^H sigma alpha = relay_power(A)
  double rho0 = 0.0;  // P_J / P_S
  double rho1 = 0.0;  // sigma_R^2 / P_S
  double rho2 = 0.0;  // sigma_D^2 / P_S
};

LiftedData lift(const ChannelSet& ch, const SystemParams& p);

/// Orthonormal split of C^K into span{h_S, h_J, h_D, h_E} (u1) and its
/// complement (u2). Optimal beamformers have the form
///   A = conj(u1) B u1^H + conj(u1) C u2^H,
/// with B r x r and C r x (K - r).
struct ReducedData {
  int k = 0;
  int r = 0;
  CMatrix u1;  // K x r
  CMatrix u2;  // K x (K - r)
  CVector g1, g2, g3, g4;  // u1^H h_S, u1^H h_J, u1^H h_D, u1^H h_E
};

ReducedData reduced_basis(const ChannelSet& ch, double rank_tol = 1e-10);

/// g1 g1^H P_S + g2 g2^H P_J + sigma_R^2 I_r; the reduced relay power form
/// is the r-fold block diagonal of this matrix.
CMatrix reduced_theta(const ReducedData& rd, const SystemParams& p);

enum class FormulationKind { kDirect, kReduced, kCombined };

std::string to_string(FormulationKind kind);
FormulationKind formulation_from_string(const std::string& name);

/// Quadratic forms of the master problem in one formulation's variable space.
/// For a lifted vector x of that space and the matching beamformer A:
///   x^H signal x = |h_D^T A h_S|^2           x^H jam x = |h_D^T A h_J|^2
///   x^H noise x = ||h_D^T A||^2              x^H eh x = harvested_energy(A)
///   x^H power x = relay_power(A)
struct QuadraticForms {
  CMatrix signal, jam, noise, eh, power;
};

struct Formulation {
  FormulationKind kind = FormulationKind::kDirect;
  SdpProblem problem;
  QuadraticForms forms;
  int k = 0;
  int r = 0;          // reduced rank (k for direct)
  int c_cols = 0;     // columns of the C block (K - r), 0 for direct
  CMatrix u1, u2;
  double p_r_max = 0.0;
  SystemParams params;
};

QuadraticForms direct_forms(const LiftedData& ld, const SystemParams& p);
QuadraticForms reduced_forms(const ReducedData& rd, const SystemParams& p);
QuadraticForms combined_forms(const ReducedData& rd, const SystemParams& p);

/// Relaxed SDP over (X, b2, c2):
///   max tr(signal X)
///   s.t. rho0 c2 + rho1 tr(noise X) + rho2 b2 <= 1
///        tr(jam X) <= c2,  tr(signal X) >= rho0 c2 / eps
///        tr(eh X) >= Q b2,  tr(power X) <= P_R,max b2
/// The objective value is the achievable SINR. The jam/symmetrizability pair
/// is omitted without a jammer, the EH row when Q = 0.
Formulation build_direct(const LiftedData& ld, const SystemParams& p);
Formulation build_reduced(const ReducedData& rd, const SystemParams& p);
Formulation build_combined(const ReducedData& rd, const SystemParams& p);
Formulation build(FormulationKind kind, const ChannelSet& ch, const SystemParams& p);

/// max tr(eh X) s.t. tr(power X) <= P_R,max: the harvested-power maximum.
SdpProblem build_qmax_problem(const QuadraticForms& forms, double p_r_max);

/// Beamformer from a lifted vector. beta and b2 are the homogenized
/// variables (alpha = beta / sqrt(b2)); pass b2 = 1 for a plain alpha.
/// The result is scaled down onto the power budget if it exceeds it.
Beamformer recover_beamformer(const Formulation& f, const CVector& beta, double b2);

/// Inverse of recover_beamformer for b2 = 1: the lifted vector of A.
CVector lift_beamformer(const Formulation& f, const Beamformer& bf);

struct FormulationResult {
  SdpSolution solution;
  Rank1Extraction extraction;
  Beamformer beamformer;
  double sinr_bound = 0.0;  // SDP optimum
  bool ok = false;          // solution optimal and rank-1 extraction unflagged
};

FormulationResult solve_formulation(const Formulation& f, const SdpSettings& settings = {});

}  // namespace relaybf
