#include "relaybf/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace relaybf {

Beamformer scale_to_budget(const Beamformer& bf, const ChannelSet& ch, const SystemParams& p) {
  const double power = relay_power(bf, ch, p);
  if (!(power > 0.0)) {
    return bf;
  }
  return {bf.a * std::sqrt(p.p_r_max / power)};
}

Beamformer pmf(const ChannelSet& ch, const SystemParams& p) {
  const double ns2 = ch.h_s.squaredNorm();
  const double nd2 = ch.h_d.squaredNorm();
  if (ns2 == 0.0 || nd2 == 0.0) {
    throw std::invalid_argument("pmf: h_S and h_D must be nonzero");
  }
  const double cross = std::norm(ch.h_s.dot(ch.h_j));  // |h_S^H h_J|^2
  const double mu =
      std::sqrt(p.p_r_max / (nd2 * (ns2 * ns2 * p.p_s + cross * p.p_j + p.sigma_r2 * ns2)));
  return {mu * ch.h_d.conjugate() * ch.h_s.adjoint()};
}

Beamformer zf(const ChannelSet& ch, const SystemParams& p, Rng& rng) {
  const int k = ch.k();
  if (k < 2) {
    throw std::invalid_argument("zf: needs K >= 2 for a jammer null space");
  }
  // Rows r with r h_J = 0 are x^T for x in the null space of conj(h_J) h_J^T.
  const CMatrix basis = null_space_basis(ch.h_j.conjugate() * ch.h_j.transpose());
  if (basis.cols() == 0) {
    throw NumericalError("zf: jammer null space is empty");
  }
  CVector z(basis.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.complex_normal();
  const CVector x = basis * z.normalized();
  const Eigen::RowVectorXcd row = x.transpose();
  const double gain = std::norm((row * ch.h_s)(0));
  const double tau = std::sqrt(p.p_r_max / (k * (gain * p.p_s + p.sigma_r2)));
  return {tau * CVector::Ones(k) * row};
}

Beamformer dr(const ChannelSet& ch, const SystemParams& p) {
  const int k = ch.k();
  const double xi = std::sqrt(p.p_r_max / (ch.h_s.squaredNorm() * p.p_s +
                                           ch.h_j.squaredNorm() * p.p_j + p.sigma_r2 * k));
  return {xi * CMatrix::Identity(k, k)};
}

Beamformer no_jammer_optimal(const ChannelSet& ch, const SystemParams& p, FormulationKind kind) {
  SystemParams quiet = p;
  quiet.p_j = 0.0;
  const FormulationResult res = solve_formulation(build(kind, ch, quiet));
  return scale_to_budget(res.beamformer, ch, p);
}

}  // namespace relaybf
