#pragma once

#include <cstdint>

#include "relaybf/matrixkit.hpp"
#include "relaybf/model.hpp"

namespace relaybf::testing {

inline CMatrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  CMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.complex_normal();
  return m;
}

inline CVector random_vector(Rng& rng, Eigen::Index n) { return random_matrix(rng, n, 1); }

inline CMatrix random_hermitian(Rng& rng, Eigen::Index n) {
  return hermitian_part(random_matrix(rng, n, n));
}

// Rank-`rank` PSD (full rank when rank >= n).
inline CMatrix random_psd(Rng& rng, Eigen::Index n, Eigen::Index rank) {
  const CMatrix g = random_matrix(rng, n, rank);
  return g * g.adjoint();
}

inline CMatrix random_pd(Rng& rng, Eigen::Index n) {
  return random_psd(rng, n, n) + 0.1 * CMatrix::Identity(n, n);
}

inline CMatrix random_unitary(Rng& rng, Eigen::Index n) {
  Eigen::HouseholderQR<CMatrix> qr(random_matrix(rng, n, n));
  return qr.householderQ() * CMatrix::Identity(n, n);
}

inline SystemParams params_db(int k, double p_s_dbw, double p_j_dbw, double p_r_max_dbw,
                              double q = 0.0) {
  SystemParams p;
  p.k = k;
  p.p_s = db_to_watts(p_s_dbw);
  p.p_j = db_to_watts(p_j_dbw);
  p.p_r_max = db_to_watts(p_r_max_dbw);
  p.q_target = q;
  return p;
}

inline ChannelSet channels(std::uint64_t seed, int k) {
  Rng rng(seed);
  return sample_channels(rng, k);
}

}  // namespace relaybf::testing
