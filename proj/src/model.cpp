#include "relaybf/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace relaybf {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

double Rng::uniform() {
  // 53 random bits -> [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) {
    u1 = uniform();
  }
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

void SystemParams::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument(field + ": " + why);
  };
  if (k < 1) fail("k", "antenna count must be >= 1");
  if (!(p_s > 0.0) || !std::isfinite(p_s)) fail("p_s", "must be positive and finite");
  if (!(p_j >= 0.0) || !std::isfinite(p_j)) fail("p_j", "must be non-negative and finite");
  if (!(p_r_max > 0.0) || !std::isfinite(p_r_max)) fail("p_r_max", "must be positive and finite");
  if (!(sigma_r2 > 0.0) || !std::isfinite(sigma_r2)) fail("sigma_r2", "must be positive");
  if (!(sigma_d2 > 0.0) || !std::isfinite(sigma_d2)) fail("sigma_d2", "must be positive");
  if (!(q_target >= 0.0) || !std::isfinite(q_target)) fail("q_target", "must be >= 0");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) fail("epsilon", "must lie in [0, 1)");
}

double db_to_watts(double db) { return std::pow(10.0, db / 10.0); }
double watts_to_db(double watts) { return 10.0 * std::log10(watts); }

void ChannelSet::validate(int k) const {
  for (const CVector* h : {&h_s, &h_j, &h_d, &h_e}) {
    if (h->size() != k) {
      throw DimensionError("channel length " + std::to_string(h->size()) + " != K = " +
                           std::to_string(k));
    }
    if (!h->allFinite()) {
      throw std::invalid_argument("channel entries must be finite");
    }
  }
}

ChannelSet sample_channels(Rng& rng, int k) {
  if (k < 1) {
    throw std::invalid_argument("sample_channels: k must be >= 1");
  }
  auto draw = [&] {
    CVector h(k);
    for (int i = 0; i < k; ++i) h(i) = rng.complex_normal();
    return h;
  };
  ChannelSet ch;
  ch.h_s = draw();
  ch.h_j = draw();
  ch.h_d = draw();
  ch.h_e = draw();
  return ch;
}

namespace {

void check_dims(const Beamformer& bf, const ChannelSet& ch) {
  const Eigen::Index k = bf.a.rows();
  if (bf.a.cols() != k) {
    throw DimensionError("beamformer must be square");
  }
  ch.validate(static_cast<int>(k));
}

}  // namespace

double relay_power(const Beamformer& bf, const ChannelSet& ch, const SystemParams& p) {
  check_dims(bf, ch);
  return (bf.a * ch.h_s).squaredNorm() * p.p_s + (bf.a * ch.h_j).squaredNorm() * p.p_j +
         p.sigma_r2 * bf.a.squaredNorm();
}

double sinr(const Beamformer& bf, const ChannelSet& ch, const SystemParams& p) {
  check_dims(bf, ch);
  const Eigen::RowVectorXcd row = ch.h_d.transpose() * bf.a;
  const double signal = std::norm((row * ch.h_s)(0)) * p.p_s;
  const double jam = std::norm((row * ch.h_j)(0)) * p.p_j;
  return signal / (jam + row.squaredNorm() * p.sigma_r2 + p.sigma_d2);
}

double harvested_energy(const Beamformer& bf, const ChannelSet& ch, const SystemParams& p) {
  check_dims(bf, ch);
  const Eigen::RowVectorXcd row = ch.h_e.transpose() * bf.a;
  return std::norm((row * ch.h_s)(0)) * p.p_s + std::norm((row * ch.h_j)(0)) * p.p_j +
         row.squaredNorm() * p.sigma_r2;
}

double symmetrizability_ratio(const Beamformer& bf, const ChannelSet& ch, const SystemParams& p) {
  check_dims(bf, ch);
  const Eigen::RowVectorXcd row = ch.h_d.transpose() * bf.a;
  const double source = std::norm((row * ch.h_s)(0)) * p.p_s;
  const double jam = std::norm((row * ch.h_j)(0)) * p.p_j;
  if (source == 0.0) {
    return jam > 0.0 ? std::numeric_limits<double>::infinity()
                     : std::numeric_limits<double>::quiet_NaN();
  }
  return jam / source;
}

double rate_from_sinr(double s) { return 0.5 * std::log2(1.0 + std::max(s, 0.0)); }

double capacity(const Beamformer& bf, const ChannelSet& ch, const SystemParams& p) {
  const double ratio = symmetrizability_ratio(bf, ch, p);
  if (!(ratio < 1.0)) {
    return 0.0;
  }
  return rate_from_sinr(sinr(bf, ch, p));
}

}  // namespace relaybf
