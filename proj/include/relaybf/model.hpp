#pragma once

#include <cstdint>
#include <limits>
#include <random>

#include "relaybf/matrixkit.hpp"

namespace relaybf {

/// Seeded generator with a portable normal sampler.
///
/// std::normal_distribution is implementation-defined, so Gaussian draws use
/// Box-Muller over the (standard-specified) mt19937_64 stream instead. The
/// seed is whitened through splitmix64 so adjacent seeds give unrelated
/// streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  double uniform();  // [0, 1)
  double normal();   // N(0, 1)
  Complex complex_normal();  // CN(0, 1): real and imaginary parts N(0, 1/2)

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Scalar parameters of the relay network, all in linear units (watts).
struct SystemParams {
  int k = 1;
  double p_s = 1.0;
  double p_j = 1.0;
  double p_r_max = 1.0;
  double sigma_r2 = 1.0;
  double sigma_d2 = 1.0;
  double q_target = 0.0;
  double epsilon = 0.99;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

double db_to_watts(double db);
double watts_to_db(double watts);

struct ChannelSet {
  CVector h_s;  // source -> relay
  CVector h_j;  // jammer -> relay
  CVector h_d;  // relay -> information receiver
  CVector h_e;  // relay -> energy harvester

  int k() const { return static_cast<int>(h_s.size()); }
  void validate(int k) const;
};

struct Beamformer {
  CMatrix a;

  static Beamformer zero(int k) { return {CMatrix::Zero(k, k)}; }
};

ChannelSet sample_channels(Rng& rng, int k);

double relay_power(const Beamformer& bf, const ChannelSet& ch, const SystemParams& p);
double sinr(const Beamformer& bf, const ChannelSet& ch, const SystemParams& p);
double harvested_energy(const Beamformer& bf, const ChannelSet& ch, const SystemParams& p);

/// Equivalent jammer-to-source power ratio at the destination.
///
/// +infinity when only the jammer reaches the destination, NaN when neither
/// does (the ratio is undefined and the capacity is zero).
double symmetrizability_ratio(const Beamformer& bf, const ChannelSet& ch, const SystemParams& p);

/// Bits per channel use, with the 1/2 half-duplex factor. Zero whenever the
/// jammer can symmetrize the equivalent channel.
double capacity(const Beamformer& bf, const ChannelSet& ch, const SystemParams& p);

double rate_from_sinr(double s);

}  // namespace relaybf
