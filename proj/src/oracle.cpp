#include "relaybf/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace relaybf {

namespace {

CMatrix gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  CMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.complex_normal();
  return m;
}

// Rate of A on the power sphere, or -1 if the EH or symmetrizability
// constraint rejects it.
double scaled_rate(CMatrix& a, const ChannelSet& ch, const SystemParams& p) {
  Beamformer bf{a};
  const double power = relay_power(bf, ch, p);
  if (!(power > 0.0)) return -1.0;
  a *= std::sqrt(p.p_r_max / power);
  bf.a = a;
  if (p.q_target > 0.0 && harvested_energy(bf, ch, p) < p.q_target) return -1.0;
  const double ratio = symmetrizability_ratio(bf, ch, p);
  if (std::isnan(ratio)) return 0.0;
  if (ratio > p.epsilon) return -1.0;
  return capacity(bf, ch, p);
}

}  // namespace

OracleResult random_feasible_search(const ChannelSet& ch, const SystemParams& p, long n_samples,
                                    Rng& rng, const OracleOptions& opt) {
  if (n_samples < 1) throw std::invalid_argument("random_feasible_search: n_samples must be >= 1");
  const int k = ch.k();
  OracleResult out;
  out.best_a = Beamformer::zero(k);
  for (long s = 0; s < n_samples; ++s) {
    CMatrix a = gaussian_matrix(rng, k, k);
    const double rate = scaled_rate(a, ch, p);
    if (rate < 0.0) continue;
    ++out.feasible_samples;
    if (!out.found || rate > out.best_rate) {
      out.found = true;
      out.best_rate = rate;
      out.best_a.a = a;
    }
  }
  if (!out.found || !opt.polish) return out;

  double step = opt.initial_step;
  const double scale = 1.0 / std::sqrt(static_cast<double>(k * k));
  for (int it = 0; it < opt.polish_steps; ++it) {
    bool improved = false;
    for (int t = 0; t < opt.tries_per_step && !improved; ++t) {
      CMatrix a = out.best_a.a + (step * out.best_a.a.norm() * scale) * gaussian_matrix(rng, k, k);
      const double rate = scaled_rate(a, ch, p);
      if (rate > out.best_rate) {
        out.best_rate = rate;
        out.best_a.a = a;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  return out;
}

double sample_rayleigh_max(const CVector& h, const CMatrix& d, long n_evaluations, Rng& rng) {
  const Eigen::Index n = h.size();
  auto quotient = [&](const CVector& x) {
    const double den = std::real(x.dot(d * x));
    return den > 0.0 ? std::norm(h.dot(x)) / den : 0.0;
  };
  auto draw = [&]() {
    CVector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = rng.complex_normal();
    return x;
  };
  const long n_random = std::max(1L, n_evaluations / 10);
  CVector best = draw();
  double best_q = quotient(best);
  for (long s = 1; s < n_random; ++s) {
    const CVector x = draw();
    const double q = quotient(x);
    if (q > best_q) {
      best_q = q;
      best = x;
    }
  }
  // (1+1) search with the one-fifth success rule.
  double step = 0.3;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (long s = n_random; s < n_evaluations; ++s) {
    const CVector x = best + (step * best.norm() * scale) * draw();
    const double q = quotient(x);
    if (q > best_q) {
      best_q = q;
      best = x;
      step *= 1.5;
    } else {
      step *= std::pow(1.5, -0.25);
    }
    step = std::clamp(step, 1e-12, 1.0);
  }
  return best_q;
}

FeasibilityReport check_feasibility(const Beamformer& a, const ChannelSet& ch,
                                    const SystemParams& p, double tol) {
  FeasibilityReport r;
  r.power = relay_power(a, ch, p);
  r.power_ratio = r.power / p.p_r_max;
  r.eh = harvested_energy(a, ch, p);
  r.eh_slack = r.eh - p.q_target;
  r.ratio = symmetrizability_ratio(a, ch, p);
  r.ratio_defined = !std::isnan(r.ratio);
  r.power_ok = r.power <= p.p_r_max * (1.0 + tol);
  r.eh_ok = r.eh >= p.q_target * (1.0 - tol);
  r.ratio_ok = !r.ratio_defined || r.ratio <= p.epsilon * (1.0 + tol);
  r.pass = r.power_ok && r.eh_ok && r.ratio_ok;
  return r;
}

}  // namespace relaybf
