#include "relaybf/region.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "relaybf/baselines.hpp"
#include "relaybf/closedform.hpp"

namespace relaybf {

FormulationKind default_formulation(int k) {
  return k > 4 ? FormulationKind::kReduced : FormulationKind::kDirect;
}

namespace {

FormulationKind pick(const RegionOptions& opt, int k) {
  return opt.auto_formulation ? default_formulation(k) : opt.kind;
}

std::string sdp_source(FormulationKind kind) { return "sdp_" + to_string(kind); }

RatePoint solve_point(const ChannelSet& ch, const SystemParams& p, double q,
                      const RegionOptions& opt) {
  SystemParams pq = p;
  pq.q_target = q;
  const FormulationKind kind = pick(opt, ch.k());
  const FormulationResult res = solve_formulation(build(kind, ch, pq), opt.settings);
  RatePoint pt;
  pt.q = q;
  pt.source = sdp_source(kind);
  pt.status = res.solution.status;
  pt.beamformer = res.beamformer;
  pt.sinr_bound = res.sinr_bound;
  pt.rank1_gap = res.extraction.gap;
  pt.rate = pt.status == SdpStatus::kOptimal ? capacity(res.beamformer, ch, p) : 0.0;
  return pt;
}

}  // namespace

RatePoint compute_rate_at(const ChannelSet& ch, const SystemParams& p, double q,
                          const RegionOptions& opt) {
  if (q < 0.0) throw std::invalid_argument("compute_rate_at: q must be >= 0");
  return solve_point(ch, p, q, opt);
}

RatePoint compute_rmax(const ChannelSet& ch, const SystemParams& p, const RegionOptions& opt) {
  if (p.p_j > 0.0 && ch.h_j.norm() > 0.0) {
    const ParallelInfo par = detect_parallel(ch.h_s, ch.h_j);
    if (par.is_parallel && std::norm(par.rho) * p.p_j >= p.p_s) {
      RatePoint pt;
      pt.source = "closed_form";
      pt.beamformer = Beamformer::zero(ch.k());
      return pt;
    }
  }
  return solve_point(ch, p, 0.0, opt);
}

RatePoint compute_qmax(const ChannelSet& ch, const SystemParams& p, const RegionOptions& opt) {
  const FormulationKind kind = pick(opt, ch.k());
  const Formulation f = build(kind, ch, p);
  const SdpSolution sol = solve(build_qmax_problem(f.forms, p.p_r_max), opt.settings);
  RatePoint pt;
  pt.source = sdp_source(kind);
  pt.status = sol.status;
  pt.beamformer = Beamformer::zero(ch.k());
  if (sol.status != SdpStatus::kOptimal) {
    return pt;
  }
  pt.q = std::max(0.0, sol.objective);
  pt.sinr_bound = pt.q;
  const EigenResult eig = hermitian_eig(hermitian_part(sol.x));
  const CVector beta = std::sqrt(std::max(eig.values(0), 0.0)) * eig.vectors.col(0);
  pt.beamformer = scale_to_budget(recover_beamformer(f, beta, 1.0), ch, p);
  const double achieved = harvested_energy(pt.beamformer, ch, p);
  pt.rank1_gap = pt.q > 0.0 ? std::max(0.0, 1.0 - achieved / pt.q) : 0.0;
  pt.rate = capacity(pt.beamformer, ch, p);
  return pt;
}

RatePoint compute_r_eh(const ChannelSet& ch, const SystemParams& p, double q_max,
                       const RegionOptions& opt) {
  // Near Q_max the feasible set is thin and rank-1 extraction can land just
  // short of the target; back off until the extracted point holds it.
  RatePoint pt;
  for (double backoff : {1e-9, 1e-6, 1e-5, 1e-4}) {
    pt = solve_point(ch, p, q_max * (1.0 - backoff), opt);
    pt.backoff = backoff;
    if (pt.status != SdpStatus::kOptimal) continue;
    if (harvested_energy(pt.beamformer, ch, p) >= pt.q * (1.0 - 1e-7)) break;
  }
  return pt;
}

RegionResult region_sweep(const ChannelSet& ch, const SystemParams& p, int n_grid,
                          const RegionOptions& opt) {
  if (n_grid < 2) throw std::invalid_argument("region_sweep: n_grid must be >= 2");
  RegionResult out;
  const RatePoint qpt = compute_qmax(ch, p, opt);
  out.q_max = qpt.q;
  out.points.reserve(n_grid);
  out.points.push_back(compute_rmax(ch, p, opt));
  for (int i = 1; i + 1 < n_grid; ++i) {
    out.points.push_back(solve_point(ch, p, i * out.q_max / (n_grid - 1), opt));
  }
  out.points.push_back(compute_r_eh(ch, p, out.q_max, opt));
  out.r_max = out.points.front().rate;
  out.r_eh = out.points.back().rate;
  return out;
}

}  // namespace relaybf
