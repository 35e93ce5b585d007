#include "relaybf/liftings.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relaybf {

namespace {

CMatrix outer(const CVector& v) { return v * v.adjoint(); }

CMatrix block_diag(const CMatrix& a, const CMatrix& b) {
  CMatrix out = CMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

CMatrix identity(Eigen::Index n) { return CMatrix::Identity(n, n); }

CMatrix col(const CVector& v) { return CMatrix(v); }

}  // namespace

LiftedData lift(const ChannelSet& ch, const SystemParams& p) {
  const int k = ch.k();
  ch.validate(k);
  LiftedData ld;
  ld.k = k;
  const CMatrix hs = col(ch.h_s.conjugate());
  const CMatrix hj = col(ch.h_j.conjugate());
  const CMatrix hd = col(ch.h_d.conjugate());
  const CMatrix he = col(ch.h_e.conjugate());
  const CMatrix eye = identity(k);
  ld.h1 = kron(hs, hd);
  ld.h2 = kron(hj, hd);
  ld.h3 = kron(hs, he);
  ld.h4 = kron(hj, he);
  ld.big_h1 = kron(eye, hd);
  ld.big_h2 = kron(hs, eye);
  ld.big_h3 = kron(hj, eye);
  ld.big_h4 = kron(eye, he);
  ld.sigma = ld.big_h2 * ld.big_h2.adjoint() * p.p_s + ld.big_h3 * ld.big_h3.adjoint() * p.p_j +
             p.sigma_r2 * identity(k * k);
  ld.rho0 = p.p_j / p.p_s;
  ld.rho1 = p.sigma_r2 / p.p_s;
  ld.rho2 = p.sigma_d2 / p.p_s;
  return ld;
}

ReducedData reduced_basis(const ChannelSet& ch, double rank_tol) {
  const int k = ch.k();
  ch.validate(k);
  CMatrix stacked(k, 4);
  stacked << ch.h_s, ch.h_j, ch.h_d, ch.h_e;
  SvdResult svd = svd_full(stacked);
  const double lead = svd.s.size() > 0 ? svd.s(0) : 0.0;
  int r = 0;
  while (r < svd.s.size() && svd.s(r) > rank_tol * lead && lead > 0.0) {
    ++r;
  }
  ReducedData rd;
  rd.k = k;
  rd.r = r;
  rd.u1 = svd.u.leftCols(r);
  rd.u2 = svd.u.rightCols(k - r);
  rd.g1 = rd.u1.adjoint() * ch.h_s;
  rd.g2 = rd.u1.adjoint() * ch.h_j;
  rd.g3 = rd.u1.adjoint() * ch.h_d;
  rd.g4 = rd.u1.adjoint() * ch.h_e;
  return rd;
}

CMatrix reduced_theta(const ReducedData& rd, const SystemParams& p) {
  return outer(rd.g1) * p.p_s + outer(rd.g2) * p.p_j + p.sigma_r2 * identity(rd.r);
}

std::string to_string(FormulationKind kind) {
  switch (kind) {
    case FormulationKind::kDirect:
      return "direct";
    case FormulationKind::kReduced:
      return "reduced";
    case FormulationKind::kCombined:
      return "combined";
  }
  return "unknown";
}

FormulationKind formulation_from_string(const std::string& name) {
  if (name == "direct") return FormulationKind::kDirect;
  if (name == "reduced") return FormulationKind::kReduced;
  if (name == "combined") return FormulationKind::kCombined;
  throw std::invalid_argument("unknown formulation '" + name + "'");
}

QuadraticForms direct_forms(const LiftedData& ld, const SystemParams& p) {
  QuadraticForms f;
  f.signal = outer(ld.h1);
  f.jam = outer(ld.h2);
  f.noise = ld.big_h1 * ld.big_h1.adjoint();
  f.eh = outer(ld.h3) * p.p_s + outer(ld.h4) * p.p_j +
         p.sigma_r2 * ld.big_h4 * ld.big_h4.adjoint();
  f.power = ld.sigma;
  return f;
}

// Variables: [vec(B^H); vec(C^H)]. In this ordering the relay power form of
// the B block is the r-fold block diagonal of theta.
QuadraticForms reduced_forms(const ReducedData& rd, const SystemParams& p) {
  const int r = rd.r;
  const int m = rd.k - r;
  const CMatrix g1 = col(rd.g1), g2 = col(rd.g2), g3 = col(rd.g3), g4 = col(rd.g4);
  const CVector hh1 = kron(g3, g1);
  const CVector hh2 = kron(g3, g2);
  const CVector hh3 = kron(g4, g1);
  const CVector hh4 = kron(g4, g2);
  const CMatrix zero_c = CMatrix::Zero(r * m, r * m);

  QuadraticForms f;
  f.signal = block_diag(outer(hh1), zero_c);
  f.jam = block_diag(outer(hh2), zero_c);
  f.noise = block_diag(kron(outer(rd.g3), identity(r)), kron(outer(rd.g3), identity(m)));
  f.eh = block_diag(outer(hh3) * p.p_s + outer(hh4) * p.p_j +
                        p.sigma_r2 * kron(outer(rd.g4), identity(r)),
                    p.sigma_r2 * kron(outer(rd.g4), identity(m)));
  f.power = block_diag(kron(identity(r), reduced_theta(rd, p)), p.sigma_r2 * identity(r * m));
  return f;
}

// Variables: [vec(B); vec(C)] with the Kronecker lifting applied to g1..g4.
QuadraticForms combined_forms(const ReducedData& rd, const SystemParams& p) {
  const int r = rd.r;
  const int m = rd.k - r;
  const CMatrix g1c = col(rd.g1.conjugate()), g2c = col(rd.g2.conjugate());
  const CMatrix g3c = col(rd.g3.conjugate()), g4c = col(rd.g4.conjugate());
  const CVector th1 = kron(g1c, g3c);
  const CVector th2 = kron(g2c, g3c);
  const CVector th3 = kron(g1c, g4c);
  const CVector th4 = kron(g2c, g4c);
  const CMatrix tH1 = kron(identity(r), g3c);
  const CMatrix tH2 = kron(g1c, identity(r));
  const CMatrix tH3 = kron(g2c, identity(r));
  const CMatrix tH4 = kron(identity(r), g4c);
  const CMatrix cH1 = kron(identity(m), g3c);
  const CMatrix cH4 = kron(identity(m), g4c);
  const CMatrix zero_c = CMatrix::Zero(r * m, r * m);

  QuadraticForms f;
  f.signal = block_diag(outer(th1), zero_c);
  f.jam = block_diag(outer(th2), zero_c);
  f.noise = block_diag(tH1 * tH1.adjoint(), cH1 * cH1.adjoint());
  f.eh = block_diag(outer(th3) * p.p_s + outer(th4) * p.p_j + p.sigma_r2 * tH4 * tH4.adjoint(),
                    p.sigma_r2 * cH4 * cH4.adjoint());
  f.power = block_diag(tH2 * tH2.adjoint() * p.p_s + tH3 * tH3.adjoint() * p.p_j +
                           p.sigma_r2 * identity(r * r),
                       p.sigma_r2 * identity(r * m));
  return f;
}

namespace {

SdpProblem assemble(const QuadraticForms& f, const SystemParams& p) {
  p.validate();
  const double rho0 = p.p_j / p.p_s;
  const double rho1 = p.sigma_r2 / p.p_s;
  const double rho2 = p.sigma_d2 / p.p_s;
  const bool jammer = rho0 > 0.0;
  if (jammer && p.epsilon <= 0.0) {
    throw std::invalid_argument("epsilon must be positive when a jammer is present");
  }

  SdpProblem prob;
  prob.dim = static_cast<int>(f.signal.rows());
  prob.objective = f.signal;
  prob.constraints.push_back(
      {"normalization", rho1 * f.noise, rho2, rho0, Sense::kLessEqual, 1.0});
  if (jammer) {
    prob.constraints.push_back({"jammer", f.jam, 0.0, -1.0, Sense::kLessEqual, 0.0});
    prob.constraints.push_back(
        {"symmetrizability", f.signal, 0.0, -rho0 / p.epsilon, Sense::kGreaterEqual, 0.0});
  }
  if (p.q_target > 0.0) {
    prob.constraints.push_back({"eh", f.eh, -p.q_target, 0.0, Sense::kGreaterEqual, 0.0});
  }
  prob.constraints.push_back({"power", f.power, -p.p_r_max, 0.0, Sense::kLessEqual, 0.0});
  // b2 = 1/v^2. With the normalization row active, any feasible point has
  // b2 >= 1 / (rho2 + P_R,max (rho1 lambda_noise + eps lambda_signal)), the
  // lambdas taken relative to the power form. Far below that bound, the only
  // thing left is the X = 0, b2 = 0 limit of an infeasible problem.
  const double lam_noise = generalized_eig_max(f.power, hermitian_part(f.noise)).lambda_max;
  const double lam_signal = generalized_eig_max(f.power, hermitian_part(f.signal)).lambda_max;
  const double eps = jammer ? p.epsilon : 0.0;
  prob.b2_must_be_positive = true;
  prob.b2_floor =
      1e-3 / (rho2 + p.p_r_max * (rho1 * std::max(lam_noise, 0.0) + eps * std::max(lam_signal, 0.0)));
  return prob;
}

Formulation make(FormulationKind kind, QuadraticForms forms, const SystemParams& p, int k, int r,
                 CMatrix u1, CMatrix u2) {
  Formulation f;
  f.kind = kind;
  f.problem = assemble(forms, p);
  f.forms = std::move(forms);
  f.k = k;
  f.r = r;
  f.c_cols = kind == FormulationKind::kDirect ? 0 : k - r;
  f.u1 = std::move(u1);
  f.u2 = std::move(u2);
  f.p_r_max = p.p_r_max;
  f.params = p;
  return f;
}

}  // namespace

Formulation build_direct(const LiftedData& ld, const SystemParams& p) {
  return make(FormulationKind::kDirect, direct_forms(ld, p), p, ld.k, ld.k, CMatrix(), CMatrix());
}

Formulation build_reduced(const ReducedData& rd, const SystemParams& p) {
  if (rd.r < 1) {
    throw std::invalid_argument("build_reduced: all channels are zero");
  }
  return make(FormulationKind::kReduced, reduced_forms(rd, p), p, rd.k, rd.r, rd.u1, rd.u2);
}

Formulation build_combined(const ReducedData& rd, const SystemParams& p) {
  if (rd.r < 1) {
    throw std::invalid_argument("build_combined: all channels are zero");
  }
  return make(FormulationKind::kCombined, combined_forms(rd, p), p, rd.k, rd.r, rd.u1, rd.u2);
}

Formulation build(FormulationKind kind, const ChannelSet& ch, const SystemParams& p) {
  switch (kind) {
    case FormulationKind::kDirect:
      return build_direct(lift(ch, p), p);
    case FormulationKind::kReduced:
      return build_reduced(reduced_basis(ch), p);
    case FormulationKind::kCombined:
      return build_combined(reduced_basis(ch), p);
  }
  throw std::invalid_argument("build: unknown formulation");
}

SdpProblem build_qmax_problem(const QuadraticForms& forms, double p_r_max) {
  SdpProblem prob;
  prob.dim = static_cast<int>(forms.eh.rows());
  prob.objective = forms.eh;
  prob.constraints.push_back({"power", forms.power, 0.0, 0.0, Sense::kLessEqual, p_r_max});
  return prob;
}

Beamformer recover_beamformer(const Formulation& f, const CVector& beta, double b2) {
  if (!(b2 > 1e-14)) {
    throw NumericalError("recover_beamformer: degenerate scaling b2 = " + std::to_string(b2));
  }
  if (beta.size() != f.problem.dim) {
    throw DimensionError("recover_beamformer: beta has length " + std::to_string(beta.size()) +
                         ", expected " + std::to_string(f.problem.dim));
  }
  CVector alpha = beta / std::sqrt(b2);
  const double power = std::real(alpha.dot(f.forms.power * alpha));
  if (power > f.p_r_max) {
    alpha *= std::sqrt(f.p_r_max / power);
  }

  const int k = f.k;
  if (f.kind == FormulationKind::kDirect) {
    return {unvec(alpha, k, k)};
  }
  const int r = f.r;
  const int m = f.c_cols;
  CMatrix b_block;
  CMatrix c_block;
  if (f.kind == FormulationKind::kReduced) {
    b_block = unvec(alpha.head(r * r), r, r).adjoint();
    c_block = unvec(alpha.tail(r * m), m, r).adjoint();
  } else {
    b_block = unvec(alpha.head(r * r), r, r);
    c_block = unvec(alpha.tail(r * m), r, m);
  }
  CMatrix a = f.u1.conjugate() * b_block * f.u1.adjoint();
  if (m > 0) {
    a += f.u1.conjugate() * c_block * f.u2.adjoint();
  }
  return {a};
}

CVector lift_beamformer(const Formulation& f, const Beamformer& bf) {
  if (f.kind == FormulationKind::kDirect) {
    return vec(bf.a);
  }
  const int r = f.r;
  const int m = f.c_cols;
  // conj(u1)^T conj(u1) = I, so B = u1^T A u1 and C = u1^T A u2.
  const CMatrix b_block = f.u1.transpose() * bf.a * f.u1;
  const CMatrix c_block = m > 0 ? CMatrix(f.u1.transpose() * bf.a * f.u2) : CMatrix(r, 0);
  CVector out(r * r + r * m);
  if (f.kind == FormulationKind::kReduced) {
    out.head(r * r) = vec(b_block.adjoint());
    if (m > 0) out.tail(r * m) = vec(c_block.adjoint());
  } else {
    out.head(r * r) = vec(b_block);
    if (m > 0) out.tail(r * m) = vec(c_block);
  }
  return out;
}

namespace {

// With EH and power both active the homogenized interval can be empty after
// truncating X to rank one. In the original variables only the jammer ratio
// (scale free) and EH (growing with scale) constrain the direction, so put
// the dominant eigenvector on the power budget, and if it falls short of the
// EH target blend in as little of the EH-maximizing direction as needed.
void rescue_direction(const Formulation& f, FormulationResult& res) {
  const SystemParams& p = f.params;
  auto quad = [](const CMatrix& m, const CVector& x) { return std::real(x.dot(m * x)); };
  auto on_budget = [&](CVector x) {
    const double power = quad(f.forms.power, x);
    return power > 0.0 ? CVector(x * std::sqrt(p.p_r_max / power)) : CVector();
  };
  const EigenResult eig = hermitian_eig(hermitian_part(res.solution.x));
  const CVector v = on_budget(eig.vectors.col(0));
  if (v.size() == 0) return;
  const double q_need = p.q_target * (1.0 - 1e-9);
  CVector alpha = v;
  if (quad(f.forms.eh, v) < q_need) {
    CVector w = on_budget(generalized_eig_max(f.forms.power, f.forms.eh).psi);
    if (w.size() == 0 || quad(f.forms.eh, w) < q_need) return;
    const Complex phase = v.dot(f.forms.power * w);
    if (std::abs(phase) > 0.0) w *= std::conj(phase) / std::abs(phase);
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      const CVector x = on_budget((1.0 - mid) * v + mid * w);
      if (x.size() > 0 && quad(f.forms.eh, x) >= q_need) hi = mid;
      else lo = mid;
    }
    alpha = on_budget((1.0 - hi) * v + hi * w);
    if (alpha.size() == 0) return;
  }
  const double signal = quad(f.forms.signal, alpha);
  const double jam = quad(f.forms.jam, alpha);
  if (!(signal > 0.0)) return;
  if (p.p_j * jam > p.epsilon * p.p_s * signal) return;
  const double sinr =
      p.p_s * signal / (p.p_j * jam + p.sigma_r2 * quad(f.forms.noise, alpha) + p.sigma_d2);
  res.beamformer = recover_beamformer(f, alpha, 1.0);
  Rank1Extraction& ex = res.extraction;
  ex.achieved = sinr;
  ex.gap = res.sinr_bound > 0.0 ? 1.0 - sinr / res.sinr_bound : 0.0;
  ex.flagged = res.sinr_bound > 0.0 && sinr < 0.99 * res.sinr_bound;
}

}  // namespace

FormulationResult solve_formulation(const Formulation& f, const SdpSettings& settings) {
  FormulationResult res;
  res.solution = solve(f.problem, settings);
  res.beamformer = Beamformer::zero(f.k);
  if (res.solution.status != SdpStatus::kOptimal) {
    return res;
  }
  res.sinr_bound = std::max(0.0, res.solution.objective);
  res.extraction = extract_rank1(res.solution, f.problem);
  if (res.extraction.scale > 0.0 && res.extraction.b2 > 1e-14) {
    res.beamformer = recover_beamformer(f, res.extraction.beta, res.extraction.b2);
  } else {
    rescue_direction(f, res);
  }
  res.ok = !res.extraction.flagged;
  return res;
}

}  // namespace relaybf
