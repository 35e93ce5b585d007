#include "relaybf/closedform.hpp"

#include <cmath>
#include <stdexcept>

namespace relaybf {

ParallelInfo detect_parallel(const CVector& h_s, const CVector& h_j, double tol) {
  if (h_s.size() != h_j.size()) {
    throw DimensionError("detect_parallel: length mismatch");
  }
  const double ns = h_s.norm();
  const double nj = h_j.norm();
  if (ns == 0.0 || nj == 0.0) {
    throw std::invalid_argument("detect_parallel: zero channel vector");
  }
  const Complex inner = h_s.dot(h_j);  // h_S^H h_J
  ParallelInfo info;
  info.is_parallel = 1.0 - std::abs(inner) / (ns * nj) <= tol;
  if (info.is_parallel) {
    info.rho = inner / (ns * ns);
  }
  return info;
}

namespace {

// Scale x onto alpha^H sigma alpha = P_R,max.
CVector onto_power_sphere(const CVector& x, const CMatrix& sigma, double p_r_max) {
  const double power = std::real(x.dot(sigma * x));
  if (!(power > 0.0)) {
    return CVector::Zero(x.size());
  }
  return std::sqrt(p_r_max / power) * x;
}

}  // namespace

ClosedFormResult rmax_parallel(const LiftedData& ld, Complex rho, const SystemParams& p,
                               double theta) {
  ClosedFormResult out;
  out.exact = true;
  const double jam = std::norm(rho) * p.p_j;
  if (jam >= p.p_s) {
    out.value = 0.0;
    out.alpha = CVector::Zero(ld.h1.size());
    return out;
  }
  const CMatrix d = jam * ld.h1 * ld.h1.adjoint() +
                    p.sigma_r2 * ld.big_h1 * ld.big_h1.adjoint() +
                    (p.sigma_d2 / p.p_r_max) * ld.sigma;
  Eigen::LLT<CMatrix> llt(hermitian_part(d));
  if (llt.info() != Eigen::Success) {
    throw NumericalError("rmax_parallel: quadratic form is not positive definite");
  }
  const CVector x = llt.solve(ld.h1);
  out.value = p.p_s * std::real(ld.h1.dot(x));
  out.alpha = std::polar(1.0, theta) * onto_power_sphere(x, ld.sigma, p.p_r_max);
  return out;
}

ClosedFormResult rmax_nonparallel_suboptimal(const LiftedData& ld, const SystemParams& p) {
  const CMatrix w = null_space_basis(ld.h2 * ld.h2.adjoint());
  if (w.cols() == 0) {
    throw NumericalError("rmax_nonparallel_suboptimal: empty null space");
  }
  const CMatrix d = p.sigma_r2 * ld.big_h1 * ld.big_h1.adjoint() +
                    (p.sigma_d2 / p.p_r_max) * ld.sigma;
  const CMatrix reduced = hermitian_part(w.adjoint() * d * w);
  Eigen::LLT<CMatrix> llt(reduced);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("rmax_nonparallel_suboptimal: reduced form is not positive definite");
  }
  const CVector wh1 = w.adjoint() * ld.h1;
  const CVector f = llt.solve(wh1);
  ClosedFormResult out;
  out.exact = false;
  out.value = p.p_s * std::real(wh1.dot(f));
  out.alpha = onto_power_sphere(w * f, ld.sigma, p.p_r_max);
  return out;
}

ClosedFormResult qmax_closed(const LiftedData& ld, const SystemParams& p) {
  const CMatrix t = ld.h3 * ld.h3.adjoint() * p.p_s + ld.h4 * ld.h4.adjoint() * p.p_j +
                    p.sigma_r2 * ld.big_h4 * ld.big_h4.adjoint();
  const GeneralizedEig ge = generalized_eig_max(ld.sigma, hermitian_part(t));
  ClosedFormResult out;
  out.exact = true;
  out.value = std::max(ge.lambda_max, 0.0) * p.p_r_max;
  out.alpha = onto_power_sphere(ge.psi, ld.sigma, p.p_r_max);
  return out;
}

}  // namespace relaybf
