#include "relaybf/sdp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace relaybf {

std::string to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::kOptimal:
      return "optimal";
    case SdpStatus::kInfeasible:
      return "infeasible";
    case SdpStatus::kUnbounded:
      return "unbounded";
    case SdpStatus::kNumericalFailure:
      return "numerical_failure";
  }
  return "unknown";
}

void SdpProblem::validate() const {
  if (dim < 1) {
    throw DimensionError("SdpProblem: dim must be >= 1");
  }
  auto check = [&](const CMatrix& m, const std::string& what) {
    if (m.rows() != dim || m.cols() != dim) {
      throw DimensionError("SdpProblem: " + what + " has wrong size");
    }
    if ((m - m.adjoint()).norm() > 1e-9 * std::max(1.0, m.norm())) {
      throw DimensionError("SdpProblem: " + what + " is not Hermitian");
    }
  };
  check(objective, "objective");
  for (const auto& c : constraints) {
    check(c.matrix, "constraint '" + c.label + "'");
  }
}

namespace {

// Real inner product <a, b> = Re tr(a b^H) for matrices of equal shape.
double inner(const CMatrix& a, const CMatrix& b) {
  return (a.array() * b.array().conjugate()).real().sum();
}

// Largest alpha in [0, inf) with x + alpha dx still PSD (inf if unbounded).
double max_step_psd(const CMatrix& x, const CMatrix& dx) {
  Eigen::LLT<CMatrix> llt(x);
  if (llt.info() != Eigen::Success) {
    return 0.0;
  }
  const auto l = llt.matrixL();
  CMatrix tmp = l.solve(dx);
  CMatrix z = l.solve(tmp.adjoint());
  z = hermitian_part(z);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(z, Eigen::EigenvaluesOnly);
  const double lam_min = es.eigenvalues()(0);
  if (lam_min >= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return -1.0 / lam_min;
}

double max_step_lp(const RVector& x, const RVector& dx) {
  double alpha = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (dx(i) < 0.0) {
      alpha = std::min(alpha, -x(i) / dx(i));
    }
  }
  return alpha;
}

// The problem rewritten as: minimize <C, X> + c.x  s.t.  <A_i, X> + Al_i.x = b_i.
struct StandardForm {
  int n = 0;
  int m = 0;
  int l = 0;
  std::vector<CMatrix> a;
  Eigen::MatrixXd al;  // m x l
  RVector b;
  CMatrix c;
  RVector cl;
  int b2_index = -1;
  int c2_index = -1;
  double objective_scale = 1.0;
  // Original variables are x_scale * X, b2_scale * b2, c2_scale * c2.
  double x_scale = 1.0;
  double b2_scale = 1.0;
  double c2_scale = 1.0;
};

// `magnitude` multiplies the equilibrated variable scales; a retry passes the
// size of a previous iterate so the new one starts near unit order.
StandardForm to_standard_form(const SdpProblem& prob, const std::array<double, 3>& magnitude = {1.0, 1.0, 1.0}) {
  StandardForm sf;
  sf.n = prob.dim;
  sf.m = static_cast<int>(prob.constraints.size());
  bool uses_b2 = false;
  bool uses_c2 = false;
  for (const auto& con : prob.constraints) {
    uses_b2 = uses_b2 || con.coef_b2 != 0.0;
    uses_c2 = uses_c2 || con.coef_c2 != 0.0;
  }
  int next = 0;
  if (uses_b2) sf.b2_index = next++;
  if (uses_c2) sf.c2_index = next++;
  const int first_slack = next;
  sf.l = first_slack + sf.m;

  // Equilibrate rows and the variable blocks (X, b2, c2) together, so that
  // powers in dBW over wide ranges keep the iterates at unit order.
  std::vector<CMatrix> mats;
  std::vector<double> mnorm(sf.m), cb(sf.m), cc(sf.m), rhs(sf.m), row(sf.m, 1.0);
  for (int i = 0; i < sf.m; ++i) {
    const auto& con = prob.constraints[i];
    mats.push_back(hermitian_part(con.matrix));
    mnorm[i] = spectral_norm(mats.back());
    cb[i] = con.coef_b2;
    cc[i] = con.coef_c2;
    rhs[i] = con.rhs;
  }
  for (int pass = 0; pass < 6; ++pass) {
    for (int i = 0; i < sf.m; ++i) {
      const double d = std::max({mnorm[i] * sf.x_scale, std::abs(cb[i]) * sf.b2_scale,
                                 std::abs(cc[i]) * sf.c2_scale});
      row[i] = d > 0.0 ? 1.0 / d : 1.0;
    }
    double mx = 0.0, mb = 0.0, mc = 0.0;
    for (int i = 0; i < sf.m; ++i) {
      mx = std::max(mx, mnorm[i] * row[i]);
      mb = std::max(mb, std::abs(cb[i]) * row[i]);
      mc = std::max(mc, std::abs(cc[i]) * row[i]);
    }
    if (mx > 0.0) sf.x_scale = 1.0 / mx;
    if (mb > 0.0) sf.b2_scale = 1.0 / mb;
    if (mc > 0.0) sf.c2_scale = 1.0 / mc;
  }
  sf.x_scale *= magnitude[0];
  sf.b2_scale *= magnitude[1];
  sf.c2_scale *= magnitude[2];
  for (int i = 0; i < sf.m; ++i) {
    const double d = std::max({mnorm[i] * sf.x_scale, std::abs(cb[i]) * sf.b2_scale,
                               std::abs(cc[i]) * sf.c2_scale});
    row[i] = d > 0.0 ? 1.0 / d : 1.0;
  }

  sf.a.reserve(sf.m);
  sf.al = Eigen::MatrixXd::Zero(sf.m, sf.l);
  sf.b = RVector::Zero(sf.m);
  for (int i = 0; i < sf.m; ++i) {
    const auto& con = prob.constraints[i];
    sf.a.push_back(mats[i] * (row[i] * sf.x_scale));
    if (uses_b2) sf.al(i, sf.b2_index) = cb[i] * row[i] * sf.b2_scale;
    if (uses_c2) sf.al(i, sf.c2_index) = cc[i] * row[i] * sf.c2_scale;
    sf.al(i, first_slack + i) = con.sense == Sense::kLessEqual ? 1.0 : -1.0;
    sf.b(i) = rhs[i] * row[i];
  }
  const CMatrix obj = hermitian_part(prob.objective) * sf.x_scale;
  const double cnorm = spectral_norm(obj);
  sf.objective_scale = cnorm > 0.0 ? cnorm : 1.0;
  sf.c = -obj / sf.objective_scale;
  sf.cl = RVector::Zero(sf.l);
  return sf;
}

struct Iterate {
  CMatrix x;
  RVector xl;
  RVector y;
  CMatrix s;
  RVector sl;
};

class InteriorPoint {
 public:
  InteriorPoint(const StandardForm& sf, const SdpSettings& settings)
      : sf_(sf), settings_(settings) {}

  SdpStatus run(Iterate& it, double& gap, int& iterations);

 private:
  RVector apply_a(const CMatrix& x, const RVector& xl) const {
    RVector out = sf_.al * xl;
    for (int i = 0; i < sf_.m; ++i) out(i) += inner(sf_.a[i], x);
    return out;
  }
  CMatrix apply_at(const RVector& y) const {
    CMatrix out = CMatrix::Zero(sf_.n, sf_.n);
    for (int i = 0; i < sf_.m; ++i) out += y(i) * sf_.a[i];
    return out;
  }

  const StandardForm& sf_;
  const SdpSettings& settings_;
};

SdpStatus InteriorPoint::run(Iterate& it, double& gap, int& iterations) {
  const int n = sf_.n;
  const int m = sf_.m;
  const int l = sf_.l;
  const double nu = n + l;
  const double bnorm = sf_.b.norm();
  const double cnorm = sf_.c.norm() + sf_.cl.norm();

  // Starting point in the style of SDPT3.
  double xi = std::max(10.0, std::sqrt(static_cast<double>(n)));
  double eta = std::max(10.0, std::sqrt(static_cast<double>(n)));
  for (int i = 0; i < m; ++i) {
    const double anorm = sf_.a[i].norm() + sf_.al.row(i).norm();
    xi = std::max(xi, n * (1.0 + std::abs(sf_.b(i))) / (1.0 + anorm));
    eta = std::max(eta, anorm);
  }
  eta = std::max(eta, 1.0 + cnorm);
  it.x = xi * CMatrix::Identity(n, n);
  it.xl = RVector::Constant(l, xi);
  it.s = eta * CMatrix::Identity(n, n);
  it.sl = RVector::Constant(l, eta);
  it.y = RVector::Zero(m);

  // On breakdown the most accurate iterate seen is returned, not the last.
  Iterate best = it;
  double best_merit = std::numeric_limits<double>::infinity();
  double best_gap = 0.0;
  int stalled = 0;
  for (iterations = 0; iterations < settings_.max_iterations; ++iterations) {
    const RVector rp = sf_.b - apply_a(it.x, it.xl);
    const CMatrix rd = sf_.c - it.s - apply_at(it.y);
    const RVector rdl = sf_.cl - it.sl - sf_.al.transpose() * it.y;
    const double pobj = inner(sf_.c, it.x) + sf_.cl.dot(it.xl);
    const double dobj = sf_.b.dot(it.y);
    const double mu = (inner(it.x, it.s) + it.xl.dot(it.sl)) / nu;
    gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double pinf = rp.norm() / (1.0 + bnorm);
    const double dinf = (rd.norm() + rdl.norm()) / (1.0 + cnorm);

    if (gap < settings_.tol && pinf < settings_.tol && dinf < settings_.tol) {
      return SdpStatus::kOptimal;
    }
    const double merit = std::max({gap, pinf, dinf});
    if (merit < best_merit) {
      best_merit = merit;
      best = it;
      best_gap = gap;
    }
    // Farkas-type certificates on the iterates.
    if (dobj > 0.0) {
      const double ray = ((sf_.c - rd).norm() + (sf_.cl - rdl).norm()) / dobj;
      if (ray < 1e-8) return SdpStatus::kInfeasible;
    }
    if (pobj < 0.0) {
      const double ray = apply_a(it.x, it.xl).norm() / -pobj;
      if (ray < 1e-8) return SdpStatus::kUnbounded;
    }
    if (stalled >= 4) {
      break;
    }

    Eigen::LLT<CMatrix> s_llt(it.s);
    if (s_llt.info() != Eigen::Success) {
      break;
    }
    const CMatrix s_inv = s_llt.solve(CMatrix::Identity(n, n));
    const RVector sl_inv = it.sl.cwiseInverse();

    // Schur complement for the HKM direction.
    Eigen::MatrixXd schur(m, m);
    std::vector<CMatrix> xas(m);
    for (int j = 0; j < m; ++j) xas[j] = it.x * sf_.a[j] * s_inv;
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) {
        // Re tr(A_i X A_j S^-1); A_i Hermitian.
        double v = (sf_.a[i].array() * xas[j].transpose().array()).real().sum();
        v += (sf_.al.row(i).array() * sf_.al.row(j).array() * it.xl.transpose().array() *
              sl_inv.transpose().array())
                 .sum();
        schur(i, j) = v;
        schur(j, i) = v;
      }
    }
    Eigen::LDLT<Eigen::MatrixXd> schur_ldlt(schur);
    if (schur_ldlt.info() != Eigen::Success) {
      break;
    }

    const CMatrix xs = it.x * it.s;
    const CMatrix x_rd_sinv = it.x * rd * s_inv;
    const RVector x_rdl = it.xl.cwiseProduct(rdl).cwiseProduct(sl_inv);

    // Solves for the direction targeting X S = rc (matrix) and x s = rcl.
    struct Direction {
      CMatrix dx;
      RVector dxl;
      RVector dy;
      CMatrix ds;
      RVector dsl;
    };
    auto direction = [&](const CMatrix& rc, const RVector& rcl) {
      const CMatrix rc_sinv = rc * s_inv;
      const RVector rcl_s = rcl.cwiseProduct(sl_inv);
      RVector h = rp - apply_a(hermitian_part(rc_sinv), rcl_s) +
                  apply_a(hermitian_part(x_rd_sinv), x_rdl);
      Direction d;
      d.dy = schur_ldlt.solve(h);
      d.ds = rd - apply_at(d.dy);
      d.dsl = rdl - sf_.al.transpose() * d.dy;
      d.dx = hermitian_part((rc - it.x * d.ds) * s_inv);
      d.dxl = (rcl - it.xl.cwiseProduct(d.dsl)).cwiseProduct(sl_inv);
      return d;
    };
    auto step_lengths = [&](const Direction& d, double& ap, double& ad) {
      ap = std::min(max_step_psd(it.x, d.dx), max_step_lp(it.xl, d.dxl));
      ad = std::min(max_step_psd(it.s, d.ds), max_step_lp(it.sl, d.dsl));
    };

    // Predictor.
    const Direction pred = direction(-xs, -it.xl.cwiseProduct(it.sl));
    double ap = 0.0;
    double ad = 0.0;
    step_lengths(pred, ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    const double mu_aff = (inner(it.x + ap * pred.dx, it.s + ad * pred.ds) +
                           (it.xl + ap * pred.dxl).dot(it.sl + ad * pred.dsl)) /
                          nu;
    double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3.0);
    sigma = std::clamp(sigma, 0.0, 1.0);

    // Corrector.
    const CMatrix rc = sigma * mu * CMatrix::Identity(n, n) - xs - pred.dx * pred.ds;
    const RVector rcl = RVector::Constant(l, sigma * mu) - it.xl.cwiseProduct(it.sl) -
                        pred.dxl.cwiseProduct(pred.dsl);
    const Direction corr = direction(rc, rcl);
    step_lengths(corr, ap, ad);
    ap = std::min(1.0, settings_.step_fraction * ap);
    ad = std::min(1.0, settings_.step_fraction * ad);
    if (!std::isfinite(ap) || !std::isfinite(ad)) {
      break;
    }
    stalled = (ap < 1e-8 && ad < 1e-8) ? stalled + 1 : 0;

    it.x = hermitian_part(it.x + ap * corr.dx);
    it.xl += ap * corr.dxl;
    it.y += ad * corr.dy;
    it.s = hermitian_part(it.s + ad * corr.ds);
    it.sl += ad * corr.dsl;
  }
  if (std::isfinite(best_merit)) {
    it = best;
    gap = best_gap;
  }
  return SdpStatus::kNumericalFailure;
}

}  // namespace

SdpSolution solve(const SdpProblem& prob, const SdpSettings& settings) {
  prob.validate();
  if (!(settings.tol > 0.0 && settings.tol <= 1e-2)) {
    throw std::invalid_argument("solve: tol must lie in (0, 1e-2]");
  }
  const StandardForm sf = to_standard_form(prob);

  SdpSolution sol;
  if (sf.m == 0) {
    // Only X >= 0: bounded iff the objective is negative semidefinite.
    EigenResult eig = hermitian_eig(hermitian_part(prob.objective));
    sol.x = CMatrix::Zero(prob.dim, prob.dim);
    sol.status = eig.values(0) > 0.0 ? SdpStatus::kUnbounded : SdpStatus::kOptimal;
    return sol;
  }

  auto attempt = [&](const StandardForm& form, Iterate& it) {
    SdpSolution out;
    InteriorPoint ipm(form, settings);
    out.status = ipm.run(it, out.gap, out.iterations);
    out.x = form.x_scale * it.x;
    out.b2 = form.b2_index >= 0 ? form.b2_scale * std::max(0.0, it.xl(form.b2_index)) : 0.0;
    out.c2 = form.c2_index >= 0 ? form.c2_scale * std::max(0.0, it.xl(form.c2_index)) : 0.0;
    out.objective = inner(hermitian_part(prob.objective), out.x);
    if (out.status == SdpStatus::kNumericalFailure) {
      // Accept a slightly looser but still accurate termination.
      RVector ax = form.al * it.xl;
      for (int i = 0; i < form.m; ++i) ax(i) += inner(form.a[i], it.x);
      const double pinf = (form.b - ax).norm() / (1.0 + form.b.norm());
      if (out.gap < 1e3 * settings.tol && pinf < 1e3 * settings.tol) {
        out.status = SdpStatus::kOptimal;
      }
    }
    return out;
  };

  Iterate it;
  sol = attempt(sf, it);
  if (sol.status == SdpStatus::kNumericalFailure && it.x.allFinite() && it.xl.allFinite()) {
    auto size_of = [](double v) { return v > 1e-12 ? v : 1.0; };
    const std::array<double, 3> magnitude = {
        size_of(std::real(it.x.trace())),
        sf.b2_index >= 0 ? size_of(it.xl(sf.b2_index)) : 1.0,
        sf.c2_index >= 0 ? size_of(it.xl(sf.c2_index)) : 1.0};
    Iterate retry_it;
    const SdpSolution retry = attempt(to_standard_form(prob, magnitude), retry_it);
    if (retry.status != SdpStatus::kNumericalFailure) {
      const int used = sol.iterations;
      sol = retry;
      sol.iterations += used;
    }
  }
  if (prob.b2_must_be_positive && sol.status != SdpStatus::kUnbounded &&
      sol.b2 <= prob.b2_floor) {
    sol.status = SdpStatus::kInfeasible;
  }
  return sol;
}

SdpSolution solve(const SdpProblem& prob, double tol) {
  SdpSettings settings;
  settings.tol = tol;
  return solve(prob, settings);
}

int numerical_rank(const CMatrix& x, double rel_tol) {
  if (x.size() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(x), Eigen::EigenvaluesOnly);
  const RVector& ev = es.eigenvalues();
  const double lead = ev(ev.size() - 1);
  if (!(lead > 0.0)) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > rel_tol * lead) ++rank;
  }
  return rank;
}

double max_constraint_violation(const SdpProblem& prob, const CMatrix& x, double b2, double c2) {
  double worst = 0.0;
  for (const auto& con : prob.constraints) {
    const double tx = inner(hermitian_part(con.matrix), x);
    const double lhs = tx + con.coef_b2 * b2 + con.coef_c2 * c2;
    const double scale = std::max({1.0, std::abs(con.rhs), std::abs(tx),
                                   std::abs(con.coef_b2 * b2), std::abs(con.coef_c2 * c2)});
    const double excess = con.sense == Sense::kLessEqual ? lhs - con.rhs : con.rhs - lhs;
    worst = std::max(worst, excess / scale);
  }
  return worst;
}

Rank1Extraction extract_rank1(const SdpSolution& sol, const SdpProblem& prob) {
  if (sol.status != SdpStatus::kOptimal) {
    throw std::invalid_argument("extract_rank1: solution is not optimal");
  }
  Rank1Extraction out;
  out.b2 = sol.b2;
  out.c2 = sol.c2;
  EigenResult eig = hermitian_eig(hermitian_part(sol.x));
  const double lam = std::max(eig.values(0), 0.0);
  out.beta = std::sqrt(lam) * eig.vectors.col(0);
  const CMatrix x1 = out.beta * out.beta.adjoint();

  // Constraints are affine in the scale s of beta beta^H with b2, c2 held
  // fixed; keep the largest s in the feasible interval. A tight slack is
  // tried first so the result is feasible to better than 1e-6.
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  auto interval = [&](double rel_tol) {
    lo = 0.0;
    hi = std::numeric_limits<double>::infinity();
    for (const auto& con : prob.constraints) {
      const double t = inner(hermitian_part(con.matrix), x1);
      const double fixed = con.coef_b2 * out.b2 + con.coef_c2 * out.c2;
      const double slack_tol =
          rel_tol * std::max({1.0, std::abs(con.rhs), std::abs(t), std::abs(fixed)});
      // s * t + fixed  (<= | >=)  rhs
      const double room = con.rhs - fixed;
      if (con.sense == Sense::kLessEqual) {
        if (t > 0.0) hi = std::min(hi, (room + slack_tol) / t);
        else if (t < 0.0) lo = std::max(lo, (room + slack_tol) / t);
        else if (room < -slack_tol) hi = -1.0;
      } else {
        if (t > 0.0) lo = std::max(lo, (room - slack_tol) / t);
        else if (t < 0.0) hi = std::min(hi, (room - slack_tol) / t);
        else if (room > slack_tol) hi = -1.0;
      }
    }
  };
  interval(1e-9);
  if (hi < lo) interval(1e-6);
  const double obj1 = inner(hermitian_part(prob.objective), x1);
  if (hi < lo) {
    out.scale = 0.0;
    out.achieved = 0.0;
    out.flagged = true;
  } else {
    // Objective is linear in s: take the end of the interval that helps it,
    // never scaling up past the SDP candidate itself.
    double s = obj1 >= 0.0 ? std::min(hi, 1.0) : lo;
    if (s < lo) s = lo;
    out.scale = s;
    out.achieved = s * obj1;
  }
  out.beta *= std::sqrt(std::max(out.scale, 0.0));
  const double bound = sol.objective;
  out.gap = bound > 0.0 ? 1.0 - out.achieved / bound : 0.0;
  if (bound > 0.0 && out.achieved < 0.99 * bound) {
    out.flagged = true;
  }
  return out;
}

void write_problem(std::ostream& os, const SdpProblem& prob) {
  const auto flags = os.flags();
  const auto precision = os.precision();
  os << std::setprecision(17);
  auto write_matrix = [&](const CMatrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (c > 0) os << ' ';
        os << m(r, c).real() << ' ' << m(r, c).imag();
      }
      os << '\n';
    }
  };
  os << "relaybf-sdp 1\n";
  os << "dim " << prob.dim << '\n';
  os << "b2_must_be_positive " << (prob.b2_must_be_positive ? 1 : 0) << " b2_floor "
     << prob.b2_floor << '\n';
  os << "objective\n";
  write_matrix(prob.objective);
  os << "constraints " << prob.constraints.size() << '\n';
  for (const auto& con : prob.constraints) {
    os << "constraint " << (con.label.empty() ? "-" : con.label) << " sense "
       << (con.sense == Sense::kLessEqual ? "<=" : ">=") << " rhs " << con.rhs << " coef_b2 "
       << con.coef_b2 << " coef_c2 " << con.coef_c2 << '\n';
    write_matrix(con.matrix);
  }
  os.flags(flags);
  os.precision(precision);
}

}  // namespace relaybf
