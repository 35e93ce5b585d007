#include "relaybf/matrixkit.hpp"

#include <algorithm>
#include <cmath>

namespace relaybf {

namespace {

void require_hermitian(const CMatrix& m, const char* who) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(who) + ": matrix is not square");
  }
  const double scale = std::max(1.0, m.norm());
  if ((m - m.adjoint()).norm() > 1e-10 * scale) {
    throw DimensionError(std::string(who) + ": matrix is not Hermitian");
  }
}

}  // namespace

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CVector vec(const CMatrix& m) {
  // Eigen storage is column-major, so reshaping is column stacking.
  return m.reshaped();
}

CMatrix unvec(const CVector& v, Eigen::Index rows, Eigen::Index cols) {
  if (rows < 0 || cols < 0 || v.size() != rows * cols) {
    throw DimensionError("unvec: length " + std::to_string(v.size()) + " does not match " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
  return v.reshaped(rows, cols);
}

SvdResult svd_full(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) {
    throw NumericalError("svd_full: decomposition did not converge");
  }
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

EigenResult hermitian_eig(const CMatrix& m) {
  require_hermitian(m, "hermitian_eig");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m));
  if (es.info() != Eigen::Success) {
    throw NumericalError("hermitian_eig: decomposition did not converge");
  }
  // Eigen returns ascending order.
  EigenResult out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  return out;
}

GeneralizedEig generalized_eig_max(const CMatrix& s, const CMatrix& t) {
  require_hermitian(s, "generalized_eig_max");
  require_hermitian(t, "generalized_eig_max");
  if (s.rows() != t.rows()) {
    throw DimensionError("generalized_eig_max: size mismatch");
  }
  Eigen::LLT<CMatrix> llt(hermitian_part(s));
  if (llt.info() != Eigen::Success) {
    throw NumericalError("generalized_eig_max: s is not positive definite");
  }
  // s = L L^H; L^{-1} t L^{-H} y = lambda y, psi = L^{-H} y.
  const CMatrix& l = llt.matrixL();
  CMatrix tmp = l.triangularView<Eigen::Lower>().solve(hermitian_part(t));
  CMatrix reduced = l.triangularView<Eigen::Lower>().solve(tmp.adjoint()).adjoint();
  EigenResult eig = hermitian_eig(hermitian_part(reduced));
  GeneralizedEig out;
  out.lambda_max = eig.values(0);
  out.psi = l.adjoint().triangularView<Eigen::Upper>().solve(eig.vectors.col(0));
  return out;
}

CMatrix null_space_basis(const CMatrix& m, double tol) {
  EigenResult eig = hermitian_eig(m);
  const Eigen::Index n = m.rows();
  if (n == 0) {
    return CMatrix(0, 0);
  }
  const double lead = std::max(eig.values(0), 0.0);
  Eigen::Index rank = 0;
  while (rank < n && eig.values(rank) > tol * lead && lead > 0.0) {
    ++rank;
  }
  return eig.vectors.rightCols(n - rank);
}

CMatrix psd_sqrt(const CMatrix& m) {
  EigenResult eig = hermitian_eig(m);
  const double scale = std::max(1.0, std::abs(eig.values(0)));
  RVector root(eig.values.size());
  for (Eigen::Index i = 0; i < root.size(); ++i) {
    const double lam = eig.values(i);
    if (lam < -1e-10 * scale) {
      throw NumericalError("psd_sqrt: matrix has a negative eigenvalue");
    }
    root(i) = std::sqrt(std::max(lam, 0.0));
  }
  CMatrix out = eig.vectors * root.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  return hermitian_part(out);
}

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) {
    return 0.0;
  }
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace relaybf
