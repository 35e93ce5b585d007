#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace relaybf {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct SvdResult {
  CMatrix u;  // rows x rows, unitary
  RVector s;  // min(rows, cols), non-increasing
  CMatrix v;  // cols x cols, unitary
};

struct EigenResult {
  RVector values;   // descending
  CMatrix vectors;  // columns match values
};

struct GeneralizedEig {
  double lambda_max = 0.0;
  CVector psi;
};

CMatrix kron(const CMatrix& a, const CMatrix& b);

// Column-stacking, so that vec(A1 A2 A3) = kron(A3^T, A1) vec(A2).
CVector vec(const CMatrix& m);
CMatrix unvec(const CVector& v, Eigen::Index rows, Eigen::Index cols);

// m = U diag(s) V^H with full (square) U and V.
SvdResult svd_full(const CMatrix& m);

// Throws DimensionError when m is not square or not Hermitian within 1e-10 ||m||.
EigenResult hermitian_eig(const CMatrix& m);

// Largest lambda with t psi = lambda s psi. s must be Hermitian positive definite.
GeneralizedEig generalized_eig_max(const CMatrix& s, const CMatrix& t);

// Orthonormal basis for the eigenspace of eigenvalues <= tol * lambda_1.
CMatrix null_space_basis(const CMatrix& m, double tol = 1e-10);

CMatrix psd_sqrt(const CMatrix& m);

double spectral_norm(const CMatrix& m);

// Hermitian part (m + m^H) / 2.
CMatrix hermitian_part(const CMatrix& m);

}  // namespace relaybf
