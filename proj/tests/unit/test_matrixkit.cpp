#include <doctest.h>

#include "relaybf/matrixkit.hpp"
#include "support.hpp"

using namespace relaybf;
using namespace relaybf::testing;

TEST_CASE("kron identity and scalar cases") {
  CHECK(kron(CMatrix::Identity(2, 2), CMatrix::Identity(3, 3)).isApprox(CMatrix::Identity(6, 6)));
  Rng rng(1);
  const CMatrix m = random_matrix(rng, 3, 2);
  CMatrix two(1, 1);
  two(0, 0) = 2.0;
  CHECK(kron(two, m).isApprox(2.0 * m));
}

TEST_CASE("kron block pattern by hand") {
  CMatrix a(2, 2), b(2, 2), want(4, 4);
  a << 0, 1, 1, 0;
  b << 1, 2, 3, 4;
  want << 0, 0, 1, 2,
          0, 0, 3, 4,
          1, 2, 0, 0,
          3, 4, 0, 0;
  CHECK((kron(a, b) - want).norm() == 0.0);
}

TEST_CASE("kron is bilinear in scalars") {
  Rng rng(2);
  const CMatrix a = random_matrix(rng, 2, 3), b = random_matrix(rng, 3, 2);
  const Complex s(0.7, -1.3);
  CHECK((kron(s * a, b) - s * kron(a, b)).norm() <= 1e-12 * kron(a, b).norm());
}

TEST_CASE("vec stacks columns and unvec inverts it") {
  CMatrix m(2, 2);
  m << 1, 3, 2, 4;
  const CVector v = vec(m);
  for (int i = 0; i < 4; ++i) CHECK(v(i) == Complex(i + 1, 0));
  Rng rng(3);
  const CMatrix r = random_matrix(rng, 3, 3);
  CHECK(unvec(vec(r), 3, 3) == r);
  CHECK_THROWS_AS(unvec(vec(r), 2, 4), DimensionError);
}

TEST_CASE("vec identity vec(A1 A2 A3) = kron(A3^T, A1) vec(A2)") {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 4;
    const CMatrix a1 = random_matrix(rng, n, n), a2 = random_matrix(rng, n, n),
                  a3 = random_matrix(rng, n, n);
    const CVector lhs = vec(a1 * a2 * a3);
    const CVector rhs = kron(a3.transpose(), a1) * vec(a2);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, lhs.norm()));
  }
}

TEST_CASE("svd_full") {
  CHECK(svd_full(CMatrix::Identity(3, 3)).s.isApprox(RVector::Ones(3)));
  const SvdResult z = svd_full(CMatrix::Zero(4, 2));
  CHECK(z.s.size() == 2);
  CHECK(z.s.norm() == 0.0);
  Rng rng(5);
  const CMatrix m = random_matrix(rng, 6, 4);
  const SvdResult r = svd_full(m);
  CHECK(r.u.rows() == 6);
  CHECK(r.v.rows() == 4);
  CMatrix sigma = CMatrix::Zero(6, 4);
  for (int i = 0; i < 4; ++i) sigma(i, i) = r.s(i);
  CHECK((r.u * sigma * r.v.adjoint() - m).norm() <= 1e-10 * m.norm());
  CHECK((r.u.adjoint() * r.u - CMatrix::Identity(6, 6)).norm() <= 1e-12);
}

TEST_CASE("hermitian_eig") {
  CMatrix d = CMatrix::Zero(3, 3);
  d.diagonal() << 3, 1, 2;
  const EigenResult e = hermitian_eig(d);
  CHECK(e.values(0) == doctest::Approx(3));
  CHECK(e.values(1) == doctest::Approx(2));
  CHECK(e.values(2) == doctest::Approx(1));

  Rng rng(6);
  const CVector h = random_vector(rng, 5);
  const EigenResult o = hermitian_eig(h * h.adjoint());
  CHECK(o.values(0) == doctest::Approx(h.squaredNorm()));
  for (int i = 1; i < 5; ++i) CHECK(std::abs(o.values(i)) <= 1e-12 * h.squaredNorm());

  const CMatrix m = random_hermitian(rng, 8);
  const EigenResult r = hermitian_eig(m);
  CHECK((m * r.vectors.col(0) - r.values(0) * r.vectors.col(0)).norm() <= 1e-10 * m.norm());

  CHECK_THROWS_AS(hermitian_eig(random_matrix(rng, 3, 3)), DimensionError);
  CHECK_THROWS_AS(hermitian_eig(random_matrix(rng, 3, 2)), DimensionError);
}

TEST_CASE("generalized_eig_max") {
  CMatrix t = CMatrix::Zero(3, 3);
  t.diagonal() << 2, 5, 1;
  const GeneralizedEig g = generalized_eig_max(CMatrix::Identity(3, 3), t);
  CHECK(g.lambda_max == doctest::Approx(5));
  CHECK(std::abs(g.psi(1)) / g.psi.norm() == doctest::Approx(1));

  Rng rng(7);
  const CMatrix tt = random_psd(rng, 4, 4);
  const double one = generalized_eig_max(CMatrix::Identity(4, 4), tt).lambda_max;
  const double two = generalized_eig_max(2.0 * CMatrix::Identity(4, 4), tt).lambda_max;
  CHECK(two == doctest::Approx(one / 2).epsilon(1e-12));

  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix s = random_pd(rng, 4), u = random_psd(rng, 4, 4);
    const CMatrix s_isqrt = psd_sqrt(s).inverse();
    const double want = hermitian_eig(hermitian_part(s_isqrt * u * s_isqrt)).values(0);
    const GeneralizedEig ge = generalized_eig_max(s, u);
    CHECK(std::abs(ge.lambda_max - want) <= 1e-10 * std::max(1.0, want));
    CHECK((u * ge.psi - ge.lambda_max * s * ge.psi).norm() <= 1e-9 * u.norm() * ge.psi.norm());
  }
}

TEST_CASE("null_space_basis") {
  Rng rng(8);
  const CVector h = random_vector(rng, 4);
  const CMatrix w = null_space_basis(h * h.adjoint());
  CHECK(w.cols() == 3);
  CHECK((w.adjoint() * w - CMatrix::Identity(3, 3)).norm() <= 1e-12);
  CHECK((h.adjoint() * w).norm() <= 1e-12 * h.norm());

  CHECK(null_space_basis(CMatrix::Identity(3, 3)).cols() == 0);

  const CMatrix m = random_psd(rng, 5, 2);
  const CMatrix n = null_space_basis(m);
  CHECK(n.cols() == 3);
  CHECK((m * n).norm() <= 1e-9 * m.norm());
  CHECK((n.adjoint() * n - CMatrix::Identity(3, 3)).norm() <= 1e-12);

  // relative tolerance: scaling m does not change the detected rank
  CHECK(null_space_basis(1e-8 * m).cols() == 3);
  CHECK(null_space_basis(1e8 * m).cols() == 3);
}

TEST_CASE("psd_sqrt") {
  CMatrix d = CMatrix::Zero(2, 2);
  d.diagonal() << 4, 9;
  const CMatrix r = psd_sqrt(d);
  CHECK(r(0, 0).real() == doctest::Approx(2));
  CHECK(r(1, 1).real() == doctest::Approx(3));
  CHECK(std::abs(r(0, 1)) <= 1e-15);
  CHECK(psd_sqrt(CMatrix::Identity(3, 3)).isApprox(CMatrix::Identity(3, 3)));

  Rng rng(9);
  const CMatrix m = random_psd(rng, 6, 6);
  const CMatrix s = psd_sqrt(m);
  CHECK((s * s - m).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, m.norm()));
}

TEST_CASE("decompositions hold up to 36 x 36") {
  Rng rng(10);
  for (int n : {9, 16, 25, 36}) {
    const CMatrix m = random_hermitian(rng, n);
    const EigenResult e = hermitian_eig(m);
    const CMatrix recon = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    CHECK((recon - m).norm() <= 1e-10 * m.norm());
    const CMatrix p = random_psd(rng, n, n);
    const CMatrix s = psd_sqrt(p);
    CHECK((s * s - p).norm() <= 1e-10 * p.norm());
  }
}

TEST_CASE("spectral_norm and hermitian_part") {
  CMatrix d = CMatrix::Zero(3, 3);
  d.diagonal() << -4, 1, 2;
  CHECK(spectral_norm(d) == doctest::Approx(4));
  Rng rng(11);
  const CMatrix m = random_matrix(rng, 4, 4);
  const CMatrix h = hermitian_part(m);
  CHECK((h - h.adjoint()).norm() == 0.0);
}
