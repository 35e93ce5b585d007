#include <doctest.h>

#include <cmath>

#include "relaybf/liftings.hpp"
#include "support.hpp"

using namespace relaybf;
using namespace relaybf::testing;

namespace {

double form(const CMatrix& m, const CVector& x) { return std::real(x.dot(m * x)); }

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// The beamformers the reduced variables can represent: conj(u1) u1^T A.
Beamformer structured(const Formulation& f, const CMatrix& a) {
  return {f.u1.conjugate() * f.u1.transpose() * a};
}

void check_forms(const Formulation& f, const Beamformer& a, const ChannelSet& ch,
                 const SystemParams& p) {
  const CVector x = lift_beamformer(f, a);
  const double sig = std::norm((ch.h_d.transpose() * a.a * ch.h_s)(0));
  const double jam = std::norm((ch.h_d.transpose() * a.a * ch.h_j)(0));
  const double noise = (ch.h_d.transpose() * a.a).squaredNorm();
  CHECK(rel(form(f.forms.signal, x), sig) <= 1e-10);
  CHECK(rel(form(f.forms.jam, x), jam) <= 1e-10);
  CHECK(rel(form(f.forms.noise, x), noise) <= 1e-10);
  CHECK(rel(form(f.forms.eh, x), harvested_energy(a, ch, p)) <= 1e-10);
  CHECK(rel(form(f.forms.power, x), relay_power(a, ch, p)) <= 1e-10);
}

}  // namespace

TEST_CASE("K = 1 lifting by hand") {
  ChannelSet ch;
  ch.h_s = CVector::Constant(1, Complex(1, 2));
  ch.h_j = CVector::Constant(1, Complex(0.5, -1));
  ch.h_d = CVector::Constant(1, Complex(-1, 1));
  ch.h_e = CVector::Constant(1, Complex(2, 0));
  SystemParams p;
  p.p_s = 2.0;
  p.p_j = 3.0;
  p.sigma_r2 = 0.5;
  const LiftedData ld = lift(ch, p);
  CHECK(std::abs(ld.h1(0) - std::conj(ch.h_s(0)) * std::conj(ch.h_d(0))) <= 1e-15);
  const double sigma = std::norm(ch.h_s(0)) * 2.0 + std::norm(ch.h_j(0)) * 3.0 + 0.5;
  CHECK(ld.sigma(0, 0).real() == doctest::Approx(sigma));
  CHECK(ld.rho0 == doctest::Approx(1.5));
  CHECK(ld.rho1 == doctest::Approx(0.25));
  CHECK(ld.rho2 == doctest::Approx(0.5));
}

TEST_CASE("lifted vectors reproduce the model on random K = 3") {
  Rng rng(21);
  const ChannelSet ch = sample_channels(rng, 3);
  SystemParams p;
  p.k = 3;
  p.p_j = 1.7;
  const LiftedData ld = lift(ch, p);
  for (int t = 0; t < 20; ++t) {
    const Beamformer a{random_matrix(rng, 3, 3)};
    const CVector al = vec(a.a);
    CHECK(rel(std::norm(ld.h1.dot(al)), std::norm((ch.h_d.transpose() * a.a * ch.h_s)(0))) <=
          1e-10);
    CHECK(rel(std::norm(ld.h2.dot(al)), std::norm((ch.h_d.transpose() * a.a * ch.h_j)(0))) <=
          1e-10);
    CHECK(rel(form(ld.sigma, al), relay_power(a, ch, p)) <= 1e-10);
    CHECK(rel((ld.big_h1.adjoint() * al).squaredNorm(),
              (ch.h_d.transpose() * a.a).squaredNorm()) <= 1e-10);
    CHECK(rel((ld.big_h2.adjoint() * al).squaredNorm(), (a.a * ch.h_s).squaredNorm()) <= 1e-10);
    CHECK(rel((ld.big_h3.adjoint() * al).squaredNorm(), (a.a * ch.h_j).squaredNorm()) <= 1e-10);
    CHECK(rel((ld.big_h4.adjoint() * al).squaredNorm(),
              (ch.h_e.transpose() * a.a).squaredNorm()) <= 1e-10);
  }
}

TEST_CASE("reduced basis") {
  Rng rng(22);
  const ChannelSet six = sample_channels(rng, 6);
  CHECK(reduced_basis(six).r == 4);

  ChannelSet two = sample_channels(rng, 5);
  two.h_j = 2.0 * two.h_s;
  two.h_e = two.h_d;
  const ReducedData rd2 = reduced_basis(two);
  CHECK(rd2.r == 2);
  CHECK(rd2.u2.cols() == 3);

  const ChannelSet five = sample_channels(rng, 5);
  const ReducedData rd = reduced_basis(five);
  CHECK(rd.r == 4);
  CHECK(rd.u1.cols() + rd.u2.cols() == 5);
  CMatrix u(5, 5);
  u << rd.u1, rd.u2;
  CHECK((u.adjoint() * u - CMatrix::Identity(5, 5)).norm() <= 1e-12);
  for (const CVector* h : {&five.h_s, &five.h_j, &five.h_d, &five.h_e}) {
    CHECK((rd.u2.adjoint() * *h).norm() <= 1e-10 * h->norm());
  }
  CHECK((rd.g1 - rd.u1.adjoint() * five.h_s).norm() <= 1e-14);

  const ChannelSet three = sample_channels(rng, 3);
  const ReducedData rd3 = reduced_basis(three);
  CHECK(rd3.r == 3);
  CHECK(rd3.u2.cols() == 0);
}

TEST_CASE("formulation names") {
  for (auto kind : {FormulationKind::kDirect, FormulationKind::kReduced, FormulationKind::kCombined}) {
    CHECK(formulation_from_string(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(formulation_from_string("fancy"), std::invalid_argument);
}

TEST_CASE("quadratic forms match the model in every formulation") {
  Rng rng(23);
  for (int k : {2, 3, 5, 6}) {
    const ChannelSet ch = sample_channels(rng, k);
    SystemParams p;
    p.k = k;
    p.p_s = 2.5;
    p.p_j = 0.8;
    p.sigma_r2 = 0.7;
    p.q_target = 0.1;
    for (auto kind :
         {FormulationKind::kDirect, FormulationKind::kReduced, FormulationKind::kCombined}) {
      const Formulation f = build(kind, ch, p);
      for (int t = 0; t < 5; ++t) {
        const CMatrix a = random_matrix(rng, k, k);
        check_forms(f, kind == FormulationKind::kDirect ? Beamformer{a} : structured(f, a), ch, p);
      }
    }
  }
}

TEST_CASE("problem sizes") {
  Rng rng(24);
  const ChannelSet ch = sample_channels(rng, 6);
  SystemParams p;
  p.k = 6;
  CHECK(build(FormulationKind::kDirect, ch, p).problem.dim == 36);
  // B is 4 x 4 and C is 4 x 2.
  const Formulation red = build(FormulationKind::kReduced, ch, p);
  CHECK(red.problem.dim == 24);
  CHECK(red.c_cols == 2);
  CHECK(build(FormulationKind::kCombined, ch, p).problem.dim == 24);

  const ChannelSet small = sample_channels(rng, 3);
  p.k = 3;
  CHECK(build(FormulationKind::kReduced, small, p).problem.dim == 9);
}

TEST_CASE("constraint rows follow the parameters") {
  Rng rng(25);
  const ChannelSet ch = sample_channels(rng, 2);
  SystemParams p;
  p.k = 2;
  auto labels = [&](const SystemParams& q) {
    std::vector<std::string> out;
    for (const auto& c : build(FormulationKind::kDirect, ch, q).problem.constraints)
      out.push_back(c.label);
    return out;
  };
  p.q_target = 0.0;
  CHECK(labels(p) == std::vector<std::string>{"normalization", "jammer", "symmetrizability", "power"});
  p.q_target = 0.2;
  CHECK(labels(p).size() == 5);
  p.p_j = 0.0;
  CHECK(labels(p) == std::vector<std::string>{"normalization", "eh", "power"});
  p.p_j = 1.0;
  p.epsilon = 0.0;
  CHECK_THROWS_AS(build(FormulationKind::kDirect, ch, p), std::invalid_argument);
}

TEST_CASE("recover inverts lift") {
  Rng rng(26);
  for (int k : {3, 6}) {
    const ChannelSet ch = sample_channels(rng, k);
    SystemParams p;
    p.k = k;
    p.p_r_max = 1e6;  // keep the test beamformers inside the budget
    for (auto kind :
         {FormulationKind::kDirect, FormulationKind::kReduced, FormulationKind::kCombined}) {
      const Formulation f = build(kind, ch, p);
      const CMatrix raw = random_matrix(rng, k, k);
      const Beamformer a = kind == FormulationKind::kDirect ? Beamformer{raw} : structured(f, raw);
      const double b = 0.37;
      const Beamformer back = recover_beamformer(f, lift_beamformer(f, a) * b, b * b);
      CHECK((back.a - a.a).norm() <= 1e-10 * a.a.norm());
    }
  }
}

TEST_CASE("recovery respects the power budget and rejects degenerate input") {
  Rng rng(27);
  const ChannelSet ch = sample_channels(rng, 3);
  SystemParams p;
  p.k = 3;
  const Formulation f = build(FormulationKind::kDirect, ch, p);
  const Beamformer big{100.0 * random_matrix(rng, 3, 3)};
  const Beamformer r = recover_beamformer(f, vec(big.a), 1.0);
  CHECK(relay_power(r, ch, p) <= p.p_r_max * (1 + 1e-6));
  CHECK_THROWS_AS(recover_beamformer(f, vec(big.a), 0.0), NumericalError);
  CHECK_THROWS_AS(recover_beamformer(f, CVector::Ones(4), 1.0), DimensionError);
}

TEST_CASE("qmax problem is the power-constrained EH maximum") {
  Rng rng(28);
  const ChannelSet ch = sample_channels(rng, 2);
  SystemParams p;
  p.k = 2;
  p.p_r_max = 2.0;
  const Formulation f = build(FormulationKind::kDirect, ch, p);
  const SdpProblem q = build_qmax_problem(f.forms, p.p_r_max);
  CHECK(q.constraints.size() == 1);
  CHECK(q.constraints[0].rhs == 2.0);
  CHECK(q.dim == 4);
}
