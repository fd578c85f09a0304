#include <cmath>

#include "doctest.h"
#include "kannai/propagator.hpp"
#include "kannai/reference.hpp"

using namespace kannai;
namespace kp = kannai::propagator;

namespace {

operators::DiscreteFactor scalar_factor(double v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return operators::make_custom_factor(m);
}

Vector random_state(Index n, std::uint64_t seed) {
  std::uint64_t state = mix_seed(seed, 9);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = Complex(uniform_pm1(state), uniform_pm1(state));
  return v;
}

}  // namespace

TEST_CASE("exact evolution") {
  const auto h = dilation::hermitian_dilation(scalar_factor(2.0));
  Vector psi(2);
  psi << 1.0, 0.0;
  SUBCASE("half-period rotation") {
    const auto out = kp::evolve(h, M_PI / 2.0, psi);
    CHECK(out.vector(0).real() == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(std::abs(out.vector(1)) <= 1e-13);
  }
  SUBCASE("identity at s=0") {
    CHECK((kp::evolve(h, 0.0, psi).vector - psi).norm() == 0.0);
  }
  SUBCASE("scalar wave solution") {
    CHECK(kp::evolve(h, 0.3, psi).vector(0).real() ==
          doctest::Approx(0.8253356149096783).epsilon(1e-13));
  }
}

TEST_CASE("batched evolution") {
  const auto f = operators::build_heat_gradient_1d(4);
  const auto h = dilation::hermitian_dilation(f);
  const Vector psi = random_state(h.dim(), 41);
  SUBCASE("zero node returns the input") {
    RealVector nodes(1);
    nodes << 0.0;
    const auto out = kp::evolve_batch(h, nodes, psi);
    CHECK((out[0].vector - psi).norm() <= 1e-14 * psi.norm());
  }
  SUBCASE("first component is even in s for a cosine start") {
    const auto hs = dilation::hermitian_dilation(scalar_factor(2.0));
    Vector start(2);
    start << 1.0, 0.0;
    RealVector nodes(2);
    nodes << 0.8, -0.8;
    const auto out = kp::evolve_batch(hs, nodes, start);
    CHECK(out[0].vector(0).real() == doctest::Approx(out[1].vector(0).real()).epsilon(1e-13));
  }
  SUBCASE("unitarity across a node set") {
    RealVector nodes(8);
    for (int j = 0; j < 8; ++j) nodes(j) = -2.0 + 0.5 * j;
    for (const auto& state : kp::evolve_batch(h, nodes, psi))
      CHECK(std::fabs(state.vector.norm() - psi.norm()) <= 1e-12 * psi.norm());
  }
  SUBCASE("matches single-node evolution") {
    RealVector nodes(3);
    nodes << -1.3, 0.2, 2.4;
    const auto batch = kp::evolve_batch(h, nodes, psi);
    for (int j = 0; j < 3; ++j)
      CHECK((batch[j].vector - kp::evolve(h, nodes(j), psi).vector).norm() <= 1e-14 * psi.norm());
  }
}

TEST_CASE("group law") {
  const auto f = operators::build_heat_neumann_1d(5);
  const auto h = dilation::hermitian_dilation(f);
  const Vector psi = random_state(h.dim(), 51);
  for (auto [s1, s2] : {std::pair{0.3, 0.9}, std::pair{-0.7, 0.2}}) {
    const Vector two_step = kp::evolve(h, s2, kp::evolve(h, s1, psi).vector).vector;
    const Vector one_step = kp::evolve(h, s1 + s2, psi).vector;
    CHECK((two_step - one_step).norm() <= 1e-11 * psi.norm());
  }
}

TEST_CASE("spectral evolution matches the dense exponential") {
  const auto f = operators::make_custom_factor([] {
    std::uint64_t state = mix_seed(61, 2);
    Matrix m(6, 6);
    for (Index i = 0; i < 6; ++i)
      for (Index j = 0; j < 6; ++j) m(i, j) = Complex(uniform_pm1(state), uniform_pm1(state));
    return m;
  }());
  const auto h = dilation::hermitian_dilation(f);
  const double s = 0.8;
  const Matrix via_spectrum = [&] {
    Matrix u(h.dim(), h.dim());
    for (Index k = 0; k < h.dim(); ++k) {
      Vector e = Vector::Zero(h.dim());
      e(k) = 1.0;
      u.col(k) = kp::evolve(h, s, e).vector;
    }
    return u;
  }();
  const Matrix via_pade = reference::dense_expm(Matrix(Complex(0.0, -s) * h.H));
  CHECK((via_spectrum - via_pade).norm() <= 1e-10 * via_pade.norm());
}

TEST_CASE("perturbed evolution") {
  const auto f = operators::build_heat_gradient_1d(3);
  const auto h = dilation::hermitian_dilation(f);
  const Vector psi = random_state(h.dim(), 71);
  SUBCASE("zero perturbation is exact") {
    const auto a = kp::perturbed_evolve(h, 0.4, psi, 0.0, 123);
    const auto b = kp::evolve(h, 0.4, psi);
    CHECK((a.vector - b.vector).norm() == 0.0);
  }
  SUBCASE("deviation is bounded by delta1") {
    const double delta1 = 1e-3;
    const auto noisy = kp::perturbed_evolve(h, 0.4, psi, delta1, 123);
    const auto exact = kp::evolve(h, 0.4, psi);
    CHECK((noisy.vector - exact.vector).norm() <= delta1 * psi.norm() * (1.0 + 1e-12));
  }
  SUBCASE("perturbation sits at distance exactly delta1") {
    const Matrix v = kp::identity_neighborhood_unitary(5, 0.25, 7);
    CHECK((v.adjoint() * v - Matrix::Identity(5, 5)).norm() <= 1e-12);
    CHECK(operators::operator_norm(v - Matrix::Identity(5, 5)) ==
          doctest::Approx(0.25).epsilon(1e-10));
  }
  SUBCASE("seeded repeatability is bitwise") {
    const auto a = kp::perturbed_evolve(h, 0.4, psi, 1e-2, 999);
    const auto b = kp::perturbed_evolve(h, 0.4, psi, 1e-2, 999);
    for (Index i = 0; i < a.vector.size(); ++i) {
      CHECK(a.vector(i).real() == b.vector(i).real());
      CHECK(a.vector(i).imag() == b.vector(i).imag());
    }
  }
  SUBCASE("invalid perturbation size") {
    CHECK_THROWS_WITH_AS(kp::perturbed_evolve(h, 0.1, psi, 1.0, 1),
                         doctest::Contains("InvalidPerturbation"), Error);
  }
}
