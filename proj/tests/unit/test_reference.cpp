#include <cmath>

#include "doctest.h"
#include "kannai/reference.hpp"

using namespace kannai;
namespace kr = kannai::reference;

namespace {

Matrix scalar4() {
  Matrix a(1, 1);
  a(0, 0) = 4.0;
  return a;
}

}  // namespace

TEST_CASE("semigroup oracle") {
  SUBCASE("pure decay") {
    Vector u0(1), f(1);
    u0 << 1.0;
    f << 0.0;
    CHECK(kr::semigroup_solution(scalar4(), u0, f, 1.0)(0).real() ==
          doctest::Approx(0.01831563888873418).epsilon(1e-12));
  }
  SUBCASE("pure forcing") {
    Vector u0(1), f(1);
    u0 << 0.0;
    f << 4.0;
    CHECK(kr::semigroup_solution(scalar4(), u0, f, 1.0)(0).real() ==
          doctest::Approx(0.9816843611112658).epsilon(1e-12));
  }
  SUBCASE("zero mode integrates the forcing") {
    Matrix a = Matrix::Zero(1, 1);
    Vector u0(1), f(1);
    u0 << 0.0;
    f << 1.0;
    CHECK(kr::semigroup_solution(a, u0, f, 3.0)(0).real() == doctest::Approx(3.0).epsilon(1e-13));
  }
  SUBCASE("non-Hermitian input is rejected") {
    Matrix a(2, 2);
    a << 1.0, 1.0, 0.0, 1.0;
    Vector z = Vector::Zero(2);
    CHECK_THROWS_WITH_AS(kr::semigroup_solution(a, z, z, 1.0),
                         doctest::Contains("InvalidOperator"), Error);
  }
}

TEST_CASE("finite-difference march") {
  Vector u0(1), f(1);
  SUBCASE("scalar decay") {
    u0 << 1.0;
    f << 0.0;
    const auto u = kr::fd_time_march(scalar4(), u0, f, 1.0, 1e-3);
    CHECK(std::fabs(u(0).real() - 0.01831563888873418) <= 1e-5);
  }
  SUBCASE("second-order convergence") {
    u0 << 1.0;
    f << 0.0;
    const double exact = 0.01831563888873418;
    const double e1 = std::fabs(kr::fd_time_march(scalar4(), u0, f, 1.0, 4e-3)(0).real() - exact);
    const double e2 = std::fabs(kr::fd_time_march(scalar4(), u0, f, 1.0, 2e-3)(0).real() - exact);
    const double e3 = std::fabs(kr::fd_time_march(scalar4(), u0, f, 1.0, 1e-3)(0).real() - exact);
    const double slope = std::log2(e1 / e3) / 2.0;
    CHECK(slope == doctest::Approx(2.0).epsilon(0.1));
    CHECK(e2 < e1);
  }
  SUBCASE("steady drive matches the phi formula") {
    u0 << 0.0;
    f << 4.0;
    const auto u = kr::fd_time_march(scalar4(), u0, f, 1.0, 1e-3);
    CHECK(std::fabs(u(0).real() - 0.9816843611112658) <= 1e-5);
  }
  SUBCASE("explicit Euler blows up past the stability limit") {
    u0 << 1.0;
    f << 0.0;
    CHECK_THROWS_WITH_AS(
        kr::fd_time_march(scalar4(), u0, f, 40.0, 1.0, kr::MarchScheme::ExplicitEuler),
        doctest::Contains("UnstableMarch"), Error);
  }
  SUBCASE("march agrees with the spectral oracle at second order") {
    const auto fct = operators::build_heat_gradient_1d(8);
    const Matrix a = fct.normal_matrix();
    Vector u0v(fct.cols());
    for (Index i = 0; i < u0v.size(); ++i) u0v(i) = std::sin(M_PI * (i + 1) / 8.0);
    const Vector fv = Vector::Ones(fct.cols());
    const Vector exact = kr::semigroup_solution(a, u0v, fv, 0.05);
    const double e1 = (kr::fd_time_march(a, u0v, fv, 0.05, 2e-4) - exact).norm();
    const double e2 = (kr::fd_time_march(a, u0v, fv, 0.05, 1e-4) - exact).norm();
    CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("wave Duhamel cross-check") {
  namespace ops = kannai::operators;
  Matrix l(1, 1);
  l(0, 0) = 2.0;
  const auto h = dilation::hermitian_dilation(ops::make_custom_factor(l));
  Vector psi0(2), b(2);
  psi0 << 1.0, 0.0;
  SUBCASE("homogeneous rotation") {
    b << 0.0, 0.0;
    CHECK(kr::wave_duhamel_check(h, psi0, b, ops::TimeProfile::LinearInS, 1.0) <= 1e-10);
    const Vector ref = kr::dilated_duhamel(h, psi0, b, ops::TimeProfile::LinearInS, 1.0);
    CHECK(ref(0).real() == doctest::Approx(std::cos(2.0)).epsilon(1e-12));
    CHECK(ref(1).real() == doctest::Approx(-std::sin(2.0)).epsilon(1e-12));
  }
  SUBCASE("linear-in-s forcing reproduces the scalar Duhamel integral") {
    b << 1.0, 0.0;
    for (double s : {0.5, 1.0, 2.0}) {
      const Vector ref = kr::dilated_duhamel(h, psi0 * 0.0, b, ops::TimeProfile::LinearInS, s);
      CHECK(std::fabs(ref(0).real() - (1.0 - std::cos(2.0 * s)) / 4.0) <= 1e-12);
      CHECK(kr::wave_duhamel_check(h, psi0 * 0.0, b, ops::TimeProfile::LinearInS, s) <= 1e-8);
    }
  }
  SUBCASE("random dilations stay below the RK tolerance") {
    const auto f = operators::build_heat_neumann_1d(4);
    const auto hr = dilation::hermitian_dilation(f);
    std::uint64_t state = mix_seed(81, 4);
    Vector p0(hr.dim()), bf(hr.dim());
    for (Index i = 0; i < hr.dim(); ++i) {
      p0(i) = Complex(uniform_pm1(state), uniform_pm1(state));
      bf(i) = Complex(uniform_pm1(state), uniform_pm1(state));
    }
    CHECK(kr::wave_duhamel_check(hr, p0, bf, ops::TimeProfile::LinearInS, 2.0) <= 1e-8);
    CHECK(kr::wave_duhamel_check(hr, p0, bf, ops::TimeProfile::ConstantInS, 2.0) <= 1e-8);
  }
}

TEST_CASE("direct solve") {
  SUBCASE("hand-solved tridiagonal system") {
    const auto f = operators::build_heat_gradient_1d(4);
    const Vector b = Vector::Ones(3);
    const Vector x = kr::direct_solve(f.normal_matrix(), b);
    CHECK(x(0).real() == doctest::Approx(0.09375).epsilon(1e-12));
    CHECK(x(1).real() == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(x(2).real() == doctest::Approx(0.09375).epsilon(1e-12));
  }
  SUBCASE("identity") {
    const Vector b = Vector::Ones(4);
    CHECK((kr::direct_solve(Matrix::Identity(4, 4), b) - b).norm() <= 1e-14);
  }
  SUBCASE("singular Neumann system is rejected") {
    const auto f = operators::build_heat_neumann_1d(4);
    const Vector b = Vector::Ones(4);
    CHECK_THROWS_WITH_AS(kr::direct_solve(f.normal_matrix(), b),
                         doctest::Contains("SingularSystem"), Error);
  }
}

TEST_CASE("exact dilated transforms") {
  namespace ops = kannai::operators;
  SUBCASE("scalar kappa transform is the squared-generator semigroup") {
    Matrix l(1, 1);
    l(0, 0) = 2.0;
    const auto h = dilation::hermitian_dilation(ops::make_custom_factor(l));
    Vector psi0(2);
    psi0 << 1.0, 0.0;
    const Vector out = kr::kappa_transform_exact(h, psi0, 1.0);
    CHECK(out(0).real() == doctest::Approx(0.01831563888873418).epsilon(1e-12));
    CHECK(std::abs(out(1)) <= 1e-14);
  }
  SUBCASE("boundary forcing transform matches the physical semigroup") {
    const auto f = operators::build_heat_gradient_1d(6);
    const auto h = dilation::hermitian_dilation(f);
    const auto bd = operators::dirichlet_boundary_forcing(6, 1.0, 0.5);
    Vector b = Vector::Zero(h.dim());
    b.tail(f.rows()) = bd.values;
    Vector u0(f.cols());
    for (Index i = 0; i < u0.size(); ++i) u0(i) = std::cos(2.0 * M_PI * (i + 1) / 6.0);
    Vector psi0 = Vector::Zero(h.dim());
    psi0.head(f.cols()) = u0;
    const double T = 0.7;
    const Vector dilated = kr::kappa_transform_exact(h, psi0, T) +
                           kr::lambda_transform_exact(h, b, ops::TimeProfile::ConstantInS, T);
    const Vector w_block = dilated.head(f.cols());
    const Vector f_eff = f.matrix.adjoint() * bd.values;
    const Vector physical = kr::semigroup_solution(f.normal_matrix(), u0, f_eff, T);
    CHECK((w_block - physical).norm() <= 1e-12 * std::max(1.0, physical.norm()));
  }
}
