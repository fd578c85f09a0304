#include "kannai/reference.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace kannai::reference {

namespace {

constexpr Complex kI{0.0, 1.0};

// phi_T(l) = (1 - e^{-lT})/l, continuous through l = 0 where it equals T
double phi(double lambda, double T) {
  if (lambda == 0.0) return T;
  return -std::expm1(-lambda * T) / lambda;
}

}  // namespace

SemigroupOracle::SemigroupOracle(Matrix a) : a_(std::move(a)) {
  if (a_.rows() != a_.cols() || a_.size() == 0)
    fail(errc::invalid_operator, "generator must be square and nonempty");
  const double scale = std::max(a_.norm(), 1e-300);
  if ((a_ - a_.adjoint()).norm() > 1e-12 * scale)
    fail(errc::invalid_operator, "generator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a_);
  if (es.info() != Eigen::Success) fail(errc::numerical_breakdown, "eigensolve failed");
  eigenvalues_ = es.eigenvalues();
  eigenvectors_ = es.eigenvectors();
  if (eigenvalues_.minCoeff() < -1e-10 * std::max(1.0, norm()))
    fail(errc::invalid_operator, "generator has a significantly negative eigenvalue");
}

Vector SemigroupOracle::solve(const Vector& u0, const Vector& f, double T) const {
  if (u0.size() != a_.rows() || f.size() != a_.rows())
    fail(errc::shape_error, "state dimension does not match the generator");
  if (!(T >= 0.0)) fail(errc::invalid_time, "negative horizon");
  const Vector cu = eigenvectors_.adjoint() * u0;
  const Vector cf = eigenvectors_.adjoint() * f;
  Vector out(cu.size());
  for (Index k = 0; k < cu.size(); ++k) {
    const double lam = eigenvalues_(k);
    out(k) = cu(k) * std::exp(-lam * T) + cf(k) * phi(lam, T);
  }
  return eigenvectors_ * out;
}

Vector SemigroupOracle::apply_exp(const Vector& v, double T) const {
  const Vector c = eigenvectors_.adjoint() * v;
  Vector out(c.size());
  for (Index k = 0; k < c.size(); ++k) out(k) = c(k) * std::exp(-eigenvalues_(k) * T);
  return eigenvectors_ * out;
}

Vector semigroup_solution(const Matrix& a, const Vector& u0, const Vector& f, double T) {
  return SemigroupOracle(a).solve(u0, f, T);
}

Vector fd_time_march(const Matrix& a, const Vector& u0, const Vector& f, double T, double dt,
                     MarchScheme scheme) {
  if (a.rows() != a.cols() || u0.size() != a.rows() || f.size() != a.rows())
    fail(errc::shape_error, "inconsistent dimensions");
  if (!(dt > 0.0) || !(T > 0.0)) fail(errc::invalid_time, "need positive T and dt");

  const long n_steps = std::max<long>(1, std::lround(T / dt));
  const double h = T / static_cast<double>(n_steps);
  const double growth_cap = 10.0 * (u0.norm() + T * f.norm() + 1.0);

  Vector u = u0;
  if (scheme == MarchScheme::ExplicitEuler) {
    for (long k = 0; k < n_steps; ++k) {
      u = u - h * (a * u) + h * f;
      if (u.norm() > growth_cap) fail(errc::unstable_march, "explicit march diverged");
    }
    return u;
  }

  const Index n = a.rows();
  const Matrix m_plus = Matrix::Identity(n, n) + (h / 2.0) * a;
  const Matrix m_minus = Matrix::Identity(n, n) - (h / 2.0) * a;
  Eigen::LDLT<Matrix> solver(m_plus);
  if (solver.info() != Eigen::Success) fail(errc::numerical_breakdown, "CN factorization failed");
  for (long k = 0; k < n_steps; ++k) {
    u = solver.solve(m_minus * u + h * f);
    if (u.norm() > growth_cap) fail(errc::unstable_march, "march diverged");
  }
  return u;
}

namespace {

// int_0^s (s - t) e^{-i l t} dt, stable through l -> 0
Complex duhamel_linear(double lambda, double s) {
  const double x = lambda * s;
  if (std::fabs(x) < 0.1) {
    // sum_k (-i l)^k s^{k+2} / ((k+1)(k+2))
    Complex term(s * s / 2.0, 0.0);  // k = 0 term
    Complex sum = term;
    const Complex z = -kI * Complex(lambda, 0.0) * s;
    for (int k = 1; k <= 14; ++k) {
      term *= z * (static_cast<double>(k) / (k + 2.0));
      sum += term;
    }
    return sum;
  }
  const Complex e = std::exp(-kI * x);
  return -kI * (s / lambda) + (Complex(1.0, 0.0) - e) / (lambda * lambda);
}

// int_0^s e^{-i l t} dt
Complex duhamel_constant(double lambda, double s) {
  const double x = lambda * s;
  if (std::fabs(x) < 0.1) {
    Complex term(s, 0.0);
    Complex sum = term;
    const Complex z = -kI * Complex(lambda, 0.0) * s;
    for (int k = 1; k <= 14; ++k) {
      term *= z / static_cast<double>(k + 1);
      sum += term;
    }
    return sum;
  }
  return (Complex(1.0, 0.0) - std::exp(-kI * x)) / (kI * lambda);
}

}  // namespace

Vector dilated_duhamel(const dilation::DilationHamiltonian& h, const Vector& psi0,
                       const Vector& b, operators::TimeProfile profile, double s) {
  if (psi0.size() != h.dim() || b.size() != h.dim())
    fail(errc::shape_error, "state dimension does not match H");
  const Matrix& v = h.spectrum.eigenvectors;
  const Vector c0 = v.adjoint() * psi0;
  const Vector cb = v.adjoint() * b;
  Vector out(c0.size());
  for (Index k = 0; k < c0.size(); ++k) {
    const double lam = h.spectrum.eigenvalues(k);
    const Complex hom = std::exp(-kI * Complex(lam * s, 0.0));
    const Complex inh = profile == operators::TimeProfile::LinearInS
                            ? duhamel_linear(lam, s)
                            : duhamel_constant(lam, s);
    out(k) = hom * c0(k) + inh * cb(k);
  }
  return v * out;
}

double wave_duhamel_check(const dilation::DilationHamiltonian& h, const Vector& psi0,
                          const Vector& b, operators::TimeProfile profile, double s) {
  if (psi0.size() != h.dim() || b.size() != h.dim())
    fail(errc::shape_error, "state dimension does not match H");
  const Vector reference = dilated_duhamel(h, psi0, b, profile, s);

  // RK4 on psi' = -iH psi + rho(t) b
  const double span = std::fabs(s);
  const long n_steps = std::max<long>(2000, std::lround(64.0 * (h.norm() + 1.0) * span));
  const double dt = s / static_cast<double>(n_steps);
  const auto rho = [&](double t) {
    return profile == operators::TimeProfile::LinearInS ? t : 1.0;
  };
  const auto rhs = [&](double t, const Vector& y) -> Vector {
    return -kI * (h.H * y) + rho(t) * b;
  };
  Vector y = psi0;
  double t = 0.0;
  for (long k = 0; k < n_steps; ++k) {
    const Vector k1 = rhs(t, y);
    const Vector k2 = rhs(t + dt / 2.0, y + (dt / 2.0) * k1);
    const Vector k3 = rhs(t + dt / 2.0, y + (dt / 2.0) * k2);
    const Vector k4 = rhs(t + dt, y + dt * k3);
    y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += dt;
  }
  return (y - reference).norm();
}

Vector direct_solve(const Matrix& a, const Vector& b) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    fail(errc::shape_error, "inconsistent dimensions");
  const double scale = std::max(a.norm(), 1e-300);
  if ((a - a.adjoint()).norm() > 1e-12 * scale)
    fail(errc::invalid_operator, "matrix is not Hermitian");
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) fail(errc::singular_system, "Cholesky factorization failed");
  const Vector x = llt.solve(b);
  if ((a * x - b).norm() > 1e-9 * std::max(b.norm(), 1e-300))
    fail(errc::singular_system, "solution residual too large, system is near singular");
  return x;
}

Matrix dense_expm(const Matrix& m) {
  if (m.rows() != m.cols()) fail(errc::shape_error, "exponential of a non-square matrix");
  return m.exp();
}

Vector kappa_transform_exact(const dilation::DilationHamiltonian& h, const Vector& psi0, double T) {
  if (psi0.size() != h.dim()) fail(errc::shape_error, "state dimension does not match H");
  if (!(T > 0.0)) fail(errc::invalid_time, "final time must be positive");
  const Matrix& v = h.spectrum.eigenvectors;
  Vector c = v.adjoint() * psi0;
  for (Index k = 0; k < c.size(); ++k) {
    const double lam = h.spectrum.eigenvalues(k);
    c(k) *= std::exp(-lam * lam * T);
  }
  return v * c;
}

Vector lambda_transform_exact(const dilation::DilationHamiltonian& h, const Vector& b,
                              operators::TimeProfile profile, double T) {
  if (b.size() != h.dim()) fail(errc::shape_error, "state dimension does not match H");
  if (!(T > 0.0)) fail(errc::invalid_time, "final time must be positive");
  const Matrix& v = h.spectrum.eigenvectors;
  Vector c = v.adjoint() * b;
  for (Index k = 0; k < c.size(); ++k) {
    const double lam = h.spectrum.eigenvalues(k);
    const double ph = phi(lam * lam, T);  // (1 - e^{-l^2 T})/l^2
    c(k) *= profile == operators::TimeProfile::LinearInS ? Complex(ph, 0.0)
                                                         : -kI * Complex(lam * ph, 0.0);
  }
  return v * c;
}

}  // namespace kannai::reference
