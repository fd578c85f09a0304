#pragma once

#include "kannai/common.hpp"
#include "kannai/dilation.hpp"
#include "kannai/operators.hpp"

namespace kannai::reference {

/// Spectral oracle for Hermitian positive semidefinite generators.
class SemigroupOracle {
 public:
  explicit SemigroupOracle(Matrix a);

  /// u(T) = e^{-AT} u0 + phi_T(A) f with phi_T(l) = (1 - e^{-lT})/l and
  /// phi_T(0) = T, so Neumann zero modes integrate the forcing linearly.
  Vector solve(const Vector& u0, const Vector& f, double T) const;

  Vector apply_exp(const Vector& v, double T) const;  // e^{-AT} v

  double spectral_gap() const { return eigenvalues_.minCoeff(); }
  double norm() const { return eigenvalues_.maxCoeff(); }
  const RealVector& eigenvalues() const { return eigenvalues_; }
  const Matrix& matrix() const { return a_; }

 private:
  Matrix a_;
  RealVector eigenvalues_;
  Matrix eigenvectors_;
};

Vector semigroup_solution(const Matrix& a, const Vector& u0, const Vector& f, double T);

enum class MarchScheme { CrankNicolson, ExplicitEuler };

/// Finite-difference comparator. Crank-Nicolson by default (second order,
/// unconditionally stable); the explicit option needs dt <= 2/||A||.
Vector fd_time_march(const Matrix& a, const Vector& u0, const Vector& f, double T, double dt,
                     MarchScheme scheme = MarchScheme::CrankNicolson);

/// Integrates psi' = -iH psi + rho(s) b (rho = s or 1 per profile) with RK4
/// and returns the discrepancy against the spectral Duhamel evaluation.
double wave_duhamel_check(const dilation::DilationHamiltonian& h, const Vector& psi0,
                          const Vector& b, operators::TimeProfile profile, double s);

/// Spectral Duhamel solution of the dilated system at auxiliary time s.
Vector dilated_duhamel(const dilation::DilationHamiltonian& h, const Vector& psi0,
                       const Vector& b, operators::TimeProfile profile, double s);

/// Cholesky solve for Hermitian positive definite systems.
Vector direct_solve(const Matrix& a, const Vector& b);

/// Scaling-and-squaring dense exponential (independent of any spectral path).
Matrix dense_expm(const Matrix& m);

/// Exact value of (int kappa_T(s) U(s) ds) psi0 = e^{-H^2 T} psi0.
Vector kappa_transform_exact(const dilation::DilationHamiltonian& h, const Vector& psi0, double T);

/// Exact value of (int Lambda_T(s) U(s) ds) b for either moment kernel.
Vector lambda_transform_exact(const dilation::DilationHamiltonian& h, const Vector& b,
                              operators::TimeProfile profile, double T);

}  // namespace kannai::reference
