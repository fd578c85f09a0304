#include "kannai/propagator.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace kannai::propagator {

namespace {

Vector phase_apply(const dilation::Spectrum& spec, double s, const Vector& psi) {
  const Vector coeffs = spec.eigenvectors.adjoint() * psi;
  Vector rotated(coeffs.size());
  for (Index k = 0; k < coeffs.size(); ++k) {
    const double angle = -spec.eigenvalues(k) * s;
    rotated(k) = coeffs(k) * Complex(std::cos(angle), std::sin(angle));
  }
  return spec.eigenvectors * rotated;
}

}  // namespace

EvolvedState evolve(const dilation::DilationHamiltonian& h, double s, const Vector& psi) {
  if (psi.size() != h.dim()) fail(errc::shape_error, "state dimension does not match H");
  if (s == 0.0) return EvolvedState{psi, 0.0};
  return EvolvedState{phase_apply(h.spectrum, s, psi), s};
}

std::vector<EvolvedState> evolve_batch(const dilation::DilationHamiltonian& h,
                                       const RealVector& nodes, const Vector& psi) {
  if (psi.size() != h.dim()) fail(errc::shape_error, "state dimension does not match H");
  const Vector coeffs = h.spectrum.eigenvectors.adjoint() * psi;
  std::vector<EvolvedState> out;
  out.reserve(nodes.size());
  Vector rotated(coeffs.size());
  for (Index j = 0; j < nodes.size(); ++j) {
    const double s = nodes(j);
    if (s == 0.0) {
      out.push_back(EvolvedState{psi, 0.0});
      continue;
    }
    for (Index k = 0; k < coeffs.size(); ++k) {
      const double angle = -h.spectrum.eigenvalues(k) * s;
      rotated(k) = coeffs(k) * Complex(std::cos(angle), std::sin(angle));
    }
    out.push_back(EvolvedState{h.spectrum.eigenvectors * rotated, s});
  }
  return out;
}

Matrix identity_neighborhood_unitary(Index dim, double delta1, std::uint64_t seed) {
  if (!(delta1 >= 0.0 && delta1 < 1.0))
    fail(errc::invalid_perturbation, "delta1 must lie in [0, 1)");
  if (delta1 == 0.0) return Matrix::Identity(dim, dim);

  std::uint64_t state = mix_seed(seed, 0x7065727475726254ull);
  Matrix g(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    g(i, i) = Complex(standard_normal(state), 0.0);
    for (Index j = i + 1; j < dim; ++j) {
      const Complex z(standard_normal(state), standard_normal(state));
      g(i, j) = z / std::sqrt(2.0);
      g(j, i) = std::conj(g(i, j));
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(g);
  if (es.info() != Eigen::Success) fail(errc::numerical_breakdown, "perturbation eigensolve failed");
  RealVector lam = es.eigenvalues();
  const double top = lam.cwiseAbs().maxCoeff();
  if (top == 0.0) return Matrix::Identity(dim, dim);
  lam /= top;  // unit spectral norm direction

  // Cayley transform (1 - i e l)/(1 + i e l) with e tuned so the farthest
  // eigenphase sits at operator distance exactly delta1 from 1.
  const double eps = delta1 / std::sqrt(4.0 - delta1 * delta1);
  Vector phases(dim);
  for (Index k = 0; k < dim; ++k)
    phases(k) = Complex(1.0, -eps * lam(k)) / Complex(1.0, eps * lam(k));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

EvolvedState perturbed_evolve(const dilation::DilationHamiltonian& h, double s, const Vector& psi,
                              double delta1, std::uint64_t seed) {
  EvolvedState exact = evolve(h, s, psi);
  if (delta1 == 0.0) return exact;
  const Matrix v = identity_neighborhood_unitary(h.dim(), delta1, seed);
  return EvolvedState{v * exact.vector, s};
}

}  // namespace kannai::propagator
