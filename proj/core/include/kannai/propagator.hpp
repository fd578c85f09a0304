#pragma once

#include <cstdint>
#include <vector>

#include "kannai/common.hpp"
#include "kannai/dilation.hpp"

namespace kannai::propagator {

struct EvolvedState {
  Vector vector;
  double s = 0.0;
};

/// U(s) psi = V diag(exp(-i lambda s)) V^dagger psi through the cached
/// spectrum; one factorization is shared by every node.
EvolvedState evolve(const dilation::DilationHamiltonian& h, double s, const Vector& psi);

std::vector<EvolvedState> evolve_batch(const dilation::DilationHamiltonian& h,
                                       const RealVector& nodes, const Vector& psi);

/// Exact evolution followed by a reproducible random unitary at operator
/// distance exactly delta1 from the identity (Cayley transform of a
/// unit-norm Hermitian direction). Same (s, delta1, seed) gives bitwise
/// identical output.
EvolvedState perturbed_evolve(const dilation::DilationHamiltonian& h, double s, const Vector& psi,
                              double delta1, std::uint64_t seed);

/// The perturbing unitary itself; exposed so error-model tests can measure
/// ||U^a - U(s)|| directly.
Matrix identity_neighborhood_unitary(Index dim, double delta1, std::uint64_t seed);

}  // namespace kannai::propagator
