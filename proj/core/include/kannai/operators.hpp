#pragma once

#include "kannai/common.hpp"

namespace kannai::operators {

enum class FactorKind { HeatDirichlet, HeatNeumann, Biharmonic, HJFourier, Custom };
enum class ForcingSlot { WSlot, VSlot };
enum class TimeProfile { LinearInS, ConstantInS };

struct Grid {
  int dimension = 1;
  int cells_per_direction = 0;
  double mesh = 0.0;  // h = 1/N_x, 0 for custom factors
};

/// Discrete factor L with A = L^dagger L. The matrix maps the w-space
/// (cols) into the v-space (rows); both may differ for staggered grids.
/// Values are immutable once constructed.
struct DiscreteFactor {
  Matrix matrix;
  Grid grid;
  FactorKind kind = FactorKind::Custom;
  double spectral_norm = 0.0;  // ||L||, cached at construction

  Index rows() const { return matrix.rows(); }
  Index cols() const { return matrix.cols(); }

  /// A = L^dagger L on the w-space.
  Matrix normal_matrix() const { return matrix.adjoint() * matrix; }
};

/// Forcing data in slot-local coordinates: WSlot vectors live on the
/// w-space (cols of L), VSlot vectors on the v-space (rows of L).
struct ForcingVector {
  Vector values;
  ForcingSlot slot = ForcingSlot::WSlot;
  TimeProfile time_profile = TimeProfile::LinearInS;
};

/// Staggered first-difference factor for the 1D Dirichlet heat problem:
/// w on interior nodes, v on cell midpoints, (L w)_{i+1/2} = -(w_{i+1}-w_i)/h.
/// Shape N_x x (N_x-1).
DiscreteFactor build_heat_gradient_1d(int n_cells);

/// Neumann variant with w at cell centers and v at interior grid nodes, so
/// the flux can vanish on the boundary. A = L^dagger L has the constant
/// vector in its kernel.
DiscreteFactor build_heat_neumann_1d(int n_cells);

/// (1/h^2) tridiag(-1,2,-1) on interior nodes; symmetric positive definite,
/// A = L^2 is the discrete biharmonic operator.
DiscreteFactor build_biharmonic_1d(int n_cells);

/// Fourier factor L = D^{1/2} U_F on an N^d periodic grid with symbol
/// D(k) = nu (2 pi)^2 |k|^2 and FFT frequency ordering per axis.
/// N must be even.
DiscreteFactor build_hj_fourier_factor(int n_modes_per_dim, int dimension, double viscosity);

/// Lifts a 1D factor to d dimensions. Gradient-type factors are stacked
/// direction by direction (L^(k) = I x .. x L1 x .. x I, rows concatenated),
/// giving ||L_d|| = sqrt(d) ||L_1|| exactly. The Biharmonic factor is lifted
/// by the Kronecker sum instead, giving ||L_d|| = d ||L_1||.
/// Direction 1 varies slowest in the lexicographic index order.
DiscreteFactor lift_to_dimension(const DiscreteFactor& base, int dimension);

DiscreteFactor make_custom_factor(Matrix matrix);

/// Constant-in-s v-slot forcing carrying inhomogeneous Dirichlet data
/// u(t,0)=left, u(t,1)=right into the first-order system:
/// (1/h)(-left e_first + right e_last) on the face space.
ForcingVector dirichlet_boundary_forcing(int n_cells, double left_value, double right_value);

/// Largest singular value (relative accuracy ~1e-10 or better).
double operator_norm(const Matrix& m);

/// Unitary discrete Fourier transform matrix, U_F(k,n) = exp(-2 pi i k n / N)/sqrt(N).
Matrix unitary_dft(int n);

}  // namespace kannai::operators
