#include "kannai/operators.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace kannai::operators {

namespace {

void check_cells(int n_cells) {
  if (n_cells < 2) fail(errc::degenerate_grid, "need n_cells >= 2, got " + std::to_string(n_cells));
}

void check_dilation_cap(Index rows, Index cols) {
  if (rows + cols > dense_size_cap())
    fail(errc::size_limit, "dilated dimension " + std::to_string(rows + cols) +
                               " exceeds cap " + std::to_string(dense_size_cap()));
}

Matrix identity(Index n) { return Matrix::Identity(n, n); }

}  // namespace

double operator_norm(const Matrix& m) {
  if (m.size() == 0) fail(errc::shape_error, "operator_norm: empty matrix");
  if (m.isZero(0.0)) return 0.0;
  if (std::min(m.rows(), m.cols()) <= 32) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
  }
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

DiscreteFactor build_heat_gradient_1d(int n_cells) {
  check_cells(n_cells);
  const int nx = n_cells;
  const double h = 1.0 / nx;
  Matrix L = Matrix::Zero(nx, nx - 1);
  for (int i = 0; i < nx; ++i) {
    // (L w)_{i+1/2} = -(w_{i+1} - w_i)/h with w_0 = w_{N_x} = 0 eliminated
    if (i < nx - 1) L(i, i) = Complex(-1.0 / h);
    if (i >= 1) L(i, i - 1) = Complex(1.0 / h);
  }
  check_dilation_cap(nx, nx - 1);
  // singular values are known in closed form for this stencil
  const double norm = (2.0 / h) * std::sin((nx - 1) * M_PI / (2.0 * nx));
  return DiscreteFactor{std::move(L), Grid{1, nx, h}, FactorKind::HeatDirichlet, norm};
}

DiscreteFactor build_heat_neumann_1d(int n_cells) {
  check_cells(n_cells);
  const int nx = n_cells;
  const double h = 1.0 / nx;
  // w at the nx cell centers, v at the nx-1 interior nodes; boundary fluxes
  // v_0 = v_{N_x} = 0 are eliminated.
  Matrix L = Matrix::Zero(nx - 1, nx);
  for (int i = 0; i < nx - 1; ++i) {
    L(i, i) = Complex(1.0 / h);
    L(i, i + 1) = Complex(-1.0 / h);
  }
  check_dilation_cap(nx - 1, nx);
  const double norm = (2.0 / h) * std::sin((nx - 1) * M_PI / (2.0 * nx));
  return DiscreteFactor{std::move(L), Grid{1, nx, h}, FactorKind::HeatNeumann, norm};
}

DiscreteFactor build_biharmonic_1d(int n_cells) {
  check_cells(n_cells);
  const int nx = n_cells;
  const double h = 1.0 / nx;
  const int n = nx - 1;
  Matrix L = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    L(i, i) = Complex(2.0 / (h * h));
    if (i > 0) L(i, i - 1) = Complex(-1.0 / (h * h));
    if (i < n - 1) L(i, i + 1) = Complex(-1.0 / (h * h));
  }
  check_dilation_cap(n, n);
  const double norm = (4.0 / (h * h)) * std::pow(std::sin(n * M_PI / (2.0 * nx)), 2);
  return DiscreteFactor{std::move(L), Grid{1, nx, h}, FactorKind::Biharmonic, norm};
}

Matrix unitary_dft(int n) {
  Matrix f(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      const double phase = -2.0 * M_PI * static_cast<double>(k) * j / n;
      f(k, j) = scale * Complex(std::cos(phase), std::sin(phase));
    }
  return f;
}

namespace {

// FFT frequency ordering: 0, 1, ..., N/2-1, -N/2, ..., -1
int fft_frequency(int index, int n) { return index < n / 2 ? index : index - n; }

}  // namespace

DiscreteFactor build_hj_fourier_factor(int n_modes_per_dim, int dimension, double viscosity) {
  if (n_modes_per_dim < 2 || n_modes_per_dim % 2 != 0)
    fail(errc::unsupported_grid, "Fourier grid needs even N >= 2, got " + std::to_string(n_modes_per_dim));
  if (dimension < 1) fail(errc::unsupported_dimension, "dimension must be >= 1");
  if (viscosity <= 0.0) fail(errc::invalid_operator, "viscosity must be positive");

  const int n = n_modes_per_dim;
  Index total = 1;
  for (int k = 0; k < dimension; ++k) {
    total *= n;
    if (2 * total > dense_size_cap())
      fail(errc::size_limit, "Fourier grid exceeds the dense size cap");
  }

  const Matrix f1 = unitary_dft(n);
  Matrix uf = f1;
  for (int k = 1; k < dimension; ++k) uf = kron(uf, f1);

  RealVector symbol(total);
  for (Index idx = 0; idx < total; ++idx) {
    Index rest = idx;
    double k2 = 0.0;
    for (int axis = dimension - 1; axis >= 0; --axis) {
      const int ki = fft_frequency(static_cast<int>(rest % n), n);
      k2 += static_cast<double>(ki) * ki;
      rest /= n;
    }
    symbol(idx) = viscosity * 4.0 * M_PI * M_PI * k2;
  }

  Matrix L = symbol.cwiseSqrt().cast<Complex>().asDiagonal() * uf;
  const double h = 1.0 / n;
  const double norm = std::sqrt(symbol.maxCoeff());
  DiscreteFactor out{std::move(L), Grid{dimension, n, h}, FactorKind::HJFourier, norm};
  return out;
}

DiscreteFactor lift_to_dimension(const DiscreteFactor& base, int dimension) {
  if (base.grid.dimension != 1) fail(errc::unsupported_grid, "lift_to_dimension expects a 1D base");
  if (dimension < 1) fail(errc::unsupported_dimension, "dimension must be >= 1");
  if (dimension == 1) return base;

  const Index r = base.rows();
  const Index c = base.cols();

  if (base.kind == FactorKind::Biharmonic) {
    // Kronecker sum: L_d = sum_k I x .. x L1 x .. x I on the (N_x-1)^d grid
    Index wdim = 1;
    for (int k = 0; k < dimension; ++k) {
      wdim *= c;
      if (2 * wdim > dense_size_cap()) fail(errc::size_limit, "lift exceeds the dense size cap");
    }
    Matrix L = Matrix::Zero(wdim, wdim);
    for (int k = 1; k <= dimension; ++k) {
      Index left = 1, right = 1;
      for (int j = 1; j < k; ++j) left *= c;
      for (int j = k; j < dimension; ++j) right *= c;
      L += kron(kron(identity(left), base.matrix), identity(right));
    }
    DiscreteFactor out{std::move(L), base.grid, FactorKind::Biharmonic,
                       dimension * base.spectral_norm};
    out.grid.dimension = dimension;
    return out;
  }

  // stacked directional lift; direction 1 is the slowest index
  Index wdim = 1;
  for (int k = 0; k < dimension; ++k) wdim *= c;
  Index vdim = 0;
  {
    Index per_direction = r;
    for (int k = 1; k < dimension; ++k) per_direction *= c;
    vdim = dimension * per_direction;
  }
  if (wdim + vdim > dense_size_cap()) fail(errc::size_limit, "lift exceeds the dense size cap");

  Matrix L = Matrix::Zero(vdim, wdim);
  Index row0 = 0;
  for (int k = 1; k <= dimension; ++k) {
    Index left = 1, right = 1;
    for (int j = 1; j < k; ++j) left *= c;
    for (int j = k; j < dimension; ++j) right *= c;
    const Matrix lk = kron(kron(identity(left), base.matrix), identity(right));
    L.block(row0, 0, lk.rows(), wdim) = lk;
    row0 += lk.rows();
  }
  DiscreteFactor out{std::move(L), base.grid, base.kind,
                     std::sqrt(static_cast<double>(dimension)) * base.spectral_norm};
  out.grid.dimension = dimension;
  return out;
}

DiscreteFactor make_custom_factor(Matrix matrix) {
  if (matrix.size() == 0) fail(errc::shape_error, "custom factor must be nonempty");
  check_dilation_cap(matrix.rows(), matrix.cols());
  const double norm = operator_norm(matrix);
  return DiscreteFactor{std::move(matrix), Grid{1, 0, 0.0}, FactorKind::Custom, norm};
}

ForcingVector dirichlet_boundary_forcing(int n_cells, double left_value, double right_value) {
  check_cells(n_cells);
  const double h = 1.0 / n_cells;
  Vector f = Vector::Zero(n_cells);  // v-space of the Dirichlet factor
  f(0) = Complex(-left_value / h);
  f(n_cells - 1) += Complex(right_value / h);
  return ForcingVector{std::move(f), ForcingSlot::VSlot, TimeProfile::ConstantInS};
}

}  // namespace kannai::operators
