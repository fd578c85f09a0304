#include "kannai/dilation.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace kannai::dilation {

namespace {

constexpr Complex kI{0.0, 1.0};

Spectrum solve_spectrum(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success)
    fail(errc::numerical_breakdown, "Hermitian eigensolve failed");
  return Spectrum{solver.eigenvalues(), solver.eigenvectors()};
}

}  // namespace

DilationHamiltonian hermitian_dilation(const operators::DiscreteFactor& L) {
  if (L.matrix.size() == 0) fail(errc::shape_error, "empty factor");
  const Index c = L.cols();
  const Index r = L.rows();
  Matrix h = Matrix::Zero(c + r, c + r);
  h.topRightCorner(c, r) = kI * L.matrix.adjoint();
  h.bottomLeftCorner(r, c) = -kI * L.matrix;
  DilationHamiltonian out{std::move(h), L, {}};
  out.spectrum = solve_spectrum(out.H);
  return out;
}

Matrix pad_square(const Matrix& m) {
  const Index n = std::max(m.rows(), m.cols());
  Matrix out = Matrix::Zero(n, n);
  out.topLeftCorner(m.rows(), m.cols()) = m;
  return out;
}

BlockEncoding unitary_completion(const operators::DiscreteFactor& L, double alpha) {
  if (L.matrix.size() == 0) fail(errc::shape_error, "empty factor");
  if (alpha < L.spectral_norm * (1.0 - 1e-12))
    fail(errc::normalization_too_small, "alpha below ||L||");

  const Matrix lp = pad_square(L.matrix);
  const Index n = lp.rows();

  Eigen::JacobiSVD<Matrix> svd(lp, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector sv = svd.singularValues();
  RealVector comp(n);
  for (Index i = 0; i < n; ++i)
    comp(i) = std::sqrt(std::max(0.0, 1.0 - (sv(i) / alpha) * (sv(i) / alpha)));

  const Matrix diag_comp = comp.cast<Complex>().asDiagonal();
  Matrix w(2 * n, 2 * n);
  w.topLeftCorner(n, n) = lp / alpha;
  w.topRightCorner(n, n) = svd.matrixU() * diag_comp * svd.matrixU().adjoint();
  w.bottomLeftCorner(n, n) = svd.matrixV() * diag_comp * svd.matrixV().adjoint();
  w.bottomRightCorner(n, n) = -lp.adjoint() / alpha;

  BlockEncoding be{std::move(w), 1, alpha, lp};
  if (be.unitarity_residual() > 1e-11 * std::sqrt(static_cast<double>(2 * n)))
    fail(errc::numerical_breakdown, "completion lost unitarity");
  return be;
}

BlockEncoding build_ham_h(const BlockEncoding& be_L) {
  const Index n = be_L.signal_dim();
  const Index anc = Index(1) << be_L.ancilla_count;
  const Matrix& ul = be_L.unitary;

  // position-qubit projectors and flip, acting inside anc (x) pos (x) n
  const Matrix id_anc = Matrix::Identity(anc, anc);
  const Matrix id_n = Matrix::Identity(n, n);
  Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2), x = Matrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  x(0, 1) = x(1, 0) = 1.0;

  // ctrl = |0><0|_pos (x) U_L + |1><1|_pos (x) U_L^dagger, then flip pos:
  // the surviving <0^a| ... |0^a> blocks are exactly the antidiagonal of
  // Htilde_0 = |0><1| (x) L^d + |1><0| (x) L.
  const Matrix ul_mid = embed_middle(ul, anc, 2, n);
  const Matrix uld_mid = embed_middle(Matrix(ul.adjoint()), anc, 2, n);
  const Matrix proj0 = kron(id_anc, kron(p0, id_n));
  const Matrix proj1 = kron(id_anc, kron(p1, id_n));
  const Matrix flip = kron(id_anc, kron(x, id_n));
  Matrix w0 = flip * (ul_mid * proj0 + uld_mid * proj1);

  // extra ancilla to reach a_H = a_L + 1
  w0 = kron(Matrix::Identity(2, 2), w0);

  // P = diag(1, -i) on the position qubit realizes H = (P (x) I) Htilde_0 (P^d (x) I)
  Matrix p = Matrix::Zero(2, 2);
  p(0, 0) = 1.0;
  p(1, 1) = Complex(0.0, -1.0);
  const Matrix phase = kron(Matrix::Identity(2 * anc, 2 * anc), kron(p, id_n));
  Matrix ham = phase * w0 * phase.adjoint();

  Matrix target = Matrix::Zero(2 * n, 2 * n);
  target.topRightCorner(n, n) = kI * be_L.target.adjoint();
  target.bottomLeftCorner(n, n) = -kI * be_L.target;

  BlockEncoding be{std::move(ham), be_L.ancilla_count + 1, be_L.normalization,
                   std::move(target)};
  if (be.block_residual() > 1e-11 * std::max(1.0, be.normalization))
    fail(errc::numerical_breakdown, "dilation encoding identity failed");
  return be;
}

BlockEncoding build_selector_blockenc(const RealVector& nodes, const BlockEncoding& be_H) {
  const int m = static_cast<int>(nodes.size());
  if (m < 1) fail(errc::degenerate_selector, "need at least one node");
  const double s_max = nodes.cwiseAbs().maxCoeff();
  if (s_max <= 0.0) fail(errc::degenerate_selector, "all selector nodes vanish");
  if (be_H.ancilla_count < 1)
    fail(errc::shape_error, "selector needs an ancilla on the inner encoding to flag the idle branch");

  const Index dsig = be_H.signal_dim();
  const Index anc_h = Index(1) << be_H.ancilla_count;
  const Index dim = 2 * anc_h * m * dsig;  // gamma (x) anc_H (x) index (x) signal
  if (dim > dense_size_cap()) fail(errc::size_limit, "selector exceeds the dense size cap");

  const auto layout = [&](Index g, Index a, Index j, Index s) {
    return ((g * anc_h + a) * m + j) * dsig + s;
  };

  // gamma-qubit rotations per node: first column (sqrt|g|, sqrt(1-|g|)),
  // O_R additionally carries the sign phase on the |0> amplitude.
  std::vector<Eigen::Matrix2cd> rot_l(m), rot_r(m);
  for (int j = 0; j < m; ++j) {
    const double g = nodes(j) / s_max;
    const double a = std::sqrt(std::fabs(g));
    const double b = std::sqrt(1.0 - std::fabs(g));
    const Complex phase = g < 0.0 ? Complex(-1.0, 0.0) : Complex(1.0, 0.0);
    rot_l[j] << a, -b, b, a;
    rot_r[j] << phase * a, -b, b, std::conj(phase) * a;
  }

  Matrix left = Matrix::Zero(dim, dim);
  Matrix right = Matrix::Zero(dim, dim);
  for (int j = 0; j < m; ++j)
    for (Index a = 0; a < anc_h; ++a)
      for (Index s = 0; s < dsig; ++s)
        for (int g1 = 0; g1 < 2; ++g1)
          for (int g2 = 0; g2 < 2; ++g2) {
            left(layout(g1, a, j, s), layout(g2, a, j, s)) = std::conj(rot_l[j](g2, g1));
            right(layout(g1, a, j, s), layout(g2, a, j, s)) = rot_r[j](g1, g2);
          }

  // middle: HAM_H on the gamma=0 branch; the gamma=1 branch flips the first
  // HAM ancilla so it cannot contribute to the projected block.
  Matrix middle = Matrix::Zero(dim, dim);
  const Matrix& wh = be_H.unitary;  // on anc_H (x) signal
  for (int j = 0; j < m; ++j)
    for (Index a1 = 0; a1 < anc_h; ++a1)
      for (Index s1 = 0; s1 < dsig; ++s1)
        for (Index a2 = 0; a2 < anc_h; ++a2)
          for (Index s2 = 0; s2 < dsig; ++s2) {
            const Complex v = wh(a1 * dsig + s1, a2 * dsig + s2);
            if (v != Complex(0.0, 0.0))
              middle(layout(0, a1, j, s1), layout(0, a2, j, s2)) = v;
          }
  const Index top_bit = anc_h / 2;
  for (int j = 0; j < m; ++j)
    for (Index a = 0; a < anc_h; ++a)
      for (Index s = 0; s < dsig; ++s)
        middle(layout(1, a ^ top_bit, j, s), layout(1, a, j, s)) = 1.0;

  Matrix unitary = left * middle * right;

  // target is H_S itself, encoded at alpha_H * s_max
  Matrix target = Matrix::Zero(m * dsig, m * dsig);
  for (int j = 0; j < m; ++j)
    target.block(j * dsig, j * dsig, dsig, dsig) = nodes(j) * be_H.target;

  BlockEncoding be{std::move(unitary), be_H.ancilla_count + 1,
                   be_H.normalization * s_max, std::move(target)};
  if (be.block_residual() > 1e-10 * std::max(1.0, be.normalization))
    fail(errc::numerical_breakdown, "selector encoding identity failed");
  return be;
}

}  // namespace kannai::dilation
