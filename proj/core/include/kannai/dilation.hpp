#pragma once

#include "kannai/common.hpp"
#include "kannai/operators.hpp"

namespace kannai::dilation {

struct Spectrum {
  RealVector eigenvalues;
  Matrix eigenvectors;  // unitary, columns are eigenvectors
};

/// Hermitian dilation H = i Ltilde with Ltilde = [[0, L^dagger], [-L, 0]]
/// on the stacked (w, v) space of dimension cols(L) + rows(L). The
/// eigenvalues come in +-(singular value) pairs, so ||H|| = ||L||.
struct DilationHamiltonian {
  Matrix H;
  operators::DiscreteFactor L_ref;
  Spectrum spectrum;

  Index w_dim() const { return L_ref.cols(); }
  Index v_dim() const { return L_ref.rows(); }
  Index dim() const { return H.rows(); }
  double norm() const { return L_ref.spectral_norm; }
};

DilationHamiltonian hermitian_dilation(const operators::DiscreteFactor& L);

/// Explicit block encoding: ancilla register first (slowest index), so the
/// encoded block is the top-left signal_dim x signal_dim corner of the
/// unitary, equal to target / normalization.
struct BlockEncoding {
  Matrix unitary;
  int ancilla_count = 0;
  double normalization = 1.0;
  Matrix target;

  Index signal_dim() const { return target.rows(); }
  Matrix projected_block() const { return unitary.topLeftCorner(signal_dim(), signal_dim()); }
  double block_residual() const {
    return (projected_block() - target / normalization).norm();
  }
  double unitarity_residual() const {
    return (unitary.adjoint() * unitary - Matrix::Identity(unitary.rows(), unitary.cols())).norm();
  }
};

/// Zero-fill a rectangular matrix into max(rows, cols) square form.
Matrix pad_square(const Matrix& m);

/// One-ancilla unitary completion [[L/a, sqrt(I - L L^d/a^2)],
/// [sqrt(I - L^d L/a^2), -L^d/a]] built from the SVD; requires a >= ||L||.
/// Rectangular inputs are padded square first.
BlockEncoding unitary_completion(const operators::DiscreteFactor& L, double alpha);

/// Block encoding of the dilation H from a block encoding of L:
/// W_H0 encodes Htilde_0 = [[0, L^d], [L, 0]] through a position qubit,
/// then conjugation by the phase P = diag(1, -i) on that qubit turns it
/// into H. alpha_H = alpha_L, a_H = a_L + 1.
BlockEncoding build_ham_h(const BlockEncoding& be_L);

/// Block encoding of the selector Hamiltonian H_S = sum_j s_j |j><j| (x) H
/// with normalization alpha_H * s_max and one extra ancilla qubit carrying
/// the per-node amplitude sqrt(|gamma_j|) and sign phase. The index
/// register counts as signal space.
BlockEncoding build_selector_blockenc(const RealVector& nodes, const BlockEncoding& be_H);

}  // namespace kannai::dilation
