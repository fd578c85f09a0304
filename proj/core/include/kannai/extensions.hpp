#pragma once

#include <optional>

#include "kannai/common.hpp"
#include "kannai/operators.hpp"
#include "kannai/pipeline.hpp"

namespace kannai::extensions {

/// Cartesian decomposition A = H1 + i H2 with H1 = (A + A^d)/2 positive
/// semidefinite, together with a factor L with L^d L = H1 and the nested
/// commutator constant driving the splitting error.
struct CartesianPair {
  Matrix H1;
  Matrix H2;
  operators::DiscreteFactor L_fac;
  double Lambda = 0.0;  // ||[H2,[H2,H1]]|| + ||[H1,[H1,H2]]||
  bool normal = false;  // [H1, H2] = 0 within tolerance
};

CartesianPair cartesian_split(const Matrix& a);

/// Normal generators factor exactly: apply e^{-i H2 T}, then the
/// transmutation pipeline for e^{-H1 T}.
Vector simulate_normal(const CartesianPair& pair, const Vector& u0, double T, double eps);

enum class StrangSubstep { KannaiLcu, ExactSpectral };

struct StrangResult {
  Vector state;
  double error_vs_oracle = 0.0;  // relative, against the dense exponential
  int steps = 0;
  double tau = 0.0;
};

/// Second-order splitting (e^{-iH2 tau/2} e^{-H1 tau} e^{-iH2 tau/2})^{N}
/// with the dissipative half realized by the transmutation sum at per-step
/// precision eps_step (success branch kept exactly).
StrangResult strang_simulate(const CartesianPair& pair, const Vector& u0, double T, int n_steps,
                             double eps_step, StrangSubstep substep = StrangSubstep::KannaiLcu);

struct SteadyStateResult {
  Vector u;
  double T_tilde = 0.0;
  double lambda0 = 0.0;
  double C = 0.0;
  pipeline::SimulationReport report;
};

/// Long-horizon run from u0 = 0 towards the steady state A^{-1} f, to
/// relative accuracy eps. T_tilde = log(C/(eps ||x||))/lambda0 with
/// C >= ||u0 - x||, defaulting to twice the oracle steady norm so the
/// contraction share keeps strict margin; the internal pipeline precision
/// is tightened so the LCU share stays below eps/2 as well.
SteadyStateResult longtime_steady(const operators::DiscreteFactor& factor, const Vector& f,
                                  double eps, std::optional<double> C = std::nullopt);

struct LinearSolveResult {
  Vector x_out;
  double rel_error = 0.0;  // vs direct solve
  double kappa = 0.0;
  double T_tilde = 0.0;
  pipeline::QueryCount queries;
};

/// Positive definite solve A x = b with A = L^d L, by normalizing to
/// ||A/alpha|| <= 1 and running the dynamics to T_tilde = kappa log(C/eps).
LinearSolveResult linear_solve_kannai(const operators::DiscreteFactor& factor, const Vector& b,
                                      double eps);

/// Beta-weighted average of wave snapshots solving
/// u'' + ((d-1)/t) u' = -A u, u(0) = u0, u'(0) = 0:
///   u(t) = c_d int_{-1}^{1} w(l t) (1 - l^2)^{(d-3)/2} dl,
/// Gauss-Chebyshev for d = 2 (absorbing the endpoint singularity),
/// Gauss-Legendre otherwise. c_d = Gamma(d/2)/(sqrt(pi) Gamma((d-1)/2)).
Vector epd_solve(const operators::DiscreteFactor& factor, const Vector& u0, double t, int dimension);

struct TransportRule {
  int hermite_nodes = 60;
  double max_step_frequency = 8.0;  // oscillation budget per substep
};

/// Heat multipliers from Gaussian-averaged transport phases: every Fourier
/// mode k picks up prod_r E[e^{-2 pi i k_r a sqrt(2T')}]^(substeps) with a
/// standard normal a, evaluated by Gauss-Hermite per axis. Substeps keep
/// each phase within the rule's resolvable band.
Vector transport_heat_average(const Vector& y0_hat, double T, int dimension,
                              const TransportRule& rule = {});

/// S = -2 nu log(u) entrywise; all entries must be strictly positive.
Vector hopf_cole_recover(const Vector& u, double nu);

/// Periodic drift removal on Fourier coefficients: mode k gains
/// e^{2 pi i k . shift} (per-axis shifts, FFT ordering).
Vector translate_fourier(const Vector& coeffs, int dimension, const RealVector& shift);

}  // namespace kannai::extensions
