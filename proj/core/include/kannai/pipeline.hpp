#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kannai/common.hpp"
#include "kannai/dilation.hpp"
#include "kannai/operators.hpp"
#include "kannai/quadrature.hpp"
#include "kannai/reference.hpp"

namespace kannai::pipeline {

struct SimulationProblem {
  operators::DiscreteFactor factor;
  Vector u0;                                       // on the w-space
  std::optional<operators::ForcingVector> forcing; // slot-local
  double T = 1.0;
  double eps = 1e-6;
};

struct QueryCount {
  long per_sel = 0;              // ceil(alpha_H s_max) + ceil(log2(1/delta1))
  long repetitions = 0;          // g
  long total_matrix_queries = 0; // per_sel * g
  long state_prep_calls = 0;
  double delta1 = 0.0;
  double s_max = 0.0;
  double alpha_h = 0.0;
};

struct SimulationReport {
  Vector u_f;     // assembled dilated vector
  Vector u_h;     // projected physical block
  Vector u_ref;   // spectral semigroup oracle on the same grid
  double rel_error = 0.0;
  double u_r = 0.0;    // (||u0|| + T ||b||) / ||u_h||
  double eta0 = 0.0;   // alpha_c ||u0|| + alpha_d ||b||
  long g = 0;          // ceil(eta0 / ||u_h||)
  QueryCount queries;
  double alpha_c = 0.0;
  double alpha_d = 0.0;
  double delta_off = 0.0;
  quadrature::QuadraturePlan plan;
};

/// delta1-accurate selector model: each node evolution is followed by a
/// seeded unitary at distance delta1 from identity.
struct UnitaryNoise {
  double delta1 = 0.0;
  std::uint64_t seed = 0;
};

/// Stacked initial state psi0 = (u0, 0) on the dilated space.
Vector stack_state(const SimulationProblem& problem);

/// Stacked forcing b: (f, 0) for WSlot, (0, f) for VSlot.
Vector stack_forcing(const operators::DiscreteFactor& factor, const operators::ForcingVector& f);

/// u_f = sum_j (c_j U(s_j) psi0 + d_j U(s_j) b), deterministic pairwise
/// reduction. Coefficients must match the plan's node count and the
/// forcing's time profile.
Vector assemble(const SimulationProblem& problem, const quadrature::QuadraturePlan& plan,
                const quadrature::LcuCoefficients& coeffs,
                const std::optional<UnitaryNoise>& noise = std::nullopt);

/// First block (w-space) of a dilated vector.
Vector project_physical(const Vector& u_f, const SimulationProblem& problem);

struct RunRule {
  enum class Kind { TheoremGL, Trapezoid } kind = Kind::TheoremGL;
  double R = 0.0;  // trapezoid only
  int M = 0;       // trapezoid panels

  static RunRule theorem_gl() { return RunRule{Kind::TheoremGL, 0.0, 0}; }
  static RunRule trapezoid(double R, int M) { return RunRule{Kind::Trapezoid, R, M}; }
};

/// Full pipeline: parameter selection, coefficients, assembly, projection,
/// oracle comparison, repetition and query accounting with
/// delta1 = eps / (8 u_r) (u_r bootstrapped from a coarse trapezoid pre-run).
SimulationReport run(const SimulationProblem& problem, const RunRule& rule);

struct BoundCheck {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct BoundReport {
  std::vector<BoundCheck> checks;
  bool all_pass = true;

  void add(std::string name, double measured, double bound);
};

/// Truncation inequality at radius R: || int kappa U psi0 - truncated ||
/// against (2 sqrt(T)/(sqrt(pi) R)) e^{-R^2/4T} ||psi0||, and the
/// first-moment analogue with prefactor 4 T sqrt(T) / (R sqrt(pi)).
BoundReport truncation_bound_check(const dilation::DilationHamiltonian& h, const Vector& psi0,
                                   const Vector& b, double T, double R);

/// Composite Gauss-Legendre inequality at (R, h1, Q) against
/// 2^{-2Q+1} R h1^{2Q} T^{-1/2} (||H|| + 1/sqrt(2T))^{2Q} ||psi0|| and the
/// sqrt(T)-weighted analogue for the first-moment kernel.
BoundReport quadrature_bound_check(const dilation::DilationHamiltonian& h, const Vector& psi0,
                                   const Vector& b, double T, double R, double h1, int q);

/// Coefficient-sum inequalities under an injected delta_off perturbation.
BoundReport coefficient_bound_check(double T, double R, double h1, int q,
                                    double delta_off, std::uint64_t seed);

/// Total-error inequalities (offline noise + quadrature + truncation,
/// composed with unit constants) plus the delta1 LCU deviation bound.
BoundReport error_budget_check(const SimulationProblem& problem, double delta_off, double delta1,
                               std::uint64_t seed = 0);

/// CSV schema `x_index,u_kannai_re,u_kannai_im,u_ref_re,u_ref_im,abs_err`.
void write_report_csv(std::ostream& os, const SimulationReport& report);

/// Flat key=value summary lines.
void write_summary(std::ostream& os, const SimulationReport& report);

}  // namespace kannai::pipeline
