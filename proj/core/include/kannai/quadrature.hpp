#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>

#include "kannai/common.hpp"
#include "kannai/operators.hpp"

namespace kannai::quadrature {

struct GaussRule {
  RealVector nodes;
  RealVector weights;
};

/// Gauss-Legendre nodes and weights on [-1,1], Newton on P_Q with
/// Chebyshev initial guesses; nodes accurate to ~1e-15. 1 <= Q <= 64.
GaussRule gauss_legendre_reference(int q);

/// Gauss-Hermite rule for weight e^{-x^2} (orthonormal recurrence plus
/// Christoffel weights); used by the transport averaging. 1 <= n <= 128.
GaussRule gauss_hermite_reference(int n);

enum class RuleKind { GaussLegendre, Trapezoid };

struct QuadraturePlan {
  RuleKind rule = RuleKind::GaussLegendre;
  double R = 0.0;
  double h1 = 0.0;            // panel length (GL)
  int Q = 0;                  // Gauss points per panel (GL)
  int trapezoid_panels = 0;   // M (trapezoid)
  RealVector nodes;
  RealVector weights;
  bool h1_adjusted = false;   // set when h1 was shrunk to make R/h1 integral

  int node_count() const { return static_cast<int>(nodes.size()); }
  double s_max() const;
};

/// Composite panel grid on [-R, R]: panels [m h1, (m+1) h1] for
/// m = -M_R .. M_R-1 with a Q-point Gauss-Legendre rule on each. h1 is
/// shrunk to R/ceil(R/h1) when R/h1 is not an integer.
QuadraturePlan build_panel_grid(double R, double h1, int q);

/// Uniform trapezoid nodes s_m = -R + m (2R/M), endpoint half weights.
QuadraturePlan build_trapezoid_grid(double R, int m_panels);

struct ParameterChoice {
  double R = 0.0;
  double h1 = 0.0;   // before integer-panel rounding
  int Q = 0;
  double delta_off = 0.0;
};

/// Discretization parameters attaining the target accuracy:
///   R = 2 sqrt(T log(8 u_r / eps)),
///   Q = ceil(log2(8 R / (eps sqrt(T)))),
///   h1 = sqrt(T) / (e (||H|| + 1/sqrt(2T))),
///   delta_off = eps / 4.
/// u_r_target rescales the precision for amplification-aware runs; the
/// default 1 reproduces the plain accuracy-eps choice.
ParameterChoice select_parameters(double T, double norm_h, double eps, double u_r_target = 1.0);

/// Deliberate relative perturbation of the offline kernel tables,
/// kappa^a = kappa (1 + delta_off * u_j) with reproducible u_j in [-1, 1].
struct NoiseInjection {
  double delta_off = 0.0;
  std::uint64_t seed = 0;
};

struct LcuCoefficients {
  Vector c;         // w_j kappa^a(s_j)
  Vector d;         // w_j Lambda^a(s_j), first- or zeroth-moment per profile
  double alpha_c = 0.0;
  double alpha_d = 0.0;
};

LcuCoefficients coefficients(const QuadraturePlan& plan, double T,
                             operators::TimeProfile forcing_profile,
                             const std::optional<NoiseInjection>& noise = std::nullopt);

/// CSV dump `node,weight,c_re,c_im,d_re,d_im` for audit.
void write_plan_csv(std::ostream& os, const QuadraturePlan& plan, const LcuCoefficients& coeffs);

}  // namespace kannai::quadrature
