#pragma once

#include <optional>
#include <vector>

#include "kannai/common.hpp"

namespace kannai::kernels {

/// Complementary error function, implemented in-house so the offline
/// kernel accuracy contract does not depend on the host libm: Maclaurin
/// series for |x| <= 2, Legendre continued fraction beyond. Relative
/// accuracy better than 1e-13 for x <= 26.
double erfc(double x);

/// Gaussian transmutation kernel kappa_T(s) = exp(-s^2/(4T)) / sqrt(4 pi T).
double kappa(double T, double s);

/// Tail mass Phi_T(a) = erfc(a / (2 sqrt(T))) / 2.
double gaussian_tail(double T, double a);

/// First-moment kernel sqrt(T/pi) e^{-s^2/4T} - |s| Phi_T(|s|), continued
/// evenly across 0 (the mirrored branch that the auxiliary-time exchange
/// actually produces; total mass is T).
double lambda_first_moment(double T, double sigma);

/// Zeroth-moment kernel sign(s) Phi_T(|s|), used for constant-in-s
/// forcing. The jump at 0 resolves to the positive branch for
/// |s| <= 1e-14.
double lambda_zeroth_moment(double T, double sigma);

/// Radius R = 2 sqrt(T log(8/eps)) at which the Gaussian tail estimate
/// 8 exp(-R^2/(4T)) drops to eps.
double truncation_radius(double T, double eps);

enum class KernelKind {
  KannaiGaussian,
  LambdaFirstMoment,
  LambdaZerothMoment,
  OptSchrodingerization,
  ImprovedLCHS,
  OptLCHS,
};

const char* kernel_name(KernelKind kind) noexcept;

struct KernelSpec {
  KernelKind kind = KernelKind::KannaiGaussian;
  double T = 1.0;
  double eps_param = 1e-6;          // precision parameter of the eps-dependent kernels
  std::optional<double> beta;       // ImprovedLCHS exponent in (0,1)
  double delta_off = 0.0;           // offline accuracy contract, used by noise injection
};

/// Pointwise kernel value per comparison family.
Complex comparison_kernel(const KernelSpec& spec, double s);

/// Truncation tail eps(R) = 2 int_R^inf |K(s)| ds, adaptive to absolute
/// accuracy ~1e-12 (closed form for the Gaussian kernels).
double tail_epsilon(const KernelSpec& spec, double R);

struct TailPoint {
  double R;
  double tail_eps;
};

std::vector<TailPoint> truncation_error_curve(const KernelSpec& spec,
                                              const std::vector<double>& R_grid);

/// Smallest R with tail_epsilon(R) <= eps, by bisection.
double minimal_radius(const KernelSpec& spec, double eps);

}  // namespace kannai::kernels
