#include "kannai/kernels.hpp"

#include <cmath>

namespace kannai::kernels {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

void check_time(double T) {
  if (!(T > 0.0)) fail(errc::invalid_time, "final time must be positive");
}

// erf by the all-positive-term confluent series
// erf(x) = (2x/sqrt(pi)) e^{-x^2} sum_n (2x^2)^n / (1*3*...*(2n+1)),
// no cancellation for |x| <= 2.
double erf_series(double x) {
  const double x2 = x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n < 200; ++n) {
    term *= 2.0 * x2 / (2.0 * n + 1.0);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return (2.0 * x / kSqrtPi) * std::exp(-x2) * sum;
}

// Legendre continued fraction
// erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))),
// evaluated bottom-up at fixed depth; machine accurate for x >= 1.2.
double erfc_cf(double x) {
  double tail = 0.0;
  for (int k = 200; k >= 1; --k) tail = (0.5 * k) / (x + tail);
  return std::exp(-x * x) / (kSqrtPi * (x + tail));
}

}  // namespace

double erfc(double x) {
  // the switch point balances series cancellation (~1e-16/erfc(x)) against
  // continued-fraction depth
  if (x < 0.0) return 2.0 - erfc(-x);
  if (x <= 1.25) return 1.0 - erf_series(x);
  return erfc_cf(x);
}

double kappa(double T, double s) {
  check_time(T);
  return std::exp(-s * s / (4.0 * T)) / std::sqrt(4.0 * M_PI * T);
}

double gaussian_tail(double T, double a) {
  check_time(T);
  return 0.5 * erfc(a / (2.0 * std::sqrt(T)));
}

double lambda_first_moment(double T, double sigma) {
  check_time(T);
  const double a = std::fabs(sigma);
  return std::sqrt(T / M_PI) * std::exp(-sigma * sigma / (4.0 * T)) - a * gaussian_tail(T, a);
}

namespace {
constexpr double kBranchTie = 1e-14;  // jump at 0 resolves to the positive branch
}

double lambda_zeroth_moment(double T, double sigma) {
  check_time(T);
  const double value = gaussian_tail(T, std::fabs(sigma));
  return sigma < -kBranchTie ? -value : value;
}

double truncation_radius(double T, double eps) {
  check_time(T);
  // eps < 8 keeps the radius positive; values above 1 only appear in
  // consistency probes of the log factor
  if (!(eps > 0.0 && eps < 8.0)) fail(errc::invalid_precision, "eps must lie in (0,8)");
  return 2.0 * std::sqrt(T) * std::sqrt(std::log(8.0 / eps));
}

const char* kernel_name(KernelKind kind) noexcept {
  switch (kind) {
    case KernelKind::KannaiGaussian: return "kannai";
    case KernelKind::LambdaFirstMoment: return "lambda_first_moment";
    case KernelKind::LambdaZerothMoment: return "lambda_zeroth_moment";
    case KernelKind::OptSchrodingerization: return "opt_schrodingerization";
    case KernelKind::ImprovedLCHS: return "improved_lchs";
    case KernelKind::OptLCHS: return "opt_lchs";
  }
  return "unknown";
}

Complex comparison_kernel(const KernelSpec& spec, double s) {
  check_time(spec.T);
  const double T = spec.T;
  switch (spec.kind) {
    case KernelKind::KannaiGaussian:
      return Complex(kappa(T, s), 0.0);
    case KernelKind::LambdaFirstMoment:
      return Complex(lambda_first_moment(T, s), 0.0);
    case KernelKind::LambdaZerothMoment:
      return Complex(lambda_zeroth_moment(T, s), 0.0);
    case KernelKind::OptSchrodingerization: {
      if (!(spec.eps_param > 0.0 && spec.eps_param < 1.0))
        fail(errc::invalid_precision, "eps_param must lie in (0,1)");
      const double logeps = std::log(1.0 / spec.eps_param);
      const Complex z(1.0, s / T);
      return std::exp(z * z / (16.0 * logeps)) / (2.0 * M_PI * Complex(T, s));
    }
    case KernelKind::ImprovedLCHS: {
      if (!spec.beta) fail(errc::missing_parameter, "ImprovedLCHS kernel needs beta");
      const double beta = *spec.beta;
      if (!(beta > 0.0 && beta < 1.0)) fail(errc::invalid_precision, "beta must lie in (0,1)");
      const Complex z(1.0, s / T);
      return std::exp(Complex(std::pow(2.0, beta), 0.0) - std::pow(z, beta)) /
             (2.0 * M_PI * Complex(T, -s));
    }
    case KernelKind::OptLCHS: {
      if (!(spec.eps_param > 0.0 && spec.eps_param < 1.0))
        fail(errc::invalid_precision, "eps_param must lie in (0,1)");
      const double logeps = std::log(1.0 / spec.eps_param);
      const double u = s / T;
      return std::exp(-(u * u + 1.0) / (4.0 * logeps)) / (2.0 * M_PI * Complex(T, -s));
    }
  }
  fail(errc::missing_parameter, "unknown kernel kind");
}

namespace {

// Gauss-Kronrod 7-15 pair on [a,b]; returns K15 value, sets an error estimate.
template <class F>
double g7k15(const F& f, double a, double b, double& err) {
  static const double kNodes[8] = {
      0.0,
      0.4058451513773971669066064,
      0.7415311855993944398638648,
      0.9491079123427585245261897,
      0.2077849550078984676006894,
      0.5860872354676911302941448,
      0.8648644233597690727897128,
      0.9914553711208126392068547};
  static const double kWg[4] = {
      0.4179591836734693877551020,
      0.3818300505051189449503698,
      0.2797053914892766679014678,
      0.1294849661688696932706114};
  static const double kWk[8] = {
      0.2094821410847278280129992,
      0.1903505780647854099132564,
      0.1406532597155259187451896,
      0.0630920926299785532907007,
      0.2044329400752988924141620,
      0.1690047266392679028265834,
      0.1047900103222501838398763,
      0.0229353220105292249637320};
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f0 = f(mid);
  double g = kWg[0] * f0;
  double k = kWk[0] * f0;
  for (int i = 1; i < 8; ++i) {
    const double dx = half * kNodes[i];
    const double fi = f(mid + dx) + f(mid - dx);
    k += kWk[i] * fi;
    if (i < 4) g += kWg[i] * fi;
  }
  g *= half;
  k *= half;
  err = std::pow(200.0 * std::fabs(k - g), 1.5);
  return k;
}

template <class F>
double adaptive_integral(const F& f, double a, double b, double abs_tol) {
  struct Segment {
    double a, b;
  };
  std::vector<Segment> stack{{a, b}};
  double total = 0.0;
  int evals = 0;
  while (!stack.empty()) {
    const Segment seg = stack.back();
    stack.pop_back();
    double err = 0.0;
    const double v = g7k15(f, seg.a, seg.b, err);
    if (err <= abs_tol * (seg.b - seg.a) / (b - a) || seg.b - seg.a < 1e-12 * (b - a)) {
      total += v;
    } else {
      const double mid = 0.5 * (seg.a + seg.b);
      stack.push_back({seg.a, mid});
      stack.push_back({mid, seg.b});
    }
    if (++evals > 200000) fail(errc::quadrature_failure, "adaptive integral did not converge");
  }
  return total;
}

}  // namespace

double tail_epsilon(const KernelSpec& spec, double R) {
  check_time(spec.T);
  if (R < 0.0) fail(errc::invalid_panel, "R must be nonnegative");
  // closed forms where the tail is an erfc integral
  if (spec.kind == KernelKind::KannaiGaussian)
    return erfc(R / (2.0 * std::sqrt(spec.T)));
  if (spec.kind == KernelKind::LambdaZerothMoment) {
    // 2 int_R^inf Phi_T = 2 [ sqrt(T/pi) e^{-R^2/4T} - R Phi_T(R) ]
    return 2.0 * lambda_first_moment(spec.T, R);
  }

  const auto magnitude = [&](double s) { return std::abs(comparison_kernel(spec, s)); };

  // expand the window until the increments fall below the resolution floor
  double total = 0.0;
  double lo = R;
  double width = std::max(4.0 * spec.T, 4.0);
  int quiet = 0;
  for (int iter = 0; iter < 64; ++iter) {
    const double piece = adaptive_integral(magnitude, lo, lo + width, 1e-14);
    total += piece;
    lo += width;
    width *= 2.0;
    if (piece < std::max(1e-15 * total, 1e-16)) {
      if (++quiet >= 2) return 2.0 * total;
    } else {
      quiet = 0;
    }
  }
  fail(errc::quadrature_failure, "kernel tail did not decay within the integration window");
}

std::vector<TailPoint> truncation_error_curve(const KernelSpec& spec,
                                              const std::vector<double>& R_grid) {
  if (R_grid.empty()) fail(errc::invalid_panel, "R grid is empty");
  for (std::size_t i = 0; i < R_grid.size(); ++i) {
    if (R_grid[i] < 0.0 || (i > 0 && R_grid[i] <= R_grid[i - 1]))
      fail(errc::invalid_panel, "R grid must be nonnegative and increasing");
  }
  std::vector<TailPoint> curve;
  curve.reserve(R_grid.size());
  for (double R : R_grid) curve.push_back({R, tail_epsilon(spec, R)});
  return curve;
}

double minimal_radius(const KernelSpec& spec, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) fail(errc::invalid_precision, "eps must lie in (0,1)");
  double hi = 1.0;
  int guard = 0;
  while (tail_epsilon(spec, hi) > eps) {
    hi *= 2.0;
    if (++guard > 24) fail(errc::quadrature_failure, "no radius reaches the requested tail");
  }
  double lo = hi > 1.0 ? hi / 2.0 : 0.0;
  for (int i = 0; i < 60 && hi - lo > 1e-9 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (tail_epsilon(spec, mid) <= eps ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace kannai::kernels
