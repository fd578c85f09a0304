#include "kannai/quadrature.hpp"

#include <cmath>
#include <ostream>

#include "kannai/kernels.hpp"

namespace kannai::quadrature {

namespace {

// P_q and P'_q at x by the three-term recurrence; q >= 1, |x| < 1.
void legendre_eval(int q, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  for (int n = 2; n <= q; ++n) {
    const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = q * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

GaussRule gauss_legendre_reference(int q) {
  if (q < 1 || q > 64) fail(errc::invalid_precision, "Gauss order must lie in [1, 64]");
  GaussRule rule;
  rule.nodes = RealVector::Zero(q);
  rule.weights = RealVector::Zero(q);
  if (q == 1) {
    rule.nodes(0) = 0.0;
    rule.weights(0) = 2.0;
    return rule;
  }
  const int half = (q + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (q + 0.5));
    double p = 0.0, dp = 1.0;
    bool converged = false;
    for (int iter = 0; iter < 100; ++iter) {
      legendre_eval(q, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) {
        converged = true;
        break;
      }
    }
    if (!converged) fail(errc::root_finding_failure, "Legendre Newton iteration stalled");
    legendre_eval(q, x, p, dp);
    rule.nodes(i) = -x;  // x descends with i, so nodes end up ascending
    rule.nodes(q - 1 - i) = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights(i) = w;
    rule.weights(q - 1 - i) = w;
  }
  return rule;
}

GaussRule gauss_hermite_reference(int n) {
  if (n < 1 || n > 128) fail(errc::invalid_precision, "Hermite order must lie in [1, 128]");
  GaussRule rule;
  rule.nodes = RealVector::Zero(n);
  rule.weights = RealVector::Zero(n);

  // orthonormal Hermite values p_0..p_n at x
  const auto eval = [n](double x, RealVector& p) {
    p(0) = std::pow(M_PI, -0.25);
    if (n >= 1) p(1) = std::sqrt(2.0) * x * p(0);
    for (int k = 1; k < n; ++k)
      p(k + 1) = x * std::sqrt(2.0 / (k + 1.0)) * p(k) - std::sqrt(k / (k + 1.0)) * p(k - 1);
  };

  RealVector p(n + 1);
  const int half = (n + 1) / 2;
  std::vector<double> roots(half, 0.0);
  for (int i = 0; i < half; ++i) {
    // initial guesses, largest root first
    double z = 0.0;
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z = roots[0] - 1.14 * std::pow(n, 0.426) / roots[0];
    } else if (i == 2) {
      z = 1.86 * roots[1] - 0.86 * roots[0];
    } else if (i == 3) {
      z = 1.91 * roots[2] - 0.91 * roots[1];
    } else {
      z = 2.0 * roots[i - 1] - roots[i - 2];
    }
    bool converged = false;
    for (int iter = 0; iter < 100; ++iter) {
      eval(z, p);
      const double dp = std::sqrt(2.0 * n) * p(n - 1);  // p_n' = sqrt(2n) p_{n-1}
      const double dz = p(n) / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-14 * (1.0 + std::fabs(z))) {
        converged = true;
        break;
      }
    }
    if (!converged) fail(errc::root_finding_failure, "Hermite Newton iteration stalled");
    roots[i] = z;
    rule.nodes(n - 1 - i) = z;
    rule.nodes(i) = -z;
    eval(z, p);
    // Christoffel weight 1 / sum_{k<n} p_k(x)^2
    const double w = 1.0 / p.head(n).squaredNorm();
    rule.weights(n - 1 - i) = w;
    rule.weights(i) = w;
  }
  if (n % 2 == 1) {
    rule.nodes(n / 2) = 0.0;
    eval(0.0, p);
    rule.weights(n / 2) = 1.0 / p.head(n).squaredNorm();
  }
  return rule;
}

double QuadraturePlan::s_max() const {
  return nodes.size() == 0 ? 0.0 : nodes.cwiseAbs().maxCoeff();
}

QuadraturePlan build_panel_grid(double R, double h1, int q) {
  if (!(R > 0.0)) fail(errc::invalid_panel, "R must be positive");
  if (!(h1 > 0.0) || h1 > R) fail(errc::invalid_panel, "need 0 < h1 <= R");
  if (q < 1) fail(errc::invalid_panel, "need Q >= 1");

  const int m_r = static_cast<int>(std::ceil(R / h1 - 1e-12));
  const double h = R / m_r;
  const bool adjusted = std::fabs(h - h1) > 1e-12 * h1;

  const GaussRule ref = gauss_legendre_reference(q);
  QuadraturePlan plan;
  plan.rule = RuleKind::GaussLegendre;
  plan.R = R;
  plan.h1 = h;
  plan.Q = q;
  plan.h1_adjusted = adjusted;
  const int total = 2 * m_r * q;
  plan.nodes = RealVector::Zero(total);
  plan.weights = RealVector::Zero(total);
  int idx = 0;
  for (int m = -m_r; m < m_r; ++m) {
    for (int k = 0; k < q; ++k) {
      plan.nodes(idx) = 0.5 * h * ref.nodes(k) + 0.5 * (2.0 * m + 1.0) * h;
      plan.weights(idx) = 0.5 * h * ref.weights(k);
      ++idx;
    }
  }
  return plan;
}

QuadraturePlan build_trapezoid_grid(double R, int m_panels) {
  if (!(R > 0.0)) fail(errc::invalid_panel, "R must be positive");
  if (m_panels < 2) fail(errc::invalid_panel, "need at least 2 trapezoid panels");
  QuadraturePlan plan;
  plan.rule = RuleKind::Trapezoid;
  plan.R = R;
  plan.trapezoid_panels = m_panels;
  const double ds = 2.0 * R / m_panels;
  plan.nodes = RealVector::Zero(m_panels + 1);
  plan.weights = RealVector::Zero(m_panels + 1);
  for (int m = 0; m <= m_panels; ++m) {
    plan.nodes(m) = -R + m * ds;
    plan.weights(m) = (m == 0 || m == m_panels) ? 0.5 * ds : ds;
  }
  return plan;
}

ParameterChoice select_parameters(double T, double norm_h, double eps, double u_r_target) {
  if (!(T > 0.0)) fail(errc::invalid_time, "final time must be positive");
  if (!(eps > 0.0 && eps < 8.0)) fail(errc::invalid_precision, "eps must lie in (0,8)");
  if (norm_h < 0.0) fail(errc::invalid_operator, "||H|| must be nonnegative");
  if (!(u_r_target >= 1.0)) fail(errc::invalid_precision, "u_r target must be >= 1");

  ParameterChoice choice;
  choice.R = 2.0 * std::sqrt(T * std::log(8.0 * u_r_target / eps));
  const double q_arg = 8.0 * choice.R * u_r_target / (eps * std::sqrt(T));
  const int q = static_cast<int>(std::ceil(std::log2(q_arg)));
  if (q > 64) fail(errc::invalid_precision, "requested precision needs Gauss order beyond the cap of 64");
  choice.Q = std::max(q, 1);
  choice.h1 = std::sqrt(T) / (M_E * (norm_h + 1.0 / std::sqrt(2.0 * T)));
  choice.delta_off = eps / (4.0 * u_r_target);
  return choice;
}

LcuCoefficients coefficients(const QuadraturePlan& plan, double T,
                             operators::TimeProfile forcing_profile,
                             const std::optional<NoiseInjection>& noise) {
  if (!(T > 0.0)) fail(errc::invalid_time, "final time must be positive");
  const int m = plan.node_count();
  if (m == 0) fail(errc::invalid_panel, "empty quadrature plan");

  LcuCoefficients out;
  out.c = Vector::Zero(m);
  out.d = Vector::Zero(m);
  std::uint64_t state = noise ? mix_seed(noise->seed, 0x6b61707061ull) : 0;
  for (int j = 0; j < m; ++j) {
    const double s = plan.nodes(j);
    double kap = kernels::kappa(T, s);
    double lam = forcing_profile == operators::TimeProfile::LinearInS
                     ? kernels::lambda_first_moment(T, s)
                     : kernels::lambda_zeroth_moment(T, s);
    if (noise && noise->delta_off > 0.0) {
      kap *= 1.0 + noise->delta_off * uniform_pm1(state);
      lam *= 1.0 + noise->delta_off * uniform_pm1(state);
    }
    out.c(j) = Complex(plan.weights(j) * kap);
    out.d(j) = Complex(plan.weights(j) * lam);
  }
  out.alpha_c = out.c.cwiseAbs().sum();
  out.alpha_d = out.d.cwiseAbs().sum();
  return out;
}

void write_plan_csv(std::ostream& os, const QuadraturePlan& plan, const LcuCoefficients& coeffs) {
  os << "node,weight,c_re,c_im,d_re,d_im\n";
  for (int j = 0; j < plan.node_count(); ++j) {
    os << format_double(plan.nodes(j)) << ',' << format_double(plan.weights(j)) << ','
       << format_double(coeffs.c(j).real()) << ',' << format_double(coeffs.c(j).imag()) << ','
       << format_double(coeffs.d(j).real()) << ',' << format_double(coeffs.d(j).imag()) << '\n';
  }
}

}  // namespace kannai::quadrature
