// Acceptance suite: every release gate runs here at its pinned tolerance
// and prints one PASS/FAIL line. The process exits nonzero when any
// criterion fails, so `ctest` gates on the whole set.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "kannai/extensions.hpp"
#include "kannai/kernels.hpp"
#include "kannai/operators.hpp"
#include "kannai/pipeline.hpp"
#include "kannai/reference.hpp"

namespace ops = kannai::operators;
namespace kp = kannai::pipeline;
namespace ke = kannai::extensions;
namespace kn = kannai::kernels;
namespace kq = kannai::quadrature;
namespace kr = kannai::reference;
using kannai::Complex;
using kannai::Index;
using kannai::Matrix;
using kannai::RealVector;
using kannai::Vector;

namespace {

struct Harness {
  int failures = 0;

  void report(const std::string& id, bool pass, const std::string& detail) {
    std::printf("[%s] %-34s %s\n", pass ? "PASS" : "FAIL", id.c_str(), detail.c_str());
    if (!pass) ++failures;
  }
};

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ops::DiscreteFactor scalar_factor(double v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return ops::make_custom_factor(m);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// C1: scalar transmutation identity at eps = 1e-8
void criterion_1(Harness& h) {
  const auto t0 = std::chrono::steady_clock::now();
  kp::SimulationProblem p;
  p.factor = scalar_factor(2.0);
  p.u0 = Vector::Ones(1);
  p.T = 1.0;
  p.eps = 1e-8;
  const auto report = kp::run(p, kp::RunRule::theorem_gl());
  const double expected = std::exp(-4.0);
  const double rel = std::fabs(report.u_h(0).real() - expected) / expected;
  const double elapsed = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "rel=%.3e (<=1e-8), runtime=%.3fs (<1s)", rel, elapsed);
  h.report("C1 scalar transmutation", rel <= 1e-8 && elapsed < 1.0, buf);
}

// C2: inhomogeneous Dirichlet reproduction, n=50, trapezoid R=10 M=800
void criterion_2(Harness& h) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = 50;
  kp::SimulationProblem p;
  p.factor = ops::build_heat_gradient_1d(n);
  p.u0 = Vector(n - 1);
  for (Index i = 0; i < n - 1; ++i) p.u0(i) = std::cos(2.0 * M_PI * (i + 1.0) / n);
  p.forcing = ops::dirichlet_boundary_forcing(n, 1.0, 1.0);
  p.T = 1.0;
  p.eps = 1e-6;
  const auto report = kp::run(p, kp::RunRule::trapezoid(10.0, 800));

  const Matrix a = p.factor.normal_matrix();
  const Vector f_eff = p.factor.matrix.adjoint() * p.forcing->values;
  const Vector cn = kr::fd_time_march(a, p.u0, f_eff, 1.0, 1e-4);
  const double rel_cn = (report.u_h - cn).norm() / cn.norm();
  const double elapsed = seconds_since(t0);
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "rel_spectral=%.3e (<=1e-6), rel_cn=%.3e (<=1e-4), runtime=%.2fs (<30s)",
                report.rel_error, rel_cn, elapsed);
  h.report("C2 Dirichlet boundary case",
           report.rel_error <= 1e-6 && rel_cn <= 1e-4 && elapsed < 30.0, buf);
}

// C3: Neumann reproduction against the separated exact solution
void criterion_3(Harness& h) {
  const int n = 50;
  kp::SimulationProblem p;
  p.factor = ops::build_heat_neumann_1d(n);
  p.u0 = Vector(n);
  const double mesh = 1.0 / n;
  for (Index i = 0; i < n; ++i) p.u0(i) = std::cos(M_PI * (i + 0.5) * mesh);
  p.T = 1.0;
  p.eps = 1e-6;
  const auto report = kp::run(p, kp::RunRule::trapezoid(10.0, 800));
  Vector exact(n);
  for (Index i = 0; i < n; ++i)
    exact(i) = std::exp(-M_PI * M_PI) * std::cos(M_PI * (i + 0.5) * mesh);
  const double rel = (report.u_h - exact).norm() / exact.norm();
  char buf[120];
  std::snprintf(buf, sizeof(buf), "rel=%.3e (<=5e-3)", rel);
  h.report("C3 Neumann boundary case", rel <= 5e-3, buf);
}

// C4: coefficient ell-1 budgets over the (T, eps) grid
void criterion_4(Harness& h) {
  bool pass = true;
  double worst_c = 0.0, worst_d = 0.0;
  for (double T : {0.5, 1.0, 4.0})
    for (double eps : {1e-4, 1e-8})
      for (double norm_h : {0.0, 2.0, 7.391036260090294}) {
        const auto choice = kq::select_parameters(T, norm_h, eps);
        const auto plan = kq::build_panel_grid(choice.R, choice.h1, choice.Q);
        const auto coeffs = kq::coefficients(plan, T, ops::TimeProfile::LinearInS);
        pass = pass && coeffs.alpha_c <= 1.0 + eps;
        pass = pass && coeffs.alpha_d <= (1.0 + eps) * T + eps;
        worst_c = std::max(worst_c, coeffs.alpha_c - 1.0);
        worst_d = std::max(worst_d, coeffs.alpha_d / T - 1.0);
      }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "max(alpha_c-1)=%.2e, max(alpha_d/T-1)=%.2e", worst_c, worst_d);
  h.report("C4 coefficient budgets", pass, buf);
}

// C5: appendix inequality suite, zero violations allowed
void criterion_5(Harness& h) {
  int checks = 0, violations = 0;
  const auto tally = [&](const kp::BoundReport& rep) {
    for (const auto& c : rep.checks) {
      ++checks;
      if (!c.pass) ++violations;
    }
  };

  std::vector<ops::DiscreteFactor> factors;
  factors.push_back(scalar_factor(2.0));
  factors.push_back(ops::build_heat_gradient_1d(8));
  factors.push_back(ops::build_heat_neumann_1d(6));

  const double T = 1.0;
  for (const auto& factor : factors) {
    const auto dil = kannai::dilation::hermitian_dilation(factor);
    Vector psi0 = Vector::Zero(dil.dim());
    psi0.head(factor.cols()) = Vector::Ones(factor.cols());
    Vector b = Vector::Zero(dil.dim());
    b.head(factor.cols()) = 0.5 * Vector::Ones(factor.cols());

    for (double rscale : {2.0, 4.0, 6.0})
      tally(kp::truncation_bound_check(dil, psi0, b, T, rscale * std::sqrt(T)));

    const auto choice = kq::select_parameters(T, dil.norm(), 1e-6);
    for (int q : {1, 2, 3, 4}) {
      tally(kp::quadrature_bound_check(dil, psi0, b, T, 4.0, choice.h1, q));
      for (double delta_off : {0.0, 1e-3})
        tally(kp::coefficient_bound_check(T, 4.0, choice.h1, q, delta_off, 5));
    }

    kp::SimulationProblem problem;
    problem.factor = factor;
    problem.u0 = Vector::Ones(factor.cols());
    problem.forcing = ops::ForcingVector{Vector(0.5 * Vector::Ones(factor.cols())),
                                         ops::ForcingSlot::WSlot, ops::TimeProfile::LinearInS};
    problem.T = T;
    problem.eps = 1e-6;
    for (double delta_off : {0.0, 1e-3})
      for (double delta1 : {0.0, 1e-3})
        tally(kp::error_budget_check(problem, delta_off, delta1, 99));
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "%d checks, %d violations", checks, violations);
  h.report("C5 appendix bound suite", violations == 0, buf);
}

// C6: Gaussian kernel needs the smallest truncation radius
void criterion_6(Harness& h) {
  const double T = 1.0;
  bool pass = true;
  std::string detail;

  const double r_kannai_ref = kn::truncation_radius(T, 1e-6);
  pass = pass && std::fabs(r_kannai_ref - 7.97) <= 0.01;
  detail += "R_kannai(1e-6)=" + std::to_string(r_kannai_ref).substr(0, 6);

  double prev_ratio[3] = {0.0, 0.0, 0.0};
  int step = 0;
  for (double eps : {1e-3, 1e-6, 1e-9}) {
    const double r0 = kn::truncation_radius(T, eps);
    const kn::KernelSpec comp[3] = {
        {kn::KernelKind::OptSchrodingerization, T, eps, std::nullopt, 0.0},
        {kn::KernelKind::ImprovedLCHS, T, eps, 0.5, 0.0},
        {kn::KernelKind::OptLCHS, T, eps, std::nullopt, 0.0},
    };
    for (int i = 0; i < 3; ++i) {
      const double ri = kn::minimal_radius(comp[i], eps);
      pass = pass && r0 < ri;
      const double ratio = r0 / ri;  // should shrink as eps tightens
      if (step > 0) pass = pass && ratio < prev_ratio[i];
      prev_ratio[i] = ratio;
    }
    ++step;
  }
  detail += ", ratios decrease across eps in {1e-3,1e-6,1e-9}";
  h.report("C6 kernel truncation advantage", pass, detail);
}

// C7: sqrt(T) query scaling at fixed eps. Initial data rides mostly on the
// Neumann zero mode so the output norm, and with it the repetition count,
// stays fixed across the horizon sweep; only the selector cost moves.
void criterion_7(Harness& h) {
  const auto factor = ops::build_heat_neumann_1d(8);
  std::vector<double> log_t, log_q;
  for (double T : {1.0, 4.0, 16.0}) {
    kp::SimulationProblem p;
    p.factor = factor;
    p.u0 = Vector(factor.cols());
    const double mesh = factor.grid.mesh;
    for (Index i = 0; i < p.u0.size(); ++i)
      p.u0(i) = 1.0 + 0.9 * std::cos(M_PI * (i + 0.5) * mesh);
    p.T = T;
    p.eps = 1e-6;
    const auto report = kp::run(p, kp::RunRule::theorem_gl());
    log_t.push_back(std::log(T));
    log_q.push_back(std::log(static_cast<double>(report.queries.total_matrix_queries)));
  }
  const double slope = fit_slope(log_t, log_q);
  char buf[100];
  std::snprintf(buf, sizeof(buf), "slope=%.3f (in [0.4, 0.6])", slope);
  h.report("C7 sqrt(T) query scaling", slope >= 0.4 && slope <= 0.6, buf);
}

// C8: block-encoding identities on random factors
void criterion_8(Harness& h) {
  namespace kd = kannai::dilation;
  double worst = 0.0;
  std::uint64_t state = kannai::mix_seed(2718, 1);
  bool pass = true;
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 2 + trial;  // 2..7
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        m(i, j) = Complex(kannai::uniform_pm1(state), kannai::uniform_pm1(state));
    const auto factor = ops::make_custom_factor(m);
    const auto be_l = kd::unitary_completion(factor, 1.15 * factor.spectral_norm);
    const auto be_h = kd::build_ham_h(be_l);
    const int m_nodes = 2 + trial % 7;
    RealVector nodes(m_nodes);
    for (int j = 0; j < m_nodes; ++j) nodes(j) = 3.0 * kannai::uniform_pm1(state);
    if (nodes.cwiseAbs().maxCoeff() == 0.0) nodes(0) = 1.0;
    const auto sel = kd::build_selector_blockenc(nodes, be_h);
    for (double r : {be_l.block_residual(), be_h.block_residual(), sel.block_residual()}) {
      worst = std::max(worst, r);
      pass = pass && r <= 1e-10;
    }
  }
  char buf[100];
  std::snprintf(buf, sizeof(buf), "worst residual=%.2e (<=1e-10)", worst);
  h.report("C8 block-encoding algebra", pass, buf);
}

// C9: Strang splitting converges at second order
void criterion_9(Harness& h) {
  bool pass = true;
  std::string detail;

  Matrix jordan(2, 2);
  jordan << 1.0, 1.0, 0.0, 1.0;
  Matrix random8;
  {
    std::uint64_t state = kannai::mix_seed(424242, 3);
    Matrix g(8, 8), h2(8, 8);
    for (Index i = 0; i < 8; ++i)
      for (Index j = 0; j < 8; ++j)
        g(i, j) = Complex(kannai::uniform_pm1(state), kannai::uniform_pm1(state));
    for (Index i = 0; i < 8; ++i) {
      h2(i, i) = Complex(kannai::uniform_pm1(state), 0.0);
      for (Index j = i + 1; j < 8; ++j) {
        h2(i, j) = 0.4 * Complex(kannai::uniform_pm1(state), kannai::uniform_pm1(state));
        h2(j, i) = std::conj(h2(i, j));
      }
    }
    random8 = g.adjoint() * g / 8.0 + 0.1 * Matrix::Identity(8, 8) + Complex(0.0, 1.0) * h2;
  }

  int case_idx = 0;
  for (const Matrix& a : {jordan, random8}) {
    const auto pair = ke::cartesian_split(a);
    Vector u0 = Vector::Ones(a.rows());
    std::vector<double> lx, ly;
    for (int n : {4, 8, 16, 32}) {
      const auto res = ke::strang_simulate(pair, u0, 1.0, n, 1e-10);
      lx.push_back(std::log(1.0 / n));
      ly.push_back(std::log(res.error_vs_oracle));
    }
    const double slope = fit_slope(lx, ly);
    pass = pass && slope >= 1.8 && slope <= 2.2;
    detail += (case_idx++ == 0 ? "slope_2x2=" : ", slope_8x8=") +
              std::to_string(slope).substr(0, 5);
  }
  h.report("C9 Strang splitting order", pass, detail + " (2 +- 0.2)");
}

// C10: structured linear solver accuracy and kappa^{3/2} query scaling
void criterion_10(Harness& h) {
  const auto factor16 = ops::build_heat_gradient_1d(16);
  const Vector b16 = Vector::Ones(15);
  const auto single = ke::linear_solve_kannai(factor16, b16, 1e-4);
  bool pass = single.rel_error <= 1e-4;

  std::vector<double> lk, lq;
  for (int n : {4, 8, 16, 32}) {
    const auto factor = ops::build_heat_gradient_1d(n);
    const Matrix a = factor.normal_matrix();
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    // top-mode rhs scaled to a unit solution keeps the norm ratio order one,
    // which is the regime the kappa^{3/2} bound describes
    const Vector b = es.eigenvalues()(a.rows() - 1) * es.eigenvectors().col(a.rows() - 1);
    const auto res = ke::linear_solve_kannai(factor, b, 1e-4);
    pass = pass && res.rel_error <= 1e-4;
    lk.push_back(std::log(res.kappa));
    lq.push_back(std::log(static_cast<double>(res.queries.total_matrix_queries)));
  }
  const double slope = fit_slope(lk, lq);
  pass = pass && slope >= 1.3 && slope <= 1.7;
  char buf[140];
  std::snprintf(buf, sizeof(buf), "rel(n=16)=%.2e (<=1e-4), kappa-slope=%.3f (in [1.3,1.7])",
                single.rel_error, slope);
  h.report("C10 linear solver", pass, buf);
}

// C11: EPD closed forms
void criterion_11(Harness& h) {
  const auto factor = scalar_factor(2.0);
  const Vector u0 = Vector::Ones(1);
  bool pass = true;
  double worst = 0.0;
  for (double t : {0.5, 1.0, 2.0}) {
    const double v3 = ke::epd_solve(factor, u0, t, 3)(0).real();
    const double v2 = ke::epd_solve(factor, u0, t, 2)(0).real();
    const double e3 = std::fabs(v3 - std::sin(2.0 * t) / (2.0 * t));
    const double e2 = std::fabs(v2 - std::cyl_bessel_j(0.0, 2.0 * t));
    worst = std::max({worst, e3, e2});
    pass = pass && e3 <= 1e-6 && e2 <= 1e-6;
  }
  char buf[100];
  std::snprintf(buf, sizeof(buf), "worst abs err=%.2e (<=1e-6)", worst);
  h.report("C11 EPD closed forms", pass, buf);
}

// C12: transport-heat multipliers at <= 60 Hermite nodes per axis
void criterion_12(Harness& h) {
  ke::TransportRule rule;
  rule.hermite_nodes = 60;
  double worst = 0.0;
  for (double T : {0.1, 0.25}) {
    Vector y = Vector::Ones(18);  // 1D modes k = -9..8, covers |k| <= 8
    const Vector out = ke::transport_heat_average(y, T, 1, rule);
    for (Index idx = 0; idx < 18; ++idx) {
      const int k = idx < 9 ? static_cast<int>(idx) : static_cast<int>(idx) - 18;
      if (std::abs(k) > 8) continue;
      const double exact = std::exp(-4.0 * M_PI * M_PI * k * k * T);
      worst = std::max(worst, std::abs(out(idx) - Complex(exact, 0.0)));
    }
  }
  char buf[100];
  std::snprintf(buf, sizeof(buf), "worst abs err=%.2e (<=1e-8)", worst);
  h.report("C12 transport-heat multiplier", worst <= 1e-8, buf);
}

}  // namespace

int main() {
  Harness h;
  criterion_1(h);
  criterion_2(h);
  criterion_3(h);
  criterion_4(h);
  criterion_5(h);
  criterion_6(h);
  criterion_7(h);
  criterion_8(h);
  criterion_9(h);
  criterion_10(h);
  criterion_11(h);
  criterion_12(h);
  std::printf("%d of 12 criteria passed\n", 12 - h.failures);
  return h.failures == 0 ? 0 : 1;
}
