#include "kannai/extensions.hpp"

#include <cmath>
#include <functional>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "kannai/kernels.hpp"
#include "kannai/propagator.hpp"
#include "kannai/reference.hpp"

namespace kannai::extensions {

namespace {

constexpr Complex kI{0.0, 1.0};

Matrix hermitian_function(const Matrix& h, const std::function<Complex(double)>& f) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) fail(errc::numerical_breakdown, "eigensolve failed");
  Vector fl(es.eigenvalues().size());
  for (Index k = 0; k < fl.size(); ++k) fl(k) = f(es.eigenvalues()(k));
  return es.eigenvectors() * fl.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

CartesianPair cartesian_split(const Matrix& a) {
  if (a.rows() != a.cols() || a.size() == 0) fail(errc::shape_error, "square matrix required");
  CartesianPair pair;
  pair.H1 = (a + a.adjoint()) / 2.0;
  pair.H2 = (a - a.adjoint()) / (2.0 * kI);

  Eigen::SelfAdjointEigenSolver<Matrix> es(pair.H1);
  if (es.info() != Eigen::Success) fail(errc::numerical_breakdown, "eigensolve failed");
  const double scale = std::max(a.norm(), 1e-300);
  if (es.eigenvalues().minCoeff() < -1e-10 * scale)
    fail(errc::not_dissipative, "Hermitian part has a negative eigenvalue");

  // factor L with L^d L = H1: Cholesky when safely definite, otherwise the
  // Hermitian square root through the spectrum
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = std::max(es.eigenvalues().maxCoeff(), 0.0);
  Matrix l_mat;
  if (lmin > 1e-12 * std::max(lmax, 1.0)) {
    Eigen::LLT<Matrix> llt(pair.H1);
    if (llt.info() == Eigen::Success) {
      l_mat = Matrix(llt.matrixU());
    }
  }
  if (l_mat.size() == 0) {
    Vector sq(es.eigenvalues().size());
    for (Index k = 0; k < sq.size(); ++k)
      sq(k) = std::sqrt(std::max(es.eigenvalues()(k), 0.0));
    l_mat = es.eigenvectors() * sq.asDiagonal() * es.eigenvectors().adjoint();
  }
  pair.L_fac = operators::make_custom_factor(std::move(l_mat));

  const Matrix c12 = pair.H1 * pair.H2 - pair.H2 * pair.H1;
  const Matrix c212 = pair.H2 * c12 - c12 * pair.H2;
  const Matrix c112 = pair.H1 * c12 - c12 * pair.H1;
  pair.Lambda = operators::operator_norm(c212) + operators::operator_norm(c112);
  const double h1n = operators::operator_norm(pair.H1);
  const double h2n = operators::operator_norm(pair.H2);
  pair.normal = c12.norm() <= 1e-10 * std::max(h1n * h2n, 1e-300) + 1e-14;
  return pair;
}

namespace {

/// Reusable e^{-H1 tau} applicator: one dilation spectrum and one
/// quadrature plan serve every substep.
struct KannaiStep {
  const dilation::DilationHamiltonian& h;
  quadrature::QuadraturePlan plan;
  quadrature::LcuCoefficients coeffs;

  KannaiStep(const dilation::DilationHamiltonian& dil, double tau, double eps) : h(dil) {
    const auto choice = quadrature::select_parameters(tau, h.norm(), eps);
    plan = quadrature::build_panel_grid(choice.R, choice.h1, choice.Q);
    coeffs = quadrature::coefficients(plan, tau, operators::TimeProfile::LinearInS);
  }

  Vector apply(const Vector& x) const {
    Vector psi = Vector::Zero(h.dim());
    psi.head(x.size()) = x;
    std::vector<Vector> terms;
    terms.reserve(plan.node_count());
    for (int j = 0; j < plan.node_count(); ++j)
      terms.push_back(coeffs.c(j) * propagator::evolve(h, plan.nodes(j), psi).vector);
    return pairwise_sum(std::move(terms)).head(x.size());
  }
};

}  // namespace

Vector simulate_normal(const CartesianPair& pair, const Vector& u0, double T, double eps) {
  if (!pair.normal) fail(errc::not_normal, "Cartesian parts do not commute");
  if (u0.size() != pair.H1.rows()) fail(errc::shape_error, "state dimension mismatch");
  const Matrix rot = hermitian_function(pair.H2, [T](double l) {
    return std::exp(-kI * Complex(l * T, 0.0));
  });
  const Vector phase = rot * u0;
  const auto h = dilation::hermitian_dilation(pair.L_fac);
  return KannaiStep(h, T, eps).apply(phase);
}

StrangResult strang_simulate(const CartesianPair& pair, const Vector& u0, double T, int n_steps,
                             double eps_step, StrangSubstep substep) {
  if (n_steps < 1) fail(errc::invalid_time, "need at least one splitting step");
  if (u0.size() != pair.H1.rows()) fail(errc::shape_error, "state dimension mismatch");
  const double tau = T / n_steps;

  const Matrix half = hermitian_function(pair.H2, [tau](double l) {
    return std::exp(-kI * Complex(l * tau / 2.0, 0.0));
  });
  const auto h = dilation::hermitian_dilation(pair.L_fac);
  Eigen::SelfAdjointEigenSolver<Matrix> es_h1(pair.H1);
  if (es_h1.info() != Eigen::Success) fail(errc::numerical_breakdown, "eigensolve failed");
  std::optional<KannaiStep> lcu;
  if (substep == StrangSubstep::KannaiLcu) lcu.emplace(h, tau, eps_step);

  Vector state = u0;
  for (int k = 0; k < n_steps; ++k) {
    state = half * state;
    if (lcu) {
      state = lcu->apply(state);
    } else {
      Vector c = es_h1.eigenvectors().adjoint() * state;
      for (Index i = 0; i < c.size(); ++i) c(i) *= std::exp(-es_h1.eigenvalues()(i) * tau);
      state = es_h1.eigenvectors() * c;
    }
    state = half * state;
  }

  const Matrix a = pair.H1 + kI * pair.H2;
  const Vector oracle = reference::dense_expm(Matrix(-a * T)) * u0;
  StrangResult out;
  out.state = state;
  out.error_vs_oracle = (state - oracle).norm() / std::max(oracle.norm(), 1e-300);
  out.steps = n_steps;
  out.tau = tau;
  return out;
}

SteadyStateResult longtime_steady(const operators::DiscreteFactor& factor, const Vector& f,
                                  double eps, std::optional<double> C_opt) {
  if (!(eps > 0.0 && eps < 1.0)) fail(errc::invalid_precision, "eps must lie in (0,1)");
  const Matrix a = factor.normal_matrix();
  if (f.size() != a.rows()) fail(errc::shape_error, "forcing dimension mismatch");

  reference::SemigroupOracle oracle(a);
  const double lambda0 = oracle.spectral_gap();
  if (lambda0 <= 1e-12 * std::max(oracle.norm(), 1.0))
    fail(errc::no_spectral_gap, "generator has no spectral gap");

  SteadyStateResult out;
  out.lambda0 = lambda0;

  if (f.norm() == 0.0) {
    out.u = Vector::Zero(a.rows());
    out.T_tilde = 0.0;
    out.C = 0.0;
    return out;
  }

  const Vector x_star = reference::direct_solve(a, f);
  // C >= ||u0 - A^{-1} f|| is all the contraction argument needs; doubling
  // the oracle norm keeps the contraction share strictly inside eps/2.
  // eps is a relative target, so the horizon works against eps ||x||.
  out.C = C_opt.value_or(2.0 * x_star.norm());
  if (out.C < x_star.norm())
    fail(errc::invalid_precision, "C must dominate the steady-state norm");
  out.T_tilde = std::log(out.C / (eps * x_star.norm())) / lambda0;

  // the LCU share is tightened so eps_int (||u0|| + T ||b||) <= eps ||x|| / 2
  double eps_int = eps * x_star.norm() / (2.0 * (out.T_tilde * f.norm()));
  eps_int = std::min(std::max(eps_int, 1e-13), 0.5 * eps);

  pipeline::SimulationProblem problem;
  problem.factor = factor;
  problem.u0 = Vector::Zero(factor.cols());
  problem.forcing = operators::ForcingVector{f, operators::ForcingSlot::WSlot,
                                             operators::TimeProfile::LinearInS};
  problem.T = out.T_tilde;
  problem.eps = eps_int;
  out.report = pipeline::run(problem, pipeline::RunRule::theorem_gl());
  out.u = out.report.u_h;
  return out;
}

LinearSolveResult linear_solve_kannai(const operators::DiscreteFactor& factor, const Vector& b,
                                      double eps) {
  const Matrix a = factor.normal_matrix();
  if (b.size() != a.rows()) fail(errc::shape_error, "rhs dimension mismatch");
  reference::SemigroupOracle oracle(a);
  const double lmin = oracle.spectral_gap();
  const double lmax = oracle.norm();
  if (lmin <= 1e-12 * std::max(lmax, 1.0)) fail(errc::singular_system, "matrix is singular");

  const double alpha = factor.spectral_norm * factor.spectral_norm;  // = ||A||
  operators::DiscreteFactor scaled = factor;
  scaled.matrix /= std::sqrt(alpha);
  scaled.spectral_norm = 1.0;
  scaled.kind = operators::FactorKind::Custom;

  LinearSolveResult out;
  out.kappa = lmax / lmin;
  auto steady = longtime_steady(scaled, Vector(b / alpha), eps);
  out.x_out = steady.u;
  out.T_tilde = steady.T_tilde;
  out.queries = steady.report.queries;
  const Vector x_direct = reference::direct_solve(a, b);
  out.rel_error = (out.x_out - x_direct).norm() / std::max(x_direct.norm(), 1e-300);
  return out;
}

Vector epd_solve(const operators::DiscreteFactor& factor, const Vector& u0, double t,
                 int dimension) {
  if (dimension < 2) fail(errc::unsupported_dimension, "EPD average needs d >= 2");
  if (!(t > 0.0)) fail(errc::invalid_time, "time must be positive");
  if (u0.size() != factor.cols()) fail(errc::shape_error, "state dimension mismatch");

  const auto h = dilation::hermitian_dilation(factor);
  Vector psi0 = Vector::Zero(h.dim());
  psi0.head(u0.size()) = u0;

  const double c_d = std::tgamma(dimension / 2.0) /
                     (std::sqrt(M_PI) * std::tgamma((dimension - 1) / 2.0));

  RealVector nodes, weights;
  if (dimension == 2) {
    // Gauss-Chebyshev absorbs the (1-l^2)^{-1/2} endpoint singularity
    const int m = 256;
    nodes = RealVector(m);
    weights = RealVector(m);
    for (int k = 0; k < m; ++k) {
      nodes(k) = std::cos((2.0 * k + 1.0) * M_PI / (2.0 * m));
      weights(k) = M_PI / m;
    }
  } else {
    // l = sin(theta) turns the weight into the analytic factor
    // cos^{d-2}(theta); composite Gauss-Legendre in theta is then spectral
    const auto rule = quadrature::gauss_legendre_reference(48);
    const int panels = 6;
    const int m = 48 * panels;
    nodes = RealVector(m);
    weights = RealVector(m);
    const double width = M_PI / panels;
    int idx = 0;
    for (int p = 0; p < panels; ++p) {
      const double a = -M_PI / 2.0 + p * width;
      for (int k = 0; k < 48; ++k) {
        const double theta = a + 0.5 * width * (rule.nodes(k) + 1.0);
        nodes(idx) = std::sin(theta);
        weights(idx) = 0.5 * width * rule.weights(k) *
                       std::pow(std::cos(theta), dimension - 2.0);
        ++idx;
      }
    }
  }

  std::vector<Vector> terms;
  terms.reserve(nodes.size());
  for (Index k = 0; k < nodes.size(); ++k) {
    const Vector w_snap = propagator::evolve(h, nodes(k) * t, psi0).vector.head(u0.size());
    terms.push_back((c_d * weights(k)) * w_snap);
  }
  return pairwise_sum(std::move(terms));
}

Vector transport_heat_average(const Vector& y0_hat, double T, int dimension,
                              const TransportRule& rule) {
  if (dimension < 1) fail(errc::unsupported_dimension, "dimension must be >= 1");
  if (T < 0.0) fail(errc::invalid_time, "negative horizon");
  Index n = 0;
  {
    const double guess = std::pow(static_cast<double>(y0_hat.size()), 1.0 / dimension);
    n = static_cast<Index>(std::llround(guess));
    Index total = 1;
    for (int k = 0; k < dimension; ++k) total *= n;
    if (total != y0_hat.size())
      fail(errc::shape_error, "coefficient vector is not an N^d grid");
  }
  if (T == 0.0) return y0_hat;

  const auto gh = quadrature::gauss_hermite_reference(rule.hermite_nodes);

  // per-axis multiplier for integer frequency k: substepped Gauss-Hermite
  // average of the transport phase, each substep within the resolvable band
  const auto axis_multiplier = [&](int k) -> double {
    if (k == 0) return 1.0;
    const double b_full = 4.0 * M_PI * std::fabs(static_cast<double>(k)) * std::sqrt(T);
    const int substeps =
        std::max(1, static_cast<int>(std::ceil(std::pow(b_full / rule.max_step_frequency, 2.0))));
    const double b = 4.0 * M_PI * std::fabs(static_cast<double>(k)) * std::sqrt(T / substeps);
    double step = 0.0;
    for (Index i = 0; i < gh.nodes.size(); ++i)
      step += gh.weights(i) * std::cos(b * gh.nodes(i));
    step /= std::sqrt(M_PI);
    return std::pow(step, substeps);
  };

  std::vector<double> cache(static_cast<std::size_t>(n), 0.0);
  std::vector<bool> have(static_cast<std::size_t>(n), false);
  const auto mult_for_index = [&](Index axis_idx) {
    if (!have[axis_idx]) {
      const int k = axis_idx < n / 2 ? static_cast<int>(axis_idx)
                                     : static_cast<int>(axis_idx - n);
      cache[axis_idx] = axis_multiplier(k);
      have[axis_idx] = true;
    }
    return cache[axis_idx];
  };

  Vector out(y0_hat.size());
  for (Index idx = 0; idx < y0_hat.size(); ++idx) {
    Index rest = idx;
    double m = 1.0;
    for (int axis = 0; axis < dimension; ++axis) {
      m *= mult_for_index(rest % n);
      rest /= n;
    }
    out(idx) = m * y0_hat(idx);
  }
  return out;
}

Vector hopf_cole_recover(const Vector& u, double nu) {
  if (!(nu > 0.0)) fail(errc::invalid_operator, "viscosity must be positive");
  Vector s(u.size());
  for (Index i = 0; i < u.size(); ++i) {
    if (!(u(i).real() > 0.0) || std::fabs(u(i).imag()) > 1e-10 * std::max(1.0, u(i).real()))
      fail(errc::log_domain_error, "Hopf-Cole needs strictly positive entries");
    s(i) = Complex(-2.0 * nu * std::log(u(i).real()), 0.0);
  }
  return s;
}

Vector translate_fourier(const Vector& coeffs, int dimension, const RealVector& shift) {
  if (dimension < 1) fail(errc::unsupported_dimension, "dimension must be >= 1");
  if (shift.size() != dimension) fail(errc::shape_error, "one shift per axis required");
  const double guess = std::pow(static_cast<double>(coeffs.size()), 1.0 / dimension);
  const Index n = static_cast<Index>(std::llround(guess));
  Index total = 1;
  for (int k = 0; k < dimension; ++k) total *= n;
  if (total != coeffs.size()) fail(errc::shape_error, "coefficient vector is not an N^d grid");

  Vector out(coeffs.size());
  for (Index idx = 0; idx < coeffs.size(); ++idx) {
    Index rest = idx;
    double phase = 0.0;
    for (int axis = dimension - 1; axis >= 0; --axis) {
      const Index ai = rest % n;
      const int k = ai < n / 2 ? static_cast<int>(ai) : static_cast<int>(ai - n);
      phase += 2.0 * M_PI * k * shift(axis);
      rest /= n;
    }
    out(idx) = coeffs(idx) * Complex(std::cos(phase), std::sin(phase));
  }
  return out;
}

}  // namespace kannai::extensions
