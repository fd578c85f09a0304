#include "kannai/common.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

namespace kannai {

const char* to_string(errc code) noexcept {
  switch (code) {
    case errc::degenerate_grid: return "DegenerateGrid";
    case errc::size_limit: return "SizeLimit";
    case errc::unsupported_grid: return "UnsupportedGrid";
    case errc::normalization_too_small: return "NormalizationTooSmall";
    case errc::numerical_breakdown: return "NumericalBreakdown";
    case errc::degenerate_selector: return "DegenerateSelector";
    case errc::invalid_time: return "InvalidTime";
    case errc::invalid_precision: return "InvalidPrecision";
    case errc::missing_parameter: return "MissingParameter";
    case errc::quadrature_failure: return "QuadratureFailure";
    case errc::root_finding_failure: return "RootFindingFailure";
    case errc::invalid_panel: return "InvalidPanel";
    case errc::invalid_perturbation: return "InvalidPerturbation";
    case errc::shape_error: return "ShapeError";
    case errc::plan_mismatch: return "PlanMismatch";
    case errc::degenerate_output: return "DegenerateOutput";
    case errc::bound_violation: return "BoundViolation";
    case errc::unstable_march: return "UnstableMarch";
    case errc::invalid_operator: return "InvalidOperator";
    case errc::singular_system: return "SingularSystem";
    case errc::not_dissipative: return "NotDissipative";
    case errc::not_normal: return "NotNormal";
    case errc::no_spectral_gap: return "NoSpectralGap";
    case errc::unsupported_dimension: return "UnsupportedDimension";
    case errc::log_domain_error: return "LogDomainError";
  }
  return "UnknownError";
}

Error::Error(errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(errc code, const std::string& message) { throw Error(code, message); }

Index dense_size_cap() {
  static const Index cap = [] {
    if (const char* env = std::getenv("KANNAI_SIZE_CAP")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v > 0) return static_cast<Index>(v);
    }
    return static_cast<Index>(1) << 14;
  }();
  return cap;
}

namespace {

// splitmix64; the whole noise model rides on this so it must not depend on
// std::uniform_real_distribution internals.
std::uint64_t next_u64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

double uniform_pm1(std::uint64_t& state) {
  const double u01 = static_cast<double>(next_u64(state) >> 11) * 0x1.0p-53;
  return 2.0 * u01 - 1.0;
}

double standard_normal(std::uint64_t& state) {
  double u1 = 0.0;
  do {
    u1 = static_cast<double>(next_u64(state) >> 11) * 0x1.0p-53;
  } while (u1 <= 0.0);
  const double u2 = static_cast<double>(next_u64(state) >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t s = seed ^ (0x5851f42d4c957f2dull * (counter + 1));
  (void)next_u64(s);
  return s;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix embed_middle(const Matrix& op, Index dx, Index dy, Index dz) {
  if (op.rows() != dx * dz || op.cols() != dx * dz)
    fail(errc::shape_error, "embed_middle: operator does not act on X (x) Z");
  Matrix out = Matrix::Zero(dx * dy * dz, dx * dy * dz);
  for (Index x1 = 0; x1 < dx; ++x1)
    for (Index z1 = 0; z1 < dz; ++z1)
      for (Index x2 = 0; x2 < dx; ++x2)
        for (Index z2 = 0; z2 < dz; ++z2) {
          const Complex v = op(x1 * dz + z1, x2 * dz + z2);
          if (v == Complex(0.0, 0.0)) continue;
          for (Index y = 0; y < dy; ++y)
            out((x1 * dy + y) * dz + z1, (x2 * dy + y) * dz + z2) = v;
        }
  return out;
}

Vector pairwise_sum(std::vector<Vector> terms) {
  if (terms.empty()) fail(errc::shape_error, "pairwise_sum: no terms");
  while (terms.size() > 1) {
    std::vector<Vector> next;
    next.reserve((terms.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < terms.size(); i += 2)
      next.push_back(terms[i] + terms[i + 1]);
    if (terms.size() % 2 == 1) next.push_back(terms.back());
    terms = std::move(next);
  }
  return terms.front();
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace kannai
