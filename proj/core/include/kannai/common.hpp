#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kannai {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Failure categories shared by all modules. Every throwing precondition
/// or runtime check maps to exactly one of these.
enum class errc {
  degenerate_grid,
  size_limit,
  unsupported_grid,
  normalization_too_small,
  numerical_breakdown,
  degenerate_selector,
  invalid_time,
  invalid_precision,
  missing_parameter,
  quadrature_failure,
  root_finding_failure,
  invalid_panel,
  invalid_perturbation,
  shape_error,
  plan_mismatch,
  degenerate_output,
  bound_violation,
  unstable_march,
  invalid_operator,
  singular_system,
  not_dissipative,
  not_normal,
  no_spectral_gap,
  unsupported_dimension,
  log_domain_error,
};

const char* to_string(errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message);
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] void fail(errc code, const std::string& message);

/// Hard cap on the dense dilated dimension; KANNAI_SIZE_CAP overrides the
/// default of 2^14. Read once per process.
Index dense_size_cap();

/// Deterministic uniform in [-1, 1) from a raw 64-bit generator state.
/// Distribution code is spelled out so streams are identical across
/// standard libraries.
double uniform_pm1(std::uint64_t& state);

/// Deterministic standard normal (Box-Muller on the same stream).
double standard_normal(std::uint64_t& state);

/// Seed expansion for per-node noise streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter);

Matrix kron(const Matrix& a, const Matrix& b);

/// Lifts `op`, acting on X (x) Z, to X (x) Y (x) Z with an identity in the
/// middle slot. `op` must be (dx*dz) x (dx*dz).
Matrix embed_middle(const Matrix& op, Index dx, Index dy, Index dz);

/// Numerically stable sum of n vectors in a fixed pairwise tree order.
Vector pairwise_sum(std::vector<Vector> terms);

/// Shortest-format-free, locale-free double formatting used by every CSV
/// writer (17 significant digits, byte-reproducible).
std::string format_double(double v);

}  // namespace kannai
