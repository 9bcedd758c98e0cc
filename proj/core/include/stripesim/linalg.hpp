#pragma once

#include <complex>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

namespace stripesim {

using cx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

/// Thrown when an input violates a mathematical precondition (non-PSD
/// covariance, nonpositive distance, ...).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an otherwise valid computation fails numerically
/// (singular system, bisection non-convergence, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deterministic RNG with circularly-symmetric complex Gaussian sampling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return unif_(engine_); }
  double gaussian() { return norm_(engine_); }

  /// Standard complex normal CN(0, 1): real and imaginary parts each
  /// have variance 1/2.
  cx cgaussian() {
    return cx(norm_(engine_) * k_inv_sqrt2, norm_(engine_) * k_inv_sqrt2);
  }

  CVec cgaussian_vec(Eigen::Index n) {
    CVec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cgaussian();
    return v;
  }

  CMat cgaussian_mat(Eigen::Index rows, Eigen::Index cols) {
    CMat m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = cgaussian();
    return m;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  static constexpr double k_inv_sqrt2 = 0.70710678118654752440;
  std::mt19937_64 engine_;
  std::normal_distribution<double> norm_{0.0, 1.0};
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

/// SplitMix64 step, used to derive independent per-trial seeds from a
/// master seed without consuming master RNG state.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index);

/// (A + A^H) / 2, discarding asymmetry from roundoff.
CMat hermitianize(const CMat& a);

bool is_hermitian(const CMat& a, double tol = 1e-12);

/// Eigenvalues must exceed -tol_scale * |trace| for the matrix to count
/// as PSD.
bool is_psd(const CMat& a, double tol_scale = 1e-10);

/// log2 det of a Hermitian positive definite matrix via Cholesky.
double logdet2(const CMat& a);

/// Hermitian square root A^{1/2} of a PSD matrix.
CMat sqrtm_psd(const CMat& a);

/// Hermitian inverse square root A^{-1/2}; requires positive definiteness.
CMat inv_sqrtm_pd(const CMat& a);

/// A^{-1/2} with eigenvalues clamped to rel_floor * max_eigenvalue, for
/// covariances whose small eigenvalues sit below the EVD's resolution.
/// Throws DomainError when the input is indefinite or nonpositive.
CMat inv_sqrtm_clamped(const CMat& a, double rel_floor = 1e-14);

/// Sample h ~ CN(0, R). Throws DomainError if R is not PSD.
CVec sample_cn(const CMat& r, Rng& rng);

}  // namespace stripesim
