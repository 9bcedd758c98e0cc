#pragma once

#include <optional>
#include <vector>

#include "stripesim/linalg.hpp"

namespace stripesim {

/// The only message an AP forwards along its stripe during
/// optimization: the cumulative effective channel and the effective
/// noise covariance, 2K^2 real values in total.
struct SideInfo {
  CMat G_hat;    // K x K
  CMat Sigma_e;  // K x K Hermitian PD

  int overhead_reals() const {
    return 2 * static_cast<int>(G_hat.rows() * G_hat.cols());
  }
};

/// Per-AP outcome of the sequential design.
struct ApInpResult {
  CMat U;        // N x K combiner for the wireless input
  CMat V;        // K x K combiner for the fronthaul input (empty at AP 1)
  CMat Omega;    // K x K quantization-noise covariance
  CMat Sigma_n;  // K x K pre-quantization noise covariance
  RVec gamma_eig;  // descending nonnegative eigenvalues
  RVec a;          // nonnegative auxiliaries, omega_k = 1/a_k
  double lambda = 0.0;  // Lagrange multiplier of the rate constraint
  SideInfo side_info_out;
};

/// Result of the whitened eigen-analysis feeding the quantizer.
struct QuantizerBasis {
  RVec gamma_eig;  // descending, clamped to >= 0
  CMat U_eig;      // unitary eigenvectors, phase-fixed
  CMat N_white;    // Sigma_n^{-1/2}, Hermitian
};

/// Linear MMSE combiners for the stacked input [y; r_prev]. Without a
/// predecessor only U is produced.
std::pair<CMat, std::optional<CMat>> mmse_combiners(
    const CMat& H_hat, const CMat& Sigma_w,
    const std::optional<SideInfo>& prev, const CMat& Sigma_x);

/// G_hat_i = U^H H_hat + V^H G_hat_{i-1}.
CMat update_effective_channel(const CMat& U, const std::optional<CMat>& V,
                              const CMat& H_hat,
                              const std::optional<SideInfo>& prev);

/// Sigma_n = U^H Sigma_w U + V^H Sigma_e_prev V. Throws NumericalError
/// if the result is singular (rank-deficient combiners).
CMat update_noise_cov(const CMat& U, const std::optional<CMat>& V,
                      const CMat& Sigma_w,
                      const std::optional<SideInfo>& prev);

/// Whitens the effective signal covariance by Sigma_n^{-1/2} and
/// eigendecomposes it. Eigenvalues descend; each eigenvector's
/// largest-magnitude entry is rotated to the positive real axis.
QuantizerBasis quantizer_eigenvalues(const CMat& G_hat, const CMat& Sigma_n,
                                     const CMat& Sigma_x);

/// Closed-form per-eigenmode allocation with the multiplier bisected so
/// the fronthaul constraint holds with equality.
std::pair<RVec, double> solve_quantizer(const RVec& gamma_eig, double C_F);

/// Minimum a value substituted for zero allocations so Omega stays
/// positive definite. Directions with a = 0 are not transmitted; the
/// floor only realizes that limit with a finite matrix.
inline constexpr double k_quantizer_a_floor = 1e-9;

/// Omega = N^{-1} U_eig diag(1/a) U_eig^H N^{-H}.
CMat recover_omega(const RVec& a, const CMat& U_eig, const CMat& N_white,
                   double a_floor = k_quantizer_a_floor);

/// One AP's full design step: combiners, effective-channel and noise
/// updates, quantizer. This is the kernel shared by run_stripe and the
/// message-passing protocol.
ApInpResult design_ap_inp(const CMat& H_hat, const CMat& Sigma_w,
                          const std::optional<SideInfo>& prev,
                          const CMat& Sigma_x, double C_F);

/// Runs the full sequential design over one stripe's ordered AP states.
struct StripeInput {
  const CMat* H_hat;    // N x K
  const CMat* Sigma_w;  // N x N
};

std::pair<std::vector<ApInpResult>, SideInfo> run_stripe(
    const std::vector<StripeInput>& aps, const CMat& Sigma_x, double C_F);

}  // namespace stripesim
