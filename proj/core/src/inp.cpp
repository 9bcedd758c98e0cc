#include "stripesim/inp.hpp"

#include <cmath>
#include <string>

namespace stripesim {

std::pair<CMat, std::optional<CMat>> mmse_combiners(
    const CMat& H_hat, const CMat& Sigma_w,
    const std::optional<SideInfo>& prev, const CMat& Sigma_x) {
  const Eigen::Index N = H_hat.rows();
  const Eigen::Index K = H_hat.cols();

  if (!prev) {
    const CMat gram =
        hermitianize(H_hat * Sigma_x * H_hat.adjoint() + Sigma_w);
    Eigen::LLT<CMat> llt(gram);
    if (llt.info() != Eigen::Success)
      throw NumericalError("mmse_combiners: singular system matrix");
    return {llt.solve(H_hat * Sigma_x), std::nullopt};
  }

  CMat B(N + K, K);
  B.topRows(N) = H_hat;
  B.bottomRows(K) = prev->G_hat;
  CMat Sigma_wt = CMat::Zero(N + K, N + K);
  Sigma_wt.topLeftCorner(N, N) = Sigma_w;
  Sigma_wt.bottomRightCorner(K, K) = prev->Sigma_e;

  const CMat gram = hermitianize(B * Sigma_x * B.adjoint() + Sigma_wt);
  Eigen::LLT<CMat> llt(gram);
  if (llt.info() != Eigen::Success)
    throw NumericalError("mmse_combiners: singular system matrix");
  const CMat A = llt.solve(B * Sigma_x);
  return {A.topRows(N), A.bottomRows(K)};
}

CMat update_effective_channel(const CMat& U, const std::optional<CMat>& V,
                              const CMat& H_hat,
                              const std::optional<SideInfo>& prev) {
  CMat G = U.adjoint() * H_hat;
  if (prev && V) G += V->adjoint() * prev->G_hat;
  return G;
}

CMat update_noise_cov(const CMat& U, const std::optional<CMat>& V,
                      const CMat& Sigma_w,
                      const std::optional<SideInfo>& prev) {
  CMat Sigma_n = U.adjoint() * Sigma_w * U;
  if (prev && V) Sigma_n += V->adjoint() * prev->Sigma_e * (*V);
  Sigma_n = hermitianize(Sigma_n);
  // Long baseline chains produce graded covariances whose smallest
  // eigenvalues fall below the EVD's resolution; tolerate those, but
  // reject genuine rank deficiency of the stacked combiner.
  Eigen::SelfAdjointEigenSolver<CMat> es(Sigma_n, Eigen::EigenvaluesOnly);
  const double max_ev =
      es.info() == Eigen::Success ? es.eigenvalues().maxCoeff() : 0.0;
  if (max_ev <= 0.0 ||
      es.eigenvalues().minCoeff() < -1e-9 * max_ev) {
    const Eigen::Index K = U.cols();
    CMat stacked(U.rows() + (prev && V ? V->rows() : 0), K);
    stacked.topRows(U.rows()) = U;
    if (prev && V) stacked.bottomRows(V->rows()) = *V;
    Eigen::ColPivHouseholderQR<CMat> qr(stacked);
    if (qr.rank() < K)
      throw NumericalError(
          "update_noise_cov: singular noise covariance (rank-deficient "
          "combiners)");
    throw NumericalError("update_noise_cov: indefinite noise covariance");
  }
  return Sigma_n;
}

QuantizerBasis quantizer_eigenvalues(const CMat& G_hat, const CMat& Sigma_n,
                                     const CMat& Sigma_x) {
  QuantizerBasis basis;
  basis.N_white = inv_sqrtm_clamped(Sigma_n);
  const CMat whitened = hermitianize(basis.N_white * G_hat * Sigma_x *
                                     G_hat.adjoint() * basis.N_white.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(whitened);
  if (es.info() != Eigen::Success)
    throw NumericalError("quantizer_eigenvalues: EVD failed");

  const Eigen::Index K = whitened.rows();
  const double floor = -1e-10 * std::abs(whitened.trace().real());
  basis.gamma_eig.resize(K);
  basis.U_eig.resize(K, K);
  // Eigen returns ascending order; flip to descending and fix each
  // eigenvector's phase for reproducibility.
  for (Eigen::Index k = 0; k < K; ++k) {
    const Eigen::Index src = K - 1 - k;
    double ev = es.eigenvalues()(src);
    if (ev < floor)
      throw NumericalError("quantizer_eigenvalues: negative eigenvalue");
    basis.gamma_eig(k) = std::max(ev, 0.0);
    CVec vec = es.eigenvectors().col(src);
    Eigen::Index imax = 0;
    vec.cwiseAbs().maxCoeff(&imax);
    const double mag = std::abs(vec(imax));
    if (mag > 0.0) vec *= std::conj(vec(imax)) / mag;
    basis.U_eig.col(k) = vec;
  }
  return basis;
}

namespace {

RVec closed_form_a(const RVec& gamma, double lambda) {
  RVec a(gamma.size());
  for (Eigen::Index k = 0; k < gamma.size(); ++k)
    a(k) = std::max(
        (1.0 - 1.0 / (gamma(k) + 1.0)) / lambda - 1.0, 0.0);
  return a;
}

double constraint_bits(const RVec& gamma, const RVec& a) {
  double bits = 0.0;
  for (Eigen::Index k = 0; k < gamma.size(); ++k)
    bits += std::log2(1.0 + a(k) * (gamma(k) + 1.0));
  return bits;
}

}  // namespace

std::pair<RVec, double> solve_quantizer(const RVec& gamma_eig, double C_F) {
  const Eigen::Index K = gamma_eig.size();
  if (C_F <= 0.0) throw DomainError("solve_quantizer: C_F must be > 0");
  if (gamma_eig.minCoeff() < 0.0)
    throw DomainError("solve_quantizer: negative eigenvalue");

  if (gamma_eig.maxCoeff() == 0.0) {
    // No signal in any direction: the objective is identically zero, so
    // split the budget evenly.
    RVec a = RVec::Constant(K, std::exp2(C_F / K) - 1.0);
    return {a, 0.0};
  }

  double lo = 1e-12;  // constraint -> +inf as lambda -> 0
  double hi = 1.0;    // all a_k = 0, constraint = 0
  // Very large budgets can exceed the bits reachable at lambda = 1e-12;
  // widen the bracket downward until it straddles C_F.
  while (lo > 1e-300 &&
         constraint_bits(gamma_eig, closed_form_a(gamma_eig, lo)) < C_F)
    lo *= 1e-6;
  const double tol = 1e-9;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double bits = constraint_bits(gamma_eig, closed_form_a(gamma_eig, mid));
    if (std::abs(bits - C_F) < tol) {
      return {closed_form_a(gamma_eig, mid), mid};
    }
    if (bits > C_F)
      lo = mid;
    else
      hi = mid;
  }
  // The constraint is continuous and monotone on the bracket; at double
  // precision 200 halvings pin lambda, so residual tolerance failure
  // indicates a genuinely infeasible target.
  const double lambda = 0.5 * (lo + hi);
  const RVec a = closed_form_a(gamma_eig, lambda);
  if (std::abs(constraint_bits(gamma_eig, a) - C_F) < 1e-6)
    return {a, lambda};
  throw NumericalError("solve_quantizer: bisection did not converge");
}

CMat recover_omega(const RVec& a, const CMat& U_eig, const CMat& N_white,
                   double a_floor) {
  RVec omega(a.size());
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double ak = std::max(a(k), a_floor);
    omega(k) = 1.0 / ak;
  }
  Eigen::LLT<CMat> llt(N_white);
  // N_white is Hermitian PD; invert through its Cholesky factor.
  const CMat N_inv = llt.solve(CMat::Identity(N_white.rows(), N_white.cols()));
  return hermitianize(N_inv * U_eig * omega.asDiagonal() * U_eig.adjoint() *
                      N_inv.adjoint());
}

ApInpResult design_ap_inp(const CMat& H_hat, const CMat& Sigma_w,
                          const std::optional<SideInfo>& prev,
                          const CMat& Sigma_x, double C_F) {
  ApInpResult res;
  auto [U, V] = mmse_combiners(H_hat, Sigma_w, prev, Sigma_x);
  res.U = std::move(U);
  if (V) res.V = std::move(*V);
  const std::optional<CMat> V_opt =
      V ? std::optional<CMat>(res.V) : std::nullopt;
  const CMat G = update_effective_channel(res.U, V_opt, H_hat, prev);
  res.Sigma_n = update_noise_cov(res.U, V_opt, Sigma_w, prev);
  const QuantizerBasis basis = quantizer_eigenvalues(G, res.Sigma_n, Sigma_x);
  res.gamma_eig = basis.gamma_eig;
  std::tie(res.a, res.lambda) = solve_quantizer(basis.gamma_eig, C_F);
  res.Omega = recover_omega(res.a, basis.U_eig, basis.N_white);
  res.side_info_out.G_hat = G;
  res.side_info_out.Sigma_e = hermitianize(res.Sigma_n + res.Omega);
  return res;
}

std::pair<std::vector<ApInpResult>, SideInfo> run_stripe(
    const std::vector<StripeInput>& aps, const CMat& Sigma_x, double C_F) {
  if (aps.empty()) throw DomainError("run_stripe: empty stripe");

  std::vector<ApInpResult> results;
  results.reserve(aps.size());
  std::optional<SideInfo> prev;
  for (std::size_t i = 0; i < aps.size(); ++i) {
    try {
      ApInpResult res =
          design_ap_inp(*aps[i].H_hat, *aps[i].Sigma_w, prev, Sigma_x, C_F);
      prev = res.side_info_out;
      results.push_back(std::move(res));
    } catch (const std::exception& e) {
      throw NumericalError("run_stripe: AP " + std::to_string(i + 1) + ": " +
                           e.what());
    }
  }
  return {std::move(results), *prev};
}

}  // namespace stripesim
