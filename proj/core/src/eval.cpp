#include "stripesim/eval.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace stripesim {

std::string scheme_label(const SchemeOptions& opt) {
  std::string s = opt.combiner == Combiner::kMmse ? "mmse" : "mrc";
  s += opt.quantizer == QuantizerKind::kOpt ? "-opt" : "-naive";
  if (opt.hybrid == HybridMode::kProposed) s += "+hyb";
  if (opt.hybrid == HybridMode::kRandom) s += "+hybrand";
  return s;
}

namespace {

using CMatL =
    Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;
using RVecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

/// log2 det(signal + noise) - log2 det(noise), evaluated as
/// log2 det(I + D^{-1/2} E^H signal E D^{-1/2}) in the eigenbasis (E, D)
/// of `noise`. Algebraically identical, but nonnegative by construction
/// and stable under the covariance spreads the zero-allocation floor
/// introduces; extended precision keeps the re-evaluated fronthaul rate
/// on the constraint to well under 1e-6 bits.
double logdet_ratio(const CMat& signal, const CMat& noise, const char* who) {
  const CMatL nl = hermitianize(noise).cast<std::complex<long double>>();
  Eigen::SelfAdjointEigenSolver<CMatL> es(nl);
  if (es.info() != Eigen::Success)
    throw NumericalError(std::string(who) + ": eigendecomposition failed");
  const RVecL& ev = es.eigenvalues();
  const long double max_ev = ev.maxCoeff();
  if (max_ev <= 0.0L || ev.minCoeff() < -1e-9L * max_ev)
    throw DomainError(std::string(who) + ": noise covariance not PD");
  const long double floor = 1e-22L * max_ev;
  const Eigen::Index n = ev.size();
  RVecL inv_root(n);
  for (Eigen::Index i = 0; i < n; ++i)
    inv_root(i) = 1.0L / std::sqrt(std::max(ev(i), floor));
  CMatL wh = es.eigenvectors().adjoint() *
             hermitianize(signal).cast<std::complex<long double>>() *
             es.eigenvectors();
  wh = inv_root.asDiagonal() * wh * inv_root.asDiagonal();
  wh = 0.5L * (wh + wh.adjoint().eval());
  wh += CMatL::Identity(n, n);
  Eigen::SelfAdjointEigenSolver<CMatL> esw(wh, Eigen::EigenvaluesOnly);
  if (esw.info() != Eigen::Success)
    throw NumericalError(std::string(who) + ": eigendecomposition failed");
  long double acc = 0.0L;
  for (Eigen::Index i = 0; i < n; ++i)
    acc += std::log2(std::max(esw.eigenvalues()(i), floor));
  return std::max(0.0, static_cast<double>(acc));
}

}  // namespace

double fronthaul_rate(const CMat& G_hat, const CMat& Sigma_e,
                      const CMat& Sigma_x, const CMat& Omega) {
  const CMat signal =
      hermitianize(G_hat * Sigma_x * G_hat.adjoint() + Sigma_e - Omega);
  try {
    return logdet_ratio(signal, Omega, "fronthaul_rate");
  } catch (const NumericalError&) {
    throw DomainError("fronthaul_rate: singular quantization covariance");
  }
}

double sum_rate_lb(const std::vector<SideInfo>& side_infos,
                   const CMat& Sigma_x) {
  if (side_infos.empty())
    throw DomainError("sum_rate_lb: no side information");
  const Eigen::Index K = Sigma_x.rows();
  const Eigen::Index M = static_cast<Eigen::Index>(side_infos.size());
  CMat G_cp(M * K, K);
  CMat Sigma_cp = CMat::Zero(M * K, M * K);
  for (Eigen::Index m = 0; m < M; ++m) {
    if (side_infos[m].G_hat.rows() != K || side_infos[m].G_hat.cols() != K)
      throw DomainError("sum_rate_lb: dimension mismatch");
    G_cp.middleRows(m * K, K) = side_infos[m].G_hat;
    Sigma_cp.block(m * K, m * K, K, K) = side_infos[m].Sigma_e;
  }
  return logdet_ratio(G_cp * Sigma_x * G_cp.adjoint(), Sigma_cp,
                      "sum_rate_lb");
}

double per_ap_info(const CMat& G_hat, const CMat& Sigma_n, const CMat& Omega,
                   const CMat& Sigma_x) {
  return logdet_ratio(G_hat * Sigma_x * G_hat.adjoint(),
                      hermitianize(Sigma_n + Omega), "per_ap_info");
}

double cutset_bound(const Scenario& scenario, double C_F) {
  const int M = static_cast<int>(scenario.aps.size());
  if (M > 12)
    throw std::invalid_argument(
        "cutset_bound: subset enumeration unsupported beyond M = 12");
  const Eigen::Index K = scenario.Sigma_x.rows();
  const CMat Sx_root = sqrtm_psd(scenario.Sigma_x);

  // Per-stripe Gramian sum_i H^H Sigma_w^{-1} H; the mutual information
  // of any stripe subset is a K x K log-det over the summed Gramians.
  std::vector<CMat> stripe_gram(M, CMat::Zero(K, K));
  for (int m = 0; m < M; ++m) {
    for (const ApChannelState& ap : scenario.aps[m]) {
      Eigen::LLT<CMat> llt(ap.Sigma_w);
      if (llt.info() != Eigen::Success)
        throw NumericalError("cutset_bound: singular noise covariance");
      stripe_gram[m] += ap.H_hat.adjoint() * llt.solve(ap.H_hat);
    }
    stripe_gram[m] = hermitianize(stripe_gram[m]);
  }

  double best = std::numeric_limits<double>::infinity();
  for (unsigned subset = 0; subset < (1u << M); ++subset) {
    CMat gram = CMat::Zero(K, K);
    int wired = M;
    for (int m = 0; m < M; ++m) {
      if (subset & (1u << m)) {
        gram += stripe_gram[m];
        --wired;
      }
    }
    const double info =
        logdet2(CMat::Identity(K, K) +
                hermitianize(Sx_root * gram * Sx_root.adjoint()));
    best = std::min(best, C_F * wired + info);
  }
  return best;
}

std::pair<CMat, std::optional<CMat>> mrc_combiners(const CMat& H_hat,
                                                   bool has_predecessor) {
  if (!has_predecessor) return {H_hat, std::nullopt};
  return {H_hat, CMat::Identity(H_hat.cols(), H_hat.cols())};
}

CMat naive_fh(const CMat& G_hat, const CMat& Sigma_n, const CMat& Sigma_x,
              double C_F) {
  if (C_F <= 0.0) throw DomainError("naive_fh: C_F must be > 0");
  const Eigen::Index K = G_hat.rows();
  const CMat cov =
      hermitianize(G_hat * Sigma_x * G_hat.adjoint() + Sigma_n);
  const double denom = std::exp2(C_F / static_cast<double>(K)) - 1.0;
  CMat Omega = CMat::Zero(K, K);
  for (Eigen::Index k = 0; k < K; ++k)
    Omega(k, k) = cov(k, k).real() / denom;
  return Omega;
}

namespace {

ApStrategy design_ap(const CMat& H_hat, const CMat& Sigma_w,
                     const std::optional<SideInfo>& prev, const CMat& Sigma_x,
                     double C_F, const SchemeOptions& options, Rng& rng) {
  ApStrategy st;
  std::optional<CMat> V;
  if (options.combiner == Combiner::kMmse) {
    std::tie(st.U, V) = mmse_combiners(H_hat, Sigma_w, prev, Sigma_x);
  } else {
    std::tie(st.U, V) = mrc_combiners(H_hat, prev.has_value());
  }
  if (options.hybrid != HybridMode::kOff) {
    HybridCombiner h;
    h.U_A = options.hybrid == HybridMode::kProposed
                ? project_analog(st.U)
                : random_analog(static_cast<int>(st.U.rows()),
                                static_cast<int>(st.U.cols()), rng);
    h.U_D = fit_digital(st.U, h.U_A);
    h.U_hyb = h.U_A * h.U_D;
    st.U = h.U_hyb;
    st.hybrid = std::move(h);
  }
  st.V = V;
  const CMat G = update_effective_channel(st.U, V, H_hat, prev);
  st.Sigma_n = update_noise_cov(st.U, V, Sigma_w, prev);
  const Eigen::Index K = G.rows();
  if (options.quantizer == QuantizerKind::kOpt) {
    const QuantizerBasis basis =
        quantizer_eigenvalues(G, st.Sigma_n, Sigma_x);
    st.gamma_eig = basis.gamma_eig;
    std::tie(st.a, st.lambda) = solve_quantizer(basis.gamma_eig, C_F);
    if (st.a.minCoeff() > 0.0) {
      st.Omega = recover_omega(st.a, basis.U_eig, basis.N_white);
      st.Sigma_n_fwd = st.Sigma_n;
      st.side_info.G_hat = G;
    } else {
      // Zero-allocation directions are not transmitted: their quantizer
      // output is pure noise, independent of the signal, so it costs no
      // fronthaul bits and carries no information. A literal
      // near-infinite variance there compounds to ~1e9 per hop and
      // exhausts double precision by the third AP of a chain; realizing
      // the limit by projection keeps any chain length representable.
      Eigen::LLT<CMat> llt(basis.N_white);
      const CMat W_inv =
          llt.solve(CMat::Identity(K, K)) * basis.U_eig;  // unwhitening
      RVec dir_scale(K);
      for (Eigen::Index k = 0; k < K; ++k)
        dir_scale(k) = W_inv.col(k).squaredNorm();
      double live_ref = 0.0;
      for (Eigen::Index k = 0; k < K; ++k)
        if (st.a(k) > 0.0)
          live_ref = std::max(
              live_ref,
              dir_scale(k) * (st.gamma_eig(k) + 1.0 + 1.0 / st.a(k)));
      const double sentinel = k_dead_dir_headroom * live_ref;
      RVec omega_wh(K);
      RVec mask(K);
      for (Eigen::Index k = 0; k < K; ++k) {
        const bool live = st.a(k) > 0.0;
        mask(k) = live ? 1.0 : 0.0;
        omega_wh(k) = live ? 1.0 / st.a(k) : sentinel / dir_scale(k);
      }
      const CMat W = basis.U_eig.adjoint() * basis.N_white;
      st.T = W_inv * mask.asDiagonal() * W;
      st.Omega = hermitianize(W_inv * omega_wh.asDiagonal() * W_inv.adjoint());
      st.Sigma_n_fwd = hermitianize(*st.T * st.Sigma_n * st.T->adjoint());
      st.side_info.G_hat = *st.T * G;
    }
  } else {
    st.Omega = naive_fh(G, st.Sigma_n, Sigma_x, C_F);
    st.Sigma_n_fwd = st.Sigma_n;
    st.side_info.G_hat = G;
  }
  st.side_info.Sigma_e = hermitianize(st.Sigma_n_fwd + st.Omega);
  return st;
}

}  // namespace

InpStrategy design_network(const Scenario& scenario, double C_F,
                           const SchemeOptions& options, Rng& rng) {
  InpStrategy strategy;
  strategy.options = options;
  strategy.stripes.reserve(scenario.aps.size());
  for (const auto& stripe : scenario.aps) {
    std::vector<ApStrategy> designed;
    designed.reserve(stripe.size());
    std::optional<SideInfo> prev;
    for (const ApChannelState& ap : stripe) {
      ApStrategy st = design_ap(ap.H_hat, ap.Sigma_w, prev, scenario.Sigma_x,
                                C_F, options, rng);
      prev = st.side_info;
      designed.push_back(std::move(st));
    }
    strategy.stripes.push_back(std::move(designed));
  }
  return strategy;
}

RateReport evaluate(const Scenario& scenario, const InpStrategy& strategy,
                    double C_F) {
  RateReport report;
  report.scheme = scheme_label(strategy.options);
  std::vector<SideInfo> finals;
  for (const auto& stripe : strategy.stripes) {
    std::vector<double> fh_rates;
    std::vector<double> info_rates;
    for (const ApStrategy& ap : stripe) {
      fh_rates.push_back(fronthaul_rate(ap.side_info.G_hat,
                                        ap.side_info.Sigma_e,
                                        scenario.Sigma_x, ap.Omega));
      info_rates.push_back(per_ap_info(ap.side_info.G_hat, ap.Sigma_n_fwd,
                                       ap.Omega, scenario.Sigma_x));
      report.overhead_total += ap.side_info.overhead_reals();
    }
    report.per_ap_fh_rate.push_back(std::move(fh_rates));
    report.per_ap_info_rate.push_back(std::move(info_rates));
    finals.push_back(stripe.back().side_info);
  }
  report.sum_rate_lb = sum_rate_lb(finals, scenario.Sigma_x);
  report.cutset = cutset_bound(scenario, C_F);
  return report;
}

namespace {

/// Pseudo-inverse-based linear MMSE filter of x from r_CP; tolerates a
/// singular received covariance (noiseless chains).
CMat cp_mmse_filter(const CMat& G_cp, const CMat& Sigma_cp,
                    const CMat& Sigma_x) {
  const CMat cov =
      hermitianize(G_cp * Sigma_x * G_cp.adjoint() + Sigma_cp);
  Eigen::SelfAdjointEigenSolver<CMat> es(cov);
  const RVec ev = es.eigenvalues();
  const double tol = 1e-14 * std::max(ev.cwiseAbs().maxCoeff(), 1.0);
  RVec inv(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    inv(i) = std::abs(ev(i)) > tol ? 1.0 / ev(i) : 0.0;
  const CMat pinv =
      es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
  return pinv * G_cp * Sigma_x;  // filter applied as W^H r
}

}  // namespace

TransmissionStats simulate_transmission(const InpStrategy& strategy,
                                        const Scenario& scenario, Rng& rng,
                                        int n_symbols) {
  const Eigen::Index K = scenario.Sigma_x.rows();
  const Eigen::Index M = static_cast<Eigen::Index>(strategy.stripes.size());

  CMat G_cp(M * K, K);
  CMat Sigma_cp = CMat::Zero(M * K, M * K);
  for (Eigen::Index m = 0; m < M; ++m) {
    const SideInfo& si = strategy.stripes[m].back().side_info;
    G_cp.middleRows(m * K, K) = si.G_hat;
    Sigma_cp.block(m * K, m * K, K, K) = si.Sigma_e;
  }

  const CMat Sx_root = sqrtm_psd(scenario.Sigma_x);
  std::vector<std::vector<CMat>> w_roots(M), q_roots(M);
  for (Eigen::Index m = 0; m < M; ++m) {
    for (std::size_t i = 0; i < strategy.stripes[m].size(); ++i) {
      w_roots[m].push_back(sqrtm_psd(scenario.aps[m][i].Sigma_w));
      q_roots[m].push_back(sqrtm_psd(strategy.stripes[m][i].Omega));
    }
  }
  const CMat filter = cp_mmse_filter(G_cp, Sigma_cp, scenario.Sigma_x);

  TransmissionStats stats;
  stats.analytic_cov =
      hermitianize(G_cp * scenario.Sigma_x * G_cp.adjoint() + Sigma_cp);
  CMat acc = CMat::Zero(M * K, M * K);
  double mse_acc = 0.0;
  CVec r_cp(M * K);
  for (int s = 0; s < n_symbols; ++s) {
    const CVec x = Sx_root * rng.cgaussian_vec(K);
    for (Eigen::Index m = 0; m < M; ++m) {
      CVec r = CVec::Zero(K);
      for (std::size_t i = 0; i < strategy.stripes[m].size(); ++i) {
        const ApStrategy& ap = strategy.stripes[m][i];
        const CVec y = scenario.aps[m][i].H_hat * x +
                       w_roots[m][i] * rng.cgaussian_vec(w_roots[m][i].rows());
        CVec r_tilde = ap.U.adjoint() * y;
        if (ap.V) r_tilde += ap.V->adjoint() * r;
        if (ap.T) r_tilde = *ap.T * r_tilde;
        r = r_tilde + q_roots[m][i] * rng.cgaussian_vec(K);
      }
      r_cp.segment(m * K, K) = r;
    }
    acc += r_cp * r_cp.adjoint();
    mse_acc += (x - filter.adjoint() * r_cp).squaredNorm();
  }
  stats.empirical_cov = acc / n_symbols;
  stats.mse = mse_acc / n_symbols;
  return stats;
}

}  // namespace stripesim
