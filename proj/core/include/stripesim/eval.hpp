#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stripesim/hybrid.hpp"
#include "stripesim/inp.hpp"
#include "stripesim/scenario.hpp"

namespace stripesim {

enum class Combiner { kMmse, kMrc };
enum class QuantizerKind { kOpt, kNaive };
enum class HybridMode { kOff, kProposed, kRandom };

struct SchemeOptions {
  Combiner combiner = Combiner::kMmse;
  QuantizerKind quantizer = QuantizerKind::kOpt;
  HybridMode hybrid = HybridMode::kOff;
};

std::string scheme_label(const SchemeOptions& opt);

/// Designed per-AP strategy; gamma_eig/a/lambda are only populated for
/// the closed-form quantizer.
struct ApStrategy {
  CMat U;
  std::optional<CMat> V;
  CMat Omega;
  CMat Sigma_n;
  // Eigen-directions with zero allocation are not transmitted. T projects
  // the combined signal onto the transmitted directions before
  // quantization; absent when every direction gets a positive allocation.
  std::optional<CMat> T;
  CMat Sigma_n_fwd;  // T Sigma_n T^H, the noise actually forwarded
  SideInfo side_info;
  RVec gamma_eig;
  RVec a;
  double lambda = 0.0;
  std::optional<HybridCombiner> hybrid;
};

/// Full-network INP strategy, indexed [stripe][ap].
struct InpStrategy {
  std::vector<std::vector<ApStrategy>> stripes;
  SchemeOptions options;
};

struct RateReport {
  double sum_rate_lb = 0.0;  // bits per channel use
  std::vector<std::vector<double>> per_ap_fh_rate;    // f_FH,m,i
  std::vector<std::vector<double>> per_ap_info_rate;  // f_m,i
  double cutset = 0.0;
  std::string scheme;
  long overhead_total = 0;  // real values exchanged as side information
};

/// f_FH = log2 det(G Sx G^H + Sigma_e) - log2 det(Omega).
double fronthaul_rate(const CMat& G_hat, const CMat& Sigma_e,
                      const CMat& Sigma_x, const CMat& Omega);

/// log2 det(I + Sigma_eCP^{-1} G_CP Sx G_CP^H) with block-diagonal
/// stacking of the stripes' final side information.
double sum_rate_lb(const std::vector<SideInfo>& side_infos,
                   const CMat& Sigma_x);

/// f_mi = log2 det(I + (Sigma_n + Omega)^{-1} G Sx G^H). Omega may be
/// zero here.
double per_ap_info(const CMat& G_hat, const CMat& Sigma_n, const CMat& Omega,
                   const CMat& Sigma_x);

/// min over stripe subsets of C_F * (M - |S|) + I(x; {y in S}).
/// Supports M <= 12 (subset enumeration).
double cutset_bound(const Scenario& scenario, double C_F);

/// Untransmitted directions are handed downstream as pure quantization
/// noise at this factor above the largest transmitted variance: large
/// enough that a fixed identity combiner never resurrects them, small
/// enough that chained covariances stay well inside double precision.
inline constexpr double k_dead_dir_headroom = 1e8;

/// MRC baseline: U = H_hat, V = I (V omitted at the stripe head).
std::pair<CMat, std::optional<CMat>> mrc_combiners(const CMat& H_hat,
                                                   bool has_predecessor);

/// Equal per-element rate allocation: diagonal Omega with
/// d_k = [G Sx G^H + Sigma_n]_kk / (2^{C_F/K} - 1).
CMat naive_fh(const CMat& G_hat, const CMat& Sigma_n, const CMat& Sigma_x,
              double C_F);

/// Designs the whole network for one scheme. `rng` feeds the random
/// analog combiners only; it is unused for the other modes.
InpStrategy design_network(const Scenario& scenario, double C_F,
                           const SchemeOptions& options, Rng& rng);

/// Rates, fronthaul budget usage, cutset bound and signaling overhead
/// for a designed strategy.
RateReport evaluate(const Scenario& scenario, const InpStrategy& strategy,
                    double C_F);

struct TransmissionStats {
  CMat empirical_cov;  // of the CP's stacked received vector
  CMat analytic_cov;   // G_CP Sx G_CP^H + Sigma_eCP
  double mse = 0.0;    // empirical MSE of the CP's linear MMSE estimate
};

/// Samples the signal chain symbol by symbol: data, effective noise and
/// quantization noise drawn per AP, propagated along each stripe.
TransmissionStats simulate_transmission(const InpStrategy& strategy,
                                        const Scenario& scenario, Rng& rng,
                                        int n_symbols);

}  // namespace stripesim
