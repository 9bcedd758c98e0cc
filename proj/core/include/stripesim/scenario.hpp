#pragma once

#include <vector>

#include "stripesim/config.hpp"
#include "stripesim/linalg.hpp"

namespace stripesim {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// AP and UE positions plus per-AP array orientations. AP (m,i) is
/// stored at flat index m * L + i.
struct Geometry {
  std::vector<Point2> ap_positions;
  std::vector<Point2> ue_positions;
  std::vector<double> boresight;  // radians, toward the area center

  int ap_index(int stripe, int ap, int aps_per_stripe) const {
    return stripe * aps_per_stripe + ap;
  }
};

/// Channel state of one AP: true and estimated channels for every UE,
/// the covariance split R = R_hat + R_tilde, and the effective-noise
/// covariance used by the combiners.
struct ApChannelState {
  std::vector<CMat> R;       // N x N spatial covariance per UE
  std::vector<double> beta;  // large-scale fading, linear power
  CMat H;                    // N x K true channels, columns per UE
  CMat H_hat;                // N x K MMSE estimates
  std::vector<CMat> R_hat;   // estimate covariance per UE
  std::vector<CMat> R_tilde; // error covariance per UE
  CMat Sigma_w;              // N x N effective-noise covariance
};

/// One Monte-Carlo draw of the whole network: geometry plus the channel
/// state of every AP, indexed [stripe][ap].
struct Scenario {
  Geometry geometry;
  std::vector<std::vector<ApChannelState>> aps;
  CMat Sigma_x;  // K x K diagonal transmit covariance
};

/// Path-loss in dB at 3-D distance d (meters): -30.5 - 36.7 log10(d).
/// Throws DomainError for nonpositive distance.
double pathloss_db(double distance_3d_m);

/// UEs i.i.d. uniform on the coverage disk; APs on a surrounding circle
/// (M = 1) or split between each sector's radial spoke and arc (M >= 2).
Geometry place_network(const SystemConfig& config, Rng& rng);

/// Local-scattering spatial covariance for one (AP, UE) pair, evaluated
/// with Gauss-Hermite quadrature. Diagonal entries equal the large-scale
/// coefficient beta by construction.
CMat spatial_covariance(const Geometry& geom, int stripe, int ap, int ue,
                        const SystemConfig& config);

/// Gauss-Hermite evaluation of R(a,b) for given beta, nominal angle and
/// spread; exposed for direct testing against quadrature oracles.
CMat local_scattering_covariance(int antennas, double beta,
                                 double nominal_angle_rad,
                                 double angular_spread_rad,
                                 double antenna_spacing,
                                 int quadrature_order = 30);

/// h = R^{1/2} g with g ~ CN(0, I).
CVec sample_channel(const CMat& R, Rng& rng);

/// Simulates pilot training with K orthogonal pilots and applies the
/// per-UE linear MMSE estimator. Fills H_hat, R_hat, R_tilde, Sigma_w of
/// a state whose R, beta and H are already populated.
void estimate_channels(ApChannelState& state, const SystemConfig& config,
                       Rng& rng);

/// Full scenario draw: geometry, covariances, channels, estimates.
Scenario make_scenario(const SystemConfig& config, std::uint64_t seed);

}  // namespace stripesim
