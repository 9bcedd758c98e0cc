#include "stripesim/scenario.hpp"

#include <cmath>

namespace stripesim {

namespace {

constexpr double k_pi = 3.14159265358979323846;

struct Quadrature {
  RVec nodes;
  RVec weights;  // normalized so they sum to 1
};

/// Gauss-Hermite nodes/weights via the Golub-Welsch tridiagonal
/// eigenproblem, rescaled to integrate against a standard normal pdf.
Quadrature gauss_hermite_standard_normal(int order) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int i = 0; i + 1 < order; ++i) {
    const double off = std::sqrt((i + 1) / 2.0);
    jacobi(i, i + 1) = off;
    jacobi(i + 1, i) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  Quadrature q;
  q.nodes = std::sqrt(2.0) * es.eigenvalues();  // x = sqrt(2) t
  q.weights = es.eigenvectors().row(0).cwiseAbs2();
  q.weights /= q.weights.sum();
  return q;
}

double wrap_angle(double a) {
  while (a > k_pi) a -= 2.0 * k_pi;
  while (a < -k_pi) a += 2.0 * k_pi;
  return a;
}

}  // namespace

double pathloss_db(double distance_3d_m) {
  if (!(distance_3d_m > 0.0))
    throw DomainError("pathloss_db: distance must be positive");
  return -30.5 - 36.7 * std::log10(distance_3d_m);
}

Geometry place_network(const SystemConfig& config, Rng& rng) {
  config.validate();
  const int M = config.stripes;
  const int L = config.aps_per_stripe;
  const double R = config.coverage_radius_m;

  Geometry geom;
  geom.ue_positions.reserve(config.ues);
  for (int k = 0; k < config.ues; ++k) {
    const double radius = R * std::sqrt(rng.uniform());
    const double angle = 2.0 * k_pi * rng.uniform();
    geom.ue_positions.push_back(
        {radius * std::cos(angle), radius * std::sin(angle)});
  }

  geom.ap_positions.reserve(M * L);
  if (M == 1 || config.placement == Placement::kCircle) {
    for (int idx = 0; idx < M * L; ++idx) {
      const double angle = 2.0 * k_pi * idx / (M * L);
      geom.ap_positions.push_back({R * std::cos(angle), R * std::sin(angle)});
    }
  } else {
    // Each stripe owns a 2*pi/M sector: the first ceil(L/2) APs sit on
    // the sector's leading radial spoke (center excluded), the rest on
    // its arc.
    const double sector = 2.0 * k_pi / M;
    const int n_spoke = (L + 1) / 2;
    const int n_arc = L - n_spoke;
    for (int m = 0; m < M; ++m) {
      const double spoke_angle = m * sector;
      for (int j = 1; j <= n_spoke; ++j) {
        const double radius = R * j / n_spoke;
        geom.ap_positions.push_back(
            {radius * std::cos(spoke_angle), radius * std::sin(spoke_angle)});
      }
      for (int j = 1; j <= n_arc; ++j) {
        const double angle = spoke_angle + sector * j / (n_arc + 1);
        geom.ap_positions.push_back(
            {R * std::cos(angle), R * std::sin(angle)});
      }
    }
  }

  geom.boresight.reserve(M * L);
  for (const Point2& p : geom.ap_positions)
    geom.boresight.push_back(std::atan2(-p.y, -p.x));
  return geom;
}

CMat local_scattering_covariance(int antennas, double beta,
                                 double nominal_angle_rad,
                                 double angular_spread_rad,
                                 double antenna_spacing,
                                 int quadrature_order) {
  const Quadrature q = gauss_hermite_standard_normal(quadrature_order);
  CMat R = CMat::Zero(antennas, antennas);
  for (int a = 0; a < antennas; ++a) {
    R(a, a) = beta;
    for (int b = 0; b < a; ++b) {
      cx acc(0.0, 0.0);
      for (Eigen::Index i = 0; i < q.nodes.size(); ++i) {
        const double delta = angular_spread_rad * q.nodes(i);
        const double phase = 2.0 * k_pi * antenna_spacing * (a - b) *
                             std::sin(nominal_angle_rad + delta);
        acc += q.weights(i) * std::polar(1.0, phase);
      }
      R(a, b) = beta * acc;
      R(b, a) = std::conj(R(a, b));
    }
  }
  // Normalized weights make the diagonal exactly beta; anything else
  // means the quadrature itself broke down.
  for (int a = 0; a < antennas; ++a) {
    if (std::abs(R(a, a).real() - beta) > 1e-6 * beta)
      throw NumericalError("local_scattering_covariance: quadrature drift");
  }
  return R;
}

CMat spatial_covariance(const Geometry& geom, int stripe, int ap, int ue,
                        const SystemConfig& config) {
  const int idx = stripe * config.aps_per_stripe + ap;
  const Point2& p_ap = geom.ap_positions.at(idx);
  const Point2& p_ue = geom.ue_positions.at(ue);
  const double dx = p_ue.x - p_ap.x;
  const double dy = p_ue.y - p_ap.y;
  const double d2d = std::hypot(dx, dy);
  const double d3d = std::hypot(d2d, config.ap_height_delta_m);
  const double beta = std::pow(10.0, pathloss_db(d3d) / 10.0);
  const double phi =
      wrap_angle(std::atan2(dy, dx) - geom.boresight.at(idx));
  return local_scattering_covariance(config.antennas, beta, phi,
                                     config.angular_spread_rad,
                                     config.antenna_spacing);
}

CVec sample_channel(const CMat& R, Rng& rng) { return sample_cn(R, rng); }

void estimate_channels(ApChannelState& state, const SystemConfig& config,
                       Rng& rng) {
  const int N = config.antennas;
  const int K = config.ues;
  const double P = config.tx_power_mw;
  const double sigma_z2 = config.noise_power_mw;

  // Orthogonal pilots from the K-point DFT: phi_k^H phi_l = K delta_kl.
  CMat pilots(K, K);
  for (int t = 0; t < K; ++t)
    for (int k = 0; k < K; ++k)
      pilots(t, k) = std::polar(1.0, -2.0 * k_pi * t * k / K);

  CMat Yp = std::sqrt(sigma_z2) * rng.cgaussian_mat(N, K);
  for (int k = 0; k < K; ++k)
    Yp += std::sqrt(P) * state.H.col(k) * pilots.col(k).transpose();

  state.H_hat.resize(N, K);
  state.R_hat.assign(K, CMat());
  state.R_tilde.assign(K, CMat());
  state.Sigma_w = sigma_z2 * CMat::Identity(N, N);
  for (int k = 0; k < K; ++k) {
    const CMat& R = state.R[k];
    const CMat gram = P * K * R + sigma_z2 * CMat::Identity(N, N);
    Eigen::LLT<CMat> llt(gram);
    if (llt.info() != Eigen::Success)
      throw NumericalError("estimate_channels: singular training system");
    const CVec despread = Yp * pilots.col(k).conjugate() / std::sqrt(double(K));
    state.H_hat.col(k) = std::sqrt(P * K) * R * llt.solve(despread);
    state.R_hat[k] = hermitianize(P * K * R * llt.solve(R));
    state.R_tilde[k] = hermitianize(R - state.R_hat[k]);
    state.Sigma_w += P * state.R_tilde[k];
  }
  state.Sigma_w = hermitianize(state.Sigma_w);
}

Scenario make_scenario(const SystemConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  Scenario sc;
  sc.geometry = place_network(config, rng);
  sc.Sigma_x = config.tx_power_mw *
               CMat::Identity(config.ues, config.ues);
  sc.aps.assign(config.stripes,
                std::vector<ApChannelState>(config.aps_per_stripe));
  for (int m = 0; m < config.stripes; ++m) {
    for (int i = 0; i < config.aps_per_stripe; ++i) {
      ApChannelState& st = sc.aps[m][i];
      st.R.resize(config.ues);
      st.beta.resize(config.ues);
      st.H.resize(config.antennas, config.ues);
      for (int k = 0; k < config.ues; ++k) {
        st.R[k] = spatial_covariance(sc.geometry, m, i, k, config);
        st.beta[k] = st.R[k].trace().real() / config.antennas;
        st.H.col(k) = sample_channel(st.R[k], rng);
      }
      estimate_channels(st, config, rng);
    }
  }
  return sc;
}

}  // namespace stripesim
