#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace stripesim {

enum class Placement { kCircle, kSectorLShape };

/// All scenario scalars. Powers are linear milliwatts; C_F is bits per
/// channel use; angles are radians; distances are meters.
struct SystemConfig {
  int stripes = 2;           // M
  int aps_per_stripe = 4;    // L
  int antennas = 8;          // N per AP
  int ues = 4;               // K
  double fronthaul_bits = 8.0;       // C_F
  double tx_power_mw = 50.0;         // P_k, uniform across UEs
  double noise_power_mw = 3.1622776601683794e-9;  // -85 dBm
  double coverage_radius_m = 200.0;
  double ap_height_delta_m = 5.0;
  double angular_spread_rad = 0.2617993877991494;  // 15 degrees
  double antenna_spacing = 0.5;      // in wavelengths
  std::uint64_t seed = 1;
  int trials = 100;
  Placement placement = Placement::kSectorLShape;

  int total_aps() const { return stripes * aps_per_stripe; }

  /// Throws std::invalid_argument on any out-of-range field.
  void validate() const;
};

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

inline void SystemConfig::validate() const {
  auto fail = [](const std::string& msg) {
    throw std::invalid_argument("SystemConfig: " + msg);
  };
  if (stripes < 1) fail("stripes (M) must be >= 1");
  if (aps_per_stripe < 1) fail("aps_per_stripe (L) must be >= 1");
  if (antennas < 1) fail("antennas (N) must be >= 1");
  if (ues < 1) fail("ues (K) must be >= 1");
  if (antennas < ues)
    fail("antennas (N) must be >= ues (K) for full-rank combining");
  if (fronthaul_bits <= 0.0) fail("fronthaul_bits (C_F) must be > 0");
  if (tx_power_mw <= 0.0) fail("tx_power_mw must be > 0");
  if (noise_power_mw <= 0.0) fail("noise_power_mw must be > 0");
  if (coverage_radius_m <= 0.0) fail("coverage_radius_m must be > 0");
  if (angular_spread_rad <= 0.0) fail("angular_spread_rad must be > 0");
  if (antenna_spacing <= 0.0) fail("antenna_spacing must be > 0");
  if (trials < 1) fail("trials must be >= 1");
}

}  // namespace stripesim
