#pragma once

#include "stripesim/linalg.hpp"

namespace stripesim {

/// Analog/digital factorization of a fully-digital combiner for APs
/// with K RF chains.
struct HybridCombiner {
  CMat U_A;    // N x K, unit-modulus entries
  CMat U_D;    // K x K
  CMat U_hyb;  // U_A * U_D
};

/// Entrywise projection onto the constant-modulus set: U(n,k)/|U(n,k)|.
/// Zero entries map to 1 (phase 0).
CMat project_analog(const CMat& U);

/// Least-squares digital stage: argmin ||U - U_A X||_F, i.e.
/// ((U_A)^H U_A)^{-1} (U_A)^H U. Throws NumericalError when U_A is
/// rank-deficient.
CMat fit_digital(const CMat& U, const CMat& U_A);

/// i.i.d. unit-modulus matrix with phases uniform on (-pi, pi).
CMat random_analog(int antennas, int ues, Rng& rng);

/// Projection + least-squares fit in one step.
HybridCombiner make_hybrid(const CMat& U_full);

}  // namespace stripesim
