#include "stripesim/hybrid.hpp"

#include <cmath>

namespace stripesim {

namespace {
constexpr double k_pi = 3.14159265358979323846;
}

CMat project_analog(const CMat& U) {
  CMat A(U.rows(), U.cols());
  for (Eigen::Index j = 0; j < U.cols(); ++j) {
    for (Eigen::Index i = 0; i < U.rows(); ++i) {
      const double mag = std::abs(U(i, j));
      A(i, j) = mag > 0.0 ? U(i, j) / mag : cx(1.0, 0.0);
    }
  }
  return A;
}

CMat fit_digital(const CMat& U, const CMat& U_A) {
  const CMat gram = hermitianize(U_A.adjoint() * U_A);
  Eigen::LLT<CMat> llt(gram);
  if (llt.info() != Eigen::Success)
    throw NumericalError("fit_digital: rank-deficient analog matrix");
  return llt.solve(U_A.adjoint() * U);
}

CMat random_analog(int antennas, int ues, Rng& rng) {
  CMat A(antennas, ues);
  for (Eigen::Index j = 0; j < ues; ++j)
    for (Eigen::Index i = 0; i < antennas; ++i)
      A(i, j) = std::polar(1.0, (2.0 * rng.uniform() - 1.0) * k_pi);
  return A;
}

HybridCombiner make_hybrid(const CMat& U_full) {
  HybridCombiner h;
  h.U_A = project_analog(U_full);
  h.U_D = fit_digital(U_full, h.U_A);
  h.U_hyb = h.U_A * h.U_D;
  return h;
}

}  // namespace stripesim
