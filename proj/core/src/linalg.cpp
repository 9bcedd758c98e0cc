#include "stripesim/linalg.hpp"

#include <cmath>

namespace stripesim {

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

CMat hermitianize(const CMat& a) { return 0.5 * (a + a.adjoint()); }

bool is_hermitian(const CMat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_psd(const CMat& a, double tol_scale) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitianize(a),
                                         Eigen::EigenvaluesOnly);
  const double floor = -tol_scale * std::abs(a.trace().real());
  return es.eigenvalues().minCoeff() >= floor;
}

double logdet2(const CMat& a) {
  const CMat h = hermitianize(a);
  // Cholesky first: its pivots track graded matrices accurately.
  Eigen::LLT<CMat> llt(h);
  if (llt.info() == Eigen::Success) {
    double acc = 0.0;
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      acc += std::log(l(i, i).real());
    return 2.0 * acc / std::log(2.0);
  }
  // Baseline chains produce covariances whose eigenvalues span tens of
  // decades; Cholesky breaks down there while the spectrum itself is
  // still representable. Eigenvalues below the EVD's own resolution are
  // clamped to it.
  Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("logdet2: eigendecomposition failed");
  const RVec& ev = es.eigenvalues();
  const double max_ev = ev.maxCoeff();
  if (max_ev <= 0.0)
    throw NumericalError("logdet2: matrix is not positive definite");
  if (ev.minCoeff() < -1e-9 * max_ev)
    throw NumericalError("logdet2: matrix is not positive semidefinite");
  const double floor = 1e-18 * max_ev;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    acc += std::log(std::max(ev(i), floor));
  return acc / std::log(2.0);
}

namespace {

CMat eig_power(const CMat& a, double exponent, double min_eig_floor) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitianize(a));
  if (es.info() != Eigen::Success)
    throw NumericalError("eigendecomposition failed");
  RVec ev = es.eigenvalues();
  const double floor = -1e-10 * std::abs(a.trace().real());
  RVec powed(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < floor) throw DomainError("matrix is not PSD");
    double v = std::max(ev(i), min_eig_floor);
    powed(i) = (v == 0.0 && exponent > 0) ? 0.0 : std::pow(v, exponent);
  }
  return es.eigenvectors() * powed.asDiagonal() *
         es.eigenvectors().adjoint();
}

}  // namespace

CMat sqrtm_psd(const CMat& a) { return eig_power(a, 0.5, 0.0); }

CMat inv_sqrtm_pd(const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitianize(a),
                                         Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw DomainError("inv_sqrtm_pd: matrix is not positive definite");
  return eig_power(a, -0.5, 0.0);
}

CMat inv_sqrtm_clamped(const CMat& a, double rel_floor) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitianize(a));
  if (es.info() != Eigen::Success)
    throw NumericalError("inv_sqrtm_clamped: eigendecomposition failed");
  const RVec& ev = es.eigenvalues();
  const double max_ev = ev.maxCoeff();
  if (max_ev <= 0.0)
    throw DomainError("inv_sqrtm_clamped: matrix is not positive definite");
  if (ev.minCoeff() < -1e-9 * max_ev)
    throw DomainError("inv_sqrtm_clamped: matrix is indefinite");
  const double floor = rel_floor * max_ev;
  RVec inv_root(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    inv_root(i) = 1.0 / std::sqrt(std::max(ev(i), floor));
  return es.eigenvectors() * inv_root.asDiagonal() *
         es.eigenvectors().adjoint();
}

CVec sample_cn(const CMat& r, Rng& rng) {
  CMat root = sqrtm_psd(r);  // throws DomainError on non-PSD input
  return root * rng.cgaussian_vec(r.rows());
}

}  // namespace stripesim
