#include "handpose/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace handpose::linalg {

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

bool is_symmetric(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

double sym_condition_number(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(m), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd abs_ev = es.eigenvalues().cwiseAbs();
  const double lo = abs_ev.minCoeff();
  const double hi = abs_ev.maxCoeff();
  if (hi == 0.0) return std::numeric_limits<double>::infinity();
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

bool is_positive_semidefinite(const Eigen::MatrixXd& m, double tol) {
  if (!is_symmetric(m, 1e-8)) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(m), Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  return es.eigenvalues().minCoeff() >= -tol * scale;
}

bool is_positive_definite(const Eigen::MatrixXd& m) {
  if (!is_symmetric(m, 1e-8)) return false;
  Eigen::LLT<Eigen::MatrixXd> llt(symmetrized(m));
  return llt.info() == Eigen::Success;
}

namespace {

double rank_cutoff(const Eigen::JacobiSVD<Eigen::MatrixXd>& svd, const Eigen::MatrixXd& m) {
  const double eps = std::numeric_limits<double>::epsilon();
  const double smax = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  return std::max(m.rows(), m.cols()) * eps * smax;
}

}  // namespace

int numeric_rank(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const double cutoff = rank_cutoff(svd, m);
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > cutoff) ++rank;
  }
  return rank;
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double cutoff = rank_cutoff(svd, m);
  Eigen::VectorXd inv_sv = svd.singularValues();
  for (Eigen::Index i = 0; i < inv_sv.size(); ++i) {
    inv_sv(i) = inv_sv(i) > cutoff ? 1.0 / inv_sv(i) : 0.0;
  }
  return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
}

Eigen::MatrixXd null_space_basis(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const double cutoff = rank_cutoff(svd, m);
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > cutoff) ++rank;
  }
  return svd.matrixV().rightCols(m.cols() - rank);
}

Eigen::MatrixXd psd_sqrt_lower(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd sym = symmetrized(m);
  Eigen::LLT<Eigen::MatrixXd> llt(sym);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
}

}  // namespace handpose::linalg
