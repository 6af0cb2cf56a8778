// Apache License, Version 2.0, refer to LICENSE.txt

#include "nggp/linalg.hh"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nggp {

Matrix cholesky_lower(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("Cholesky factorization failed: matrix is not "
                             "positive definite");
  }
  return llt.matrixL();
}

double log_det_from_cholesky(const Matrix& lower) {
  return 2.0 * lower.diagonal().array().log().sum();
}

double log_multivariate_gamma(double x, int dim) {
  double out = 0.25 * dim * (dim - 1) * std::log(std::numbers::pi);
  for (int j = 0; j < dim; ++j) out += boost::math::lgamma(x - 0.5 * j);
  return out;
}

Matrix sample_wishart(double dof, const Matrix& scale, Rng& rng) {
  const Eigen::Index d = scale.rows();
  Matrix lower = cholesky_lower(scale);
  Matrix bartlett = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    bartlett(i, i) = std::sqrt(rng.chi_squared(dof - static_cast<double>(i)));
    for (Eigen::Index j = 0; j < i; ++j) bartlett(i, j) = rng.normal();
  }
  Matrix la = lower * bartlett;
  return la * la.transpose();
}

Matrix sample_inverse_wishart(double dof, const Matrix& psi, Rng& rng) {
  Matrix psi_inv = psi.llt().solve(Matrix::Identity(psi.rows(), psi.cols()));
  Matrix w = sample_wishart(dof, psi_inv, rng);
  Matrix out = w.llt().solve(Matrix::Identity(w.rows(), w.cols()));
  return 0.5 * (out + out.transpose());
}

Vector sample_mvn(const Vector& mean, const Matrix& cov_lower, Rng& rng) {
  Vector z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return mean + cov_lower * z;
}

double log_wishart_density(const Matrix& x, double dof, const Matrix& scale) {
  const double d = static_cast<double>(x.rows());
  Matrix lx = cholesky_lower(x);
  Eigen::LLT<Matrix> ls(scale);
  double trace = ls.solve(x).trace();
  return 0.5 * (dof - d - 1.0) * log_det_from_cholesky(lx) - 0.5 * trace -
         0.5 * dof * d * std::numbers::ln2 -
         0.5 * dof * log_det_from_cholesky(ls.matrixL()) -
         log_multivariate_gamma(0.5 * dof, static_cast<int>(d));
}

double log_inverse_wishart_density(const Matrix& x, double dof,
                                   const Matrix& psi) {
  const double d = static_cast<double>(x.rows());
  Eigen::LLT<Matrix> lx(x);
  if (lx.info() != Eigen::Success) return -INFINITY;
  Matrix lp = cholesky_lower(psi);
  double trace = lx.solve(psi).trace();
  return 0.5 * dof * log_det_from_cholesky(lp) -
         0.5 * dof * d * std::numbers::ln2 -
         log_multivariate_gamma(0.5 * dof, static_cast<int>(d)) -
         0.5 * (dof + d + 1.0) * log_det_from_cholesky(lx.matrixL()) -
         0.5 * trace;
}

double log_mvn_density(const Vector& x, const Vector& mean, const Matrix& cov) {
  Matrix lower = cholesky_lower(cov);
  Vector z = lower.triangularView<Eigen::Lower>().solve(x - mean);
  const double d = static_cast<double>(x.size());
  return -0.5 * d * std::log(2.0 * std::numbers::pi) -
         0.5 * log_det_from_cholesky(lower) - 0.5 * z.squaredNorm();
}

}  // namespace nggp
