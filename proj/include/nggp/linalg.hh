// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <Eigen/Dense>
#include <span>

#include "nggp/rng.hh"

namespace nggp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline Eigen::Map<const Vector> as_vector(std::span<const double> x) {
  return {x.data(), static_cast<Eigen::Index>(x.size())};
}

// Lower Cholesky factor; throws std::runtime_error if the matrix is not
// positive definite.
Matrix cholesky_lower(const Matrix& m);

double log_det_from_cholesky(const Matrix& lower);

// log Gamma_D(x), the multivariate log-gamma function.
double log_multivariate_gamma(double x, int dim);

// Wishart(dof, scale), mean dof * scale, via the Bartlett decomposition.
// Valid for real dof > dim - 1.
Matrix sample_wishart(double dof, const Matrix& scale, Rng& rng);

// Inverse-Wishart(dof, psi) with mean psi / (dof - dim - 1).
Matrix sample_inverse_wishart(double dof, const Matrix& psi, Rng& rng);

Vector sample_mvn(const Vector& mean, const Matrix& cov_lower, Rng& rng);

double log_wishart_density(const Matrix& x, double dof, const Matrix& scale);
double log_inverse_wishart_density(const Matrix& x, double dof,
                                   const Matrix& psi);
double log_mvn_density(const Vector& x, const Vector& mean, const Matrix& cov);

}  // namespace nggp
