#pragma once

#include <Eigen/Dense>
#include <complex>

namespace cmsbudget {

using Complex = std::complex<double>;

/// Largest singular value.
double spectral_norm(const Eigen::MatrixXcd& a);
double spectral_norm(const Eigen::MatrixXd& a);

/// max |A - A^T| <= rel_tol * max(1, max |A|).
bool is_symmetric(const Eigen::MatrixXd& a, double rel_tol = 1e-12);

/// Relative Frobenius distance |a - b|_F / max(|b|_F, floor).
double relative_error(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

struct ModalSolution {
  Eigen::VectorXd omegas;  ///< rad/s, ascending, negatives clamped to 0
  Eigen::MatrixXd modes;   ///< mass-normalized columns (Phi^T M Phi = I)
  int rigid_count = 0;     ///< modes with omega^2 < 1e-8 * max omega^2
};

/// Full dense solution of (K - w^2 M) phi = 0 with M positive definite.
/// Throws EigenSolveFailure if the solver does not converge.
ModalSolution solve_free_modes(const Eigen::MatrixXd& stiffness,
                               const Eigen::MatrixXd& mass);

}  // namespace cmsbudget
