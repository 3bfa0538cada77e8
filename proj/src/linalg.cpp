#include "cmsbudget/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "cmsbudget/errors.hpp"

namespace cmsbudget {

double spectral_norm(const Eigen::MatrixXcd& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  return svd.singularValues()(0);
}

double spectral_norm(const Eigen::MatrixXd& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues()(0);
}

bool is_symmetric(const Eigen::MatrixXd& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  if (a.rows() == 0) return true;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

double relative_error(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  const double ref = b.norm();
  return (a - b).norm() / std::max(ref, 1e-300);
}

ModalSolution solve_free_modes(const Eigen::MatrixXd& stiffness,
                               const Eigen::MatrixXd& mass) {
  const Eigen::Index n = mass.rows();
  ModalSolution out;
  if (n == 0) {
    out.omegas.resize(0);
    out.modes.resize(0, 0);
    return out;
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      stiffness, mass, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success) {
    throw EigenSolveFailure("generalized symmetric eigenproblem did not converge");
  }
  const Eigen::VectorXd lambda = solver.eigenvalues();
  out.modes = solver.eigenvectors();
  out.omegas.resize(n);
  const double lambda_max = lambda.cwiseAbs().maxCoeff();
  out.rigid_count = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    out.omegas(i) = std::sqrt(std::max(lambda(i), 0.0));
    // scale-free rigid classification: omega^2 < 1e-8 * max omega^2
    if (lambda_max == 0.0 || lambda(i) < 1e-8 * lambda_max) ++out.rigid_count;
  }
  return out;
}

}  // namespace cmsbudget
