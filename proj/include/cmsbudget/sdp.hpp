#pragma once

#include <vector>

#include "cmsbudget/linalg.hpp"

namespace cmsbudget::sdp {

/// One diagonal placement of a variable inside the constraint matrix.
struct DiagonalEntry {
  Eigen::Index position;  // diagonal index in the d x d constraint
  double coeff = 1.0;
};

/// minimize c^T x  subject to  G(x) = G0 + sum_i x_i G_i >= eps*I,  x >= lb,
/// where every G_i is a real diagonal placement (one entry or an identity
/// sub-block) and G0 is Hermitian.
struct DiagonalLmiProblem {
  Eigen::VectorXd objective;                         // c
  Eigen::MatrixXcd constant_term;                    // G0, Hermitian d x d
  std::vector<std::vector<DiagonalEntry>> variables; // per-variable placements
  double strictness = 0.0;                           // eps
  Eigen::VectorXd lower_bounds;

  Eigen::Index variable_count() const { return objective.size(); }
  Eigen::Index dimension() const { return constant_term.rows(); }
  void validate() const;

  /// Constraint value at x (complex Hermitian, without the eps shift).
  Eigen::MatrixXcd constraint_at(const Eigen::VectorXd& x) const;
};

enum class SdpStatus { optimal, infeasible, max_iterations };

struct SdpSolution {
  Eigen::VectorXd x;
  double objective_value = 0.0;
  double min_eigenvalue = 0.0;  // of G(x)
  int iterations = 0;           // total Newton steps
  SdpStatus status = SdpStatus::max_iterations;
  double gap_estimate = 0.0;    // relative duality-gap estimate at exit
};

/// Realification [[Re H, -Im H], [Im H, Re H]]; duplicates the spectrum and
/// preserves positive definiteness both ways. Throws NotHermitian.
Eigen::MatrixXd embed_hermitian(const Eigen::MatrixXcd& h);

/// Two-phase log-det barrier interior-point method. `tol` is the relative
/// duality-gap target; `warm_start` skips Phase I when strictly feasible.
SdpSolution solve(const DiagonalLmiProblem& problem, double tol,
                  const Eigen::VectorXd* warm_start = nullptr);

/// Debug dump of a problem instance for offline inspection.
void dump_problem(const DiagonalLmiProblem& problem, const std::string& path);

}  // namespace cmsbudget::sdp
