#pragma once

#include <string>
#include <vector>

#include "cmsbudget/linalg.hpp"

namespace cmsbudget {

/// Linear time-invariant second-order model
///   M q'' + C q' + K q = B u,   y = F q
/// with symmetric M (positive definite), C, K (positive semidefinite).
struct SecondOrderModel {
  Eigen::MatrixXd mass;        // n x n
  Eigen::MatrixXd damping;     // n x n
  Eigen::MatrixXd stiffness;   // n x n
  Eigen::MatrixXd input_map;   // n x m  (B)
  Eigen::MatrixXd output_map;  // p x n  (F)
  std::vector<std::string> dof_labels;

  Eigen::Index dof_count() const { return mass.rows(); }
  Eigen::Index input_count() const { return input_map.cols(); }
  Eigen::Index output_count() const { return output_map.rows(); }

  /// Checks symmetry (1e-12 relative), mass positive definiteness, stiffness
  /// positive semidefiniteness and map dimensions. Throws Error on violation.
  void validate() const;
};

/// Split of the DOF index range into internal and boundary sets.
struct DofPartition {
  std::vector<Eigen::Index> internal_indices;
  std::vector<Eigen::Index> boundary_indices;

  /// Boundary = given indices (ascending, deduplicated); internal = the rest.
  static DofPartition from_boundary(Eigen::Index n, std::vector<Eigen::Index> boundary);

  void validate(Eigen::Index n) const;
};

/// Strictly increasing positive angular frequencies (rad/s).
class FrequencyGrid {
 public:
  FrequencyGrid() = default;
  explicit FrequencyGrid(std::vector<double> omegas_rad_s);

  /// n points linearly spaced on (0, omega_max]: omega_max * i/n, i = 1..n.
  static FrequencyGrid linear_rad(double omega_max, int n);
  static FrequencyGrid linear_hz(double f_max_hz, int n);
  static FrequencyGrid log_hz(double f_min_hz, double f_max_hz, int n);

  Eigen::Index size() const { return static_cast<Eigen::Index>(omegas_.size()); }
  double omega(Eigen::Index i) const { return omegas_[static_cast<size_t>(i)]; }
  double hz(Eigen::Index i) const;
  const std::vector<double>& omegas() const { return omegas_; }

  bool operator==(const FrequencyGrid& other) const { return omegas_ == other.omegas_; }

 private:
  std::vector<double> omegas_;
};

/// One complex p x m matrix per grid point.
struct FrfSamples {
  FrequencyGrid grid;
  std::vector<Eigen::MatrixXcd> values;
};

/// Error dynamics share the sample layout of an FRF.
using ErrorSamples = FrfSamples;

/// 2x2 block views of a model in (internal, boundary) ordering.
struct PartitionedBlocks {
  DofPartition partition;
  Eigen::MatrixXd m_ii, m_ib, m_bi, m_bb;
  Eigen::MatrixXd c_ii, c_ib, c_bi, c_bb;
  Eigen::MatrixXd k_ii, k_ib, k_bi, k_bb;
  Eigen::MatrixXd b_b;  // n_b x m
  Eigen::MatrixXd f_b;  // p x n_b

  Eigen::Index internal_count() const { return m_ii.rows(); }
  Eigen::Index boundary_count() const { return m_bb.rows(); }
};

/// FRF by dense complex factorization of (-w^2 M + iwC + K) at each grid point.
/// Parallel over frequencies; a serial reference path is kept for testing.
FrfSamples frf_direct(const SecondOrderModel& model, const FrequencyGrid& grid);
FrfSamples frf_direct_serial(const SecondOrderModel& model, const FrequencyGrid& grid);

/// FRF by mass-normalized modal superposition with uniform modal damping.
FrfSamples frf_modal(const SecondOrderModel& model, const FrequencyGrid& grid,
                     double damping_ratio);

/// Replaces the damping matrix by M Phi diag(2 zeta w_l) Phi^T M.
SecondOrderModel apply_modal_damping(const SecondOrderModel& model, double damping_ratio);

/// Extracts the (internal, boundary) blocks. Throws NonBoundaryLoading if B or
/// F is supported on internal DOF.
PartitionedBlocks partition_blocks(const SecondOrderModel& model,
                                   const DofPartition& partition);

/// Full matrices reassembled in (internal, boundary) order from the blocks.
Eigen::MatrixXd partition_order(const Eigen::MatrixXd& a, const DofPartition& partition);

}  // namespace cmsbudget
