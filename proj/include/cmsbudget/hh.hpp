#pragma once

#include <string>

#include "cmsbudget/model.hpp"

namespace cmsbudget {

/// Mode sets and the reduction matrix of one component, rows in
/// (internal, boundary) order.
struct HhBasis {
  Eigen::MatrixXd static_constraint;  // n_i x n_b  (Psi)
  Eigen::MatrixXd rigid_modes;        // n x r, mass-normalized
  Eigen::MatrixXd elastic_modes;      // n x e, mass-normalized, ascending
  Eigen::MatrixXd uncoupled_elastic;  // n_i x e
  Eigen::MatrixXd inertia_relief;     // n_i x r
  Eigen::MatrixXd transformation;     // n x (r + e + n_b)
  Eigen::VectorXd eigenfrequencies;   // rad/s of the retained modes (r zeros, then elastic)

  Eigen::Index rigid_count() const { return inertia_relief.cols(); }
  Eigen::Index elastic_count() const { return uncoupled_elastic.cols(); }
  Eigen::Index boundary_count() const { return static_constraint.cols(); }
};

struct ReducedModel {
  SecondOrderModel model;  // dimension n_hat = r + e + n_b
  std::string component_id;
  double f_cut_hz = 0.0;
  int n_hat = 0;
};

struct FreeInterfaceModes {
  Eigen::MatrixXd rigid;    // n x r, partition-ordered rows
  Eigen::MatrixXd elastic;  // n x e, partition-ordered rows
  Eigen::VectorXd retained_omegas;  // rad/s (rigid first)
  Eigen::VectorXd all_omegas;       // full spectrum, ascending
  int rigid_count = 0;
};

struct HhReduction {
  HhBasis basis;
  ReducedModel reduced;
};

/// Psi = -K_ii^-1 K_ib.
Eigen::MatrixXd static_constraint_modes(const PartitionedBlocks& blocks);

/// Mass-normalized free-interface modes up to the cut-off (inclusive), split
/// into rigid and elastic sets, rows reordered to (internal, boundary).
FreeInterfaceModes free_interface_modes(const SecondOrderModel& model,
                                        const DofPartition& partition, double f_cut_hz);

/// Phi_ue = Phi_e,i - Psi Phi_e,b.
Eigen::MatrixXd uncoupled_elastic_modes(const Eigen::MatrixXd& elastic_modes,
                                        const Eigen::MatrixXd& psi);

/// Phi_ir = -K_ii^-1 (M_ib + M_ii Psi) Phi_r,b.
Eigen::MatrixXd inertia_relief_modes(const PartitionedBlocks& blocks,
                                     const Eigen::MatrixXd& psi,
                                     const Eigen::MatrixXd& rigid_modes);

/// T = [Phi_ir  Phi_ue  Psi; O  O  I]; throws RankDeficientBasis when the
/// numerical column rank drops (cut-off too high for n_i).
Eigen::MatrixXd build_transformation(const Eigen::MatrixXd& inertia_relief,
                                     const Eigen::MatrixXd& uncoupled_elastic,
                                     const Eigen::MatrixXd& psi, Eigen::Index n_b);

/// Full Hintz-Herting reduction of one component.
HhReduction reduce(const SecondOrderModel& model, const DofPartition& partition,
                   double f_cut_hz, const std::string& component_id = {});

/// E(iw) = H_reduced(iw) - H_reference(iw), pointwise on a shared grid.
ErrorSamples component_error(const FrfSamples& reference_frf, const FrfSamples& reduced_frf);

}  // namespace cmsbudget
