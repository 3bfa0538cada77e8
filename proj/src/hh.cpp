#include "cmsbudget/hh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cmsbudget/errors.hpp"

namespace cmsbudget {

namespace {

Eigen::PartialPivLU<Eigen::MatrixXd> factor_internal_stiffness(const Eigen::MatrixXd& k_ii) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(k_ii);
  const double rc = lu.rcond();
  if (!(rc > 0.0) || !std::isfinite(rc) || 1.0 / rc > 1e14) {
    throw SingularInternalStiffness(rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity());
  }
  return lu;
}

}  // namespace

Eigen::MatrixXd static_constraint_modes(const PartitionedBlocks& blocks) {
  const Eigen::Index n_i = blocks.internal_count();
  const Eigen::Index n_b = blocks.boundary_count();
  if (n_i == 0) return Eigen::MatrixXd::Zero(0, n_b);
  auto lu = factor_internal_stiffness(blocks.k_ii);
  return -lu.solve(blocks.k_ib);
}

FreeInterfaceModes free_interface_modes(const SecondOrderModel& model,
                                        const DofPartition& partition, double f_cut_hz) {
  if (!(f_cut_hz > 0.0)) throw Error("free_interface_modes: cut-off must be positive");
  const ModalSolution sol = solve_free_modes(model.stiffness, model.mass);
  const double omega_cut = 2.0 * std::numbers::pi * f_cut_hz;
  const Eigen::Index n = model.dof_count();
  const Eigen::Index r = sol.rigid_count;
  Eigen::Index e = 0;
  while (r + e < n && sol.omegas(r + e) <= omega_cut) ++e;

  // partition-ordered row permutation (internal first, boundary after)
  std::vector<Eigen::Index> order;
  order.reserve(static_cast<size_t>(n));
  order.insert(order.end(), partition.internal_indices.begin(), partition.internal_indices.end());
  order.insert(order.end(), partition.boundary_indices.begin(), partition.boundary_indices.end());

  FreeInterfaceModes out;
  out.rigid_count = static_cast<int>(r);
  out.all_omegas = sol.omegas;
  out.rigid.resize(n, r);
  out.elastic.resize(n, e);
  for (Eigen::Index row = 0; row < n; ++row) {
    const Eigen::Index src = order[static_cast<size_t>(row)];
    out.rigid.row(row) = sol.modes.block(src, 0, 1, r);
    out.elastic.row(row) = sol.modes.block(src, r, 1, e);
  }
  out.retained_omegas.resize(r + e);
  out.retained_omegas.head(r) = sol.omegas.head(r);
  out.retained_omegas.tail(e) = sol.omegas.segment(r, e);
  return out;
}

Eigen::MatrixXd uncoupled_elastic_modes(const Eigen::MatrixXd& elastic_modes,
                                        const Eigen::MatrixXd& psi) {
  const Eigen::Index n_i = psi.rows();
  const Eigen::Index n_b = psi.cols();
  if (elastic_modes.rows() != n_i + n_b) {
    throw Error("uncoupled_elastic_modes: dimension mismatch");
  }
  return elastic_modes.topRows(n_i) - psi * elastic_modes.bottomRows(n_b);
}

Eigen::MatrixXd inertia_relief_modes(const PartitionedBlocks& blocks,
                                     const Eigen::MatrixXd& psi,
                                     const Eigen::MatrixXd& rigid_modes) {
  const Eigen::Index n_i = blocks.internal_count();
  const Eigen::Index n_b = blocks.boundary_count();
  const Eigen::Index r = rigid_modes.cols();
  if (r == 0 || n_i == 0) return Eigen::MatrixXd::Zero(n_i, r);
  if (rigid_modes.rows() != n_i + n_b) {
    throw Error("inertia_relief_modes: dimension mismatch");
  }
  auto lu = factor_internal_stiffness(blocks.k_ii);
  return -lu.solve((blocks.m_ib + blocks.m_ii * psi) * rigid_modes.bottomRows(n_b));
}

Eigen::MatrixXd build_transformation(const Eigen::MatrixXd& inertia_relief,
                                     const Eigen::MatrixXd& uncoupled_elastic,
                                     const Eigen::MatrixXd& psi, Eigen::Index n_b) {
  const Eigen::Index n_i = psi.rows();
  if (psi.cols() != n_b || inertia_relief.rows() != n_i || uncoupled_elastic.rows() != n_i) {
    throw Error("build_transformation: dimension mismatch");
  }
  const Eigen::Index r = inertia_relief.cols();
  const Eigen::Index e = uncoupled_elastic.cols();
  const Eigen::Index cols = r + e + n_b;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n_i + n_b, cols);
  // inertia-relief columns are ~omega_1^-2 in physical units; unit-normalizing
  // them is a coordinate rescaling (FRF-invariant) that keeps the reduced
  // matrices within floating-point range
  t.block(0, 0, n_i, r) = inertia_relief;
  for (Eigen::Index c = 0; c < r; ++c) {
    const double norm = t.col(c).norm();
    if (norm > 0.0) t.col(c) /= norm;
  }
  t.block(0, r, n_i, e) = uncoupled_elastic;
  t.block(0, r + e, n_i, n_b) = psi;
  t.block(n_i, r + e, n_b, n_b) = Eigen::MatrixXd::Identity(n_b, n_b);

  if (cols > 0) {
    // scale-invariant rank test: inertia-relief columns are ~omega_1^-2 smaller
    // than constraint columns in physical units, so normalize columns first
    Eigen::MatrixXd scaled = t;
    std::vector<long> zero_columns;
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double norm = scaled.col(c).norm();
      if (norm > 0.0) {
        scaled.col(c) /= norm;
      } else {
        zero_columns.push_back(static_cast<long>(c));
      }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled);
    const double smax = svd.singularValues()(0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
      if (svd.singularValues()(i) > 1e-10 * smax) ++rank;
    }
    if (rank < cols || !zero_columns.empty()) {
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
      std::vector<long> offending = zero_columns;
      const auto& perm = qr.colsPermutation().indices();
      for (Eigen::Index i = rank; i < cols; ++i) {
        offending.push_back(static_cast<long>(perm(i)));
      }
      std::sort(offending.begin(), offending.end());
      offending.erase(std::unique(offending.begin(), offending.end()), offending.end());
      throw RankDeficientBasis(static_cast<long>(rank), static_cast<long>(cols),
                               std::move(offending));
    }
  }
  return t;
}

HhReduction reduce(const SecondOrderModel& model, const DofPartition& partition,
                   double f_cut_hz, const std::string& component_id) {
  const PartitionedBlocks blocks = partition_blocks(model, partition);
  const Eigen::Index n_i = blocks.internal_count();
  const Eigen::Index n_b = blocks.boundary_count();

  HhReduction out;
  if (n_i == 0) {
    // all DOF are boundary: the reduction is the identity
    out.basis.static_constraint = Eigen::MatrixXd::Zero(0, n_b);
    out.basis.rigid_modes = Eigen::MatrixXd::Zero(n_b, 0);
    out.basis.elastic_modes = Eigen::MatrixXd::Zero(n_b, 0);
    out.basis.uncoupled_elastic = Eigen::MatrixXd::Zero(0, 0);
    out.basis.inertia_relief = Eigen::MatrixXd::Zero(0, 0);
    out.basis.transformation = Eigen::MatrixXd::Identity(n_b, n_b);
    out.basis.eigenfrequencies.resize(0);
  } else {
    out.basis.static_constraint = static_constraint_modes(blocks);
    FreeInterfaceModes modes = free_interface_modes(model, partition, f_cut_hz);
    out.basis.rigid_modes = std::move(modes.rigid);
    out.basis.elastic_modes = std::move(modes.elastic);
    out.basis.eigenfrequencies = std::move(modes.retained_omegas);
    out.basis.uncoupled_elastic =
        uncoupled_elastic_modes(out.basis.elastic_modes, out.basis.static_constraint);
    out.basis.inertia_relief =
        inertia_relief_modes(blocks, out.basis.static_constraint, out.basis.rigid_modes);
    out.basis.transformation =
        build_transformation(out.basis.inertia_relief, out.basis.uncoupled_elastic,
                             out.basis.static_constraint, n_b);
  }

  const Eigen::MatrixXd& t = out.basis.transformation;
  const Eigen::Index n = n_i + n_b;
  const Eigen::Index r = out.basis.rigid_count();
  const Eigen::Index e = out.basis.elastic_count();

  // partition-ordered full matrices
  Eigen::MatrixXd mp(n, n), cp(n, n), kp(n, n);
  mp << blocks.m_ii, blocks.m_ib, blocks.m_bi, blocks.m_bb;
  cp << blocks.c_ii, blocks.c_ib, blocks.c_bi, blocks.c_bb;
  kp << blocks.k_ii, blocks.k_ib, blocks.k_bi, blocks.k_bb;
  Eigen::MatrixXd bp(n, model.input_count());
  bp.topRows(n_i).setZero();
  bp.bottomRows(n_b) = blocks.b_b;
  Eigen::MatrixXd fp(model.output_count(), n);
  fp.leftCols(n_i).setZero();
  fp.rightCols(n_b) = blocks.f_b;

  SecondOrderModel red;
  Eigen::MatrixXd mh = t.transpose() * mp * t;
  Eigen::MatrixXd ch = t.transpose() * cp * t;
  Eigen::MatrixXd kh = t.transpose() * kp * t;
  red.mass = 0.5 * (mh + mh.transpose());
  red.damping = 0.5 * (ch + ch.transpose());
  red.stiffness = 0.5 * (kh + kh.transpose());
  red.input_map = t.transpose() * bp;
  red.output_map = fp * t;
  red.dof_labels.reserve(static_cast<size_t>(r + e + n_b));
  for (Eigen::Index i = 0; i < r; ++i) red.dof_labels.push_back("ir" + std::to_string(i));
  for (Eigen::Index i = 0; i < e; ++i) red.dof_labels.push_back("ue" + std::to_string(i));
  for (Eigen::Index i = 0; i < n_b; ++i) {
    const Eigen::Index src = blocks.partition.boundary_indices[static_cast<size_t>(i)];
    red.dof_labels.push_back(model.dof_labels.empty() ? "b" + std::to_string(src)
                                                      : model.dof_labels[static_cast<size_t>(src)]);
  }

  out.reduced.model = std::move(red);
  out.reduced.component_id = component_id;
  out.reduced.f_cut_hz = f_cut_hz;
  out.reduced.n_hat = static_cast<int>(r + e + n_b);
  return out;
}

ErrorSamples component_error(const FrfSamples& reference_frf, const FrfSamples& reduced_frf) {
  if (!(reference_frf.grid == reduced_frf.grid)) {
    throw GridMismatch("component_error inputs use different grids");
  }
  ErrorSamples out{reference_frf.grid, {}};
  out.values.reserve(reference_frf.values.size());
  for (size_t i = 0; i < reference_frf.values.size(); ++i) {
    if (reference_frf.values[i].rows() != reduced_frf.values[i].rows() ||
        reference_frf.values[i].cols() != reduced_frf.values[i].cols()) {
      throw GridMismatch("component_error FRF dimensions differ");
    }
    out.values.push_back(reduced_frf.values[i] - reference_frf.values[i]);
  }
  return out;
}

}  // namespace cmsbudget
