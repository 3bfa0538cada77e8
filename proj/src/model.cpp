#include "cmsbudget/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <set>

#include "cmsbudget/errors.hpp"
#include "cmsbudget/parallel.hpp"

namespace cmsbudget {

namespace {

constexpr double kConditionWarn = 1e12;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error("model invariant violated: " + what);
}

}  // namespace

void SecondOrderModel::validate() const {
  const Eigen::Index n = mass.rows();
  require(mass.cols() == n, "mass not square");
  require(damping.rows() == n && damping.cols() == n, "damping dimensions");
  require(stiffness.rows() == n && stiffness.cols() == n, "stiffness dimensions");
  require(input_map.rows() == n, "input map row count");
  require(output_map.cols() == n, "output map column count");
  require(dof_labels.empty() || static_cast<Eigen::Index>(dof_labels.size()) == n,
          "dof label count");
  require(mass.allFinite() && damping.allFinite() && stiffness.allFinite() &&
              input_map.allFinite() && output_map.allFinite(),
          "non-finite entry");
  require(is_symmetric(mass), "mass not symmetric");
  require(is_symmetric(damping), "damping not symmetric");
  require(is_symmetric(stiffness), "stiffness not symmetric");
  if (n == 0) return;
  Eigen::LLT<Eigen::MatrixXd> llt(mass);
  require(llt.info() == Eigen::Success, "mass not positive definite");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(stiffness, Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, "stiffness eigensolve failed");
  const double kmax = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 0.0);
  require(es.eigenvalues()(0) >= -1e-8 * std::max(kmax, 1.0),
          "stiffness not positive semidefinite");
}

DofPartition DofPartition::from_boundary(Eigen::Index n, std::vector<Eigen::Index> boundary) {
  std::sort(boundary.begin(), boundary.end());
  boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());
  DofPartition p;
  p.boundary_indices = std::move(boundary);
  std::set<Eigen::Index> bset(p.boundary_indices.begin(), p.boundary_indices.end());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!bset.count(i)) p.internal_indices.push_back(i);
  }
  p.validate(n);
  return p;
}

void DofPartition::validate(Eigen::Index n) const {
  std::vector<char> seen(static_cast<size_t>(n), 0);
  auto mark = [&](const std::vector<Eigen::Index>& idx) {
    for (Eigen::Index i : idx) {
      if (i < 0 || i >= n) throw Error("partition index out of range");
      if (seen[static_cast<size_t>(i)]) throw Error("partition sets not disjoint");
      seen[static_cast<size_t>(i)] = 1;
    }
  };
  mark(internal_indices);
  mark(boundary_indices);
  for (char c : seen) {
    if (!c) throw Error("partition does not cover all DOF");
  }
}

FrequencyGrid::FrequencyGrid(std::vector<double> omegas_rad_s) : omegas_(std::move(omegas_rad_s)) {
  double prev = 0.0;
  for (double w : omegas_) {
    if (!(w > prev) || !std::isfinite(w)) {
      throw Error("frequency grid must be strictly increasing and positive");
    }
    prev = w;
  }
}

FrequencyGrid FrequencyGrid::linear_rad(double omega_max, int n) {
  if (!(omega_max > 0.0) || n < 1) throw Error("bad frequency grid spec");
  std::vector<double> w(static_cast<size_t>(n));
  for (int i = 1; i <= n; ++i) {
    w[static_cast<size_t>(i - 1)] = omega_max * static_cast<double>(i) / n;
  }
  return FrequencyGrid(std::move(w));
}

FrequencyGrid FrequencyGrid::linear_hz(double f_max_hz, int n) {
  return linear_rad(2.0 * std::numbers::pi * f_max_hz, n);
}

FrequencyGrid FrequencyGrid::log_hz(double f_min_hz, double f_max_hz, int n) {
  if (!(f_min_hz > 0.0) || !(f_max_hz > f_min_hz) || n < 2) {
    throw Error("bad log frequency grid spec");
  }
  std::vector<double> w(static_cast<size_t>(n));
  const double l0 = std::log10(f_min_hz);
  const double l1 = std::log10(f_max_hz);
  for (int i = 0; i < n; ++i) {
    const double f = std::pow(10.0, l0 + (l1 - l0) * i / (n - 1));
    w[static_cast<size_t>(i)] = 2.0 * std::numbers::pi * f;
  }
  return FrequencyGrid(std::move(w));
}

double FrequencyGrid::hz(Eigen::Index i) const {
  return omega(i) / (2.0 * std::numbers::pi);
}

namespace {

Eigen::MatrixXcd frf_direct_at(const SecondOrderModel& model, double omega, double* condition) {
  const Eigen::Index n = model.dof_count();
  if (n == 0) {
    if (condition) *condition = 1.0;
    return Eigen::MatrixXcd::Zero(model.output_count(), model.input_count());
  }
  Eigen::MatrixXcd dyn = (-omega * omega) * model.mass.cast<Complex>() +
                         Complex(0.0, omega) * model.damping.cast<Complex>() +
                         model.stiffness.cast<Complex>();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(dyn);
  const double rc = lu.rcond();
  const double cond = (rc > 0.0 && std::isfinite(rc)) ? 1.0 / rc
                                                      : std::numeric_limits<double>::infinity();
  if (condition) *condition = cond;
  if (!std::isfinite(cond) || cond > 1e15) {
    throw SingularDynamicStiffness(omega, cond);
  }
  const Eigen::MatrixXcd x = lu.solve(model.input_map.cast<Complex>());
  return model.output_map.cast<Complex>() * x;
}

/// Runs fn(i) for every grid index with the configured thread count; the first
/// exception (by grid index) is rethrown after the loop so parallel and serial
/// paths fail identically.
template <typename Fn>
void grid_parallel_for(Eigen::Index count, Fn&& fn) {
  std::vector<std::exception_ptr> errors(static_cast<size_t>(count));
  std::atomic<Eigen::Index> first_error{count};
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(parallel::threads())
#endif
  for (Eigen::Index i = 0; i < count; ++i) {
    try {
      fn(i);
    } catch (...) {
      errors[static_cast<size_t>(i)] = std::current_exception();
      Eigen::Index cur = first_error.load();
      while (i < cur && !first_error.compare_exchange_weak(cur, i)) {
      }
    }
  }
  const Eigen::Index idx = first_error.load();
  if (idx < count) std::rethrow_exception(errors[static_cast<size_t>(idx)]);
}

void warn_conditions(const FrequencyGrid& grid, const std::vector<double>& conds,
                     const char* which) {
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double c = conds[static_cast<size_t>(i)];
    if (std::isfinite(c) && c > kConditionWarn) {
      std::fprintf(stderr, "[warn] %s ill-conditioned at f=%.6g Hz (cond ~ %.3g)\n", which,
                   grid.hz(i), c);
    }
  }
}

}  // namespace

FrfSamples frf_direct(const SecondOrderModel& model, const FrequencyGrid& grid) {
  FrfSamples out{grid, std::vector<Eigen::MatrixXcd>(static_cast<size_t>(grid.size()))};
  std::vector<double> conds(static_cast<size_t>(grid.size()), 0.0);
  grid_parallel_for(grid.size(), [&](Eigen::Index i) {
    out.values[static_cast<size_t>(i)] =
        frf_direct_at(model, grid.omega(i), &conds[static_cast<size_t>(i)]);
  });
  warn_conditions(grid, conds, "dynamic stiffness");
  return out;
}

FrfSamples frf_direct_serial(const SecondOrderModel& model, const FrequencyGrid& grid) {
  FrfSamples out{grid, std::vector<Eigen::MatrixXcd>(static_cast<size_t>(grid.size()))};
  std::vector<double> conds(static_cast<size_t>(grid.size()), 0.0);
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    out.values[static_cast<size_t>(i)] =
        frf_direct_at(model, grid.omega(i), &conds[static_cast<size_t>(i)]);
  }
  warn_conditions(grid, conds, "dynamic stiffness");
  return out;
}

FrfSamples frf_modal(const SecondOrderModel& model, const FrequencyGrid& grid,
                     double damping_ratio) {
  const ModalSolution sol = solve_free_modes(model.stiffness, model.mass);
  const Eigen::Index n = model.dof_count();
  const Eigen::Index p = model.output_count();
  const Eigen::Index m = model.input_count();
  // modal input/output participation
  Eigen::MatrixXd f_phi = model.output_map * sol.modes;          // p x n
  Eigen::MatrixXd phi_b = sol.modes.transpose() * model.input_map;  // n x m
  FrfSamples out{grid, std::vector<Eigen::MatrixXcd>(static_cast<size_t>(grid.size()))};
  grid_parallel_for(grid.size(), [&](Eigen::Index gi) {
    const double w = grid.omega(gi);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(p, m);
    for (Eigen::Index l = 0; l < n; ++l) {
      const double wl = sol.omegas(l);
      const Complex den(wl * wl - w * w, 2.0 * damping_ratio * wl * w);
      h += (f_phi.col(l) * phi_b.row(l)).cast<Complex>() / den;
    }
    out.values[static_cast<size_t>(gi)] = h;
  });
  return out;
}

SecondOrderModel apply_modal_damping(const SecondOrderModel& model, double damping_ratio) {
  if (!(damping_ratio >= 0.0) || !(damping_ratio < 1.0)) {
    throw Error("modal damping ratio must satisfy 0 <= zeta < 1");
  }
  const ModalSolution sol = solve_free_modes(model.stiffness, model.mass);
  SecondOrderModel out = model;
  if (model.dof_count() == 0) return out;
  const Eigen::MatrixXd m_phi = model.mass * sol.modes;
  Eigen::MatrixXd c =
      m_phi * (2.0 * damping_ratio * sol.omegas.array()).matrix().asDiagonal() *
      m_phi.transpose();
  out.damping = 0.5 * (c + c.transpose());
  return out;
}

PartitionedBlocks partition_blocks(const SecondOrderModel& model,
                                   const DofPartition& partition) {
  const Eigen::Index n = model.dof_count();
  partition.validate(n);
  for (Eigen::Index i : partition.internal_indices) {
    if (model.input_map.row(i).cwiseAbs().maxCoeff() != 0.0) {
      throw NonBoundaryLoading(static_cast<long>(i), "input map B");
    }
    if (model.output_map.col(i).cwiseAbs().maxCoeff() != 0.0) {
      throw NonBoundaryLoading(static_cast<long>(i), "output map F");
    }
  }
  const auto& ii = partition.internal_indices;
  const auto& bb = partition.boundary_indices;
  auto block = [&](const Eigen::MatrixXd& a, const std::vector<Eigen::Index>& rows,
                   const std::vector<Eigen::Index>& cols) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(cols.size()));
    for (size_t r = 0; r < rows.size(); ++r) {
      for (size_t c = 0; c < cols.size(); ++c) {
        out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = a(rows[r], cols[c]);
      }
    }
    return out;
  };
  PartitionedBlocks out;
  out.partition = partition;
  out.m_ii = block(model.mass, ii, ii);
  out.m_ib = block(model.mass, ii, bb);
  out.m_bi = block(model.mass, bb, ii);
  out.m_bb = block(model.mass, bb, bb);
  out.c_ii = block(model.damping, ii, ii);
  out.c_ib = block(model.damping, ii, bb);
  out.c_bi = block(model.damping, bb, ii);
  out.c_bb = block(model.damping, bb, bb);
  out.k_ii = block(model.stiffness, ii, ii);
  out.k_ib = block(model.stiffness, ii, bb);
  out.k_bi = block(model.stiffness, bb, ii);
  out.k_bb = block(model.stiffness, bb, bb);
  out.b_b.resize(static_cast<Eigen::Index>(bb.size()), model.input_count());
  out.f_b.resize(model.output_count(), static_cast<Eigen::Index>(bb.size()));
  for (size_t r = 0; r < bb.size(); ++r) {
    out.b_b.row(static_cast<Eigen::Index>(r)) = model.input_map.row(bb[r]);
    out.f_b.col(static_cast<Eigen::Index>(r)) = model.output_map.col(bb[r]);
  }
  return out;
}

Eigen::MatrixXd partition_order(const Eigen::MatrixXd& a, const DofPartition& partition) {
  std::vector<Eigen::Index> order;
  order.reserve(partition.internal_indices.size() + partition.boundary_indices.size());
  order.insert(order.end(), partition.internal_indices.begin(), partition.internal_indices.end());
  order.insert(order.end(), partition.boundary_indices.begin(), partition.boundary_indices.end());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(order.size()),
                      static_cast<Eigen::Index>(order.size()));
  for (size_t r = 0; r < order.size(); ++r) {
    for (size_t c = 0; c < order.size(); ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = a(order[r], order[c]);
    }
  }
  return out;
}

}  // namespace cmsbudget
