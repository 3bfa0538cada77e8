#include "cmsbudget/assembly.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>

#include "cmsbudget/errors.hpp"
#include "cmsbudget/parallel.hpp"

namespace cmsbudget {

namespace {

constexpr double kCouplingCondWarn = 1e13;

void default_warn(const std::string& message) {
  std::fprintf(stderr, "[warn] %s\n", message.c_str());
}

void check_signature(const Interconnection& coupling, const std::vector<FrfSamples>& frfs) {
  if (frfs.size() != coupling.signature.size()) {
    throw Error("coupled FRF: component count does not match signature");
  }
  for (size_t j = 0; j < frfs.size(); ++j) {
    if (frfs[j].values.empty()) continue;
    if (frfs[j].values[0].cols() != coupling.signature[j].inputs ||
        frfs[j].values[0].rows() != coupling.signature[j].outputs) {
      throw Error("coupled FRF: component '" + coupling.signature[j].id +
                  "' FRF dimensions do not match signature");
    }
    if (!(frfs[j].grid == frfs[0].grid)) {
      throw GridMismatch("component FRFs use different grids");
    }
  }
}

Eigen::MatrixXcd block_diag_frf(const Interconnection& coupling,
                                const std::vector<FrfSamples>& frfs, size_t grid_index) {
  const Eigen::Index p_b = coupling.p_b();
  const Eigen::Index m_b = coupling.m_b();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(p_b, m_b);
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  for (size_t j = 0; j < frfs.size(); ++j) {
    const Eigen::MatrixXcd& hj = frfs[j].values[grid_index];
    h.block(row, col, hj.rows(), hj.cols()) = hj;
    row += hj.rows();
    col += hj.cols();
  }
  return h;
}

Eigen::PartialPivLU<Eigen::MatrixXcd> factor_feedback(const Eigen::MatrixXcd& a, double omega,
                                                      double* condition) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  const double rc = lu.rcond();
  const double cond = (rc > 0.0 && std::isfinite(rc)) ? 1.0 / rc
                                                      : std::numeric_limits<double>::infinity();
  if (condition) *condition = cond;
  if (!std::isfinite(cond)) throw IllPosedInterconnection(omega, cond);
  return lu;
}

template <typename Fn>
void run_grid(Eigen::Index count, bool parallel_enabled, Fn&& fn) {
  std::vector<std::exception_ptr> errors(static_cast<size_t>(count));
  std::atomic<Eigen::Index> first_error{count};
  if (parallel_enabled) {
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
  } else {
    for (Eigen::Index i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[static_cast<size_t>(i)] = std::current_exception();
        if (i < first_error.load()) first_error.store(i);
      }
    }
  }
  const Eigen::Index idx = first_error.load();
  if (idx < count) std::rethrow_exception(errors[static_cast<size_t>(idx)]);
}

FrfSamples coupled_frf_impl(const Interconnection& coupling,
                            const std::vector<FrfSamples>& frfs, bool parallel_enabled) {
  coupling.validate();
  check_signature(coupling, frfs);
  if (frfs.empty()) throw Error("coupled FRF: no components");
  const FrequencyGrid& grid = frfs[0].grid;
  FrfSamples out{grid, std::vector<Eigen::MatrixXcd>(static_cast<size_t>(grid.size()))};
  std::vector<double> conds(static_cast<size_t>(grid.size()), 0.0);
  const Eigen::Index m_b = coupling.m_b();
  run_grid(grid.size(), parallel_enabled, [&](Eigen::Index i) {
    const Eigen::MatrixXcd h_b = block_diag_frf(coupling, frfs, static_cast<size_t>(i));
    const Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(m_b, m_b) -
                               coupling.k_bb.cast<Complex>() * h_b;
    auto lu = factor_feedback(a, grid.omega(i), &conds[static_cast<size_t>(i)]);
    out.values[static_cast<size_t>(i)] = coupling.k_cb.cast<Complex>() * h_b *
                                         lu.solve(coupling.k_bc.cast<Complex>());
  });
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double c = conds[static_cast<size_t>(i)];
    if (std::isfinite(c) && c > kCouplingCondWarn) {
      std::fprintf(stderr, "[warn] interconnection ill-conditioned at f=%.6g Hz (cond ~ %.3g)\n",
                   grid.hz(i), c);
    }
  }
  return out;
}

FrfSamples interconnection_transfer_impl(const Interconnection& coupling,
                                         const std::vector<FrfSamples>& frfs,
                                         bool parallel_enabled) {
  coupling.validate();
  check_signature(coupling, frfs);
  if (frfs.empty()) throw Error("interconnection transfer: no components");
  const FrequencyGrid& grid = frfs[0].grid;
  const Eigen::Index m_b = coupling.m_b();
  const Eigen::Index p_b = coupling.p_b();
  const Eigen::Index m_c = coupling.m_c();
  const Eigen::Index p_c = coupling.p_c();
  FrfSamples out{grid, std::vector<Eigen::MatrixXcd>(static_cast<size_t>(grid.size()))};
  run_grid(grid.size(), parallel_enabled, [&](Eigen::Index i) {
    const Eigen::MatrixXcd h_b = block_diag_frf(coupling, frfs, static_cast<size_t>(i));
    const Eigen::MatrixXcd kbb = coupling.k_bb.cast<Complex>();
    // (I - H_b K_bb) acts on u_b-side signals, (I - K_bb H_b) on y_b-side
    const Eigen::MatrixXcd a1 = Eigen::MatrixXcd::Identity(p_b, p_b) - h_b * kbb;
    const Eigen::MatrixXcd a2 = Eigen::MatrixXcd::Identity(m_b, m_b) - kbb * h_b;
    auto lu1 = factor_feedback(a1, grid.omega(i), nullptr);
    auto lu2 = factor_feedback(a2, grid.omega(i), nullptr);
    const Eigen::MatrixXcd a1_inv = lu1.inverse();
    Eigen::MatrixXcd n = Eigen::MatrixXcd::Zero(m_b + p_c, p_b + m_c);
    n.topLeftCorner(m_b, p_b) = kbb * a1_inv;
    n.topRightCorner(m_b, m_c) = lu2.solve(coupling.k_bc.cast<Complex>());
    n.bottomLeftCorner(p_c, p_b) = coupling.k_cb.cast<Complex>() * a1_inv;
    out.values[static_cast<size_t>(i)] = std::move(n);
  });
  return out;
}

}  // namespace

void Interconnection::validate() const {
  Eigen::Index m_sum = 0;
  Eigen::Index p_sum = 0;
  for (const auto& s : signature) {
    m_sum += s.inputs;
    p_sum += s.outputs;
  }
  if (k_bb.rows() != m_sum || k_bb.cols() != p_sum) {
    throw Error("interconnection: K_bb must be (sum m_j) x (sum p_j)");
  }
  if (k_bc.rows() != m_sum) throw Error("interconnection: K_bc row count");
  if (k_cb.cols() != p_sum) throw Error("interconnection: K_cb column count");
  if (!k_bb.allFinite() || !k_bc.allFinite() || !k_cb.allFinite()) {
    throw Error("interconnection: non-finite entry");
  }
}

void AssemblyModel::validate() const {
  coupling.validate();
  if (components.empty()) throw Error("assembly requires at least one component");
  if (components.size() != coupling.signature.size()) {
    throw Error("assembly component count does not match interconnection signature");
  }
  for (size_t j = 0; j < components.size(); ++j) {
    if (components[j].model.input_count() != coupling.signature[j].inputs ||
        components[j].model.output_count() != coupling.signature[j].outputs) {
      throw Error("component '" + components[j].id + "' channel counts do not match signature");
    }
  }
}

FrfSamples coupled_frf(const Interconnection& coupling,
                       const std::vector<FrfSamples>& component_frfs) {
  return coupled_frf_impl(coupling, component_frfs, true);
}

FrfSamples coupled_frf_serial(const Interconnection& coupling,
                              const std::vector<FrfSamples>& component_frfs) {
  return coupled_frf_impl(coupling, component_frfs, false);
}

FrfSamples coupled_frf(const AssemblyModel& assembly) {
  assembly.validate();
  std::vector<FrfSamples> frfs;
  frfs.reserve(assembly.components.size());
  for (const auto& comp : assembly.components) {
    frfs.push_back(frf_direct(comp.model, assembly.grid));
  }
  return coupled_frf(assembly.coupling, frfs);
}

SecondOrderModel monolithic_assemble(const AssemblyModel& assembly, const WarningSink& warn) {
  assembly.validate();
  const auto& comps = assembly.components;
  Eigen::Index n = 0;
  for (const auto& c : comps) n += c.model.dof_count();
  const Eigen::Index m_b = assembly.coupling.m_b();
  const Eigen::Index p_b = assembly.coupling.p_b();

  SecondOrderModel out;
  out.mass = Eigen::MatrixXd::Zero(n, n);
  out.damping = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd k_diag = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd b_all = Eigen::MatrixXd::Zero(n, m_b);
  Eigen::MatrixXd f_all = Eigen::MatrixXd::Zero(p_b, n);

  Eigen::Index row = 0;
  Eigen::Index bcol = 0;
  Eigen::Index frow = 0;
  for (const auto& c : comps) {
    const Eigen::Index nj = c.model.dof_count();
    out.mass.block(row, row, nj, nj) = c.model.mass;
    out.damping.block(row, row, nj, nj) = c.model.damping;
    k_diag.block(row, row, nj, nj) = c.model.stiffness;
    b_all.block(row, bcol, nj, c.model.input_count()) = c.model.input_map;
    f_all.block(frow, row, c.model.output_count(), nj) = c.model.output_map;
    for (const std::string& label : c.model.dof_labels) {
      out.dof_labels.push_back(c.id + "." + label);
    }
    row += nj;
    bcol += c.model.input_count();
    frow += c.model.output_count();
  }

  const Eigen::MatrixXd correction = b_all * assembly.coupling.k_bb * f_all;
  const double scale = std::max(1.0, correction.cwiseAbs().maxCoeff());
  if ((correction - correction.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    (warn ? warn : WarningSink(default_warn))(
        "asymmetric coupling: B K_bb F is not symmetric (non-physical spring set)");
  }
  out.stiffness = k_diag - 0.5 * (correction + correction.transpose());
  out.input_map = b_all * assembly.coupling.k_bc;
  out.output_map = assembly.coupling.k_cb * f_all;
  return out;
}

ErrorSamples assembly_error(const FrfSamples& full, const FrfSamples& reduced) {
  if (!(full.grid == reduced.grid)) {
    throw GridMismatch("assembly_error inputs use different grids");
  }
  ErrorSamples out{full.grid, {}};
  out.values.reserve(full.values.size());
  for (size_t i = 0; i < full.values.size(); ++i) {
    if (full.values[i].rows() != reduced.values[i].rows() ||
        full.values[i].cols() != reduced.values[i].cols()) {
      throw GridMismatch("assembly_error FRF dimensions differ");
    }
    out.values.push_back(reduced.values[i] - full.values[i]);
  }
  return out;
}

FrfSamples interconnection_transfer(const Interconnection& coupling,
                                    const std::vector<FrfSamples>& component_frfs) {
  return interconnection_transfer_impl(coupling, component_frfs, true);
}

FrfSamples interconnection_transfer_serial(const Interconnection& coupling,
                                           const std::vector<FrfSamples>& component_frfs) {
  return interconnection_transfer_impl(coupling, component_frfs, false);
}

}  // namespace cmsbudget
