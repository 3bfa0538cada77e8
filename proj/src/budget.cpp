#include "cmsbudget/budget.hpp"

#include <atomic>
#include <cmath>
#include <random>

#include "cmsbudget/errors.hpp"
#include "cmsbudget/parallel.hpp"
#include "cmsbudget/sdp.hpp"

namespace cmsbudget {

namespace {

constexpr double kComparisonMargin = 1e-12;

struct ChannelLayout {
  Eigen::Index k = 0;
  Eigen::Index p_b = 0;  // sum p_j
  Eigen::Index m_b = 0;  // sum m_j
  Eigen::Index m_c = 0;
  Eigen::Index p_c = 0;
  std::vector<Eigen::Index> p_offset;  // per component, into the W-variable block
  std::vector<Eigen::Index> m_offset;  // per component, into the V-variable block

  Eigen::Index d1() const { return p_b + m_c; }  // W-side LMI block
  Eigen::Index d2() const { return m_b + p_c; }  // V-side LMI block
};

ChannelLayout make_layout(const std::vector<ComponentSignature>& signature, Eigen::Index m_c,
                          Eigen::Index p_c) {
  ChannelLayout lay;
  lay.k = static_cast<Eigen::Index>(signature.size());
  lay.m_c = m_c;
  lay.p_c = p_c;
  for (const auto& s : signature) {
    lay.p_offset.push_back(lay.p_b);
    lay.m_offset.push_back(lay.m_b);
    lay.p_b += s.outputs;
    lay.m_b += s.inputs;
  }
  return lay;
}

/// Inner SDP data for fixed (d_1..d_k, d_c): the LMI is linear in the
/// substituted diagonals X = W^-2/d and Y = V^-2 d.
sdp::DiagonalLmiProblem build_inner_problem(const Eigen::MatrixXcd& n_matrix,
                                            const Eigen::VectorXd& v_c,
                                            const Eigen::VectorXd& w_c,
                                            const ChannelLayout& lay,
                                            const std::vector<ComponentSignature>& signature,
                                            const Eigen::VectorXd& d, double d_c,
                                            const SynthesisOptions& opt) {
  const Eigen::Index d1 = lay.d1();
  const Eigen::Index d2 = lay.d2();
  const Eigen::Index dim = d1 + d2;
  sdp::DiagonalLmiProblem prob;
  prob.constant_term = Eigen::MatrixXcd::Zero(dim, dim);
  prob.constant_term.topRightCorner(d1, d2) = n_matrix.adjoint();
  prob.constant_term.bottomLeftCorner(d2, d1) = n_matrix;
  for (Eigen::Index i = 0; i < lay.m_c; ++i) {
    prob.constant_term(lay.p_b + i, lay.p_b + i) = 1.0 / (w_c(i) * w_c(i) * d_c);
  }
  for (Eigen::Index i = 0; i < lay.p_c; ++i) {
    prob.constant_term(d1 + lay.m_b + i, d1 + lay.m_b + i) = d_c / (v_c(i) * v_c(i));
  }

  const Eigen::Index s = lay.p_b + lay.m_b;
  prob.objective.resize(s);
  prob.lower_bounds.resize(s);
  prob.variables.resize(static_cast<size_t>(s));
  const double cap_sq_inv = 1.0 / (opt.weight_cap * opt.weight_cap);
  Eigen::Index var = 0;
  for (Eigen::Index j = 0; j < lay.k; ++j) {
    for (Eigen::Index i = 0; i < signature[static_cast<size_t>(j)].outputs; ++i, ++var) {
      prob.variables[static_cast<size_t>(var)] = {{lay.p_offset[static_cast<size_t>(j)] + i, 1.0}};
      prob.objective(var) = d(j);               // d_j tr X_j
      prob.lower_bounds(var) = cap_sq_inv / d(j);  // W <= cap
    }
  }
  for (Eigen::Index j = 0; j < lay.k; ++j) {
    for (Eigen::Index i = 0; i < signature[static_cast<size_t>(j)].inputs; ++i, ++var) {
      prob.variables[static_cast<size_t>(var)] = {
          {d1 + lay.m_offset[static_cast<size_t>(j)] + i, 1.0}};
      prob.objective(var) = 1.0 / d(j);          // tr Y_j / d_j
      prob.lower_bounds(var) = cap_sq_inv * d(j);  // V <= cap
    }
  }
  // strictness margin: tiny relative to the problem scale, but never beyond
  // what the fixed performance diagonal 1/(W_c V_c) can support at any d_c
  const double req_scale = 1.0 / (w_c.maxCoeff() * v_c.maxCoeff());
  prob.strictness = opt.strictness_factor * std::min(spectral_norm(n_matrix), req_scale);
  return prob;
}

struct FrequencyBudget {
  std::vector<Eigen::VectorXd> w;
  std::vector<Eigen::VectorXd> v;
  Eigen::VectorXd d;
  double d_c = 1.0;
  double lmi_min_eig = 0.0;
  double objective = 0.0;
  bool cap_active = false;
};

struct AlternationResult {
  Eigen::VectorXd x;  // inner SDP variables at the last solve
  Eigen::VectorXd d;  // scalings used in that solve
  double objective = 0.0;
  bool feasible = true;
};

AlternationResult alternate(const Eigen::MatrixXcd& n_matrix, const Eigen::VectorXd& v_c,
                            const Eigen::VectorXd& w_c, const ChannelLayout& lay,
                            const std::vector<ComponentSignature>& signature, double d_c,
                            const SynthesisOptions& opt) {
  AlternationResult res;
  Eigen::VectorXd d = Eigen::VectorXd::Ones(lay.k);  // deterministic init
  Eigen::VectorXd warm;
  double obj_prev = std::numeric_limits<double>::infinity();
  for (int round = 0; round < opt.alternation_max_rounds; ++round) {
    sdp::DiagonalLmiProblem prob =
        build_inner_problem(n_matrix, v_c, w_c, lay, signature, d, d_c, opt);
    if (warm.size() == prob.variable_count()) {
      // lower bounds move with d; a nudged warm start stays PSD-feasible
      warm = warm.cwiseMax(prob.lower_bounds * (1.0 + 1e-9));
    }
    sdp::SdpSolution sol =
        sdp::solve(prob, opt.sdp_tol, warm.size() == prob.variable_count() ? &warm : nullptr);
    if (sol.status == sdp::SdpStatus::infeasible) {
      res.feasible = false;
      return res;
    }
    warm = sol.x;
    res.x = sol.x;
    res.d = d;
    res.objective = sol.objective_value;

    // closed-form scaling update d_j <- sqrt(tr Y_j / tr X_j)
    Eigen::VectorXd d_next = d;
    for (Eigen::Index j = 0; j < lay.k; ++j) {
      const Eigen::Index pj = signature[static_cast<size_t>(j)].outputs;
      const Eigen::Index mj = signature[static_cast<size_t>(j)].inputs;
      const double tr_x = sol.x.segment(lay.p_offset[static_cast<size_t>(j)], pj).sum();
      const double tr_y = sol.x.segment(lay.p_b + lay.m_offset[static_cast<size_t>(j)], mj).sum();
      if (tr_x > 0.0 && tr_y > 0.0) d_next(j) = std::sqrt(tr_y / tr_x);
    }
    if (std::abs(res.objective - obj_prev) <=
        opt.alternation_tol * std::max(1.0, std::abs(res.objective))) {
      break;
    }
    obj_prev = res.objective;
    d = d_next;
  }
  return res;
}

FrequencyBudget synthesize_one(const Eigen::MatrixXcd& n_matrix, const Eigen::VectorXd& v_c,
                               const Eigen::VectorXd& w_c, const ChannelLayout& lay,
                               const std::vector<ComponentSignature>& signature,
                               const SynthesisOptions& opt, double f_hz) {
  // outer golden-section search on log10 d_c
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = opt.log10_dc_min;
  double b = opt.log10_dc_max;
  auto eval = [&](double log_dc) {
    AlternationResult r = alternate(n_matrix, v_c, w_c, lay, signature,
                                    std::pow(10.0, log_dc), opt);
    return r.feasible ? r.objective : std::numeric_limits<double>::infinity();
  };
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = eval(x1);
  double f2 = eval(x2);
  for (int it = 0; it < opt.golden_section_iters; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = eval(x2);
    }
  }
  const double log_dc = 0.5 * (a + b);
  const double d_c = std::pow(10.0, log_dc);
  AlternationResult best = alternate(n_matrix, v_c, w_c, lay, signature, d_c, opt);
  if (!best.feasible) throw InfeasibleAtFrequency(f_hz);

  // recover W = (d X)^(-1/2), V = (Y / d)^(-1/2)
  FrequencyBudget out;
  out.d = best.d;
  out.d_c = d_c;
  out.objective = best.objective;
  out.w.resize(static_cast<size_t>(lay.k));
  out.v.resize(static_cast<size_t>(lay.k));
  const double cap_floor = 1.0 / (opt.weight_cap * opt.weight_cap);
  for (Eigen::Index j = 0; j < lay.k; ++j) {
    const Eigen::Index pj = signature[static_cast<size_t>(j)].outputs;
    const Eigen::Index mj = signature[static_cast<size_t>(j)].inputs;
    Eigen::VectorXd wj(pj);
    for (Eigen::Index i = 0; i < pj; ++i) {
      const double x = best.x(lay.p_offset[static_cast<size_t>(j)] + i);
      wj(i) = 1.0 / std::sqrt(best.d(j) * x);
      if (best.d(j) * x <= cap_floor * (1.0 + 2e-3)) out.cap_active = true;
    }
    Eigen::VectorXd vj(mj);
    for (Eigen::Index i = 0; i < mj; ++i) {
      const double y = best.x(lay.p_b + lay.m_offset[static_cast<size_t>(j)] + i);
      vj(i) = 1.0 / std::sqrt(y / best.d(j));
      if (y / best.d(j) <= cap_floor * (1.0 + 2e-3)) out.cap_active = true;
    }
    out.w[static_cast<size_t>(j)] = std::move(wj);
    out.v[static_cast<size_t>(j)] = std::move(vj);
  }

  // certificate: smallest eigenvalue of the diagonally equilibrated LMI; the
  // congruence D^-1/2 G D^-1/2 preserves positivity and keeps the eigenvalue
  // meaningful when diagonal scales span many orders of magnitude
  sdp::DiagonalLmiProblem prob =
      build_inner_problem(n_matrix, v_c, w_c, lay, signature, best.d, d_c, opt);
  Eigen::MatrixXcd g = prob.constraint_at(best.x);
  Eigen::VectorXd scale = g.diagonal().real().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  g = scale.asDiagonal() * g * scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
  out.lmi_min_eig = es.eigenvalues()(0);
  return out;
}

ComponentBudget synthesize_impl(const FrfSamples& n_samples, const AssemblyRequirement& req,
                                const std::vector<ComponentSignature>& signature,
                                const SynthesisOptions& opt, bool parallel_enabled) {
  req.validate();
  if (!(n_samples.grid == req.grid)) {
    throw GridMismatch("N samples and requirement use different grids");
  }
  if (signature.empty()) throw Error("synthesize_budgets: no components");
  const Eigen::Index m_c = req.w_c.empty() ? 0 : req.w_c[0].size();
  const Eigen::Index p_c = req.v_c.empty() ? 0 : req.v_c[0].size();
  const ChannelLayout lay = make_layout(signature, m_c, p_c);
  for (const auto& n : n_samples.values) {
    if (n.rows() != lay.d2() || n.cols() != lay.d1()) {
      throw Error("synthesize_budgets: N dimensions do not match the channel layout");
    }
  }

  const Eigen::Index count = n_samples.grid.size();
  std::vector<FrequencyBudget> per_freq(static_cast<size_t>(count));
  std::vector<std::exception_ptr> errors(static_cast<size_t>(count));
  std::atomic<Eigen::Index> first_error{count};
  auto body = [&](Eigen::Index i) {
    try {
      per_freq[static_cast<size_t>(i)] = synthesize_one(
          n_samples.values[static_cast<size_t>(i)], req.v_c[static_cast<size_t>(i)],
          req.w_c[static_cast<size_t>(i)], lay, signature, opt, n_samples.grid.hz(i));
    } catch (...) {
      errors[static_cast<size_t>(i)] = std::current_exception();
      Eigen::Index cur = first_error.load();
      while (i < cur && !first_error.compare_exchange_weak(cur, i)) {
      }
    }
  };
  if (parallel_enabled) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(parallel::threads())
#endif
    for (Eigen::Index i = 0; i < count; ++i) body(i);
  } else {
    for (Eigen::Index i = 0; i < count; ++i) body(i);
  }
  if (first_error.load() < count) {
    std::rethrow_exception(errors[static_cast<size_t>(first_error.load())]);
  }

  ComponentBudget out;
  out.grid = n_samples.grid;
  out.signature = signature;
  out.w.reserve(static_cast<size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) {
    FrequencyBudget& fb = per_freq[static_cast<size_t>(i)];
    out.w.push_back(std::move(fb.w));
    out.v.push_back(std::move(fb.v));
    out.d.push_back(std::move(fb.d));
    out.d_c.push_back(fb.d_c);
    out.lmi_min_eig.push_back(fb.lmi_min_eig);
    out.objective.push_back(fb.objective);
    out.cap_active = out.cap_active || fb.cap_active;
  }
  return out;
}

}  // namespace

void AssemblyRequirement::validate() const {
  if (static_cast<Eigen::Index>(v_c.size()) != grid.size() ||
      static_cast<Eigen::Index>(w_c.size()) != grid.size()) {
    throw Error("assembly requirement: one weight pair per grid point required");
  }
  for (size_t i = 0; i < v_c.size(); ++i) {
    if (v_c[i].size() != v_c[0].size() || w_c[i].size() != w_c[0].size()) {
      throw Error("assembly requirement: weight dimensions vary across the grid");
    }
    if ((v_c[i].array() <= 0.0).any() || (w_c[i].array() <= 0.0).any()) {
      throw Error("assembly requirement: weights must be strictly positive");
    }
  }
}

AssemblyRequirement relative_error_requirement(const FrfSamples& h_c, double gamma) {
  if (!(gamma > 0.0)) throw Error("relative_error_requirement: gamma must be positive");
  AssemblyRequirement req;
  req.grid = h_c.grid;
  req.v_c.reserve(h_c.values.size());
  req.w_c.reserve(h_c.values.size());
  for (size_t i = 0; i < h_c.values.size(); ++i) {
    const double norm = spectral_norm(h_c.values[i]);
    if (!(norm > 0.0)) throw ZeroResponse(h_c.grid.hz(static_cast<Eigen::Index>(i)));
    const double value = 1.0 / std::sqrt(gamma * norm);
    req.v_c.push_back(Eigen::VectorXd::Constant(h_c.values[i].rows(), value));
    req.w_c.push_back(Eigen::VectorXd::Constant(h_c.values[i].cols(), value));
  }
  return req;
}

ComponentBudget synthesize_budgets(const FrfSamples& n_samples, const AssemblyRequirement& req,
                                   const std::vector<ComponentSignature>& signature,
                                   const SynthesisOptions& options) {
  return synthesize_impl(n_samples, req, signature, options, true);
}

ComponentBudget synthesize_budgets_serial(const FrfSamples& n_samples,
                                          const AssemblyRequirement& req,
                                          const std::vector<ComponentSignature>& signature,
                                          const SynthesisOptions& options) {
  return synthesize_impl(n_samples, req, signature, options, false);
}

std::vector<bool> check_component_requirement(const ErrorSamples& e,
                                              const ComponentBudget& budget, int component) {
  if (!(e.grid == budget.grid)) {
    throw GridMismatch("component error and budget use different grids");
  }
  if (component < 0 || component >= budget.component_count()) {
    throw Error("check_component_requirement: component index out of range");
  }
  std::vector<bool> out(e.values.size());
  for (size_t i = 0; i < e.values.size(); ++i) {
    const Eigen::VectorXd& w = budget.w[i][static_cast<size_t>(component)];
    const Eigen::VectorXd& v = budget.v[i][static_cast<size_t>(component)];
    const Eigen::MatrixXcd weighted = w.cwiseInverse().asDiagonal() * e.values[i] *
                                      v.cwiseInverse().asDiagonal();
    out[i] = spectral_norm(weighted) <= 1.0 + kComparisonMargin;
  }
  return out;
}

std::vector<bool> check_assembly_requirement(const ErrorSamples& e_c,
                                             const AssemblyRequirement& req) {
  if (!(e_c.grid == req.grid)) {
    throw GridMismatch("assembly error and requirement use different grids");
  }
  std::vector<bool> out(e_c.values.size());
  for (size_t i = 0; i < e_c.values.size(); ++i) {
    const Eigen::MatrixXcd weighted =
        req.v_c[i].asDiagonal() * e_c.values[i] * req.w_c[i].asDiagonal();
    out[i] = spectral_norm(weighted) < 1.0 - kComparisonMargin;
  }
  return out;
}

SensitivityCurve sensitivity(const ComponentBudget& budget) {
  SensitivityCurve out;
  out.grid = budget.grid;
  out.values.resize(budget.w.size());
  for (size_t i = 0; i < budget.w.size(); ++i) {
    out.values[i].resize(budget.w[i].size());
    for (size_t j = 0; j < budget.w[i].size(); ++j) {
      const Eigen::VectorXd& w = budget.w[i][j];
      const Eigen::VectorXd& v = budget.v[i][j];
      const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(w.size(), v.size());
      out.values[i][j] = spectral_norm(
          Eigen::MatrixXd(w.cwiseInverse().asDiagonal() * ones * v.cwiseInverse().asDiagonal()));
    }
  }
  return out;
}

PropagationReport propagation_check(const Interconnection& coupling,
                                    const std::vector<FrfSamples>& component_frfs,
                                    const ComponentBudget& budget,
                                    const AssemblyRequirement& req, int samples, uint64_t seed,
                                    bool throw_on_violation) {
  coupling.validate();
  if (!(budget.grid == req.grid)) throw GridMismatch("budget and requirement grids differ");
  for (const auto& frf : component_frfs) {
    if (!(frf.grid == budget.grid)) {
      throw GridMismatch("component FRFs must live on the budget grid");
    }
  }
  const Eigen::Index m_b = coupling.m_b();
  const Eigen::Index p_b = coupling.p_b();

  PropagationReport report;
  for (Eigen::Index gi = 0; gi < budget.grid.size(); ++gi) {
    // nominal coupled response at this frequency
    Eigen::MatrixXcd h_b = Eigen::MatrixXcd::Zero(p_b, m_b);
    Eigen::Index row = 0;
    Eigen::Index col = 0;
    for (size_t j = 0; j < component_frfs.size(); ++j) {
      const Eigen::MatrixXcd& hj = component_frfs[j].values[static_cast<size_t>(gi)];
      h_b.block(row, col, hj.rows(), hj.cols()) = hj;
      row += hj.rows();
      col += hj.cols();
    }
    const Eigen::MatrixXcd kbb = coupling.k_bb.cast<Complex>();
    const Eigen::MatrixXcd kbc = coupling.k_bc.cast<Complex>();
    const Eigen::MatrixXcd kcb = coupling.k_cb.cast<Complex>();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu0(Eigen::MatrixXcd::Identity(m_b, m_b) - kbb * h_b);
    const Eigen::MatrixXcd h_c = kcb * h_b * lu0.solve(kbc);

    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(gi + 1));
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (int sample = 0; sample < samples; ++sample) {
      Eigen::MatrixXcd h_b_hat = h_b;
      Eigen::Index prow = 0;
      Eigen::Index pcol = 0;
      for (Eigen::Index j = 0; j < budget.component_count(); ++j) {
        const Eigen::VectorXd& w = budget.w[static_cast<size_t>(gi)][static_cast<size_t>(j)];
        const Eigen::VectorXd& v = budget.v[static_cast<size_t>(gi)][static_cast<size_t>(j)];
        Eigen::MatrixXcd u(w.size(), v.size());
        for (Eigen::Index r = 0; r < u.rows(); ++r) {
          for (Eigen::Index c = 0; c < u.cols(); ++c) {
            u(r, c) = Complex(gauss(rng), gauss(rng));
          }
        }
        const double norm = spectral_norm(u);
        if (norm > 0.0) u /= norm;  // set boundary: |U_j| = 1
        h_b_hat.block(prow, pcol, w.size(), v.size()) +=
            w.asDiagonal() * u * v.asDiagonal();
        prow += w.size();
        pcol += v.size();
      }
      Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Eigen::MatrixXcd::Identity(m_b, m_b) -
                                               kbb * h_b_hat);
      const double rc = lu.rcond();
      const bool well_posed = rc > 0.0 && std::isfinite(rc);
      double weighted = std::numeric_limits<double>::infinity();
      if (well_posed) {
        const Eigen::MatrixXcd e_c = kcb * h_b_hat * lu.solve(kbc) - h_c;
        const Eigen::MatrixXcd scaled = req.v_c[static_cast<size_t>(gi)].asDiagonal() * e_c *
                                        req.w_c[static_cast<size_t>(gi)].asDiagonal();
        weighted = spectral_norm(scaled);
      }
      ++report.samples_total;
      const bool pass = well_posed && weighted < 1.0 + 1e-8;
      if (pass) ++report.samples_passed;
      if (weighted > report.worst_weighted_norm || report.worst_sample < 0) {
        report.worst_weighted_norm = weighted;
        report.worst_frequency_hz = budget.grid.hz(gi);
        report.worst_sample = sample;
      }
      if (!pass && throw_on_violation) {
        throw PropagationViolation(budget.grid.hz(gi), sample, weighted);
      }
    }
  }
  return report;
}

ComponentBudget scale_budget(const ComponentBudget& budget, double factor) {
  ComponentBudget out = budget;
  for (auto& per_freq : out.w) {
    for (auto& w : per_freq) w *= factor;
  }
  for (auto& per_freq : out.v) {
    for (auto& v : per_freq) v *= factor;
  }
  out.lmi_min_eig.assign(out.lmi_min_eig.size(), 0.0);  // certificate void
  return out;
}

FrfSamples subsample(const FrfSamples& frf, const std::vector<Eigen::Index>& indices) {
  std::vector<double> omegas;
  FrfSamples out;
  for (Eigen::Index i : indices) {
    if (i < 0 || i >= frf.grid.size()) throw Error("subsample: index out of range");
    omegas.push_back(frf.grid.omega(i));
    out.values.push_back(frf.values[static_cast<size_t>(i)]);
  }
  out.grid = FrequencyGrid(std::move(omegas));
  return out;
}

}  // namespace cmsbudget
