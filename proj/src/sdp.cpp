#include "cmsbudget/sdp.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>

#include "json.hpp"

#include "cmsbudget/errors.hpp"

namespace cmsbudget::sdp {

namespace {

constexpr double kMuShrink = 0.2;
constexpr double kArmijoBeta = 0.5;
constexpr double kArmijoC1 = 1e-4;
constexpr int kMaxNewtonTotal = 4000;

struct EmbeddedProblem {
  Eigen::MatrixXd g0;  // 2d x 2d, includes nothing else
  std::vector<std::vector<DiagonalEntry>> vars;  // embedded positions (p and p+d)
  Eigen::Index dim;    // 2d
};

EmbeddedProblem embed(const DiagonalLmiProblem& problem) {
  EmbeddedProblem out;
  out.g0 = embed_hermitian(problem.constant_term);
  out.dim = out.g0.rows();
  const Eigen::Index d = problem.dimension();
  out.vars.resize(problem.variables.size());
  for (size_t i = 0; i < problem.variables.size(); ++i) {
    for (const DiagonalEntry& e : problem.variables[i]) {
      out.vars[i].push_back({e.position, e.coeff});
      out.vars[i].push_back({e.position + d, e.coeff});
    }
  }
  return out;
}

Eigen::MatrixXd constraint_embedded(const EmbeddedProblem& ep, const Eigen::VectorXd& x) {
  Eigen::MatrixXd s = ep.g0;
  for (size_t i = 0; i < ep.vars.size(); ++i) {
    for (const DiagonalEntry& e : ep.vars[i]) {
      s(e.position, e.position) += x(static_cast<Eigen::Index>(i)) * e.coeff;
    }
  }
  return s;
}

double min_eigenvalue_embedded(const Eigen::MatrixXd& s) {
  if (s.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// Barrier state for  minimize  obj(z) - mu * [logdet(S(z)) + sum log(z_i - lb_i)]
/// where S(z) is affine with diagonal variable placements. Phase I appends the
/// auxiliary variable t with S-coefficient -I and no bound barrier.
struct BarrierProblem {
  const EmbeddedProblem* ep;
  Eigen::VectorXd c;        // objective gradient (linear objective)
  Eigen::VectorXd lb;       // lower bounds; entries -inf disable the bound term
  double shift;             // constant subtracted from the diagonal (eps or 0)
  bool with_aux = false;    // Phase I: last variable is t with matrix -I

  Eigen::Index size() const { return c.size(); }

  Eigen::MatrixXd matrix_at(const Eigen::VectorXd& z) const {
    const Eigen::Index s_count = with_aux ? z.size() - 1 : z.size();
    Eigen::MatrixXd s = ep->g0;
    for (Eigen::Index i = 0; i < s_count; ++i) {
      for (const DiagonalEntry& e : ep->vars[static_cast<size_t>(i)]) {
        s(e.position, e.position) += z(i) * e.coeff;
      }
    }
    double diag_shift = -shift;
    if (with_aux) diag_shift -= z(z.size() - 1);
    s.diagonal().array() += diag_shift;
    return s;
  }

  bool strictly_feasible(const Eigen::VectorXd& z, Eigen::LLT<Eigen::MatrixXd>* llt_out) const {
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      if (std::isfinite(lb(i)) && !(z(i) > lb(i))) return false;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(matrix_at(z));
    if (llt.info() != Eigen::Success) return false;
    if (llt_out) *llt_out = std::move(llt);
    return true;
  }

  double value(const Eigen::VectorXd& z, double mu, const Eigen::LLT<Eigen::MatrixXd>& llt) const {
    double logdet = 0.0;
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i) logdet += 2.0 * std::log(l(i, i));
    double logbounds = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      if (std::isfinite(lb(i))) logbounds += std::log(z(i) - lb(i));
    }
    return c.dot(z) - mu * (logdet + logbounds);
  }
};

struct NewtonResult {
  bool stalled = false;
  int steps = 0;
};

/// Newton-centers z for the barrier at fixed mu until the Newton decrement is
/// small. Exact trace gradient/Hessian of the log-det term.
NewtonResult newton_center(const BarrierProblem& bp, Eigen::VectorXd& z, double mu,
                           int max_steps, int* total_steps,
                           const std::function<bool(const Eigen::VectorXd&)>& early_stop = {}) {
  NewtonResult res;
  const Eigen::Index s = bp.size();
  for (int step = 0; step < max_steps; ++step) {
    if (*total_steps >= kMaxNewtonTotal) {
      res.stalled = true;
      return res;
    }
    Eigen::LLT<Eigen::MatrixXd> llt;
    if (!bp.strictly_feasible(z, &llt)) {
      res.stalled = true;  // should not happen: iterates stay interior
      return res;
    }
    const Eigen::MatrixXd sinv =
        llt.solve(Eigen::MatrixXd::Identity(bp.ep->dim, bp.ep->dim));
    std::optional<Eigen::MatrixXd> sinv2;  // needed only with the aux variable
    if (bp.with_aux) sinv2 = sinv * sinv;

    Eigen::VectorXd grad = bp.c;
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(s, s);
    const Eigen::Index n_mat = bp.with_aux ? s - 1 : s;
    for (Eigen::Index i = 0; i < n_mat; ++i) {
      double tr = 0.0;
      for (const DiagonalEntry& e : bp.ep->vars[static_cast<size_t>(i)]) {
        tr += e.coeff * sinv(e.position, e.position);
      }
      grad(i) -= mu * tr;
      for (Eigen::Index j = i; j < n_mat; ++j) {
        double h = 0.0;
        for (const DiagonalEntry& ei : bp.ep->vars[static_cast<size_t>(i)]) {
          for (const DiagonalEntry& ej : bp.ep->vars[static_cast<size_t>(j)]) {
            const double sij = sinv(ei.position, ej.position);
            h += ei.coeff * ej.coeff * sij * sij;
          }
        }
        hess(i, j) = mu * h;
        hess(j, i) = hess(i, j);
      }
    }
    if (bp.with_aux) {
      const Eigen::Index t = s - 1;
      grad(t) += mu * sinv.trace();  // d/dt [-mu logdet(S - tI)] = +mu tr(S^-1)
      hess(t, t) = mu * sinv.squaredNorm();
      for (Eigen::Index i = 0; i < n_mat; ++i) {
        double h = 0.0;
        for (const DiagonalEntry& e : bp.ep->vars[static_cast<size_t>(i)]) {
          h += e.coeff * (*sinv2)(e.position, e.position);
        }
        hess(i, t) = -mu * h;
        hess(t, i) = hess(i, t);
      }
    }
    for (Eigen::Index i = 0; i < s; ++i) {
      if (std::isfinite(bp.lb(i))) {
        const double gap = z(i) - bp.lb(i);
        grad(i) -= mu / gap;
        hess(i, i) += mu / (gap * gap);
      }
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    Eigen::VectorXd dz = ldlt.solve(-grad);
    const double decrement_sq = -grad.dot(dz);
    ++(*total_steps);
    ++res.steps;
    if (!(decrement_sq > 0.0) || !dz.allFinite()) return res;  // centered / stalled
    if (decrement_sq * 0.5 <= 1e-11 * (1.0 + std::abs(bp.c.dot(z)))) return res;

    // backtracking: stay strictly interior, then Armijo on the barrier value;
    // fraction-to-boundary keeps the box search from crawling
    const double f0 = bp.value(z, mu, llt);
    const double slope = grad.dot(dz);
    double alpha = 1.0;
    for (Eigen::Index i = 0; i < s; ++i) {
      if (std::isfinite(bp.lb(i)) && dz(i) < 0.0) {
        alpha = std::min(alpha, 0.995 * (z(i) - bp.lb(i)) / (-dz(i)));
      }
    }
    alpha = std::max(alpha, 1e-16);
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      Eigen::VectorXd trial = z + alpha * dz;
      Eigen::LLT<Eigen::MatrixXd> llt_trial;
      if (bp.strictly_feasible(trial, &llt_trial)) {
        const double f1 = bp.value(trial, mu, llt_trial);
        if (f1 <= f0 + kArmijoC1 * alpha * slope) {
          z = std::move(trial);
          accepted = true;
          break;
        }
      }
      alpha *= kArmijoBeta;
    }
    if (!accepted) return res;  // no further progress at this mu
    if (early_stop && early_stop(z)) return res;
  }
  return res;
}

}  // namespace

void DiagonalLmiProblem::validate() const {
  const Eigen::Index s = variable_count();
  const Eigen::Index d = dimension();
  if (d < 1) throw Error("sdp: constraint dimension must be >= 1");
  if (constant_term.cols() != d) throw Error("sdp: G0 must be square");
  if (static_cast<Eigen::Index>(variables.size()) != s) {
    throw Error("sdp: variable placement count must match objective size");
  }
  if (lower_bounds.size() != s) throw Error("sdp: lower bound count");
  if (!objective.allFinite() || !lower_bounds.allFinite()) {
    throw Error("sdp: non-finite objective or bounds");
  }
  if (!(strictness >= 0.0)) throw Error("sdp: strictness margin must be >= 0");
  for (const auto& placements : variables) {
    for (const DiagonalEntry& e : placements) {
      if (e.position < 0 || e.position >= d) throw Error("sdp: placement out of range");
      if (!std::isfinite(e.coeff)) throw Error("sdp: placement coefficient not finite");
    }
  }
}

Eigen::MatrixXcd DiagonalLmiProblem::constraint_at(const Eigen::VectorXd& x) const {
  Eigen::MatrixXcd g = constant_term;
  for (size_t i = 0; i < variables.size(); ++i) {
    for (const DiagonalEntry& e : variables[i]) {
      g(e.position, e.position) += x(static_cast<Eigen::Index>(i)) * e.coeff;
    }
  }
  return g;
}

Eigen::MatrixXd embed_hermitian(const Eigen::MatrixXcd& h) {
  const Eigen::Index d = h.rows();
  if (h.cols() != d) throw NotHermitian(std::numeric_limits<double>::infinity());
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  const double dev = (h - h.adjoint()).cwiseAbs().maxCoeff() / scale;
  if (dev > 1e-12) throw NotHermitian(dev);
  Eigen::MatrixXd out(2 * d, 2 * d);
  out.topLeftCorner(d, d) = h.real();
  out.topRightCorner(d, d) = -h.imag();
  out.bottomLeftCorner(d, d) = h.imag();
  out.bottomRightCorner(d, d) = h.real();
  // exact symmetry: the real part of a Hermitian matrix may carry roundoff
  return 0.5 * (out + out.transpose());
}

SdpSolution solve(const DiagonalLmiProblem& problem, double tol,
                  const Eigen::VectorXd* warm_start) {
  problem.validate();
  const EmbeddedProblem ep = embed(problem);
  const Eigen::Index s = problem.variable_count();
  const double eps = problem.strictness;

  SdpSolution sol;
  sol.iterations = 0;
  int total_steps = 0;

  // ---- find a strictly feasible start -------------------------------------
  Eigen::VectorXd x;
  bool feasible = false;

  auto strictly_feasible_x = [&](const Eigen::VectorXd& cand) {
    for (Eigen::Index i = 0; i < s; ++i) {
      if (!(cand(i) > problem.lower_bounds(i))) return false;
    }
    Eigen::MatrixXd m = constraint_embedded(ep, cand);
    m.diagonal().array() -= eps;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    return llt.info() == Eigen::Success;
  };

  if (warm_start && warm_start->size() == s && strictly_feasible_x(*warm_start)) {
    x = *warm_start;
    feasible = true;
  }
  if (!feasible) {
    // cheap scan: diagonally dominant candidates before the barrier Phase I
    const double g0_scale = ep.g0.cwiseAbs().maxCoeff() + eps + 1.0;
    for (double factor = 1.0; factor <= 1e12; factor *= 100.0) {
      Eigen::VectorXd cand = problem.lower_bounds.array() + factor * g0_scale;
      if (strictly_feasible_x(cand)) {
        x = cand;
        feasible = true;
        break;
      }
    }
  }
  if (!feasible) {
    // Phase I: maximize t subject to G(x) - tI >= 0, x >= lb, from the
    // analytically feasible start t0 = lambda_min(G(x0)) - 1.
    BarrierProblem aux;
    aux.ep = &ep;
    aux.with_aux = true;
    aux.shift = 0.0;
    aux.c = Eigen::VectorXd::Zero(s + 1);
    aux.c(s) = -1.0;  // maximize t
    aux.lb = Eigen::VectorXd::Constant(s + 1, -std::numeric_limits<double>::infinity());
    aux.lb.head(s) = problem.lower_bounds;

    Eigen::VectorXd z(s + 1);
    z.head(s) = problem.lower_bounds.array() + 1.0;
    z(s) = min_eigenvalue_embedded(constraint_embedded(ep, z.head(s))) - 1.0;

    const double feas_target = eps + 1e-8 * (1.0 + ep.g0.cwiseAbs().maxCoeff());
    auto reached = [&](const Eigen::VectorXd& cur) { return cur(cur.size() - 1) >= feas_target; };

    double mu = 1.0;
    const double nu = static_cast<double>(ep.dim + s);
    bool found = reached(z);
    while (!found) {
      newton_center(aux, z, mu, 40, &total_steps, reached);
      if (reached(z)) {
        found = true;
        break;
      }
      if (mu * nu <= 1e-10 * (1.0 + std::abs(z(s))) || total_steps >= kMaxNewtonTotal) break;
      mu *= kMuShrink;
    }
    if (!found && !(z(s) > eps)) {
      sol.x = z.head(s);
      sol.status = (total_steps >= kMaxNewtonTotal) ? SdpStatus::max_iterations
                                                    : SdpStatus::infeasible;
      sol.iterations = total_steps;
      sol.objective_value = problem.objective.dot(sol.x);
      sol.min_eigenvalue = min_eigenvalue_embedded(constraint_embedded(ep, sol.x));
      return sol;
    }
    x = z.head(s);
    feasible = strictly_feasible_x(x);
    if (!feasible) {
      sol.x = x;
      sol.status = SdpStatus::infeasible;
      sol.iterations = total_steps;
      sol.objective_value = problem.objective.dot(x);
      sol.min_eigenvalue = min_eigenvalue_embedded(constraint_embedded(ep, x));
      return sol;
    }
  }

  // ---- Phase II: barrier path-following -----------------------------------
  BarrierProblem bp;
  bp.ep = &ep;
  bp.with_aux = false;
  bp.shift = eps;
  bp.c = problem.objective;
  bp.lb = problem.lower_bounds;

  const double nu = static_cast<double>(ep.dim + s);
  // relative duality-gap estimate; the floor keeps near-zero objectives finite
  const auto gap_rel = [&](double mu, const Eigen::VectorXd& cur) {
    return mu * nu / std::max(std::abs(problem.objective.dot(cur)), 1e-12);
  };
  double mu = 1.0;
  bool converged = false;
  for (int stage = 0; stage < 400 && total_steps < kMaxNewtonTotal; ++stage) {
    newton_center(bp, x, mu, 60, &total_steps);
    if (gap_rel(mu, x) <= tol) {
      converged = true;
      break;
    }
    mu *= kMuShrink;
  }

  sol.x = x;
  sol.objective_value = problem.objective.dot(x);
  sol.min_eigenvalue = min_eigenvalue_embedded(constraint_embedded(ep, x));
  sol.iterations = total_steps;
  sol.gap_estimate = gap_rel(mu, x);
  sol.status = converged ? SdpStatus::optimal : SdpStatus::max_iterations;
  return sol;
}

void dump_problem(const DiagonalLmiProblem& problem, const std::string& path) {
  nlohmann::json j;
  j["objective"] = std::vector<double>(problem.objective.begin(), problem.objective.end());
  j["lower_bounds"] =
      std::vector<double>(problem.lower_bounds.begin(), problem.lower_bounds.end());
  j["strictness"] = problem.strictness;
  nlohmann::json g0_re = nlohmann::json::array();
  nlohmann::json g0_im = nlohmann::json::array();
  for (Eigen::Index r = 0; r < problem.dimension(); ++r) {
    nlohmann::json row_re = nlohmann::json::array();
    nlohmann::json row_im = nlohmann::json::array();
    for (Eigen::Index c = 0; c < problem.dimension(); ++c) {
      row_re.push_back(problem.constant_term(r, c).real());
      row_im.push_back(problem.constant_term(r, c).imag());
    }
    g0_re.push_back(std::move(row_re));
    g0_im.push_back(std::move(row_im));
  }
  j["g0_real"] = std::move(g0_re);
  j["g0_imag"] = std::move(g0_im);
  nlohmann::json vars = nlohmann::json::array();
  for (const auto& placements : problem.variables) {
    nlohmann::json var = nlohmann::json::array();
    for (const DiagonalEntry& e : placements) {
      var.push_back({{"position", e.position}, {"coeff", e.coeff}});
    }
    vars.push_back(std::move(var));
  }
  j["variables"] = std::move(vars);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write SDP dump '" + path + "'");
  out << j.dump(1) << "\n";
}

}  // namespace cmsbudget::sdp
