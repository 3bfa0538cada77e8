#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cmsbudget {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Config file / schema problems. The CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config: " + what) {}
};

/// (-w^2 M + iwC + K) was rank deficient at a grid point.
class SingularDynamicStiffness : public Error {
 public:
  SingularDynamicStiffness(double omega_rad_s, double condition_estimate)
      : Error("singular dynamic stiffness at omega=" + std::to_string(omega_rad_s) +
              " rad/s (condition estimate " + std::to_string(condition_estimate) + ")"),
        omega(omega_rad_s),
        condition(condition_estimate) {}
  double omega;
  double condition;
};

class EigenSolveFailure : public Error {
 public:
  explicit EigenSolveFailure(const std::string& what)
      : Error("eigensolver failed: " + what) {}
};

/// B or F touches an internal DOF, violating the boundary-loading structure.
class NonBoundaryLoading : public Error {
 public:
  NonBoundaryLoading(long dof_index, const std::string& which)
      : Error("non-boundary loading: " + which + " touches internal DOF " +
              std::to_string(dof_index)),
        dof(dof_index) {}
  long dof;
};

class SingularInternalStiffness : public Error {
 public:
  explicit SingularInternalStiffness(double condition_estimate)
      : Error("internal stiffness block K_ii singular (condition estimate " +
              std::to_string(condition_estimate) + ")"),
        condition(condition_estimate) {}
  double condition;
};

/// The reduction basis lost numerical column rank (cut-off too high for n_i).
class RankDeficientBasis : public Error {
 public:
  RankDeficientBasis(long numerical_rank, long column_count, std::vector<long> offending)
      : Error("rank-deficient reduction basis: numerical rank " +
              std::to_string(numerical_rank) + " of " + std::to_string(column_count) +
              " columns"),
        rank(numerical_rank),
        columns(column_count),
        offending_columns(std::move(offending)) {}
  long rank;
  long columns;
  std::vector<long> offending_columns;
};

class GridMismatch : public Error {
 public:
  explicit GridMismatch(const std::string& what) : Error("grid mismatch: " + what) {}
};

class IllPosedInterconnection : public Error {
 public:
  IllPosedInterconnection(double omega_rad_s, double condition_estimate)
      : Error("ill-posed interconnection at omega=" + std::to_string(omega_rad_s) +
              " rad/s (condition estimate " + std::to_string(condition_estimate) + ")"),
        omega(omega_rad_s),
        condition(condition_estimate) {}
  double omega;
  double condition;
};

class DegenerateElement : public Error {
 public:
  DegenerateElement(long element_index, double signed_area)
      : Error("degenerate element " + std::to_string(element_index) +
              " (signed area " + std::to_string(signed_area) + ")"),
        element(element_index) {}
  long element;
};

class NotHermitian : public Error {
 public:
  explicit NotHermitian(double deviation)
      : Error("matrix not Hermitian (relative deviation " + std::to_string(deviation) + ")") {}
};

/// Budget synthesis found no feasible scalings at one grid frequency.
class InfeasibleAtFrequency : public Error {
 public:
  explicit InfeasibleAtFrequency(double f_hz)
      : Error("budget synthesis infeasible at f=" + std::to_string(f_hz) + " Hz"),
        frequency_hz(f_hz) {}
  double frequency_hz;
};

class ZeroResponse : public Error {
 public:
  explicit ZeroResponse(double f_hz)
      : Error("assembly FRF has zero norm at f=" + std::to_string(f_hz) + " Hz"),
        frequency_hz(f_hz) {}
  double frequency_hz;
};

/// A sampled admissible component error violated the assembly requirement.
class PropagationViolation : public Error {
 public:
  PropagationViolation(double f_hz, int sample, double margin)
      : Error("propagation violation at f=" + std::to_string(f_hz) + " Hz, sample " +
              std::to_string(sample) + ", |Vc Ec Wc| = " + std::to_string(margin)),
        frequency_hz(f_hz),
        sample_index(sample),
        weighted_norm(margin) {}
  double frequency_hz;
  int sample_index;
  double weighted_norm;
};

/// Even the full reference basis fails the component requirement.
class BudgetUnreachable : public Error {
 public:
  explicit BudgetUnreachable(const std::string& component_id)
      : Error("component budget unreachable for '" + component_id + "'"),
        component(component_id) {}
  std::string component;
};

}  // namespace cmsbudget
