#pragma once

#include <cstdint>
#include <vector>

#include "cmsbudget/assembly.hpp"
#include "cmsbudget/model.hpp"

namespace cmsbudget {

/// Per-frequency diagonal weights V_c, W_c of the assembly accuracy set
/// { E_c : |V_c E_c W_c| < 1 }.
struct AssemblyRequirement {
  FrequencyGrid grid;
  std::vector<Eigen::VectorXd> v_c;  // size p_c, strictly positive
  std::vector<Eigen::VectorXd> w_c;  // size m_c, strictly positive

  void validate() const;
};

/// Synthesized per-component weights W^(j), V^(j) with the block scalings and
/// the stored LMI certificate, per grid frequency.
struct ComponentBudget {
  FrequencyGrid grid;
  std::vector<ComponentSignature> signature;
  std::vector<std::vector<Eigen::VectorXd>> w;  // [freq][comp], size p_j
  std::vector<std::vector<Eigen::VectorXd>> v;  // [freq][comp], size m_j
  std::vector<Eigen::VectorXd> d;               // [freq], size k
  std::vector<double> d_c;                      // [freq]
  std::vector<double> lmi_min_eig;              // [freq] certificate
  std::vector<double> objective;                // [freq] free-part objective
  bool cap_active = false;

  Eigen::Index component_count() const { return static_cast<Eigen::Index>(signature.size()); }
};

struct SensitivityCurve {
  FrequencyGrid grid;
  std::vector<std::vector<double>> values;  // [freq][comp]
};

struct SynthesisOptions {
  double weight_cap = 1e6;        // upper cap on diagonal weight entries
  double strictness_factor = 1e-9;  // eps = factor * |N|
  double sdp_tol = 1e-8;
  double alternation_tol = 1e-6;
  int alternation_max_rounds = 50;
  int golden_section_iters = 16;
  double log10_dc_min = -6.0;
  double log10_dc_max = 6.0;
};

struct PropagationReport {
  int samples_total = 0;
  int samples_passed = 0;
  double worst_weighted_norm = 0.0;  // max |Vc Ec Wc| over all samples
  double worst_frequency_hz = 0.0;
  int worst_sample = -1;
};

/// V_c = W_c = I * (gamma |H_c|)^(-1/2) per frequency (spectral norm).
AssemblyRequirement relative_error_requirement(const FrfSamples& h_c, double gamma);

/// Per-frequency weight synthesis: substitute X = W^-2/d, Y = V^-2 d, solve
/// the inner diagonal SDP, update d in closed form, alternate, and search the
/// performance scaling d_c by golden section on log10 d_c. Parallel over the
/// grid; a serial reference is kept for testing.
ComponentBudget synthesize_budgets(const FrfSamples& n_samples, const AssemblyRequirement& req,
                                   const std::vector<ComponentSignature>& signature,
                                   const SynthesisOptions& options = {});
ComponentBudget synthesize_budgets_serial(const FrfSamples& n_samples,
                                          const AssemblyRequirement& req,
                                          const std::vector<ComponentSignature>& signature,
                                          const SynthesisOptions& options = {});

/// |W^-1 E V^-1| <= 1 per grid point (boundary inclusive).
std::vector<bool> check_component_requirement(const ErrorSamples& e,
                                              const ComponentBudget& budget, int component);

/// |V_c E_c W_c| < 1 per grid point (strict).
std::vector<bool> check_assembly_requirement(const ErrorSamples& e_c,
                                             const AssemblyRequirement& req);

/// S^(j)(w) = |(W^(j))^-1 J (V^(j))^-1| with J the all-ones matrix.
SensitivityCurve sensitivity(const ComponentBudget& budget);

/// Draws boundary-admissible component errors E^(j) = W^(j) U_j V^(j) with
/// |U_j| = 1, propagates them through the interconnection and checks the
/// assembly requirement. Component FRFs must live on the budget grid.
PropagationReport propagation_check(const Interconnection& coupling,
                                    const std::vector<FrfSamples>& component_frfs,
                                    const ComponentBudget& budget,
                                    const AssemblyRequirement& req, int samples, uint64_t seed,
                                    bool throw_on_violation = true);

/// Uniformly inflated copy (certificate no longer valid); negative controls.
ComponentBudget scale_budget(const ComponentBudget& budget, double factor);

/// FRF restricted to a subset of grid indices (ascending).
FrfSamples subsample(const FrfSamples& frf, const std::vector<Eigen::Index>& indices);

}  // namespace cmsbudget
