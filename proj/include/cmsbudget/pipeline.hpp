#pragma once

#include <string>
#include <vector>

#include "cmsbudget/assembly.hpp"
#include "cmsbudget/budget.hpp"
#include "cmsbudget/hh.hpp"

namespace cmsbudget {

/// One component prepared at the reference cut-off: the constrained, damped
/// model with its channels, the reference basis and ROM, and the reference FRF.
struct ReferenceComponent {
  std::string id;
  SecondOrderModel full;  // physical-coordinate model with channel maps
  DofPartition partition;
  HhBasis basis;             // at the reference cut-off
  SecondOrderModel reduced;  // reference ROM (serves as the component truth)
  FrfSamples frf;            // reference FRF on the grid
  Eigen::VectorXd elastic_freqs_hz;  // retained elastic eigenfrequencies
  double f_cut_hz = 0.0;
  int n_hat = 0;

  Eigen::Index rigid_count() const { return basis.rigid_count(); }
  Eigen::Index boundary_count() const { return basis.boundary_count(); }
};

struct ReferenceSet {
  std::vector<ReferenceComponent> components;
  Interconnection coupling;
  FrequencyGrid grid;
  FrfSamples h_c;  // reference coupled FRF
  double f_max_hz = 0.0;
};

struct ComponentPlanEntry {
  std::string id;
  double f_cut_hz = 0.0;
  int n_hat = 0;
  int elastic_modes = 0;
  bool requirement_ok = false;
};

struct ReductionPlan {
  std::string method;  // "standard-i*fmax" or "proposed"
  std::vector<ComponentPlanEntry> components;
  int total_n_hat = 0;
  bool assembly_ok = false;
};

/// A plan together with the coupled FRF and error it was verified with.
struct PlanEvaluation {
  ReductionPlan plan;
  FrfSamples h_c_hat;
  ErrorSamples e_c;
};

/// HH-reduces every component at multiplier * f_max; the results serve as the
/// high-order truth for everything downstream.
ReferenceSet build_reference(const std::vector<AssemblyComponent>& components,
                             const Interconnection& coupling, const FrequencyGrid& grid,
                             double f_max_hz, double multiplier = 10.0);

/// The reference ROM restricted to the first `elastic_modes` elastic columns.
SecondOrderModel select_rom(const ReferenceComponent& component, Eigen::Index elastic_modes);

/// Evaluates a plan given per-component elastic mode counts: recomputes every
/// component flag and the assembly flag from scratch.
PlanEvaluation evaluate_plan(const ReferenceSet& reference, const ComponentBudget& budget,
                             const AssemblyRequirement& req,
                             const std::vector<Eigen::Index>& elastic_counts,
                             const std::vector<double>& f_cut_hz, const std::string& method);

/// Uniform cut-off multiplier * f_max for every component.
PlanEvaluation standard_reduction(const ReferenceSet& reference, const ComponentBudget& budget,
                                  const AssemblyRequirement& req, int multiplier);

/// Per-component linear scan: smallest elastic mode count whose error satisfies
/// the component budget at every grid point.
PlanEvaluation proposed_reduction(const ReferenceSet& reference, const ComponentBudget& budget,
                                  const AssemblyRequirement& req);

/// Per-plan elastic counts for reuse (export, scans).
std::vector<Eigen::Index> standard_elastic_counts(const ReferenceSet& reference,
                                                  double f_cut_hz);

}  // namespace cmsbudget
