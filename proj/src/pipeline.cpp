#include "cmsbudget/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cmsbudget/errors.hpp"

namespace cmsbudget {

namespace {

std::vector<Eigen::Index> rom_selection(const ReferenceComponent& rc, Eigen::Index elastic) {
  const Eigen::Index r = rc.rigid_count();
  const Eigen::Index e_ref = rc.basis.elastic_count();
  const Eigen::Index n_b = rc.boundary_count();
  if (elastic < 0 || elastic > e_ref) throw Error("select_rom: elastic mode count out of range");
  std::vector<Eigen::Index> keep;
  keep.reserve(static_cast<size_t>(r + elastic + n_b));
  for (Eigen::Index i = 0; i < r; ++i) keep.push_back(i);
  for (Eigen::Index i = 0; i < elastic; ++i) keep.push_back(r + i);
  for (Eigen::Index i = 0; i < n_b; ++i) keep.push_back(r + e_ref + i);
  return keep;
}

double implied_cutoff_hz(const ReferenceComponent& rc, Eigen::Index elastic) {
  if (elastic <= 0) return 0.0;
  return rc.elastic_freqs_hz(elastic - 1);
}

}  // namespace

ReferenceSet build_reference(const std::vector<AssemblyComponent>& components,
                             const Interconnection& coupling, const FrequencyGrid& grid,
                             double f_max_hz, double multiplier) {
  if (!(f_max_hz > 0.0) || !(multiplier > 0.0)) {
    throw Error("build_reference: f_max and multiplier must be positive");
  }
  ReferenceSet out;
  out.coupling = coupling;
  out.grid = grid;
  out.f_max_hz = f_max_hz;
  const double f_ref = multiplier * f_max_hz;
  std::vector<FrfSamples> frfs;
  for (const auto& comp : components) {
    HhReduction hh = reduce(comp.model, comp.partition, f_ref, comp.id);
    ReferenceComponent rc;
    rc.id = comp.id;
    rc.full = comp.model;
    rc.partition = comp.partition;
    rc.basis = std::move(hh.basis);
    rc.reduced = std::move(hh.reduced.model);
    rc.f_cut_hz = f_ref;
    rc.n_hat = hh.reduced.n_hat;
    const Eigen::Index r = rc.rigid_count();
    const Eigen::Index e = rc.basis.elastic_count();
    rc.elastic_freqs_hz.resize(e);
    for (Eigen::Index i = 0; i < e; ++i) {
      rc.elastic_freqs_hz(i) = rc.basis.eigenfrequencies(r + i) / (2.0 * std::numbers::pi);
    }
    rc.frf = frf_direct(rc.reduced, grid);
    frfs.push_back(rc.frf);
    out.components.push_back(std::move(rc));
  }
  out.h_c = coupled_frf(coupling, frfs);
  return out;
}

SecondOrderModel select_rom(const ReferenceComponent& component, Eigen::Index elastic_modes) {
  const std::vector<Eigen::Index> keep = rom_selection(component, elastic_modes);
  const Eigen::Index n = static_cast<Eigen::Index>(keep.size());
  const SecondOrderModel& ref = component.reduced;
  SecondOrderModel out;
  out.mass.resize(n, n);
  out.damping.resize(n, n);
  out.stiffness.resize(n, n);
  out.input_map.resize(n, ref.input_count());
  out.output_map.resize(ref.output_count(), n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      out.mass(r, c) = ref.mass(keep[static_cast<size_t>(r)], keep[static_cast<size_t>(c)]);
      out.damping(r, c) = ref.damping(keep[static_cast<size_t>(r)], keep[static_cast<size_t>(c)]);
      out.stiffness(r, c) =
          ref.stiffness(keep[static_cast<size_t>(r)], keep[static_cast<size_t>(c)]);
    }
    out.input_map.row(r) = ref.input_map.row(keep[static_cast<size_t>(r)]);
    out.output_map.col(r) = ref.output_map.col(keep[static_cast<size_t>(r)]);
  }
  if (!ref.dof_labels.empty()) {
    for (Eigen::Index i : keep) out.dof_labels.push_back(ref.dof_labels[static_cast<size_t>(i)]);
  }
  return out;
}

PlanEvaluation evaluate_plan(const ReferenceSet& reference, const ComponentBudget& budget,
                             const AssemblyRequirement& req,
                             const std::vector<Eigen::Index>& elastic_counts,
                             const std::vector<double>& f_cut_hz, const std::string& method) {
  const size_t k = reference.components.size();
  if (elastic_counts.size() != k || f_cut_hz.size() != k) {
    throw Error("evaluate_plan: one mode count and cut-off per component required");
  }
  PlanEvaluation out;
  out.plan.method = method;
  std::vector<FrfSamples> frfs;
  frfs.reserve(k);
  for (size_t j = 0; j < k; ++j) {
    const ReferenceComponent& rc = reference.components[j];
    const SecondOrderModel rom = select_rom(rc, elastic_counts[j]);
    FrfSamples frf = frf_direct(rom, reference.grid);
    const ErrorSamples err = component_error(rc.frf, frf);
    const std::vector<bool> ok = check_component_requirement(err, budget, static_cast<int>(j));
    ComponentPlanEntry entry;
    entry.id = rc.id;
    entry.f_cut_hz = f_cut_hz[j];
    entry.elastic_modes = static_cast<int>(elastic_counts[j]);
    entry.n_hat = static_cast<int>(rc.rigid_count() + elastic_counts[j] + rc.boundary_count());
    entry.requirement_ok = std::all_of(ok.begin(), ok.end(), [](bool b) { return b; });
    out.plan.components.push_back(std::move(entry));
    out.plan.total_n_hat += static_cast<int>(rc.rigid_count() + elastic_counts[j] +
                                             rc.boundary_count());
    frfs.push_back(std::move(frf));
  }
  out.h_c_hat = coupled_frf(reference.coupling, frfs);
  out.e_c = assembly_error(reference.h_c, out.h_c_hat);
  const std::vector<bool> ok = check_assembly_requirement(out.e_c, req);
  out.plan.assembly_ok = std::all_of(ok.begin(), ok.end(), [](bool b) { return b; });
  return out;
}

std::vector<Eigen::Index> standard_elastic_counts(const ReferenceSet& reference,
                                                  double f_cut_hz) {
  std::vector<Eigen::Index> counts;
  counts.reserve(reference.components.size());
  for (const auto& rc : reference.components) {
    Eigen::Index e = 0;
    while (e < rc.elastic_freqs_hz.size() && rc.elastic_freqs_hz(e) <= f_cut_hz) ++e;
    counts.push_back(e);
  }
  return counts;
}

PlanEvaluation standard_reduction(const ReferenceSet& reference, const ComponentBudget& budget,
                                  const AssemblyRequirement& req, int multiplier) {
  if (multiplier < 1) throw Error("standard_reduction: multiplier must be >= 1");
  const double f_cut = multiplier * reference.f_max_hz;
  const std::vector<Eigen::Index> counts = standard_elastic_counts(reference, f_cut);
  const std::vector<double> cuts(reference.components.size(), f_cut);
  return evaluate_plan(reference, budget, req, counts, cuts,
                       "standard-" + std::to_string(multiplier));
}

PlanEvaluation proposed_reduction(const ReferenceSet& reference, const ComponentBudget& budget,
                                  const AssemblyRequirement& req) {
  const size_t k = reference.components.size();
  std::vector<Eigen::Index> counts(k, 0);
  std::vector<double> cuts(k, 0.0);
  for (size_t j = 0; j < k; ++j) {
    const ReferenceComponent& rc = reference.components[j];
    const Eigen::Index e_ref = rc.basis.elastic_count();
    bool satisfied = false;
    // linear scan, one elastic mode at a time: errors need not be monotone in
    // the mode count, so the first satisfying prefix is taken
    for (Eigen::Index e = 0; e <= e_ref; ++e) {
      const SecondOrderModel rom = select_rom(rc, e);
      const FrfSamples frf = frf_direct(rom, reference.grid);
      const ErrorSamples err = component_error(rc.frf, frf);
      const std::vector<bool> ok = check_component_requirement(err, budget, static_cast<int>(j));
      if (std::all_of(ok.begin(), ok.end(), [](bool b) { return b; })) {
        counts[j] = e;
        cuts[j] = implied_cutoff_hz(rc, e);
        satisfied = true;
        break;
      }
    }
    if (!satisfied) throw BudgetUnreachable(rc.id);
  }
  return evaluate_plan(reference, budget, req, counts, cuts, "proposed");
}

}  // namespace cmsbudget
