#pragma once

#include <string>
#include <vector>

#include "cmsbudget/pipeline.hpp"

namespace cmsbudget {

/// Relative-error table kept in memory for verification against the CSVs.
struct ReportTables {
  std::vector<std::string> methods;
  std::vector<std::vector<double>> relative_error;  // [method][freq]
};

/// Formats a double with 17 significant digits (round-trip safe).
std::string format_double(double value);

void write_budgets_csv(const ComponentBudget& budget, const std::string& path);

/// Reads budgets.csv back; the grid is taken from `expected_grid` after a
/// 1e-12 relative consistency check against the stored f_hz column.
ComponentBudget read_budgets_csv(const std::string& path, const FrequencyGrid& expected_grid);

void write_sensitivity_csv(const SensitivityCurve& sens,
                           const std::vector<ComponentSignature>& signature,
                           const std::string& path);

void write_summary_csv(const std::vector<PlanEvaluation>& plans, const ReferenceSet& reference,
                       const std::string& path);

void write_frf_csv(const std::vector<PlanEvaluation>& plans, const ReferenceSet& reference,
                   const std::string& path);

ReportTables write_relerr_csv(const std::vector<PlanEvaluation>& plans,
                              const ReferenceSet& reference, double gamma,
                              const std::string& path);

void write_report_txt(const std::vector<PlanEvaluation>& plans, const ReferenceSet& reference,
                      const ComponentBudget& budget, double gamma, const std::string& path);

}  // namespace cmsbudget
