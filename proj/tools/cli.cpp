#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cmsbudget/config.hpp"
#include "cmsbudget/errors.hpp"
#include "cmsbudget/model_json.hpp"
#include "cmsbudget/parallel.hpp"
#include "cmsbudget/pipeline.hpp"
#include "cmsbudget/report.hpp"

namespace fs = std::filesystem;
using namespace cmsbudget;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitRequirement = 4;

struct RequirementFailure : Error {
  explicit RequirementFailure(const std::string& what) : Error(what) {}
};

struct Stage {
  RunConfig config;
  BuiltAssembly assembly;
  ReferenceSet reference;
  AssemblyRequirement requirement;
  std::vector<FrfSamples> reference_frfs;
};

Stage prepare(const std::string& config_path, bool verbose) {
  Stage st;
  st.config = load_run_config(config_path);
  if (verbose) std::fprintf(stderr, "building %zu components\n", st.config.components.size());
  st.assembly = build_assembly(st.config);
  st.reference = build_reference(st.assembly.components, st.assembly.coupling, st.assembly.grid,
                                 st.config.grid.f_max_hz, st.config.reference_multiplier);
  st.requirement = relative_error_requirement(st.reference.h_c, st.config.gamma);
  for (const auto& rc : st.reference.components) st.reference_frfs.push_back(rc.frf);
  return st;
}

ComponentBudget synthesize_stage(const Stage& st, const std::string& out_dir, bool verbose) {
  if (verbose) std::fprintf(stderr, "synthesizing budgets on %ld grid points\n",
                            static_cast<long>(st.reference.grid.size()));
  const FrfSamples n = interconnection_transfer(st.reference.coupling, st.reference_frfs);
  ComponentBudget budget =
      synthesize_budgets(n, st.requirement, st.reference.coupling.signature, st.config.synthesis);
  fs::create_directories(out_dir);
  write_budgets_csv(budget, (fs::path(out_dir) / "budgets.csv").string());
  write_sensitivity_csv(sensitivity(budget), budget.signature,
                        (fs::path(out_dir) / "sensitivity.csv").string());
  if (budget.cap_active) {
    std::fprintf(stderr, "[note] weight cap active on at least one channel\n");
  }
  return budget;
}

std::vector<PlanEvaluation> reduce_stage(const Stage& st, const ComponentBudget& budget,
                                         const std::string& out_dir, bool verbose) {
  // reference models in the dense matrix format, for reuse and inspection
  const fs::path ref_dir = fs::path(out_dir) / "reference";
  fs::create_directories(ref_dir);
  for (const auto& rc : st.reference.components) {
    std::vector<Eigen::Index> boundary;
    const Eigen::Index n_hat = rc.reduced.dof_count();
    for (Eigen::Index i = n_hat - rc.boundary_count(); i < n_hat; ++i) boundary.push_back(i);
    ModelProvenance prov{rc.id, rc.f_cut_hz, rc.n_hat};
    save_model_file((ref_dir / (rc.id + ".json")).string(), rc.reduced,
                    DofPartition::from_boundary(n_hat, boundary), prov);
  }

  std::vector<PlanEvaluation> plans;
  for (const std::string& method : st.config.methods) {
    if (verbose) std::fprintf(stderr, "reducing: %s\n", method.c_str());
    PlanEvaluation pe;
    if (method == "proposed") {
      pe = proposed_reduction(st.reference, budget, st.requirement);
    } else {
      const int multiplier = method.back() - '0';
      pe = standard_reduction(st.reference, budget, st.requirement, multiplier);
    }
    // export the reduced models of this plan
    const fs::path dir = fs::path(out_dir) / "reduced" / method;
    fs::create_directories(dir);
    for (size_t j = 0; j < st.reference.components.size(); ++j) {
      const ReferenceComponent& rc = st.reference.components[j];
      const auto& entry = pe.plan.components[j];
      const SecondOrderModel rom = select_rom(rc, entry.elastic_modes);
      std::vector<Eigen::Index> boundary;
      const Eigen::Index n_hat = rom.dof_count();
      for (Eigen::Index i = n_hat - rc.boundary_count(); i < n_hat; ++i) boundary.push_back(i);
      ModelProvenance prov{rc.id, entry.f_cut_hz, entry.n_hat};
      save_model_file((dir / (rc.id + ".json")).string(), rom,
                      DofPartition::from_boundary(n_hat, boundary), prov);
    }
    plans.push_back(std::move(pe));
  }
  write_summary_csv(plans, st.reference, (fs::path(out_dir) / "summary.csv").string());
  return plans;
}

void report_stage(const Stage& st, const ComponentBudget& budget,
                  const std::vector<PlanEvaluation>& plans, const std::string& out_dir) {
  write_frf_csv(plans, st.reference, (fs::path(out_dir) / "frf.csv").string());
  write_relerr_csv(plans, st.reference, st.config.gamma,
                   (fs::path(out_dir) / "relerr.csv").string());
  write_report_txt(plans, st.reference, budget, st.config.gamma,
                   (fs::path(out_dir) / "report.txt").string());
}

int check_stage(const Stage& st, const std::string& out_dir, const std::string& method,
                bool verbose) {
  const fs::path dir = fs::path(out_dir) / "reduced" / method;
  std::vector<FrfSamples> frfs;
  for (const auto& rc : st.reference.components) {
    const fs::path path = dir / (rc.id + ".json");
    if (verbose) std::fprintf(stderr, "checking %s\n", path.string().c_str());
    ImportedModel rom = load_model_file(path.string());
    frfs.push_back(frf_direct(rom.model, st.reference.grid));
  }
  const FrfSamples h_c_hat = coupled_frf(st.reference.coupling, frfs);
  const ErrorSamples e_c = assembly_error(st.reference.h_c, h_c_hat);
  const std::vector<bool> ok = check_assembly_requirement(e_c, st.requirement);
  Eigen::Index failures = 0;
  for (bool b : ok) {
    if (!b) ++failures;
  }
  std::ofstream out(fs::path(out_dir) / ("check-" + method + ".txt"), std::ios::binary);
  out << "method: " << method << "\n";
  out << "grid points: " << st.reference.grid.size() << "\n";
  out << "violations: " << failures << "\n";
  out << "assembly requirement satisfied: " << (failures == 0 ? "yes" : "no") << "\n";
  std::printf("%s: assembly requirement %s (%ld of %ld grid points violated)\n", method.c_str(),
              failures == 0 ? "satisfied" : "violated", static_cast<long>(failures),
              static_cast<long>(st.reference.grid.size()));
  if (failures > 0) {
    throw RequirementFailure("assembly requirement violated for method '" + method + "'");
  }
  return kExitOk;
}

int run_all(const std::string& config_path, const std::string& out_dir, bool verbose) {
  Stage st = prepare(config_path, verbose);
  fs::create_directories(out_dir);
  const ComponentBudget budget = synthesize_stage(st, out_dir, verbose);
  const std::vector<PlanEvaluation> plans = reduce_stage(st, budget, out_dir, verbose);
  report_stage(st, budget, plans, out_dir);
  for (const auto& pe : plans) {
    std::printf("%-12s total n_hat %4d  assembly %s\n", pe.plan.method.c_str(),
                pe.plan.total_n_hat, pe.plan.assembly_ok ? "ok" : "VIOLATED");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"assembly-aware component mode synthesis reduction"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = "out";
  std::string method = "proposed";
  int threads = 0;
  bool verbose = false;
  app.add_option("--threads", threads, "thread count for the parallel kernels");
  app.add_flag("--verbose", verbose, "progress output on stderr");

  CLI::App* demo = app.add_subcommand("demo", "write the bundled demo and run the full pipeline");
  demo->add_option("--out", out_dir, "output directory");

  CLI::App* run = app.add_subcommand("run", "full pipeline from a run config");
  run->add_option("--config", config_path, "run config path")->required();
  run->add_option("--out", out_dir, "output directory");

  CLI::App* synth = app.add_subcommand("synthesize", "component budgets only");
  synth->add_option("--config", config_path, "run config path")->required();
  synth->add_option("--out", out_dir, "output directory");

  CLI::App* reduce_cmd = app.add_subcommand("reduce", "reduce using budgets.csv from --out");
  reduce_cmd->add_option("--config", config_path, "run config path")->required();
  reduce_cmd->add_option("--out", out_dir, "output directory");

  CLI::App* check = app.add_subcommand("check", "verify exported reduced models");
  check->add_option("--config", config_path, "run config path")->required();
  check->add_option("--out", out_dir, "output directory");
  check->add_option("--method", method, "plan to verify (default: proposed)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (threads > 0) parallel::set_threads(threads);

  try {
    if (demo->parsed()) {
      fs::create_directories(out_dir);
      const std::string cfg = write_demo_config((fs::path(out_dir) / "config").string());
      return run_all(cfg, out_dir, verbose);
    }
    if (run->parsed()) return run_all(config_path, out_dir, verbose);
    if (synth->parsed()) {
      Stage st = prepare(config_path, verbose);
      synthesize_stage(st, out_dir, verbose);
      return kExitOk;
    }
    if (reduce_cmd->parsed()) {
      Stage st = prepare(config_path, verbose);
      const ComponentBudget budget =
          read_budgets_csv((fs::path(out_dir) / "budgets.csv").string(), st.reference.grid);
      reduce_stage(st, budget, out_dir, verbose);
      return kExitOk;
    }
    if (check->parsed()) {
      Stage st = prepare(config_path, verbose);
      return check_stage(st, out_dir, method, verbose);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const InfeasibleAtFrequency& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInfeasible;
  } catch (const RequirementFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRequirement;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInternal;
  }
  return kExitInternal;
}
