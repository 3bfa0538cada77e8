// Benchmark comparing the serial reference kernels against the OpenMP
// frequency-loop kernels on a demo-sized workload.

#include <chrono>
#include <cstdio>
#include <random>

#include "cmsbudget/assembly.hpp"
#include "cmsbudget/budget.hpp"
#include "cmsbudget/parallel.hpp"

using namespace cmsbudget;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

SecondOrderModel random_chain(std::mt19937_64& rng, Eigen::Index n, Eigen::Index channels) {
  std::uniform_real_distribution<double> mass_dist(0.5, 2.0);
  std::uniform_real_distribution<double> spring_dist(0.5, 3.0);
  SecondOrderModel model;
  model.mass = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) model.mass(i, i) = mass_dist(rng);
  model.stiffness = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double k = spring_dist(rng);
    model.stiffness(i, i) += k;
    model.stiffness(i + 1, i + 1) += k;
    model.stiffness(i, i + 1) -= k;
    model.stiffness(i + 1, i) -= k;
  }
  model.stiffness(0, 0) += spring_dist(rng);  // grounded
  model.damping = Eigen::MatrixXd::Zero(n, n);
  model = apply_modal_damping(model, 0.02);
  model.input_map = Eigen::MatrixXd::Zero(n, channels);
  model.output_map = Eigen::MatrixXd::Zero(channels, n);
  for (Eigen::Index c = 0; c < channels; ++c) {
    model.input_map(n - 1 - c, c) = 1.0;
    model.output_map(c, n - 1 - c) = 1.0;
  }
  return model;
}

}  // namespace

int main() {
  std::mt19937_64 rng(7);
  const FrequencyGrid grid = FrequencyGrid::linear_rad(4.0, 400);

  const SecondOrderModel big = random_chain(rng, 120, 2);
  std::printf("threads available: %d\n\n", parallel::hardware_threads());

  {
    auto t0 = Clock::now();
    const FrfSamples serial = frf_direct_serial(big, grid);
    const double ts = seconds_since(t0);
    t0 = Clock::now();
    const FrfSamples parallel_result = frf_direct(big, grid);
    const double tp = seconds_since(t0);
    double max_dev = 0.0;
    for (size_t i = 0; i < serial.values.size(); ++i) {
      max_dev = std::max(max_dev, (serial.values[i] - parallel_result.values[i]).norm());
    }
    std::printf("frf_direct        n=120, 400 freqs : serial %.3fs  parallel %.3fs  speedup %.2fx  max dev %.1e\n",
                ts, tp, ts / tp, max_dev);
  }

  {
    // two coupled chains
    std::vector<FrfSamples> frfs;
    Interconnection coupling;
    std::vector<SecondOrderModel> models;
    for (int j = 0; j < 2; ++j) {
      models.push_back(random_chain(rng, 80, 2));
      coupling.signature.push_back({"c" + std::to_string(j), 2, 2});
    }
    for (const auto& m : models) frfs.push_back(frf_direct(m, grid));
    coupling.k_bb = Eigen::MatrixXd::Zero(4, 4);
    coupling.k_bb(0, 2) = 1.0;
    coupling.k_bb(0, 0) = -1.0;
    coupling.k_bb(2, 0) = 1.0;
    coupling.k_bb(2, 2) = -1.0;
    coupling.k_bc = Eigen::MatrixXd::Zero(4, 1);
    coupling.k_bc(1, 0) = 1.0;
    coupling.k_cb = Eigen::MatrixXd::Zero(1, 4);
    coupling.k_cb(0, 3) = 1.0;

    auto t0 = Clock::now();
    const FrfSamples serial = coupled_frf_serial(coupling, frfs);
    const double ts = seconds_since(t0);
    t0 = Clock::now();
    const FrfSamples parallel_result = coupled_frf(coupling, frfs);
    const double tp = seconds_since(t0);
    double max_dev = 0.0;
    for (size_t i = 0; i < serial.values.size(); ++i) {
      max_dev = std::max(max_dev, (serial.values[i] - parallel_result.values[i]).norm());
    }
    std::printf("coupled_frf       2x n=80, 400 freqs: serial %.3fs  parallel %.3fs  speedup %.2fx  max dev %.1e\n",
                ts, tp, ts / tp, max_dev);

    const FrequencyGrid synth_grid = FrequencyGrid::linear_rad(4.0, 64);
    std::vector<FrfSamples> synth_frfs;
    for (const auto& m : models) synth_frfs.push_back(frf_direct(m, synth_grid));
    const FrfSamples n = interconnection_transfer(coupling, synth_frfs);
    AssemblyRequirement req =
        relative_error_requirement(coupled_frf(coupling, synth_frfs), 0.05);
    SynthesisOptions opt;
    opt.golden_section_iters = 6;
    t0 = Clock::now();
    const ComponentBudget serial_budget =
        synthesize_budgets_serial(n, req, coupling.signature, opt);
    const double tbs = seconds_since(t0);
    t0 = Clock::now();
    const ComponentBudget parallel_budget = synthesize_budgets(n, req, coupling.signature, opt);
    const double tbp = seconds_since(t0);
    double budget_dev = 0.0;
    for (size_t i = 0; i < serial_budget.w.size(); ++i) {
      for (size_t j = 0; j < serial_budget.w[i].size(); ++j) {
        budget_dev = std::max(budget_dev,
                              (serial_budget.w[i][j] - parallel_budget.w[i][j]).norm());
      }
    }
    std::printf("synthesize_budget 64 freqs          : serial %.3fs  parallel %.3fs  speedup %.2fx  max dev %.1e\n",
                tbs, tbp, tbs / tbp, budget_dev);
  }
  return 0;
}
