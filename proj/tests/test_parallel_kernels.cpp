#include "doctest.h"

#include "cmsbudget/budget.hpp"
#include "cmsbudget/parallel.hpp"
#include "fixtures.hpp"

using namespace cmsbudget;

// The OpenMP kernels write one grid slot per frequency with no cross-frequency
// reductions, so they must match the serial reference implementations bit for
// bit regardless of the thread count.

TEST_CASE("frf_direct: parallel kernel matches the serial reference bitwise") {
  std::mt19937_64 rng(12);
  const SecondOrderModel model = testfx::chain_component(rng, 24, 2);
  const FrequencyGrid grid = FrequencyGrid::linear_rad(3.0, 64);
  const FrfSamples serial = frf_direct_serial(model, grid);
  const FrfSamples parallel_result = frf_direct(model, grid);
  REQUIRE(serial.values.size() == parallel_result.values.size());
  for (size_t i = 0; i < serial.values.size(); ++i) {
    CHECK((serial.values[i] - parallel_result.values[i]).norm() == 0.0);
  }
}

TEST_CASE("coupled_frf and interconnection_transfer match their serial references") {
  const AssemblyModel assembly = testfx::two_chain_assembly(8, 6, 7, 1.0, 48, 2.2);
  std::vector<FrfSamples> frfs;
  for (const auto& comp : assembly.components) {
    frfs.push_back(frf_direct(comp.model, assembly.grid));
  }
  const FrfSamples hc_serial = coupled_frf_serial(assembly.coupling, frfs);
  const FrfSamples hc_parallel = coupled_frf(assembly.coupling, frfs);
  for (size_t i = 0; i < hc_serial.values.size(); ++i) {
    CHECK((hc_serial.values[i] - hc_parallel.values[i]).norm() == 0.0);
  }
  const FrfSamples n_serial = interconnection_transfer_serial(assembly.coupling, frfs);
  const FrfSamples n_parallel = interconnection_transfer(assembly.coupling, frfs);
  for (size_t i = 0; i < n_serial.values.size(); ++i) {
    CHECK((n_serial.values[i] - n_parallel.values[i]).norm() == 0.0);
  }
}

TEST_CASE("synthesize_budgets: parallel kernel matches the serial reference bitwise") {
  const AssemblyModel assembly = testfx::two_chain_assembly(21, 4, 5, 0.9, 8, 1.6);
  std::vector<FrfSamples> frfs;
  for (const auto& comp : assembly.components) {
    frfs.push_back(frf_direct(comp.model, assembly.grid));
  }
  const FrfSamples n = interconnection_transfer(assembly.coupling, frfs);
  const AssemblyRequirement req =
      relative_error_requirement(coupled_frf(assembly.coupling, frfs), 0.05);
  SynthesisOptions opt;
  opt.golden_section_iters = 6;
  const ComponentBudget serial =
      synthesize_budgets_serial(n, req, assembly.coupling.signature, opt);
  const ComponentBudget parallel_result =
      synthesize_budgets(n, req, assembly.coupling.signature, opt);
  for (size_t i = 0; i < serial.w.size(); ++i) {
    for (size_t j = 0; j < serial.w[i].size(); ++j) {
      CHECK((serial.w[i][j] - parallel_result.w[i][j]).norm() == 0.0);
      CHECK((serial.v[i][j] - parallel_result.v[i][j]).norm() == 0.0);
    }
    CHECK((serial.d[i] - parallel_result.d[i]).norm() == 0.0);
    CHECK(serial.d_c[i] == parallel_result.d_c[i]);
  }
}

TEST_CASE("thread count control") {
  const int before = parallel::threads();
  parallel::set_threads(1);
  CHECK(parallel::threads() == 1);
  // kernels still produce identical results single-threaded
  std::mt19937_64 rng(3);
  const SecondOrderModel model = testfx::chain_component(rng, 10, 1);
  const FrequencyGrid grid = FrequencyGrid::linear_rad(2.0, 16);
  const FrfSamples one = frf_direct(model, grid);
  parallel::set_threads(parallel::hardware_threads());
  const FrfSamples many = frf_direct(model, grid);
  for (size_t i = 0; i < one.values.size(); ++i) {
    CHECK((one.values[i] - many.values[i]).norm() == 0.0);
  }
  parallel::set_threads(before);
}
