#pragma once

namespace cmsbudget::parallel {

/// Number of threads the OpenMP runtime offers (1 without OpenMP).
int hardware_threads();

/// Thread count used by the parallel kernels. Defaults to hardware_threads().
int threads();

/// Override the kernel thread count (clamped to >= 1).
void set_threads(int n);

}  // namespace cmsbudget::parallel
