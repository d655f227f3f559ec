#pragma once

namespace hiermix {

/// Caps the number of OpenMP threads used by the parallel kernels.
/// 0 restores the OpenMP default.  Thread-count changes never affect results:
/// every parallel loop writes disjoint slots and reductions run in a fixed
/// serial order, so runs with any thread count are bitwise reproducible.
void set_num_threads(int n);

/// Thread count the parallel kernels will actually use.
int num_threads();

/// True when compiled with OpenMP support.
bool openmp_enabled();

}  // namespace hiermix
