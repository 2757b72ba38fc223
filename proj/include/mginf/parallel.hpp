#pragma once

namespace mginf {

// Selects between the OpenMP kernels and their serial reference versions.
// Both produce bit-identical results; the serial path exists for testing
// and benchmarking.
enum class Execution { serial, parallel };

// Thread count used by parallel kernels; 0 keeps the OpenMP default.
void set_thread_count(int threads);
int thread_count();

}  // namespace mginf
