#pragma once

namespace nfd {

// Kernels that have both a plain serial loop and an OpenMP loop take one of
// these. Results are required to be bit-identical across policies; the serial
// path is the reference the tests compare against.
enum class ExecPolicy { serial, parallel };

// Worker count the parallel policy would use (1 when built without OpenMP).
int hardware_threads();

}  // namespace nfd
