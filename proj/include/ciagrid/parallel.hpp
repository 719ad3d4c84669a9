#pragma once

namespace ciagrid {

/// Selects between the OpenMP kernel and its serial reference. The serial
/// path is what tests compare against.
enum class Exec { serial, parallel };

/// Thread count for parallel kernels: OpenMP's default, capped by the
/// CIAGRID_THREADS environment variable when it is set to a positive integer.
int thread_cap();

} // namespace ciagrid
