#pragma once

namespace zt {

/// Thread cap from ZT_THREADS (positive integer), else the OpenMP default.
int thread_limit();

/// Applies thread_limit() to the OpenMP runtime; called once by the CLI.
void configure_threads();

} // namespace zt
