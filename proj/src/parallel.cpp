#include "zt/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

#include <omp.h>

namespace zt {

int thread_limit() {
    const int fallback = omp_get_num_procs();
    const char* env = std::getenv("ZT_THREADS");
    if (!env || !*env) return fallback;
    int n = 0;
    const auto res = std::from_chars(env, env + std::strlen(env), n);
    if (res.ec != std::errc() || n < 1) return fallback;
    return n;
}

void configure_threads() { omp_set_num_threads(thread_limit()); }

} // namespace zt
