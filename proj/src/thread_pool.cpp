#include "ktop/thread_pool.hpp"

extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace ktop {

void pin_blas_single_thread() {
    if (openblas_set_num_threads) openblas_set_num_threads(1);
}

int hardware_threads() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

} // namespace ktop
