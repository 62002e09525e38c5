#include "grf/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace grf {

namespace {
std::atomic<int> g_threads{0};
}

void set_thread_count(int threads) {
    g_threads.store(threads < 0 ? 0 : threads);
}

int effective_threads() {
    if (const char* env = std::getenv("GRF_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) {
            return v;
        }
    }
    const int set = g_threads.load();
    if (set > 0) {
        return set;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(size_t count, const std::function<void(size_t, size_t)>& fn) {
    if (count == 0) {
        return;
    }
    const size_t workers =
        std::min<size_t>(static_cast<size_t>(effective_threads()), count);
    if (workers <= 1) {
        fn(0, count);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    std::exception_ptr first_error;
    std::mutex err_mutex;
    const size_t chunk = (count + workers - 1) / workers;
    auto run = [&](size_t begin, size_t end) {
        try {
            fn(begin, end);
        } catch (...) {
            std::lock_guard<std::mutex> lock(err_mutex);
            if (!first_error) {
                first_error = std::current_exception();
            }
        }
    };
    for (size_t t = 1; t < workers; ++t) {
        const size_t begin = t * chunk;
        const size_t end = std::min(count, begin + chunk);
        if (begin < end) {
            pool.emplace_back(run, begin, end);
        }
    }
    run(0, std::min(count, chunk));
    for (auto& th : pool) {
        th.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

} // namespace grf
