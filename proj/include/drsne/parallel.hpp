#pragma once

#include <cstddef>
#include <cstdlib>
#include <string>

namespace drsne {

/// Execution policy. threads == 0 selects the sequential reference kernels, which are
/// bit-reproducible; threads > 0 selects the OpenMP kernels with that many workers.
struct Exec {
    int threads = 0;

    bool parallel() const noexcept { return threads > 0; }

    static Exec sequential() noexcept { return {}; }

    /// Reads DRSNE_THREADS. Unset, empty, "0" or unparsable means sequential.
    static Exec from_env() {
        const char* raw = std::getenv("DRSNE_THREADS");
        if (raw == nullptr || *raw == '\0') return {};
        try {
            const int t = std::stoi(raw);
            return {t > 0 ? t : 0};
        } catch (...) {
            return {};
        }
    }
};

/// Row loop used by non-kernel code (metrics, detectors). Each index must write only
/// its own outputs; callers reduce per-row partials afterwards in index order.
template <class Fn>
void parallel_for(const Exec& exec, std::size_t n, Fn&& fn) {
    if (!exec.parallel()) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 16) num_threads(exec.threads)
    for (long long i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
}

}  // namespace drsne
