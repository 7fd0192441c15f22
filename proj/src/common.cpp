#include "mpego/common.hpp"

#include <omp.h>

#include <algorithm>
#include <cfenv>
#include <cstdio>
#include <cstdlib>
#include <numeric>

namespace mpego {

int max_threads() {
    static const int cap = [] {
        int n = omp_get_max_threads();
        if (const char* env = std::getenv("MPEGO_THREADS")) {
            char* end = nullptr;
            const long v = std::strtol(env, &end, 10);
            if (end != env && v >= 1) n = std::min(n, static_cast<int>(v));
        }
        return std::max(n, 1);
    }();
    return cap;
}

int resolve_threads(int requested) {
    if (requested <= 0) return max_threads();
    return std::min(requested, max_threads());
}

namespace rng {

std::vector<std::size_t> Engine::sample_indices(std::size_t pool, std::size_t n) {
    if (n > pool) throw Error("rng: sample size exceeds population");
    std::vector<std::size_t> idx(pool);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // Partial Fisher-Yates: first n slots end up uniform without replacement.
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(below(pool - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(n);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace rng

std::string fmt_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, ptr);
}

double round_half_even3(double v) {
    // nearbyint honors FE_TONEAREST (ties to even), the process default.
    return std::nearbyint(v * 1000.0) / 1000.0;
}

std::string fmt_fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", round_half_even3(v));
    return buf;
}

}  // namespace mpego
