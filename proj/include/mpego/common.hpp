#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpego {

inline constexpr const char* kVersion = "0.1.0";

/// Any failure raised by the engine. Subclasses distinguish bad user input
/// (ConfigError, CLI exit code 1) from everything else (exit code 2).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Threads. MPEGO_THREADS caps parallelism process-wide; a per-call request of
// 0 means "use the cap". Requests are never raised above the cap.
// ---------------------------------------------------------------------------

int max_threads();
int resolve_threads(int requested);

// ---------------------------------------------------------------------------
// Deterministic randomness. std::mt19937_64 is fully specified by the
// standard; the distributions below are hand-rolled because the standard
// library ones are implementation-defined and would break byte-identical
// reruns across toolchains.
// ---------------------------------------------------------------------------

namespace rng {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Independent seed for a numbered substream (restart, permutation, feature).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream + 1));
}

class Engine {
public:
    explicit Engine(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform integer in [0, n), rejection-sampled so the draw sequence is
    /// identical on every platform.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw Error("rng: below(0)");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (one value per call, cache discarded
    /// for determinism simplicity).
    double normal() {
        double u1 = unit();
        while (u1 == 0.0) u1 = unit();
        const double u2 = unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// n distinct indices drawn uniformly from [0, pool), ascending.
    std::vector<std::size_t> sample_indices(std::size_t pool, std::size_t n);

private:
    std::mt19937_64 gen_;
};

}  // namespace rng

// ---------------------------------------------------------------------------
// Number formatting (no std::format on this toolchain).
// ---------------------------------------------------------------------------

/// Shortest round-trip representation, e.g. "258.1".
std::string fmt_double(double v);

/// Fixed three decimals, half-to-even; display precision used by reports.
std::string fmt_fixed3(double v);
double round_half_even3(double v);

}  // namespace mpego
