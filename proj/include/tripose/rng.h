#ifndef TRIPOSE_RNG_H_
#define TRIPOSE_RNG_H_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace tripose {

// splitmix64 step; used both as the generator and to derive independent
// per-trial / per-iteration streams from one user seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t s = seed ^ (0x632be59bd9b4e019ULL * (salt + 1));
    splitmix64(s);
    return splitmix64(s);
}

// Small deterministic RNG with exactly reproducible double streams; the
// standard <random> distributions are implementation-defined, which would
// break bit-for-bit reproducibility guarantees across toolchains.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // decorrelate trivially related seeds
        splitmix64(state_);
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal via Box-Muller
    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // integer in [0, n)
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

    // k distinct indices in [0, n), order of drawing preserved
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

inline std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n,
                                                                std::size_t k) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k && i < n; ++i) {
        const std::size_t j = i + index(n - i);
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
    }
    return out;
}

}  // namespace tripose

#endif  // TRIPOSE_RNG_H_
