#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace mslant {

// SplitMix64: a 64-bit generator whose whole state is one counter, so a
// seed reproduces the same stream on every platform.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    // Independent stream derived from this seed and a label; used so that each
    // check draws its own samples regardless of which other checks ran.
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t label) noexcept {
        SplitMix64 mix(seed ^ (label * 0xd1b54a32d192ed03ULL));
        return SplitMix64(mix());
    }

private:
    std::uint64_t state_;
};

struct Tolerances {
    double algebraic = 1e-9;
    double fd = 1e-6;
    double angle = 1e-6;
};

struct SamplingPlan {
    std::uint64_t seed = 42;
    int point_count = 100;
    int dirs_per_point = 20;
    Tolerances tol;
};

// Validates counts and tolerances; throws InputError.
void validate(const SamplingPlan& plan);

// Random unit vector with uniformly drawn cube coordinates (rejecting tiny norms).
Eigen::VectorXd random_unit_vector(SplitMix64& rng, Eigen::Index dim);

// Uniform sample of a box, staying a relative `margin` away from every face.
Eigen::VectorXd sample_box(SplitMix64& rng, const std::vector<std::pair<double, double>>& box,
                           double margin = 1e-3);

}  // namespace mslant
