#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "scx/vec.hpp"

namespace scx {

inline constexpr std::string_view kRngName = "mt19937_64";
inline constexpr std::string_view kSamplerVersion = "scx-sampler-1";

/// Seeded generator with platform-independent real draws.
///
/// std::uniform_real_distribution is implementation-defined, so doubles are
/// built from the top 53 bits of each draw instead. This keeps certificates
/// byte-reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0,1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform in the closed ball of the given center and radius (rejection from the cube).
    Vec in_ball(const Vec& center, double radius) {
        const int n = center.dim();
        for (;;) {
            Vec d(n);
            for (int k = 0; k < n; ++k) d[k] = uniform(-1.0, 1.0);
            if (squared_norm(d) <= 1.0) return center + radius * d;
        }
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace scx
