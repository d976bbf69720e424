#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "tricons/geometry.hpp"

namespace tricons {

struct SamplingError : std::runtime_error {
    explicit SamplingError(const std::string& what) : std::runtime_error(what) {}
};

/// Deterministic splitmix64 stream; used instead of <random> distributions so
/// that identical seeds give bit-identical samples on every platform.
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in [-half, half).
    double next_in_box(double half) { return (next_double() * 2.0 - 1.0) * half; }
};

struct SamplingPolicy {
    double min_angle_rad = 20.0 * kPi / 180.0;
    double max_angle_rad = 120.0 * kPi / 180.0;
    double scalene_margin = 0.05; // pairwise side ratio must differ from 1 by this much
    double box_half = 10.0;      // vertex coordinates drawn from [-box_half, box_half)
    int max_attempts = 100000;
};

struct TriangleInstance {
    Vec2 a, b, c;
    uint64_t seed = 0;
};

inline bool admissible_triangle(Vec2 a, Vec2 b, Vec2 c, const SamplingPolicy& policy) {
    double area2 = std::fabs(cross(b - a, c - a));
    if (!(area2 > 0.0)) return false;
    double angles[3] = {corner_angle(a, b, c), corner_angle(b, c, a), corner_angle(c, a, b)};
    for (double t : angles) {
        if (t < policy.min_angle_rad || t > policy.max_angle_rad) return false;
    }
    double sides[3] = {dist(b, c), dist(c, a), dist(a, b)};
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            double hi = std::max(sides[i], sides[j]);
            double lo = std::min(sides[i], sides[j]);
            if (hi / lo < 1.0 + policy.scalene_margin) return false;
        }
    }
    return true;
}

/// Rejection-samples a well-conditioned scalene triangle. Pure function of
/// (seed, policy).
inline TriangleInstance sample_triangle(uint64_t seed, const SamplingPolicy& policy = {}) {
    SplitMix64 rng(seed * 0x2545f4914f6cdd1dULL + 0x9e3779b97f4a7c15ULL);
    for (int attempt = 0; attempt < policy.max_attempts; ++attempt) {
        Vec2 a{rng.next_in_box(policy.box_half), rng.next_in_box(policy.box_half)};
        Vec2 b{rng.next_in_box(policy.box_half), rng.next_in_box(policy.box_half)};
        Vec2 c{rng.next_in_box(policy.box_half), rng.next_in_box(policy.box_half)};
        if (admissible_triangle(a, b, c, policy)) return TriangleInstance{a, b, c, seed};
    }
    throw SamplingError("sampling policy unsatisfiable after " +
                        std::to_string(policy.max_attempts) + " attempts");
}

} // namespace tricons
