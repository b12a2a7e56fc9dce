#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace sdi {

/// Seeded generator whose output is identical on every platform.
///
/// Engine: MT19937-64, whose sequence is fixed by the C++ standard. Uniforms
/// take the top 53 bits of one draw; normals use the Box-Muller transform and
/// return the cosine branch first, then the cached sine branch. The standard
/// distribution classes are avoided because their algorithms are
/// implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform();  // [0, 1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();
    double normal(double mean, double sigma) { return mean + sigma * normal(); }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

/// SplitMix64 finaliser over (base, stream); derives independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) noexcept;

} // namespace sdi
