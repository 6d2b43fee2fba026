#pragma once

#include <cstdint>
#include <cmath>
#include <vector>

namespace uld {

// Counter-based random stream (splitmix64 output function over a keyed
// counter). Streams are cheap to construct, independent under distinct
// (seed, stream) pairs, and reproducible irrespective of call interleaving
// across streams.
//
// Two counters are maintained for cost auditing:
//   - normal_count(): every Gaussian variate handed out
//   - step_count():   incremented by callers via note_step(), once per
//     conceptual noise step (a (gamma, dB) pair or a coupled terminal draw)
// The bookkeeping identity normal_count == 2*d*step_count is asserted by
// the harness.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(mix(seed + 0x9e3779b97f4a7c15ull) ^ mix(stream + 0xbf58476d1ce4e5b9ull))) {}

    // Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via the Marsaglia polar method (inverse-free).
    double normal() {
        ++normals_;
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double a, b, s;
        do {
            a = 2.0 * uniform() - 1.0;
            b = 2.0 * uniform() - 1.0;
            s = a * a + b * b;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = b * f;
        has_spare_ = true;
        return a * f;
    }

    // n i.i.d. N(0, scale^2) variates.
    void normal_vec(std::size_t n, double scale, std::vector<double>& out) {
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = scale * normal();
    }

    void note_step() { ++steps_; }

    std::uint64_t normal_count() const { return normals_; }
    std::uint64_t step_count() const { return steps_; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t next() {
        return mix(key_ + (++ctr_) * 0x9e3779b97f4a7c15ull);
    }

    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
    std::uint64_t normals_ = 0;
    std::uint64_t steps_ = 0;
};

} // namespace uld
