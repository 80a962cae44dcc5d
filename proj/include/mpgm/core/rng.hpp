#pragma once

#include <cstdint>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace mpgm {

/// Counter-based random stream. Output i of stream (seed, stream_id) is a
/// pure function of (seed, stream_id, i), so results do not depend on which
/// other streams were drawn from in between. Uses the splitmix64 finalizer
/// over a Weyl sequence.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : key_(mix(mix(seed) ^ mix(stream_id ^ 0x6a09e667f3bcc909ULL))) {}

    /// Independent child stream, e.g. one per module instance.
    RngStream substream(std::uint64_t salt) const { return RngStream(key_, salt); }
    RngStream substream(std::string_view name) const { return substream(fnv1a(name)); }

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::size_t uniform_int(std::size_t n) {
        if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return static_cast<std::size_t>(v % n);
    }

    /// Standard normal via Box-Muller; always consumes exactly two uniforms.
    double normal() {
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// Sample an index from normalized probabilities (inverse CDF walk).
    std::size_t categorical(std::span<const double> probs) {
        if (probs.empty()) throw std::invalid_argument("categorical: empty support");
        double u = uniform01();
        for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
            u -= probs[k];
            if (u < 0.0) return k;
        }
        return probs.size() - 1;
    }

    /// Sample from unnormalized log weights.
    std::size_t categorical_logits(std::span<const double> logw) {
        if (logw.empty()) throw std::invalid_argument("categorical_logits: empty support");
        double mx = logw[0];
        for (double w : logw) mx = std::max(mx, w);
        std::vector<double> p(logw.size());
        double z = 0.0;
        for (std::size_t k = 0; k < logw.size(); ++k) {
            p[k] = std::exp(logw[k] - mx);
            z += p[k];
        }
        for (double& v : p) v /= z;
        return categorical(p);
    }

    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace mpgm
