#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace mixcert {

/// Seeded generator with a bit-reproducible output stream.
///
/// The engine is std::mt19937_64, whose sequence is fixed by the standard. The standard
/// distributions are implementation-defined, so bounded draws and shuffles are done here.
class Rng {
public:
    static constexpr const char* name = "mt19937_64/v1";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound). `bound` must be positive.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace mixcert
