#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace tsvsim {

// Tags separating the independent random streams used for one serial.
enum class Stage : std::uint32_t {
    Preparation = 1,
    Morning = 2,
    Weak = 3,
    Evening = 4,
    FreeChoice = 5,
    KeyGeneration = 6,
    Trial = 7,
};

/// Counter-based generator: draw k of the stream keyed by
/// (master_seed, serial, stage) is a pure function of those four values, so
/// results do not depend on which thread runs which serial or in what order.
///
/// Satisfies UniformRandomBitGenerator.
class RandomStream {
  public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t master_seed, std::uint64_t serial, Stage stage);
    explicit RandomStream(std::uint64_t seed) : RandomStream(seed, 0, Stage::Trial) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Standard normal deviate.
    double normal();

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t counter() const noexcept { return counter_; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    std::normal_distribution<double> gauss_{0.0, 1.0};
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace tsvsim
