#include "tsvsim/random_stream.hpp"

namespace tsvsim {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t serial, Stage stage) {
    std::uint64_t k = mix64(master_seed);
    k = mix64(k ^ mix64(serial ^ 0xA0761D6478BD642FULL));
    k = mix64(k ^ (static_cast<std::uint64_t>(stage) * 0xE7037ED1A0B428DBULL));
    key_ = k;
}

RandomStream::result_type RandomStream::operator()() {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

double RandomStream::uniform() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
    return gauss_(*this);
}

}  // namespace tsvsim
