#include "csbp/rng.hpp"

namespace csbp {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kSplit = 0x632BE59BD9B4E019ULL;
constexpr std::uint64_t kSecond = 0xD1B54A32D192ED03ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed),
      key_(mix64(seed + kGolden) ^ mix64(stream_id * kSplit + kSecond)),
      key2_(mix64(key_ + kSecond)) {}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t key, std::uint64_t key2, int)
    : seed_(seed), key_(key), key2_(key2) {}

RandomStream::result_type RandomStream::operator()() {
  std::uint64_t x = key_ + (counter_++) * kGolden;
  return mix64(mix64(x) ^ key2_);
}

double RandomStream::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double RandomStream::uniform_pos() {
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t RandomStream::below(std::uint64_t n) {
  // Lemire's multiply-shift with rejection.
  std::uint64_t x = (*this)();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  std::uint64_t l = static_cast<std::uint64_t>(m);
  if (l < n) {
    std::uint64_t t = (0 - n) % n;
    while (l < t) {
      x = (*this)();
      m = static_cast<__uint128_t>(x) * n;
      l = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

RandomStream RandomStream::split(std::uint64_t id) const {
  std::uint64_t k = mix64(key_ ^ mix64(id * kSplit + kGolden));
  return RandomStream(seed_, k, mix64(k + kSecond), 0);
}

}  // namespace csbp
