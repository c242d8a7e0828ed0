#pragma once

#include <cstdint>
#include <limits>

namespace csbp {

// Counter-based stream: output n is a keyed mix of n, so a stream is fully
// described by (key, counter) and children are derived from the key alone.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform on [0,1) with 53 bits.
  double uniform();
  // Uniform on (0,1), never returns 0.
  double uniform_pos();
  // Uniform integer in {0,..,n-1}.
  std::uint64_t below(std::uint64_t n);

  // Deterministic child stream; distinct ids give unrelated sequences.
  RandomStream split(std::uint64_t id) const;

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }
  std::uint64_t seed() const { return seed_; }

 private:
  RandomStream(std::uint64_t seed, std::uint64_t key, std::uint64_t key2, int);

  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t key2_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z);

}  // namespace csbp
