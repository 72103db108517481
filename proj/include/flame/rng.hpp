#pragma once

#include <cstdint>
#include <limits>

namespace flame {

namespace detail {

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// SplitMix64 stream whose starting point is a hash of
/// (master seed, agent id, iteration). Streams never depend on which worker
/// runs the agent or in what order, so a run's outcome is independent of the
/// partitioning. Satisfies std::uniform_random_bit_generator.
class AgentRng {
 public:
  using result_type = std::uint64_t;

  constexpr AgentRng(std::uint64_t master_seed, std::int64_t agent_id, std::int64_t iteration) {
    std::uint64_t h = detail::mix64(master_seed + 0x9E3779B97F4A7C15ULL);
    h = detail::mix64(h ^ (static_cast<std::uint64_t>(agent_id) + 0xD1B54A32D192ED03ULL));
    h = detail::mix64(h ^ (static_cast<std::uint64_t>(iteration) + 0x8CB92BA72F3D8DD7ULL));
    state_ = h;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return detail::mix64(state_);
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  constexpr double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_ = 0;
};

inline AgentRng agent_rng(std::uint64_t master_seed, std::int64_t agent_id, std::int64_t iteration) {
  return AgentRng(master_seed, agent_id, iteration);
}

}  // namespace flame
