#include "marketpalace/sim/rng.hpp"

namespace marketpalace::sim {

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Rng Rng::for_trial(std::uint64_t seed, std::uint64_t trial) noexcept {
  return Rng(mix64(seed) ^ mix64(trial + 0x9E3779B97F4A7C15ull));
}

std::uint64_t Rng::next() noexcept {
  state_ += 0x9E3779B97F4A7C15ull;
  return mix64(state_);
}

std::uint64_t Rng::below(std::uint64_t n) noexcept {
  // Lemire's multiply-shift with rejection.
  for (;;) {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low >= n || low >= (0 - n) % n) return static_cast<std::uint64_t>(m >> 64);
  }
}

}  // namespace marketpalace::sim
