#pragma once

// XOR distance between fixed-width identifiers and k-closest selection.
// Identifiers are byte arrays read as big-endian unsigned integers, so
// lexicographic comparison of the XOR result is numeric comparison.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iterator>
#include <ranges>
#include <vector>

namespace marketpalace::gossip {

template <std::size_t N>
using IdBytes = std::array<std::uint8_t, N>;

template <std::size_t N>
constexpr IdBytes<N> xor_distance(const IdBytes<N>& a, const IdBytes<N>& b) noexcept {
  IdBytes<N> d{};
  for (std::size_t i = 0; i < N; ++i) d[i] = static_cast<std::uint8_t>(a[i] ^ b[i]);
  return d;
}

/// Orders ids by XOR distance to `target`, ties by the id itself.
template <std::size_t N>
struct CloserTo {
  IdBytes<N> target;

  constexpr bool operator()(const IdBytes<N>& a, const IdBytes<N>& b) const noexcept {
    auto da = xor_distance(a, target);
    auto db = xor_distance(b, target);
    if (da != db) return da < db;
    return a < b;
  }
};

/// The min(k, size) elements of `items` closest to `target`, ascending by
/// (distance, id). `id_of` projects an element to its IdBytes<N>.
template <std::ranges::forward_range Range, std::size_t N, class Projection>
auto k_closest(const Range& items, const IdBytes<N>& target, std::size_t k, Projection id_of)
    -> std::vector<std::ranges::range_value_t<Range>> {
  using Value = std::ranges::range_value_t<Range>;
  std::vector<const Value*> refs;
  for (const auto& item : items) refs.push_back(&item);
  std::size_t take = std::min(k, refs.size());
  CloserTo<N> closer{target};
  std::partial_sort(refs.begin(), refs.begin() + static_cast<std::ptrdiff_t>(take), refs.end(),
                    [&](const Value* a, const Value* b) {
                      return closer(std::invoke(id_of, *a), std::invoke(id_of, *b));
                    });
  std::vector<Value> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(*refs[i]);
  return out;
}

}  // namespace marketpalace::gossip
