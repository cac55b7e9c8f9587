#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace dirpg {

using ActionId = std::uint32_t;
/// Ordered action sequence from the root.
using Prefix = std::vector<ActionId>;

/// Subset of a small action alphabet (at most 64 actions), stored as a bit mask.
class ActionSet {
 public:
  static constexpr std::size_t kMaxActions = 64;

  constexpr ActionSet() = default;
  constexpr explicit ActionSet(std::uint64_t bits) : bits_(bits) {}

  static ActionSet all(std::size_t num_actions) {
    if (num_actions > kMaxActions) throw std::invalid_argument("ActionSet: more than 64 actions");
    return ActionSet(num_actions == kMaxActions ? ~0ULL : ((1ULL << num_actions) - 1));
  }
  static constexpr ActionSet single(ActionId a) { return ActionSet(1ULL << a); }

  constexpr bool contains(ActionId a) const { return a < kMaxActions && ((bits_ >> a) & 1ULL) != 0; }
  constexpr void insert(ActionId a) { bits_ |= (1ULL << a); }
  constexpr void erase(ActionId a) { bits_ &= ~(1ULL << a); }
  constexpr ActionSet without(ActionId a) const { return ActionSet(bits_ & ~(1ULL << a)); }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool subset_of(ActionSet other) const { return (bits_ & ~other.bits_) == 0; }
  constexpr bool operator==(const ActionSet&) const = default;

  class iterator {
   public:
    constexpr explicit iterator(std::uint64_t rest) : rest_(rest) {}
    constexpr ActionId operator*() const { return static_cast<ActionId>(std::countr_zero(rest_)); }
    constexpr iterator& operator++() {
      rest_ &= rest_ - 1;
      return *this;
    }
    constexpr bool operator!=(const iterator& o) const { return rest_ != o.rest_; }

   private:
    std::uint64_t rest_;
  };
  constexpr iterator begin() const { return iterator(bits_); }
  constexpr iterator end() const { return iterator(0); }

  std::vector<ActionId> to_vector() const {
    std::vector<ActionId> out;
    out.reserve(size());
    for (ActionId a : *this) out.push_back(a);
    return out;
  }

 private:
  std::uint64_t bits_ = 0;
};

}  // namespace dirpg
