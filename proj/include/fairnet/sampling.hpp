#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fairnet/rng.hpp"

namespace fairnet {

// Index drawn with probability weights[i] / sum(weights). Returns nullopt when
// the weights sum to zero.
inline std::optional<std::size_t> draw_categorical(std::span<const double> weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) return std::nullopt;
  double u = rng.uniform() * total;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last_positive = i;
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  // Rounding pushed u past the end.
  return last_positive;
}

// Up to `count` distinct indices: repeated categorical draws, each one
// removing the chosen index and renormalizing. Stops early when the remaining
// weight is zero.
inline std::vector<std::size_t> sample_without_replacement(std::vector<double> weights,
                                                           std::size_t count, Rng& rng) {
  std::vector<std::size_t> picked;
  picked.reserve(count);
  while (picked.size() < count) {
    auto i = draw_categorical(weights, rng);
    if (!i) break;
    picked.push_back(*i);
    weights[*i] = 0.0;
  }
  return picked;
}

// Binary indexed tree over non-negative weights supporting point updates and
// inverse-CDF lookup in O(log n).
class FenwickSampler {
 public:
  explicit FenwickSampler(std::size_t capacity = 0) { reset(capacity); }

  void reset(std::size_t capacity) {
    tree_.assign(capacity + 1, 0.0);
    weight_.assign(capacity, 0.0);
    top_bit_ = 1;
    while (top_bit_ * 2 <= capacity) top_bit_ *= 2;
  }

  std::size_t capacity() const noexcept { return weight_.size(); }
  double weight(std::size_t i) const { return weight_[i]; }
  double total() const noexcept { return total_; }

  void set(std::size_t i, double w) {
    const double delta = w - weight_[i];
    if (delta == 0.0) return;
    weight_[i] = w;
    total_ += delta;
    for (std::size_t k = i + 1; k < tree_.size(); k += k & (~k + 1)) tree_[k] += delta;
  }

  // Smallest index whose inclusive prefix sum exceeds `target`, skipping
  // zero-weight slots that floating-point drift might otherwise select.
  std::optional<std::size_t> find(double target) const {
    if (weight_.empty()) return std::nullopt;
    std::size_t pos = 0;
    for (std::size_t step = top_bit_; step > 0; step >>= 1) {
      const std::size_t next = pos + step;
      if (next < tree_.size() && tree_[next] <= target) {
        pos = next;
        target -= tree_[next];
      }
    }
    // pos is the count of slots whose prefix sum is <= target.
    for (std::size_t i = std::min(pos, weight_.size() - 1);; ) {
      if (weight_[i] > 0.0) return i;
      if (i == 0) break;
      --i;
    }
    return std::nullopt;
  }

  std::optional<std::size_t> draw(Rng& rng) const {
    if (!(total_ > 0.0)) return std::nullopt;
    return find(rng.uniform() * total_);
  }

 private:
  std::vector<double> tree_;
  std::vector<double> weight_;
  std::size_t top_bit_ = 1;
  double total_ = 0.0;
};

}  // namespace fairnet
