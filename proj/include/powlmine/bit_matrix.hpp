#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace powlmine {

/// Dense binary relation over {0, ..., n-1}, one bit row per element.
class BitMatrix {
 public:
  explicit BitMatrix(std::size_t n = 0) : n_(n), words_((n + 63) / 64), bits_(n * words_, 0) {}

  std::size_t size() const noexcept { return n_; }

  bool test(std::size_t r, std::size_t c) const noexcept {
    return (bits_[r * words_ + c / 64] >> (c % 64)) & 1U;
  }
  void set(std::size_t r, std::size_t c) noexcept {
    bits_[r * words_ + c / 64] |= std::uint64_t{1} << (c % 64);
  }
  void reset(std::size_t r, std::size_t c) noexcept {
    bits_[r * words_ + c / 64] &= ~(std::uint64_t{1} << (c % 64));
  }

  std::span<const std::uint64_t> row(std::size_t r) const noexcept {
    return {bits_.data() + r * words_, words_};
  }

  std::size_t count() const noexcept {
    std::size_t total = 0;
    for (auto w : bits_) total += static_cast<std::size_t>(std::popcount(w));
    return total;
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t r = 0; r < n_; ++r)
      for (std::size_t c = 0; c < n_; ++c)
        if (test(r, c)) out.emplace_back(r, c);
    return out;
  }

  /// Warshall's algorithm on bit rows.
  void close_transitively() noexcept {
    for (std::size_t k = 0; k < n_; ++k) {
      for (std::size_t i = 0; i < n_; ++i) {
        if (!test(i, k)) continue;
        std::uint64_t* dst = bits_.data() + i * words_;
        const std::uint64_t* src = bits_.data() + k * words_;
        for (std::size_t w = 0; w < words_; ++w) dst[w] |= src[w];
      }
    }
  }

  bool is_transitive() const noexcept {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        if (!test(i, j)) continue;
        auto ri = row(i);
        auto rj = row(j);
        for (std::size_t w = 0; w < words_; ++w)
          if (rj[w] & ~ri[w]) return false;
      }
    return true;
  }

  bool is_irreflexive() const noexcept {
    for (std::size_t i = 0; i < n_; ++i)
      if (test(i, i)) return false;
    return true;
  }

  bool is_asymmetric() const noexcept {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (test(i, j) && test(j, i)) return false;
    return true;
  }

  bool is_strict_partial_order() const noexcept {
    return is_irreflexive() && is_asymmetric() && is_transitive();
  }

  /// Edges of a strict partial order not implied by two others.
  BitMatrix transitive_reduction() const {
    BitMatrix out = *this;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        if (!test(i, j)) continue;
        for (std::size_t k = 0; k < n_; ++k) {
          if (test(i, k) && test(k, j)) {
            out.reset(i, j);
            break;
          }
        }
      }
    return out;
  }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::size_t n_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

}  // namespace powlmine
