#pragma once

// Multi-indices over (time-mode, noise-mode) slots and their truncated sets.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace chaos_ns {

/// A (time-mode i, noise-mode k) coordinate, both 1-based.
struct Slot {
  int time_mode = 1;
  int noise_mode = 1;

  friend auto operator<=>(const Slot&, const Slot&) = default;
};

inline constexpr int kDefaultOrderCap = 20;
inline constexpr std::size_t kDefaultSizeCap = 100000;

/// Sparse nonnegative multi-index. Entries are kept sorted by slot and zero
/// orders are never stored, so structural equality is value equality.
class MultiIndex {
 public:
  struct Entry {
    Slot slot;
    int order = 0;

    friend bool operator==(const Entry&, const Entry&) = default;
  };

  MultiIndex() = default;
  MultiIndex(std::initializer_list<std::pair<Slot, int>> entries);

  /// Unit index e(i,k).
  static MultiIndex unit(int time_mode, int noise_mode);

  [[nodiscard]] int at(Slot s) const noexcept;
  [[nodiscard]] int at(int time_mode, int noise_mode) const noexcept { return at(Slot{time_mode, noise_mode}); }
  void set(Slot s, int order);

  [[nodiscard]] const std::vector<Entry>& entries() const noexcept { return entries_; }
  [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }

  [[nodiscard]] int order() const noexcept;
  [[nodiscard]] std::uint64_t factorial(int order_cap = kDefaultOrderCap) const;

  /// alpha(i,k): entry (i,k) replaced by max(alpha_i^k - 1, 0).
  [[nodiscard]] MultiIndex decrement(int time_mode, int noise_mode) const;

  [[nodiscard]] std::string to_string() const;

  friend MultiIndex operator+(const MultiIndex& a, const MultiIndex& b);
  /// Componentwise difference; the caller guarantees b <= a.
  friend MultiIndex operator-(const MultiIndex& a, const MultiIndex& b);
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

  /// Componentwise a <= b.
  [[nodiscard]] bool dominated_by(const MultiIndex& other) const noexcept;

 private:
  std::vector<Entry> entries_;
};

int order(const MultiIndex& alpha) noexcept;
std::uint64_t factorial(const MultiIndex& alpha, int order_cap = kDefaultOrderCap);
MultiIndex decrement(const MultiIndex& alpha, int time_mode, int noise_mode);

std::uint64_t int_factorial(int n);

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& alpha) const noexcept;
};

struct Truncation {
  int max_order = 0;    // P
  int time_modes = 1;   // n_t
  int noise_modes = 1;  // n_w

  friend bool operator==(const Truncation&, const Truncation&) = default;
};

/// All multi-indices with |alpha| <= P on the rectangle n_t x n_w, graded
/// lexicographically: by total order, then descending dense exponent vector
/// with slots ordered time-mode major.
class IndexSet {
 public:
  IndexSet(Truncation truncation, std::vector<MultiIndex> indices);

  [[nodiscard]] const Truncation& truncation() const noexcept { return truncation_; }
  [[nodiscard]] const std::vector<MultiIndex>& indices() const noexcept { return indices_; }
  [[nodiscard]] std::size_t size() const noexcept { return indices_.size(); }
  [[nodiscard]] const MultiIndex& operator[](std::size_t pos) const { return indices_[pos]; }

  /// Position of alpha or -1 when alpha is outside the truncated set.
  [[nodiscard]] std::ptrdiff_t find(const MultiIndex& alpha) const;

  [[nodiscard]] std::vector<Slot> slots() const;

  friend bool operator==(const IndexSet& a, const IndexSet& b) {
    return a.truncation_ == b.truncation_ && a.indices_ == b.indices_;
  }

 private:
  Truncation truncation_;
  std::vector<MultiIndex> indices_;
  std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> position_;
};

/// Binomial C(n_t*n_w + P, P), saturating at SIZE_MAX.
std::size_t index_set_cardinality(const Truncation& truncation);

IndexSet enumerate_indices(int max_order, int time_modes, int noise_modes,
                           std::size_t size_cap = kDefaultSizeCap);

}  // namespace chaos_ns
