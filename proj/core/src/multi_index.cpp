#include "chaos_ns/multi_index.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "chaos_ns/errors.hpp"

namespace chaos_ns {

MultiIndex::MultiIndex(std::initializer_list<std::pair<Slot, int>> entries) {
  for (const auto& [slot, ord] : entries) set(slot, at(slot) + ord);
}

MultiIndex MultiIndex::unit(int time_mode, int noise_mode) {
  MultiIndex e;
  e.set(Slot{time_mode, noise_mode}, 1);
  return e;
}

int MultiIndex::at(Slot s) const noexcept {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), s,
                             [](const Entry& e, const Slot& key) { return e.slot < key; });
  return (it != entries_.end() && it->slot == s) ? it->order : 0;
}

void MultiIndex::set(Slot s, int ord) {
  if (s.time_mode < 1 || s.noise_mode < 1)
    throw Error(ErrorCode::InvalidArgument, "multi-index slots are 1-based");
  if (ord < 0) throw Error(ErrorCode::InvalidArgument, "multi-index orders are nonnegative");
  auto it = std::lower_bound(entries_.begin(), entries_.end(), s,
                             [](const Entry& e, const Slot& key) { return e.slot < key; });
  const bool present = it != entries_.end() && it->slot == s;
  if (ord == 0) {
    if (present) entries_.erase(it);
  } else if (present) {
    it->order = ord;
  } else {
    entries_.insert(it, Entry{s, ord});
  }
}

int MultiIndex::order() const noexcept {
  int total = 0;
  for (const auto& e : entries_) total += e.order;
  return total;
}

std::uint64_t int_factorial(int n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative factorial");
  if (n > 20) throw Error(ErrorCode::OrderCapExceeded, "n! overflows 64 bits for n > 20");
  std::uint64_t r = 1;
  for (int i = 2; i <= n; ++i) r *= static_cast<std::uint64_t>(i);
  return r;
}

std::uint64_t MultiIndex::factorial(int order_cap) const {
  const int total = order();
  if (total > order_cap || order_cap > kDefaultOrderCap) {
    throw Error(ErrorCode::OrderCapExceeded,
                "|alpha| = " + std::to_string(total) + " exceeds cap " + std::to_string(order_cap));
  }
  std::uint64_t r = 1;
  for (const auto& e : entries_) r *= int_factorial(e.order);
  return r;
}

MultiIndex MultiIndex::decrement(int time_mode, int noise_mode) const {
  if (time_mode < 1 || noise_mode < 1)
    throw Error(ErrorCode::InvalidArgument, "decrement slot must be 1-based");
  MultiIndex out = *this;
  const Slot s{time_mode, noise_mode};
  const int current = at(s);
  if (current > 0) out.set(s, current - 1);
  return out;
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& e : entries_) {
    if (!first) os << ", ";
    first = false;
    os << '(' << e.slot.time_mode << ',' << e.slot.noise_mode << "):" << e.order;
  }
  os << '}';
  return os.str();
}

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
  MultiIndex out = a;
  for (const auto& e : b.entries_) out.set(e.slot, out.at(e.slot) + e.order);
  return out;
}

MultiIndex operator-(const MultiIndex& a, const MultiIndex& b) {
  MultiIndex out = a;
  for (const auto& e : b.entries_) {
    const int diff = out.at(e.slot) - e.order;
    if (diff < 0) throw Error(ErrorCode::InvalidArgument, "multi-index difference went negative");
    out.set(e.slot, diff);
  }
  return out;
}

bool MultiIndex::dominated_by(const MultiIndex& other) const noexcept {
  return std::all_of(entries_.begin(), entries_.end(),
                     [&](const Entry& e) { return e.order <= other.at(e.slot); });
}

int order(const MultiIndex& alpha) noexcept { return alpha.order(); }

std::uint64_t factorial(const MultiIndex& alpha, int order_cap) { return alpha.factorial(order_cap); }

MultiIndex decrement(const MultiIndex& alpha, int time_mode, int noise_mode) {
  return alpha.decrement(time_mode, noise_mode);
}

std::size_t MultiIndexHash::operator()(const MultiIndex& alpha) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::size_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  for (const auto& e : alpha.entries()) {
    mix(static_cast<std::size_t>(e.slot.time_mode));
    mix(static_cast<std::size_t>(e.slot.noise_mode));
    mix(static_cast<std::size_t>(e.order));
  }
  return h;
}

IndexSet::IndexSet(Truncation truncation, std::vector<MultiIndex> indices)
    : truncation_(truncation), indices_(std::move(indices)) {
  position_.reserve(indices_.size());
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (!position_.emplace(indices_[i], i).second)
      throw Error(ErrorCode::InvalidArgument, "duplicate multi-index " + indices_[i].to_string());
  }
}

std::ptrdiff_t IndexSet::find(const MultiIndex& alpha) const {
  auto it = position_.find(alpha);
  return it == position_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::vector<Slot> IndexSet::slots() const {
  std::vector<Slot> out;
  for (int i = 1; i <= truncation_.time_modes; ++i)
    for (int k = 1; k <= truncation_.noise_modes; ++k) out.push_back(Slot{i, k});
  return out;
}

std::size_t index_set_cardinality(const Truncation& t) {
  // C(m + P, P) computed incrementally; each partial product is itself a binomial.
  const std::size_t m = static_cast<std::size_t>(t.time_modes) * static_cast<std::size_t>(t.noise_modes);
  unsigned __int128 c = 1;
  for (int j = 1; j <= t.max_order; ++j) {
    c = c * (m + static_cast<std::size_t>(j)) / static_cast<std::size_t>(j);
    if (c > std::numeric_limits<std::size_t>::max()) return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(c);
}

namespace {

// Emits every exponent vector of total `remaining` over slots [pos, end) in
// descending lexicographic order.
void compositions(std::vector<int>& dense, std::size_t pos, int remaining,
                  const std::vector<Slot>& slots, std::vector<MultiIndex>& out) {
  if (pos + 1 == dense.size()) {
    dense[pos] = remaining;
    MultiIndex alpha;
    for (std::size_t s = 0; s < dense.size(); ++s)
      if (dense[s] > 0) alpha.set(slots[s], dense[s]);
    out.push_back(std::move(alpha));
    dense[pos] = 0;
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    dense[pos] = v;
    compositions(dense, pos + 1, remaining - v, slots, out);
  }
  dense[pos] = 0;
}

}  // namespace

IndexSet enumerate_indices(int max_order, int time_modes, int noise_modes, std::size_t size_cap) {
  if (max_order < 0 || time_modes < 1 || noise_modes < 1)
    throw Error(ErrorCode::InvalidArgument, "need P >= 0, n_t >= 1, n_w >= 1");
  const Truncation t{max_order, time_modes, noise_modes};
  const std::size_t count = index_set_cardinality(t);
  if (count > size_cap) {
    throw Error(ErrorCode::SizeCapExceeded,
                "index set would hold " + std::to_string(count) + " entries (cap " + std::to_string(size_cap) + ")");
  }
  std::vector<Slot> slots;
  for (int i = 1; i <= time_modes; ++i)
    for (int k = 1; k <= noise_modes; ++k) slots.push_back(Slot{i, k});

  std::vector<MultiIndex> out;
  out.reserve(count);
  std::vector<int> dense(slots.size(), 0);
  for (int p = 0; p <= max_order; ++p) compositions(dense, 0, p, slots, out);
  return IndexSet(t, std::move(out));
}

}  // namespace chaos_ns
