#include "chaos_ns/coupling.hpp"

#include <algorithm>
#include <set>

#include "chaos_ns/errors.hpp"

namespace chaos_ns {

namespace {

std::set<Slot> joint_support(const MultiIndex& a, const MultiIndex& b, const MultiIndex& c) {
  std::set<Slot> s;
  for (const auto* m : {&a, &b, &c})
    for (const auto& e : m->entries()) s.insert(e.slot);
  return s;
}

}  // namespace

bool is_complete(const MultiIndex& alpha, const MultiIndex& beta, const MultiIndex& gamma) {
  for (const Slot& s : joint_support(alpha, beta, gamma)) {
    const int a = alpha.at(s), b = beta.at(s), c = gamma.at(s);
    if ((a + b + c) % 2 != 0) return false;
    if (c < std::abs(a - b) || c > a + b) return false;
  }
  return true;
}

Rational phi(const MultiIndex& alpha, const MultiIndex& beta, const MultiIndex& gamma) {
  if (!is_complete(alpha, beta, gamma)) {
    throw Error(ErrorCode::NotComplete, alpha.to_string() + ", " + beta.to_string() + ", " + gamma.to_string());
  }
  std::int64_t denom = 1;
  for (const Slot& s : joint_support(alpha, beta, gamma)) {
    const int a = alpha.at(s), b = beta.at(s), c = gamma.at(s);
    denom *= static_cast<std::int64_t>(int_factorial((a - b + c) / 2));
    denom *= static_cast<std::int64_t>(int_factorial((b - a + c) / 2));
    denom *= static_cast<std::int64_t>(int_factorial((a + b - c) / 2));
  }
  return Rational(1, denom);
}

std::size_t CouplingTable::entry_count() const noexcept {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.size();
  return n;
}

namespace {

// Complete triples are exactly alpha = x + y, beta = x + z, gamma = y + z with
// x, y, z >= 0, and then Phi = 1 / (x! y! z!).
void sub_indices(const MultiIndex& alpha, std::size_t pos, MultiIndex& current, std::vector<MultiIndex>& out) {
  const auto& entries = alpha.entries();
  if (pos == entries.size()) {
    out.push_back(current);
    return;
  }
  for (int v = 0; v <= entries[pos].order; ++v) {
    current.set(entries[pos].slot, v);
    sub_indices(alpha, pos + 1, current, out);
  }
  current.set(entries[pos].slot, 0);
}

}  // namespace

CouplingTable build_coupling_table(const IndexSet& set, int workers) {
  const int max_order = set.truncation().max_order;
  std::vector<std::vector<CouplingEntry>> rows(set.size());

  // Positions of indices grouped by order, so z can be drawn by order bound.
  std::vector<std::size_t> by_order_end(static_cast<std::size_t>(max_order) + 2, 0);
  for (std::size_t p = 0; p < set.size(); ++p) by_order_end[static_cast<std::size_t>(set[p].order()) + 1] = p + 1;
  for (std::size_t o = 1; o < by_order_end.size(); ++o)
    by_order_end[o] = std::max(by_order_end[o], by_order_end[o - 1]);

  const auto n = static_cast<std::ptrdiff_t>(set.size());
#pragma omp parallel for num_threads(std::max(1, workers)) schedule(dynamic, 8)
  for (std::ptrdiff_t a = 0; a < n; ++a) {
    const MultiIndex& alpha = set[static_cast<std::size_t>(a)];
    const auto alpha_fact = static_cast<std::int64_t>(alpha.factorial());
    std::vector<MultiIndex> xs;
    MultiIndex scratch;
    sub_indices(alpha, 0, scratch, xs);
    auto& row = rows[static_cast<std::size_t>(a)];
    for (const MultiIndex& x : xs) {
      const MultiIndex y = alpha - x;
      const int budget = max_order - std::max(x.order(), y.order());
      if (budget < 0) continue;
      const auto x_fact = static_cast<std::int64_t>(x.factorial());
      const auto y_fact = static_cast<std::int64_t>(y.factorial());
      const std::size_t z_end = by_order_end[static_cast<std::size_t>(budget) + 1];
      for (std::size_t zp = 0; zp < z_end; ++zp) {
        const MultiIndex& z = set[zp];
        const auto beta = set.find(x + z);
        const auto gamma = set.find(y + z);
        if (beta < 0 || gamma < 0) continue;
        const auto z_fact = static_cast<std::int64_t>(z.factorial());
        row.push_back(CouplingEntry{static_cast<std::size_t>(beta), static_cast<std::size_t>(gamma),
                                    Rational(alpha_fact, x_fact) / y_fact / z_fact});
      }
    }
    std::sort(row.begin(), row.end(), [](const CouplingEntry& l, const CouplingEntry& r) {
      return l.beta != r.beta ? l.beta < r.beta : l.gamma < r.gamma;
    });
  }
  return CouplingTable(std::move(rows));
}

}  // namespace chaos_ns
