#pragma once

// Complete triples, the Phi weights and the per-index coupling table used by
// the nonlinear term of the propagator.

#include <cstddef>
#include <cstdint>
#include <vector>

#include <boost/rational.hpp>

#include "chaos_ns/multi_index.hpp"

namespace chaos_ns {

using Rational = boost::rational<std::int64_t>;

/// Every entry of alpha+beta+gamma is even and |alpha-beta| <= gamma <= alpha+beta
/// componentwise.
bool is_complete(const MultiIndex& alpha, const MultiIndex& beta, const MultiIndex& gamma);

/// 1 / [((a-b+c)/2)! ((b-a+c)/2)! ((a+b-c)/2)!]; throws NotComplete otherwise.
Rational phi(const MultiIndex& alpha, const MultiIndex& beta, const MultiIndex& gamma);

struct CouplingEntry {
  std::size_t beta = 0;   // position in the index set
  std::size_t gamma = 0;  // position in the index set
  Rational weight;        // alpha! * Phi(alpha, beta, gamma)

  friend bool operator==(const CouplingEntry&, const CouplingEntry&) = default;
};

class CouplingTable {
 public:
  CouplingTable() = default;
  explicit CouplingTable(std::vector<std::vector<CouplingEntry>> rows) : rows_(std::move(rows)) {}

  [[nodiscard]] const std::vector<CouplingEntry>& row(std::size_t alpha) const { return rows_.at(alpha); }
  [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }
  [[nodiscard]] std::size_t entry_count() const noexcept;

 private:
  std::vector<std::vector<CouplingEntry>> rows_;
};

/// Lists, for each alpha, all (beta, gamma) inside the set that complete it.
/// Rows are sorted by (beta, gamma) position. `workers` only affects speed.
CouplingTable build_coupling_table(const IndexSet& set, int workers = 1);

}  // namespace chaos_ns
