#include "chaos_ns/hermite.hpp"

#include <string>

#include "chaos_ns/errors.hpp"

namespace chaos_ns {

double hermite(int n, double x) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "Hermite degree must be >= 0");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int m = 1; m < n; ++m) {
    const double next = x * cur - static_cast<double>(m) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double wick_eval(const MultiIndex& alpha, const ChaosCoordinates& xi) {
  double value = 1.0;
  for (const auto& e : alpha.entries()) {
    auto it = xi.find(e.slot);
    if (it == xi.end()) {
      throw Error(ErrorCode::MissingCoordinate, "no coordinate for slot (" + std::to_string(e.slot.time_mode) +
                                                    "," + std::to_string(e.slot.noise_mode) + ")");
    }
    value *= hermite(e.order, it->second);
  }
  return value;
}

}  // namespace chaos_ns
