#include "chaos_ns/time_basis.hpp"

#include <cmath>
#include <string>

#include "chaos_ns/errors.hpp"

namespace chaos_ns {

double legendre(int n, double s) {
  if (n == 0) return 1.0;
  double prev = 1.0, cur = s;
  for (int m = 1; m < n; ++m) {
    const double next = ((2.0 * m + 1.0) * s * cur - m * prev) / (m + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

TimeBasis::TimeBasis(double horizon, int count) : horizon_(horizon), count_(count) {
  if (!(horizon > 0.0)) throw Error(ErrorCode::InvalidArgument, "time horizon must be positive");
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "time basis needs at least one function");
}

void TimeBasis::check(int i, double t) const {
  if (i < 1 || i > count_) throw Error(ErrorCode::InvalidArgument, "time mode " + std::to_string(i) + " out of range");
  // Stage times may overshoot T by round-off.
  const double slack = 1e-12 * horizon_;
  if (!(t >= -slack && t <= horizon_ + slack))
    throw Error(ErrorCode::TimeOutOfRange, "t = " + std::to_string(t) + " outside [0, " + std::to_string(horizon_) + "]");
}

double TimeBasis::value(int i, double t) const {
  check(i, t);
  const int n = i - 1;
  const double s = 2.0 * t / horizon_ - 1.0;
  return std::sqrt((2.0 * n + 1.0) / horizon_) * legendre(n, s);
}

double TimeBasis::antiderivative(int i, double t) const {
  check(i, t);
  const int n = i - 1;
  const double s = 2.0 * t / horizon_ - 1.0;
  const double norm = std::sqrt((2.0 * n + 1.0) / horizon_) * 0.5 * horizon_;
  if (n == 0) return norm * (s + 1.0);
  // int_{-1}^{s} P_n = (P_{n+1}(s) - P_{n-1}(s)) / (2n+1); the lower limit cancels.
  return norm * (legendre(n + 1, s) - legendre(n - 1, s)) / (2.0 * n + 1.0);
}

}  // namespace chaos_ns
