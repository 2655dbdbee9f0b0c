#pragma once

namespace chaos_ns {

/// Orthonormal shifted Legendre polynomials m_1..m_{n_t} on [0, T], with
/// m_1 = 1/sqrt(T), and their exact antiderivatives M_i(t) = int_0^t m_i.
class TimeBasis {
 public:
  TimeBasis(double horizon, int count);

  [[nodiscard]] double horizon() const noexcept { return horizon_; }
  [[nodiscard]] int size() const noexcept { return count_; }

  /// m_i(t), i is 1-based. t outside [0, T] throws TimeOutOfRange.
  [[nodiscard]] double value(int i, double t) const;
  [[nodiscard]] double antiderivative(int i, double t) const;

 private:
  void check(int i, double t) const;

  double horizon_;
  int count_;
};

/// Legendre polynomial P_n(s) on [-1, 1].
double legendre(int n, double s);

}  // namespace chaos_ns
