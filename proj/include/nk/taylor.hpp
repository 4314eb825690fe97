#pragma once

// Dense truncated power series c_0 + c_1 s + ... + c_M s^M with arithmetic
// closed at the truncation order M (the minimum order of the operands).

#include <algorithm>
#include <vector>

#include "nk/errors.hpp"

namespace nk {

class Series {
 public:
  Series() : c_(1, 0.0) {}
  explicit Series(int order, double c0 = 0.0) : c_(static_cast<std::size_t>(order) + 1, 0.0) { c_[0] = c0; }

  // The identity function s.
  static Series variable(int order) {
    Series x(order);
    if (order >= 1) x.c_[1] = 1.0;
    return x;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  double operator[](int k) const { return k <= order() ? c_[static_cast<std::size_t>(k)] : 0.0; }
  double& operator[](int k) { return c_.at(static_cast<std::size_t>(k)); }

  double eval(double s) const {
    double acc = 0.0;
    for (std::size_t k = c_.size(); k-- > 0;) acc = acc * s + c_[k];
    return acc;
  }

  Series& operator+=(const Series& o) {
    truncate(std::min(order(), o.order()));
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  Series& operator-=(const Series& o) {
    truncate(std::min(order(), o.order()));
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Series& operator*=(double a) {
    for (double& x : c_) x *= a;
    return *this;
  }
  // Scalars act on the constant term only.
  Series& operator+=(double a) {
    c_[0] += a;
    return *this;
  }
  Series& operator-=(double a) {
    c_[0] -= a;
    return *this;
  }

  friend Series operator+(Series a, const Series& b) { return a += b; }
  friend Series operator-(Series a, const Series& b) { return a -= b; }
  friend Series operator-(Series a) { return a *= -1.0; }
  friend Series operator*(Series a, double x) { return a *= x; }
  friend Series operator*(double x, Series a) { return a *= x; }
  friend Series operator/(Series a, double x) { return a *= 1.0 / x; }
  friend Series operator+(Series a, double x) { return a += x; }
  friend Series operator+(double x, Series a) { return a += x; }
  friend Series operator-(Series a, double x) { return a -= x; }
  friend Series operator-(double x, Series a) {
    a *= -1.0;
    return a += x;
  }

  friend Series operator*(const Series& a, const Series& b) {
    const int m = std::min(a.order(), b.order());
    Series r(m);
    for (int i = 0; i <= m; ++i) {
      if (a.c_[i] == 0.0) continue;
      for (int j = 0; i + j <= m; ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
    }
    return r;
  }

  // Requires a nonzero constant term in the divisor.
  friend Series operator/(const Series& a, const Series& b) {
    if (b.c_[0] == 0.0) throw DomainError("Series division: divisor has zero constant term");
    const int m = std::min(a.order(), b.order());
    Series r(m);
    for (int k = 0; k <= m; ++k) {
      double acc = a.c_[k];
      for (int j = 1; j <= k; ++j) acc -= b.c_[j] * r.c_[k - j];
      r.c_[k] = acc / b.c_[0];
    }
    return r;
  }

  // Known to one order less than the operand.
  Series derivative() const {
    Series r(std::max(order() - 1, 0));
    for (int k = 1; k <= order(); ++k) r.c_[k - 1] = k * c_[k];
    return r;
  }

  void truncate(int order) {
    if (order < this->order()) c_.resize(static_cast<std::size_t>(order) + 1);
  }

 private:
  std::vector<double> c_;
};

}  // namespace nk
