#include "nk/family.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "nk/errors.hpp"

namespace nk {

namespace {

double max_abs(const Vec4& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

Eigen::Matrix<double, 4, 7> first_integrals_jacobian(const HState& x) {
  const double a2 = x.a[1], a3 = x.a[2], a4 = x.a[3];
  const double b1 = x.b[0], b2 = x.b[1], b3 = x.b[2], b4 = x.b[3];
  const double mu = x.mu;
  const double d = a2 * a2 - a3 * a3 - a4 * a4;
  Eigen::Matrix<double, 4, 7> J;
  J << 24 * mu * a2, -24 * mu * a3, -24 * mu * a4, 1, 0, 1, 0,
       0, 0, 8 * a4, -2 * b1 - 2 * b3, 2 * b2, -2 * b3 - 2 * b1, -2 * b4,
       b2, -b3 - b1, -b4, -a3, a2, -a3, -a4,
       9 * mu * b1 * a2, -9 * mu * b1 * a3, -9 * mu * b1 * a4 + 2 * a4, 4.5 * mu * d, 0, 0, 0;
  return J;
}

HState project_to_constraints(const HState& x, double tol, int max_iter) {
  HState y = x;
  for (int it = 0; it < max_iter; ++it) {
    const Vec4 I = first_integrals(y);
    if (max_abs(I) <= tol) return y;
    const Eigen::Matrix<double, 4, 7> J = first_integrals_jacobian(y);
    const Eigen::Vector4d r(I[0], I[1], I[2], I[3]);
    const Eigen::Matrix<double, 7, 1> step = -J.transpose() * (J * J.transpose()).ldlt().solve(r);
    if (!step.allFinite()) break;
    for (int k = 0; k < 3; ++k) y.a[k + 1] += step[k];
    for (int k = 0; k < 4; ++k) y.b[k] += step[k + 3];
  }
  const double res = max_abs(first_integrals(y));
  if (res <= tol) return y;
  throw NumericalError("project_to_constraints: no convergence, max |I| = " + std::to_string(res));
}

std::vector<HState> random_family_points(const HState& x0, int n, std::uint64_t seed, double scale, double tol) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  std::vector<HState> out;
  int attempts = 0;
  while (static_cast<int>(out.size()) < n) {
    if (++attempts > 100 * std::max(n, 1)) throw NumericalError("random_family_points: too many rejected draws");
    HState y = x0;
    for (int k = 1; k < 4; ++k) y.a[k] += g(rng);
    for (int k = 0; k < 4; ++k) y.b[k] += g(rng);
    try {
      y = project_to_constraints(y, tol);
    } catch (const NumericalError&) {
      continue;
    }
    const MembershipReport m = membership_report(y, 10.0 * tol);
    if (!m.member() || h_denominator_singular(y)) continue;
    out.push_back(y);
  }
  return out;
}

}  // namespace nk
