#pragma once

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "nk/forms6.hpp"
#include "nk/invariant_frame.hpp"
#include "nk/nk_ode.hpp"

namespace testing {

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20240611);
  return g;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline nk::KForm random_form(int degree, double scale = 1.0) {
  nk::KForm a(degree);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = uniform(-scale, scale);
  return a;
}

inline nk::Vec6 random_vec() {
  nk::Vec6 v;
  for (int i = 0; i < 6; ++i) v[i] = uniform(-1.0, 1.0);
  return v;
}

// Sign of the permutation of 0..n-1 given by p.
inline int perm_sign(const std::vector<int>& p) {
  int s = 1;
  std::vector<int> q = p;
  for (std::size_t i = 0; i < q.size(); ++i)
    while (q[i] != static_cast<int>(i)) {
      std::swap(q[i], q[q[i]]);
      s = -s;
    }
  return s;
}

// Dense antisymmetric tensor theta_{ijk} of a 3-form.
inline std::array<double, 216> dense3(const nk::KForm& t) {
  std::array<double, 216> d{};
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      for (int k = j + 1; k < 6; ++k) {
        const double c = t.at({i, j, k});
        const int idx[3] = {i, j, k};
        std::vector<int> p = {0, 1, 2};
        do {
          const int sg = perm_sign(p);
          d[36 * idx[p[0]] + 6 * idx[p[1]] + idx[p[2]]] = sg * c;
        } while (std::next_permutation(p.begin(), p.end()));
      }
  return d;
}

// Levi-Civita symbol on 6 indices.
inline int epsilon6(const std::array<int, 6>& ix) {
  std::vector<int> p(ix.begin(), ix.end());
  std::vector<int> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 6; ++i)
    if (sorted[i] != i) return 0;
  return perm_sign(p);
}

// S^a_b = (1/12) eps^{c d e f g a} theta_{b c d} theta_{e f g}, computed with
// dense tensors; vol = e^{012345}.
inline nk::Endo6 hitchin_oracle(const nk::KForm& theta) {
  const auto t = dense3(theta);
  nk::Endo6 S = nk::Endo6::Zero();
  std::array<int, 6> ix{};
  std::vector<int> p = {0, 1, 2, 3, 4, 5};
  do {
    for (int k = 0; k < 6; ++k) ix[k] = p[k];
    const int e = epsilon6(ix);
    const int c = ix[0], d = ix[1], ee = ix[2], f = ix[3], g = ix[4], a = ix[5];
    for (int b = 0; b < 6; ++b) S(a, b) += e * t[36 * b + 6 * c + d] * t[36 * ee + 6 * f + g] / 12.0;
  } while (std::next_permutation(p.begin(), p.end()));
  return S;
}

inline nk::KForm standard_form() {
  return nk::KForm::basis({0, 2, 4}) - nk::KForm::basis({0, 3, 5}) - nk::KForm::basis({1, 2, 5}) -
         nk::KForm::basis({1, 3, 4});
}

// Jet with f1 < 0, frak > 0 and constant phase theta; derivatives random.
inline nk::FJet random_phase_jet(double theta, double mu = 1.0) {
  nk::FJet j;
  j.mu = mu;
  const double fr = uniform(0.2, 1.0), frp = uniform(-1.0, 1.0);
  j.f = {uniform(-1.5, -0.3), uniform(-1.0, 1.0), uniform(-1.0, 1.0), fr * std::cos(theta), fr * std::sin(theta)};
  j.fp = {uniform(-1.0, 1.0), uniform(-1.0, 1.0), uniform(-1.0, 1.0), frp * std::cos(theta), frp * std::sin(theta)};
  return j;
}

// Jet that satisfies the first condition 4 frak^2 = (frak'^2 - (f2'+f1/4)(f3'-f1/4)) f1^2
// with the inequality, obtained by solving for f3'.
inline nk::FJet random_admissible_jet(double mu = 1.0) {
  for (;;) {
    nk::FJet j = random_phase_jet(uniform(0.0, 2.0 * M_PI), mu);
    const double f1 = j.f[0];
    const double fr = j.frak(), frp = j.frak_prime();
    const double u = j.fp[1] + f1 / 4.0;
    if (std::abs(u) < 0.1) continue;
    // (f3' - f1/4) = (frp^2 - 4 fr^2 / f1^2) / u
    const double v = (frp * frp - 4.0 * fr * fr / (f1 * f1)) / u;
    j.fp[2] = v + f1 / 4.0;
    if (nk::stability_data(j).ok) return j;
  }
}

// Admissible and with omega ^ psi = 0 as well: f2', f3' solve the first
// condition (X Y = C with X = f2' + f1/4, Y = f3' - f1/4) together with the
// linear condition (f2 f3 - frak^2)' + f1 (f3 - f2) / 4 = 0.
inline nk::FJet random_compatible_jet(double mu = 1.0) {
  for (;;) {
    nk::FJet j = random_phase_jet(uniform(0.0, 2.0 * M_PI), mu);
    const double f1 = j.f[0], f2 = j.f[1], f3 = j.f[2];
    const double fr = j.frak(), frp = j.frak_prime();
    const double C = frp * frp - 4.0 * fr * fr / (f1 * f1);
    const double E = 2.0 * fr * frp;  // f3 X + f2 Y
    const double disc = E * E - 4.0 * f2 * f3 * C;
    if (disc < 0.0 || std::abs(f3) < 0.1) continue;
    const double X = (E + std::sqrt(disc)) / (2.0 * f3);
    if (std::abs(X) < 1e-3) continue;
    j.fp[1] = X - f1 / 4.0;
    j.fp[2] = C / X + f1 / 4.0;
    if (nk::stability_data(j).ok) return j;
  }
}

inline nk::HState x_o() {
  nk::HState x;
  x.mu = 2.0;
  const double r3 = std::sqrt(3.0), r6 = std::sqrt(6.0), r2 = std::sqrt(2.0);
  x.a = {0.0, r3 / 36.0, r3 / 36.0, r6 / 36.0};
  x.b = {4.0 / 36.0, 0.0, 0.0, -2.0 * r2 / 36.0};
  return x;
}

template <class A>
double max_abs_diff(const A& x, const A& y) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

inline double max_abs_diff(const nk::HState& x, const nk::HState& y) {
  return std::max(max_abs_diff(x.a, y.a), max_abs_diff(x.b, y.b));
}

}  // namespace testing
