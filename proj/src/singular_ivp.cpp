#include "nk/singular_ivp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <Eigen/Core>
#include <unsupported/Eigen/AutoDiff>

#include "nk/errors.hpp"

namespace nk {

namespace {

using AD4 = Eigen::AutoDiffScalar<Eigen::Vector4d>;
using AD1 = Eigen::AutoDiffScalar<Eigen::Matrix<double, 1, 1>>;

constexpr int kMaxSeriesN = 80;  // (2N)! stays finite in double

double factorial(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

double p_denominator(const P4& p) {
  const double delta = p[2] - p[0];
  return p[1] * p[1] - delta * delta - p[3] * p[3];
}

// h, h', h'', h''' at s from the series polynomial.
struct HJet3 {
  Vec4 h{}, h1{}, h2{}, h3{};
};

std::array<Series, 4> h_series(const SeriesSolution& ser) {
  const int K = ser.order() + 1;
  std::array<Series, 4> p;
  for (auto& x : p) x = Series(K);
  for (std::size_t n = 0; n < ser.coeffs.size(); ++n) {
    const int k = 2 * static_cast<int>(n);
    const double fac = factorial(k);
    for (int i = 0; i < 4; ++i) p[i][k + 1] = ser.coeffs[n][i] / fac;
  }
  // p[i] currently holds s p_i; h3 = s (p3 - p1).
  std::array<Series, 4> h = p;
  h[2] = p[2] - p[0];
  return h;
}

HJet3 h_jet(const std::array<Series, 4>& h, double s) {
  HJet3 j;
  for (int i = 0; i < 4; ++i) {
    const Series d1 = h[i].derivative();
    const Series d2 = d1.derivative();
    const Series d3 = d2.derivative();
    j.h[i] = h[i].eval(s);
    j.h1[i] = d1.eval(s);
    j.h2[i] = d2.eval(s);
    j.h3[i] = d3.eval(s);
  }
  return j;
}

// Same map as f_sample_from_h but with the s-derivatives supplied, so that it
// also works on the singular orbit. f4 = 0 and f5 = h4 / 2.
FSample f_sample_from_jet(double s, const HJet3& j) {
  std::array<AD1, 4> b, bb;
  for (int i = 0; i < 4; ++i) {
    b[i] = AD1(j.h1[i], Eigen::Matrix<double, 1, 1>(j.h2[i]));
    bb[i] = AD1(j.h2[i], Eigen::Matrix<double, 1, 1>(j.h3[i]));
  }
  if (!(j.h1[0] > 0.0)) throw DomainError("reconstruct_nk: b1 must be positive");
  const AD1 f1 = -sqrt(2.0 * b[0]);
  const AD1 f1p = bb[0] / (f1 * f1);
  const AD1 f2p = (b[1] + b[2]) / (2.0 * f1);
  const AD1 f3p = (b[1] - b[2]) / (2.0 * f1);
  const AD1 f5p = b[3] / (2.0 * f1);
  const double f1v = f1.value();

  FSample out;
  out.s = s;
  out.jet.mu = kSingularMu;
  out.jet.f = {f1v, 0.5 * (j.h[1] + j.h[2]), 0.5 * (j.h[1] - j.h[2]), 0.0, 0.5 * j.h[3]};
  out.jet.fp = {f1p.value(), f2p.value(), f3p.value(), 0.0, f5p.value()};
  out.fpp = {f1p.derivatives()[0] / f1v, f2p.derivatives()[0] / f1v, f3p.derivatives()[0] / f1v, 0.0,
             f5p.derivatives()[0] / f1v};
  return out;
}

}  // namespace

// ---- extension conditions ---------------------------------------------------

ExtensionReport extension_conditions(const ExtensionJet& j, double tol) {
  const auto& a = j.alpha;
  const auto& b = j.beta;
  ExtensionReport r;
  r.nondegenerate = std::abs(a[0]) > tol;
  r.parity_ok = j.parity == "EOOEO" && std::abs(a[1]) <= tol && std::abs(a[2]) <= tol &&
                std::abs(a[4]) <= tol && std::abs(a[3]) <= tol;
  r.beta3_residual = b[2] - (0.5 * a[0] + b[1]);
  r.beta5_residual = b[4] - (-0.25 * a[0] - b[1]);
  r.ok = r.parity_ok && std::abs(r.beta3_residual) <= tol && std::abs(r.beta5_residual) <= tol;
  return r;
}

ExtensionJet extension_jet_from_h(const HState& x0) {
  if (!(x0.b[0] > 0.0)) throw DomainError("extension_jet_from_h: h1'(0) must be positive");
  ExtensionJet j;
  const double a1 = -std::sqrt(2.0 * x0.b[0]);
  j.alpha = {a1, 0.5 * (x0.a[1] + x0.a[2]), 0.5 * (x0.a[1] - x0.a[2]), 0.0, 0.5 * x0.a[3]};
  // f' = h' / (2 f1) componentwise; f1'(0) vanishes because h1 is odd.
  j.beta = {0.0, (x0.b[1] + x0.b[2]) / (2.0 * a1), (x0.b[1] - x0.b[2]) / (2.0 * a1), 0.0, x0.b[3] / (2.0 * a1)};
  return j;
}

// ---- p-system ---------------------------------------------------------------

// Written out term by term from the second-order system, independently of
// the A, B, C split below.
P4 p_system_rhs(double s, const P4& p, const P4& q) {
  if (s == 0.0) throw DomainError("p_system_rhs: s = 0");
  const double den = p_denominator(p);
  if (den == 0.0) throw SingularError("p_system_rhs: vanishing denominator");
  const double delta = p[2] - p[0];
  P4 r;
  r[0] = -(2.0 / s) * (q[0] + (18.0 * p[0] * q[0] * delta + p[3] * q[3]) / (9.0 * den)) -
         (2.0 / (s * s)) * (9.0 * p[0] * p[0] * delta + p[3] * p[3]) / (9.0 * den) -
         2.0 * q[0] * q[0] * delta / den;
  r[1] = -(2.0 / s) * q[1] - 48.0 * p[0] * p[1] - 48.0 * s * q[0] * p[1];
  r[2] = -(2.0 / s) * q[2] - 48.0 * p[0] * delta - 48.0 * s * q[0] * delta;
  r[3] = -(2.0 / s) * q[3] - 4.0 * p[3] * (12.0 * p[0] - 1.0) - 48.0 * s * q[0] * p[3];
  return r;
}

AbcSeries abc_decomposition(const std::array<Series, 4>& p, const std::array<Series, 4>& q) {
  const Series delta = p[2] - p[0];
  const Series d = p[1] * p[1] - delta * delta - p[3] * p[3];
  if (d[0] == 0.0) throw DomainError("abc_decomposition: denominator series has zero constant term");
  const int order = std::max(p[0].order(), q[0].order());
  const Series s = Series::variable(order);
  return {detail::abc_A(p), detail::abc_B(p, q), detail::abc_C(s, p, q)};
}

AbcSeries abc_pointwise(double s, const P4& p, const P4& q) {
  std::array<Series, 4> ps, qs;
  for (int i = 0; i < 4; ++i) {
    ps[i] = Series(0, p[i]);
    qs[i] = Series(0, q[i]);
  }
  if (p_denominator(p) == 0.0) throw SingularError("abc_pointwise: vanishing denominator");
  return {detail::abc_A(ps), detail::abc_B(ps, qs), detail::abc_C(Series(0, s), ps, qs)};
}

P4 initial_p(double c1) {
  if (!(c1 > 0.0)) throw DomainError("c1 must be positive");
  const double r = std::sqrt(c1);
  return {c1, -3.0 * c1 * r, 0.0, 3.0 * c1 * r};
}

AbcJacobians abc_jacobians(double c1) {
  const P4 p0 = initial_p(c1);
  std::array<AD4, 4> p, q, pc;
  for (int i = 0; i < 4; ++i) {
    p[i] = AD4(p0[i], 4, i);
    q[i] = AD4(0.0, 4, i);
    pc[i] = AD4(p0[i], Eigen::Vector4d::Zero());
  }
  const auto A = detail::abc_A(p);
  const auto B = detail::abc_B(pc, q);
  AbcJacobians J;
  for (int i = 0; i < 4; ++i) {
    J.dA.row(i) = A[i].derivatives().transpose();
    J.dB_dQ.row(i) = B[i].derivatives().transpose();
  }
  return J;
}

Eigen::Matrix4d l_matrix(int n, double c1) {
  if (n < 0) throw DomainError("l_matrix: n must be nonnegative");
  const AbcJacobians J = abc_jacobians(c1);
  const double a = (2.0 * n + 2.0) * (2.0 * n + 1.0);
  const double b = 2.0 * n + 1.0;
  return Eigen::Matrix4d::Identity() - J.dA / a - J.dB_dQ / b;
}

double l_matrix_det_closed_form(int n) {
  const double m = n;
  const double r = (2.0 * m + 3.0) / (2.0 * m + 1.0);
  return (2.0 * m + 5.0) * (m + 2.0) / ((m + 1.0) * (2.0 * m + 1.0)) * r * r * r;
}

// ---- power series -----------------------------------------------------------

void SeriesSolution::evaluate(double s, P4& p, P4& q) const {
  p = {0.0, 0.0, 0.0, 0.0};
  q = {0.0, 0.0, 0.0, 0.0};
  const double s2 = s * s;
  double pw = 1.0;   // s^(2n)
  double pwq = s;    // s^(2n-1) for the next n
  for (std::size_t n = 0; n < coeffs.size(); ++n) {
    const int k = 2 * static_cast<int>(n);
    const double fac = factorial(k);
    for (int i = 0; i < 4; ++i) {
      const double a = coeffs[n][i] / fac;
      p[i] += a * pw;
      if (k > 0) q[i] += k * a * pwq;
    }
    if (k > 0) pwq *= s2;
    pw *= s2;
  }
}

HState SeriesSolution::h_state(double s) const {
  P4 p, q;
  evaluate(s, p, q);
  HState x;
  x.s = s;
  x.mu = kSingularMu;
  x.a = {s * p[0], s * p[1], s * (p[2] - p[0]), s * p[3]};
  x.b = {p[0] + s * q[0], p[1] + s * q[1], (p[2] - p[0]) + s * (q[2] - q[0]), p[3] + s * q[3]};
  return x;
}

SeriesSolution series_coefficients(double c1, int N) {
  if (!(c1 > 0.0)) throw DomainError("series_coefficients: c1 must be positive");
  if (N < 1 || N > kMaxSeriesN) throw DomainError("series_coefficients: N must be in [1, 80]");

  SeriesSolution out;
  out.c1 = c1;
  const P4 p0 = initial_p(c1);

  // Ordinary Taylor coefficients a_k of P; odd ones stay zero.
  std::vector<Eigen::Vector4d> a(static_cast<std::size_t>(2 * N + 1), Eigen::Vector4d::Zero());
  a[0] = Eigen::Vector4d(p0[0], p0[1], p0[2], p0[3]);

  for (int n = 0; n < N; ++n) {
    const int k = 2 * n + 2;
    const double kk = static_cast<double>(k) * (k - 1);
    // Coefficient of s^(2n) in Q' - A/s^2 - B/s - C, affine in x = a_k.
    auto residual = [&](const Eigen::Vector4d& x) {
      std::array<Series, 4> P, Q;
      for (int i = 0; i < 4; ++i) {
        P[i] = Series(k);
        for (int m = 0; m < k; ++m) P[i][m] = a[static_cast<std::size_t>(m)][i];
        P[i][k] = x[i];
        Q[i] = P[i].derivative();
      }
      const AbcSeries abc = abc_decomposition(P, Q);
      Eigen::Vector4d r;
      for (int i = 0; i < 4; ++i) r[i] = kk * x[i] - (abc.A[i][k] + abc.B[i][k - 1] + abc.C[i][k - 2]);
      return r;
    };
    const Eigen::Vector4d r0 = residual(Eigen::Vector4d::Zero());
    Eigen::Matrix4d M;
    for (int j = 0; j < 4; ++j) M.col(j) = residual(Eigen::Vector4d::Unit(j)) - r0;
    a[static_cast<std::size_t>(k)] = M.partialPivLu().solve(-r0);
    out.step_matrices.push_back(M / kk);
  }

  double radius = std::numeric_limits<double>::infinity();
  for (int n = 0; n <= N; ++n) {
    const int k = 2 * n;
    const Eigen::Vector4d& c = a[static_cast<std::size_t>(k)];
    out.coeffs.push_back(c * factorial(k));
    if (n >= std::max(1, N / 2)) {
      const double nrm = c.lpNorm<Eigen::Infinity>();
      if (nrm > 0.0) radius = std::min(radius, std::pow(nrm, -1.0 / k));
    }
  }
  out.radius_estimate = std::min(radius, 1e6);
  return out;
}

// ---- hybrid solver ----------------------------------------------------------

SingularSolution solve_singular_ivp(double c1, const SingularOptions& opt) {
  if (!(c1 > 0.0)) throw DomainError("solve_singular_ivp: c1 must be positive");
  if (!(opt.tol > 0.0)) throw DomainError("solve_singular_ivp: tol must be positive");
  if (opt.s_max == 0.0 || !std::isfinite(opt.s_max)) throw DomainError("solve_singular_ivp: s_max must be nonzero");
  if (opt.series_nodes < 2) throw DomainError("solve_singular_ivp: series_nodes must be at least 2");

  SingularSolution sol;
  sol.series = series_coefficients(c1, opt.N);
  const double sign = opt.s_max > 0.0 ? 1.0 : -1.0;
  const double span = std::abs(opt.s_max);

  double sw = opt.s_switch ? *opt.s_switch : std::min({0.05, 0.25 * sol.series.radius_estimate, span});
  if (!(sw > 0.0) || sw > span) throw DomainError("solve_singular_ivp: s_switch must lie in (0, |s_max|]");
  if (sw > 0.5 * sol.series.radius_estimate)
    throw DomainError("solve_singular_ivp: s_switch exceeds half the estimated radius of convergence");
  sol.s_switch = sw;

  const SeriesSolution series = sol.series;
  const HState x_sw = series.h_state(sign * sw);

  SolutionCurve ode;
  const bool has_ode = sw < span;
  if (has_ode) {
    const double lo = sign > 0 ? sw : -span;
    const double hi = sign > 0 ? span : -sw;
    ode = integrate(x_sw, lo, hi, opt.tol);

    // Overlap window [s_switch, 1.1 s_switch], clipped to what was integrated.
    const double w_end = std::min(1.1 * sw, sign > 0 ? ode.grid.back() : -ode.grid.front());
    double mismatch = 0.0;
    constexpr int kWindow = 11;
    for (int i = 0; i < kWindow; ++i) {
      const double s = sign * (sw + (w_end - sw) * i / (kWindow - 1));
      const HState xs = series.h_state(s);
      const HState xo = ode.at(s);
      for (int k = 0; k < 4; ++k) {
        mismatch = std::max(mismatch, std::abs(xs.a[k] - xo.a[k]));
        mismatch = std::max(mismatch, std::abs(xs.b[k] - xo.b[k]));
      }
    }
    sol.handoff_mismatch = mismatch;
    if (mismatch > 10.0 * opt.tol) {
      throw NumericalError("solve_singular_ivp: series/ODE handoff mismatch " + std::to_string(mismatch) +
                           " exceeds 10 tol");
    }
  }

  // Series nodes on [0, s_switch) then the integrator's nodes.
  SolutionCurve& c = sol.curve;
  c.mu = kSingularMu;
  std::vector<HState> nodes;
  const int ns = opt.series_nodes;
  for (int i = 0; i < ns; ++i) {
    const double s = sign * sw * i / (ns - 1);
    if (i == ns - 1 && has_ode) break;
    nodes.push_back(series.h_state(s));
  }
  if (has_ode) {
    if (sign > 0) {
      nodes.insert(nodes.end(), ode.states.begin(), ode.states.end());
    } else {
      nodes.insert(nodes.end(), ode.states.rbegin(), ode.states.rend());
    }
    c.meta = ode.meta;
  }
  if (sign < 0) std::reverse(nodes.begin(), nodes.end());
  for (const HState& x : nodes) {
    c.grid.push_back(x.s);
    c.states.push_back(x);
  }

  auto ode_ptr = std::make_shared<const SolutionCurve>(std::move(ode));
  auto ser_ptr = std::make_shared<const SeriesSolution>(series);
  c.set_dense([ode_ptr, ser_ptr, sw, has_ode](double s) {
    if (!has_ode || std::abs(s) <= sw) return ser_ptr->h_state(s).y();
    return ode_ptr->at(s).y();
  });
  c.update_integrals(series.h_state(0.0));
  return sol;
}

// ---- reconstruction and verification ---------------------------------------

double p_prime(const FJet& j) {
  if (j.f[3] != 0.0) throw DomainError("p_prime: requires f4 = 0");
  const double c = 6.0 * j.f[0] * (j.f[1] * j.f[2] - j.f[4] * j.f[4]);
  if (c == 0.0) throw DomainError("p_prime: omega^3 vanishes");
  return coefficients_from_f(j).p_invariant() / (c * c);
}

NkReconstruction reconstruct_nk(double c1, const SingularOptions& opt) {
  NkReconstruction out;
  out.solution = solve_singular_ivp(c1, opt);
  const SingularSolution& sol = out.solution;
  const SolutionCurve& curve = sol.curve;
  const auto hser = h_series(sol.series);

  // Nodes inside the series window use the series jet (the h-system is
  // singular at s = 0); the rest go through the h-system. t(0) = 0.
  const auto f1 = [&](double s) { return -std::sqrt(2.0 * std::max(curve.at(s).b[0], 0.0)); };
  out.fcurve.reserve(curve.grid.size());
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    const double s = curve.grid[i];
    FSample fs = std::abs(s) <= sol.s_switch ? f_sample_from_jet(s, h_jet(hser, s)) : f_sample_from_h(curve.states[i]);
    out.fcurve.push_back(fs);
  }
  // t = int_0^s f1, accumulated outwards from the orbit.
  {
    const std::size_t n = curve.grid.size();
    const bool forward = opt.s_max > 0.0;
    double t = 0.0, prev = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = forward ? k : n - 1 - k;
      const double s = curve.grid[i];
      if (s != prev) t += boost::math::quadrature::gauss<double, 15>::integrate(f1, prev, s);
      prev = s;
      out.fcurve[i].jet.t = t;
    }
  }

  VerificationReport& rep = out.report;
  const HState x0 = sol.series.h_state(0.0);
  rep.extension = extension_conditions(extension_jet_from_h(x0));

  const ExtensionJet ej = extension_jet_from_h(x0);
  rep.p_prime_limit_formula =
      -std::pow(4.0, 5) * std::pow(ej.beta[4], 4) / (std::pow(9.0, 3) * std::pow(ej.alpha[0], 8));
  {
    const double s_eps = (opt.s_max > 0 ? 1.0 : -1.0) * 1e-4;
    rep.p_prime_limit_numeric = p_prime(f_sample_from_jet(s_eps, h_jet(hser, s_eps)).jet);
  }

  std::vector<std::size_t> order(curve.grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return std::abs(curve.grid[x]) < std::abs(curve.grid[y]); });

  rep.stability_ok = rep.p_prime_limit_formula < 0.0 &&
                     std::abs(rep.p_prime_limit_numeric - rep.p_prime_limit_formula) <=
                         1e-6 * std::abs(rep.p_prime_limit_formula);
  if (!rep.stability_ok) rep.stability_failure = "limit value of P' at the singular orbit";
  rep.positivity_ok = true;
  rep.max_p_prime = -std::numeric_limits<double>::infinity();
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  bool prefix_ok = rep.extension.ok && rep.extension.nondegenerate && rep.stability_ok;
  rep.s_valid_max = 0.0;

  for (std::size_t i : order) {
    const double s = curve.grid[i];
    if (s == 0.0) continue;
    const FJet& j = out.fcurve[i].jet;
    bool node_ok = true;

    const double pp = p_prime(j);
    rep.max_p_prime = std::max(rep.max_p_prime, pp);
    const StabilityReport st = stability_data(j);
    // frak > 0 is replaced by f5 != 0 since f5 is carried with its sign.
    const bool stable = pp < 0.0 && j.f[0] < 0.0 && j.f[4] != 0.0 && st.inequality && st.first_condition;
    if (!stable) {
      node_ok = false;
      if (rep.stability_ok) {
        rep.stability_failure = "s = " + std::to_string(s) + ": " +
                                (pp < 0.0 ? (st.failure().empty() ? std::string("f5 = 0") : st.failure())
                                          : std::string("P' >= 0"));
      }
      rep.stability_ok = false;
    }

    try {
      const Eigen::Matrix<double, 6, 6> g = metric_matrix(j);
      const Eigen::Matrix<double, 6, 6> gs = 0.5 * (g + g.transpose());
      const double ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>>(gs).eigenvalues().minCoeff();
      rep.min_eigenvalue = std::min(rep.min_eigenvalue, ev);
      if (!(ev > 0.0)) {
        node_ok = false;
        rep.positivity_ok = false;
      }
    } catch (const Error&) {
      node_ok = false;
      rep.positivity_ok = false;
    }

    if (prefix_ok && node_ok) {
      rep.s_valid_max = std::abs(s);
    } else {
      prefix_ok = false;
    }
  }
  return out;
}

// ---- matching and distinctness ---------------------------------------------

double singular_model_distance(const SolutionCurve& curve, SingularModel m) {
  double d = 0.0;
  for (const HState& x : curve.states) {
    const Point7 a = canonical_representative(x.point7());
    const Point7 b = canonical_representative(singular_model_h(m, x.s).point7());
    d = std::max(d, sup_distance(a, b));
  }
  return d;
}

std::optional<SingularModel> match_singular_model(const SolutionCurve& curve, double tol) {
  for (SingularModel m : {SingularModel::S3xS3, SingularModel::Sphere6}) {
    if (singular_model_distance(curve, m) < tol) return m;
  }
  return std::nullopt;
}

double canonical_curve_distance(const SolutionCurve& x, const SolutionCurve& y, int n) {
  if (x.grid.empty() || y.grid.empty()) throw DomainError("canonical_curve_distance: empty curve");
  if (n < 2) throw DomainError("canonical_curve_distance: need at least two nodes");
  const double lo = std::max(x.grid.front(), y.grid.front());
  const double hi = std::min(x.grid.back(), y.grid.back());
  if (!(hi > lo)) throw DomainError("canonical_curve_distance: ranges do not overlap");
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = lo + (hi - lo) * i / (n - 1);
    if (s == 0.0) continue;
    const Point7 a = canonical_representative(x.at(s).point7());
    const Point7 b = canonical_representative(y.at(s).point7());
    d = std::max(d, sup_distance(a, b));
  }
  return d;
}

}  // namespace nk
