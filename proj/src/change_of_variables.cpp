#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <Eigen/Core>
#include <unsupported/Eigen/AutoDiff>

#include "nk/errors.hpp"
#include "nk/nk_ode.hpp"

namespace nk {

namespace {

using AD = Eigen::AutoDiffScalar<Eigen::Matrix<double, 1, 1>>;

double gk(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 12, tol);
}

}  // namespace

HState h_state_from_jet(const FJet& j, double s, double a1) {
  const auto& f = j.f;
  const auto& fp = j.fp;
  HState x;
  x.s = s;
  x.mu = j.mu;
  const double fr = j.frak();
  const double frp = fr > 0.0 ? j.frak_prime() : 0.0;
  x.a = {a1, f[1] + f[2], f[1] - f[2], 2.0 * fr};
  x.b = {0.5 * f[0] * f[0], (fp[1] + fp[2]) * f[0], (fp[1] - fp[2]) * f[0], 2.0 * frp * f[0]};
  return x;
}

Vec4 h_second_derivatives(const FJet& j, const F5& fpp) {
  const auto& f = j.f;
  const auto& fp = j.fp;
  const double f1 = f[0], f1p = fp[0];
  const double fr = j.frak();
  if (fr == 0.0) throw DomainError("h_second_derivatives: f4 = f5 = 0");
  const double frp = j.frak_prime();
  const double frpp = (fp[3] * fp[3] + f[3] * fpp[3] + fp[4] * fp[4] + f[4] * fpp[4] - frp * frp) / fr;
  // d/ds = f1 d/dt
  return {
      f1 * f1 * f1p,
      f1 * ((fpp[1] + fpp[2]) * f1 + (fp[1] + fp[2]) * f1p),
      f1 * ((fpp[1] - fpp[2]) * f1 + (fp[1] - fp[2]) * f1p),
      f1 * (2.0 * frpp * f1 + 2.0 * frp * f1p),
  };
}

SolutionCurve to_h(const std::function<FJet(double)>& jet, std::span<const double> t_grid, double t_o, double mu,
                   double quad_tol) {
  if (t_grid.empty()) throw DomainError("to_h: empty grid");
  std::vector<double> ts(t_grid.begin(), t_grid.end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  auto f1_of = [&](double t) {
    const double f1 = jet(t).f[0];
    if (!(f1 < 0.0)) throw DomainError("to_h: f1 must be negative on the range");
    return f1;
  };
  auto inv_f1 = [&](double t) { return 1.0 / f1_of(t); };

  // Node to node, then shift so that s = h1 = 0 at t_o. The anchor is the
  // node nearest t_o, which keeps every quadrature interval short.
  const std::size_t n = ts.size();
  std::vector<double> s(n, 0.0), g(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    s[i] = s[i - 1] + gk(inv_f1, ts[i - 1], ts[i], quad_tol);
    g[i] = g[i - 1] + 0.5 * gk(f1_of, ts[i - 1], ts[i], quad_tol);
  }
  const auto near = std::lower_bound(ts.begin(), ts.end(), t_o);
  std::size_t k = static_cast<std::size_t>(std::min<std::ptrdiff_t>(near - ts.begin(), n - 1));
  if (k > 0 && std::abs(ts[k - 1] - t_o) < std::abs(ts[k] - t_o)) --k;
  const double s0 = s[k] + gk(inv_f1, ts[k], t_o, quad_tol);
  const double g0 = g[k] + 0.5 * gk(f1_of, ts[k], t_o, quad_tol);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] -= s0;
    g[i] -= g0;
  }

  SolutionCurve c;
  c.mu = mu;
  // f1 < 0 makes s decreasing in t.
  for (std::size_t k = n; k-- > 0;) {
    FJet j = jet(ts[k]);
    j.mu = mu;
    c.grid.push_back(s[k]);
    c.states.push_back(h_state_from_jet(j, s[k], g[k]));
  }
  c.update_integrals(c.states.front());
  return c;
}

FSample f_sample_from_h(const HState& x, double theta_o) {
  if (!(x.b[0] > 0.0)) throw DomainError("from_h: b1 must be positive");
  const State8 y = x.y();
  const State8 dy = detail::h_rhs(y, x.mu);
  std::array<AD, 8> ya;
  for (int i = 0; i < 8; ++i) ya[i] = AD(y[i], Eigen::Matrix<double, 1, 1>(dy[i]));
  const std::array<AD, 8> dya = detail::h_rhs(ya, x.mu);

  const AD two_b1 = 2.0 * ya[4];
  const AD f1 = -sqrt(two_b1);
  // t-derivatives (d/dt = (1/f1) d/ds) as functions along the flow.
  const AD f1p = dya[4] / (f1 * f1);
  const AD f2p = (ya[5] + ya[6]) / (2.0 * f1);
  const AD f3p = (ya[5] - ya[6]) / (2.0 * f1);
  const AD frp = ya[7] / (2.0 * f1);

  const double f1v = f1.value();
  const auto [c, s] = phase_cos_sin(theta_o);
  const double fr = 0.5 * y[3];
  const double frpv = frp.value();
  const double frpp = frp.derivatives()[0] / f1v;

  FSample out;
  out.s = x.s;
  out.jet.mu = x.mu;
  out.jet.f = {f1v, 0.5 * (y[1] + y[2]), 0.5 * (y[1] - y[2]), fr * c, fr * s};
  out.jet.fp = {f1p.value(), f2p.value(), f3p.value(), frpv * c, frpv * s};
  out.fpp = {f1p.derivatives()[0] / f1v, f2p.derivatives()[0] / f1v, f3p.derivatives()[0] / f1v, frpp * c,
             frpp * s};
  return out;
}

std::vector<FSample> from_h(const SolutionCurve& curve, double s_ref, double t_ref, double theta_o,
                            double quad_tol) {
  const std::size_t n = curve.grid.size();
  if (n == 0) return {};
  for (const HState& x : curve.states)
    if (!(x.b[0] > 0.0)) throw DomainError("from_h: b1 must be positive on the range");

  // Integral of f1 = -sqrt(2 b1) over [s0, s1].
  auto segment = [&](std::size_t i0, double s0, double s1) -> double {
    if (s0 == s1) return 0.0;
    if (curve.has_dense()) {
      auto f1 = [&](double s) {
        const HState x = curve.at(s);
        return -std::sqrt(2.0 * std::max(x.b[0], 0.0));
      };
      return gk(f1, s0, s1, quad_tol);
    }
    // Hermite-corrected trapezoid on adjacent nodes: f1' = b1' / f1.
    const HState& xa = curve.states[i0];
    const HState& xb = curve.states[i0 + 1];
    const double fa = -std::sqrt(2.0 * xa.b[0]), fb = -std::sqrt(2.0 * xb.b[0]);
    const double da = detail::h_rhs(xa.y(), xa.mu)[4] / fa;
    const double db = detail::h_rhs(xb.y(), xb.mu)[4] / fb;
    const double h = s1 - s0;
    return 0.5 * h * (fa + fb) + h * h / 12.0 * (da - db);
  };

  std::vector<double> cum(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) cum[i] = cum[i - 1] + segment(i - 1, curve.grid[i - 1], curve.grid[i]);

  const auto it = std::lower_bound(curve.grid.begin(), curve.grid.end(), s_ref);
  std::size_t k = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - curve.grid.begin(), n - 1));
  if (k > 0 && std::abs(curve.grid[k - 1] - s_ref) < std::abs(curve.grid[k] - s_ref)) --k;
  double offset = cum[k];
  if (curve.grid[k] != s_ref) {
    if (!curve.has_dense()) throw DomainError("from_h: s_ref must be a grid node when no dense output exists");
    offset += segment(k, curve.grid[k], s_ref);
  }

  std::vector<FSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    FSample fs = f_sample_from_h(curve.states[i], theta_o);
    fs.jet.t = t_ref + cum[i] - offset;
    out.push_back(fs);
  }
  return out;
}

}  // namespace nk
