#include <algorithm>
#include <cmath>
#include <memory>

#include <boost/numeric/odeint.hpp>

#include "nk/errors.hpp"
#include "nk/nk_ode.hpp"

namespace nk {

namespace {

namespace odeint = boost::numeric::odeint;

// The dopri5 interpolant is a polynomial of degree 5 in the step fraction, so
// six equally spaced samples per step reproduce it exactly.
constexpr int kSamples = 6;

struct Segment {
  double t0 = 0.0, t1 = 0.0;
  std::array<State8, kSamples> y{};

  double lo() const { return std::min(t0, t1); }
  double hi() const { return std::max(t0, t1); }

  State8 eval(double t) const {
    const double th = (t - t0) / (t1 - t0) * (kSamples - 1);
    State8 out{};
    for (int k = 0; k < kSamples; ++k) {
      double w = 1.0;
      for (int m = 0; m < kSamples; ++m)
        if (m != k) w *= (th - m) / static_cast<double>(k - m);
      for (int i = 0; i < 8; ++i) out[i] += w * y[k][i];
    }
    return out;
  }
};

struct Leg {
  std::vector<double> t;
  std::vector<State8> y;
  std::vector<Segment> segments;
  SolverStats stats;
};

bool finite(const State8& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

Leg run_leg(const HState& x0, double s_end, double tol, const IntegrateOptions& opt) {
  Leg leg;
  const double mu = x0.mu;
  const double dir = s_end > x0.s ? 1.0 : -1.0;
  const double den0 = h_denominator(x0);

  auto sys = [&](const State8& y, State8& dy, double) {
    ++leg.stats.rhs_evaluations;
    dy = detail::h_rhs(y, mu);
    // Non-finite derivatives must make the error estimate fail, not pass.
    for (double& v : dy)
      if (!std::isfinite(v)) v = 1e200;
  };

  auto stepper = odeint::make_dense_output(tol, tol, odeint::runge_kutta_dopri5<State8>());
  const double dt0 = dir * std::min(opt.initial_step, std::abs(s_end - x0.s));
  stepper.initialize(x0.y(), x0.s, dt0);

  while (true) {
    if (leg.stats.steps >= opt.max_steps) {
      leg.stats.reason = StopReason::MaxSteps;
      leg.stats.message = "maximum number of steps reached";
      break;
    }
    std::pair<double, double> iv;
    try {
      iv = stepper.do_step(sys);
    } catch (const odeint::step_adjustment_error& e) {
      leg.stats.reason = StopReason::StepUnderflow;
      leg.stats.message = e.what();
      break;
    }
    ++leg.stats.steps;
    const State8 y1 = stepper.current_state();
    if (!finite(y1)) {
      leg.stats.reason = StopReason::NonFinite;
      leg.stats.message = "non-finite state";
      break;
    }
    const HState h1 = HState::from_y(iv.second, y1, mu);
    if (h_denominator_singular(h1) || (h_denominator(h1) > 0.0) != (den0 > 0.0)) {
      leg.stats.reason = StopReason::Singularity;
      leg.stats.message = "denominator a2^2 - a3^2 - a4^2 vanishes near s = " + std::to_string(iv.second);
      break;
    }

    Segment seg;
    seg.t0 = iv.first;
    seg.t1 = iv.second;
    for (int k = 0; k < kSamples; ++k) {
      const double t = iv.first + (iv.second - iv.first) * k / (kSamples - 1.0);
      stepper.calc_state(t, seg.y[k]);
    }
    // Keep the exact step endpoints rather than re-interpolated copies.
    seg.y[kSamples - 1] = y1;
    leg.segments.push_back(seg);

    const bool last = dir * (iv.second - s_end) >= 0.0;
    if (last) {
      State8 ye;
      stepper.calc_state(s_end, ye);
      leg.t.push_back(s_end);
      leg.y.push_back(ye);
      break;
    }
    leg.t.push_back(iv.second);
    leg.y.push_back(y1);

    const double h = std::abs(stepper.current_time_step());
    if (h < 1e-14 * std::max(1.0, std::abs(iv.second))) {
      leg.stats.reason = StopReason::StepUnderflow;
      leg.stats.message = "step size underflow near s = " + std::to_string(iv.second);
      break;
    }
  }
  return leg;
}

}  // namespace

SolutionCurve integrate(const HState& x0, double lo, double hi, double tol, IntegrateOptions opt) {
  if (!(tol > 0.0)) throw DomainError("integrate: tolerance must be positive");
  if (!(lo <= x0.s && x0.s <= hi)) throw DomainError("integrate: span must contain the initial point");
  if (x0.b[0] <= 0.0) throw DomainError("integrate: initial state must have b1 > 0");
  if (h_denominator_singular(x0)) throw SingularError("integrate: initial state on the denominator locus");

  Leg back, fwd;
  if (lo < x0.s) back = run_leg(x0, lo, tol, opt);
  if (hi > x0.s) fwd = run_leg(x0, hi, tol, opt);

  SolutionCurve c;
  c.mu = x0.mu;
  for (std::size_t i = back.t.size(); i-- > 0;) {
    c.grid.push_back(back.t[i]);
    c.states.push_back(HState::from_y(back.t[i], back.y[i], x0.mu));
  }
  c.grid.push_back(x0.s);
  c.states.push_back(x0);
  for (std::size_t i = 0; i < fwd.t.size(); ++i) {
    c.grid.push_back(fwd.t[i]);
    c.states.push_back(HState::from_y(fwd.t[i], fwd.y[i], x0.mu));
  }

  c.meta.steps = back.stats.steps + fwd.stats.steps;
  c.meta.rhs_evaluations = back.stats.rhs_evaluations + fwd.stats.rhs_evaluations;
  const SolverStats& bad = back.stats.reason != StopReason::Completed ? back.stats : fwd.stats;
  c.meta.reason = bad.reason;
  c.meta.message = bad.message;

  auto segs = std::make_shared<std::vector<Segment>>();
  for (std::size_t i = back.segments.size(); i-- > 0;) segs->push_back(back.segments[i]);
  segs->insert(segs->end(), fwd.segments.begin(), fwd.segments.end());
  const State8 y0 = x0.y();
  c.set_dense([segs, y0](double s) -> State8 {
    if (segs->empty()) return y0;
    auto it = std::lower_bound(segs->begin(), segs->end(), s, [](const Segment& g, double v) { return g.hi() < v; });
    if (it == segs->end()) --it;
    return it->eval(s);
  });

  c.update_integrals(x0);
  return c;
}

}  // namespace nk
