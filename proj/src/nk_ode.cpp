#include "nk/nk_ode.hpp"

#include <algorithm>
#include <cmath>

#include "nk/errors.hpp"

namespace nk {

std::array<double, 5> f_system_residual(const FJet& j, const F5& fpp) {
  const auto& f = j.f;
  const auto& fp = j.fp;
  const double mu = j.mu;
  if (f[0] == 0.0) throw DomainError("f_system_residual: f1 = 0");
  const double fr = j.frak();
  if (fr == 0.0) throw DomainError("f_system_residual: f4 = f5 = 0");
  const double frp = j.frak_prime();
  const double frpp = (fp[3] * fp[3] + f[3] * fpp[3] + fp[4] * fp[4] + f[4] * fpp[4] - frp * frp) / fr;

  const double f1 = f[0], f1p = fp[0];
  std::array<double, 5> r{};
  r[0] = (fpp[1] + f1p / 4.0) * f1 + (fp[1] + f1 / 4.0) * f1p + 12.0 * mu * f1 * f[1];
  r[1] = (fpp[2] - f1p / 4.0) * f1 + (fp[2] - f1 / 4.0) * f1p + 12.0 * mu * f1 * f[2];
  r[2] = frpp * f1 + frp * f1p - 4.0 * fr / f1 + 12.0 * mu * f1 * fr;
  r[3] = f1 * (fp[1] - fp[2] + f1 / 2.0) + 48.0 * mu * (f[1] * f[2] - fr * fr);
  r[4] = 4.0 * fr * fr - (frp * frp - (fp[1] + f1 / 4.0) * (fp[2] - f1 / 4.0)) * f1 * f1;
  return r;
}

HState HState::from_y(double s, const State8& y, double mu) {
  HState x;
  x.s = s;
  x.mu = mu;
  for (int i = 0; i < 4; ++i) {
    x.a[i] = y[i];
    x.b[i] = y[i + 4];
  }
  return x;
}

double h_denominator(const HState& x) { return x.a[1] * x.a[1] - x.a[2] * x.a[2] - x.a[3] * x.a[3]; }

bool h_denominator_singular(const HState& x) {
  double a2 = 0.0;
  for (double v : x.a) a2 += v * v;
  return !(std::abs(h_denominator(x)) >= 1e-12 * (1.0 + a2));
}

State8 h_rhs(const HState& x) {
  if (h_denominator_singular(x)) throw SingularError("h_rhs: vanishing denominator a2^2 - a3^2 - a4^2");
  return detail::h_rhs(x.y(), x.mu);
}

Vec4 first_integrals(const HState& x) {
  const auto& a = x.a;
  const auto& b = x.b;
  const double mu = x.mu;
  const double d = a[1] * a[1] - a[2] * a[2] - a[3] * a[3];
  return {
      12.0 * mu * d + b[0] + b[2],
      4.0 * a[3] * a[3] + b[1] * b[1] - b[2] * b[2] - b[3] * b[3] - b[0] * b[0] - 2.0 * b[2] * b[0],
      a[1] * b[1] - a[2] * b[2] - a[3] * b[3] - a[2] * b[0],
      4.5 * mu * b[0] * d + a[3] * a[3],
  };
}

MembershipReport membership_report(const HState& x, double tol) {
  MembershipReport r;
  r.integrals = first_integrals(x);
  r.integrals_vanish = std::all_of(r.integrals.begin(), r.integrals.end(),
                                   [&](double v) { return std::abs(v) < tol; });
  const auto& b = x.b;
  r.b1_positive = b[0] > 0.0;
  const double q = b[1] * b[1] - b[2] * b[2] - b[3] * b[3];
  r.ineq_short = q < 0.0;
  r.ineq_long = q - b[0] * b[0] - 2.0 * b[0] * b[2] < 0.0;
  return r;
}

bool n_membership(const HState& x, double tol) { return membership_report(x, tol).member(); }

Point7 apply_transform(TransformTag tag, const Point7& x) {
  Point7 y = x;
  if (tag.bits & 1u) {
    y[0] = -y[0];
    y[4] = -y[4];
  }
  if (tag.bits & 2u) {
    for (int i : {0, 1, 3, 4, 5}) y[i] = -y[i];
  }
  return y;
}

QuadCurve apply_transform(QuadrupleTag tag, QuadCurve curve) {
  if (tag.bits & 1u) {
    curve = [c = std::move(curve)](double t) {
      const QuadJet q = c(-t);
      QuadJet r;
      r.x = {-q.x[0], q.x[1], q.x[2], q.x[3]};
      r.xp = {q.xp[0], -q.xp[1], -q.xp[2], -q.xp[3]};
      r.xpp = {-q.xpp[0], q.xpp[1], q.xpp[2], q.xpp[3]};
      return r;
    };
  }
  if (tag.bits & 2u) {
    curve = [c = std::move(curve)](double t) {
      QuadJet q = c(t);
      for (Vec4* v : {&q.x, &q.xp, &q.xpp})
        for (int i = 0; i < 3; ++i) (*v)[i] = -(*v)[i];
      return q;
    };
  }
  if (tag.bits & 4u) {
    curve = [c = std::move(curve)](double t) {
      QuadJet q = c(t);
      for (Vec4* v : {&q.x, &q.xp, &q.xpp}) {
        const double x2 = (*v)[1];
        (*v)[1] = -(*v)[2];
        (*v)[2] = -x2;
      }
      return q;
    };
  }
  return curve;
}

std::pair<double, double> phase_cos_sin(double theta_o) {
  double c = std::cos(theta_o), s = std::sin(theta_o);
  if (std::abs(c) < 1e-15) c = 0.0;
  if (std::abs(s) < 1e-15) s = 0.0;
  return {c, s};
}

FJet fjet_from_quadruple(double t, const QuadJet& q, double mu, double theta_o, F5* fpp) {
  const auto [c, s] = phase_cos_sin(theta_o);
  FJet j;
  j.t = t;
  j.mu = mu;
  j.f = {q.x[0], q.x[1], q.x[2], q.x[3] * c, q.x[3] * s};
  j.fp = {q.xp[0], q.xp[1], q.xp[2], q.xp[3] * c, q.xp[3] * s};
  if (fpp) *fpp = {q.xpp[0], q.xpp[1], q.xpp[2], q.xpp[3] * c, q.xpp[3] * s};
  return j;
}

namespace {

bool lex_less(const Point7& x, const Point7& y) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double tol = 1e-12 * (1.0 + std::max(std::abs(x[i]), std::abs(y[i])));
    if (std::abs(x[i] - y[i]) <= tol) continue;
    return x[i] < y[i];
  }
  return false;
}

}  // namespace

Point7 canonical_representative(const Point7& x) {
  Point7 best = x;
  for (std::uint8_t b = 1; b < TransformTag::kOrder; ++b) {
    const Point7 y = apply_transform(TransformTag{b}, x);
    if (lex_less(y, best)) best = y;
  }
  return best;
}

double sup_distance(const Point7& x, const Point7& y) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
  return d;
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::Completed: return "completed";
    case StopReason::Singularity: return "singularity";
    case StopReason::StepUnderflow: return "step-underflow";
    case StopReason::MaxSteps: return "max-steps";
    case StopReason::NonFinite: return "non-finite";
  }
  return "?";
}

HState SolutionCurve::at(double s) const {
  if (grid.empty()) throw DomainError("SolutionCurve::at: empty curve");
  const double span = grid.back() - grid.front();
  const double slack = 1e-12 * (1.0 + std::abs(span));
  if (s < grid.front() - slack || s > grid.back() + slack) {
    throw DomainError("SolutionCurve::at: s outside the computed range");
  }
  if (!dense_) {
    // Exact node lookup only.
    const auto it = std::lower_bound(grid.begin(), grid.end(), s - slack);
    if (it != grid.end() && std::abs(*it - s) <= slack) return states[static_cast<std::size_t>(it - grid.begin())];
    throw DomainError("SolutionCurve::at: no dense output and s is not a node");
  }
  return HState::from_y(s, dense_(s), mu);
}

void SolutionCurve::update_integrals(const HState& x0) {
  drift = {};
  conservation = {};
  const Vec4 i0 = first_integrals(x0);
  for (const HState& x : states) {
    const Vec4 i = first_integrals(x);
    for (int k = 0; k < 4; ++k) {
      drift[k] = std::max(drift[k], std::abs(i[k]));
      conservation[k] = std::max(conservation[k], std::abs(i[k] - i0[k]));
    }
  }
}

}  // namespace nk
