#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "nk/errors.hpp"
#include "nk/family.hpp"
#include "nk/models.hpp"
#include "nk/nk_ode.hpp"

using namespace nk;
using testing::uniform;
using testing::x_o;

namespace {

HState random_state(double mu = 1.0) {
  HState x;
  x.mu = mu;
  for (int i = 0; i < 4; ++i) {
    x.a[i] = uniform(-1, 1);
    x.b[i] = uniform(-1, 1);
  }
  x.b[0] = std::abs(x.b[0]) + 0.1;
  x.a[1] = 2.0;  // keep the denominator away from zero
  return x;
}

HState with_point7(HState x, const Point7& p) {
  x.a = {x.a[0], p[0], p[1], p[2]};
  x.b = {p[3], p[4], p[5], p[6]};
  return x;
}

}  // namespace

TEST_CASE("f-system residual") {
  FJet zero;
  CHECK_THROWS_AS(f_system_residual(zero, F5{}), DomainError);
  const ModelJet s = model_jet(ModelId::Sphere6, 0.7);
  for (double r : f_system_residual(s.jet, s.fpp)) CHECK(std::abs(r) < 1e-12);
  ModelJet bad = s;
  bad.fpp[1] += 1.0;
  // R1 = [(f2' + f1/4) f1]' + ..., so a unit change of f2'' moves it by f1
  CHECK(f_system_residual(bad.jet, bad.fpp)[0] == doctest::Approx(s.jet.f[0]));
}

TEST_CASE("h-system right-hand side") {
  HState x = random_state(1.3);
  x.a[2] = 0.0;
  x.a[3] = 0.0;
  x.b[3] = 0.0;
  CHECK(h_rhs(x)[4] == 0.0);

  const HState y = random_state(1.7);
  const State8 d = h_rhs(y);
  CHECK(d[5] == doctest::Approx(-24.0 * y.mu * y.b[0] * y.a[1]));
  for (int i = 0; i < 4; ++i) CHECK(d[i] == y.b[i]);

  HState sing = y;
  sing.a[1] = 0.3;
  sing.a[2] = 0.3;
  sing.a[3] = 0.0;
  CHECK(h_denominator_singular(sing));
  CHECK_THROWS_AS(h_rhs(sing), SingularError);
}

TEST_CASE("h_rhs at x_o matches the derivative of the closed-form curve") {
  // S3 x S3 written in s: t = t_o - (3/sqrt2) s ... use the singular-orbit
  // form, whose h-data differ from x_o by a shift in s and a1.
  const ModelJet base = model_jet(ModelId::S3xS3, s3xs3_base_point());
  const F5 fpp = base.fpp;
  const Vec4 h2 = h_second_derivatives(base.jet, fpp);
  const State8 d = h_rhs(x_o());
  for (int i = 0; i < 4; ++i) CHECK(d[4 + i] == doctest::Approx(h2[i]).epsilon(1e-8).scale(1.0));

  // central differences of h(s) = h(t(s)) with t = t_o + f1 s
  const double f1 = base.jet.f[0], h = 1e-5;
  const HState p = model_h_point(ModelId::S3xS3, s3xs3_base_point() + f1 * h);
  const HState m = model_h_point(ModelId::S3xS3, s3xs3_base_point() - f1 * h);
  for (int i = 0; i < 4; ++i) CHECK(d[4 + i] == doctest::Approx((p.b[i] - m.b[i]) / (2 * h)).epsilon(1e-8).scale(1.0));
}

TEST_CASE("first integrals and membership") {
  for (double v : first_integrals(x_o())) CHECK(std::abs(v) < 1e-14);
  HState z;
  z.mu = 2.0;
  for (double v : first_integrals(z)) CHECK(v == 0.0);

  HState x = x_o();
  x.b[0] += 0.01;
  CHECK(first_integrals(x)[0] == doctest::Approx(first_integrals(x_o())[0] + 0.01));

  CHECK(n_membership(x_o(), 1e-12));
  const MembershipReport r = membership_report(x_o(), 1e-12);
  CHECK(r.ineq_short);
  CHECK(r.ineq_long);
  HState neg = x_o();
  neg.b[0] = -neg.b[0];
  CHECK_FALSE(n_membership(neg, 1e-12));
  CHECK_FALSE(n_membership(random_state(2.0), 1e-6));
}

TEST_CASE("transformation group") {
  const auto e = TransformTag::identity(), t1 = TransformTag::tau1(), t2 = TransformTag::tau2();
  CHECK(t1 * t1 == e);
  CHECK(t2 * t2 == e);
  CHECK(t1 * t2 == t2 * t1);
  CHECK(!(t1 * t2 == e));

  const Point7 x{1, 2, 3, 4, 5, 6, 7};
  const Point7 y = apply_transform(t2, x);
  const Point7 expect{-1, -2, 3, -4, -5, -6, 7};
  CHECK(y == expect);
  const Point7 z = apply_transform(t1, x);
  const Point7 expect1{-1, 2, 3, 4, -5, 6, 7};
  CHECK(z == expect1);
  for (std::uint8_t b = 0; b < TransformTag::kOrder; ++b) {
    CHECK(apply_transform(TransformTag{b}, apply_transform(TransformTag{b}, x)) == x);
    for (std::uint8_t c = 0; c < TransformTag::kOrder; ++c)
      CHECK(apply_transform(TransformTag{b}, apply_transform(TransformTag{c}, x)) ==
            apply_transform(TransformTag{b} * TransformTag{c}, x));
  }

  const auto q1 = QuadrupleTag::tau1(), q2 = QuadrupleTag::tau2(), q3 = QuadrupleTag::tau3();
  for (auto q : {q1, q2, q3}) CHECK(q * q == QuadrupleTag::identity());
  CHECK(q1 * q2 * q3 == q3 * q2 * q1);
}

TEST_CASE("membership under the group") {
  const HState xo = x_o();
  const HState t1 = with_point7(xo, apply_transform(TransformTag::tau1(), xo.point7()));
  CHECK(n_membership(t1, 1e-12));
  // tau2 flips b1 and b3, so it leaves the half-space b1 > 0 and does not
  // preserve I1 = 12 mu (a2^2 - a3^2 - a4^2) + b1 + b3.
  const HState t2 = with_point7(xo, apply_transform(TransformTag::tau2(), xo.point7()));
  CHECK(first_integrals(t2)[0] == doctest::Approx(-2.0 * (xo.b[0] + xo.b[2])));
  CHECK_FALSE(n_membership(t2, 1e-12));
}

TEST_CASE("tau1 commutes with the flow") {
  for (int n = 0; n < 20; ++n) {
    const HState x = random_state(uniform(0.5, 2.0));
    const HState y = with_point7(x, apply_transform(TransformTag::tau1(), x.point7()));
    const State8 dx = h_rhs(x), dy = h_rhs(y);
    HState dxs = HState::from_y(0.0, dx, x.mu);
    const HState dxt = with_point7(dxs, apply_transform(TransformTag::tau1(), dxs.point7()));
    const HState dys = HState::from_y(0.0, dy, x.mu);
    CHECK(testing::max_abs_diff(dxt.a, dys.a) < 1e-13);
    CHECK(testing::max_abs_diff(dxt.b, dys.b) < 1e-13);
  }
}

TEST_CASE("quadruple transforms map solutions to solutions") {
  const QuadCurve c = [](double t) {
    const ModelJet m = model_jet(ModelId::Sphere6, t);
    QuadJet q;
    q.x = {m.jet.f[0], m.jet.f[1], m.jet.f[2], m.jet.f[4]};
    q.xp = {m.jet.fp[0], m.jet.fp[1], m.jet.fp[2], m.jet.fp[4]};
    q.xpp = {m.fpp[0], m.fpp[1], m.fpp[2], m.fpp[4]};
    return q;
  };
  for (std::uint8_t b = 0; b < QuadrupleTag::kOrder; ++b) {
    const QuadCurve d = apply_transform(QuadrupleTag{b}, c);
    for (double t0 : {0.2, 0.7, 1.3}) {
      const double t = (b & 1u) ? -t0 : t0;
      F5 fpp;
      const FJet j = fjet_from_quadruple(t, d(t), 1.0, M_PI / 2, &fpp);
      CHECK(j.f[3] == 0.0);
      for (double r : f_system_residual(j, fpp)) CHECK(std::abs(r) < 1e-9);
    }
  }
}

TEST_CASE("canonical representative") {
  for (int n = 0; n < 20; ++n) {
    Point7 x;
    for (double& v : x) v = uniform(-1, 1);
    const Point7 c = canonical_representative(x);
    for (std::uint8_t b = 0; b < TransformTag::kOrder; ++b)
      CHECK(canonical_representative(apply_transform(TransformTag{b}, x)) == c);
  }
  const Point7 xo = x_o().point7();
  CHECK(sup_distance(canonical_representative(xo),
                     canonical_representative(apply_transform(TransformTag::tau2(), xo))) == 0.0);
  CHECK(sup_distance(Point7{0, 0, 0, 0, 0, 0, 1}, Point7{0, 0, 0, 0, 0, 0.5, 0}) == 1.0);
}

TEST_CASE("integration from x_o") {
  const SolutionCurve c = integrate(x_o(), 0.0, 0.3, 1e-10);
  REQUIRE(c.completed());
  CHECK(c.grid.front() == 0.0);
  CHECK(c.grid.back() == doctest::Approx(0.3));
  for (std::size_t i = 1; i < c.grid.size(); ++i) CHECK(c.grid[i] > c.grid[i - 1]);
  for (double d : c.drift) CHECK(d < 1e-8);
  for (double d : c.conservation) CHECK(d < 100 * 1e-10);
  CHECK(c.meta.steps > 0);
  CHECK(c.has_dense());
  for (std::size_t i = 0; i < c.grid.size(); i += 7)
    CHECK(testing::max_abs_diff(c.at(c.grid[i]), c.states[i]) < 1e-14);
  CHECK_THROWS_AS(c.at(0.5), DomainError);

  // the solution is the S3 x S3 curve: h1' stays 1/9 and f agrees with the closed form
  const double f1 = -std::sqrt(2.0) / 3.0;
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    const HState& x = c.states[i];
    const HState m = model_h_point(ModelId::S3xS3, s3xs3_base_point() + f1 * c.grid[i]);
    CHECK(testing::max_abs_diff(x.b, m.b) < 1e-7);
    CHECK(testing::max_abs_diff(std::array<double, 3>{x.a[1], x.a[2], x.a[3]},
                                std::array<double, 3>{m.a[1], m.a[2], m.a[3]}) < 1e-7);
  }

  // two-sided span
  const SolutionCurve both = integrate(x_o(), -0.1, 0.1, 1e-10);
  CHECK(both.grid.front() == doctest::Approx(-0.1));
  CHECK(both.grid.back() == doctest::Approx(0.1));
  CHECK(testing::max_abs_diff(both.at(0.0), x_o()) < 1e-14);
}

TEST_CASE("reversibility") {
  const SolutionCurve fwd = integrate(x_o(), 0.0, 0.3, 1e-11);
  const HState end = fwd.states.back();
  const SolutionCurve back = integrate(end, 0.0, end.s, 1e-11);
  CHECK(testing::max_abs_diff(back.states.front(), x_o()) < 1e-8);
}

TEST_CASE("integration stops before the denominator locus") {
  HState x;
  x.mu = 1.0;
  // a2^2 - a3^2 reaches zero near s = 0.1 while h1'' ~ 2 b1^2 a3 / den blows up
  x.a = {0.0, 0.2, 0.1, 0.0};
  x.b = {0.1, -1.0, 0.0, 0.0};
  const SolutionCurve c = integrate(x, 0.0, 1.0, 1e-10);
  CHECK(c.meta.reason == StopReason::Singularity);
  CHECK_FALSE(c.meta.message.empty());
  CHECK(c.grid.back() < 0.11);
  CHECK(c.grid.back() > 0.05);
  CHECK(h_denominator(c.states.back()) > 0.0);
  CHECK(std::string(to_string(StopReason::Singularity)) == "singularity");

  CHECK_THROWS_AS(integrate(x_o(), 0.1, 0.2, 1e-10), DomainError);
  CHECK_THROWS_AS(integrate(x_o(), 0.0, 0.2, 0.0), DomainError);
}

TEST_CASE("change of variables examples") {
  // constant f1 = -1: s = -t and h1 = s / 2
  const auto jet = [](double t) {
    FJet j;
    j.t = t;
    j.f = {-1.0, 0.1, 0.2, 0.0, 0.5};
    return j;
  };
  const std::vector<double> ts{-0.5, -0.2, 0.0, 0.3, 0.6};
  const SolutionCurve c = to_h(jet, ts, 0.0, 1.0);
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    const double t = ts[ts.size() - 1 - i];
    CHECK(c.grid[i] == doctest::Approx(-t).scale(1.0));
    CHECK(c.states[i].a[0] == doctest::Approx(c.grid[i] / 2).scale(1.0));
    CHECK(c.states[i].b[0] == doctest::Approx(0.5));
  }

  const auto positive = [](double t) {
    FJet j;
    j.t = t;
    j.f = {0.5, 0, 0, 0, 1};
    return j;
  };
  CHECK_THROWS_AS(to_h(positive, ts, 0.0, 1.0), DomainError);

  // h1' = 1/9 gives f1 = -sqrt2 / 3; h2 = h3 gives f3 = 0
  HState x = x_o();
  const FSample f = f_sample_from_h(x);
  CHECK(f.jet.f[0] == doctest::Approx(-std::sqrt(2.0) / 3));
  CHECK(f.jet.f[2] == 0.0);
  CHECK(f.jet.f[3] == 0.0);
  x.b[0] = 0.0;
  CHECK_THROWS_AS(f_sample_from_h(x), DomainError);
}

TEST_CASE("S3 x S3 round trip through the h-variables") {
  const double to = s3xs3_base_point();
  std::vector<double> ts;
  for (int k = 1; k < 40; ++k) ts.push_back(model_range(ModelId::S3xS3).hi * k / 40.0);
  ts.push_back(to);
  const auto jet = [](double t) { return model_f(ModelId::S3xS3, t); };
  const SolutionCurve c = to_h(jet, ts, to, 2.0);
  const auto node = std::find(c.grid.begin(), c.grid.end(), 0.0);
  REQUIRE(node != c.grid.end());

  // f5 < 0 on the whole range, so the phase is -pi/2
  const std::vector<FSample> back = from_h(c, 0.0, to, -M_PI / 2);
  REQUIRE(back.size() == c.grid.size());
  double err = 0.0, rhs_err = 0.0;
  for (std::size_t i = 0; i < back.size(); ++i) {
    const ModelJet m = model_jet(ModelId::S3xS3, back[i].jet.t);
    err = std::max(err, testing::max_abs_diff(back[i].jet.f, m.jet.f));
    err = std::max(err, testing::max_abs_diff(back[i].jet.fp, m.jet.fp));
    const HState& x = c.states[i];
    CHECK(x.b[0] == doctest::Approx(0.5 * m.jet.f[0] * m.jet.f[0]));
    const State8 d = h_rhs(x);
    const Vec4 h2 = h_second_derivatives(m.jet, m.fpp);
    for (int k = 0; k < 4; ++k) rhs_err = std::max(rhs_err, std::abs(d[4 + k] - h2[k]));
  }
  CHECK(err < 1e-9);
  CHECK(rhs_err < 1e-8);
  // t recovered by quadrature matches the original nodes
  std::vector<double> sorted = ts;
  std::sort(sorted.rbegin(), sorted.rend());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());  // t_o is also hi * 20 / 40
  REQUIRE(sorted.size() == back.size());
  for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i].jet.t == doctest::Approx(sorted[i]).epsilon(1e-12));
}

TEST_CASE("sphere round trip with mu = 1") {
  // No dense output here, so t comes from the corrected trapezoid rule, which
  // is fourth order in the node spacing.
  const auto jet = [](double t) { return model_f(ModelId::Sphere6, t); };
  double fpp_err = 0.0;
  auto worst = [&](int n) {
    std::vector<double> ts;
    for (int k = 1; k < n; ++k) ts.push_back(0.3 + 0.9 * k / n);
    const double to = ts[n / 2 - 1];
    const SolutionCurve c = to_h(jet, ts, to, 1.0);
    double e = 0.0;
    for (const FSample& f : from_h(c, 0.0, to)) {
      const ModelJet m = model_jet(ModelId::Sphere6, f.jet.t);
      e = std::max(e, testing::max_abs_diff(f.jet.f, m.jet.f));
      fpp_err = std::max(fpp_err, testing::max_abs_diff(f.fpp, m.fpp));
    }
    return e;
  };
  const double e40 = worst(40);
  fpp_err = 0.0;
  const double e80 = worst(80);
  CHECK(e80 < 1e-9);
  CHECK(fpp_err < 1e-8);
  CHECK(e40 / e80 > 12.0);
}

TEST_CASE("constraint propagation and equivalence of the systems") {
  const auto pts = random_family_points(x_o(), 3, 7);
  for (const HState& x0 : pts) {
    const SolutionCurve c = integrate(x0, -0.1, 0.1, 1e-11);
    REQUIRE(c.completed());
    const auto fs = from_h(c, 0.0, 0.0);
    double worst = 0.0;
    for (const FSample& f : fs)
      for (double r : f_system_residual(f.jet, f.fpp)) worst = std::max(worst, std::abs(r));
    CHECK(worst < 1e-8);
  }
  // off the variety the f-system is violated
  HState off = x_o();
  off.b[0] += 1e-3;
  const FSample f = f_sample_from_h(off);
  double worst = 0.0;
  for (double r : f_system_residual(f.jet, f.fpp)) worst = std::max(worst, std::abs(r));
  CHECK(worst > 1e-6);
}
