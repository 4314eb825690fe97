// Acceptance criteria. `acceptance` runs all of them, `acceptance <name>`
// runs one; each prints a single PASS/FAIL line and the exit code is the
// number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "nk/family.hpp"
#include "nk/forms6.hpp"
#include "nk/models.hpp"
#include "nk/nk_ode.hpp"
#include "nk/singular_ivp.hpp"

using namespace nk;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

double max_abs_diff(const HState& x, const HState& y) {
  double m = 0.0;
  for (int i = 0; i < 4; ++i) m = std::max({m, std::abs(x.a[i] - y.a[i]), std::abs(x.b[i] - y.b[i])});
  return m;
}

HState x_o() {
  HState x;
  x.mu = 2.0;
  const double r3 = std::sqrt(3.0), r6 = std::sqrt(6.0), r2 = std::sqrt(2.0);
  x.a = {0.0, r3 / 36.0, r3 / 36.0, r6 / 36.0};
  x.b = {4.0 / 36.0, 0.0, 0.0, -2.0 * r2 / 36.0};
  return x;
}

// ---------------------------------------------------------------------------

Outcome hitchin_identity() {
  Timer timer;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0), c(0.2, 3.0);
  const KForm vol = KForm::volume();
  double worst_identity = 0.0, worst_scale = 0.0, worst_vol = 0.0;
  for (int n = 0; n < 1000; ++n) {
    KForm th(3);
    for (std::size_t i = 0; i < th.size(); ++i) th[i] = u(rng);
    const Endo6 S = hitchin_endomorphism(th, vol);
    const double P = stability_invariant(th, vol).value;
    worst_identity = std::max(worst_identity, (S * S - P * Endo6::Identity()).cwiseAbs().maxCoeff() / std::max(1.0, std::abs(P)));

    const double k = c(rng) * (n % 2 ? -1.0 : 1.0);
    const double Pk = stability_invariant(k * th, vol).value;
    const double ref = std::pow(k, 4) * P;
    if (ref != 0.0) worst_scale = std::max(worst_scale, std::abs(Pk - ref) / std::abs(ref));

    const double v = c(rng);
    const double Pv = stability_invariant(th, v * vol).value;
    if (P != 0.0) worst_vol = std::max(worst_vol, std::abs(Pv - P / (v * v)) / std::abs(P / (v * v)));
  }
  const double t = timer.seconds();
  const bool pass = worst_identity < 1e-10 && worst_scale < 1e-12 && worst_vol < 1e-12 && t < 5.0;
  return {pass, fmt("max |S^2 - P Id| / max(1,|P|) = %.2e (< 1e-10), P(c theta) rel err = %.2e, vol rescale rel err "
                    "= %.2e (< 1e-12), %.2f s (< 5 s)",
                    worst_identity, worst_scale, worst_vol, t)};
}

Outcome model_residuals() {
  Timer timer;
  double worst = 0.0;
  std::string per_model;
  for (ModelId m : {ModelId::Sphere6, ModelId::TwistorCP3, ModelId::S3xS3}) {
    const Interval r = model_range(m);
    double w = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const ModelJet mj = model_jet(m, r.lo + (r.hi - r.lo) * k / 101.0);
      for (double x : f_system_residual(mj.jet, mj.fpp)) w = std::max(w, std::abs(x));
    }
    per_model += fmt("%s(mu=%g) %.2e  ", to_string(m), model_mu(m), w);
    worst = std::max(worst, w);
  }
  const double t = timer.seconds();
  return {worst < 1e-9 && t < 1.0, per_model + fmt("(< 1e-9), %.3f s (< 1 s)", t)};
}

Outcome first_integrals_criterion() {
  Timer timer;
  double at_xo = 0.0;
  for (double v : first_integrals(x_o())) at_xo = std::max(at_xo, std::abs(v));
  const SolutionCurve c = integrate(x_o(), 0.0, 0.3, 1e-10);
  const double drift = *std::max_element(c.drift.begin(), c.drift.end());
  const double t = timer.seconds();
  const bool pass = at_xo <= 1e-14 && c.completed() && c.grid.back() == 0.3 && drift < 1e-8 && t < 1.0;
  return {pass, fmt("|I(x_o)| = %.2e (<= 1e-14), drift on [0, 0.3] = %.2e (< 1e-8), %s, %.3f s (< 1 s)", at_xo, drift,
                    to_string(c.meta.reason), t)};
}

Outcome change_of_variables() {
  const double to = s3xs3_base_point();
  std::vector<double> ts;
  for (int k = 1; k < 100; ++k) ts.push_back(model_range(ModelId::S3xS3).hi * k / 100.0);
  ts.push_back(to);
  const SolutionCurve c = to_h([](double t) { return model_f(ModelId::S3xS3, t); }, ts, to, 2.0);
  // h4 = 2 frak carries only |(f4, f5)|; the constant phase comes from the curve
  const FJet jo = model_f(ModelId::S3xS3, to);
  const std::vector<FSample> back = from_h(c, 0.0, to, std::atan2(jo.f[4], jo.f[3]));
  double err = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < back.size(); ++i) {
    const ModelJet m = model_jet(ModelId::S3xS3, back[i].jet.t);
    for (int k = 0; k < 5; ++k) {
      err = std::max({err, std::abs(back[i].jet.f[k] - m.jet.f[k]), std::abs(back[i].jet.fp[k] - m.jet.fp[k])});
    }
    const State8 d = h_rhs(c.states[i]);
    const Vec4 h2 = h_second_derivatives(m.jet, m.fpp);
    for (int k = 0; k < 4; ++k) rhs = std::max(rhs, std::abs(d[4 + k] - h2[k]));
  }
  // the original parameters come back as well
  std::sort(ts.rbegin(), ts.rend());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  if (ts.size() != back.size()) return {false, "node count changed in the round trip"};
  double terr = 0.0;
  for (std::size_t i = 0; i < back.size(); ++i) terr = std::max(terr, std::abs(back[i].jet.t - ts[i]));
  return {err < 1e-9 && rhs < 1e-8 && terr < 1e-9,
          fmt("round-trip sup error = %.2e (< 1e-9), t error = %.2e, h_rhs residual = %.2e (< 1e-8)", err, terr, rhs)};
}

Outcome l_matrix_determinants() {
  // Stated closed form (2n^2 - 3n - 8) / ((2n+1)(n+1)) ((2n-1)/(2n+1))^3 and det L_0 = 8.
  const double c1 = 0.3;
  double worst = 0.0;
  int worst_n = 0;
  for (int n = 0; n <= 200; ++n) {
    const double m = n;
    const double r = (2 * m - 1) / (2 * m + 1);
    const double stated = (2 * m * m - 3 * m - 8) / ((2 * m + 1) * (m + 1)) * r * r * r;
    const double det = l_matrix(n, c1).determinant();
    const double rel = std::abs(det - stated) / std::abs(stated);
    if (rel > worst) {
      worst = rel;
      worst_n = n;
    }
  }
  const double det0 = l_matrix(0, c1).determinant();
  const bool pass = worst < 1e-10 && std::abs(det0 - 8.0) < 1e-10 * 8.0;
  std::string detail = fmt("det L_0 = %.10g (stated 8), max rel err vs stated formula = %.3g at n = %d (< 1e-10)", det0,
                           worst, worst_n);
  if (!pass) {
    double derived = 0.0;
    for (int n = 0; n <= 200; ++n)
      derived = std::max(derived, std::abs(l_matrix(n, c1).determinant() / l_matrix_det_closed_form(n) - 1.0));
    detail += fmt("; computed dets follow (2n+5)(n+2)/((n+1)(2n+1)) ((2n+3)/(2n+1))^3 to %.1e (see decisions ledger)",
                  derived);
  }
  return {pass, detail};
}

Outcome singular_oracle_match() {
  Timer t1;
  const SingularSolution a = solve_singular_ivp(1.0 / 9.0);
  double da = 0.0;
  for (int k = 0; k <= 400; ++k) {
    const double s = 0.2 * k / 400.0;
    da = std::max(da, max_abs_diff(a.curve.at(s), singular_model_h(SingularModel::S3xS3, s)));
  }
  for (const HState& x : a.curve.states) da = std::max(da, max_abs_diff(x, singular_model_h(SingularModel::S3xS3, x.s)));
  const double ta = t1.seconds();

  // the rescaled sphere, sampled over s in [0, 1] (t in [-0.62, 0] of (-pi/(2 sqrt2), 0))
  Timer t2;
  SingularOptions o;
  o.s_max = 1.0;
  const SingularSolution b = solve_singular_ivp(0.25, o);
  double db = 0.0;
  for (int k = 0; k <= 400; ++k) {
    const double s = b.curve.grid.back() * k / 400.0;
    db = std::max(db, max_abs_diff(b.curve.at(s), singular_model_h(SingularModel::Sphere6, s)));
  }
  for (const HState& x : b.curve.states) db = std::max(db, max_abs_diff(x, singular_model_h(SingularModel::Sphere6, x.s)));
  const double tb = t2.seconds();

  const bool pass = a.curve.completed() && b.curve.completed() && b.curve.grid.back() == 1.0 && da < 1e-6 &&
                    db < 1e-6 && ta < 10.0 && tb < 10.0;
  return {pass, fmt("c1 = 1/9 vs S3xS3 on [0, 0.2]: %.2e, c1 = 1/4 vs rescaled S6 on [0, 1]: %.2e (< 1e-6), %.3f s / "
                    "%.3f s (< 10 s)",
                    da, db, ta, tb)};
}

Outcome family_distinctness() {
  Timer timer;
  std::vector<double> c1s;
  for (int k = 1; k <= 10; ++k) c1s.push_back(0.05 * k);
  // the grid values nearest 1/9 and 1/4 become exactly 1/9 and 1/4
  for (double h : {1.0 / 9.0, 0.25}) {
    auto it = std::min_element(c1s.begin(), c1s.end(),
                               [h](double x, double y) { return std::abs(x - h) < std::abs(y - h); });
    *it = h;
  }
  std::vector<SolutionCurve> curves;
  int matched = 0, verified = 0;
  bool homogeneous_ok = true;
  for (double c1 : c1s) {
    const NkReconstruction r = reconstruct_nk(c1);
    if (r.report.ok() && r.solution.curve.completed()) ++verified;
    const auto m = match_singular_model(r.solution.curve);
    if (m) ++matched;
    if ((c1 == 1.0 / 9.0) != (m == SingularModel::S3xS3)) homogeneous_ok = false;
    if ((c1 == 0.25) != (m == SingularModel::Sphere6)) homogeneous_ok = false;
    curves.push_back(r.solution.curve);
  }
  double min_pair = INFINITY;
  for (std::size_t i = 0; i < curves.size(); ++i)
    for (std::size_t j = i + 1; j < curves.size(); ++j)
      min_pair = std::min(min_pair, canonical_curve_distance(curves[i], curves[j]));
  const double t = timer.seconds();
  const bool pass = verified == 10 && matched == 2 && homogeneous_ok && min_pair > 1e-4 && t < 120.0;
  return {pass, fmt("%d/10 verified (extension, P' < 0 with orbit limit, metric > 0), %d matched (1/9 -> S3xS3, 1/4 -> "
                    "S6), min pairwise canonical distance = %.3e (> 1e-4), %.2f s (< 120 s)",
                    verified, matched, min_pair, t)};
}

Outcome regular_family() {
  Timer timer;
  const auto pts = random_family_points(x_o(), 20, 2024, 1e-2, 1e-12);
  double worst_I = 0.0, worst_drift = 0.0;
  bool completed = true;
  std::vector<SolutionCurve> curves;
  for (const HState& x : pts) {
    for (double v : first_integrals(x)) worst_I = std::max(worst_I, std::abs(v));
    curves.push_back(integrate(x, -0.1, 0.1, 1e-10));
    completed = completed && curves.back().completed() && curves.back().grid.front() == -0.1 &&
                curves.back().grid.back() == 0.1;
    for (double d : curves.back().drift) worst_drift = std::max(worst_drift, d);
  }
  // distinct canonical representatives, and no point on another's trajectory
  double min_pair = INFINITY, min_traj = INFINITY;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      const Point7 cj = canonical_representative(pts[j].point7());
      if (i < j) min_pair = std::min(min_pair, sup_distance(canonical_representative(pts[i].point7()), cj));
      for (int k = 0; k <= 400; ++k) {
        const double s = -0.1 + 0.2 * k / 400.0;
        min_traj = std::min(min_traj, sup_distance(canonical_representative(curves[i].at(s).point7()), cj));
      }
    }
  const double t = timer.seconds();
  const bool pass = pts.size() == 20 && worst_I <= 1e-12 && completed && worst_drift < 1e-8 && min_pair > 1e-6 &&
                    min_traj > 1e-6;
  return {pass, fmt("20 points with max |I| = %.1e (<= 1e-12), drift on [-0.1, 0.1] = %.2e (< 1e-8), min pairwise "
                    "canonical distance = %.3e, min distance to other trajectories = %.3e, %.2f s",
                    worst_I, worst_drift, min_pair, min_traj, t)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"hitchin_identity", hitchin_identity},
      {"model_residuals", model_residuals},
      {"first_integrals", first_integrals_criterion},
      {"change_of_variables", change_of_variables},
      {"l_matrix_determinants", l_matrix_determinants},
      {"singular_oracle_match", singular_oracle_match},
      {"family_distinctness", family_distinctness},
      {"regular_family", regular_family},
  };
  int failures = 0, ran = 0;
  for (const auto& [name, run] : criteria) {
    if (argc > 1 && name != argv[1]) continue;
    ++ran;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    if (!o.pass) ++failures;
  }
  if (ran == 0) {
    std::fprintf(stderr, "unknown criterion %s\n", argv[1]);
    return 2;
  }
  return failures;
}
