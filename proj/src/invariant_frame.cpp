#include "nk/invariant_frame.hpp"

#include <algorithm>
#include <cmath>

#include "nk/errors.hpp"

namespace nk {

namespace {

LieBasis build_lie_basis() {
  LieBasis b;
  auto set = [&](int i, int j, int k, double v) {
    b.c[i][j][k] += v;
    b.c[j][i][k] -= v;
  };
  set(kU, kE1, kV1, 1.0);
  set(kU, kV1, kE1, -1.0);
  set(kU, kE2, kV2, 1.0);
  set(kU, kV2, kE2, -1.0);
  set(kA, kE1, kV1, 1.0);
  set(kA, kV1, kE1, -1.0);
  set(kA, kE2, kV2, -1.0);
  set(kA, kV2, kE2, 1.0);
  set(kE1, kV1, kU, 0.25);
  set(kE1, kV1, kA, 0.25);
  set(kE2, kV2, kU, 0.25);
  set(kE2, kV2, kA, -0.25);
  b.killing = {-4.0, -4.0, -1.0, -1.0, -1.0, -1.0};
  return b;
}

// Tangent-frame vector of the Killing field of a Lie algebra element at
// gamma_t: the U component is the isotropy direction and is dropped.
Vec6 to_frame(const Vec6& lie) {
  Vec6 v = lie;
  v[kU] = 0.0;  // index 0 in the frame is xi, which no bracket produces
  return v;
}

// Bracket of frame vectors used in the Chevalley-Eilenberg formula; xi is
// central and the frame index k >= 1 coincides with the Lie index.
Vec6 frame_bracket(const Vec6& x, const Vec6& y) {
  Vec6 lx = x, ly = y;
  lx[kU] = 0.0;
  ly[kU] = 0.0;
  return to_frame(lie_basis().bracket(lx, ly));
}

KForm d_algebraic(const KForm& a) {
  const int k = a.degree();
  KForm out(k + 1);
  if (k == kDim) return out;
  std::vector<Vec6> args(static_cast<std::size_t>(k));
  for (std::size_t m = 0; m < out.size(); ++m) {
    const std::uint8_t mask = out.mask(m);
    std::vector<int> idx;
    for (int e = 0; e < kDim; ++e)
      if (mask & (1u << e)) idx.push_back(e);
    double sum = 0.0;
    for (int i = 0; i <= k; ++i) {
      for (int j = i + 1; j <= k; ++j) {
        const Vec6 br = frame_bracket(Vec6::Unit(idx[i]), Vec6::Unit(idx[j]));
        if (br.isZero()) continue;
        std::size_t n = 0;
        args[n++] = br;
        for (int l = 0; l <= k; ++l)
          if (l != i && l != j) args[n++] = Vec6::Unit(idx[l]);
        const double sign = ((i + j) & 1) ? -1.0 : 1.0;
        sum += sign * a.evaluate(args);
      }
    }
    out[m] = sum;
  }
  return out;
}

}  // namespace

Vec6 LieBasis::bracket(const Vec6& x, const Vec6& y) const {
  Vec6 out = Vec6::Zero();
  for (int i = 0; i < 6; ++i) {
    if (x[i] == 0.0) continue;
    for (int j = 0; j < 6; ++j) {
      if (y[j] == 0.0) continue;
      for (int k = 0; k < 6; ++k) out[k] += x[i] * y[j] * c[i][j][k];
    }
  }
  return out;
}

double LieBasis::jacobi_residual() const {
  double worst = 0.0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      for (int k = 0; k < 6; ++k) {
        const Vec6 x = Vec6::Unit(i), y = Vec6::Unit(j), z = Vec6::Unit(k);
        const Vec6 r = bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) + bracket(z, bracket(x, y));
        worst = std::max(worst, r.cwiseAbs().maxCoeff());
      }
  return worst;
}

double LieBasis::antisymmetry_residual() const {
  double worst = 0.0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      for (int k = 0; k < 6; ++k) worst = std::max(worst, std::abs(c[i][j][k] + c[j][i][k]));
  return worst;
}

const LieBasis& lie_basis() {
  static const LieBasis b = build_lie_basis();
  return b;
}

double FJet::frak() const { return std::hypot(f[3], f[4]); }

double FJet::frak_prime() const {
  const double fr = frak();
  if (fr == 0.0) throw DomainError("FJet::frak_prime: f4 = f5 = 0");
  return (f[3] * fp[3] + f[4] * fp[4]) / fr;
}

double FJet::phase_defect() const { return f[3] * fp[4] - f[4] * fp[3]; }

KForm xi_star() { return KForm::basis({kXi}); }
KForm a_star() { return KForm::basis({kAhat}); }

std::array<KForm, 5> omega_basis() {
  return {
      KForm::basis({kXi, kAhat}),
      KForm::basis({kE1hat, kV1hat}),
      KForm::basis({kE2hat, kV2hat}),
      KForm::basis({kE1hat, kE2hat}) + KForm::basis({kV1hat, kV2hat}),
      KForm::basis({kE1hat, kV2hat}) - KForm::basis({kV1hat, kE2hat}),
  };
}

KForm psi_basis(int a, int j) {
  if ((a != 1 && a != 2) || j < 1 || j > 5) throw DomainError("psi_basis: index out of range");
  const auto om = omega_basis();
  return wedge(a == 1 ? xi_star() : a_star(), om[static_cast<std::size_t>(j - 1)]);
}

KForm kahler_form(const F5& f) {
  const auto om = omega_basis();
  KForm w(2);
  for (std::size_t i = 0; i < 5; ++i) w += f[i] * om[i];
  return w;
}

KForm psi_form(const PsiCoeffs& c, bool hat) {
  const auto& co = hat ? c.phat : c.p;
  KForm psi(3);
  for (int a = 1; a <= 2; ++a)
    for (int j = 2; j <= 5; ++j) psi += co[a - 1][j - 2] * psi_basis(a, j);
  return psi;
}

KForm d_invariant(const KForm& form, const KForm& form_dt) {
  if (form.degree() != form_dt.degree()) throw DomainError("d_invariant: degree mismatch");
  if (form.degree() == kDim) return KForm(kDim);  // d of a top form vanishes; no 7-forms here
  return wedge(xi_star(), form_dt) + d_algebraic(form);
}

KForm d_invariant_2form(const F5& f, const F5& fp) { return d_invariant(kahler_form(f), kahler_form(fp)); }

PsiCoeffs coefficients_from_f(const FJet& j) {
  const auto& f = j.f;
  const auto& fp = j.fp;
  if (f[0] == 0.0) throw DomainError("coefficients_from_f: f1 = 0");
  PsiCoeffs c;
  c.p[0] = {fp[1] / 3.0 + f[0] / 12.0, fp[2] / 3.0 - f[0] / 12.0, fp[3] / 3.0, fp[4] / 3.0};
  c.p[1] = {0.0, 0.0, 2.0 / 3.0 * f[4], -2.0 / 3.0 * f[3]};
  c.phat[0] = {0.0, 0.0, -2.0 / 3.0 * f[4] / f[0], 2.0 / 3.0 * f[3] / f[0]};
  c.phat[1] = {f[0] / 3.0 * (fp[1] + f[0] / 4.0), f[0] / 3.0 * (fp[2] - f[0] / 4.0), f[0] * fp[3] / 3.0,
               f[0] * fp[4] / 3.0};
  c.q = c.p[0][2] * c.p[0][2] + c.p[0][3] * c.p[0][3] - c.p[0][0] * c.p[0][1];
  return c;
}

Endo6 j_psi_matrix(const PsiCoeffs& c) {
  const double q = c.q;
  const double r = c.r();
  if (!(q > 0.0)) throw NotStableError("j_psi_matrix: q <= 0");
  if (!(r > 0.0)) throw NotStableError("j_psi_matrix: p24^2 + p25^2 = 0");
  const double p12 = c.p[0][0], p13 = c.p[0][1], p14 = c.p[0][2], p15 = c.p[0][3];
  const double p24 = c.p[1][2], p25 = c.p[1][3];
  const double w = p15 * p24 - p14 * p25;

  Endo6 m = Endo6::Zero();
  m(0, 1) = std::sqrt(r / q);
  m(1, 0) = -std::sqrt(q / r);

  Eigen::Matrix4d l;
  l << 0.0, -w, p13 * p25, -p13 * p24,
       w, 0.0, p13 * p24, p13 * p25,
       p12 * p25, p12 * p24, 0.0, w,
       -p12 * p24, p12 * p25, -w, 0.0;
  m.block<4, 4>(2, 2) = l / std::sqrt(q * r);
  return m;
}

std::string StabilityReport::failure() const {
  if (!f1_negative) return "f1 < 0";
  if (!frak_positive) return "frak > 0";
  if (!phase_constant) return "constant phase of (f4, f5)";
  if (!first_condition) return "algebraic constraint 4 frak^2 = ((frak')^2 - (f2'+f1/4)(f3'-f1/4)) f1^2";
  if (!inequality) return "stability inequality (frak')^2 - (f2'+f1/4)(f3'-f1/4) > 0";
  return {};
}

StabilityReport stability_data(const FJet& j) {
  const auto& f = j.f;
  const auto& fp = j.fp;
  StabilityReport rep;

  const double x = (fp[1] + f[0] / 4.0) * (fp[2] - f[0] / 4.0);
  rep.p_fvars = -4.0 / 81.0 * (f[3] * f[3] + f[4] * f[4]) * (fp[3] * fp[3] + fp[4] * fp[4] - x);
  if (f[0] != 0.0) {
    const PsiCoeffs c = coefficients_from_f(j);
    rep.p_coeff = c.p_invariant();
    rep.invariance_residual = wedge(kahler_form(f), psi_form(c)).max_abs();
  }

  const double fr = j.frak();
  rep.f1_negative = f[0] < 0.0;
  rep.frak_positive = fr > 0.0;
  const double fscale = std::max(std::hypot(f[3], f[4]), 1e-300) * std::max(std::hypot(fp[3], fp[4]), 1.0);
  rep.phase_constant = std::abs(j.phase_defect()) <= 1e-9 * (1.0 + fscale);
  if (rep.frak_positive) {
    const double frp = j.frak_prime();
    const double stab = frp * frp - x;
    rep.inequality = stab > 0.0;
    rep.first_condition_residual = 4.0 * fr * fr - stab * f[0] * f[0];
    const double scale = 1.0 + 4.0 * fr * fr + std::abs(stab) * f[0] * f[0];
    rep.first_condition = std::abs(rep.first_condition_residual) <= 1e-8 * scale;
  }
  rep.ok = rep.f1_negative && rep.frak_positive && rep.phase_constant && rep.first_condition && rep.inequality;
  return rep;
}

Eigen::Matrix<double, 6, 6> metric_matrix(const FJet& j) {
  const StabilityReport rep = stability_data(j);
  if (!rep.ok) throw NotStableError("metric_matrix: condition violated: " + rep.failure());
  const Endo6 jm = j_psi_matrix(coefficients_from_f(j));
  const KForm w = kahler_form(j.f);
  Eigen::Matrix<double, 6, 6> wm = Eigen::Matrix<double, 6, 6>::Zero();
  for (std::size_t i = 0; i < w.size(); ++i) {
    const std::uint8_t m = w.mask(i);
    int a = -1, b = -1;
    for (int e = 0; e < kDim; ++e)
      if (m & (1u << e)) (a < 0 ? a : b) = e;
    wm(a, b) = w[i];
    wm(b, a) = -w[i];
  }
  return wm * jm;
}

std::pair<KForm, KForm> nk_residual_forms(const FJet& j, const F5& fpp) {
  const auto& f = j.f;
  const auto& fp = j.fp;
  if (f[0] == 0.0) throw DomainError("nk_residual_forms: f1 = 0");
  const PsiCoeffs c = coefficients_from_f(j);

  const KForm res3 = d_invariant_2form(f, fp) - 3.0 * psi_form(c);

  PsiCoeffs dc;
  const double f1 = f[0], f1p = fp[0];
  dc.phat[0] = {0.0, 0.0, -2.0 / 3.0 * (fp[4] * f1 - f[4] * f1p) / (f1 * f1),
                2.0 / 3.0 * (fp[3] * f1 - f[3] * f1p) / (f1 * f1)};
  dc.phat[1] = {(f1p * (fp[1] + f1 / 4.0) + f1 * (fpp[1] + f1p / 4.0)) / 3.0,
                (f1p * (fp[2] - f1 / 4.0) + f1 * (fpp[2] - f1p / 4.0)) / 3.0,
                (f1p * fp[3] + f1 * fpp[3]) / 3.0, (f1p * fp[4] + f1 * fpp[4]) / 3.0};
  const KForm w = kahler_form(f);
  const KForm res4 = d_invariant(psi_form(c, true), psi_form(dc, true)) + 2.0 * j.mu * wedge(w, w);
  return {res3, res4};
}

}  // namespace nk
