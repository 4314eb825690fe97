#pragma once

// SU2 x SU2 invariant calculus along the normal geodesic gamma_t.
//
// Lie algebra basis (U, A, E1, V1, E2, V2) with U = (H, H), A = (H, -H) and
// E_i, V_i the copies of E, V in the i-th su2 factor, where
//   H = diag(i/2, -i/2),  E = [[0, 1], [-1, 0]] / (2 sqrt 2),
//   V = [[0, i], [i, 0]] / (2 sqrt 2).
//
// Tangent frame at gamma_t: (xi, A^, E1^, V1^, E2^, V2^) -> indices 0..5, and
// the coframe (xi*, A*, E1*, V1*, E2*, V2*) is the basis of forms6.

#include <array>
#include <string>
#include <utility>

#include "nk/forms6.hpp"

namespace nk {

enum LieIndex : int { kU = 0, kA = 1, kE1 = 2, kV1 = 3, kE2 = 4, kV2 = 5 };
enum FrameIndex : int { kXi = 0, kAhat = 1, kE1hat = 2, kV1hat = 3, kE2hat = 4, kV2hat = 5 };

struct LieBasis {
  // c[i][j][k]: coefficient of X_k in [X_i, X_j].
  std::array<std::array<std::array<double, 6>, 6>, 6> c{};
  // Diagonal of the Cartan-Killing form, normalised so that B(E, E) = -1.
  std::array<double, 6> killing{};

  Vec6 bracket(const Vec6& x, const Vec6& y) const;
  double jacobi_residual() const;
  double antisymmetry_residual() const;
};

const LieBasis& lie_basis();

using F5 = std::array<double, 5>;

struct FJet {
  double t = 0.0;
  F5 f{};   // f1..f5
  F5 fp{};  // f1'..f5'
  double mu = 1.0;

  // frak = sqrt(f4^2 + f5^2) and its derivative.
  double frak() const;
  double frak_prime() const;
  // f4 f5' - f5 f4'; zero iff the phase of (f4, f5) is constant.
  double phase_defect() const;
};

struct PsiCoeffs {
  // p[a][j - 2] and phat[a][j - 2] for a = 0 (xi* ^ omega^j), a = 1 (A* ^ omega^j), j = 2..5.
  std::array<std::array<double, 4>, 2> p{};
  std::array<std::array<double, 4>, 2> phat{};
  double q = 0.0;  // p14^2 + p15^2 - p12 p13

  double r() const { return p[1][2] * p[1][2] + p[1][3] * p[1][3]; }
  // P of the coefficient formula: -(p24^2 + p25^2) q.
  double p_invariant() const { return -r() * q; }
};

KForm xi_star();
KForm a_star();
// omega^1..omega^5 (array index i - 1).
std::array<KForm, 5> omega_basis();
// xi* ^ omega^j (a = 1) or A* ^ omega^j (a = 2), j = 1..5.
KForm psi_basis(int a, int j);

KForm kahler_form(const F5& f);
// Sum p_aj psi^{aj} (hat = false) or sum phat_aj psi^{aj} (hat = true).
KForm psi_form(const PsiCoeffs& c, bool hat = false);

// Exterior derivative at gamma_t of an invariant form whose coefficients in
// the coframe are given together with their t-derivatives.
KForm d_invariant(const KForm& form, const KForm& form_dt);
KForm d_invariant_2form(const F5& f, const F5& fp);

PsiCoeffs coefficients_from_f(const FJet& j);

// diag(K, L); throws NotStableError if q <= 0 or p24^2 + p25^2 = 0.
Endo6 j_psi_matrix(const PsiCoeffs& c);

struct StabilityReport {
  double p_coeff = 0.0;  // from PsiCoeffs
  double p_fvars = 0.0;  // -4/81 (f4^2+f5^2)((f4')^2+(f5')^2-(f2'+f1/4)(f3'-f1/4))
  bool f1_negative = false;
  bool frak_positive = false;
  bool phase_constant = false;
  bool inequality = false;       // (frak')^2 - (f2'+f1/4)(f3'-f1/4) > 0
  bool first_condition = false;  // 4 frak^2 - (...) f1^2 = 0 within tolerance
  double first_condition_residual = 0.0;
  // max |omega ^ psi|. Conditions (i)-(iii) do not force it to vanish; it
  // vanishes on solutions of the full system, and the Gram matrix is
  // symmetric exactly when it does. Not part of ok.
  double invariance_residual = 0.0;
  bool ok = false;

  // Name of the first failing condition, empty if ok.
  std::string failure() const;
};

StabilityReport stability_data(const FJet& j);

// Gram matrix g(e_a, e_b) = omega(e_a, J_psi e_b) in the frame B_t.
// Throws NotStableError naming the failed condition.
Eigen::Matrix<double, 6, 6> metric_matrix(const FJet& j);

// (d omega - 3 psi, d psihat + 2 mu omega ^ omega) at gamma_t, with psihat
// given by the phat coefficients and differentiated using fpp.
std::pair<KForm, KForm> nk_residual_forms(const FJet& j, const F5& fpp);

}  // namespace nk
