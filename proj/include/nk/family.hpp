#pragma once

// Points of the constraint variety N near a given point, used to sample the
// regular family.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "nk/nk_ode.hpp"

namespace nk {

// d(I1..I4) / d(a2, a3, a4, b1, b2, b3, b4).
Eigen::Matrix<double, 4, 7> first_integrals_jacobian(const HState& x);

// Gauss-Newton with minimum-norm steps until max |I^k| <= tol. a1, s and mu
// are kept. Throws NumericalError if it does not converge.
HState project_to_constraints(const HState& x, double tol = 1e-12, int max_iter = 50);

// n points of N obtained by perturbing the R^7 part of x0 with N(0, scale^2)
// noise and projecting; points failing the inequalities are redrawn.
std::vector<HState> random_family_points(const HState& x0, int n, std::uint64_t seed, double scale = 1e-2,
                                         double tol = 1e-12);

}  // namespace nk
