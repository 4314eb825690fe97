#pragma once

// Identification of regular solutions with the homogeneous models. The
// h-system is autonomous, so a solution is (locally) one of the models iff its
// initial point lies on the model's trace in R^7, up to the group T.

#include <optional>

#include "nk/models.hpp"
#include "nk/nk_ode.hpp"

namespace nk {

// h-point of model m, rescaled to Einstein constant mu, at model parameter t
// (t in the rescaled range).
HState model_h_point_mu(ModelId m, double mu, double t);
Interval model_range_mu(ModelId m, double mu);

struct TraceDistance {
  double distance = 0.0;  // min over t of the sup distance of canonical representatives
  double t = 0.0;         // minimiser
};
TraceDistance model_trace_distance(ModelId m, const HState& x0);

struct RegularMatch {
  std::optional<ModelId> model;
  double distance = 0.0;  // to the closest model trace
  double t = 0.0;
};
RegularMatch match_regular_point(const HState& x0, double tol = 1e-6);

}  // namespace nk
