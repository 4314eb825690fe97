#include "nk/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>

#include "nk/errors.hpp"

namespace nk {

Interval model_range_mu(ModelId m, double mu) {
  const Interval r = model_range(m);
  const double rk = std::sqrt(model_mu(m) / mu);
  return {rk * r.lo, rk * r.hi};
}

HState model_h_point_mu(ModelId m, double mu, double t) {
  if (!(mu > 0.0)) throw DomainError("model_h_point_mu: mu must be positive");
  const double rk = std::sqrt(model_mu(m) / mu);
  const ModelJet mj = rescale_jet(model_jet(m, t / rk), mu);
  return h_state_from_jet(mj.jet, 0.0, 0.0);
}

TraceDistance model_trace_distance(ModelId m, const HState& x0) {
  const Interval r = model_range_mu(m, x0.mu);
  const Point7 target = canonical_representative(x0.point7());
  auto dist = [&](double t) {
    return sup_distance(canonical_representative(model_h_point_mu(m, x0.mu, t).point7()), target);
  };
  // Coarse scan, then Brent on the bracketing cell. The canonical map is only
  // piecewise smooth, which Brent tolerates.
  constexpr int kScan = 400;
  const double h = (r.hi - r.lo) / kScan;
  TraceDistance best{std::numeric_limits<double>::infinity(), r.lo};
  int ibest = 1;
  for (int i = 1; i < kScan; ++i) {
    const double t = r.lo + i * h;
    const double d = dist(t);
    if (d < best.distance) {
      best = {d, t};
      ibest = i;
    }
  }
  // The ranges are open, so an end cell is bracketed half a cell short.
  const double a = r.lo + std::max(ibest - 1.0, 0.5) * h;
  const double b = r.lo + std::min(ibest + 1.0, kScan - 0.5) * h;
  const auto [tm, dm] = boost::math::tools::brent_find_minima(dist, a, b, 52);
  if (dm < best.distance) best = {dm, tm};
  return best;
}

RegularMatch match_regular_point(const HState& x0, double tol) {
  RegularMatch out;
  out.distance = std::numeric_limits<double>::infinity();
  ModelId closest = ModelId::S3xS3;
  for (ModelId m : {ModelId::S3xS3, ModelId::Sphere6, ModelId::TwistorCP3}) {
    const TraceDistance d = model_trace_distance(m, x0);
    if (d.distance < out.distance) {
      out.distance = d.distance;
      out.t = d.t;
      closest = m;
    }
  }
  if (out.distance < tol) out.model = closest;
  return out;
}

}  // namespace nk
