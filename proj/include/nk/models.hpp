#pragma once

// Closed-form homogeneous nearly Kaehler solutions used as oracles.

#include <optional>
#include <string_view>

#include "nk/invariant_frame.hpp"
#include "nk/nk_ode.hpp"

namespace nk {

enum class ModelId { Sphere6, TwistorCP3, S3xS3 };

const char* to_string(ModelId m);
std::optional<ModelId> parse_model(std::string_view name);

struct Interval {
  double lo = 0.0, hi = 0.0;
  bool contains_open(double t) const { return t > lo && t < hi; }
};

struct ModelJet {
  FJet jet;
  F5 fpp{};
};

// Regular parameter range (open interval) and Einstein constant mu.
Interval model_range(ModelId m);
double model_mu(ModelId m);

// Exact values and analytic first and second derivatives. TwistorCP3 returns
// the sign-flipped family -f_i, which is the one with f1 < 0 and mu = 2.
ModelJet model_jet(ModelId m, double t);
FJet model_f(ModelId m, double t);

// Base point pi / (4 sqrt 6) of the S3 x S3 family, where its h-data is
// x_o = (0, sqrt3, sqrt3, sqrt6 | 4, 0, 0, -2 sqrt2) / 36.
double s3xs3_base_point();

// h-data at s = 0 for base point t_o (a1 = 0); derivatives are analytic.
HState model_h_point(ModelId m, double t_o);

// S6 rescaled to mu = 2 and reflected so that t = 0 is the singular orbit:
//   f1~(t) = -(1/sqrt2) cos(sqrt2 t),  fi~(t) = -(1/2) fi(pi/2 - sqrt2 t), i >= 2.
Interval sphere6_rescaled_range();
ModelJet sphere6_rescaled_jet(double t);
FJet sphere6_rescaled_f(double t);

// Homogeneous solutions written through the singular orbit S3 (t_o = 0,
// h4 = 2 f5 signed, mu = 2) as exact functions of s.
enum class SingularModel { S3xS3, Sphere6 };
const char* to_string(SingularModel m);
double singular_model_c1(SingularModel m);  // 1/9 and 1/4
HState singular_model_h(SingularModel m, double s);
// t(s) along the same curves: -sqrt2 s / 3 and -gd(s) / sqrt2.
double singular_model_t(SingularModel m, double s);

// Homothety to a different Einstein constant: g -> k g with k = mu / mu_target
// gives f1 -> sqrt(k) f1, fi -> k fi (i >= 2) as functions of the new unit-speed
// parameter sqrt(k) t.
ModelJet rescale_jet(const ModelJet& mj, double mu_target);

}  // namespace nk
