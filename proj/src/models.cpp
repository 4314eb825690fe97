#include "nk/models.hpp"

#include <cmath>
#include <string>

#include "nk/errors.hpp"

namespace nk {

namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kSqrt3 = std::sqrt(3.0);
const double kSqrt6 = std::sqrt(6.0);

ModelJet sphere6(double t) {
  const double s = std::sin(t), c = std::cos(t);
  const double c3 = std::cos(3.0 * t);
  ModelJet m;
  m.jet.t = t;
  m.jet.mu = 1.0;
  m.jet.f = {-s, (4.0 - 9.0 * s * s) * c / 8.0, -s * s * c / 8.0, 0.0, 3.0 * s * s * c / 8.0};
  m.jet.fp = {-c, (27.0 * s * s - 22.0) * s / 8.0, (3.0 * s * s - 2.0) * s / 8.0, 0.0,
              -3.0 * (3.0 * s * s - 2.0) * s / 8.0};
  m.fpp = {s, (59.0 - 81.0 * c * c) * c / 8.0, (c - 9.0 * c3) / 32.0, 0.0, 3.0 * (9.0 * c3 - c) / 32.0};
  return m;
}

// Already sign-flipped.
ModelJet twistor(double t) {
  const double s = std::sin(t), c = std::cos(t);
  const double s2 = std::sin(2.0 * t), c2 = std::cos(2.0 * t);
  const double s4 = std::sin(4.0 * t), c4 = std::cos(4.0 * t);
  ModelJet m;
  m.jet.t = t;
  m.jet.mu = 2.0;
  m.jet.f = {-s * c, -(2.0 * s * s - c * c) * c * c / 16.0, -(2.0 * c * c - s * s) * s * s / 16.0, 0.0,
             3.0 * s * s * c * c / 16.0};
  m.jet.fp = {-c2, -(2.0 * s2 + 3.0 * s4) / 32.0, (2.0 * s2 - 3.0 * s4) / 32.0, 0.0, 3.0 * s4 / 32.0};
  m.fpp = {2.0 * s2, -(c2 + 3.0 * c4) / 8.0, (c2 - 3.0 * c4) / 8.0, 0.0, 3.0 * c4 / 8.0};
  return m;
}

ModelJet s3xs3(double t) {
  const double k = kSqrt6;
  const double a = kSqrt3 / 36.0;
  ModelJet m;
  m.jet.t = t;
  m.jet.mu = 2.0;
  m.jet.f = {-kSqrt2 / 3.0, a * std::sin(2.0 * k * t), 0.0, 0.0, -a * std::sin(k * t)};
  m.jet.fp = {0.0, 2.0 * k * a * std::cos(2.0 * k * t), 0.0, 0.0, -k * a * std::cos(k * t)};
  m.fpp = {0.0, -24.0 * a * std::sin(2.0 * k * t), 0.0, 0.0, 6.0 * a * std::sin(k * t)};
  return m;
}

void check_range(const Interval& r, double t, const char* what) {
  if (!r.contains_open(t)) {
    throw DomainError(std::string(what) + ": t = " + std::to_string(t) + " outside (" + std::to_string(r.lo) +
                      ", " + std::to_string(r.hi) + ")");
  }
}

}  // namespace

const char* to_string(ModelId m) {
  switch (m) {
    case ModelId::Sphere6: return "S6";
    case ModelId::TwistorCP3: return "CP3";
    case ModelId::S3xS3: return "S3xS3";
  }
  return "?";
}

std::optional<ModelId> parse_model(std::string_view name) {
  if (name == "S6" || name == "Sphere6" || name == "sphere6") return ModelId::Sphere6;
  if (name == "CP3" || name == "TwistorCP3" || name == "twistor") return ModelId::TwistorCP3;
  if (name == "S3xS3" || name == "s3xs3") return ModelId::S3xS3;
  return std::nullopt;
}

Interval model_range(ModelId m) {
  switch (m) {
    case ModelId::Sphere6:
    case ModelId::TwistorCP3: return {0.0, M_PI / 2.0};
    case ModelId::S3xS3: return {0.0, M_PI / (2.0 * kSqrt6)};
  }
  return {};
}

double model_mu(ModelId m) { return m == ModelId::Sphere6 ? 1.0 : 2.0; }

ModelJet model_jet(ModelId m, double t) {
  check_range(model_range(m), t, "model_jet");
  switch (m) {
    case ModelId::Sphere6: return sphere6(t);
    case ModelId::TwistorCP3: return twistor(t);
    case ModelId::S3xS3: return s3xs3(t);
  }
  throw DomainError("model_jet: unknown model");
}

FJet model_f(ModelId m, double t) { return model_jet(m, t).jet; }

double s3xs3_base_point() { return M_PI / (4.0 * kSqrt6); }

HState model_h_point(ModelId m, double t_o) { return h_state_from_jet(model_f(m, t_o), 0.0, 0.0); }

Interval sphere6_rescaled_range() { return {0.0, M_PI / (2.0 * kSqrt2)}; }

ModelJet sphere6_rescaled_jet(double t) {
  check_range(sphere6_rescaled_range(), t, "sphere6_rescaled_jet");
  const ModelJet b = sphere6(M_PI / 2.0 - kSqrt2 * t);
  ModelJet m;
  m.jet.t = t;
  m.jet.mu = 2.0;
  m.jet.f[0] = b.jet.f[0] / kSqrt2;
  m.jet.fp[0] = -b.jet.fp[0];
  m.fpp[0] = kSqrt2 * b.fpp[0];
  for (int i = 1; i < 5; ++i) {
    m.jet.f[i] = -0.5 * b.jet.f[i];
    m.jet.fp[i] = 0.5 * kSqrt2 * b.jet.fp[i];
    m.fpp[i] = -b.fpp[i];
  }
  return m;
}

FJet sphere6_rescaled_f(double t) { return sphere6_rescaled_jet(t).jet; }

const char* to_string(SingularModel m) { return m == SingularModel::S3xS3 ? "S3xS3" : "S6"; }

double singular_model_c1(SingularModel m) { return m == SingularModel::S3xS3 ? 1.0 / 9.0 : 0.25; }

HState singular_model_h(SingularModel m, double s) {
  HState x;
  x.s = s;
  x.mu = 2.0;
  if (m == SingularModel::S3xS3) {
    const double w2 = 2.0 / kSqrt3, w4 = 4.0 / kSqrt3;
    x.a = {s / 9.0, -kSqrt3 / 36.0 * std::sin(w4 * s), -kSqrt3 / 36.0 * std::sin(w4 * s),
           kSqrt3 / 18.0 * std::sin(w2 * s)};
    x.b = {1.0 / 9.0, -std::cos(w4 * s) / 9.0, -std::cos(w4 * s) / 9.0, std::cos(w2 * s) / 9.0};
    return x;
  }
  const double th = std::tanh(s);
  const double se = 1.0 / std::cosh(s);
  const double q = se * se;  // sech^2
  x.a = {0.25 * th, th * (2.0 - 5.0 * q) / 8.0, 0.25 * th * (1.0 - 2.0 * q), 3.0 / 8.0 * q * th};
  x.b = {0.25 * q, (2.0 * q - 5.0 * q * q + 10.0 * th * th * q) / 8.0, 0.25 * (q - 2.0 * q * q + 4.0 * th * th * q),
         3.0 / 8.0 * (q * q - 2.0 * th * th * q)};
  return x;
}

double singular_model_t(SingularModel m, double s) {
  if (m == SingularModel::S3xS3) return -kSqrt2 * s / 3.0;
  const double gd = 2.0 * std::atan(std::tanh(0.5 * s));
  return -gd / kSqrt2;
}

ModelJet rescale_jet(const ModelJet& mj, double mu_target) {
  if (!(mu_target > 0.0)) throw DomainError("rescale_jet: mu must be positive");
  const double k = mj.jet.mu / mu_target;
  const double rk = std::sqrt(k);
  ModelJet out = mj;
  out.jet.mu = mu_target;
  out.jet.t = rk * mj.jet.t;
  // d/dt_new = k^{-1/2} d/dt
  out.jet.f[0] = rk * mj.jet.f[0];
  out.jet.fp[0] = mj.jet.fp[0];
  out.fpp[0] = mj.fpp[0] / rk;
  for (int i = 1; i < 5; ++i) {
    out.jet.f[i] = k * mj.jet.f[i];
    out.jet.fp[i] = rk * mj.jet.fp[i];
    out.fpp[i] = mj.fpp[i];
  }
  return out;
}

}  // namespace nk
