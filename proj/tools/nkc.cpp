// nkc: command-line front end.
//
//   nkc classify <20 coefficients> [--vol-scale c]
//   nkc verify-model <S6|CP3|S3xS3> [--samples n]
//   nkc solve-regular (--xo | --point a2,a3,a4,b1,b2,b3,b4) [--mu] [--span lo,hi]
//   nkc solve-singular (--c1 v,... | --grid lo,hi,step) [--span s_max] [--series-order N] [--switch s]
//   nkc scan [--family singular|regular] ...
//
// Exit codes: 0 success, 2 input error, 3 constraint-membership failure,
// 4 numerical failure.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nk/errors.hpp"
#include "nk/family.hpp"
#include "nk/forms6.hpp"
#include "nk/invariant_frame.hpp"
#include "nk/io.hpp"
#include "nk/matching.hpp"
#include "nk/models.hpp"
#include "nk/nk_ode.hpp"
#include "nk/singular_ivp.hpp"

#ifndef NK_VERSION
#define NK_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

enum Exit : int { kOk = 0, kInput = 2, kMembership = 3, kNumerical = 4 };

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::optional<double> mu;
  std::optional<double> tol;
  std::vector<double> span;
  int series_order = 20;
  std::optional<double> s_switch;
  std::string out = ".";
  std::string config;
  int jobs = 0;
  std::uint64_t seed = 1;

  // classify
  std::vector<std::string> coeffs;
  double vol_scale = 1.0;
  // verify-model
  std::string model;
  int samples = 100;
  // solve-regular
  std::vector<double> point;
  bool xo = false;
  double membership_tol = 1e-10;
  // solve-singular / scan
  std::vector<double> c1;
  std::vector<double> grid;
  bool snap = false;
  std::string family = "singular";
  int count = 20;
  double scale = 1e-2;
};

double wall_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json vec_json(const auto& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream f(p);
  if (!f) throw nk::Error("cannot open " + p.string() + " for writing");
  f << j.dump(2) << '\n';
}

int default_jobs() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

// Runs task(i) for i in [0, n) on a pool of `jobs` threads.
template <class F>
void parallel_for(std::size_t n, int jobs, F task) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) task(i);
    });
  }
  for (auto& t : pool) t.join();
}

json config_echo(const RunConfig& c, const std::string& command) {
  json j;
  j["command"] = command;
  if (c.mu) j["mu"] = *c.mu;
  if (c.tol) j["tol"] = *c.tol;
  if (!c.span.empty()) j["span"] = vec_json(c.span);
  j["series_order"] = c.series_order;
  if (c.s_switch) j["switch"] = *c.s_switch;
  j["out"] = c.out;
  j["jobs"] = c.jobs;
  j["seed"] = c.seed;
  return j;
}

// ---- classify ---------------------------------------------------------------

std::vector<double> parse_coefficients(const std::vector<std::string>& tokens) {
  // Accept both separate arguments and comma-separated lists.
  std::vector<std::string> parts;
  for (const auto& t : tokens) {
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) parts.push_back(item);
    }
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::string& s = parts[i];
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
      throw InputError("coefficient " + std::to_string(i + 1) + ": cannot parse '" + s + "'");
    }
    out.push_back(v);
  }
  if (out.size() != 20) {
    throw InputError("expected 20 coefficients of a 3-form, got " + std::to_string(out.size()));
  }
  return out;
}

int cmd_classify(const RunConfig& cfg) {
  const std::vector<double> c = parse_coefficients(cfg.coeffs);
  if (!(cfg.vol_scale != 0.0) || !std::isfinite(cfg.vol_scale)) throw InputError("--vol-scale must be nonzero");
  const nk::KForm theta(3, c);
  const nk::KForm vol = nk::KForm::volume() * cfg.vol_scale;
  nk::StabilityClass st;
  try {
    st = nk::stability_invariant(theta, vol);
  } catch (const nk::ConsistencyError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  std::printf("P = %.17g\nclass = %s\n", st.value, nk::to_string(st.tag));
  if (st.tag == nk::StabilityClass::Tag::NegativeOrbit) {
    const nk::Endo6 J = nk::complex_structure(theta, vol);
    std::printf("J =\n");
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) std::printf("%s% .12g", j ? " " : "  ", J(i, j));
      std::printf("\n");
    }
  }
  return kOk;
}

// ---- verify-model -----------------------------------------------------------

int cmd_verify_model(const RunConfig& cfg) {
  const auto m = nk::parse_model(cfg.model);
  if (!m) throw InputError("unknown model '" + cfg.model + "' (expected S6, CP3 or S3xS3)");
  if (cfg.samples < 1) throw InputError("--samples must be positive");
  const double tol = cfg.tol.value_or(1e-9);
  const nk::Interval r = nk::model_range(*m);

  double max_ode = 0.0, max_forms = 0.0, min_eig = INFINITY;
  int stability_failures = 0;
  for (int i = 1; i <= cfg.samples; ++i) {
    const double t = r.lo + (r.hi - r.lo) * i / (cfg.samples + 1);
    const nk::ModelJet mj = nk::model_jet(*m, t);
    for (double v : nk::f_system_residual(mj.jet, mj.fpp)) max_ode = std::max(max_ode, std::abs(v));
    const auto [r1, r2] = nk::nk_residual_forms(mj.jet, mj.fpp);
    max_forms = std::max({max_forms, r1.max_abs(), r2.max_abs()});
    if (!nk::stability_data(mj.jet).ok) ++stability_failures;
    try {
      const auto g = nk::metric_matrix(mj.jet);
      const Eigen::Matrix<double, 6, 6> gs = 0.5 * (g + g.transpose());
      min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>>(gs).eigenvalues().minCoeff());
    } catch (const nk::NotStableError&) {
      min_eig = -INFINITY;
    }
  }
  const bool pass = max_ode < tol && max_forms < tol && stability_failures == 0 && min_eig > 0.0;
  std::printf("model = %s (mu = %g), samples = %d\n", nk::to_string(*m), nk::model_mu(*m), cfg.samples);
  std::printf("max f-system residual = %.3e\n", max_ode);
  std::printf("max form residual     = %.3e\n", max_forms);
  std::printf("stability failures    = %d\n", stability_failures);
  std::printf("min metric eigenvalue = %.6e\n", min_eig);
  std::printf("%s\n", pass ? "PASS" : "FAIL");
  return pass ? kOk : kNumerical;
}

// ---- solve-regular ----------------------------------------------------------

std::pair<double, double> regular_span(const RunConfig& cfg) {
  if (cfg.span.empty()) return {-0.1, 0.1};
  if (cfg.span.size() == 1) {
    if (cfg.span[0] == 0.0) throw InputError("--span must be nonzero");
    return {std::min(0.0, cfg.span[0]), std::max(0.0, cfg.span[0])};
  }
  if (cfg.span.size() != 2 || !(cfg.span[0] <= 0.0 && 0.0 <= cfg.span[1] && cfg.span[0] < cfg.span[1])) {
    throw InputError("--span for solve-regular must be lo,hi with lo <= 0 <= hi");
  }
  return {cfg.span[0], cfg.span[1]};
}

nk::HState regular_start(const RunConfig& cfg, double mu) {
  if (cfg.xo == !cfg.point.empty()) throw InputError("give exactly one of --xo or --point");
  if (cfg.xo) {
    if (mu != 2.0) throw InputError("--xo is the mu = 2 base point; use --mu 2");
    return nk::model_h_point(nk::ModelId::S3xS3, nk::s3xs3_base_point());
  }
  if (cfg.point.size() != 7) throw InputError("--point needs 7 values a2,a3,a4,b1,b2,b3,b4");
  nk::HState x;
  x.mu = mu;
  x.a = {0.0, cfg.point[0], cfg.point[1], cfg.point[2]};
  x.b = {cfg.point[3], cfg.point[4], cfg.point[5], cfg.point[6]};
  return x;
}

int cmd_solve_regular(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const double mu = cfg.mu.value_or(2.0);
  if (!(mu > 0.0)) throw InputError("--mu must be positive");
  const double tol = cfg.tol.value_or(1e-10);
  if (!(tol > 0.0)) throw InputError("--tol must be positive");
  const auto [lo, hi] = regular_span(cfg);
  const nk::HState x0 = regular_start(cfg, mu);

  const nk::MembershipReport mem = nk::membership_report(x0, cfg.membership_tol);
  if (!mem.member()) {
    std::fprintf(stderr, "point is not on the constraint variety N (tolerance %.3g)\n", cfg.membership_tol);
    for (int k = 0; k < 4; ++k) std::fprintf(stderr, "  |I%d| = %.3e\n", k + 1, std::abs(mem.integrals[k]));
    std::fprintf(stderr, "  b1 > 0: %s, b2^2-b3^2-b4^2 < 0: %s, long inequality: %s\n", mem.b1_positive ? "yes" : "no",
                 mem.ineq_short ? "yes" : "no", mem.ineq_long ? "yes" : "no");
    return kMembership;
  }

  const nk::SolutionCurve curve = nk::integrate(x0, lo, hi, tol);
  const nk::RegularMatch match = nk::match_regular_point(x0);
  const nk::Point7 canon = nk::canonical_representative(x0.point7());

  fs::create_directories(cfg.out);
  const fs::path csv = fs::path(cfg.out) / "regular.csv";
  nk::write_curve_csv(csv.string(), curve);

  json man;
  man["version"] = NK_VERSION;
  man["config"] = config_echo(cfg, "solve-regular");
  man["mu"] = mu;
  man["point"] = vec_json(x0.point7());
  man["integrals"] = vec_json(mem.integrals);
  man["span"] = {curve.grid.front(), curve.grid.back()};
  man["stop_reason"] = nk::to_string(curve.meta.reason);
  man["stop_message"] = curve.meta.message;
  man["steps"] = curve.meta.steps;
  man["drift"] = vec_json(curve.drift);
  man["conservation"] = vec_json(curve.conservation);
  man["canonical_representative"] = vec_json(canon);
  man["matched_model"] = match.model ? json(nk::to_string(*match.model)) : json(nullptr);
  man["model_trace_distance"] = match.distance;
  man["csv_path"] = csv.string();
  man["wall_time_s"] = wall_seconds(t0);
  write_json(fs::path(cfg.out) / "regular.json", man);

  const double drift = *std::max_element(curve.drift.begin(), curve.drift.end());
  std::printf("integrated s in [%.6g, %.6g]: %s, %zu steps\n", curve.grid.front(), curve.grid.back(),
              nk::to_string(curve.meta.reason), curve.meta.steps);
  std::printf("max drift = %.3e\n", drift);
  std::printf("canonical representative =");
  for (double v : canon) std::printf(" %.12g", v);
  std::printf("\nmatched model = %s\n", match.model ? nk::to_string(*match.model) : "none");
  std::printf("wrote %s\n", csv.c_str());
  return curve.completed() ? kOk : kNumerical;
}

// ---- solve-singular and scan ------------------------------------------------

std::vector<double> c1_grid(double lo, double hi, double step, bool snap) {
  if (!(step > 0.0) || !(lo > 0.0) || hi < lo) throw InputError("grid must be lo,hi,step with 0 < lo <= hi, step > 0");
  std::vector<double> g;
  const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
  for (int i = 0; i <= n; ++i) g.push_back(lo + i * step);
  if (snap) {
    // Replace the nearest grid values by the two homogeneous ones.
    for (double h : {1.0 / 9.0, 0.25}) {
      auto it = std::min_element(g.begin(), g.end(), [h](double a, double b) { return std::abs(a - h) < std::abs(b - h); });
      *it = h;
    }
  }
  return g;
}

struct SingularRun {
  double c1 = 0.0;
  bool ok = false;
  std::string error;
  json manifest;
  nk::SolutionCurve curve;
};

std::string c1_tag(double c1) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "c1_%.10g", c1);
  return buf;
}

SingularRun run_singular(const RunConfig& cfg, double c1) {
  const auto t0 = std::chrono::steady_clock::now();
  SingularRun run;
  run.c1 = c1;
  nk::SingularOptions opt;
  if (!cfg.span.empty()) {
    if (cfg.span.size() != 1) throw InputError("--span for solve-singular is a single s_max");
    opt.s_max = cfg.span[0];
  }
  opt.N = cfg.series_order;
  opt.s_switch = cfg.s_switch;
  opt.tol = cfg.tol.value_or(1e-10);

  const fs::path csv = fs::path(cfg.out) / (c1_tag(c1) + ".csv");
  json& man = run.manifest;
  man["version"] = NK_VERSION;
  man["c1"] = c1;
  man["N"] = opt.N;
  man["s_max"] = opt.s_max;
  try {
    nk::NkReconstruction rec = nk::reconstruct_nk(c1, opt);
    const auto& sol = rec.solution;
    const auto& rep = rec.report;
    const auto match = nk::match_singular_model(sol.curve);
    nk::write_curve_csv(csv.string(), sol.curve);
    man["s_switch"] = sol.s_switch;
    man["drift"] = vec_json(sol.curve.drift);
    man["matched_model"] = match ? json(nk::to_string(*match)) : json(nullptr);
    man["verification"] = {{"extension", rep.extension.ok && rep.extension.nondegenerate},
                           {"stability", rep.stability_ok},
                           {"positivity", rep.positivity_ok}};
    man["csv_path"] = csv.string();
    man["details"] = {{"radius_estimate", sol.series.radius_estimate},
                      {"handoff_mismatch", sol.handoff_mismatch},
                      {"stop_reason", nk::to_string(sol.curve.meta.reason)},
                      {"p_prime_limit_formula", rep.p_prime_limit_formula},
                      {"p_prime_limit_numeric", rep.p_prime_limit_numeric},
                      {"max_p_prime", rep.max_p_prime},
                      {"min_metric_eigenvalue", rep.min_eigenvalue},
                      {"stability_failure", rep.stability_failure},
                      {"s_valid_max", rep.s_valid_max},
                      {"distance_S3xS3", nk::singular_model_distance(sol.curve, nk::SingularModel::S3xS3)},
                      {"distance_S6", nk::singular_model_distance(sol.curve, nk::SingularModel::Sphere6)}};
    run.ok = rep.ok() && sol.curve.completed();
    if (!run.ok) run.error = rep.ok() ? "integration stopped early" : "verification failed";
    run.curve = sol.curve;
  } catch (const nk::DomainError&) {
    throw;
  } catch (const nk::Error& e) {
    run.error = e.what();
    man["error"] = run.error;
    man["matched_model"] = nullptr;
  }
  man["config"] = config_echo(cfg, "solve-singular");
  man["wall_time_s"] = wall_seconds(t0);
  write_json(fs::path(cfg.out) / (c1_tag(c1) + ".json"), man);
  return run;
}

std::vector<SingularRun> run_singular_batch(const RunConfig& cfg, const std::vector<double>& c1s) {
  for (double c : c1s)
    if (!(c > 0.0)) throw InputError("c1 must be positive");
  fs::create_directories(cfg.out);
  std::vector<SingularRun> runs(c1s.size());
  std::vector<std::string> input_errors(c1s.size());
  parallel_for(c1s.size(), cfg.jobs > 0 ? cfg.jobs : default_jobs(), [&](std::size_t i) {
    try {
      runs[i] = run_singular(cfg, c1s[i]);
    } catch (const std::exception& e) {
      input_errors[i] = e.what();
    }
  });
  for (const auto& e : input_errors)
    if (!e.empty()) throw InputError(e);
  return runs;
}

void print_singular_summary(const std::vector<SingularRun>& runs) {
  for (const auto& r : runs) {
    const json& m = r.manifest;
    const std::string matched = m.contains("matched_model") && !m["matched_model"].is_null()
                                    ? m["matched_model"].get<std::string>()
                                    : "-";
    std::printf("c1 = %-12.10g %s  matched = %-6s %s\n", r.c1, r.ok ? "ok  " : "FAIL", matched.c_str(),
                r.error.c_str());
  }
}

std::vector<double> singular_c1_values(const RunConfig& cfg) {
  if (!cfg.c1.empty() && !cfg.grid.empty()) throw InputError("give either --c1 or --grid");
  if (!cfg.c1.empty()) return cfg.c1;
  if (cfg.grid.size() == 3) return c1_grid(cfg.grid[0], cfg.grid[1], cfg.grid[2], cfg.snap);
  if (!cfg.grid.empty()) throw InputError("--grid needs lo,hi,step");
  throw InputError("give --c1 or --grid");
}

int cmd_solve_singular(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> c1s = singular_c1_values(cfg);
  const auto runs = run_singular_batch(cfg, c1s);
  print_singular_summary(runs);

  json index;
  index["version"] = NK_VERSION;
  index["config"] = config_echo(cfg, "solve-singular");
  index["runs"] = json::array();
  for (const auto& r : runs) index["runs"].push_back((fs::path(cfg.out) / (c1_tag(r.c1) + ".json")).string());
  index["wall_time_s"] = wall_seconds(t0);
  write_json(fs::path(cfg.out) / "singular_runs.json", index);

  const bool ok = std::all_of(runs.begin(), runs.end(), [](const SingularRun& r) { return r.ok; });
  return ok ? kOk : kNumerical;
}

int scan_singular(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> c1s = cfg.c1;
  if (c1s.empty()) {
    const std::vector<double> g = cfg.grid.empty() ? std::vector<double>{0.05, 0.5, 0.05} : cfg.grid;
    if (g.size() != 3) throw InputError("--grid needs lo,hi,step");
    c1s = c1_grid(g[0], g[1], g[2], cfg.snap);
  }
  const auto runs = run_singular_batch(cfg, c1s);
  print_singular_summary(runs);

  int matched = 0;
  for (const auto& r : runs)
    if (r.manifest.contains("matched_model") && !r.manifest["matched_model"].is_null()) ++matched;

  double min_pair = INFINITY;
  json pairs = json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (std::size_t j = i + 1; j < runs.size(); ++j) {
      if (runs[i].curve.grid.empty() || runs[j].curve.grid.empty()) continue;
      const double d = nk::canonical_curve_distance(runs[i].curve, runs[j].curve);
      min_pair = std::min(min_pair, d);
      pairs.push_back({{"c1_a", runs[i].c1}, {"c1_b", runs[j].c1}, {"distance", d}});
    }
  }
  const bool all_ok = std::all_of(runs.begin(), runs.end(), [](const SingularRun& r) { return r.ok; });
  const bool distinct = min_pair > 1e-4;

  json man;
  man["version"] = NK_VERSION;
  man["config"] = config_echo(cfg, "scan");
  man["family"] = "singular";
  man["c1"] = vec_json(c1s);
  man["matched_count"] = matched;
  man["all_verified"] = all_ok;
  man["min_pairwise_distance"] = min_pair;
  man["pairwise_distinct"] = distinct;
  man["pairs"] = pairs;
  man["runs"] = json::array();
  for (const auto& r : runs) man["runs"].push_back((fs::path(cfg.out) / (c1_tag(r.c1) + ".json")).string());
  man["wall_time_s"] = wall_seconds(t0);
  write_json(fs::path(cfg.out) / "scan.json", man);

  std::printf("matched = %d, min pairwise canonical distance = %.3e, all verified = %s\n", matched, min_pair,
              all_ok ? "yes" : "no");
  return all_ok && distinct ? kOk : kNumerical;
}

int scan_regular(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.count < 1) throw InputError("--count must be positive");
  const double tol = cfg.tol.value_or(1e-10);
  const auto [lo, hi] = regular_span(cfg);
  nk::HState x0 = nk::model_h_point(nk::ModelId::S3xS3, nk::s3xs3_base_point());
  const double mu = cfg.mu.value_or(2.0);
  if (mu != 2.0) throw InputError("regular scans perturb the mu = 2 base point");

  const auto pts = nk::random_family_points(x0, cfg.count, cfg.seed, cfg.scale);
  fs::create_directories(cfg.out);
  std::vector<nk::SolutionCurve> curves(pts.size());
  parallel_for(pts.size(), cfg.jobs > 0 ? cfg.jobs : default_jobs(),
               [&](std::size_t i) { curves[i] = nk::integrate(pts[i], lo, hi, tol); });

  json man;
  man["version"] = NK_VERSION;
  man["config"] = config_echo(cfg, "scan");
  man["family"] = "regular";
  man["runs"] = json::array();
  double worst_drift = 0.0;
  bool all_completed = true;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "regular_%03zu.csv", i);
    const fs::path csv = fs::path(cfg.out) / name;
    nk::write_curve_csv(csv.string(), curves[i]);
    const double d = *std::max_element(curves[i].drift.begin(), curves[i].drift.end());
    worst_drift = std::max(worst_drift, d);
    all_completed = all_completed && curves[i].completed();
    man["runs"].push_back({{"point", vec_json(pts[i].point7())},
                           {"canonical_representative", vec_json(nk::canonical_representative(pts[i].point7()))},
                           {"drift", vec_json(curves[i].drift)},
                           {"stop_reason", nk::to_string(curves[i].meta.reason)},
                           {"csv_path", csv.string()}});
  }
  double min_pair = INFINITY;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      min_pair = std::min(min_pair, nk::sup_distance(nk::canonical_representative(pts[i].point7()),
                                                     nk::canonical_representative(pts[j].point7())));
  man["max_drift"] = worst_drift;
  man["min_pairwise_distance"] = pts.size() > 1 ? json(min_pair) : json(nullptr);
  man["wall_time_s"] = wall_seconds(t0);
  write_json(fs::path(cfg.out) / "scan_regular.json", man);

  std::printf("%zu points, max drift = %.3e, min pairwise canonical distance = %.3e\n", pts.size(), worst_drift,
              min_pair);
  return all_completed && worst_drift < 1e-8 ? kOk : kNumerical;
}

int cmd_scan(const RunConfig& cfg) {
  if (cfg.family == "singular") return scan_singular(cfg);
  if (cfg.family == "regular") return scan_regular(cfg);
  throw InputError("--family must be singular or regular");
}

// Values from a JSON config for options not given on the command line.
void apply_config(CLI::App& app, CLI::App* sub, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot read config " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw InputError("config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string name = "--" + it.key();
    CLI::Option* opt = sub ? sub->get_option_no_throw(name) : nullptr;
    if (!opt) opt = app.get_option_no_throw(name);
    if (!opt) throw InputError("config: unknown key '" + it.key() + "'");
    if (opt->count() > 0) continue;  // command line wins
    std::vector<std::string> vals;
    auto str = [](const json& v) {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
      return v.dump();
    };
    if (it.value().is_array()) {
      for (const auto& v : it.value()) vals.push_back(str(v));
    } else {
      vals.push_back(str(it.value()));
    }
    for (auto& v : vals) opt->add_result(v);
    opt->run_callback();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariant nearly Kaehler structures of cohomogeneity one: classification, model checks and solvers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", NK_VERSION);

  RunConfig cfg;
  app.add_option("--mu", cfg.mu, "Einstein constant (solve-regular)");
  app.add_option("--tol", cfg.tol, "integrator tolerance, or residual threshold for verify-model");
  app.add_option("--span", cfg.span, "s-range: lo,hi (regular) or s_max (singular)")->delimiter(',');
  app.add_option("--series-order", cfg.series_order, "number N of even series coefficients")->capture_default_str();
  app.add_option("--switch", cfg.s_switch, "series-to-ODE switch point");
  app.add_option("--out", cfg.out, "output directory")->capture_default_str();
  app.add_option("--config", cfg.config, "JSON file with default values for any flag");
  app.add_option("--jobs", cfg.jobs, "worker threads for scans (0 = number of cores)");
  app.add_option("--seed", cfg.seed, "seed for randomized scans")->capture_default_str();
  app.fallthrough();

  auto* classify = app.add_subcommand("classify", "stability class of a 3-form on R^6");
  classify->add_option("coeffs", cfg.coeffs, "20 coefficients in lexicographic order e123, e124, ..., e456")
      ->required();
  classify->add_option("--vol-scale", cfg.vol_scale, "volume form c e123456")->capture_default_str();

  auto* verify = app.add_subcommand("verify-model", "residuals and stability of a homogeneous model");
  verify->add_option("model", cfg.model, "S6, CP3 or S3xS3")->required();
  verify->add_option("--samples", cfg.samples, "interior sample points")->capture_default_str();

  auto* regular = app.add_subcommand("solve-regular", "integrate the h-system from a point of N");
  regular->add_option("--point", cfg.point, "a2,a3,a4,b1,b2,b3,b4")->delimiter(',');
  regular->add_flag("--xo", cfg.xo, "start from the S3xS3 base point x_o");
  regular->add_option("--membership-tol", cfg.membership_tol, "tolerance on |I^k|")->capture_default_str();

  auto* singular = app.add_subcommand("solve-singular", "solutions through the singular orbit S3 (mu = 2)");
  singular->add_option("--c1", cfg.c1, "one or more values of c1 > 0")->delimiter(',');
  singular->add_option("--grid", cfg.grid, "lo,hi,step")->delimiter(',');
  singular->add_flag("--snap-homogeneous", cfg.snap, "replace the grid values nearest 1/9 and 1/4 by them");

  auto* scan = app.add_subcommand("scan", "parameter scans of the singular or regular family");
  scan->add_option("--family", cfg.family, "singular or regular")->capture_default_str();
  scan->add_option("--c1", cfg.c1, "explicit c1 values")->delimiter(',');
  scan->add_option("--grid", cfg.grid, "lo,hi,step (default 0.05,0.5,0.05)")->delimiter(',');
  scan->add_flag("--snap-homogeneous", cfg.snap, "replace the grid values nearest 1/9 and 1/4 by them");
  scan->add_option("--count", cfg.count, "regular family: number of points")->capture_default_str();
  scan->add_option("--scale", cfg.scale, "regular family: perturbation size")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  CLI::App* active = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front();
  try {
    if (!cfg.config.empty()) apply_config(app, active, cfg.config);
    if (active == classify) return cmd_classify(cfg);
    if (active == verify) return cmd_verify_model(cfg);
    if (active == regular) return cmd_solve_regular(cfg);
    if (active == singular) return cmd_solve_singular(cfg);
    if (active == scan) return cmd_scan(cfg);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const CLI::Error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const nk::DomainError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kInput;
}
