#include "nk/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "nk/errors.hpp"

namespace nk {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_curve_csv(std::ostream& os, const SolutionCurve& curve) {
  os << kCsvHeader << '\n';
  for (const HState& x : curve.states) {
    const Vec4 I = first_integrals(x);
    os << format_double(x.s);
    for (double v : x.a) os << ',' << format_double(v);
    for (double v : x.b) os << ',' << format_double(v);
    for (double v : I) os << ',' << format_double(v);
    os << '\n';
  }
}

void write_curve_csv(const std::string& path, const SolutionCurve& curve) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open " + path + " for writing");
  write_curve_csv(f, curve);
  if (!f) throw Error("write failed: " + path);
}

}  // namespace nk
