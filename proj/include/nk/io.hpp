#pragma once

// CSV output of h-curves: one row per node with columns
//   s,h1,h2,h3,h4,h1p,h2p,h3p,h4p,I1,I2,I3,I4
// in %.17g so that doubles round-trip.

#include <iosfwd>
#include <string>

#include "nk/nk_ode.hpp"

namespace nk {

inline constexpr const char* kCsvHeader = "s,h1,h2,h3,h4,h1p,h2p,h3p,h4p,I1,I2,I3,I4";

void write_curve_csv(std::ostream& os, const SolutionCurve& curve);
// Throws Error when the file cannot be written.
void write_curve_csv(const std::string& path, const SolutionCurve& curve);

// "%.17g"
std::string format_double(double x);

}  // namespace nk
