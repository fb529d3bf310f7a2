#include "cavcoord/polynomial.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace cavcoord {

namespace {

// Real roots of q2 x^2 + q1 x + q0, degenerate leading terms included.
// Writes at most two roots to `out`, returns the count.
int real_roots(double q2, double q1, double q0, double* out) {
  if (q2 == 0.0) {
    if (q1 == 0.0) return 0;
    out[0] = -q0 / q1;
    return 1;
  }
  const double disc = q1 * q1 - 4.0 * q2 * q0;
  if (disc < 0.0) return 0;
  if (disc == 0.0) {
    out[0] = -q1 / (2.0 * q2);
    return 1;
  }
  // Avoids cancellation between -q1 and sqrt(disc).
  const double s = std::sqrt(disc);
  const double q = -0.5 * (q1 + std::copysign(s, q1));
  out[0] = q / q2;
  if (q == 0.0) return 1;
  out[1] = q0 / q;
  return 2;
}

}  // namespace

Extremum poly_extremum_on_interval(const Cubic& poly, double t1, double t2) {
  if (t2 <= t1) return {t1, poly(t1)};

  std::array<double, 4> candidates{t1, t2};
  std::size_t n = 2;
  const Cubic d = poly.derivative();
  std::array<double, 2> roots{};
  const int found = real_roots(d.c[2], d.c[1], d.c[0], roots.data());
  for (int i = 0; i < found; ++i)
    if (roots[i] > t1 && roots[i] < t2) candidates[n++] = roots[i];
  std::sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(n));

  Extremum best{candidates.front(), poly(candidates.front())};
  for (std::size_t i = 1; i < n; ++i) {
    const double v = poly(candidates[i]);
    if (v > best.value) best = {candidates[i], v};
  }
  return best;
}

}  // namespace cavcoord
