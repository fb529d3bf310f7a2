#pragma once

#include <array>

namespace cavcoord {

/// Polynomial of degree at most three, coefficients in ascending order:
/// c[0] + c[1] x + c[2] x^2 + c[3] x^3.
struct Cubic {
  std::array<double, 4> c{};

  constexpr double operator()(double x) const {
    return ((c[3] * x + c[2]) * x + c[1]) * x + c[0];
  }

  constexpr Cubic derivative() const { return {{c[1], 2.0 * c[2], 3.0 * c[3], 0.0}}; }

  /// Re-expands the polynomial about x = shift, i.e. returns q(y) = p(shift + y).
  constexpr Cubic shifted(double shift) const {
    const double h = shift;
    return {{operator()(h), c[1] + h * (2.0 * c[2] + 3.0 * c[3] * h), c[2] + 3.0 * c[3] * h,
             c[3]}};
  }

  constexpr Cubic operator+(const Cubic& o) const {
    return {{c[0] + o.c[0], c[1] + o.c[1], c[2] + o.c[2], c[3] + o.c[3]}};
  }
  constexpr Cubic operator-(const Cubic& o) const {
    return {{c[0] - o.c[0], c[1] - o.c[1], c[2] - o.c[2], c[3] - o.c[3]}};
  }
  constexpr Cubic operator*(double k) const {
    return {{c[0] * k, c[1] * k, c[2] * k, c[3] * k}};
  }
};

struct Extremum {
  double t = 0.0;
  double value = 0.0;
};

/// Exact maximum of `poly` over the closed interval [t1, t2].
///
/// The candidate set is {t1, t2} plus the real roots of the derivative that
/// fall strictly inside the interval. Equal values resolve to the earliest t.
/// A degenerate interval (t1 == t2) evaluates the single point.
Extremum poly_extremum_on_interval(const Cubic& poly, double t1, double t2);

}  // namespace cavcoord
