#include "blockmix/params.hpp"

#include <algorithm>
#include <cmath>

#include "blockmix/rng.hpp"

namespace blockmix {

void Params::validate() const {
  if (!(epsilon > 0.0)) throw Error("params: epsilon must be positive");
  if (!(d > 0.0)) throw Error("params: d must be positive");
  if (k < 1) throw Error("params: k must be >= 1");
  if (!(lambda >= 0.0)) throw Error("params: lambda must be >= 0");
  if (!(delta >= 0.0)) throw Error("params: delta must be >= 0");
  if (r < 0) throw Error("params: r must be >= 0");
}

Params Params::make(std::size_t n, double epsilon, double d, int k) {
  Params p;
  p.epsilon = epsilon;
  p.d = d;
  p.k = k;
  p.delta = epsilon * epsilon * epsilon;
  p.r = default_horizon(n, d);
  return p;
}

double alpha_constant() {
  // Newton on f(a) = a ln a - 1.
  double a = 1.76;
  for (int i = 0; i < 50; ++i) {
    const double f = a * std::log(a) - 1.0;
    const double df = std::log(a) + 1.0;
    const double next = a - f / df;
    if (std::abs(next - a) < 1e-16) break;
    a = next;
  }
  return a;
}

int regime_k(double d, double epsilon) {
  return static_cast<int>(std::ceil((alpha_constant() + epsilon) * d));
}

int default_horizon(std::size_t n, double d) {
  if (n < 2 || d <= 1.0) return 2;
  const double ld = std::log(d);
  const double raw = std::log(static_cast<double>(n)) / (ld * ld * ld * ld);
  return std::max(2, static_cast<int>(std::ceil(raw)));
}

}  // namespace blockmix
