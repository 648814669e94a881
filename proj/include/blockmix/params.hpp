#ifndef BLOCKMIX_PARAMS_HPP
#define BLOCKMIX_PARAMS_HPP

#include <cstddef>

namespace blockmix {

// Model and partition parameters shared by every module.
struct Params {
  double epsilon = 0.2;
  double d = 20.0;  // expected degree
  int k = 40;       // colors
  double lambda = 0.0;
  double delta = 0.008;  // percolation slack; default epsilon^3
  int r = 2;             // breakpoint horizon

  // Low/high degree threshold (1 + epsilon/6) d.
  double dhat() const { return (1.0 + epsilon / 6.0) * d; }
  bool low_degree(std::size_t deg) const { return static_cast<double>(deg) <= dhat(); }

  void validate() const;

  // Defaults for a graph on n vertices: r from default_horizon, delta = epsilon^3.
  static Params make(std::size_t n, double epsilon, double d, int k);
};

// The constant alpha solving alpha^alpha = e (about 1.7632).
double alpha_constant();

// ceil((alpha + epsilon) d)
int regime_k(double d, double epsilon);

// ceil(ln n / (ln d)^4), at least 2.
int default_horizon(std::size_t n, double d);

}  // namespace blockmix

#endif  // BLOCKMIX_PARAMS_HPP
