#ifndef BLOCKMIX_STATS_HPP
#define BLOCKMIX_STATS_HPP

#include <cstdint>
#include <utility>
#include <vector>

namespace blockmix {

// Welford accumulator.
class RunningStats {
 public:
  void add(double x);
  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;  // unbiased
  double std_error() const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

double median(std::vector<double> v);

// Wilson score interval for a binomial proportion at normal quantile z.
std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials,
                                          double z = 1.959963984540054);

struct ChiSquareResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};

// Goodness of fit of observed counts against expected probabilities.
ChiSquareResult chi_square(const std::vector<std::uint64_t>& observed,
                           const std::vector<double>& expected_prob);

// Upper tail of the standard normal quantile: z with Pr[Z > z] = tail.
double normal_quantile_upper(double tail);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double intercept_se = 0.0;
  std::size_t points = 0;
};

// Weighted least squares y = a + b x with weights w (inverse variances).
// Standard errors are the model-based ones scaled by the residual variance.
LinearFit weighted_linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& w);
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace blockmix

#endif  // BLOCKMIX_STATS_HPP
