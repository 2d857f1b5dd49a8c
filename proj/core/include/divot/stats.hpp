#pragma once

#include <span>

namespace divot {

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;  // two-sided
  bool degenerate = false;  // both samples have zero variance
};

// Welch's unequal-variance two-sample t-test, Welch-Satterthwaite degrees of freedom.
TTestResult welch_t_test(std::span<const double> a, std::span<const double> b);

double mean(std::span<const double> v);
// n - 1 denominator.
double sample_variance(std::span<const double> v);

}  // namespace divot
