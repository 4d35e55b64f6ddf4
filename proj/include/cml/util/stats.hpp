#pragma once

#include <span>

namespace cml::stats {

double mean(std::span<const double> values);

/// Sample standard deviation (divisor n - 1). Returns 0 for fewer than two values.
double sample_sd(std::span<const double> values);

double normal_cdf(double z);

/// P(|Z| >= |z|) for standard normal Z.
double two_sided_normal_p(double z);

/// Two-sided tail probability of `target` under Normal(mean, sd).
/// A zero sd yields 1 when target equals mean and 0 otherwise.
double normal_tail_p(double target, double mean, double sd);

double sigmoid(double x);
double logit(double p);

}  // namespace cml::stats
