#pragma once

namespace zifit {

// ln Gamma(x) for x > 0.
double log_gamma(double x);

// First and second logarithmic derivatives of Gamma, x > 0.
double digamma(double x);
double trigamma(double x);

// ln(e^a - e^b) for a >= b, never forming e^a or e^b.
double log_diff_exp(double log_a, double log_b);

// ln(e^a + e^b).
double log_sum_exp(double log_a, double log_b) noexcept;

// ln(1 - e^x) for x <= 0.
double log1m_exp(double x);

// ln Beta(a, b).
double log_beta(double a, double b);

// Standard normal distribution.
double normal_cdf(double x) noexcept;
double normal_quantile(double p);

}  // namespace zifit
