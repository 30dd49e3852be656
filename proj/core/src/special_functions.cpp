#include "zifit/special_functions.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "zifit/error.hpp"

namespace zifit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEulerGamma = 0.57721566490153286061;

// (-1)^k (zeta(k) - 1) / k for k = 2..31. With them
//   ln Gamma(2 + t) = (1 - gamma) t + sum_k c_k t^k,  |t| <= 1/2,
// converges like 4^-k, and ln Gamma(1 + t) follows by subtracting log1p(t).
constexpr std::array<double, 30> kShiftedZeta = {
    0.32246703342411321824,    -0.067352301053198095133,
    0.020580808427784547879,   -0.0073855510286739852663,
    0.0028905103307415232858,  -0.0011927539117032609771,
    0.00050966952474304242234, -0.00022315475845357937976,
    0.000099457512781808533715, -0.0000449262367381331417,
    0.000020507212775670691553, -9.439488275268395904e-6,
    4.3748667899074878042e-6,  -2.0392157538013662368e-6,
    9.5514121304074198329e-7,  -4.4924691987645660433e-7,
    2.1207184805554665869e-7,  -1.0043224823968099609e-7,
    4.7698101693639805658e-8,  -2.271109460894316491e-8,
    1.0838659214896954091e-8,  -5.1834750419700466551e-9,
    2.4836745438024783172e-9,  -1.1921401405860912074e-9,
    5.7313672416788620133e-10, -2.7595228851242331452e-10,
    1.3304764374244489481e-10, -6.4229645638381000221e-11,
    3.1044247747322272762e-11, -1.5021384080754142171e-11,
};

double log_gamma_two_plus(double t) {
  double acc = 0.0;
  for (int k = static_cast<int>(kShiftedZeta.size()) - 1; k >= 0; --k) {
    acc = (acc + kShiftedZeta[k]) * t;
  }
  return t * ((1.0 - kEulerGamma) + acc);
}

double stirling_log_gamma(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Bernoulli terms B_2k / (2k (2k-1) x^(2k-1)), k = 1..8.
  const double series =
      inv * (1.0 / 12.0 +
             inv2 * (-1.0 / 360.0 +
                     inv2 * (1.0 / 1260.0 +
                             inv2 * (-1.0 / 1680.0 +
                                     inv2 * (1.0 / 1188.0 +
                                             inv2 * (-691.0 / 360360.0 +
                                                     inv2 * (1.0 / 156.0 +
                                                             inv2 * (-3617.0 / 122400.0))))))));
  return (x - 0.5) * std::log(x) - x + 0.91893853320467274178 + series;
}

void require_positive(double x, const char* what) {
  if (!(x > 0.0)) {
    fail(ErrorKind::domain, std::string(what) + " requires a positive argument, got " +
                                std::to_string(x));
  }
}

}  // namespace

double log_gamma(double x) {
  require_positive(x, "log_gamma");
  if (std::isinf(x)) return kInf;
  if (x >= 10.0) return stirling_log_gamma(x);
  if (x < 0.5) {
    // Gamma(x) = Gamma(x + 1) / x, and x + 1 lands in (1, 1.5).
    return log_gamma_two_plus(x) - std::log1p(x) - std::log(x);
  }
  if (x < 1.5) {
    const double t = x - 1.0;
    return log_gamma_two_plus(t) - std::log1p(t);
  }
  if (x <= 2.5) return log_gamma_two_plus(x - 2.0);
  // Walk down into [1.5, 2.5]; all factors exceed 1 so nothing cancels.
  double product = 1.0;
  while (x > 2.5) {
    x -= 1.0;
    product *= x;
  }
  return log_gamma_two_plus(x - 2.0) + std::log(product);
}

double digamma(double x) {
  require_positive(x, "digamma");
  double shift = 0.0;
  while (x < 10.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double inv2 = 1.0 / (x * x);
  const double series =
      inv2 * (1.0 / 12.0 -
              inv2 * (1.0 / 120.0 -
                      inv2 * (1.0 / 252.0 -
                              inv2 * (1.0 / 240.0 -
                                      inv2 * (1.0 / 132.0 -
                                              inv2 * (691.0 / 32760.0 - inv2 * (1.0 / 12.0)))))));
  return shift + std::log(x) - 0.5 / x - series;
}

double trigamma(double x) {
  require_positive(x, "trigamma");
  double shift = 0.0;
  while (x < 10.0) {
    shift += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      inv * inv2 *
      (1.0 / 6.0 -
       inv2 * (1.0 / 30.0 -
               inv2 * (1.0 / 42.0 -
                       inv2 * (1.0 / 30.0 -
                               inv2 * (5.0 / 66.0 - inv2 * (691.0 / 2730.0 - inv2 * (7.0 / 6.0)))))));
  return shift + inv + 0.5 * inv2 + series;
}

double log1m_exp(double x) {
  if (x > 0.0) fail(ErrorKind::domain, "log1m_exp requires x <= 0");
  if (x == 0.0) return -kInf;
  if (x > -std::numbers::ln2) return std::log(-std::expm1(x));
  return std::log1p(-std::exp(x));
}

double log_diff_exp(double log_a, double log_b) {
  if (std::isnan(log_a) || std::isnan(log_b)) {
    fail(ErrorKind::domain, "log_diff_exp received NaN");
  }
  if (log_a < log_b) {
    fail(ErrorKind::domain, "log_diff_exp requires log_a >= log_b");
  }
  if (log_b == -kInf) return log_a;
  if (log_a == log_b) return -kInf;
  return log_a + log1m_exp(log_b - log_a);
}

double log_sum_exp(double log_a, double log_b) noexcept {
  if (log_a < log_b) std::swap(log_a, log_b);
  if (log_b == -kInf) return log_a;
  return log_a + std::log1p(std::exp(log_b - log_a));
}

double log_beta(double a, double b) {
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double normal_cdf(double x) noexcept {
  return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
}

// Wichura's AS241 (PPND16), about 1e-16 relative accuracy.
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -kInf;
    if (p == 1.0) return kInf;
    fail(ErrorKind::domain, "normal_quantile requires p in [0, 1]");
  }
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
              67265.770927008700853) * r + 45921.953931549871457) * r +
            13731.693765509461125) * r + 1971.5909503065514427) * r +
          133.14166789178437745) * r + 3.387132872796366608);
    const double den =
        (((((((5226.495278852545925 * r + 28729.085735721942674) * r +
              39307.89580009271061) * r + 21213.794301586595867) * r +
            5394.1960214247511077) * r + 687.1870074920579083) * r +
          42.313330701600911252) * r + 1.0);
    return q * num / den;
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
              0.24178072517745061177) * r + 1.27045825245236838258) * r +
            3.64784832476320460504) * r + 5.7694972214606914055) * r +
          4.6303378461565452959) * r + 1.42343711074968357734);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
              0.0151986665636164571966) * r + 0.14810397642748007459) * r +
            0.68976733498510000455) * r + 1.6763848301838038494) * r +
          2.05319162663775882187) * r + 1.0);
    value = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              0.0012426609473880784386) * r + 0.026532189526576123093) * r +
            0.29656057182850489123) * r + 1.7848265399172913358) * r +
          5.4637849111641143699) * r + 6.6579046435011037772);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
              1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
            0.0148753612908506148525) * r + 0.13692988092273580531) * r +
          0.59983220655588793769) * r + 1.0);
    value = num / den;
  }
  return q < 0.0 ? -value : value;
}

std::string_view error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::insufficient_data: return "insufficient_data";
    case ErrorKind::boundary: return "boundary";
    case ErrorKind::singularity: return "singularity";
    case ErrorKind::starvation: return "starvation";
    case ErrorKind::no_equivalent: return "no_equivalent";
    case ErrorKind::initialization: return "initialization";
    case ErrorKind::input: return "input";
    case ErrorKind::numerical: return "numerical";
  }
  return "unknown";
}

}  // namespace zifit
