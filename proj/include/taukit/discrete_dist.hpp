#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace taukit {

inline double poisson_pmf(double lambda, std::int64_t k) {
  if (k < 0) return 0.0;
  if (lambda < 0) throw std::invalid_argument("poisson_pmf: lambda < 0");
  if (lambda == 0) return k == 0 ? 1.0 : 0.0;
  return std::exp(static_cast<double>(k) * std::log(lambda) - lambda -
                  std::lgamma(static_cast<double>(k) + 1.0));
}

inline double binomial_pmf(std::int64_t n, double p, std::int64_t k) {
  if (n < 0 || !(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("binomial_pmf: invalid parameters");
  if (k < 0 || k > n) return 0.0;
  if (p == 0.0) return k == 0 ? 1.0 : 0.0;
  if (p == 1.0) return k == n ? 1.0 : 0.0;
  const double nd = static_cast<double>(n), kd = static_cast<double>(k);
  return std::exp(std::lgamma(nd + 1) - std::lgamma(kd + 1) - std::lgamma(nd - kd + 1) +
                  kd * std::log(p) + (nd - kd) * std::log1p(-p));
}

namespace detail {
inline std::vector<std::vector<double>> pascal_rows(int r) {
  std::vector<std::vector<double>> c(r + 1);
  for (int i = 0; i <= r; ++i) {
    c[i].assign(i + 1, 1.0);
    for (int j = 1; j < i; ++j) c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
  }
  return c;
}
}  // namespace detail

/// E(K^r) for K ~ Poisson(lambda), via the recursion
/// E(K^r) = lambda * E((K+1)^(r-1)) with the inner power expanded binomially.
inline double poisson_moment(double lambda, int r) {
  if (lambda < 0 || r < 0) throw std::invalid_argument("poisson_moment: invalid arguments");
  const auto binom = detail::pascal_rows(r);
  std::vector<double> mom(r + 1, 1.0);
  for (int i = 1; i <= r; ++i) {
    double s = 0;
    for (int t = 0; t < i; ++t) s += binom[i - 1][t] * mom[t];
    mom[i] = lambda * s;
  }
  return mom[r];
}

/// E(K^r) for K ~ Binomial(n, p), via E(K_n^r) = n p E((1 + K_{n-1})^(r-1)).
inline double binomial_moment(std::int64_t n, double p, int r) {
  if (n < 0 || r < 0 || !(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("binomial_moment: invalid arguments");
  const auto binom = detail::pascal_rows(r);
  std::vector<double> prev(r + 1, 0.0), cur(r + 1, 0.0);
  prev[0] = 1.0;  // moments of K_0 = 0
  for (std::int64_t m = 1; m <= n; ++m) {
    cur[0] = 1.0;
    for (int i = 1; i <= r; ++i) {
      double s = 0;
      for (int t = 0; t < i; ++t) s += binom[i - 1][t] * prev[t];
      cur[i] = static_cast<double>(m) * p * s;
    }
    prev = cur;
  }
  return prev[r];
}

/// Smallest c with P(K > c) <= tail for K ~ Poisson(lambda).
inline std::int64_t poisson_tail_cut(double lambda, double tail) {
  if (!(tail > 0)) throw std::invalid_argument("poisson_tail_cut: tail must be > 0");
  if (lambda == 0) return 0;
  if (lambda > 700)
    throw std::domain_error("poisson_tail_cut: lambda too large for enumeration");
  double pmf = std::exp(-lambda);
  double cdf = pmf;
  std::int64_t k = 0;
  while (cdf < 1.0 - tail) {
    ++k;
    pmf *= lambda / static_cast<double>(k);
    cdf += pmf;
    if (k > 10'000'000)
      throw std::domain_error("poisson_tail_cut: failed to reach target mass");
  }
  return k;
}

/// Smallest c with P(K > c) <= tail for K ~ Binomial(n, p).
inline std::int64_t binomial_tail_cut(std::int64_t n, double p, double tail) {
  if (!(tail > 0)) throw std::invalid_argument("binomial_tail_cut: tail must be > 0");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  double pmf = std::exp(static_cast<double>(n) * std::log1p(-p));
  if (pmf == 0.0)
    throw std::domain_error("binomial_tail_cut: start term underflows; n too large");
  const double ratio = p / (1.0 - p);
  double cdf = pmf;
  std::int64_t k = 0;
  while (cdf < 1.0 - tail && k < n) {
    ++k;
    pmf *= ratio * static_cast<double>(n - k + 1) / static_cast<double>(k);
    cdf += pmf;
  }
  return k;
}

}  // namespace taukit
