#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace taukit {

/// Truncated Taylor polynomial sum_i c[i] tau^i, used to evaluate exact
/// tau-derivatives of count pmfs at tau = 0 without finite differencing.
class TruncatedSeries {
 public:
  explicit TruncatedSeries(int order) : c_(static_cast<std::size_t>(order) + 1, 0.0) {}
  static TruncatedSeries constant(int order, double v) {
    TruncatedSeries s(order);
    s.c_[0] = v;
    return s;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  double operator[](int i) const { return c_.at(i); }
  double& operator[](int i) { return c_.at(i); }

  TruncatedSeries mul(const TruncatedSeries& o) const {
    TruncatedSeries r(order());
    for (int i = 0; i <= order(); ++i) {
      if (c_[i] == 0.0) continue;
      for (int j = 0; i + j <= order(); ++j) r.c_[i + j] += c_[i] * o.c_[j];
    }
    return r;
  }

  TruncatedSeries& add_scaled(const TruncatedSeries& o, double a) {
    for (int i = 0; i <= order(); ++i) c_[i] += a * o.c_[i];
    return *this;
  }

  /// Composition sum_j coeff[j] * inner^j; inner must have zero constant term.
  static TruncatedSeries compose(const std::vector<double>& outer_coeffs,
                                 const TruncatedSeries& inner) {
    if (inner[0] != 0.0)
      throw std::invalid_argument("TruncatedSeries::compose: inner constant term must vanish");
    const int L = inner.order();
    TruncatedSeries result(L);
    TruncatedSeries power = TruncatedSeries::constant(L, 1.0);
    for (std::size_t j = 0; j < outer_coeffs.size() && static_cast<int>(j) <= L; ++j) {
      if (outer_coeffs[j] != 0.0) result.add_scaled(power, outer_coeffs[j]);
      power = power.mul(inner);
    }
    return result;
  }

 private:
  std::vector<double> c_;
};

}  // namespace taukit
