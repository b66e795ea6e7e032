#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace bergman {

// Natural cubic spline on a uniform grid x_i = x0 + i*h.
class UniformCubicSpline {
 public:
  UniformCubicSpline() = default;
  UniformCubicSpline(double x0, double h, std::vector<double> y)
      : x0_(x0), h_(h), y_(std::move(y)) {
    const std::size_t n = y_.size();
    assert(n >= 3 && h_ > 0);
    // Second derivatives from the tridiagonal natural-spline system,
    // solved by the Thomas algorithm; uniform spacing collapses the bands.
    m_.assign(n, 0.0);
    std::vector<double> c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i)
      d[i] = 6.0 * (y_[i + 1] - 2.0 * y_[i] + y_[i - 1]) / (h_ * h_);
    double prev_c = 0.0, prev_d = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      double denom = 4.0 - prev_c;
      c[i] = 1.0 / denom;
      d[i] = (d[i] - prev_d) / denom;
      prev_c = c[i];
      prev_d = d[i];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      m_[i] = d[i] - c[i] * m_[i + 1];
      if (i == 1) break;
    }
  }

  std::size_t size() const { return y_.size(); }
  double x_front() const { return x0_; }
  double x_back() const { return x0_ + h_ * (y_.size() - 1); }

  // Linear continuation outside the table keeps evaluation total.
  double operator()(double x) const {
    const std::size_t n = y_.size();
    double s = (x - x0_) / h_;
    if (s <= 0.0) return y_[0] + deriv_at_node(0) * (x - x0_);
    if (s >= double(n - 1))
      return y_[n - 1] + deriv_at_node(n - 1) * (x - x_back());
    std::size_t i = std::min<std::size_t>(std::size_t(s), n - 2);
    double t = s - double(i);
    double a = y_[i], b = y_[i + 1];
    double ma = m_[i], mb = m_[i + 1];
    return a + t * (b - a) +
           (h_ * h_ / 6.0) *
               (t * (t - 1.0)) * ((2.0 - t) * ma + (1.0 + t) * mb);
  }

 private:
  double deriv_at_node(std::size_t i) const {
    const std::size_t n = y_.size();
    if (i == 0) return (y_[1] - y_[0]) / h_ - h_ * m_[1] / 6.0;
    return (y_[n - 1] - y_[n - 2]) / h_ + h_ * m_[n - 2] / 6.0;
  }
  double x0_ = 0.0, h_ = 1.0;
  std::vector<double> y_;
  std::vector<double> m_;
};

// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes).
// Preserves monotone runs of the data, so a positive monotone table
// never interpolates to a negative or oscillating value.
class Pchip {
 public:
  Pchip() = default;
  Pchip(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    assert(n >= 2 && y_.size() == n);
    d_.assign(n, 0.0);
    if (n == 2) {
      d_[0] = d_[1] = (y_[1] - y_[0]) / (x_[1] - x_[0]);
      return;
    }
    std::vector<double> h(n - 1), del(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      del[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (del[i - 1] * del[i] <= 0.0) {
        d_[i] = 0.0;
      } else {
        double w1 = 2.0 * h[i] + h[i - 1];
        double w2 = h[i] + 2.0 * h[i - 1];
        d_[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
      }
    }
    d_[0] = edge_slope(h[0], h[1], del[0], del[1]);
    d_[n - 1] = edge_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
  }

  double x_front() const { return x_.front(); }
  double x_back() const { return x_.back(); }

  // Clamped to the end values outside the table.
  double operator()(double x) const {
    if (x <= x_.front()) return y_.front();
    if (x >= x_.back()) return y_.back();
    std::size_t lo = 0, hi = x_.size() - 1;
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      (x_[mid] <= x ? lo : hi) = mid;
    }
    double h = x_[lo + 1] - x_[lo];
    double t = (x - x_[lo]) / h;
    double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    double h10 = t * (1 - t) * (1 - t);
    double h01 = t * t * (3 - 2 * t);
    double h11 = t * t * (t - 1);
    return h00 * y_[lo] + h * h10 * d_[lo] + h01 * y_[lo + 1] +
           h * h11 * d_[lo + 1];
  }

 private:
  static double edge_slope(double h0, double h1, double del0, double del1) {
    double d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if (d * del0 <= 0.0) return 0.0;
    if (del0 * del1 < 0.0 && std::abs(d) > 3.0 * std::abs(del0))
      return 3.0 * del0;
    return d;
  }
  std::vector<double> x_, y_;
  std::vector<double> d_;
};

}  // namespace bergman
