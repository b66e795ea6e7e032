#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace bergman {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

// Nonnegative real carried as its natural log; lg == -inf encodes zero.
// Everything tail/moment/trace shaped goes through this type: exponential
// weights push values far outside the double range in both directions.
struct LogReal {
  double lg = kNegInf;

  static LogReal zero() { return LogReal{kNegInf}; }
  static LogReal one() { return LogReal{0.0}; }
  static LogReal from_log(double l) { return LogReal{l}; }
  static LogReal from_value(double v) {
    if (v < 0.0 || std::isnan(v)) throw std::domain_error("LogReal: negative value");
    return LogReal{v == 0.0 ? kNegInf : std::log(v)};
  }

  bool is_zero() const { return lg == kNegInf; }
  bool is_finite() const { return lg < kInf; }
  // Underflows/overflows to 0/inf outside double range; use lg when that matters.
  double value() const { return std::exp(lg); }

  friend LogReal operator*(LogReal a, LogReal b) {
    if (a.is_zero() || b.is_zero()) return zero();
    return LogReal{a.lg + b.lg};
  }
  friend LogReal operator/(LogReal a, LogReal b) {
    if (a.is_zero()) return zero();
    return LogReal{a.lg - b.lg};
  }
  friend LogReal operator+(LogReal a, LogReal b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (b.lg > a.lg) std::swap(a, b);
    return LogReal{a.lg + std::log1p(std::exp(b.lg - a.lg))};
  }
  // a - b for a >= b; clamps small negative residue from rounding to zero.
  friend LogReal sub(LogReal a, LogReal b) {
    if (b.is_zero()) return a;
    double d = b.lg - a.lg;
    if (d >= 0.0) return zero();
    return LogReal{a.lg + std::log1p(-std::exp(d))};
  }
  friend LogReal pow(LogReal a, double p) {
    if (a.is_zero()) return p > 0 ? zero() : LogReal{kInf};
    return LogReal{a.lg * p};
  }
  friend bool operator<(LogReal a, LogReal b) { return a.lg < b.lg; }
  friend bool operator>(LogReal a, LogReal b) { return a.lg > b.lg; }

  // |a/b - 1| without leaving log space for the ratio.
  friend double rel_diff(LogReal a, LogReal b) {
    if (a.is_zero() && b.is_zero()) return 0.0;
    if (a.is_zero() || b.is_zero()) return kInf;
    return std::abs(std::expm1(a.lg - b.lg));
  }
};

// Complex value as mantissa * exp(lg); mantissa kept at O(1) magnitude.
struct ScaledComplex {
  std::complex<double> mant{0.0, 0.0};
  double lg = 0.0;

  LogReal magnitude() const {
    double m = std::abs(mant);
    return m == 0.0 ? LogReal::zero() : LogReal::from_log(lg + std::log(m));
  }
  std::complex<double> value() const { return mant * std::exp(lg); }
  void normalize() {
    double m = std::abs(mant);
    if (m > 0.0 && std::isfinite(m)) {
      mant /= m;
      lg += std::log(m);
    }
  }
};

// Neumaier variant of compensated summation.
class NeumaierSum {
 public:
  void add(double x) {
    double t = s_ + x;
    if (std::abs(s_) >= std::abs(x))
      c_ += (s_ - t) + x;
    else
      c_ += (x - t) + s_;
    s_ = t;
  }
  double value() const { return s_ + c_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

enum class EvalStatus {
  ok,
  divergent,        // integral/series shows no decay within budget
  budget_exhausted, // budget hit before the requested tolerance
  out_of_range,     // query outside the representable/supported domain
};

inline const char* to_string(EvalStatus s) {
  switch (s) {
    case EvalStatus::ok: return "ok";
    case EvalStatus::divergent: return "divergent";
    case EvalStatus::budget_exhausted: return "budget_exhausted";
    case EvalStatus::out_of_range: return "out_of_range";
  }
  return "?";
}

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
};

inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit f;
  f.n = x.size();
  if (x.size() != y.size() || x.size() < 2) return f;
  double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
  mx /= n; my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx; sxy += dx * dy; syy += dy * dy;
  }
  if (sxx == 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

// Deterministic regardless of thread count: slot i always gets item i.
inline void parallel_for(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  unsigned t = std::min<unsigned>(threads, static_cast<unsigned>(n));
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (unsigned w = 0; w < t; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < n; i += t) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

inline unsigned default_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : std::min(hw, 8u);
}

inline std::size_t pow2_at_least(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// u = -log(1-r) boundary variable used by every radial quadrature here.
inline double u_from_r(double r) { return -std::log1p(-r); }
inline double r_from_u(double u) { return -std::expm1(-u); }

// log r as a function of u = -log(1-r), with full relative precision for
// every u. The naive log(1 - e^{-u}) keeps only ~e^u * eps relative accuracy
// (the argument sits within ulp of 1), so beyond z = e^{-u} < 1e-4 the
// series -z(1 + z/2 + z^2/3 + z^3/4) takes over; its truncation error z^4/5
// is below double precision there.
inline double log_r_u(double u) {
  double z = std::exp(-u);
  if (z < 1e-4)
    return -z * (1.0 + z * (0.5 + z * (1.0 / 3.0 + 0.25 * z)));
  return std::log(-std::expm1(-u));
}

}  // namespace bergman
