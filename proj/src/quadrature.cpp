#include "bergman/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace bergman {
namespace {

// 15-point Kronrod extension of 7-point Gauss (QUADPACK constants).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  LogReal val;
  double abs_err_lg;  // log of the absolute K-G discrepancy
  bool infinite = false;
};

struct GkEval {
  LogReal val;
  double abs_err_lg;
  bool infinite = false;
  std::size_t evals = 0;
};

GkEval gk15(const LogFn& logf, double a, double b) {
  GkEval out;
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::array<double, 15> lf;
  double m = kNegInf;
  int idx = 0;
  for (int i = 0; i < 8; ++i) {
    if (i < 7) {
      lf[idx] = logf(c - h * kXgk[i]);
      m = std::max(m, lf[idx]);
      ++idx;
      lf[idx] = logf(c + h * kXgk[i]);
      m = std::max(m, lf[idx]);
      ++idx;
    } else {
      lf[idx] = logf(c);
      m = std::max(m, lf[idx]);
      ++idx;
    }
  }
  out.evals = 15;
  if (m == kNegInf) {
    out.val = LogReal::zero();
    out.abs_err_lg = kNegInf;
    return out;
  }
  if (m == kInf || std::isnan(m)) {
    out.infinite = true;
    return out;
  }
  double sk = 0.0, sg = 0.0;
  idx = 0;
  for (int i = 0; i < 8; ++i) {
    if (i < 7) {
      double fa = std::exp(lf[idx] - m);
      ++idx;
      double fb = std::exp(lf[idx] - m);
      ++idx;
      sk += kWgk[i] * (fa + fb);
      if (i % 2 == 1) sg += kWg[i / 2] * (fa + fb);
    } else {
      double fc = std::exp(lf[idx] - m);
      sk += kWgk[i] * fc;
      sg += kWg[3] * fc;
    }
  }
  out.val = LogReal::from_log(m + std::log(h) + std::log(sk));
  double d = std::abs(sk - sg);
  out.abs_err_lg = d == 0.0 ? kNegInf : m + std::log(h) + std::log(d);
  return out;
}

double edge_decay_rate(const LogFn& logf, double x, double step, double dir) {
  // Positive when the integrand falls moving into the interval.
  double f0 = logf(x + dir * 1e-3 * step);
  double f1 = logf(x + dir * step);
  if (!std::isfinite(f0) || !std::isfinite(f1)) return 0.0;
  return (f0 - f1) / (step * (1.0 - 1e-3));
}

LogReal total_of(const std::vector<Panel>& panels) {
  LogReal t = LogReal::zero();
  for (const auto& p : panels) t = t + p.val;
  return t;
}

double total_err_lg(const std::vector<Panel>& panels) {
  LogReal e = LogReal::zero();
  for (const auto& p : panels)
    if (p.abs_err_lg != kNegInf) e = e + LogReal::from_log(p.abs_err_lg);
  return e.lg;
}

}  // namespace

LogIntegral integrate_interval(const LogFn& logf, double a, double b,
                               const QuadOptions& opt) {
  LogIntegral out;
  if (!(b > a)) return out;
  const double len = b - a;

  // Geometric pre-partition toward both edges using local decay rates.
  double la = edge_decay_rate(logf, a, std::min(1e-4 * len, 1e-4), +1.0);
  double lb = edge_decay_rate(logf, b, std::min(1e-4 * len, 1e-4), -1.0);
  double wa = std::clamp(la > 0 ? 3.0 / la : len, 1e-13 * len, 0.25 * len);
  double wb = std::clamp(lb > 0 ? 3.0 / lb : len, 1e-13 * len, 0.25 * len);
  std::vector<double> cuts{a};
  double x = a, w = wa;
  while (x + w < 0.5 * (a + b)) {
    x += w;
    cuts.push_back(x);
    w *= 2.0;
  }
  std::vector<double> rcuts{b};
  x = b;
  w = wb;
  while (x - w > 0.5 * (a + b)) {
    x -= w;
    rcuts.push_back(x);
    w *= 2.0;
  }
  for (auto it = rcuts.rbegin(); it != rcuts.rend(); ++it) cuts.push_back(*it);

  std::vector<Panel> panels;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto g = gk15(logf, cuts[i], cuts[i + 1]);
    out.evals += g.evals;
    if (g.infinite) {
      out.status = EvalStatus::divergent;
      out.value = LogReal::from_log(kInf);
      return out;
    }
    panels.push_back({cuts[i], cuts[i + 1], g.val, g.abs_err_lg});
  }

  while (panels.size() < opt.max_panels) {
    LogReal tot = total_of(panels);
    double err = total_err_lg(panels);
    if (tot.is_zero()) break;
    if (err == kNegInf || err <= tot.lg + std::log(opt.rel_tol)) break;
    std::size_t worst = 0;
    for (std::size_t i = 1; i < panels.size(); ++i)
      if (panels[i].abs_err_lg > panels[worst].abs_err_lg) worst = i;
    Panel p = panels[worst];
    // A panel a few ulp wide cannot be refined further; the residual error
    // is representation noise of the integrand (logf values whose ulp
    // exceeds their variation across the panel), reported via rel_err.
    if (p.b - p.a <= 32.0 * std::numeric_limits<double>::epsilon() *
                         std::max(std::abs(p.a), std::abs(p.b)))
      break;
    double mid = 0.5 * (p.a + p.b);
    auto g1 = gk15(logf, p.a, mid);
    auto g2 = gk15(logf, mid, p.b);
    out.evals += g1.evals + g2.evals;
    if (g1.infinite || g2.infinite) {
      out.status = EvalStatus::divergent;
      out.value = LogReal::from_log(kInf);
      return out;
    }
    panels[worst] = {p.a, mid, g1.val, g1.abs_err_lg};
    panels.push_back({mid, p.b, g2.val, g2.abs_err_lg});
  }

  out.value = total_of(panels);
  double err = total_err_lg(panels);
  out.rel_err = (out.value.is_zero() || err == kNegInf)
                    ? 0.0
                    : std::exp(err - out.value.lg);
  if (out.rel_err > opt.rel_tol && panels.size() >= opt.max_panels)
    out.status = EvalStatus::budget_exhausted;
  out.stopped_at = b;
  return out;
}

LogIntegral integrate_tail_u(const LogFn& logf, double u0,
                             const QuadOptions& opt) {
  LogIntegral out;
  double la = edge_decay_rate(logf, u0, 1e-4, +1.0);
  double w = std::clamp(la > 0 ? 3.0 / la : 1.0, 1e-300, 1.0);
  // An edge layer narrower than an ulp of u0 cannot be resolved in u;
  // start at the resolvable width instead of marching through zero panels.
  w = std::max(w, 4.0 * std::numeric_limits<double>::epsilon() * std::abs(u0));

  LogReal total = LogReal::zero();
  LogReal err = LogReal::zero();
  double prev_lg = kNegInf;
  int calm = 0;        // consecutive negligible panels
  int flat = 0;        // consecutive non-decaying panels
  double x = u0;
  const int kMaxSteps = 90;
  double last_ratio = 0.0;
  for (int k = 0; k < kMaxSteps; ++k) {
    QuadOptions sub = opt;
    sub.max_panels = 64;
    sub.rel_tol = opt.rel_tol * 0.25;
    LogIntegral p = integrate_interval(logf, x, x + w, sub);
    out.evals += p.evals;
    if (p.status == EvalStatus::divergent) {
      out.status = EvalStatus::divergent;
      out.stopped_at = x;
      return out;
    }
    total = total + p.value;
    err = err + LogReal::from_log(p.value.lg + std::log(std::max(p.rel_err, 1e-16)));
    if (!p.value.is_zero() && !total.is_zero()) {
      double ratio = prev_lg == kNegInf ? 0.0 : std::exp(p.value.lg - prev_lg);
      last_ratio = ratio;
      if (k >= 6 && ratio >= 0.98)
        ++flat;
      else
        flat = 0;
      if (flat >= 3) {
        out.status = EvalStatus::divergent;
        out.value = total;
        out.stopped_at = x + w;
        return out;
      }
      if (p.value.lg < total.lg + std::log(opt.rel_tol * 0.125))
        ++calm;
      else
        calm = 0;
      prev_lg = p.value.lg;
    } else if (!total.is_zero()) {
      ++calm;
    }
    x += w;
    w *= 2.0;
    if (calm >= 2) {
      // Geometric remainder bound folded into the error estimate.
      if (prev_lg != kNegInf && last_ratio < 1.0) {
        double rho = std::min(last_ratio, 0.9);
        err = err + LogReal::from_log(prev_lg + std::log(rho / (1.0 - rho) + 1.0));
      }
      out.value = total;
      out.rel_err = total.is_zero() ? 0.0 : std::exp(err.lg - total.lg);
      out.stopped_at = x;
      return out;
    }
  }
  out.value = total;
  out.status = total.is_zero() ? EvalStatus::ok : EvalStatus::budget_exhausted;
  out.rel_err = total.is_zero() ? 0.0 : std::exp(err.lg - total.lg);
  out.stopped_at = x;
  return out;
}

LogIntegral integrate_peaked(const LogFn& logf, double lo,
                             const QuadOptions& opt) {
  LogIntegral out;
  double hi = opt.peak_grid_hi;
  double best_u = lo, best_f = kNegInf;
  for (int attempt = 0; attempt < 8; ++attempt) {
    const int n = 400;
    double l0 = std::log(std::max(lo, 1e-9)), l1 = std::log(hi);
    best_u = lo;
    best_f = kNegInf;
    for (int i = 0; i <= n; ++i) {
      double u = std::exp(l0 + (l1 - l0) * i / n);
      double f = logf(u);
      ++out.evals;
      if (f > best_f) {
        best_f = f;
        best_u = u;
      }
    }
    if (best_f == kInf) {
      out.status = EvalStatus::divergent;
      out.value = LogReal::from_log(kInf);
      return out;
    }
    if (best_u < hi / 1.05) break;
    // Peak sits at the scan horizon. A concave log-integrand (slope still
    // shrinking) will turn over eventually, so extend the horizon; a linear
    // or convex rise never does.
    double s_hi = edge_decay_rate(logf, hi, 1e-3 * hi, -1.0);
    double s_mid = edge_decay_rate(logf, 0.5 * hi, 5e-4 * hi, -1.0);
    if (s_hi > 0.0 && s_hi >= s_mid * (1.0 - 1e-9)) {
      out.status = EvalStatus::divergent;
      out.value = LogReal::from_log(kInf);
      out.stopped_at = hi;
      return out;
    }
    hi *= 4.0;
  }
  // Golden-section refinement around the coarse peak.
  double a = std::max(lo, best_u / 1.5), b = std::min(hi, best_u * 1.5 + 1e-12);
  const double gr = 0.6180339887498949;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = logf(x1), f2 = logf(x2);
  out.evals += 2;
  for (int i = 0; i < 80 && (b - a) > 1e-12 * std::max(1.0, b); ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = logf(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = logf(x1);
    }
    ++out.evals;
  }
  double peak = 0.5 * (a + b);

  LogIntegral right = integrate_tail_u(logf, peak, opt);
  out.evals += right.evals;
  if (right.status == EvalStatus::divergent) {
    out.status = EvalStatus::divergent;
    out.value = LogReal::from_log(kInf);
    return out;
  }
  LogIntegral left;
  if (peak > lo) {
    left = integrate_interval(logf, lo, peak, opt);
    out.evals += left.evals;
    if (left.status == EvalStatus::divergent) {
      out.status = EvalStatus::divergent;
      out.value = LogReal::from_log(kInf);
      return out;
    }
  }
  out.value = left.value + right.value;
  double abs_err = 0.0;
  if (!left.value.is_zero()) abs_err += left.rel_err * std::exp(left.value.lg - out.value.lg);
  if (!right.value.is_zero()) abs_err += right.rel_err * std::exp(right.value.lg - out.value.lg);
  out.rel_err = abs_err;
  if (left.status == EvalStatus::budget_exhausted ||
      right.status == EvalStatus::budget_exhausted)
    out.status = EvalStatus::budget_exhausted;
  out.stopped_at = right.stopped_at;
  return out;
}

}  // namespace bergman
