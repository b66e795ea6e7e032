#include "bergman/classify.hpp"

#include <algorithm>
#include <cmath>

#include "bergman/quadrature.hpp"

namespace bergman {
namespace {

constexpr double kLog2 = 0.6931471805599453;

std::vector<double> dyadic_tail_lgs(const Weight& w, int depth) {
  std::vector<double> lg(depth + 1);
  for (int n = 0; n <= depth; ++n) lg[n] = w.tail_u(n * kLog2).lg;
  return lg;
}

// Consolidate two verdicts for the same property obtained through different
// characterizations. Decisive answers must agree; an inconclusive one defers.
Verdict consolidate(Verdict a, Verdict b) {
  if (a == Verdict::inconclusive) return b;
  if (b == Verdict::inconclusive) return a;
  return a == b ? a : Verdict::inconclusive;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::member: return "member";
    case Verdict::non_member: return "non-member";
    default: return "inconclusive";
  }
}

TraceAnalysis analyze_log_trace(const std::vector<double>& lg,
                                const TraceOptions& opt) {
  TraceAnalysis out;
  const int n = int(lg.size());
  if (n < opt.window + 2) return out;
  const int w0 = n - opt.window;
  const double lgf = std::log(opt.growth_factor);

  // Growth rule 1: a monotone rise of at least growth_factor per level on
  // average across the window.
  bool monotone = true;
  for (int i = w0 + 1; i < n; ++i)
    if (!(lg[i] >= lg[i - 1])) monotone = false;
  if (monotone && (lg[n - 1] - lg[w0]) / double(opt.window - 1) >= lgf) {
    out.verdict = Verdict::non_member;
    out.monotone_growth = true;
    out.transform = "linear";
  }

  // Growth rule 2: one rung of the ladder {trace, log trace, loglog trace}
  // is linear in the level index with positive slope. Needed because a
  // trace like exp(c 2^n) fits a raw line poorly (R^2 ~ 0.7) yet is exactly
  // linear after two logs. The rise guard keeps saturating traces
  // (2 - 2^{-n}, monotone but bounded) out of the growth verdict.
  if (out.verdict == Verdict::inconclusive) {
    const int fit_len = std::min(n, 16);
    const int f0 = n - fit_len;
    bool rose = lg[n - 1] - lg[f0] >= 0.5 * double(fit_len) * lgf;
    const char* names[3] = {"linear", "log", "loglog"};
    for (int t = 0; t < 3 && rose; ++t) {
      std::vector<double> x, y;
      bool valid = true;
      for (int i = f0; i < n; ++i) {
        double v;
        if (t == 0) {
          if (lg[i] > 700.0) { valid = false; break; }  // inf on the raw scale
          v = std::exp(lg[i]);
        } else if (t == 1) {
          v = lg[i];
        } else {
          if (!(lg[i] > 0.0)) { valid = false; break; }
          v = std::log(lg[i]);
        }
        x.push_back(double(i));
        y.push_back(v);
      }
      if (!valid) continue;
      LinearFit f = fit_line(x, y);
      if (f.slope > 0.0 && f.r2 > opt.min_r2) {
        out.verdict = Verdict::non_member;
        out.transform = names[t];
        out.fit = f;
        break;
      }
    }
  }

  if (out.verdict == Verdict::inconclusive) {
    double lmin = lg[w0], lmax = lg[w0];
    bool nonincreasing = true;
    for (int i = w0; i < n; ++i) {
      lmin = std::min(lmin, lg[i]);
      lmax = std::max(lmax, lg[i]);
      if (i > w0 && lg[i] > lg[i - 1] + 1e-12) nonincreasing = false;
    }
    if (std::expm1(lmax - lmin) <= opt.spread_tol || nonincreasing)
      out.verdict = Verdict::member;
  }

  double sup = lg[n / 2];
  for (int i = n / 2; i < n; ++i) sup = std::max(sup, lg[i]);
  out.stabilized = std::exp(sup);
  return out;
}

DhatScan dhat_classify(const Weight& w, const ClassifyOptions& opt) {
  DhatScan scan;
  std::vector<double> lg = dyadic_tail_lgs(w, opt.depth);
  for (int n = 1; n + 1 <= opt.depth; ++n)
    scan.log_ratios.push_back(lg[n] - lg[n + 1]);
  scan.analysis = analyze_log_trace(scan.log_ratios, opt.trace);
  scan.verdict = scan.analysis.verdict;
  scan.constant = scan.analysis.stabilized;
  return scan;
}

DcheckScan dcheck_classify(const Weight& w, const ClassifyOptions& opt) {
  DcheckScan scan;
  scan.k_grid = opt.k_grid;
  const int window = opt.trace.window;
  const double lmargin = std::log1p(opt.dcheck_margin);
  bool any_member = false, all_flat = true;
  for (double K : opt.k_grid) {
    std::vector<double> q;
    for (int n = 1; n <= opt.depth; ++n) {
      double u = n * kLog2;
      // 1 - (1-r_n)/K corresponds to u + log K exactly.
      q.push_back(w.tail_u(u).lg - w.tail_u(u + std::log(K)).lg);
    }
    scan.log_ratios.push_back(q);
    double wmin = q[q.size() - window];
    double wmax = wmin;
    for (std::size_t i = q.size() - window; i < q.size(); ++i) {
      wmin = std::min(wmin, q[i]);
      wmax = std::max(wmax, q[i]);
    }
    if (!any_member && wmin > lmargin) {
      any_member = true;
      scan.chosen_k = K;
      scan.constant = std::exp(wmin);
    }
    if (wmax > lmargin) all_flat = false;
  }
  if (any_member)
    scan.verdict = Verdict::member;
  else if (all_flat)
    scan.verdict = Verdict::non_member;
  else
    scan.verdict = Verdict::inconclusive;
  return scan;
}

MomentScan moment_dhat_test(const Weight& w, const ClassifyOptions& opt) {
  MomentScan scan;
  for (int k = 0; k <= opt.moment_levels; ++k) {
    double x = std::pow(2.0, k);
    scan.xs.push_back(x);
    scan.log_ratios.push_back(w.moment(x).lg - w.moment(2.0 * x).lg);
  }
  scan.analysis = analyze_log_trace(scan.log_ratios, opt.trace);
  scan.verdict = scan.analysis.verdict;
  return scan;
}

IntegralScan dcheck_integral_test(const Weight& w, double gamma,
                                  const ClassifyOptions& opt) {
  IntegralScan scan;
  scan.gamma = gamma;
  // Cumulative dyadic sweep of int_0^{r_n} tail^{-g}/(1-s) ds, which in the
  // u variable is int_0^{u_n} tail(u)^{-g} du.
  auto logf = [&](double u) { return -gamma * w.tail_u(u).lg; };
  LogReal cum = LogReal::zero();
  for (int n = 1; n <= opt.depth; ++n) {
    LogIntegral piece = integrate_interval(logf, (n - 1) * kLog2, n * kLog2);
    cum = cum + piece.value;
    scan.log_values.push_back(cum.lg + gamma * w.tail_u(n * kLog2).lg);
  }
  scan.analysis = analyze_log_trace(scan.log_values, opt.trace);
  scan.verdict = scan.analysis.verdict;
  return scan;
}

ClassificationReport classify_weight(const Weight& w,
                                     const ClassifyOptions& opt) {
  ClassificationReport rep;
  rep.spec = w.spec();
  rep.depth = opt.depth;
  rep.tail_lg = dyadic_tail_lgs(w, opt.depth);

  rep.dhat_tail = dhat_classify(w, opt);
  rep.dhat_moment = moment_dhat_test(w, opt);
  rep.dhat = consolidate(rep.dhat_tail.verdict, rep.dhat_moment.verdict);

  rep.dcheck_tail = dcheck_classify(w, opt);
  Verdict integral = Verdict::inconclusive;
  for (double g : {0.5, 1.0, 2.0}) {
    IntegralScan s = dcheck_integral_test(w, g, opt);
    rep.dcheck_integral.push_back(s);
    integral = consolidate(integral, s.verdict);
  }
  rep.dcheck = consolidate(rep.dcheck_tail.verdict, integral);

  if (rep.dhat == Verdict::non_member || rep.dcheck == Verdict::non_member)
    rep.d = Verdict::non_member;
  else if (rep.dhat == Verdict::member && rep.dcheck == Verdict::member)
    rep.d = Verdict::member;
  else
    rep.d = Verdict::inconclusive;

  // Decay exponent: slope of log tail against log(1-r) over the last 16
  // levels; both doubling lemmas read their exponent off this power law.
  const int fit_len = std::min(opt.depth, 16);
  std::vector<double> x, y;
  for (int n = opt.depth - fit_len; n <= opt.depth; ++n) {
    x.push_back(-double(n) * kLog2);
    y.push_back(rep.tail_lg[n]);
  }
  rep.power_fit = fit_line(x, y);
  rep.alpha = rep.beta = rep.power_fit.slope;
  return rep;
}

MomentTailTrace moment_tail_equiv_check(const Weight& w,
                                        const ClassifyOptions& opt) {
  MomentTailTrace t;
  for (int k = 0; k <= opt.moment_levels; ++k) {
    double x = std::pow(2.0, k);
    t.xs.push_back(x);
    // 1 - 1/x corresponds to u = log x exactly.
    t.ratios.push_back(std::exp(w.moment(x).lg - w.tail_u(std::log(x)).lg));
  }
  return t;
}

MonotoneProductCheck monotone_product_check(const WeightSpec& base,
                                            const WeightSpec& factor,
                                            Monotone direction,
                                            const ClassifyOptions& opt) {
  MonotoneProductCheck chk;
  Weight wb(base);
  Weight wp(WeightSpec::product({base, factor}));
  chk.base = classify_weight(wb, opt);
  chk.product = classify_weight(wp, opt);
  if (direction == Monotone::non_decreasing &&
      chk.base.dhat == Verdict::member) {
    chk.dhat_applicable = true;
    chk.dhat_holds = chk.product.dhat != Verdict::non_member;
  }
  if (direction == Monotone::non_increasing &&
      chk.base.dcheck == Verdict::member) {
    chk.dcheck_applicable = true;
    chk.dcheck_holds = chk.product.dcheck != Verdict::non_member;
  }
  return chk;
}

ProductTailTrace product_tail_equiv_check(const Weight& omega,
                                          const Weight& nu,
                                          const ClassifyOptions& opt) {
  ProductTailTrace t;
  Weight prod(
      WeightSpec::product({omega.spec(), WeightSpec::tail_of(nu.spec())}));
  for (int n = 1; n <= opt.depth; ++n) {
    double u = n * kLog2;
    LogReal num = prod.tail_u(u);
    t.values.push_back(
        std::exp(num.lg - omega.tail_u(u).lg - nu.tail_u(u).lg));
  }
  double m = t.values[t.values.size() - opt.trace.window];
  for (std::size_t i = t.values.size() - opt.trace.window;
       i < t.values.size(); ++i)
    m = std::min(m, t.values[i]);
  t.window_min = m;
  return t;
}

}  // namespace bergman
