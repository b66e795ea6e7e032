#pragma once

#include <string>
#include <vector>

#include "bergman/common.hpp"
#include "bergman/weights.hpp"

namespace bergman {

enum class Verdict { member, non_member, inconclusive };
const char* to_string(Verdict v);

// Decides whether a positive trace sampled at consecutive levels stays
// bounded or grows without bound. The trace arrives as logs: the traces of
// interest reach exp(2^40) where the linear scale saturates to inf and
// every comparison degenerates. Growth must be certified by a linear fit
// of the trace, its log, or its log-log against the level index;
// membership asks the final window to have settled. Any finite-depth
// answer is a heuristic; the flags say which rule fired.
struct TraceAnalysis {
  Verdict verdict = Verdict::inconclusive;
  double stabilized = 0.0;       // max over the final half (linear scale)
  std::string transform;        // "", "linear", "log", "loglog"
  LinearFit fit;                // fit that certified growth (if any)
  bool monotone_growth = false; // plain >= 5%-per-level monotone rise
};

struct TraceOptions {
  int window = 8;            // levels that must have settled
  double spread_tol = 0.10;  // max/min - 1 allowed inside the window
  double growth_factor = 1.05;
  double min_r2 = 0.99;
};

TraceAnalysis analyze_log_trace(const std::vector<double>& log_vals,
                                const TraceOptions& opt = {});

struct DhatScan {
  std::vector<double> log_ratios;  // log R_n, R_n = tail(r_n)/tail(r_{n+1})
  TraceAnalysis analysis;
  Verdict verdict = Verdict::inconclusive;
  double constant = 0.0;  // stabilized sup of the ratio trace
};

struct DcheckScan {
  std::vector<double> k_grid;
  std::vector<std::vector<double>> log_ratios;  // per K: log q_n(K)
  Verdict verdict = Verdict::inconclusive;
  double chosen_k = 0.0;  // smallest K certifying membership
  double constant = 0.0;  // certified lower ratio bound at chosen_k
};

struct MomentScan {
  std::vector<double> xs;          // dyadic exponents
  std::vector<double> log_ratios;  // log(omega_x / omega_{2x})
  TraceAnalysis analysis;
  Verdict verdict = Verdict::inconclusive;  // member = bounded trace
};

struct IntegralScan {
  double gamma = 1.0;
  // log of tail(r_n)^g * int_0^{r_n} ds/(tail^g (1-s))
  std::vector<double> log_values;
  TraceAnalysis analysis;
  Verdict verdict = Verdict::inconclusive;  // member = bounded trace
};

struct ClassificationReport {
  WeightSpec spec;
  int depth = 0;
  std::vector<double> tail_lg;  // log tails at r_n = 1 - 2^{-n}, n = 0..depth

  DhatScan dhat_tail;
  MomentScan dhat_moment;
  Verdict dhat = Verdict::inconclusive;  // consolidated

  DcheckScan dcheck_tail;
  std::vector<IntegralScan> dcheck_integral;  // gamma in {1/2, 1, 2}
  Verdict dcheck = Verdict::inconclusive;     // consolidated

  Verdict d = Verdict::inconclusive;  // dhat AND dcheck

  LinearFit power_fit;  // log tail vs log(1-r), last 16 levels
  double alpha = 0.0;   // fitted decay exponent (upper-doubling side)
  double beta = 0.0;    // fitted decay exponent (lower-doubling side)
};

struct ClassifyOptions {
  int depth = 40;
  std::vector<double> k_grid = {2.0, 4.0, 8.0, 16.0};
  double dcheck_margin = 0.05;
  int moment_levels = 20;  // x = 2^0 .. 2^moment_levels
  TraceOptions trace;
};

DhatScan dhat_classify(const Weight& w, const ClassifyOptions& opt = {});
DcheckScan dcheck_classify(const Weight& w, const ClassifyOptions& opt = {});
MomentScan moment_dhat_test(const Weight& w, const ClassifyOptions& opt = {});
IntegralScan dcheck_integral_test(const Weight& w, double gamma,
                                  const ClassifyOptions& opt = {});
ClassificationReport classify_weight(const Weight& w,
                                     const ClassifyOptions& opt = {});

// Trace of omega_x / tail(1 - 1/x) over dyadic x; equivalence holds for
// upper-doubling weights, and the trace is reported rather than judged.
struct MomentTailTrace {
  std::vector<double> xs;
  std::vector<double> ratios;
};
MomentTailTrace moment_tail_equiv_check(const Weight& w,
                                        const ClassifyOptions& opt = {});

enum class Monotone { non_decreasing, non_increasing };

// Product stability: an upper-doubling base times a non-decreasing factor
// stays upper-doubling; a lower-doubling base times a non-increasing factor
// stays lower-doubling. A contradiction between the two classification runs
// signals a tolerance bug, and is reported, not thrown.
struct MonotoneProductCheck {
  ClassificationReport base;
  ClassificationReport product;
  bool dhat_applicable = false;
  bool dhat_holds = true;
  bool dcheck_applicable = false;
  bool dcheck_holds = true;
};
MonotoneProductCheck monotone_product_check(const WeightSpec& base,
                                            const WeightSpec& factor,
                                            Monotone direction,
                                            const ClassifyOptions& opt = {});

// Trace of int_{r_n}^1 omega nu-hat / (tail_omega(r_n) tail_nu(r_n)).
// Lies in (c, 1]: the upper bound is exact because nu-hat decreases.
struct ProductTailTrace {
  std::vector<double> values;  // linear scale; the trace lives in (0, 1]
  double window_min = 0.0;
};
ProductTailTrace product_tail_equiv_check(const Weight& omega,
                                          const Weight& nu,
                                          const ClassifyOptions& opt = {});

}  // namespace bergman
