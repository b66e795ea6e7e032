#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "bergman/classify.hpp"

using namespace bergman;

TEST_CASE("log-trace analyzer") {
  TraceOptions opt;

  // Constant trace: bounded.
  std::vector<double> c(20, std::log(2.0));
  auto a = analyze_log_trace(c, opt);
  CHECK(a.verdict == Verdict::member);
  CHECK(a.stabilized == doctest::Approx(2.0));

  // Saturating rise 2 - 2^{-n}: bounded even though monotone increasing.
  std::vector<double> sat;
  for (int n = 0; n < 24; ++n) sat.push_back(std::log(2.0 - std::pow(2.0, -n)));
  CHECK(analyze_log_trace(sat, opt).verdict == Verdict::member);

  // Trace exp(c 2^n): a raw line fits poorly; the loglog rung certifies it.
  std::vector<double> dexp;
  for (int n = 0; n < 20; ++n) dexp.push_back(0.3 * std::pow(2.0, n));
  auto g = analyze_log_trace(dexp, opt);
  CHECK(g.verdict == Verdict::non_member);

  // Geometric growth 1.2^n.
  std::vector<double> geo;
  for (int n = 0; n < 20; ++n) geo.push_back(n * std::log(1.2));
  CHECK(analyze_log_trace(geo, opt).verdict == Verdict::non_member);

  // Decreasing to a limit: bounded.
  std::vector<double> dec;
  for (int n = 1; n < 30; ++n)
    dec.push_back(std::log1p(1.0 / (1.0 + n * std::log(2.0))));
  CHECK(analyze_log_trace(dec, opt).verdict == Verdict::member);

  // Too short to judge.
  std::vector<double> tiny(4, 0.0);
  CHECK(analyze_log_trace(tiny, opt).verdict == Verdict::inconclusive);
}

TEST_CASE("upper doubling by dyadic tail ratios") {
  ClassifyOptions opt;

  Weight flat(WeightSpec::standard(0.0));
  DhatScan s = dhat_classify(flat, opt);
  CHECK(s.verdict == Verdict::member);
  CHECK(s.constant == doctest::Approx(2.0).epsilon(1e-10));
  for (double lr : s.log_ratios)
    CHECK(lr == doctest::Approx(std::log(2.0)).epsilon(1e-10));

  // R_n = (1 + (n+1) log 2)/(1 + n log 2) -> 1.
  Weight logw(WeightSpec::log_perturbed(-1.0, -2.0));
  DhatScan sl = dhat_classify(logw, opt);
  CHECK(sl.verdict == Verdict::member);
  int n = 5;
  double want = (1.0 + (n + 1) * std::log(2.0)) / (1.0 + n * std::log(2.0));
  CHECK(std::exp(sl.log_ratios[n - 1]) == doctest::Approx(want).epsilon(1e-10));

  Weight expw(WeightSpec::exponential(1.0, 1.0, 1.0));
  DhatScan se = dhat_classify(expw, opt);
  CHECK(se.verdict == Verdict::non_member);
}

TEST_CASE("lower doubling by K-shifted tail ratios") {
  ClassifyOptions opt;

  Weight flat(WeightSpec::standard(0.0));
  DcheckScan s = dcheck_classify(flat, opt);
  CHECK(s.verdict == Verdict::member);
  CHECK(s.chosen_k == 2.0);
  CHECK(s.constant == doctest::Approx(2.0).epsilon(1e-9));

  Weight logw(WeightSpec::log_perturbed(-1.0, -2.0));
  CHECK(dcheck_classify(logw, opt).verdict == Verdict::non_member);

  Weight expw(WeightSpec::exponential(1.0, 1.0, 1.0));
  CHECK(dcheck_classify(expw, opt).verdict == Verdict::member);

  // K-monotonicity: the shifted ratio grows with K at every level.
  for (std::size_t k = 1; k < s.k_grid.size(); ++k)
    for (std::size_t i = 0; i < s.log_ratios[k].size(); ++i)
      CHECK(s.log_ratios[k][i] >= s.log_ratios[k - 1][i] - 1e-12);
}

TEST_CASE("moment ratio characterization agrees with tail ratios") {
  ClassifyOptions opt;

  Weight flat(WeightSpec::standard(0.0));
  MomentScan m = moment_dhat_test(flat, opt);
  CHECK(m.verdict == Verdict::member);
  // omega_x/omega_{2x} = (2x+1)/(x+1) -> 2
  CHECK(std::exp(m.log_ratios.back()) == doctest::Approx(2.0).epsilon(1e-5));

  Weight lin(WeightSpec::standard(1.0));
  MomentScan m1 = moment_dhat_test(lin, opt);
  CHECK(m1.verdict == Verdict::member);
  CHECK(std::exp(m1.log_ratios.back()) == doctest::Approx(4.0).epsilon(1e-4));

  Weight expw(WeightSpec::exponential(1.0, 1.0, 1.0));
  CHECK(moment_dhat_test(expw, opt).verdict == Verdict::non_member);
}

TEST_CASE("lower-doubling integral characterization") {
  ClassifyOptions opt;
  Weight flat(WeightSpec::standard(0.0));
  for (double g : {0.5, 1.0, 2.0}) {
    IntegralScan s = dcheck_integral_test(flat, g, opt);
    CHECK(s.verdict == Verdict::member);
  }
  // Exact limit at gamma = 1: trace -> 1 - 2^{-n}.
  IntegralScan s1 = dcheck_integral_test(flat, 1.0, opt);
  CHECK(std::exp(s1.log_values.back()) == doctest::Approx(1.0).epsilon(1e-6));

  // The log weight fails: the integral grows like the level index.
  IntegralScan sl = dcheck_integral_test(
      Weight(WeightSpec::log_perturbed(-1.0, -2.0)), 1.0, opt);
  CHECK(sl.verdict == Verdict::non_member);
  CHECK(std::exp(sl.log_values[39] - sl.log_values[19]) > 1.8);
}

TEST_CASE("full classification and class algebra") {
  ClassifyOptions opt;

  ClassificationReport flat = classify_weight(Weight(WeightSpec::standard(0.0)), opt);
  CHECK(flat.dhat == Verdict::member);
  CHECK(flat.dcheck == Verdict::member);
  CHECK(flat.d == Verdict::member);
  CHECK(flat.alpha == doctest::Approx(1.0).epsilon(1e-9));

  ClassificationReport quad =
      classify_weight(Weight(WeightSpec::standard(3.0)), opt);
  CHECK(quad.d == Verdict::member);
  CHECK(quad.alpha == doctest::Approx(4.0).epsilon(1e-8));

  // Upper doubling without lower doubling.
  ClassificationReport logr =
      classify_weight(Weight(WeightSpec::log_perturbed(-1.0, -2.0)), opt);
  CHECK(logr.dhat == Verdict::member);
  CHECK(logr.dcheck == Verdict::non_member);
  CHECK(logr.d == Verdict::non_member);

  // Lower doubling without upper doubling.
  ClassificationReport expr =
      classify_weight(Weight(WeightSpec::exponential(1.0, 1.0, 1.0)), opt);
  CHECK(expr.dhat == Verdict::non_member);
  CHECK(expr.dcheck == Verdict::member);
  CHECK(expr.d == Verdict::non_member);

  // 1 - r^2 form is doubling-equivalent to 1 - r.
  ClassificationReport r2 = classify_weight(
      Weight(WeightSpec::standard(2.0, RadialForm::one_minus_r2)), opt);
  CHECK(r2.d == Verdict::member);
  CHECK(r2.alpha == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("moment-tail equivalence trace") {
  ClassifyOptions opt;
  Weight flat(WeightSpec::standard(0.0));
  MomentTailTrace t = moment_tail_equiv_check(flat, opt);
  // omega_x / tail(1-1/x) = x/(x+1) -> 1, and = 1/2 at x = 1.
  CHECK(t.ratios.front() == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(t.ratios.back() ==
        doctest::Approx(t.xs.back() / (t.xs.back() + 1.0)).epsilon(1e-8));
  // Any weight: the trace stays above the crude bound (1-1/x)^x.
  Weight expw(WeightSpec::exponential(1.0, 1.0, 2.0));
  MomentTailTrace te = moment_tail_equiv_check(expw, opt);
  for (std::size_t i = 1; i < te.xs.size(); ++i) {
    double x = te.xs[i];
    CHECK(te.ratios[i] > std::pow(1.0 - 1.0 / x, x) - 1e-12);
  }
}

TEST_CASE("monotone factors preserve the doubling classes") {
  ClassifyOptions opt;

  // (1-r) times the non-decreasing 1/tail(Standard(0)) is constant.
  MonotoneProductCheck c1 = monotone_product_check(
      WeightSpec::standard(1.0),
      WeightSpec::inv_tail_of(WeightSpec::standard(0.0)),
      Monotone::non_decreasing, opt);
  CHECK(c1.dhat_applicable);
  CHECK(c1.dhat_holds);
  CHECK(c1.product.dhat == Verdict::member);

  // Standard(0) times the non-increasing tail 1-r is Standard(1).
  MonotoneProductCheck c2 = monotone_product_check(
      WeightSpec::standard(0.0), WeightSpec::tail_of(WeightSpec::standard(0.0)),
      Monotone::non_increasing, opt);
  CHECK(c2.dcheck_applicable);
  CHECK(c2.dcheck_holds);
  CHECK(c2.product.d == Verdict::member);
  CHECK(c2.product.alpha == doctest::Approx(2.0).epsilon(1e-6));

  // The log weight times the decreasing factor (1-r): the upper-doubling
  // implication is not triggered by this direction, yet direct
  // classification still finds the product upper doubling.
  MonotoneProductCheck c3 = monotone_product_check(
      WeightSpec::log_perturbed(-1.0, -2.0),
      WeightSpec::boundary_power(1.0), Monotone::non_increasing, opt);
  CHECK_FALSE(c3.dhat_applicable);
  CHECK(c3.product.dhat == Verdict::member);
}

TEST_CASE("product-with-tail comparability trace") {
  ClassifyOptions opt;
  Weight flat(WeightSpec::standard(0.0));
  ProductTailTrace t = product_tail_equiv_check(flat, flat, opt);
  for (double v : t.values) {
    CHECK(v == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(v <= 1.0 + 1e-9);
  }

  Weight lin(WeightSpec::standard(1.0));
  ProductTailTrace t2 = product_tail_equiv_check(lin, flat, opt);
  for (double v : t2.values) {
    CHECK(v == doctest::Approx(2.0 / 3.0).epsilon(1e-8));
    CHECK(v <= 1.0 + 1e-9);
  }
  CHECK(t2.window_min > 0.5);
}
