#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bergman/common.hpp"
#include "bergman/interp.hpp"

namespace bergman {

enum class Family {
  standard,        // (1-r)^a or (1-r^2)^a, a > -1
  log_perturbed,   // (1-r)^p (log(e/(1-r)))^q
  exponential,     // exp(-alpha / (1-r^ell)^beta)
  product,         // pointwise product of factors
  tail_of,         // r -> tail of the base weight, as a density factor
  inv_tail_of,     // r -> 1 / tail of the base weight
  omega_nu,        // nu * nu-hat, tail = nu-hat^2 / 2
  nu_omega,        // the weight whose tail is omega-hat^{1/2}
  boundary_power,  // (1-r)^p with no integrability constraint on p
  tabulated,       // log-density interpolated from a sample grid
};

enum class RadialForm { one_minus_r, one_minus_r2 };

struct WeightSpec {
  Family family = Family::standard;
  RadialForm form = RadialForm::one_minus_r;
  double a = 0.0;                          // standard / boundary_power
  double p = 0.0, q = 0.0;                 // log_perturbed
  double alpha = 1.0, beta = 1.0, ell = 1.0;  // exponential
  double scale = 1.0;
  std::vector<WeightSpec> children;        // product factors / single base
  std::vector<std::pair<double, double>> table;  // tabulated (r, density)

  static WeightSpec standard(double a, RadialForm f = RadialForm::one_minus_r);
  static WeightSpec log_perturbed(double p, double q);
  static WeightSpec exponential(double alpha, double beta, double ell);
  static WeightSpec product(std::vector<WeightSpec> factors);
  static WeightSpec tail_of(WeightSpec base);
  static WeightSpec inv_tail_of(WeightSpec base);
  static WeightSpec boundary_power(double p,
                                   RadialForm f = RadialForm::one_minus_r);
  static WeightSpec tabulated(std::vector<std::pair<double, double>> pts);
};

// Spec constructors for the derived weights.
WeightSpec make_omega_nu(WeightSpec nu);
WeightSpec make_nu_omega(WeightSpec omega);

struct EvalResult {
  LogReal value = LogReal::zero();
  double rel_err = 0.0;
  EvalStatus status = EvalStatus::ok;
  bool ok() const { return status == EvalStatus::ok; }
};

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Immutable evaluation handle compiled from a WeightSpec. All radial
// evaluation happens in u = -log(1-r); 1-r is carried exactly as e^{-u},
// so tails at 1 - 2^{-40} keep full precision. Thread-safe; the tail
// memo is the only mutable state and sits behind a mutex.
class Weight {
 public:
  explicit Weight(WeightSpec spec);

  const WeightSpec& spec() const { return spec_; }

  double log_density_u(double u) const;
  double log_density(double r) const;
  LogReal density(double r) const;

  bool has_closed_tail() const;
  EvalResult try_tail_u(double u) const;
  EvalResult try_tail(double r) const;
  LogReal tail_u(double u) const;  // throws QuadratureError unless ok
  LogReal tail(double r) const;

  bool has_closed_moment() const;
  EvalResult try_moment(double x) const;
  LogReal moment(double x) const;

  // Quadrature paths with any closed form bypassed, for cross-checks.
  EvalResult tail_quadrature_u(double u) const;
  EvalResult moment_quadrature(double x) const;

 private:
  double closed_tail_lg(double u) const;

  WeightSpec spec_;
  std::vector<std::shared_ptr<const Weight>> kids_;
  Pchip table_;                // tabulated: log density vs r
  double table_r_last_ = 0.0;  // last grid radius
  double table_lw_last_ = 0.0; // log density there
  struct Memo;
  std::shared_ptr<Memo> memo_;
};

// mixed tail \int_r^1 omega(s)/nu-hat(s) ds; divergence is a status.
EvalResult mixed_tail(const Weight& omega, const Weight& nu, double r);
EvalResult mixed_tail_u(const Weight& omega, const Weight& nu, double u);
// mixed moment (omega/nu-hat)_x = \int_0^1 s^x omega(s)/nu-hat(s) ds.
EvalResult mixed_moment(const Weight& omega, const Weight& nu, double x);

// Parameter sanity plus the integrability check tail(0) < inf.
void validate_weight(const Weight& w);

WeightSpec parse_weight_json(const std::string& text);
WeightSpec parse_weight_file(const std::string& path);
std::string weight_to_json(const WeightSpec& spec, int indent = -1);
WeightSpec tabulated_from_csv(const std::string& path);

}  // namespace bergman
