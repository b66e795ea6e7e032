#pragma once

#include <functional>

#include "bergman/common.hpp"

namespace bergman {

// Integrand supplied as log of a nonnegative function; -inf encodes zero,
// +inf encodes a non-integrable sample (propagates to a divergent status).
using LogFn = std::function<double(double)>;

struct QuadOptions {
  double rel_tol = 1e-10;
  std::size_t max_panels = 4000;
  double peak_grid_hi = 60.0;  // coarse peak search upper end for peaked integrals
};

struct LogIntegral {
  LogReal value = LogReal::zero();
  double rel_err = 0.0;
  EvalStatus status = EvalStatus::ok;
  std::size_t evals = 0;
  double stopped_at = 0.0;  // where marching stopped; rim diagnostics
};

// Adaptive Gauss-Kronrod over [a,b]; initial panels shrink geometrically
// toward both edges so boundary-concentrated mass is not missed.
LogIntegral integrate_interval(const LogFn& logf, double a, double b,
                               const QuadOptions& opt = {});

// \int_{u0}^{inf} with geometrically growing panels. Decay of the panel
// sequence is the convergence certificate; its absence is the divergence
// verdict (never an exception).
LogIntegral integrate_tail_u(const LogFn& logf, double u0,
                             const QuadOptions& opt = {});

// Peak-centered integral over [lo, inf): locates the interior maximum, then
// marches outward in both directions. Detects integrands that never decay.
LogIntegral integrate_peaked(const LogFn& logf, double lo,
                             const QuadOptions& opt = {});

}  // namespace bergman
