#pragma once

#include <complex>
#include <functional>
#include <span>

namespace eitflash::quad {

using Integrand = std::function<std::complex<double>(double)>;

struct Options {
  double rel_tol = 1e-8;
  double abs_tol = 1e-9;
  std::size_t max_panels = 500000;
};

struct Outcome {
  std::complex<double> value{0.0, 0.0};
  double error = 0.0;       // estimated absolute error
  std::size_t panels = 0;   // panels in the final partition
  bool converged = false;
};

// 15-point Gauss-Kronrod rule on [a, b]; error from the embedded 7-point
// Gauss estimate.
Outcome gk15(const Integrand& f, double a, double b);

// Globally adaptive bisection over an initial partition given by `seeds`
// (sorted breakpoints; consecutive pairs are the starting panels). Worst
// panel first, until sum of panel errors <= max(abs_tol, rel_tol |value|).
// Throws QuadratureError with the achieved error if the budget runs out.
Outcome adaptive(const Integrand& f, std::span<const double> seeds, const Options& opt);

}  // namespace eitflash::quad
