#include "eitflash/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "eitflash/errors.hpp"

namespace eitflash::quad {

namespace {

// QUADPACK dqk15 constants. Gauss nodes are the odd-index Kronrod nodes
// plus the center.
constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  std::complex<double> value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel evaluate(const Integrand& f, double a, double b) {
  const double hc = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  const std::complex<double> fc = f(c);
  std::complex<double> resk = wgk[7] * fc;
  std::complex<double> resg = wg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = hc * xgk[j];
    const std::complex<double> sum = f(c - dx) + f(c + dx);
    resk += wgk[j] * sum;
    if (j % 2 == 1) resg += wg[(j - 1) / 2] * sum;
  }
  Panel p;
  p.a = a;
  p.b = b;
  p.value = resk * hc;
  p.error = std::abs((resk - resg) * hc);
  if (!std::isfinite(p.value.real()) || !std::isfinite(p.value.imag()) ||
      !std::isfinite(p.error))
    throw NumericalError("non-finite integrand in quadrature panel");
  return p;
}

}  // namespace

Outcome gk15(const Integrand& f, double a, double b) {
  const Panel p = evaluate(f, a, b);
  return {p.value, p.error, 1, true};
}

Outcome adaptive(const Integrand& f, std::span<const double> seeds, const Options& opt) {
  if (seeds.size() < 2) throw ValidationError("adaptive quadrature needs >= 2 breakpoints");
  std::priority_queue<Panel> queue;
  std::complex<double> total{0.0, 0.0};
  double total_err = 0.0;
  std::size_t panels = 0;
  auto push = [&](const Panel& p) {
    total += p.value;
    total_err += p.error;
    queue.push(p);
    ++panels;
  };
  for (std::size_t i = 0; i + 1 < seeds.size(); ++i) {
    if (!(seeds[i] < seeds[i + 1]))
      throw ValidationError("quadrature breakpoints must be strictly increasing");
    push(evaluate(f, seeds[i], seeds[i + 1]));
  }
  auto tolerance = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
  while (total_err > tolerance()) {
    if (panels >= opt.max_panels)
      throw QuadratureError("adaptive quadrature: panel budget exhausted", total_err);
    Panel worst = queue.top();
    queue.pop();
    total -= worst.value;
    total_err -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b)
      throw QuadratureError("adaptive quadrature: panel width underflow", total_err);
    push(evaluate(f, worst.a, mid));
    push(evaluate(f, mid, worst.b));
    --panels;  // replaced one panel with two
  }
  return {total, total_err, panels, true};
}

}  // namespace eitflash::quad
