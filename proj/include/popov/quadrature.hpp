#pragma once

#include <cmath>
#include <cstddef>
#include <algorithm>
#include <string>

#include "core.hpp"

namespace popov::specfun {

struct QuadratureControls {
  int max_level = 10;     // number of step halvings allowed
  double target = 1e-13;  // relative target for |I_h - I_{h/2}|
};

struct QuadratureResult {
  cplx value{};
  double error_estimate = 0.0;
  int level = 0;
  std::size_t evaluations = 0;
};

namespace detail {

// Trapezoid rule on the whole real line in a transformed variable tau, with
// step halving. `sample(tau)` returns the transformed integrand (Jacobian
// included). Each direction is cut once a run of samples falls below
// `cut` times the running magnitude.
template <class Sample>
QuadratureResult trapezoid_halving(Sample&& sample, double h0, double tau_max,
                                   const QuadratureControls& ctl, const char* what) {
  QuadratureResult out;
  constexpr double cut = 1e-20;
  constexpr int quiet_run = 4;

  auto sweep = [&](double offset, double step) {
    CompensatedSum<cplx> acc;
    std::size_t n = 0;
    for (int dir : {+1, -1}) {
      int quiet = 0;
      for (double tau = offset * dir; std::abs(tau) <= tau_max; tau += dir * step) {
        if (dir < 0 && tau == 0.0) continue;
        cplx v = sample(tau);
        ++n;
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) break;
        acc.add(v);
        if (std::abs(v) <= cut * acc.abs_total()) {
          if (++quiet >= quiet_run) break;
        } else {
          quiet = 0;
        }
      }
    }
    out.evaluations += n;
    return acc;
  };

  double h = h0;
  auto first = sweep(0.0, h);
  cplx raw = first.value();
  double mag = first.abs_total();
  cplx prev = h * raw;
  for (int level = 1; level <= ctl.max_level; ++level) {
    auto odd = sweep(h / 2, h);
    raw += odd.value();
    mag += odd.abs_total();
    h /= 2;
    cplx cur = h * raw;
    double diff = std::abs(cur - prev);
    double rounding = 8 * eps * h * mag;
    if (diff <= ctl.target * std::abs(cur) || diff <= rounding) {
      out.value = cur;
      out.error_estimate = diff + rounding;
      out.level = level;
      return out;
    }
    prev = cur;
  }
  fail(ErrorKind::NoConvergence, std::string(what) + " did not reach the quadrature target");
}

}  // namespace detail

// Integral over (0, inf) of f(x) for integrands decaying at infinity and
// integrable at 0. Uses x = scale * exp(pi/2 sinh tau).
template <class F>
QuadratureResult integrate_half_line(F&& f, double scale, const QuadratureControls& ctl = {}) {
  auto sample = [&](double tau) -> cplx {
    double e = 0.5 * pi * std::sinh(tau);
    if (e < -700.0 || e > 700.0) return 0.0;
    double x = scale * std::exp(e);
    if (x == 0.0 || !std::isfinite(x)) return 0.0;
    cplx v = f(x);
    return v * (x * 0.5 * pi * std::cosh(tau));
  };
  return detail::trapezoid_halving(sample, 0.5, 6.0, ctl, "half-line quadrature");
}

// Integral over [a, b] with endpoint singularities allowed (tanh-sinh).
// f receives (x, x - a, b - x) so that factors like (1-x)^p stay accurate.
template <class F>
QuadratureResult integrate_interval(F&& f, double a, double b, const QuadratureControls& ctl = {}) {
  double half = 0.5 * (b - a);
  auto sample = [&](double tau) -> cplx {
    double u = 0.5 * pi * std::sinh(tau);
    double ch = std::cosh(u);
    // distances to both endpoints, computed without cancellation
    double d, dl;
    if (u > 0) {
      d = half * 2.0 / (1.0 + std::exp(2 * u));
      dl = 2 * half - d;
    } else {
      dl = half * 2.0 / (1.0 + std::exp(-2 * u));
      d = 2 * half - dl;
    }
    if (d <= 0.0 || dl <= 0.0) return 0.0;
    double x = a + dl;
    cplx v = f(x, dl, d);
    double w = half * 0.5 * pi * std::cosh(tau) / (ch * ch);
    return v * w;
  };
  // tau = 6 keeps the endpoint distance above the double underflow threshold
  return detail::trapezoid_halving(sample, 0.5, 6.0, ctl, "interval quadrature");
}

// Plain trapezoid rule on [-T, T] with step halving; for analytic integrands
// along vertical lines.
template <class F>
QuadratureResult integrate_symmetric_trapezoid(F&& f, double T, double h0,
                                               const QuadratureControls& ctl = {}) {
  QuadratureResult out;
  int n = std::max(2, static_cast<int>(std::ceil(2 * T / h0)));
  double h = 2 * T / n;
  // endpoints on the first pass carry weight 1/2; later passes add midpoints
  auto nodes = [&](int count, double step, bool midpoints) {
    CompensatedSum<cplx> acc;
    for (int i = 0; i <= count; ++i) {
      if (midpoints && i == count) break;
      double t = -T + (midpoints ? (i + 0.5) * step : i * step);
      double w = (!midpoints && (i == 0 || i == count)) ? 0.5 : 1.0;
      acc.add(w * f(t));
      ++out.evaluations;
    }
    return acc;
  };
  auto s = nodes(n, h, false);
  cplx raw = s.value();
  double mag = s.abs_total();
  cplx prev = h * raw;
  for (int level = 1; level <= ctl.max_level; ++level) {
    auto odd = nodes(n, h, true);
    raw += odd.value();
    mag += odd.abs_total();
    h /= 2;
    n *= 2;
    cplx cur = h * raw;
    double diff = std::abs(cur - prev);
    double rounding = 8 * eps * h * mag;
    if (diff <= ctl.target * std::abs(cur) || diff <= rounding) {
      out.value = cur;
      out.error_estimate = diff + rounding;
      out.level = level;
      return out;
    }
    prev = cur;
  }
  fail(ErrorKind::NoConvergence, "line quadrature did not reach the target");
}

}  // namespace popov::specfun
