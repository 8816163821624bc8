#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "core.hpp"
#include "quadrature.hpp"

namespace popov::specfun {

// ---------------------------------------------------------------------------
// Gamma

namespace detail {

// Godfrey's coefficients for g = 607/128, n = 15.
inline constexpr double lanczos_g = 607.0 / 128.0;
inline constexpr std::array<double, 15> lanczos_c = {
    0.99999999999999709182,     57.156235665862923517,      -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,    .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4,  .15808870322491248884e-3,
    -.21026444172410488319e-3,  .21743961811521264320e-3,   -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4,  .36899182659531622704e-5};

// log Gamma(z) for Re z >= 1/2, plus a relative error bound for exp() of it.
inline cplx lanczos_log_gamma(cplx z, double& rel) {
  z -= 1.0;
  cplx x = lanczos_c[0];
  for (std::size_t k = 1; k < lanczos_c.size(); ++k) x += lanczos_c[k] / (z + static_cast<double>(k));
  cplx t = z + lanczos_g + 0.5;
  cplx lt = std::log(t);
  cplx w = 0.5 * std::log(2 * pi) + (z + 0.5) * lt - t + std::log(x);
  rel = eps * (40.0 + 2.0 * std::abs(z + 0.5) * (std::abs(lt) + 1.0) + std::abs(t));
  return w;
}

}  // namespace detail

inline void check_gamma_pole(cplx z) {
  if (z.imag() == 0.0 && is_nonpositive_integer(z.real()))
    fail(ErrorKind::PoleAt, "Gamma has a pole at " + std::to_string(z.real()));
}

// A logarithm of Gamma(z): the real part is log|Gamma(z)|, the imaginary
// part is an argument of Gamma(z) (not necessarily the continuous branch).
inline cplx log_gamma(cplx z, double* rel_out = nullptr) {
  check_gamma_pole(z);
  double rel = 0;
  cplx w;
  if (z.real() >= 0.5) {
    w = detail::lanczos_log_gamma(z, rel);
  } else {
    double r1 = 0;
    cplx s = std::sin(pi * z);
    w = std::log(pi) - std::log(s) - detail::lanczos_log_gamma(1.0 - z, r1);
    cplx cot = std::cos(pi * z) / s;
    rel = r1 + eps * (6.0 + pi * std::abs(z) * std::abs(cot));
  }
  if (rel_out) *rel_out = rel;
  return w;
}

inline SpecialValue gamma(cplx z) {
  double rel = 0;
  cplx w = log_gamma(z, &rel);
  if (w.real() > 709.0) fail(ErrorKind::RangeExceeded, "Gamma overflows");
  cplx v = std::exp(w);
  return {v, std::abs(v) * (rel + 2 * eps * std::abs(w.imag()) + 2 * eps)};
}

inline double gamma_real(double x) { return gamma(cplx(x, 0)).value.real(); }

// ---------------------------------------------------------------------------
// Bessel functions of real order nu >= -1/2 and real argument t >= 0

namespace detail {

struct Hankel {
  double value = 0;
  double error = 0;
  bool ok = false;
};

// Large-argument expansion J = sqrt(2/(pi t)) (P cos w - Q sin w) with the
// remainder bounded by the first omitted term (valid for real nu, t > 0,
// once the truncation index passes nu/2 - 1/4 resp. nu/2 - 3/4).
inline Hankel hankel_j(double nu, double t, double target) {
  const double mu = 4 * nu * nu;
  const int lmin_p = std::max(1, static_cast<int>(std::ceil(nu / 2 - 0.25)));
  const int lmin_q = std::max(1, static_cast<int>(std::ceil(nu / 2 - 0.75)));
  const int lmin = std::max(lmin_p, lmin_q);
  // terms a_k(nu) / t^k with alternating signs folded into P and Q below
  std::vector<double> a{1.0};
  auto term = [&](int k) {
    while (static_cast<int>(a.size()) <= k) {
      int j = static_cast<int>(a.size());
      double f = (mu - (2.0 * j - 1) * (2.0 * j - 1)) / (8.0 * j * t);
      a.push_back(a.back() * f);
    }
    return a[k];
  };
  Hankel best;
  double best_err = INFINITY;
  int best_l = -1;
  for (int l = lmin; l < 200; ++l) {
    double rp = std::abs(term(2 * l));
    double rq = std::abs(term(2 * l + 1));
    double err = rp + rq;
    if (err < best_err) {
      best_err = err;
      best_l = l;
    }
    if (err == 0.0 || err < 1e-3 * target) break;
    // once the terms grow again the expansion has passed its best point
    if (l > lmin + 2 && err > 4 * best_err) break;
  }
  CompensatedSum<double> P, Q;
  for (int j = 0; j < best_l; ++j) {
    double sgn = (j % 2 == 0) ? 1.0 : -1.0;
    P.add(sgn * term(2 * j));
    Q.add(sgn * term(2 * j + 1));
  }
  const double amp = std::sqrt(2.0 / (pi * t));
  // cos(t - phi) expanded so that only t itself reaches the trig functions
  const double phi = (nu / 2 + 0.25) * pi;
  const double ct = std::cos(t), st = std::sin(t);
  const double cw = ct * std::cos(phi) + st * std::sin(phi);
  const double sw = st * std::cos(phi) - ct * std::sin(phi);
  double p = P.value(), q = Q.value();
  best.value = amp * (p * cw - q * sw);
  double rounding = amp * (8 * eps * (std::abs(p) + std::abs(q)) +
                           eps * (P.abs_total() + Q.abs_total()) * 4 * (best_l + 2) +
                           eps * (1.0 + std::abs(phi)) * (std::abs(p) + std::abs(q)));
  best.error = amp * best_err + rounding + 2 * eps * std::abs(best.value);
  best.ok = best.error <= target;
  return best;
}

struct Ascending {
  double value = 0;
  double error = 0;
  double max_term = 0;  // largest series term, in units of the result scale
};

// J (sign = -1) or I (sign = +1) by the ascending series in double-double,
// returning the sum normalized by the leading factor (t/2)^nu / Gamma(nu+1).
inline Ascending ascending_normalized(double nu, double t, int sign) {
  DoubleDouble q = DoubleDouble::two_prod(t / 2, t / 2);
  if (sign < 0) q = -q;
  DoubleDouble u(1.0), s(1.0);
  double abs_total = 1.0, max_term = 1.0;
  double trunc = 0.0;
  int m = 0;
  for (; m < 100000; ++m) {
    DoubleDouble den = DoubleDouble::two_prod(m + 1.0, 1.0) *
                       (DoubleDouble::two_sum(m + 1.0, nu));
    u = u * q / den;
    s += u;
    double au = std::abs(u.hi);
    abs_total += au;
    max_term = std::max(max_term, au);
    double ratio = std::abs(q.hi) / ((m + 2.0) * (m + 2.0 + nu));
    if (m + 2.0 + nu > 0 && ratio < 0.5 && au <= 1e-34 * std::abs(s.hi)) {
      // alternating tail: next term; positive tail: geometric majorant
      trunc = sign < 0 ? au * ratio : au * ratio / (1 - ratio);
      break;
    }
  }
  Ascending r;
  r.value = static_cast<double>(s);
  r.error = trunc + abs_total * dd_eps * (3.0 * m + 8.0) + eps * std::abs(r.value) * 0.5;
  r.max_term = max_term;
  return r;
}

}  // namespace detail

inline constexpr double cancellation_limit = 1e8;

// J_nu(t) for nu >= -1/2, t >= 0.
inline SpecialValue bessel_j(double nu, double t) {
  if (nu < -0.5) fail(ErrorKind::DomainError, "bessel_j needs nu >= -1/2");
  if (t < 0 || !std::isfinite(t)) fail(ErrorKind::DomainError, "bessel_j needs t >= 0");
  if (t == 0.0) {
    if (nu == 0.0) return {1.0, 0.0};
    if (nu > 0.0) return {0.0, 0.0};
    fail(ErrorKind::DomainError, "J_nu(0) is infinite for nu < 0");
  }
  const double amp = std::sqrt(2.0 / (pi * t));
  if (t >= 20.0) {
    auto h = detail::hankel_j(nu, t, 2e-14 * amp);
    if (h.ok) return {h.value, h.error};
  }
  double lead_rel = 0;
  double log_lead = nu * std::log(t / 2) - log_gamma(cplx(nu + 1, 0), &lead_rel).real();
  if (log_lead < -745.0) return {0.0, std::exp(log_lead)};
  double lead = std::exp(log_lead);
  lead_rel += eps * (2.0 + std::abs(log_lead));
  auto a = detail::ascending_normalized(nu, t, -1);
  double value = lead * a.value;
  double err = lead * a.error + std::abs(value) * lead_rel;
  // cancellation measured against the double-precision output
  bool lost = a.max_term * (dd_eps / eps) > cancellation_limit * std::max(std::abs(a.value), 1e-300);
  if (t >= 20.0) {
    // neither route met the target; keep the better certified one
    auto h = detail::hankel_j(nu, t, INFINITY);
    if (lost || h.error < err) {
      if (h.error <= 1e-8 * amp) return {h.value, h.error};
    }
  }
  if (lost) fail(ErrorKind::RangeExceeded, "bessel_j ascending series loses too many digits");
  return {value, err};
}

// e^{-t} I_nu(t) for nu >= -1/2, t >= 0. Positive series, summed with a
// running rescale so that large t neither overflows nor underflows.
inline SpecialValue bessel_i_scaled(double nu, double t) {
  if (nu < -0.5) fail(ErrorKind::DomainError, "bessel_i needs nu >= -1/2");
  if (t < 0 || !std::isfinite(t)) fail(ErrorKind::DomainError, "bessel_i needs t >= 0");
  if (t == 0.0) {
    if (nu == 0.0) return {1.0, 0.0};
    if (nu > 0.0) return {0.0, 0.0};
    fail(ErrorKind::DomainError, "I_nu(0) is infinite for nu < 0");
  }
  double lead_rel = 0;
  double log_lead = nu * std::log(t / 2) - log_gamma(cplx(nu + 1, 0), &lead_rel).real() - t;
  const double q = t * t / 4;
  double u = 1.0, s = 1.0, comp = 0.0, log_shift = 0.0;
  double trunc = 0.0;
  int m = 0;
  for (; m < 1000000; ++m) {
    u *= q / ((m + 1.0) * (m + 1.0 + nu));
    double y = u - comp;  // Kahan; all terms positive
    double tt = s + y;
    comp = (tt - s) - y;
    s = tt;
    if (s > 1e280) {
      s *= 1e-280;
      u *= 1e-280;
      comp *= 1e-280;
      log_shift += 280 * std::log(10.0);
    }
    double ratio = q / ((m + 2.0) * (m + 2.0 + nu));
    if (ratio < 0.5 && u <= 1e-17 * s) {
      trunc = u * ratio / (1 - ratio);
      break;
    }
  }
  double log_total = log_lead + log_shift;
  if (log_total + std::log(s) < -745.0) return {0.0, std::exp(log_total) * (s + trunc)};
  double scale = std::exp(log_total);
  double value = scale * s;
  double rel = lead_rel + eps * (4.0 + std::abs(log_total)) + eps * (3.0 * m + 6.0);
  return {value, scale * trunc + value * rel};
}

inline SpecialValue bessel_i(double nu, double t) {
  if (t > 700.0) fail(ErrorKind::RangeExceeded, "bessel_i overflows; use bessel_i_scaled");
  auto s = bessel_i_scaled(nu, t);
  double e = std::exp(t);
  return {s.value * e, s.abs_error_bound * e + std::abs(s.value * e) * eps * (1 + t)};
}

// e^{t} K_nu(t) for complex order and t > 0, from
//   K_nu(t) = int_0^inf exp(-t cosh u) cosh(nu u) du
// by the trapezoid rule with step halving (the integrand already decays
// doubly exponentially).
inline SpecialValue bessel_k_scaled(cplx nu, double t, const QuadratureControls& ctl = {}) {
  if (!(t > 0) || !std::isfinite(t)) fail(ErrorKind::DomainError, "bessel_k needs t > 0");
  // K is even in nu; fix a representative so that nu and -nu agree bitwise
  if (nu.real() < 0 || (nu.real() == 0 && nu.imag() < 0)) nu = -nu;
  const double re_nu = nu.real();
  auto f = [&](double u) -> cplx {
    double sh = std::sinh(u / 2);
    double g = -2 * t * sh * sh;
    return 0.5 * (std::exp(g + nu * u) + std::exp(g - nu * u));
  };
  // log of the majorant exp(-2 t sinh^2(u/2) + Re(nu) u)
  auto g = [&](double u) {
    double sh = std::sinh(u / 2);
    return -2 * t * sh * sh + re_nu * u;
  };
  const double u_peak = std::asinh(re_nu / t);
  const double g_peak = g(u_peak);
  double U = u_peak + 1.0;
  while (g(U) > g_peak - 60.0) U += 0.5;
  // tail beyond U: g is concave there with slope below -(t sinh U - Re nu)
  double slope = t * std::sinh(U) - re_nu;
  double tail = std::exp(g(U)) / slope;

  double h = 0.5;
  auto sweep = [&](double offset, double step) {
    CompensatedSum<cplx> acc;
    for (int i = 0;; ++i) {
      double u = offset + i * step;
      if (u > U) break;
      acc.add((u == 0.0 ? 0.5 : 1.0) * f(u));
    }
    return acc;
  };
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
    double rounding = 8 * eps * h * mag * (1.0 + std::abs(nu) * U);
    if (level >= 2 && (diff <= ctl.target * std::abs(cur) || diff <= rounding)) {
      return {cur, diff + rounding + tail};
    }
    prev = cur;
  }
  fail(ErrorKind::NoConvergence, "bessel_k quadrature did not converge");
}

inline SpecialValue bessel_k(cplx nu, double t, const QuadratureControls& ctl = {}) {
  auto s = bessel_k_scaled(nu, t, ctl);
  double e = std::exp(-t);
  return {s.value * e, s.abs_error_bound * e + std::abs(s.value * e) * eps * (1 + t)};
}

// ---------------------------------------------------------------------------
// Hypergeometric functions

enum class Hyp2f1Route { Auto, Direct, Pfaff, Euler };

namespace detail {

inline bool is_nonpositive_int(cplx a) {
  return a.imag() == 0.0 && is_nonpositive_integer(a.real());
}

// Gauss series with a geometric majorant for the tail.
inline SpecialValue gauss_series(cplx a, cplx b, cplx c, double z) {
  if (is_nonpositive_int(c)) fail(ErrorKind::PoleAt, "2F1 lower parameter is a nonpositive integer");
  const bool terminating = is_nonpositive_int(a) || is_nonpositive_int(b);
  CompensatedSum<cplx> sum;
  cplx term = 1.0;
  sum.add(term);
  double weighted = 1.0;  // sum of |term_j| * j, for rounding growth
  const double az = std::abs(z);
  for (int j = 0; j < 200000; ++j) {
    term *= (a + double(j)) * (b + double(j)) / ((c + double(j)) * (j + 1.0)) * z;
    sum.add(term);
    weighted += std::abs(term) * (j + 1);
    if (terminating && term == 0.0) return {sum.value(), 6 * eps * weighted + sum.rounding_bound(j)};
    double j0 = j + 1.0;
    if (j0 + c.real() <= 0) continue;
    double ra = std::max(1.0, 1.0 + (std::abs(a) - 1.0) / (j0 + 1.0));
    double rb = std::max(1.0, 1.0 + (std::abs(b) - c.real()) / (j0 + c.real()));
    double rho = az * ra * rb;
    if (rho < 1.0) {
      double tail = std::abs(term) * rho / (1.0 - rho);
      if (tail <= 0.25 * eps * std::abs(sum.value()) || tail == 0.0)
        return {sum.value(), tail + 6 * eps * weighted + sum.rounding_bound(j)};
    }
  }
  fail(ErrorKind::NoConvergence, "2F1 Gauss series did not converge");
}

}  // namespace detail

// 2F1(a, b; c; z) for real z in (-1, 1).
inline SpecialValue hyp2f1(cplx a, cplx b, cplx c, double z, Hyp2f1Route route = Hyp2f1Route::Auto) {
  if (!(z > -1.0 && z < 1.0)) fail(ErrorKind::DomainError, "hyp2f1 needs z in (-1, 1)");
  if (route == Hyp2f1Route::Auto) route = (z <= -0.5) ? Hyp2f1Route::Pfaff : Hyp2f1Route::Direct;
  switch (route) {
    case Hyp2f1Route::Direct:
      return detail::gauss_series(a, b, c, z);
    case Hyp2f1Route::Pfaff: {
      double w = z / (z - 1.0);
      auto inner = detail::gauss_series(a, c - b, c, w);
      double l = std::log1p(-z);
      cplx pre = std::exp(-a * l);
      double pre_rel = eps * (4.0 + 2.0 * std::abs(a) * std::abs(l));
      return {pre * inner.value,
              std::abs(pre) * inner.abs_error_bound + std::abs(pre * inner.value) * pre_rel};
    }
    case Hyp2f1Route::Euler: {
      auto inner = detail::gauss_series(c - a, c - b, c, z);
      double l = std::log1p(-z);
      cplx e = c - a - b;
      cplx pre = std::exp(e * l);
      double pre_rel = eps * (4.0 + 2.0 * std::abs(e) * std::abs(l));
      return {pre * inner.value,
              std::abs(pre) * inner.abs_error_bound + std::abs(pre * inner.value) * pre_rel};
    }
    case Hyp2f1Route::Auto:
      break;
  }
  fail(ErrorKind::DomainError, "unknown 2F1 route");
}

// Kummer 1F1(a; b; z).
inline SpecialValue hyp1f1(cplx a, cplx b, cplx z) {
  if (detail::is_nonpositive_int(b)) fail(ErrorKind::PoleAt, "1F1 lower parameter is a nonpositive integer");
  CompensatedSum<cplx> sum;
  cplx term = 1.0;
  sum.add(term);
  double weighted = 1.0;
  const double az = std::abs(z);
  for (int j = 0; j < 200000; ++j) {
    term *= (a + double(j)) / ((b + double(j)) * (j + 1.0)) * z;
    sum.add(term);
    weighted += std::abs(term) * (j + 1);
    if (term == 0.0 && detail::is_nonpositive_int(a)) return {sum.value(), 5 * eps * weighted};
    double j0 = j + 1.0;
    if (j0 + b.real() <= 0) continue;
    double rab = std::max(1.0, 1.0 + (std::abs(a) - b.real()) / (j0 + b.real()));
    double rho = az * rab / (j0 + 1.0);
    if (rho < 1.0) {
      double tail = std::abs(term) * rho / (1.0 - rho);
      if (tail <= 0.25 * eps * std::abs(sum.value()) || tail == 0.0)
        return {sum.value(), tail + 5 * eps * weighted + sum.rounding_bound(j)};
    }
  }
  fail(ErrorKind::NoConvergence, "1F1 series did not converge");
}

// 0F1(; b; z) = sum z^j / ((b)_j j!). With w^2 = -4z and b = nu + 1 this is
// Gamma(nu+1) (w/2)^{-nu} J_nu(w), an entire function of w.
inline SpecialValue hyp0f1(cplx b, cplx z) {
  if (detail::is_nonpositive_int(b)) fail(ErrorKind::PoleAt, "0F1 parameter is a nonpositive integer");
  CompensatedSum<cplx> sum;
  cplx term = 1.0;
  sum.add(term);
  double weighted = 1.0;
  const double az = std::abs(z);
  for (int j = 0; j < 200000; ++j) {
    term *= z / ((b + double(j)) * (j + 1.0));
    sum.add(term);
    weighted += std::abs(term) * (j + 1);
    double j0 = j + 1.0;
    if (j0 + b.real() <= 0) continue;
    double rho = az / ((j0 + b.real()) * (j0 + 1.0));
    if (rho < 1.0) {
      double tail = std::abs(term) * rho / (1.0 - rho);
      if (tail <= 0.25 * eps * std::abs(sum.value()) || tail == 0.0)
        return {sum.value(), tail + 4 * eps * weighted + sum.rounding_bound(j)};
    }
  }
  fail(ErrorKind::NoConvergence, "0F1 series did not converge");
}

// Humbert Phi_3(b; c; w, u) = sum_{k,m} (b)_k / (c)_{k+m} w^k u^m / (k! m!),
// summed along anti-diagonals k + m = d.
inline SpecialValue humbert_phi3(cplx b, cplx c, cplx w, cplx u) {
  if (detail::is_nonpositive_int(c)) fail(ErrorKind::PoleAt, "Phi3 lower parameter is a nonpositive integer");
  // diag[k] holds the full term (b)_k w^k u^m / (k! m! (c)_{k+m}) with m = d - k,
  // updated in place from one diagonal to the next so nothing overflows
  // before the terms themselves do
  std::vector<cplx> diag{1.0};
  CompensatedSum<cplx> sum;
  sum.add(1.0);
  double weighted = 1.0;
  double mb = 1.0;  // (|b|)_d / d!
  // (|b|)_k / k! <= max(1, (|b|)_d / d!) for k <= d and the u-part sums to at
  // most e Y^d, so diagonal d is below e max(1, mb) Y^d / |(c)_d|
  const double Y = std::max(std::abs(w), std::abs(u));
  const double logY = Y > 0 ? std::log(Y) : -1e300;
  double log_inv_poch = 0;  // -log |(c)_d|
  for (int d = 1; d < 20000; ++d) {
    const cplx cd = c + double(d - 1);
    cplx last = diag.back() * (b + double(d - 1)) * w / (double(d) * cd);
    for (int k = 0; k < d; ++k) diag[k] *= u / (double(d - k) * cd);
    diag.push_back(last);
    CompensatedSum<cplx> row;
    for (const auto& t : diag) row.add(t);
    sum.add(row.value());
    weighted += row.abs_total() * (d + 2);
    mb *= (std::abs(b) + d - 1) / d;
    log_inv_poch -= std::log(std::abs(cd));
    double D = d + 1.0;
    if (D - 1 + c.real() <= 0) continue;
    double rho = Y * std::max(1.0, (std::abs(b) + D) / (D + 1.0)) / (D + c.real());
    if (rho < 1.0) {
      double log_next = 1.0 + std::log(std::max(1.0, mb * (std::abs(b) + d) / D)) + (d + 1) * logY + log_inv_poch -
                        std::log(std::abs(c + double(d)));
      double tail = std::exp(log_next) / (1.0 - rho);
      if (tail <= 0.25 * eps * std::abs(sum.value()) || tail == 0.0)
        return {sum.value(), tail + 4 * eps * weighted + sum.rounding_bound(d)};
    }
  }
  fail(ErrorKind::NoConvergence, "Phi3 series did not converge");
}

}  // namespace popov::specfun
