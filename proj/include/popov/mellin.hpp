#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "identities.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"

namespace popov::mellin {

using identities::EvaluationReport;

namespace detail {

inline SpecialValue times(const SpecialValue& a, const SpecialValue& b) { return identities::detail::times(a, b); }

inline void require_rates(double alpha, double beta) {
  if (!(alpha > beta && beta > 0 && std::isfinite(alpha)))
    fail(ErrorKind::InvalidSpec, "needs alpha > beta > 0");
}

inline EvaluationReport report(const std::string& id, const ValueWithBound& lhs, const ValueWithBound& rhs,
                               double tol) {
  return identities::make_report(id, identities::Params{}, lhs, rhs, tol);
}

// int_T^inf t^p e^{-c t} dt
inline double power_exp_tail(double p, double c, double T) {
  double lead = std::exp(p * std::log(T) - c * T);
  if (p <= 0) return lead / c;
  if (c * T > p) return lead * T / (c * T - p);
  return INFINITY;
}

}  // namespace detail

// int_0^inf x^{s-1} e^{-alpha x} J_v(beta x) dx with v = k/4 - 1/2:
//   (beta/(2 alpha))^v alpha^{-s} Gamma(s+v)/Gamma(v+1) 2F1((s+v)/2, (s+v+1)/2; v+1; -beta^2/alpha^2)
inline SpecialValue forward_closed_form(cplx s, double alpha, double beta, int k) {
  const double nu = k / 4.0 - 0.5;
  auto g = specfun::gamma(s + nu);
  auto f = specfun::hyp2f1((s + nu) / 2.0, (s + nu + 1.0) / 2.0, nu + 1, -(beta * beta) / (alpha * alpha));
  auto gf = detail::times(g, f);
  cplx pre = std::exp(nu * std::log(beta / (2 * alpha)) - s * std::log(alpha) - std::lgamma(nu + 1));
  cplx v = pre * gf.value;
  return {v, std::abs(pre) * gf.abs_error_bound + std::abs(v) * eps * (8 + 2 * std::abs(s) * std::abs(std::log(alpha)))};
}

inline EvaluationReport mellin_forward_check(cplx s, double alpha, double beta, int k, double tol) {
  detail::require_rates(alpha, beta);
  if (k < 1) fail(ErrorKind::InvalidSpec, "k must be positive");
  const double nu = k / 4.0 - 0.5;
  if (!(s.real() + nu > 0)) fail(ErrorKind::InvalidSpec, "needs Re s > 1/2 - k/4");
  auto integrand = [&](double x) -> cplx {
    if (alpha * x > 740) return 0.0;
    auto j = specfun::bessel_j(nu, beta * x);
    return std::exp((s - 1.0) * std::log(x) - alpha * x) * j.value;
  };
  specfun::QuadratureControls ctl;
  ctl.target = 1e-13;
  ctl.max_level = 12;
  auto q = specfun::integrate_half_line(integrand, 1 / alpha, ctl);
  auto c = forward_closed_form(s, alpha, beta, k);
  return detail::report("mellin_forward", {q.value, q.error_estimate, q.evaluations}, {c.value, c.abs_error_bound, 1},
                        tol);
}

// The a-priori bound on the line integrand |Gamma(s+v) 2F1(...)| at height t.
inline double inverse_envelope(int k, double sigma, double ratio, double t) {
  return std::sqrt(2 * pi) * std::pow(t, sigma + k / 4.0 - 1) * std::exp(-(pi / 2 - ratio) * t);
}

struct InverseResult {
  EvaluationReport report;
  double height = 0;      // truncation height T
  double tail_bound = 0;  // a-priori bound on the discarded |t| > T part
};

// e^{-alpha n} J_v(beta n) = (1/2 pi) int forward_closed_form(sigma+it) n^{-sigma-it} dt
inline InverseResult mellin_inverse_check(double n_arg, double alpha, double beta, int k, double sigma, double T,
                                          double tol) {
  detail::require_rates(alpha, beta);
  if (!(n_arg > 0)) fail(ErrorKind::InvalidSpec, "needs n > 0");
  const double nu = k / 4.0 - 0.5;
  const double r = beta / alpha;
  const double rate = pi / 2 - r;
  if (!(rate > 0)) fail(ErrorKind::InvalidSpec, "line integrand does not decay (beta/alpha >= pi/2)");
  if (!(sigma > 0.25) || !(sigma + nu > 0)) fail(ErrorKind::InvalidSpec, "needs sigma > 1/4 and sigma > 1/2 - k/4");
  const double pre = std::exp(nu * std::log(beta / (2 * alpha)) - std::lgamma(nu + 1) - sigma * std::log(alpha * n_arg));
  const double p = sigma + k / 4.0 - 1;
  auto tail = [&](double H) { return 2 * pre * std::sqrt(2 * pi) * detail::power_exp_tail(p, rate, H) / (2 * pi); };
  if (T <= 0) {
    T = 10;
    while (tail(T) > tol / 2) {
      T += 1;
      if (T > 2000) fail(ErrorKind::TolUnreachable, "no truncation height reaches the tolerance");
    }
  }
  auto integrand = [&](double t) -> cplx {
    cplx s(sigma, t);
    return forward_closed_form(s, alpha, beta, k).value * std::exp(-s * std::log(n_arg));
  };
  specfun::QuadratureControls ctl;
  ctl.target = 1e-12;
  ctl.max_level = 12;
  auto q = specfun::integrate_symmetric_trapezoid(integrand, T, 0.5, ctl);
  double tb = tail(T);
  ValueWithBound lhs{q.value / (2 * pi), q.error_estimate / (2 * pi) + tb, q.evaluations};
  auto j = specfun::bessel_j(nu, beta * n_arg);
  double e = std::exp(-alpha * n_arg);
  ValueWithBound rhs{e * j.value, e * j.abs_error_bound + 2 * eps * std::abs(e * j.value), 1};
  return {detail::report("mellin_inverse", lhs, rhs, tol), T, tb};
}

// int_0^inf x^{s-1} J_mu(beta x) K_v(alpha x) dx
//   = 2^{s-2} beta^mu / (alpha^{s+mu} Gamma(mu+1)) Gamma((s+mu-v)/2) Gamma((s+mu+v)/2)
//     2F1((s+mu-v)/2, (s+mu+v)/2; mu+1; -beta^2/alpha^2)
inline SpecialValue jk_closed_form(cplx s, double alpha, double beta, double mu, cplx nu) {
  cplx a = (s + mu - nu) / 2.0, b = (s + mu + nu) / 2.0;
  auto gg = detail::times(specfun::gamma(a), specfun::gamma(b));
  auto f = specfun::hyp2f1(a, b, mu + 1, -(beta * beta) / (alpha * alpha));
  auto prod = detail::times(gg, f);
  cplx pre = std::exp((s - 2.0) * std::log(2.0) + mu * std::log(beta) - (s + mu) * std::log(alpha) - std::lgamma(mu + 1));
  cplx v = pre * prod.value;
  return {v, std::abs(pre) * prod.abs_error_bound + std::abs(v) * eps * (8 + 2 * std::abs(s) * 3)};
}

inline void require_jk(cplx s, double alpha, double beta, double mu, cplx nu) {
  detail::require_rates(alpha, beta);
  if (mu < -0.5) fail(ErrorKind::InvalidSpec, "needs mu >= -1/2");
  if (!(s.real() + mu > std::abs(nu.real()))) fail(ErrorKind::InvalidSpec, "needs Re(s + mu) > |Re nu|");
}

inline EvaluationReport mellin_jk_check(cplx s, double alpha, double beta, double mu, cplx nu, double tol) {
  require_jk(s, alpha, beta, mu, nu);
  auto integrand = [&](double x) -> cplx {
    if (alpha * x > 700) return 0.0;
    auto j = specfun::bessel_j(mu, beta * x);
    auto kk = specfun::bessel_k(nu, alpha * x);
    return std::exp((s - 1.0) * std::log(x)) * j.value * kk.value;
  };
  specfun::QuadratureControls ctl;
  ctl.target = 1e-13;
  ctl.max_level = 12;
  auto q = specfun::integrate_half_line(integrand, 1 / alpha, ctl);
  auto c = jk_closed_form(s, alpha, beta, mu, nu);
  return detail::report("mellin_jk", {q.value, q.error_estimate, q.evaluations}, {c.value, c.abs_error_bound, 1}, tol);
}

// ---------------------------------------------------------------------------
// Asymptotic scans

struct AsymptoticCheckResult {
  std::vector<double> heights;
  std::vector<cplx> ratios;        // lhs / rhs at each height
  std::vector<double> deviations;  // |ratio - 1| * t (2F1 scan) or lhs / bound (inequality scan)
  double band = 0;                 // max / min of deviations (2F1 scan)
  bool decreasing = false;         // |ratio - 1| strictly decreasing (2F1 scan)
  std::optional<double> tau0;      // inequality scan threshold
  bool pass = false;
};

// 2F1((sigma+v)/2 + it/2, (sigma+v+1)/2 + it/2; v+1; -r^2) against Gamma(v+1)(r t/2)^{-v} I_v(r t)
inline AsymptoticCheckResult asymptotic_check_2f1(double sigma, double nu, double alpha, double beta,
                                                  std::vector<double> heights) {
  detail::require_rates(alpha, beta);
  if (!(nu > -1) || !(sigma > -nu)) fail(ErrorKind::InvalidSpec, "needs v > -1 and sigma > -v");
  if (heights.empty() || !std::is_sorted(heights.begin(), heights.end()) ||
      std::adjacent_find(heights.begin(), heights.end()) != heights.end() || heights.front() <= 0)
    fail(ErrorKind::InvalidSpec, "heights must be positive and strictly increasing");
  const double r = beta / alpha;
  AsymptoticCheckResult out;
  out.heights = heights;
  std::vector<double> gaps;
  for (double t : heights) {
    auto f = specfun::hyp2f1(cplx((sigma + nu) / 2, t / 2), cplx((sigma + nu + 1) / 2, t / 2), nu + 1, -r * r);
    // Gamma(v+1) (rt/2)^{-v} I_v(rt), with I_v = e^{rt} * scaled
    double w = r * t;
    auto is = specfun::bessel_i_scaled(nu, w);
    double log_g = std::lgamma(nu + 1) - nu * std::log(w / 2) + w;
    cplx ratio = f.value * std::exp(-log_g) / is.value;
    out.ratios.push_back(ratio);
    gaps.push_back(std::abs(ratio - 1.0));
    out.deviations.push_back(gaps.back() * t);
  }
  auto [lo, hi] = std::minmax_element(out.deviations.begin(), out.deviations.end());
  out.band = *lo > 0 ? *hi / *lo : INFINITY;
  out.decreasing = true;
  for (std::size_t i = 1; i < gaps.size(); ++i)
    if (!(gaps[i] < gaps[i - 1])) out.decreasing = false;
  out.pass = out.decreasing && out.band <= 4;
  return out;
}

// |Gamma(a) Gamma(b) / Gamma(mu+1) 2F1(a, b; mu+1; -r^2)| <= 4 pi (t/2)^{sigma+mu-1} e^{-(pi/2 - r) t},
// a, b = (sigma+mu -+ v)/2 + it/2; scans t on a grid and reports the smallest
// grid height past which every sample satisfies the inequality.
inline double gamma2f1_ratio(double sigma, double mu, cplx nu, double r, double t) {
  cplx a = (sigma + mu - nu) / 2.0 + cplx(0, t / 2), b = (sigma + mu + nu) / 2.0 + cplx(0, t / 2);
  auto la = specfun::log_gamma(a), lb = specfun::log_gamma(b);
  auto f = specfun::hyp2f1(a, b, mu + 1, -r * r);
  double log_lhs = la.real() + lb.real() - std::lgamma(mu + 1) + std::log(std::abs(f.value));
  double log_bound = std::log(4 * pi) + (sigma + mu - 1) * std::log(t / 2) - (pi / 2 - r) * t;
  return std::exp(log_lhs - log_bound);
}

inline AsymptoticCheckResult asymptotic_check_gamma2f1(double sigma, double mu, cplx nu, double ratio,
                                                       double tau0_search_max, double step = 0.25) {
  if (!(mu > -1) || !(sigma + mu > std::abs(nu.real())) || !(ratio >= 0 && ratio < 1))
    fail(ErrorKind::InvalidSpec, "needs mu > -1, sigma + mu > |Re v|, 0 <= beta/alpha < 1");
  if (!(tau0_search_max > 0)) fail(ErrorKind::InvalidSpec, "search bound must be positive");
  AsymptoticCheckResult out;
  const double top = std::max(2 * tau0_search_max, 60.0);
  for (double t = step; t <= top + 1e-12; t += step) {
    out.heights.push_back(t);
    double q = gamma2f1_ratio(sigma, mu, nu, ratio, t);
    out.ratios.push_back(q);
    out.deviations.push_back(q);
  }
  // walk down from the top while the inequality keeps holding
  std::size_t first_ok = out.heights.size();
  while (first_ok > 0 && out.deviations[first_ok - 1] <= 1.0) --first_ok;
  if (first_ok == out.heights.size() || out.heights[first_ok] > tau0_search_max)
    fail(ErrorKind::FailedToFindTau0, "no threshold up to the search bound satisfies the inequality");
  out.tau0 = out.heights[first_ok];
  out.pass = true;
  return out;
}

// K_v(alpha x) J_mu(beta x) = (1/2 pi) int jk_closed_form(sigma+it) x^{-sigma-it} dt, truncated at
// T >= tau0 with the scanned inequality bounding the tail.
inline InverseResult mellin_jk_inverse_check(double x0, double alpha, double beta, double mu, cplx nu, double sigma,
                                             double tol) {
  require_jk(cplx(sigma, 0), alpha, beta, mu, nu);
  if (!(x0 > 0)) fail(ErrorKind::InvalidSpec, "needs x > 0");
  const double r = beta / alpha;
  auto scan = asymptotic_check_gamma2f1(sigma, mu, nu, r, 30);
  const double rate = pi / 2 - r, p = sigma + mu - 1;
  const double pre = std::exp((sigma - 2) * std::log(2.0) + mu * std::log(beta) - (sigma + mu) * std::log(alpha) -
                              sigma * std::log(x0)) *
                     4 * pi * std::pow(0.5, p);
  auto tail = [&](double H) { return 2 * pre * detail::power_exp_tail(p, rate, H) / (2 * pi); };
  double T = std::max(10.0, *scan.tau0);
  while (tail(T) > tol / 2) {
    T += 1;
    if (T > 2000) fail(ErrorKind::TolUnreachable, "no truncation height reaches the tolerance");
  }
  auto integrand = [&](double t) -> cplx {
    cplx s(sigma, t);
    return jk_closed_form(s, alpha, beta, mu, nu).value * std::exp(-s * std::log(x0));
  };
  specfun::QuadratureControls ctl;
  ctl.target = 1e-12;
  ctl.max_level = 12;
  auto q = specfun::integrate_symmetric_trapezoid(integrand, T, 0.5, ctl);
  double tb = tail(T);
  ValueWithBound lhs{q.value / (2 * pi), q.error_estimate / (2 * pi) + tb, q.evaluations};
  auto j = specfun::bessel_j(mu, beta * x0);
  auto kk = specfun::bessel_k(nu, alpha * x0);
  cplx v = j.value * kk.value;
  ValueWithBound rhs{v, std::abs(j.value) * kk.abs_error_bound + j.abs_error_bound * std::abs(kk.value) + 2 * eps * std::abs(v), 1};
  return {detail::report("mellin_jk_inverse", lhs, rhs, tol), T, tb};
}

}  // namespace popov::mellin
