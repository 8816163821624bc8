#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "arith.hpp"
#include "core.hpp"
#include "quadrature.hpp"
#include "series.hpp"
#include "specfun.hpp"
#include "zeta.hpp"

namespace popov::identities {

using arith::ArithmeticSequence;
using arith::DirichletCharacter;
using series::BesselSeriesSpec;
using series::DoubleSeriesSpec;
using series::IndexMap;
using series::Oscillator;

struct Params {
  int k = 2;
  double x = 1.0;
  double y = 0.5;
  cplx z = 0.0;
  cplx nu = 0.0;
  double q = 1.0;      // Riesz order
  double alpha = 0.0;  // > 0 selects the alpha/beta form of the k = 1 chain
  std::optional<DirichletCharacter> chi;
};

struct EvaluationReport {
  std::string id;
  Params params;
  ValueWithBound lhs, rhs;
  double tol = 0;
  double abs_residual = 0;
  double rel_residual = 0;
  bool pass = false;
  bool experimental = false;  // evaluated outside the stated domain; pass is not asserted
};

inline bool recompute_pass(const EvaluationReport& r) {
  return r.abs_residual <= r.tol + r.lhs.tail_bound + r.rhs.tail_bound;
}

inline EvaluationReport make_report(std::string id, const Params& p, const ValueWithBound& lhs,
                                    const ValueWithBound& rhs, double tol, bool experimental = false) {
  EvaluationReport r;
  r.id = std::move(id);
  r.params = p;
  r.lhs = lhs;
  r.rhs = rhs;
  r.tol = tol;
  r.abs_residual = std::abs(lhs.value - rhs.value);
  double scale = std::max(std::abs(lhs.value), std::abs(rhs.value));
  r.rel_residual = scale > 0 ? r.abs_residual / scale : r.abs_residual;
  r.pass = recompute_pass(r);
  r.experimental = experimental;
  return r;
}

// (x, y) -> (x, y) / (x^2 + y^2)
inline std::pair<double, double> involution_map(double x, double y) {
  double d = x * x + y * y;
  return {x / d, y / d};
}

namespace detail {

inline ValueWithBound constant(cplx v, double rel = 8 * eps) { return {v, std::abs(v) * rel, 0}; }

inline ValueWithBound from_special(const SpecialValue& v) { return {v.value, v.abs_error_bound, 0}; }

inline SpecialValue times(const SpecialValue& a, const SpecialValue& b) {
  cplx v = a.value * b.value;
  return {v, std::abs(a.value) * b.abs_error_bound + a.abs_error_bound * std::abs(b.value) +
                 a.abs_error_bound * b.abs_error_bound + 2 * eps * std::abs(v)};
}

inline cplx cpow(double base, cplx e) { return std::exp(e * std::log(base)); }

// d^e - 1 without cancellation near d = 1
inline cplx pow_minus_one(double d, cplx e) { return arith::detail::expm1(e * std::log(d)); }

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorKind::InvalidSpec, what);
}

inline void require_k(const Params& p) { require(p.k >= 1 && p.k <= 24, "k must be an integer in [1, 24]"); }
inline void require_x(const Params& p) { require(p.x > 0 && std::isfinite(p.x), "needs x > 0"); }

inline double side_tol(double tol) { return tol / 8; }

// Theta_k-type side: c + sum r_k(n) n^{-nu} e^{-pi n X} B_nu(pi n Y), nu = k/4 - 1/2
inline ValueWithBound theta_like_series(int k, double X, double Y, bool modified, double tol) {
  BesselSeriesSpec s;
  s.weights = ArithmeticSequence::sum_of_squares(k);
  const double nu = k / 4.0 - 0.5;
  s.power = -nu;
  s.decay = pi * X;
  s.oscillators = {modified ? Oscillator::bessel_i(nu, pi * Y) : Oscillator::bessel_j(nu, pi * Y)};
  return series::eval_series(s, tol);
}

// (pi y)^nu / (2^nu Gamma(nu + 1))
inline double leading_constant(double nu, double y) {
  return std::exp(nu * std::log(pi * y / 2) - std::lgamma(nu + 1));
}

inline void require_x_gt_y(const Params& p, bool experimental_ok, bool experimental) {
  require_x(p);
  require(p.y > 0, "needs x>y>0");
  if (p.x > p.y) return;
  if (!(experimental_ok && experimental)) fail(ErrorKind::InvalidSpec, "needs x>y>0");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Popov's formula, divided through by its z-dependent leading constant:
//   e^{z^2/8} x^{k/4} sum_{n>=0} r_k(n) e^{-pi n x} Lj(sqrt(pi n x) z)
//     = e^{-z^2/8} x^{-k/4} sum_{n>=0} r_k(n) e^{-pi n/x} Li(sqrt(pi n/x) z)
// with Lj(w) = Gamma(v+1)(w/2)^{-v} J_v(w), Li likewise with I_v, v = k/2 - 1.
inline EvaluationReport verify_popov(const Params& p, double tol, bool = false) {
  detail::require_k(p);
  detail::require_x(p);
  const double nu = p.k / 2.0 - 1;
  auto side = [&](double X, bool modified) {
    BesselSeriesSpec s;
    s.weights = ArithmeticSequence::sum_of_squares(p.k);
    s.decay = pi * X;
    cplx scale = p.z * std::sqrt(pi * X);
    s.oscillators = {modified ? Oscillator::regularized_i(nu, scale, 0.5) : Oscillator::regularized_j(nu, scale, 0.5)};
    return series::eval_series(s, detail::side_tol(tol)) + detail::constant(1.0, 0);
  };
  cplx e8 = std::exp(p.z * p.z / 8.0);
  auto lhs = scaled(side(p.x, false), e8 * std::pow(p.x, p.k / 4.0), 8 * eps);
  auto rhs = scaled(side(1 / p.x, true), std::pow(p.x, -p.k / 4.0) / e8, 8 * eps);
  return make_report("popov", p, lhs, rhs, tol);
}

// k = 1 through cos and cosh over the squares.
inline EvaluationReport verify_popov_k1(const Params& p, double tol, bool = false) {
  detail::require_x(p);
  auto side = [&](double X, bool hyperbolic) {
    BesselSeriesSpec s;
    s.index = IndexMap::square();
    s.decay = pi * X;
    cplx scale = p.z * std::sqrt(pi * X);
    if (hyperbolic) scale *= cplx(0, 1);  // cosh w = cos(i w)
    s.oscillators = {Oscillator::cos(scale, 0.5)};
    return scaled(series::eval_series(s, detail::side_tol(tol)), 2.0, 0) + detail::constant(1.0, 0);
  };
  cplx e8 = std::exp(p.z * p.z / 8.0);
  auto lhs = scaled(side(p.x, false), e8 * std::pow(p.x, 0.25), 8 * eps);
  auto rhs = scaled(side(1 / p.x, true), std::pow(p.x, -0.25) / e8, 8 * eps);
  Params q = p;
  q.k = 1;
  return make_report("popov_k1", q, lhs, rhs, tol);
}

// sum_{n>=0} r_k(n) e^{-pi n x} = x^{-k/2} sum_{n>=0} r_k(n) e^{-pi n/x}
inline EvaluationReport verify_theta_k(const Params& p, double tol, bool = false) {
  detail::require_k(p);
  detail::require_x(p);
  auto side = [&](double X) {
    BesselSeriesSpec s;
    s.weights = ArithmeticSequence::sum_of_squares(p.k);
    s.decay = pi * X;
    return series::eval_series(s, detail::side_tol(tol)) + detail::constant(1.0, 0);
  };
  auto lhs = side(p.x);
  auto rhs = scaled(side(1 / p.x), std::pow(p.x, -p.k / 2.0), 8 * eps);
  return make_report("theta_k", p, lhs, rhs, tol);
}

inline EvaluationReport verify_riesz(const Params& p, double tol, bool = false) {
  detail::require_k(p);
  detail::require_x(p);
  if (!(p.q > (p.k - 1) / 2.0)) fail(ErrorKind::InvalidSpec, "riesz_cn needs q > (k-1)/2");
  auto lhs = series::riesz_sum(p.k, p.q, p.x);
  auto rhs = series::riesz_dual(p.k, p.q, p.x, tol / 2);
  return make_report("riesz_cn", p, lhs, rhs, tol);
}

// Humbert form, divided by pi^{v/2} z^v / (2^v Gamma(v+1)):
//   e^{z^2/8} x^{(v+1)/2} sum_{n>=0} r_k(n) e^{-pi n x} Lj_v(sqrt(pi n x) z)
//     = x^{(v-k+1)/2} [ e^{z^2/8} 1F1(k/2; v+1; -z^2/4)
//         + e^{-z^2/8} sum_{n>=1} r_k(n) e^{-pi n/x} Phi3(1-k/2+v; v+1; z^2/4, pi z^2 n/(4x)) ]
inline EvaluationReport verify_phi3(const Params& p, double tol, bool = false) {
  detail::require_k(p);
  detail::require_x(p);
  if (p.nu.imag() != 0) fail(ErrorKind::InvalidSpec, "phi3 needs real nu");
  const double nu = p.nu.real();
  if (nu < -0.5) fail(ErrorKind::InvalidSpec, "phi3 is implemented for nu >= -1/2");
  cplx e8 = std::exp(p.z * p.z / 8.0);
  const double st = detail::side_tol(tol);

  BesselSeriesSpec left;
  left.weights = ArithmeticSequence::sum_of_squares(p.k);
  left.decay = pi * p.x;
  left.oscillators = {Oscillator::regularized_j(nu, p.z * std::sqrt(pi * p.x), 0.5)};
  auto lhs = scaled(series::eval_series(left, st) + detail::constant(1.0, 0), e8 * std::pow(p.x, (nu + 1) / 2),
                    8 * eps);

  BesselSeriesSpec right;
  right.weights = ArithmeticSequence::sum_of_squares(p.k);
  right.decay = pi / p.x;
  right.oscillators = {Oscillator::humbert(1 - p.k / 2.0 + nu, nu + 1, p.z * p.z / 4.0, pi * p.z * p.z / (4 * p.x))};
  auto tail_part = scaled(series::eval_series(right, st), 1.0 / e8, 4 * eps);
  auto kummer = specfun::hyp1f1(p.k / 2.0, nu + 1, -p.z * p.z / 4.0);
  auto head = scaled(detail::from_special(kummer), e8, 4 * eps);
  auto rhs = scaled(head + tail_part, std::pow(p.x, (nu - p.k + 1) / 2), 4 * eps);
  return make_report("phi3", p, lhs, rhs, tol);
}

// Theta_k-type transformation with J (x^2 + y^2) or I (x^2 - y^2).
inline EvaluationReport verify_analogue(const Params& p, bool modified, double tol, bool experimental = false) {
  detail::require_k(p);
  detail::require_x_gt_y(p, !modified, experimental);
  const bool outside = !(p.x > p.y);
  const double nu = p.k / 4.0 - 0.5;
  const double d = modified ? p.x * p.x - p.y * p.y : p.x * p.x + p.y * p.y;
  const double c = detail::leading_constant(nu, p.y);
  const double st = detail::side_tol(tol);
  auto lhs = detail::constant(c) + detail::theta_like_series(p.k, p.x, p.y, modified, st);
  auto rhs = detail::constant(c * std::pow(d, -p.k / 4.0)) +
             scaled(detail::theta_like_series(p.k, p.x / d, p.y / d, modified, st), 1 / std::sqrt(d));
  return make_report(modified ? "analogue_i" : "analogue_j", p, lhs, rhs, tol, outside);
}

inline EvaluationReport verify_theta_involution(const Params& p, double tol, bool = false) {
  detail::require_k(p);
  detail::require_x_gt_y(p, false, false);
  const double nu = p.k / 4.0 - 0.5;
  const double st = detail::side_tol(tol);
  auto theta = [&](double X, double Y) {
    return detail::constant(detail::leading_constant(nu, Y)) + detail::theta_like_series(p.k, X, Y, false, st);
  };
  auto [mx, my] = involution_map(p.x, p.y);
  auto lhs = theta(p.x, p.y);
  auto rhs = scaled(theta(mx, my), 1 / std::sqrt(p.x * p.x + p.y * p.y));
  return make_report("theta_involution", p, lhs, rhs, tol);
}

// 2 pi y + sum r_4(n)/n (e^{-pi n (x-y)} - e^{-pi n (x+y)})
//   = 2 pi y/(x^2-y^2) + sum r_4(n)/n (e^{-pi n/(x+y)} - e^{-pi n/(x-y)})
inline EvaluationReport verify_k4(const Params& p, double tol, bool = false) {
  detail::require_x_gt_y(p, false, false);
  const double st = detail::side_tol(tol);
  auto exp_sum = [&](double rate) {
    BesselSeriesSpec s;
    s.weights = ArithmeticSequence::sum_of_squares(4);
    s.power = -1.0;
    s.decay = pi * rate;
    return series::eval_series(s, st);
  };
  const double x = p.x, y = p.y;
  auto lhs = detail::constant(2 * pi * y) + exp_sum(x - y) - exp_sum(x + y);
  auto rhs = detail::constant(2 * pi * y / ((x - y) * (x + y))) + exp_sum(1 / (x + y)) - exp_sum(1 / (x - y));
  Params q = p;
  q.k = 4;
  return make_report("k4_exp", q, lhs, rhs, tol);
}

// Divisor-sum example, k odd: weights sigma_k(n) n^{-k/2}, argument 2 pi n.
inline EvaluationReport verify_divisor(const Params& p, bool modified, double tol, bool = false) {
  if (p.k < 3 || p.k % 2 == 0 || p.k > 23) fail(ErrorKind::InvalidSpec, "divisor identity needs odd k >= 3");
  detail::require_x_gt_y(p, false, false);
  const int k = p.k;
  const double nu = k / 2.0;
  const double d = modified ? p.x * p.x - p.y * p.y : p.x * p.x + p.y * p.y;
  const double bern = arith::bernoulli_double(k + 1);
  const double base = bern * std::exp(nu * std::log(pi * p.y) - std::lgamma(nu + 1)) / (2.0 * (k + 1));
  const double st = detail::side_tol(tol);
  auto side = [&](double X, double Y) {
    BesselSeriesSpec s;
    s.weights = ArithmeticSequence::divisor(double(k));
    s.power = -nu;
    s.decay = 2 * pi * X;
    s.oscillators = {modified ? Oscillator::bessel_i(nu, 2 * pi * Y) : Oscillator::bessel_j(nu, 2 * pi * Y)};
    return series::eval_series(s, st);
  };
  const double sign_const = ((k - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
  const double sign_series = ((k + 1) / 2) % 2 == 0 ? 1.0 : -1.0;
  auto lhs = detail::constant(-base) + side(p.x, p.y);
  auto rhs = detail::constant(sign_const * base * std::pow(d, -(k + 1) / 2.0)) +
             scaled(side(p.x / d, p.y / d), sign_series / std::sqrt(d));
  return make_report(modified ? "divisor_i" : "divisor_j", p, lhs, rhs, tol);
}

// Weight-12 cusp form: no boundary terms.
inline EvaluationReport verify_cusp_tau(const Params& p, bool modified, double tol, bool experimental = false) {
  detail::require_x_gt_y(p, !modified, experimental);
  const bool outside = !(p.x > p.y);
  const double d = modified ? p.x * p.x - p.y * p.y : p.x * p.x + p.y * p.y;
  const double st = detail::side_tol(tol);
  auto side = [&](double X, double Y) {
    BesselSeriesSpec s;
    s.weights = ArithmeticSequence::ramanujan_tau();
    s.power = -5.5;
    s.decay = 2 * pi * X;
    s.oscillators = {modified ? Oscillator::bessel_i(5.5, 2 * pi * Y) : Oscillator::bessel_j(5.5, 2 * pi * Y)};
    return series::eval_series(s, st);
  };
  auto lhs = side(p.x, p.y);
  auto rhs = scaled(side(p.x / d, p.y / d), 1 / std::sqrt(d));
  Params q = p;
  q.k = 12;
  return make_report(modified ? "cusp_tau_i" : "cusp_tau_j", q, lhs, rhs, tol, outside);
}

// sum chi(n) sqrt(n) e^{-pi n^2 x/q} J_v(pi n^2 y/q)
//   = eps G(chi)/sqrt(q d) sum conj(chi)(n) sqrt(n) e^{-pi n^2 x/(q d)} J_v(pi n^2 y/(q d)),
// v = -1/4, eps = 1 (even) or v = 1/4, eps = -i (odd); d = x^2 + y^2.
inline EvaluationReport verify_character(const Params& p, bool odd, double tol, bool = false) {
  DirichletCharacter chi = p.chi ? *p.chi : (odd ? DirichletCharacter::mod4() : DirichletCharacter::legendre(5));
  if (chi.is_principal() || !chi.is_primitive())
    fail(ErrorKind::InvalidCharacter, "character must be primitive and nonprincipal");
  if (chi.is_even() == odd) fail(ErrorKind::InvalidCharacter, odd ? "char_odd needs an odd character" : "char_even needs an even character");
  detail::require_x_gt_y(p, false, false);
  const double q = chi.modulus();
  const double d = p.x * p.x + p.y * p.y;
  const double nu = odd ? 0.25 : -0.25;
  const double st = detail::side_tol(tol);
  auto side = [&](const DirichletCharacter& c, double X, double Y) {
    BesselSeriesSpec s;
    s.weights = ArithmeticSequence::twist(ArithmeticSequence::one(), c);
    s.power = 0.5;
    s.index = IndexMap::square();
    s.decay = pi * X / q;
    s.oscillators = {Oscillator::bessel_j(nu, pi * Y / q)};
    return series::eval_series(s, st);
  };
  auto g = arith::gauss_sum(chi);
  cplx factor = (odd ? cplx(0, -1) : cplx(1, 0)) * g.value / std::sqrt(q * d);
  auto lhs = side(chi, p.x, p.y);
  auto mirrored = side(chi.conj(), p.x / d, p.y / d);
  auto rhs = scaled(mirrored, factor);
  rhs.tail_bound += std::abs(mirrored.value) * g.abs_error_bound / std::sqrt(q * d);
  Params rp = p;
  rp.chi = chi;
  return make_report(odd ? "char_odd" : "char_even", rp, lhs, rhs, tol);
}

namespace detail {

// sum_{m,n} r_k(m) r_k(n) (m/n)^{v/2} (mn)^{1/2-k/4} B_{k/2-1}(2 pi sqrt(mn) Y) K_v(2 pi sqrt(mn) X)
inline ValueWithBound guinand_double(int k, cplx nu, double X, double Y, bool modified, double tol) {
  DoubleSeriesSpec s;
  s.outer = ArithmeticSequence::sum_of_squares(k);
  s.inner = s.outer;
  s.ratio_power = nu / 2.0;
  s.product_power = 0.5 - k / 4.0;
  const double order = k / 2.0 - 1;
  s.oscillators = {modified ? Oscillator::bessel_i(order, 2 * pi * Y, 0.5) : Oscillator::bessel_j(order, 2 * pi * Y, 0.5),
                   Oscillator::bessel_k(nu, 2 * pi * X, 0.5)};
  return series::eval_double_series(s, tol);
}

// x^{-v} eta_k(v) (d^{v-k/2} - 1) + x^{v} eta_k(-v) (d^{-k/2-v} - 1); each
// term is written so that v -> -v swaps the two exactly.
inline ValueWithBound guinand_boundary(int k, cplx nu, double x, double d, double tol) {
  const double h = k / 2.0;
  arith::ZetaControls ctl;
  ctl.target = tol;
  auto term = [&](cplx v, cplx e) {
    auto eta = arith::completed_eta(k, v, arith::EtaPath::Auto, ctl);
    cplx xp = std::exp(-v * std::log(x));
    cplx br = pow_minus_one(d, e);
    cplx val = xp * eta.value * br;
    double err = std::abs(xp * br) * eta.abs_error_bound +
                 std::abs(val) * eps * (6 + 2 * std::abs(v) * std::abs(std::log(x))) +
                 std::abs(xp * eta.value) * eps * (4 + 2 * std::abs(e) * std::abs(std::log(d)));
    return ValueWithBound{val, err, 0};
  };
  return term(nu, nu - h) + term(-nu, -h - nu);
}

inline void require_guinand_nu(int k, cplx nu) {
  const double h = k / 2.0;
  if (k >= 2) {
    if (!(nu.real() > h) && !(-nu.real() > h))
      fail(ErrorKind::DomainNotCovered, "for k >= 2 the eta values need |Re nu| > k/2");
  }
  if (nu == cplx(h, 0) || nu == cplx(-h, 0)) fail(ErrorKind::InvalidSpec, "nu = k/2 is excluded");
  if (nu == 0.0) fail(ErrorKind::PoleAt, "nu = 0 hits the pole of eta_k");
}

}  // namespace detail

inline EvaluationReport verify_guinand(const Params& p, bool modified, double tol, bool = false) {
  detail::require_k(p);
  if (modified)
    detail::require_x_gt_y(p, false, false);
  else {
    detail::require_x(p);
    detail::require(p.y > 0, "needs x, y > 0");
  }
  detail::require_guinand_nu(p.k, p.nu);
  const int k = p.k;
  const double d = modified ? p.x * p.x - p.y * p.y : p.x * p.x + p.y * p.y;
  const double st = detail::side_tol(tol) / 2;
  const double pref = 2 * std::tgamma(k / 2.0) * std::pow(pi * p.y, 1 - k / 2.0);
  auto first = detail::guinand_double(k, p.nu, p.x, p.y, modified, st);
  auto second = detail::guinand_double(k, p.nu, p.x / d, p.y / d, modified, st);
  auto lhs = scaled(first, pref, 8 * eps) - scaled(second, pref / d, 8 * eps);
  auto rhs = detail::guinand_boundary(k, p.nu, p.x, d, detail::side_tol(tol));
  return make_report(modified ? "guinand_i" : "guinand_j", p, lhs, rhs, tol);
}

// Psi_k(v; x, y) = x^{-v} eta_k(v) + x^{v} eta_k(-v) + 2 Gamma(k/2) (pi y)^{1-k/2} * double sum,
// checked as Psi_k(v; x, y) = d^{-k/2} Psi_k(v; x/d, y/d).
inline EvaluationReport verify_psi_involution(const Params& p, double tol, bool = false) {
  detail::require_k(p);
  detail::require_x(p);
  detail::require(p.y > 0, "needs x, y > 0");
  detail::require_guinand_nu(p.k, p.nu);
  const int k = p.k;
  const double st = detail::side_tol(tol) / 2;
  arith::ZetaControls ctl;
  ctl.target = st;
  auto eta_plus = arith::completed_eta(k, p.nu, arith::EtaPath::Auto, ctl);
  auto eta_minus = arith::completed_eta(k, -p.nu, arith::EtaPath::Auto, ctl);
  auto psi = [&](double X, double Y) {
    cplx a = std::exp(-p.nu * std::log(X)), b = std::exp(p.nu * std::log(X));
    ValueWithBound bnd{a * eta_plus.value + b * eta_minus.value,
                       std::abs(a) * eta_plus.abs_error_bound + std::abs(b) * eta_minus.abs_error_bound +
                           (std::abs(a * eta_plus.value) + std::abs(b * eta_minus.value)) * eps *
                               (6 + 2 * std::abs(p.nu) * std::abs(std::log(X))),
                       0};
    const double pref = 2 * std::tgamma(k / 2.0) * std::pow(pi * Y, 1 - k / 2.0);
    return bnd + scaled(detail::guinand_double(k, p.nu, X, Y, false, st), pref, 8 * eps);
  };
  const double d = p.x * p.x + p.y * p.y;
  auto [mx, my] = involution_map(p.x, p.y);
  auto lhs = psi(p.x, p.y);
  auto rhs = scaled(psi(mx, my), std::pow(d, -k / 2.0), 8 * eps);
  return make_report("psi_involution", p, lhs, rhs, tol);
}

// The k = 1 reduction: with S(X, Y) = sum sigma_{-v}(n) n^{v/2} cos(2 pi n Y) K_{v/2}(2 pi n X),
//   S(x, y) - d^{-1/2} S(x/d, y/d)
//     = 1/4 (pi x)^{-v/2} Gamma(v/2) zeta(v) (d^{(v-1)/2} - 1)
//       + 1/4 (pi x)^{v/2} Gamma(-v/2) zeta(-v) (d^{-(1+v)/2} - 1).
// With alpha > 0 the alpha beta = pi^2 form is checked instead:
//   sqrt(a) T(a) - sqrt(b) T(b) = 1/4 Gamma(-v/2) zeta(-v) (b^{(1+v)/2} - a^{(1+v)/2})
//                                 + 1/4 Gamma(v/2) zeta(v) (b^{(1-v)/2} - a^{(1-v)/2}),
// T(a) = sum sigma_{-v}(n) n^{v/2} K_{v/2}(2 n a).
inline EvaluationReport verify_guinand_k1_chain(const Params& p, double tol, bool = false) {
  const cplx nu = p.nu;
  if (nu == 0.0) fail(ErrorKind::PoleAt, "nu = 0 is a pole of the boundary terms");
  const double st = detail::side_tol(tol);
  auto series_at = [&](double kscale, double cscale) {
    BesselSeriesSpec s;
    s.weights = ArithmeticSequence::divisor(-nu);
    s.power = nu / 2.0;
    s.oscillators = {Oscillator::bessel_k(nu / 2.0, kscale)};
    if (cscale != 0) s.oscillators.push_back(Oscillator::cos(cscale));
    return series::eval_series(s, st);
  };
  auto gz_plus = detail::times(specfun::gamma(nu / 2.0), arith::riemann_zeta(nu));
  auto gz_minus = detail::times(specfun::gamma(-nu / 2.0), arith::riemann_zeta(-nu));
  auto combine = [](const SpecialValue& gz, cplx factor) {
    cplx v = 0.25 * gz.value * factor;
    return ValueWithBound{v, 0.25 * std::abs(factor) * gz.abs_error_bound + 8 * eps * std::abs(v), 0};
  };
  ValueWithBound lhs, rhs;
  if (p.alpha > 0) {
    const double a = p.alpha, b = pi * pi / p.alpha;
    lhs = scaled(series_at(2 * a, 0), std::sqrt(a)) - scaled(series_at(2 * b, 0), std::sqrt(b));
    rhs = combine(gz_minus, detail::cpow(b, (1.0 + nu) / 2.0) - detail::cpow(a, (1.0 + nu) / 2.0)) +
          combine(gz_plus, detail::cpow(b, (1.0 - nu) / 2.0) - detail::cpow(a, (1.0 - nu) / 2.0));
  } else {
    detail::require_x(p);
    detail::require(p.y >= 0, "needs y >= 0");
    const double d = p.x * p.x + p.y * p.y;
    lhs = series_at(2 * pi * p.x, 2 * pi * p.y) -
          scaled(series_at(2 * pi * p.x / d, 2 * pi * p.y / d), 1 / std::sqrt(d));
    rhs = combine(gz_plus, detail::cpow(pi * p.x, -nu / 2.0) * detail::pow_minus_one(d, (nu - 1.0) / 2.0)) +
          combine(gz_minus, detail::cpow(pi * p.x, nu / 2.0) * detail::pow_minus_one(d, -(1.0 + nu) / 2.0));
  }
  Params q = p;
  q.k = 1;
  return make_report("guinand_k1", q, lhs, rhs, tol);
}

// k = 1 line-integral form (normalized like popov):
//   e^{z^2/8} x^{1/4} 2 sum_{m>=1} e^{-pi m^2 x} cos(sqrt(pi x) m z) - e^{-z^2/8} x^{-1/4}
//     = e^{z^2/8}/(2 pi) int pi^{-1/4-it} Gamma(1/4+it) 2 zeta(1/2+2it) 1F1(1/4+it; 1/2; -z^2/4) x^{-it} dt
inline EvaluationReport verify_popov_integral_k1(const Params& p, double tol, bool = false) {
  if (p.k != 1) fail(ErrorKind::DomainNotCovered, "the line-integral form is only available for k = 1");
  detail::require_x(p);
  const cplx z = p.z;
  const cplx e8 = std::exp(z * z / 8.0);

  BesselSeriesSpec s;
  s.index = IndexMap::square();
  s.decay = pi * p.x;
  s.oscillators = {Oscillator::cos(z * std::sqrt(pi * p.x), 0.5)};
  auto lhs = scaled(series::eval_series(s, detail::side_tol(tol)), 2.0 * e8 * std::pow(p.x, 0.25), 8 * eps) -
             detail::constant(std::pow(p.x, -0.25) / e8);

  // tail of the integrand: |Gamma(1/4+it)| <= 2 sqrt(2 pi) |t|^{-1/4} e^{-pi|t|/2},
  // |zeta(1/2+2it)| <= 3 sqrt(2|t|) + 3, |1F1(a; 1/2; -w)| <= e^{4 sqrt(w|a|)} + e^{4 e w}
  const double w = std::norm(z) / 4;
  auto envelope = [&](double t) {
    double g = 2 * std::sqrt(2 * pi) * std::pow(t, -0.25) * std::exp(-pi * t / 2);
    double zt = 3 * std::sqrt(2 * t) + 3;
    double f = std::exp(4 * std::sqrt(w * (t + 0.25))) + std::exp(4 * std::exp(1.0) * w);
    return std::pow(pi, -0.25) * g * 2 * zt * f;
  };
  const double pref = std::abs(e8) / (2 * pi);
  auto tail = [&](double T) -> double {  // both ends; the envelope decreases past T
    if (!(pi / 2 > 1 / (2 * T) + 2 * std::sqrt(w) / std::sqrt(T))) return INFINITY;
    CompensatedSum<double> acc;
    for (int j = 0;; ++j) {
      double v = envelope(T + j);
      acc.add(v);
      if (v < 1e-30 * acc.value() || j > 10000) break;
    }
    return 2 * pref * acc.value();
  };
  double T = 4;
  while (tail(T) > tol / 4) {
    T += 1;
    if (T > 400) fail(ErrorKind::TolUnreachable, "line-integral tail cannot reach the tolerance");
  }
  auto integrand = [&](double t) -> cplx {
    cplx s1(0.25, t);
    auto g = specfun::gamma(s1);
    auto zt = arith::riemann_zeta(cplx(0.5, 2 * t));
    auto f = specfun::hyp1f1(s1, 0.5, -z * z / 4.0);
    return std::exp(-s1 * std::log(pi) - cplx(0, t) * std::log(p.x)) * g.value * 2.0 * zt.value * f.value;
  };
  specfun::QuadratureControls ctl;
  ctl.target = 1e-12;
  ctl.max_level = 12;
  auto quad = specfun::integrate_symmetric_trapezoid(integrand, T, 0.25, ctl);
  ValueWithBound rhs{e8 / (2 * pi) * quad.value, pref * quad.error_estimate + tail(T), quad.evaluations};
  return make_report("popov_integral_k1", p, lhs, rhs, tol);
}

// ---------------------------------------------------------------------------
// Catalog

struct CatalogEntry {
  std::string id;
  std::string description;
  std::vector<std::string> params;
  std::string constraints;
  std::function<EvaluationReport(const Params&, double, bool)> run;
};

inline const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = {
      {"popov", "Popov's theta-Bessel formula for r_k (normalized by its z-power)", {"k", "x", "z"}, "x>0",
       verify_popov},
      {"popov_k1", "Popov's formula at k=1 in cos/cosh form", {"x", "z"}, "x>0", verify_popov_k1},
      {"theta_k", "k-th power theta transformation", {"k", "x"}, "x>0", verify_theta_k},
      {"riesz_cn", "Chandrasekharan-Narasimhan Riesz-sum expansion", {"k", "q", "x"}, "x>0, q>(k-1)/2",
       verify_riesz},
      {"phi3", "Humbert Phi3 summation formula (normalized by its z-power)", {"k", "nu", "x", "z"},
       "x>0, real nu>=-1/2", verify_phi3},
      {"analogue_j", "J_{k/4-1/2} transformation with x^2+y^2", {"k", "x", "y"}, "x>y>0",
       [](const Params& p, double t, bool e) { return verify_analogue(p, false, t, e); }},
      {"analogue_i", "I_{k/4-1/2} transformation with x^2-y^2", {"k", "x", "y"}, "x>y>0",
       [](const Params& p, double t, bool e) { return verify_analogue(p, true, t, e); }},
      {"theta_involution", "Theta_k(x,y) under (x,y)->(x,y)/(x^2+y^2)", {"k", "x", "y"}, "x>y>0",
       verify_theta_involution},
      {"k4_exp", "exponential-sum identity for r_4", {"x", "y"}, "x>y>0", verify_k4},
      {"divisor_j", "sigma_k example with J_{k/2}", {"k", "x", "y"}, "x>y>0, k odd>=3",
       [](const Params& p, double t, bool e) { return verify_divisor(p, false, t, e); }},
      {"divisor_i", "sigma_k example with I_{k/2}", {"k", "x", "y"}, "x>y>0, k odd>=3",
       [](const Params& p, double t, bool e) { return verify_divisor(p, true, t, e); }},
      {"cusp_tau_j", "Ramanujan tau example with J_{11/2}", {"x", "y"}, "x>y>0",
       [](const Params& p, double t, bool e) { return verify_cusp_tau(p, false, t, e); }},
      {"cusp_tau_i", "Ramanujan tau example with I_{11/2}", {"x", "y"}, "x>y>0",
       [](const Params& p, double t, bool e) { return verify_cusp_tau(p, true, t, e); }},
      {"char_even", "even primitive character, J_{-1/4} over n^2", {"chi", "x", "y"}, "x>y>0, chi even primitive",
       [](const Params& p, double t, bool e) { return verify_character(p, false, t, e); }},
      {"char_odd", "odd primitive character, J_{1/4} over n^2", {"chi", "x", "y"}, "x>y>0, chi odd primitive",
       [](const Params& p, double t, bool e) { return verify_character(p, true, t, e); }},
      {"guinand_j", "generalized Ramanujan-Guinand formula with J", {"k", "nu", "x", "y"},
       "x,y>0, |Re nu|>k/2 for k>=2, nu!=k/2",
       [](const Params& p, double t, bool e) { return verify_guinand(p, false, t, e); }},
      {"guinand_i", "generalized Ramanujan-Guinand formula with I", {"k", "nu", "x", "y"},
       "x>y>0, |Re nu|>k/2 for k>=2, nu!=k/2",
       [](const Params& p, double t, bool e) { return verify_guinand(p, true, t, e); }},
      {"guinand_k1", "k=1 divisor-sum form of the Guinand formula", {"nu", "x", "y", "alpha"},
       "x>0, y>=0, nu!=0 (alpha>0: alpha*beta=pi^2 form)", verify_guinand_k1_chain},
      {"psi_involution", "Psi_k(nu;x,y) under (x,y)->(x,y)/(x^2+y^2)", {"k", "nu", "x", "y"},
       "x,y>0, |Re nu|>k/2 for k>=2", verify_psi_involution},
      {"popov_integral_k1", "k=1 line-integral representation with zeta(1/2+2it)", {"x", "z"}, "x>0, k=1",
       verify_popov_integral_k1},
  };
  return entries;
}

inline const CatalogEntry* find_entry(const std::string& id) {
  for (const auto& e : catalog())
    if (e.id == id) return &e;
  return nullptr;
}

inline EvaluationReport verify(const std::string& id, const Params& p, double tol, bool experimental = false) {
  const auto* e = find_entry(id);
  if (!e) fail(ErrorKind::InvalidSpec, "unknown identity id '" + id + "'");
  if (!(tol > 0)) fail(ErrorKind::InvalidSpec, "tol must be positive");
  return e->run(p, tol, experimental);
}

}  // namespace popov::identities
