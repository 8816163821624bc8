#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "arith.hpp"
#include "specfun.hpp"

namespace popov::arith {

namespace detail {

// e^w - 1 without cancellation for small w
inline cplx expm1(cplx w) {
  double a = w.real(), b = w.imag();
  double sb = std::sin(b / 2);
  return {std::expm1(a) * std::cos(b) - 2 * sb * sb, std::exp(a) * std::sin(b)};
}

// Borwein's accelerated alternating series, Re s >= 1/2, s != 1.
inline SpecialValue zeta_borwein(cplx s) {
  const double t = std::abs(s.imag());
  // |remainder| <= 3 (1 + 2|t|) e^{pi |t| / 2} / ((3 + sqrt 8)^n |1 - 2^{1-s}|)
  const double rate = std::log(3 + std::sqrt(8.0));
  const double log_num = std::log(3 * (1 + 2 * t)) + pi * t / 2;
  const int n = static_cast<int>(std::ceil((log_num + 20 * std::log(10.0)) / rate)) + 1;
  std::vector<double> d(n + 1);
  double e = 1.0 / n, acc = e;  // e_i = (n+i-1)! 4^i / ((n-i)! (2i)!)
  d[0] = n * acc;
  for (int i = 1; i <= n; ++i) {
    e *= 4.0 * (n + i - 1.0) * (n - i + 1.0) / ((2.0 * i) * (2.0 * i - 1.0));
    acc += e;
    d[i] = n * acc;
  }
  CompensatedSum<cplx> sum;
  for (int k = 0; k < n; ++k) {
    double w = (d[k] - d[n]) / d[n];
    cplx term = w * std::exp(-s * std::log(k + 1.0));
    sum.add(k % 2 ? -term : term);
  }
  cplx denom = -expm1((1.0 - s) * std::log(2.0));  // 1 - 2^{1-s}
  cplx value = -sum.value() / denom;
  double remainder = std::exp(log_num - n * rate) / std::abs(denom);
  double rounding = eps * (4.0 * n + std::abs(s) * std::log(n + 1.0) + 8.0) * sum.abs_total() / std::abs(denom) +
                    4 * eps * std::abs(value) * (1.0 + std::abs(s));
  return {value, remainder + rounding};
}

}  // namespace detail

// Riemann zeta for complex s != 1.
inline SpecialValue riemann_zeta(cplx s) {
  if (s == cplx(1.0, 0.0)) fail(ErrorKind::PoleAt, "zeta has a pole at s = 1");
  if (s == cplx(0.0, 0.0)) return {-0.5, 0.0};
  if (s.real() >= 0.5) return detail::zeta_borwein(s);
  // zeta(s) = 2^s pi^{s-1} sin(pi s / 2) Gamma(1-s) zeta(1-s)
  if (s.imag() == 0.0 && s.real() < 0 && std::fmod(s.real(), 2.0) == 0.0) return {0.0, 0.0};
  auto z1 = detail::zeta_borwein(1.0 - s);
  auto g = specfun::gamma(1.0 - s);
  cplx half = pi * s / 2.0;
  cplx sn = std::sin(half);
  cplx pre = std::exp(s * std::log(2.0) + (s - 1.0) * std::log(pi)) * sn;
  cplx value = pre * g.value * z1.value;
  double rel = z1.abs_error_bound / std::abs(z1.value) + g.abs_error_bound / std::abs(g.value) +
               eps * (8.0 + 4.0 * std::abs(s) * (1.0 + std::log(pi)) +
                      std::abs(half) * std::abs(std::cos(half) / sn));
  return {value, std::abs(value) * rel};
}

// Dirichlet series tied to sums of squares.
struct ZetaLikeSeries {
  enum class Kind { ZetaK, RiemannZeta, CompletedEtaK };
  Kind kind = Kind::RiemannZeta;
  int k = 1;

  static ZetaLikeSeries zeta_k(int k) { return {Kind::ZetaK, k}; }
  static ZetaLikeSeries riemann() { return {Kind::RiemannZeta, 1}; }
  static ZetaLikeSeries completed_eta(int k) { return {Kind::CompletedEtaK, k}; }

  // boundary of absolute convergence of the defining series
  double abscissa() const { return kind == Kind::RiemannZeta ? 1.0 : k / 2.0; }
};

struct ZetaControls {
  double target = 1e-12;              // absolute tail target for direct series
  std::size_t max_terms = 2'000'000;  // truncation ceiling
};

// sum r_k(n) n^{-s}, Re s > k/2. The tail past N is written by Abel
// summation against the lattice count A(u) = V_k u^{k/2} + P(u); the volume
// part and the boundary value P(N) are added exactly, and the remaining
// integral of P is bounded with |P(u)| <= V_k ((sqrt u + c)^k - u^{k/2}),
// c = sqrt(k)/2 (unit cubes around lattice points).
inline SpecialValue zeta_k_direct(int k, cplx s, const ZetaControls& ctl = {}) {
  const double sigma = s.real();
  if (!(sigma > k / 2.0)) fail(ErrorKind::DomainNotCovered, "zeta_k series needs Re s > k/2");
  const double vol = std::pow(pi, k / 2.0) / std::exp(std::lgamma(k / 2.0 + 1));
  const double c = std::sqrt(double(k)) / 2;
  const double excess = sigma - (k - 1) / 2.0;
  auto remainder = [&](double N) {
    return std::abs(s) * vol * k * c * std::pow(1 + c / std::sqrt(N), k - 1) *
           std::pow(N, -excess) / excess;
  };
  std::size_t hi = 16;
  while (hi < ctl.max_terms && remainder(double(hi)) > ctl.target) hi *= 2;
  hi = std::min(hi, ctl.max_terms);
  std::size_t lo = hi / 2;
  while (lo + 1 < hi) {
    std::size_t mid = (lo + hi) / 2;
    (remainder(double(mid)) > ctl.target ? lo : hi) = mid;
  }
  const std::size_t N = hi;
  auto r = SquaresTable::instance().prefix(k, N + 1);
  CompensatedSum<cplx> sum;
  double count = 0;  // A(N), origin included
  for (auto v : r) count += double(v);
  for (std::size_t n = N; n >= 1; --n) {
    if (r[n] == 0) continue;
    sum.add(double(r[n]) * std::exp(-s * std::log(double(n))));
  }
  const double dN = double(N);
  const double boundary = count - vol * std::pow(dN, k / 2.0);
  cplx n_pow = std::exp(-s * std::log(dN));
  cplx main = vol * (k / 2.0) * std::pow(dN, k / 2.0) * n_pow / (s - k / 2.0) - boundary * n_pow;
  sum.add(main);
  double rounding = sum.rounding_bound(N) + 4 * eps * (1 + std::abs(s) * std::log(dN + 1)) * sum.abs_total();
  return {sum.value(), remainder(dN) + rounding};
}

enum class EtaPath { Auto, Direct, Reflected, Continued };

// eta_k(s) = pi^{-s} Gamma(s) zeta_k(s), satisfying eta_k(s) = eta_k(k/2 - s).
//   Direct:    series at s (Re s > k/2)
//   Reflected: series at k/2 - s (Re s < 0)
//   Continued: k = 1 only, through 2 zeta(2s)
inline SpecialValue completed_eta(int k, cplx s, EtaPath path = EtaPath::Auto, const ZetaControls& ctl = {}) {
  if (path == EtaPath::Auto) {
    if (k == 1)
      path = EtaPath::Continued;
    else if (s.real() > k / 2.0)
      path = EtaPath::Direct;
    else if (s.real() < 0)
      path = EtaPath::Reflected;
    else
      fail(ErrorKind::DomainNotCovered, "eta_k(s) inside the critical strip 0 <= Re s <= k/2");
  }
  if (path == EtaPath::Reflected) return completed_eta(k, k / 2.0 - s, EtaPath::Direct, ctl);
  auto g = specfun::gamma(s);
  SpecialValue z;
  if (path == EtaPath::Continued) {
    if (k != 1) fail(ErrorKind::DomainNotCovered, "continuation is only available for k = 1");
    auto rz = riemann_zeta(2.0 * s);
    z = {2.0 * rz.value, 2.0 * rz.abs_error_bound};
  } else {
    z = zeta_k_direct(k, s, ctl);
  }
  cplx p = std::exp(-s * std::log(pi));
  cplx value = p * g.value * z.value;
  double err = std::abs(p) * (std::abs(g.value) * z.abs_error_bound + g.abs_error_bound * std::abs(z.value)) +
               std::abs(value) * eps * (4 + 2 * std::abs(s) * std::log(pi));
  return {value, err};
}

inline SpecialValue zeta_like(const ZetaLikeSeries& series, cplx s, const ZetaControls& ctl = {}) {
  switch (series.kind) {
    case ZetaLikeSeries::Kind::RiemannZeta:
      return riemann_zeta(s);
    case ZetaLikeSeries::Kind::ZetaK:
      if (series.k == 1) {
        auto z = riemann_zeta(2.0 * s);
        return {2.0 * z.value, 2.0 * z.abs_error_bound};
      }
      return zeta_k_direct(series.k, s, ctl);
    case ZetaLikeSeries::Kind::CompletedEtaK:
      return completed_eta(series.k, s, EtaPath::Auto, ctl);
  }
  fail(ErrorKind::DomainError, "unknown zeta-like series");
}

}  // namespace popov::arith
