#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "arith.hpp"
#include "core.hpp"
#include "specfun.hpp"

namespace popov::series {

using arith::ArithmeticSequence;

// Truncation ceiling shared by every series evaluation. Seeded from
// POPOV_VERIFY_MAX_TERMS when set.
inline std::atomic<std::size_t>& max_terms_setting() {
  static std::atomic<std::size_t> v = [] {
    std::size_t n = 2'000'000;
    if (const char* env = std::getenv("POPOV_VERIFY_MAX_TERMS")) {
      char* end = nullptr;
      unsigned long long parsed = std::strtoull(env, &end, 10);
      if (end != env && *end == '\0' && parsed > 0) n = parsed;
    }
    return n;
  }();
  return v;
}
inline std::size_t default_max_terms() { return max_terms_setting().load(); }

// lambda_n = coef * n^degree
struct IndexMap {
  double coef = 1.0;
  int degree = 1;

  static IndexMap identity() { return {1.0, 1}; }
  static IndexMap square() { return {1.0, 2}; }
  static IndexMap scaled_square(double c) { return {c, 2}; }
  double operator()(std::uint64_t n) const {
    double d = static_cast<double>(n);
    return degree == 1 ? coef * d : coef * d * d;
  }
};

// One factor F(scale * lambda^arg_power) of a series term.
struct Oscillator {
  enum class Kind { J, I, K, Cos, Sin, Exp, RegularizedJ, RegularizedI, Humbert };
  Kind kind = Kind::Exp;
  cplx order{};
  cplx scale{};
  double arg_power = 1.0;  // 1 or 1/2
  // Humbert Phi_3(b; c; w, scale * lambda)
  cplx b{}, c{}, w{};

  static Oscillator bessel_j(double nu, double scale, double arg_power = 1.0) {
    return {Kind::J, nu, scale, arg_power};
  }
  static Oscillator bessel_i(double nu, double scale, double arg_power = 1.0) {
    return {Kind::I, nu, scale, arg_power};
  }
  static Oscillator bessel_k(cplx nu, double scale, double arg_power = 1.0) {
    return {Kind::K, nu, scale, arg_power};
  }
  static Oscillator cos(cplx scale, double arg_power = 1.0) { return {Kind::Cos, 0.0, scale, arg_power}; }
  static Oscillator sin(cplx scale, double arg_power = 1.0) { return {Kind::Sin, 0.0, scale, arg_power}; }
  static Oscillator exp(cplx scale, double arg_power = 1.0) { return {Kind::Exp, 0.0, scale, arg_power}; }
  // Gamma(nu+1) (w/2)^{-nu} J_nu(w) and its I counterpart, entire in w
  static Oscillator regularized_j(double nu, cplx scale, double arg_power = 1.0) {
    return {Kind::RegularizedJ, nu, scale, arg_power};
  }
  static Oscillator regularized_i(double nu, cplx scale, double arg_power = 1.0) {
    return {Kind::RegularizedI, nu, scale, arg_power};
  }
  static Oscillator humbert(cplx b, cplx c, cplx w, cplx scale) {
    Oscillator o{Kind::Humbert, 0.0, scale, 1.0};
    o.b = b;
    o.c = c;
    o.w = w;
    return o;
  }
};

struct BesselSeriesSpec {
  ArithmeticSequence weights = ArithmeticSequence::one();
  cplx power{};       // factor n^power
  double decay = 0;   // factor e^{-decay * lambda_n}
  std::vector<Oscillator> oscillators;
  IndexMap index = IndexMap::identity();
  std::uint64_t first = 1;
};

// Each oscillator contributes value * e^{log_scale}; value carries `error`.
struct ScaledValue {
  cplx value{};
  double log_scale = 0;
  double error = 0;
};

// log |F(lambda)| <= log_coef + lam_power log(lambda) + lin lambda + sq sqrt(lambda)
// for all lambda >= the lambda_min it was built for.
struct Majorant {
  double log_coef = 0;
  double lam_power = 0;
  double lin = 0;
  double sq = 0;
};

namespace detail {

inline void validate_oscillator(const Oscillator& o) {
  using K = Oscillator::Kind;
  if (o.arg_power != 1.0 && o.arg_power != 0.5)
    fail(ErrorKind::InvalidSpec, "oscillator argument power must be 1 or 1/2");
  switch (o.kind) {
    case K::J:
    case K::I:
      if (o.order.imag() != 0 || o.order.real() < -0.5)
        fail(ErrorKind::InvalidSpec, "J/I oscillators need real order >= -1/2");
      if (o.scale.imag() != 0 || o.scale.real() < 0)
        fail(ErrorKind::InvalidSpec, "J/I oscillators need a real nonnegative scale");
      break;
    case K::K:
      if (o.scale.imag() != 0 || !(o.scale.real() > 0))
        fail(ErrorKind::InvalidSpec, "K oscillator needs a real positive scale");
      break;
    case K::RegularizedJ:
    case K::RegularizedI:
      if (o.order.imag() != 0 || o.order.real() < -0.5)
        fail(ErrorKind::InvalidSpec, "regularized oscillators need real order >= -1/2");
      break;
    case K::Humbert:
      if (!(o.c.real() > 0)) fail(ErrorKind::InvalidSpec, "Humbert oscillator needs Re c > 0");
      break;
    default:
      break;
  }
}

inline ScaledValue evaluate(const Oscillator& o, double lambda) {
  using K = Oscillator::Kind;
  const double m = o.arg_power == 1.0 ? lambda : std::sqrt(lambda);
  const cplx w = o.scale * m;
  switch (o.kind) {
    case K::J: {
      auto v = specfun::bessel_j(o.order.real(), w.real());
      return {v.value, 0.0, v.abs_error_bound};
    }
    case K::I: {
      auto v = specfun::bessel_i_scaled(o.order.real(), w.real());
      return {v.value, w.real(), v.abs_error_bound};
    }
    case K::K: {
      auto v = specfun::bessel_k_scaled(o.order, w.real());
      return {v.value, -w.real(), v.abs_error_bound};
    }
    case K::Cos:
    case K::Sin: {
      double s = std::abs(w.imag());
      cplx ep = std::exp(cplx(0, 1) * w - s), em = std::exp(-cplx(0, 1) * w - s);
      cplx v = o.kind == K::Cos ? 0.5 * (ep + em) : (ep - em) / cplx(0, 2);
      return {v, s, 4 * eps * (2.0 + std::abs(w))};
    }
    case K::Exp:
      return {std::exp(cplx(0, w.imag())), w.real(), 2 * eps * (1.0 + std::abs(w))};
    case K::RegularizedJ:
    case K::RegularizedI: {
      cplx z = (o.kind == K::RegularizedJ ? -0.25 : 0.25) * w * w;
      if (z.imag() == 0 && std::abs(w) > 25) {
        // real 0F1 argument: go through J or scaled I, where the ascending series would cancel
        const double nu = o.order.real(), t = 2 * std::sqrt(std::abs(z.real()));
        const double factor = std::exp(std::lgamma(nu + 1) - nu * std::log(t / 2));
        const double rel = 8 * eps * (1 + std::abs(nu) * std::log(t));
        if (z.real() < 0) {
          auto v = specfun::bessel_j(nu, t);
          return {factor * v.value, 0.0, factor * (v.abs_error_bound + rel * std::abs(v.value))};
        }
        auto v = specfun::bessel_i_scaled(nu, t);
        return {factor * v.value, t, factor * (v.abs_error_bound + rel * std::abs(v.value))};
      }
      if (std::abs(w) > 600) fail(ErrorKind::RangeExceeded, "regularized Bessel argument too large");
      auto v = specfun::hyp0f1(o.order + 1.0, z);
      return {v.value, 0.0, v.abs_error_bound + 4 * eps * std::abs(v.value) * (1 + std::abs(w))};
    }
    case K::Humbert: {
      auto v = specfun::humbert_phi3(o.b, o.c, o.w, w);
      return {v.value, 0.0, v.abs_error_bound};
    }
  }
  return {};
}

inline Majorant majorant(const Oscillator& o, double lambda_min) {
  using K = Oscillator::Kind;
  Majorant m;
  const double e = o.arg_power;
  auto add_growth = [&](double rate) {  // factor e^{rate * lambda^e}
    if (e == 1.0)
      m.lin += rate;
    else
      m.sq += rate;
  };
  const double beta = std::abs(o.scale);
  switch (o.kind) {
    case K::J: {
      double nu = o.order.real();
      // |J_nu(t)| <= 1 for nu >= 0 and <= (t/2)^nu / Gamma(nu+1) for nu >= -1/2
      if (nu < 0 && beta > 0) {
        m.log_coef = nu * std::log(beta / 2) - std::lgamma(nu + 1);
        m.lam_power = nu * e;
      }
      break;
    }
    case K::I: {
      // I_nu(t) <= (t/2)^nu e^t / Gamma(nu+1)
      double nu = o.order.real();
      if (beta == 0) break;
      m.log_coef = nu * std::log(beta / 2) - std::lgamma(nu + 1);
      m.lam_power = nu * e;
      add_growth(beta);
      break;
    }
    case K::K: {
      // |K_nu(t)| <= K_{|Re nu|}(t) <= e^{-t} sqrt(2 pi / t) e^{(Re nu)^2 / (2t)}
      double mu = std::abs(o.order.real());
      double tmin = beta * std::pow(lambda_min, e);
      m.log_coef = 0.5 * std::log(2 * pi / beta) + mu * mu / (2 * tmin);
      m.lam_power = -e / 2;
      add_growth(-beta);
      break;
    }
    case K::Cos:
    case K::Sin:
      add_growth(std::abs(o.scale.imag()));
      break;
    case K::Exp:
      add_growth(o.scale.real());
      break;
    case K::RegularizedJ:
      // |Gamma(nu+1)(w/2)^{-nu} J_nu(w)| <= 1 on the real line, <= e^{|w|} otherwise
      if (o.scale.imag() != 0) add_growth(beta);
      break;
    case K::RegularizedI:
      add_growth(beta);
      break;
    case K::Humbert: {
      // Phi_3 <= 2^{ceil|b|} / min(1, Re c) * e^{3 sqrt(2 (|w| + scale lambda))}
      m.log_coef = std::ceil(std::abs(o.b)) * std::log(2.0) - std::log(std::min(1.0, o.c.real())) +
                   3 * std::sqrt(2 * std::abs(o.w));
      m.sq += 3 * std::sqrt(2 * beta);
      break;
    }
  }
  return m;
}

// Weight access for the generic engine.
struct Weights {
  std::function<cplx(std::uint64_t)> value;
  arith::Growth growth;
};

struct Engine {
  Weights weights;
  cplx power{};
  double decay = 0;
  std::vector<Oscillator> oscillators;
  IndexMap index;
  std::uint64_t first = 1;

  void validate() const {
    if (decay < 0 || !std::isfinite(decay)) fail(ErrorKind::InvalidSpec, "decay must be finite and >= 0");
    if (index.coef <= 0 || (index.degree != 1 && index.degree != 2))
      fail(ErrorKind::InvalidSpec, "index map must be c n or c n^2 with c > 0");
    for (const auto& o : oscillators) validate_oscillator(o);
    // the term majorant must decay
    auto s = shape(std::max<std::uint64_t>(first, 1));
    bool decays = s.A > 0 || (s.A == 0 && s.Bq < 0);
    if (!decays) fail(ErrorKind::InvalidSpec, "series terms do not decay (e.g. I oscillator needs decay > scale)");
  }

  // log B(u) = logc + npow log u - A c u^d + Bq sqrt(c) u^{d/2}
  struct Shape {
    double logc, npow, A, Bq;
  };
  Shape shape(std::uint64_t n_min) const {
    double lam_min = index(n_min);
    double logc = std::log(weights.growth.coef);
    double npow = weights.growth.power + power.real();
    double A = decay, Bq = 0;
    for (const auto& o : oscillators) {
      Majorant m = majorant(o, lam_min);
      logc += m.log_coef + m.lam_power * std::log(index.coef);
      npow += index.degree * m.lam_power;
      A -= m.lin;
      Bq += m.sq;
    }
    return {logc, npow, A, Bq};
  }

  // Bound on sum_{n > N} |term_n|.
  double tail_after(std::uint64_t N) const {
    const double M = static_cast<double>(N + 1);
    const Shape s = shape(N + 1);
    const double c = index.coef;
    const int d = index.degree;
    auto h = [&](double u) {
      return s.logc + s.npow * std::log(u) - s.A * c * std::pow(u, d) + s.Bq * std::sqrt(c) * std::pow(u, d / 2.0);
    };
    const double gp = std::max(s.npow, 0.0);
    if (s.A > 0 || d == 2) {
      // sup of h' on [M, inf) bounds every ratio B(n+1)/B(n), n >= M
      double D = gp / M - s.A * c * d * std::pow(M, d - 1);
      if (s.Bq > 0)
        D += s.Bq * std::sqrt(c) * (d / 2.0) * std::pow(M, d / 2.0 - 1);
      else if (d == 2)
        D += s.Bq * std::sqrt(c);
      if (!(D < 0)) return INFINITY;
      return std::exp(h(M)) / (-std::expm1(D));
    }
    if (s.A == 0 && s.Bq < 0) {
      // pure e^{-b sqrt(u)} decay: B(M) plus the integral from M, once B decreases
      double b = -s.Bq * std::sqrt(c);
      if (!(std::sqrt(M) > 2 * gp / b)) return INFINITY;
      double a = 2 * s.npow + 2, x = b * std::sqrt(M);
      double inc;  // Gamma(a, x)
      if (a <= 1)
        inc = std::exp((a - 1) * std::log(x) - x);
      else if (x > a - 1)
        inc = std::exp((a - 1) * std::log(x) - x) * x / (x - (a - 1));
      else
        return INFINITY;
      return std::exp(h(M)) + std::exp(s.logc) * 2 * std::pow(b, -a) * inc;
    }
    return INFINITY;
  }

  std::uint64_t choose_truncation(double tol, std::size_t max_terms) const {
    std::uint64_t lo = first > 0 ? first - 1 : 0;
    if (tail_after(lo) <= tol) return lo;
    std::uint64_t hi = std::max<std::uint64_t>(lo + 1, 2);
    while (tail_after(hi) > tol) {
      if (hi >= max_terms)
        fail(ErrorKind::TolUnreachable, "tail bound stays above tol within the truncation ceiling");
      lo = hi;
      hi = std::min<std::uint64_t>(2 * hi, max_terms);
    }
    while (lo + 1 < hi) {
      std::uint64_t mid = lo + (hi - lo) / 2;
      (tail_after(mid) > tol ? lo : hi) = mid;
    }
    return hi;
  }

  // sum_{first <= n <= N} with kernel error accounting; tail not included.
  ValueWithBound partial(std::uint64_t N, bool reverse = false) const {
    CompensatedSum<cplx> sum;
    double kernel_err = 0;
    std::size_t count = 0;
    auto add = [&](std::uint64_t n) {
      cplx a = weights.value(n);
      if (a == 0.0) return;
      double lam = index(n);
      double ln = std::log(static_cast<double>(n));
      double log_scale = -decay * lam;
      cplx prod = 1.0;
      std::vector<ScaledValue> parts;
      parts.reserve(oscillators.size());
      for (const auto& o : oscillators) {
        parts.push_back(evaluate(o, lam));
        log_scale += parts.back().log_scale;
        prod *= parts.back().value;
      }
      cplx np = std::exp(power * ln);
      double mag = std::exp(log_scale);
      cplx term = a * np * prod * mag;
      sum.add(term);
      ++count;
      // kernel errors: err_j times the other factors' magnitudes
      double amp = std::abs(a * np) * mag;
      for (std::size_t j = 0; j < parts.size(); ++j) {
        double others = 1;
        for (std::size_t i = 0; i < parts.size(); ++i)
          if (i != j) others *= std::abs(parts[i].value) + parts[i].error;
        kernel_err += amp * parts[j].error * others;
      }
      kernel_err += std::abs(term) * eps * (6.0 + 2 * std::abs(power) * ln + 2 * std::abs(log_scale));
    };
    if (!reverse) {
      for (std::uint64_t n = first; n <= N; ++n) add(n);
    } else {
      for (std::uint64_t n = N; n >= first && n > 0; --n) add(n);
    }
    return {sum.value(), kernel_err + sum.rounding_bound(count), static_cast<std::size_t>(N >= first ? N - first + 1 : 0)};
  }
};

inline Engine engine_for(const BesselSeriesSpec& spec) {
  Engine e;
  auto w = spec.weights;
  e.weights = {[w](std::uint64_t n) { return w(n); }, spec.weights.growth()};
  e.power = spec.power;
  e.decay = spec.decay;
  e.oscillators = spec.oscillators;
  e.index = spec.index;
  e.first = spec.first;
  e.validate();
  return e;
}

}  // namespace detail

// Truncation is chosen a priori from the term majorant so that the
// remainder is below tol; tail_bound adds the kernel and rounding errors of
// the kept terms.
inline ValueWithBound eval_series(const BesselSeriesSpec& spec, double tol,
                                  std::size_t max_terms = default_max_terms()) {
  if (!(tol > 0)) fail(ErrorKind::InvalidSpec, "tol must be positive");
  auto e = detail::engine_for(spec);
  std::uint64_t N = e.choose_truncation(tol, max_terms);
  auto part = e.partial(N);
  part.tail_bound += e.tail_after(N);
  return part;
}

// Same series cut at a given N (for refinement checks).
inline ValueWithBound eval_series_at(const BesselSeriesSpec& spec, std::uint64_t N, bool reverse = false) {
  auto e = detail::engine_for(spec);
  auto part = e.partial(N, reverse);
  part.tail_bound += e.tail_after(N);
  return part;
}

inline double series_tail_bound(const BesselSeriesSpec& spec, std::uint64_t N) {
  return detail::engine_for(spec).tail_after(N);
}

// ---------------------------------------------------------------------------
// Double series sum_{m,n >= 1} a(m) b(n) (m/n)^{ratio_power} (mn)^{product_power}
//   * prod F_j(mn), evaluated by grouping the pairs by N = mn.

struct DoubleSeriesSpec {
  ArithmeticSequence outer = ArithmeticSequence::one();
  ArithmeticSequence inner = ArithmeticSequence::one();
  cplx ratio_power{};
  cplx product_power{};
  std::vector<Oscillator> oscillators;  // arguments are scale * N^arg_power
};

namespace detail {

// c_N = sum_{de = N} a(d) b(e) (d/e)^p, with each unordered divisor pair
// combined so that p -> -p (and a <-> b) only swaps two addends.
inline cplx grouped_coefficient(const DoubleSeriesSpec& s, std::uint64_t N) {
  CompensatedSum<cplx> acc;
  for (std::uint64_t d = 1; d * d <= N; ++d) {
    if (N % d) continue;
    std::uint64_t e = N / d;
    double L = std::log(double(d)) - std::log(double(e));
    cplx up = std::exp(s.ratio_power * L), down = std::exp(s.ratio_power * (-L));
    if (d == e) {
      acc.add(s.outer(d) * s.inner(e) * up);
    } else {
      acc.add(s.outer(d) * s.inner(e) * up + s.outer(e) * s.inner(d) * down);
    }
  }
  return acc.value();
}

inline std::size_t pairs_up_to(std::uint64_t N) {
  std::size_t c = 0;
  for (std::uint64_t n = 1; n <= N; ++n) c += arith::divisors(n).size();
  return c;
}

inline Engine engine_for(const DoubleSeriesSpec& spec) {
  Engine e;
  auto ga = spec.outer.growth(), gb = spec.inner.growth();
  // |c_N| <= d(N) C_a C_b N^{max(ga, gb) + |Re p|}, d(N) <= 2 sqrt(N)
  arith::Growth g{2 * ga.coef * gb.coef, std::max(ga.power, gb.power) + std::abs(spec.ratio_power.real()) + 0.5};
  e.weights = {[spec](std::uint64_t n) { return grouped_coefficient(spec, n); }, g};
  e.power = spec.product_power;
  e.oscillators = spec.oscillators;
  e.index = IndexMap::identity();
  e.first = 1;
  e.validate();
  return e;
}

}  // namespace detail

// terms_used counts the (m, n) pairs with mn <= N.
inline ValueWithBound eval_double_series(const DoubleSeriesSpec& spec, double tol,
                                         std::size_t max_terms = default_max_terms()) {
  if (!(tol > 0)) fail(ErrorKind::InvalidSpec, "tol must be positive");
  auto e = detail::engine_for(spec);
  std::uint64_t N = e.choose_truncation(tol, max_terms);
  auto part = e.partial(N);
  part.tail_bound += e.tail_after(N);
  part.terms_used = detail::pairs_up_to(N);
  return part;
}

inline ValueWithBound eval_double_series_at(const DoubleSeriesSpec& spec, std::uint64_t N) {
  auto e = detail::engine_for(spec);
  auto part = e.partial(N);
  part.tail_bound += e.tail_after(N);
  part.terms_used = detail::pairs_up_to(N);
  return part;
}

// ---------------------------------------------------------------------------
// Riesz sums of r_k.

// (1/Gamma(q+1)) sum'_{0 <= n <= x} r_k(n) (x - n)^q, where the term n = x is
// halved when x is an integer (it only matters for q = 0).
inline ValueWithBound riesz_sum(int k, double q, double x) {
  if (k < 1 || q < 0 || x < 0) fail(ErrorKind::InvalidSpec, "riesz_sum needs k >= 1, q >= 0, x >= 0");
  CompensatedSum<double> s;
  const auto top = static_cast<std::uint64_t>(std::floor(x));
  for (std::uint64_t n = 0; n <= top; ++n) {
    double r = double(arith::r_k(k, n));
    if (r == 0) continue;
    double gap = x - double(n);
    double w = gap == 0.0 ? (q == 0 ? 0.5 : 0.0) : std::pow(gap, q);
    s.add(r * w);
  }
  double g = std::exp(std::lgamma(q + 1));
  double v = s.value() / g;
  return {v, std::abs(v) * eps * (8 + 2 * q * std::log(x + 2)) + s.rounding_bound(top + 1) / g,
          static_cast<std::size_t>(top + 1)};
}

// pi^{k/2} x^{k/2+q} / Gamma(q+1+k/2) + pi^{-q} sum_{n>=1} r_k(n) (x/n)^{k/4+q/2} J_{k/2+q}(2 pi sqrt(nx)),
// convergent for q > (k-1)/2. The tail uses the large-argument envelope of
// J and Abel summation against the lattice count.
inline ValueWithBound riesz_dual(int k, double q, double x, double tol,
                                 std::size_t max_terms = default_max_terms()) {
  if (k < 1 || !(x > 0)) fail(ErrorKind::InvalidSpec, "riesz_dual needs k >= 1, x > 0");
  if (!(q > (k - 1) / 2.0)) fail(ErrorKind::DomainNotCovered, "the dual Riesz series needs q > (k-1)/2");
  const double nu = k / 2.0 + q;
  const double a = k / 4.0 + q / 2.0;
  const double pq = std::pow(pi, -q);

  // |J_nu(t)| <= sqrt(2/(pi t)) E(t0) for t >= t0, E from the certified
  // Hankel remainders (nonincreasing in t)
  auto envelope = [&](double t0) {
    const double mu = 4 * nu * nu;
    int l = std::max(1, static_cast<int>(std::ceil(nu / 2 - 0.25)));
    double term = 1.0, sum = 0;
    for (int j = 0; j <= 2 * l + 1; ++j) {
      if (j > 0) term *= std::abs(mu - (2.0 * j - 1) * (2.0 * j - 1)) / (8.0 * j * t0);
      sum += term;
    }
    return sum;
  };
  const double vol = std::pow(pi, k / 2.0) / std::exp(std::lgamma(k / 2.0 + 1));
  const double c = std::sqrt(double(k)) / 2;
  const double p = a + 0.25;  // |term| <= C' n^{-p}

  ValueWithBound out;
  out.value = std::pow(pi, k / 2.0) * std::pow(x, k / 2.0 + q) / std::exp(std::lgamma(q + 1 + k / 2.0));
  out.tail_bound = std::abs(out.value) * eps * (8 + (k / 2.0 + q) * std::abs(std::log(x)));

  if (k == 1) {
    // r_1 lives on squares: sum over m of 2 (x/m^2)^a J_nu(2 pi m sqrt x)
    const double sx = std::sqrt(x);
    auto tail = [&](double M) {  // sum_{m > M} 2 C' m^{-2p} <= 2 C' M^{1-2p}/(2p-1)
      double t0 = 2 * pi * (M + 1) * sx;
      double Cp = envelope(t0) * std::pow(x, a) / (pi * std::sqrt(sx));
      return pq * 2 * Cp * std::pow(M, 1 - 2 * p) / (2 * p - 1);
    };
    std::uint64_t M = 1;
    while (tail(double(M)) > tol) {
      if (M > max_terms) fail(ErrorKind::TolUnreachable, "dual Riesz series needs more terms than allowed");
      M *= 2;
    }
    std::uint64_t lo = M / 2;
    while (lo + 1 < M) {
      std::uint64_t mid = (lo + M) / 2;
      (tail(double(mid)) > tol ? lo : M) = mid;
    }
    CompensatedSum<double> s;
    double kerr = 0;
    for (std::uint64_t m = M; m >= 1; --m) {
      double md = double(m);
      auto j = specfun::bessel_j(nu, 2 * pi * md * sx);
      double f = 2 * std::pow(x / (md * md), a);
      s.add(f * j.value.real());
      kerr += f * j.abs_error_bound + std::abs(f * j.value.real()) * 4 * eps;
    }
    out.value += pq * s.value();
    out.tail_bound += pq * (kerr + s.rounding_bound(M)) + tail(double(M));
    out.terms_used = M;
    return out;
  }

  // Abel summation: sum_{n>N} r_k(n) n^{-p} = V (k/2) N^{k/2-p}/(p-k/2) - P(N) N^{-p} + int P(-f'),
  // |int P(-f')| <= V k c (1 + c/sqrt N)^{k-1} p N^{(k-1)/2-p} / (p-(k-1)/2).
  auto tail_with_count = [&](double N, double count) {
    double t0 = 2 * pi * std::sqrt((N + 1) * x);
    double Cp = envelope(t0) * std::pow(x, a) / (pi * std::pow(x, 0.25));
    double boundary = count - vol * std::pow(N, k / 2.0);
    double main = vol * (k / 2.0) * std::pow(N, k / 2.0 - p) / (p - k / 2.0) - boundary * std::pow(N, -p);
    double rest = vol * k * c * std::pow(1 + c / std::sqrt(N), k - 1) * p * std::pow(N, (k - 1) / 2.0 - p) /
                  (p - (k - 1) / 2.0);
    return pq * Cp * (std::max(main, 0.0) + rest);
  };
  // count upper bound for the a-priori choice; exact count once the table exists
  auto tail_apriori = [&](double N) {
    double count_lo = vol * std::pow(std::max(std::sqrt(N) - c, 0.0), k);
    return tail_with_count(N, count_lo);
  };
  std::uint64_t N = 16;
  while (tail_apriori(double(N)) > tol) {
    if (N >= max_terms) fail(ErrorKind::TolUnreachable, "dual Riesz series needs more terms than allowed");
    N = std::min<std::uint64_t>(2 * N, max_terms);
  }
  std::uint64_t lo = N / 2;
  while (lo + 1 < N) {
    std::uint64_t mid = (lo + N) / 2;
    (tail_apriori(double(mid)) > tol ? lo : N) = mid;
  }
  auto r = arith::SquaresTable::instance().prefix(k, N + 1);
  double count = 0;
  for (auto v : r) count += double(v);
  CompensatedSum<double> s;
  double kerr = 0;
  for (std::uint64_t n = N; n >= 1; --n) {
    if (r[n] == 0) continue;
    double nd = double(n);
    auto j = specfun::bessel_j(nu, 2 * pi * std::sqrt(nd * x));
    double f = double(r[n]) * std::pow(x / nd, a);
    s.add(f * j.value.real());
    kerr += f * j.abs_error_bound + std::abs(f * j.value.real()) * 4 * eps;
  }
  out.value += pq * s.value();
  out.tail_bound += pq * (kerr + s.rounding_bound(N)) + tail_with_count(double(N), count);
  out.terms_used = N;
  return out;
}

}  // namespace popov::series
