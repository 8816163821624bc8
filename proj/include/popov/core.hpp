#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace popov {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double eps = std::numeric_limits<double>::epsilon();

enum class ErrorKind {
  DomainError,
  PoleAt,
  RangeExceeded,
  NoConvergence,
  HorizonOverflow,
  InvalidCharacter,
  InvalidSpec,
  DomainNotCovered,
  TolUnreachable,
  FailedToFindTau0,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::PoleAt: return "PoleAt";
    case ErrorKind::RangeExceeded: return "RangeExceeded";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::HorizonOverflow: return "HorizonOverflow";
    case ErrorKind::InvalidCharacter: return "InvalidCharacter";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::DomainNotCovered: return "DomainNotCovered";
    case ErrorKind::TolUnreachable: return "TolUnreachable";
    case ErrorKind::FailedToFindTau0: return "FailedToFindTau0";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

// A computed value together with an upper bound on its absolute error.
struct SpecialValue {
  cplx value{};
  double abs_error_bound = 0.0;
};

// Truncated series: tail_bound covers the truncation remainder plus the
// accumulated kernel and rounding error of the retained terms.
struct ValueWithBound {
  cplx value{};
  double tail_bound = 0.0;
  std::size_t terms_used = 0;
};

inline ValueWithBound operator-(const ValueWithBound& a, const ValueWithBound& b) {
  return {a.value - b.value, a.tail_bound + b.tail_bound, a.terms_used + b.terms_used};
}
inline ValueWithBound operator+(const ValueWithBound& a, const ValueWithBound& b) {
  return {a.value + b.value, a.tail_bound + b.tail_bound, a.terms_used + b.terms_used};
}
// Scaling by an exactly known factor; `rel` is the relative error of the factor itself.
inline ValueWithBound scaled(const ValueWithBound& a, cplx factor, double rel = 4 * eps) {
  return {a.value * factor, a.tail_bound * std::abs(factor) + std::abs(a.value * factor) * rel,
          a.terms_used};
}

// Neumaier summation, with a running sum of magnitudes for rounding bounds.
template <class T>
class CompensatedSum {
 public:
  void add(T x) {
    add_real(sum_re_, comp_re_, re(x));
    if constexpr (is_complex) add_real(sum_im_, comp_im_, im(x));
    abs_total_ += std::abs(x);
  }
  T value() const {
    if constexpr (is_complex)
      return T(sum_re_ + comp_re_, sum_im_ + comp_im_);
    else
      return sum_re_ + comp_re_;
  }
  double abs_total() const { return abs_total_; }
  // Rounding bound for the compensated sum itself.
  double rounding_bound(std::size_t n) const {
    return 2 * eps * std::abs(value()) + 4 * static_cast<double>(n) * eps * eps * abs_total_;
  }

 private:
  static constexpr bool is_complex = !std::is_floating_point_v<T>;
  static double re(T x) {
    if constexpr (is_complex) return x.real(); else return x;
  }
  static double im(T x) {
    if constexpr (is_complex) return x.imag(); else return 0.0;
  }
  static void add_real(double& s, double& c, double x) {
    double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  double sum_re_ = 0, comp_re_ = 0, sum_im_ = 0, comp_im_ = 0, abs_total_ = 0;
};

// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2. Only the operations the
// Bessel ascending series needs.
struct DoubleDouble {
  double hi = 0, lo = 0;

  constexpr DoubleDouble() = default;
  constexpr DoubleDouble(double h) : hi(h) {}
  constexpr DoubleDouble(double h, double l) : hi(h), lo(l) {}

  static DoubleDouble two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
  }
  static DoubleDouble quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
  }
  static DoubleDouble two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
  }

  friend DoubleDouble operator+(DoubleDouble a, DoubleDouble b) {
    DoubleDouble s = two_sum(a.hi, b.hi);
    DoubleDouble t = two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return quick_two_sum(s.hi, s.lo);
  }
  friend DoubleDouble operator-(DoubleDouble a) { return {-a.hi, -a.lo}; }
  friend DoubleDouble operator-(DoubleDouble a, DoubleDouble b) { return a + (-b); }
  friend DoubleDouble operator*(DoubleDouble a, DoubleDouble b) {
    DoubleDouble p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
  }
  friend DoubleDouble operator/(DoubleDouble a, DoubleDouble b) {
    double q1 = a.hi / b.hi;
    DoubleDouble r = a - b * DoubleDouble(q1);
    double q2 = r.hi / b.hi;
    r = r - b * DoubleDouble(q2);
    double q3 = r.hi / b.hi;
    return quick_two_sum(q1, q2) + DoubleDouble(q3);
  }
  DoubleDouble& operator+=(DoubleDouble b) { return *this = *this + b; }
  DoubleDouble& operator*=(DoubleDouble b) { return *this = *this * b; }
  explicit operator double() const { return hi + lo; }
};

inline constexpr double dd_eps = 4.93038065763132e-32;  // 2^-104

inline bool is_nonpositive_integer(double x) { return x <= 0 && x == std::floor(x); }

inline bool near_integer(cplx z, double tol = 1e-12) {
  return std::abs(z.imag()) <= tol && std::abs(z.real() - std::round(z.real())) <= tol;
}

}  // namespace popov
