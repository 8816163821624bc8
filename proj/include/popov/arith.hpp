#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "core.hpp"

namespace popov::arith {

using Rational = boost::multiprecision::cpp_rational;

// ---------------------------------------------------------------------------
// r_k(n): representations as ordered sums of k squares, signs counted.
//
// Tables are built by repeated sparse convolution with r_1 and kept for the
// life of the process. Growing a table never changes an entry already handed
// out, since every entry is an exact integer.

class SquaresTable {
 public:
  static SquaresTable& instance() {
    static SquaresTable t;
    return t;
  }

  std::size_t max_horizon() const { return max_horizon_.load(); }
  void set_max_horizon(std::size_t h) { max_horizon_.store(h); }

  std::int64_t r(int k, std::uint64_t n) {
    if (k < 1) fail(ErrorKind::DomainError, "r_k needs k >= 1");
    if (n >= max_horizon()) fail(ErrorKind::HorizonOverflow, "r_k(n) beyond the table horizon");
    {
      std::shared_lock lock(mu_);
      auto it = tables_.find(k);
      if (it != tables_.end() && n < it->second.size()) return it->second[n];
    }
    std::unique_lock lock(mu_);
    auto& tab = tables_[k];
    if (n >= tab.size()) {
      std::size_t want = std::max<std::size_t>(n + 1, std::max<std::size_t>(1024, 2 * tab.size()));
      want = std::min(want, max_horizon());
      tab = build(k, want);
    }
    return tab[n];
  }

  // Copy of the table prefix [0, size); extends the table if needed.
  std::vector<std::int64_t> prefix(int k, std::size_t size) {
    if (size == 0) return {};
    r(k, size - 1);
    std::shared_lock lock(mu_);
    const auto& tab = tables_.at(k);
    return {tab.begin(), tab.begin() + static_cast<std::ptrdiff_t>(size)};
  }

 private:
  SquaresTable() = default;

  static std::vector<std::int64_t> build(int k, std::size_t size) {
    std::vector<std::int64_t> cur(size, 0), next(size);
    cur[0] = 1;
    // a-priori bound (2 sqrt(n) + 1)^k decides whether overflow checks are needed
    double bound = std::pow(2 * std::sqrt(double(size)) + 1, k);
    bool checked = bound > 9e18;
    for (int step = 0; step < k; ++step) {
      std::fill(next.begin(), next.end(), 0);
      for (std::size_t a = 0; a * a < size; ++a) {
        std::int64_t mult = a == 0 ? 1 : 2;
        std::size_t off = a * a;
        for (std::size_t i = 0; i + off < size; ++i) {
          if (cur[i] == 0) continue;
          if (!checked) {
            next[i + off] += mult * cur[i];
          } else {
            std::int64_t prod, sum;
            if (__builtin_mul_overflow(mult, cur[i], &prod) ||
                __builtin_add_overflow(next[i + off], prod, &sum))
              fail(ErrorKind::HorizonOverflow, "r_k value exceeds 64-bit range");
            next[i + off] = sum;
          }
        }
      }
      std::swap(cur, next);
    }
    return cur;
  }

  std::shared_mutex mu_;
  std::map<int, std::vector<std::int64_t>> tables_;
  std::atomic<std::size_t> max_horizon_{50'000'001};
};

inline std::int64_t r_k(int k, std::uint64_t n) { return SquaresTable::instance().r(k, n); }

// ---------------------------------------------------------------------------
// Divisor sums

inline std::vector<std::uint64_t> divisors(std::uint64_t n) {
  std::vector<std::uint64_t> lo, hi;
  for (std::uint64_t d = 1; d * d <= n; ++d) {
    if (n % d) continue;
    lo.push_back(d);
    if (d * d != n) hi.push_back(n / d);
  }
  lo.insert(lo.end(), hi.rbegin(), hi.rend());
  return lo;
}

// sigma_z(n) = sum_{d | n} d^z for complex z.
inline cplx sigma(cplx z, std::uint64_t n) {
  if (n == 0) fail(ErrorKind::DomainError, "sigma needs n >= 1");
  CompensatedSum<cplx> s;
  for (auto d : divisors(n)) s.add(d == 1 ? cplx(1.0) : std::exp(z * std::log(double(d))));
  return s.value();
}

// Exact sigma_k(n) for integer k >= 0.
inline std::int64_t sigma_exact(int k, std::uint64_t n) {
  if (n == 0 || k < 0) fail(ErrorKind::DomainError, "sigma_exact needs n >= 1, k >= 0");
  std::int64_t s = 0;
  for (auto d : divisors(n)) {
    std::int64_t p = 1;
    for (int i = 0; i < k; ++i)
      if (__builtin_mul_overflow(p, static_cast<std::int64_t>(d), &p))
        fail(ErrorKind::RangeExceeded, "sigma_exact overflows");
    if (__builtin_add_overflow(s, p, &s)) fail(ErrorKind::RangeExceeded, "sigma_exact overflows");
  }
  return s;
}

// ---------------------------------------------------------------------------
// Ramanujan tau from q * prod (1 - q^m)^24, computed as q * (eta^3)^8 with
// eta^3 = sum (-1)^j (2j+1) q^{j(j+1)/2}.

class TauTable {
 public:
  static constexpr std::size_t horizon = 1000;  // |tau(n)| stays inside int64

  static std::int64_t value(std::uint64_t n) {
    if (n == 0) fail(ErrorKind::DomainError, "tau needs n >= 1");
    if (n > horizon) fail(ErrorKind::HorizonOverflow, "tau(n) beyond the table horizon");
    static const std::vector<std::int64_t> table = build();
    return table[n];
  }

 private:
  static std::vector<std::int64_t> build() {
    const std::size_t N = horizon;  // coefficients of q^0..q^{N-1} of the product
    using wide = __int128;
    std::vector<wide> e3(N, 0);
    for (std::size_t j = 0; j * (j + 1) / 2 < N; ++j)
      e3[j * (j + 1) / 2] = (j % 2 ? -1 : 1) * static_cast<wide>(2 * j + 1);
    auto mul = [&](const std::vector<wide>& a, const std::vector<wide>& b) {
      std::vector<wide> c(N, 0);
      for (std::size_t i = 0; i < N; ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; i + j < N; ++j) c[i + j] += a[i] * b[j];
      }
      return c;
    };
    auto p2 = mul(e3, e3);
    auto p4 = mul(p2, p2);
    auto p8 = mul(p4, p4);
    std::vector<std::int64_t> out(N + 1, 0);
    for (std::size_t n = 1; n <= N; ++n) out[n] = static_cast<std::int64_t>(p8[n - 1]);
    return out;
  }
};

inline std::int64_t tau(std::uint64_t n) { return TauTable::value(n); }

// ---------------------------------------------------------------------------
// Bernoulli numbers B_n (B_1 = -1/2) as exact rationals.

inline Rational bernoulli(int n) {
  if (n < 0) fail(ErrorKind::DomainError, "bernoulli needs n >= 0");
  static std::mutex mu;
  static std::vector<Rational> cache{Rational(1)};
  std::lock_guard lock(mu);
  while (static_cast<int>(cache.size()) <= n) {
    // sum_{j=0}^{m} C(m+1, j) B_j = 0
    int m = static_cast<int>(cache.size());
    Rational acc = 0;
    boost::multiprecision::cpp_int binom = 1;  // C(m+1, j)
    for (int j = 0; j < m; ++j) {
      acc += Rational(binom) * cache[j];
      binom = binom * (m + 1 - j) / (j + 1);
    }
    cache.push_back(-acc / Rational(m + 1));
  }
  return cache[n];
}

inline double bernoulli_double(int n) { return static_cast<double>(bernoulli(n)); }

// ---------------------------------------------------------------------------
// Dirichlet characters as value tables.

class DirichletCharacter {
 public:
  DirichletCharacter(int modulus, std::vector<cplx> values, std::string label = "")
      : q_(modulus), values_(std::move(values)), label_(std::move(label)) {
    validate();
  }

  // Legendre symbol modulo an odd prime.
  static DirichletCharacter legendre(int p) {
    if (p < 3 || !is_prime(p)) fail(ErrorKind::InvalidCharacter, "legendre needs an odd prime");
    std::vector<cplx> v(p, 0.0);
    for (int a = 1; a < p; ++a) v[(1LL * a * a) % p] = 1.0;
    for (int a = 1; a < p; ++a)
      if (v[a] == 0.0) v[a] = -1.0;
    return {p, std::move(v), "legendre:" + std::to_string(p)};
  }

  // The character mod an odd prime q sending the primitive root g to e^{2 pi i j/(q-1)}.
  static DirichletCharacter from_generator(int q, int g, int j) {
    if (q < 3 || !is_prime(q)) fail(ErrorKind::InvalidCharacter, "from_generator needs an odd prime");
    std::vector<cplx> v(q, 0.0);
    long long x = 1;
    for (int e = 0; e < q - 1; ++e) {
      if (v[x] != 0.0) fail(ErrorKind::InvalidCharacter, "g is not a primitive root");
      double ang = 2 * pi * double((1LL * j * e) % (q - 1)) / double(q - 1);
      v[x] = std::polar(1.0, ang);
      x = (x * g) % q;
    }
    std::ostringstream label;
    label << "gen:" << q << ":" << g << ":" << j;
    return {q, std::move(v), label.str()};
  }

  static DirichletCharacter principal(int q) {
    std::vector<cplx> v(q, 0.0);
    for (int a = 0; a < q; ++a)
      if (std::gcd(a, q) == 1) v[a] = 1.0;
    return {q, std::move(v), "principal:" + std::to_string(q)};
  }

  // The nontrivial character mod 4.
  static DirichletCharacter mod4() { return {4, {0.0, 1.0, 0.0, -1.0}, "mod4"}; }

  // Parses "legendre:P", "gen:Q:G:J", "principal:Q" or "mod4".
  static DirichletCharacter parse(const std::string& spec) {
    std::vector<int> nums;
    std::string head = spec.substr(0, spec.find(':'));
    std::stringstream ss(spec.find(':') == std::string::npos ? "" : spec.substr(spec.find(':') + 1));
    std::string item;
    try {
      while (std::getline(ss, item, ':')) nums.push_back(std::stoi(item));
    } catch (const std::exception&) {
      fail(ErrorKind::InvalidCharacter, "cannot parse character '" + spec + "'");
    }
    if (head == "mod4" && nums.empty()) return mod4();
    if (head == "legendre" && nums.size() == 1) return legendre(nums[0]);
    if (head == "principal" && nums.size() == 1) return principal(nums[0]);
    if (head == "gen" && nums.size() == 3) return from_generator(nums[0], nums[1], nums[2]);
    fail(ErrorKind::InvalidCharacter, "unknown character '" + spec + "'");
  }

  int modulus() const { return q_; }
  const std::string& label() const { return label_; }
  cplx operator()(long long n) const {
    long long r = n % q_;
    if (r < 0) r += q_;
    return values_[static_cast<std::size_t>(r)];
  }
  bool is_even() const { return std::abs((*this)(-1) - 1.0) < 1e-12; }
  bool is_principal() const {
    for (int a = 0; a < q_; ++a)
      if (std::gcd(a, q_) == 1 && std::abs(values_[a] - 1.0) > 1e-12) return false;
    return true;
  }
  bool is_primitive() const {
    // not primitive iff trivial on units that are 1 mod some proper divisor d of q
    for (int d = 1; d < q_; ++d) {
      if (q_ % d) continue;
      bool trivial = true;
      for (int a = 1; a < q_ && trivial; ++a)
        if (std::gcd(a, q_) == 1 && a % d == 1 % d && std::abs(values_[a] - 1.0) > 1e-12) trivial = false;
      if (trivial) return false;
    }
    return true;
  }
  DirichletCharacter conj() const {
    std::vector<cplx> v(values_.size());
    std::transform(values_.begin(), values_.end(), v.begin(), [](cplx c) { return std::conj(c); });
    return {q_, std::move(v), label_.empty() ? "" : "conj(" + label_ + ")"};
  }
  bool is_real() const {
    return std::all_of(values_.begin(), values_.end(), [](cplx c) { return c.imag() == 0.0; });
  }

  static bool is_prime(int p) {
    if (p < 2) return false;
    for (int d = 2; d * d <= p; ++d)
      if (p % d == 0) return false;
    return true;
  }

 private:
  void validate() const {
    if (q_ < 1 || static_cast<int>(values_.size()) != q_)
      fail(ErrorKind::InvalidCharacter, "value table must have one entry per residue");
    for (int a = 0; a < q_; ++a) {
      bool unit = std::gcd(a, q_) == 1;
      double m = std::abs(values_[a]);
      if (!unit && m != 0.0) fail(ErrorKind::InvalidCharacter, "nonzero value at a non-unit");
      if (unit && std::abs(m - 1.0) > 1e-12) fail(ErrorKind::InvalidCharacter, "unit values must lie on the unit circle");
    }
    if (std::abs(values_[1 % q_] - 1.0) > 1e-12) fail(ErrorKind::InvalidCharacter, "chi(1) must be 1");
    for (int a = 1; a < q_; ++a)
      for (int b = a; b < q_; ++b)
        if (std::abs(values_[(1LL * a * b) % q_] - values_[a] * values_[b]) > 1e-12)
          fail(ErrorKind::InvalidCharacter, "value table is not multiplicative");
  }

  int q_;
  std::vector<cplx> values_;
  std::string label_;
};

// G(chi) = sum_{a mod q} chi(a) e^{2 pi i a / q}.
inline SpecialValue gauss_sum(const DirichletCharacter& chi) {
  if (chi.is_principal()) fail(ErrorKind::InvalidCharacter, "Gauss sum of the principal character");
  const int q = chi.modulus();
  CompensatedSum<cplx> s;
  for (int a = 1; a < q; ++a) {
    cplx c = chi(a);
    if (c == 0.0) continue;
    s.add(c * std::polar(1.0, 2 * pi * a / q));
  }
  return {s.value(), 4 * eps * s.abs_total()};
}

// ---------------------------------------------------------------------------
// Coefficient sequences for Bessel series.

struct Growth {
  double coef = 1.0;  // |a(n)| <= coef * n^power for n >= 1
  double power = 0.0;
};

class ArithmeticSequence {
 public:
  enum class Kind { SumOfSquares, Divisor, RamanujanTau, One, CharacterTwist };

  static ArithmeticSequence sum_of_squares(int k) {
    if (k < 1) fail(ErrorKind::DomainError, "sum_of_squares needs k >= 1");
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::SumOfSquares;
    impl->k = k;
    return ArithmeticSequence(std::move(impl));
  }
  static ArithmeticSequence divisor(cplx z) {
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::Divisor;
    impl->z = z;
    return ArithmeticSequence(std::move(impl));
  }
  static ArithmeticSequence ramanujan_tau() {
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::RamanujanTau;
    return ArithmeticSequence(std::move(impl));
  }
  static ArithmeticSequence one() {
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::One;
    return ArithmeticSequence(std::move(impl));
  }
  static ArithmeticSequence twist(const ArithmeticSequence& base, const DirichletCharacter& chi) {
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::CharacterTwist;
    impl->base = base.impl_;
    impl->chi = std::make_shared<DirichletCharacter>(chi);
    return ArithmeticSequence(std::move(impl));
  }

  Kind kind() const { return impl_->kind; }

  cplx operator()(std::uint64_t n) const { return value(*impl_, n); }

  Growth growth() const { return growth(*impl_); }

  bool real_valued() const { return real_valued(*impl_); }

 private:
  struct Impl {
    Kind kind = Kind::One;
    int k = 0;
    cplx z{};
    std::shared_ptr<const Impl> base;
    std::shared_ptr<const DirichletCharacter> chi;
    mutable std::shared_mutex mu;
    mutable std::vector<cplx> cache;  // divisor sums, index n
    mutable std::vector<bool> filled;
  };

  explicit ArithmeticSequence(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  static cplx value(const Impl& s, std::uint64_t n) {
    switch (s.kind) {
      case Kind::SumOfSquares:
        return static_cast<double>(r_k(s.k, n));
      case Kind::One:
        return n == 0 ? 0.0 : 1.0;
      case Kind::RamanujanTau:
        return n == 0 ? 0.0 : static_cast<double>(tau(n));
      case Kind::CharacterTwist:
        return (*s.chi)(static_cast<long long>(n % static_cast<std::uint64_t>(s.chi->modulus()))) *
               value(*s.base, n);
      case Kind::Divisor: {
        if (n == 0) return 0.0;
        {
          std::shared_lock lock(s.mu);
          if (n < s.cache.size() && s.filled[n]) return s.cache[n];
        }
        cplx v = sigma(s.z, n);
        std::unique_lock lock(s.mu);
        if (n >= s.cache.size()) {
          std::size_t size = std::max<std::size_t>(n + 1, 2 * s.cache.size());
          s.cache.resize(size);
          s.filled.resize(size, false);
        }
        s.cache[n] = v;
        s.filled[n] = true;
        return v;
      }
    }
    return 0.0;
  }

  static Growth growth(const Impl& s) {
    switch (s.kind) {
      case Kind::SumOfSquares:
        // (2 sqrt(n) + 1)^k <= 3^k n^{k/2}
        return {std::pow(3.0, s.k), s.k / 2.0};
      case Kind::Divisor:
        return {1.0, 1.0 + std::max(s.z.real(), 0.0)};
      case Kind::RamanujanTau:
        return {1.0, 6.5};
      case Kind::One:
        return {1.0, 0.0};
      case Kind::CharacterTwist:
        return growth(*s.base);
    }
    return {};
  }

  static bool real_valued(const Impl& s) {
    switch (s.kind) {
      case Kind::Divisor: return s.z.imag() == 0.0;
      case Kind::CharacterTwist: return s.chi->is_real() && real_valued(*s.base);
      default: return true;
    }
  }

  std::shared_ptr<const Impl> impl_;
};

}  // namespace popov::arith
