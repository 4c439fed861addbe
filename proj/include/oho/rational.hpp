#pragma once
// Exact rational and Gaussian-rational coefficients. Used by the operator
// algebra property tests so that associativity/Jacobi checks are exact
// instead of floating-point approximate. Overflow is detected, not wrapped.

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace oho {

namespace detail {
inline __int128 mul_checked(__int128 a, __int128 b) {
  if (a == 0 || b == 0) return 0;
  __int128 r = a * b;
  if (r / b != a) throw std::overflow_error("rational coefficient overflow");
  return r;
}
inline long long narrow(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("rational coefficient overflow");
  return static_cast<long long>(v);
}
}  // namespace detail

struct Rat {
  long long n = 0;
  long long d = 1;

  Rat() = default;
  Rat(long long num) : n(num), d(1) {}
  Rat(long long num, long long den) : n(num), d(den) { normalize(); }

  void normalize() {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (d < 0) { n = -n; d = -d; }
    long long g = std::gcd(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    if (n == 0) d = 1;
  }

  friend Rat operator+(const Rat& a, const Rat& b) {
    using detail::mul_checked;
    __int128 num = mul_checked(a.n, b.d) + mul_checked(b.n, a.d);
    __int128 den = mul_checked(a.d, b.d);
    return make(num, den);
  }
  friend Rat operator-(const Rat& a, const Rat& b) { return a + Rat(-b.n, b.d); }
  friend Rat operator*(const Rat& a, const Rat& b) {
    using detail::mul_checked;
    return make(mul_checked(a.n, b.n), mul_checked(a.d, b.d));
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.n == 0) throw std::domain_error("rational division by zero");
    using detail::mul_checked;
    return make(mul_checked(a.n, b.d), mul_checked(a.d, b.n));
  }
  Rat operator-() const { return Rat(-n, d); }
  friend bool operator==(const Rat& a, const Rat& b) { return a.n == b.n && a.d == b.d; }

  double to_double() const { return static_cast<double>(n) / static_cast<double>(d); }
  std::string str() const {
    return d == 1 ? std::to_string(n) : std::to_string(n) + "/" + std::to_string(d);
  }

 private:
  static Rat make(__int128 num, __int128 den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    if (den < 0) { num = -num; den = -den; }
    __int128 a = num < 0 ? -num : num, b = den, g = 0;
    while (b) { __int128 t = a % b; a = b; b = t; }
    g = a == 0 ? 1 : a;
    Rat r;
    r.n = detail::narrow(num / g);
    r.d = detail::narrow(den / g);
    if (r.n == 0) r.d = 1;
    return r;
  }
};

// Gaussian rational: re + im*i with exact components.
struct RatComplex {
  Rat re, im;

  RatComplex() = default;
  RatComplex(long long r) : re(r), im(0) {}
  RatComplex(Rat r) : re(r), im(0) {}
  RatComplex(Rat r, Rat i) : re(r), im(i) {}

  friend RatComplex operator+(const RatComplex& a, const RatComplex& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend RatComplex operator-(const RatComplex& a, const RatComplex& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend RatComplex operator*(const RatComplex& a, const RatComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  RatComplex operator-() const { return {-re, -im}; }
  friend bool operator==(const RatComplex& a, const RatComplex& b) {
    return a.re == b.re && a.im == b.im;
  }
  std::string str() const { return re.str() + (im.n < 0 ? "" : "+") + im.str() + "i"; }
};

inline bool coeff_is_zero(const RatComplex& c) { return c.re.n == 0 && c.im.n == 0; }

}  // namespace oho
