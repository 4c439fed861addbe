#pragma once
// Normal-ordered differential operators on functions of (x, x_d).
//
// An operator is a finite sum of monomials  x^a x_d^b dx^c dxd^e  with all
// multiplication generators to the left of all derivative generators; the
// exponent tuple (a,b,c,e) keys a sorted coefficient map, which makes the
// representation canonical and the debug serialization deterministic.
// The template coefficient is complex<double> in production and an exact
// Gaussian rational in the algebra property tests.

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "oho/params.hpp"
#include "oho/rational.hpp"

namespace oho {

using Mono = std::array<int, 4>;  // (a, b, c, e)

inline constexpr int kDegreeCap = 32;

inline bool coeff_is_zero(const cd& c) { return c.real() == 0.0 && c.imag() == 0.0; }

namespace detail {
template <class C>
C coeff_from_ll(long long v) {
  return C(v);
}
template <>
inline cd coeff_from_ll<cd>(long long v) {
  return cd(static_cast<double>(v), 0.0);
}

// binom(n,k) * falling(m,k) as a checked 128-bit integer
inline __int128 reorder_factor(int n, int k, int m) {
  __int128 b = 1;
  for (int i = 1; i <= k; ++i) {
    b = mul_checked(b, n - i + 1);
    b /= i;
  }
  __int128 f = 1;
  for (int i = 0; i < k; ++i) f = mul_checked(f, m - i);
  return mul_checked(b, f);
}
}  // namespace detail

template <class C>
struct BasicDiffOp {
  std::map<Mono, C> terms;

  BasicDiffOp() = default;

  static BasicDiffOp mono(int a, int b, int c, int e, C coeff) {
    if (a > kDegreeCap || b > kDegreeCap || c > kDegreeCap || e > kDegreeCap)
      throw std::overflow_error("operator degree above cap");
    if (a < 0 || b < 0 || c < 0 || e < 0)
      throw std::domain_error("negative exponent in operator monomial");
    BasicDiffOp r;
    if (!coeff_is_zero(coeff)) r.terms[{a, b, c, e}] = coeff;
    return r;
  }

  bool empty() const { return terms.empty(); }

  C coeff(int a, int b, int c, int e) const {
    auto it = terms.find(Mono{a, b, c, e});
    return it == terms.end() ? C(0) : it->second;
  }

  void prune() {
    for (auto it = terms.begin(); it != terms.end();)
      it = coeff_is_zero(it->second) ? terms.erase(it) : std::next(it);
  }

  BasicDiffOp& operator+=(const BasicDiffOp& o) {
    for (const auto& [m, c] : o.terms) {
      auto [it, fresh] = terms.try_emplace(m, c);
      if (!fresh) it->second = it->second + c;
    }
    prune();
    return *this;
  }
  BasicDiffOp& operator-=(const BasicDiffOp& o) {
    for (const auto& [m, c] : o.terms) {
      auto [it, fresh] = terms.try_emplace(m, -c);
      if (!fresh) it->second = it->second - c;
    }
    prune();
    return *this;
  }

  friend BasicDiffOp operator+(BasicDiffOp a, const BasicDiffOp& b) { return a += b; }
  friend BasicDiffOp operator-(BasicDiffOp a, const BasicDiffOp& b) { return a -= b; }
  friend BasicDiffOp operator*(const C& s, const BasicDiffOp& a) {
    BasicDiffOp r;
    if (coeff_is_zero(s)) return r;
    for (const auto& [m, c] : a.terms) {
      C v = s * c;
      if (!coeff_is_zero(v)) r.terms[m] = v;
    }
    return r;
  }
  BasicDiffOp operator-() const { return C(-1) * (*this); }

  // Normal-ordered product. Derivatives of the left factor are commuted
  // through the multiplications of the right factor independently in the
  // x and x_d sectors:
  //   dx^c x^a = sum_k binom(c,k) a!/(a-k)! x^(a-k) dx^(c-k)
  friend BasicDiffOp operator*(const BasicDiffOp& A, const BasicDiffOp& B) {
    BasicDiffOp out;
    for (const auto& [m1, c1] : A.terms)
      for (const auto& [m2, c2] : B.terms) {
        const C c12 = c1 * c2;
        const int kx = std::min(m1[2], m2[0]);
        const int kd = std::min(m1[3], m2[1]);
        for (int k = 0; k <= kx; ++k)
          for (int l = 0; l <= kd; ++l) {
            __int128 f = detail::mul_checked(detail::reorder_factor(m1[2], k, m2[0]),
                                             detail::reorder_factor(m1[3], l, m2[1]));
            Mono m{m1[0] + m2[0] - k, m1[1] + m2[1] - l, m1[2] + m2[2] - k, m1[3] + m2[3] - l};
            if (m[0] > kDegreeCap || m[1] > kDegreeCap || m[2] > kDegreeCap || m[3] > kDegreeCap)
              throw std::overflow_error("operator degree above cap");
            C v = c12 * detail::coeff_from_ll<C>(detail::narrow(f));
            auto [it, fresh] = out.terms.try_emplace(m, v);
            if (!fresh) it->second = it->second + v;
          }
      }
    out.prune();
    return out;
  }
};

template <class C>
BasicDiffOp<C> commutator(const BasicDiffOp<C>& a, const BasicDiffOp<C>& b) {
  return a * b - b * a;
}

using DiffOp = BasicDiffOp<cd>;

// generators
inline DiffOp dop_one() { return DiffOp::mono(0, 0, 0, 0, cd(1)); }
inline DiffOp dop_x() { return DiffOp::mono(1, 0, 0, 0, cd(1)); }
inline DiffOp dop_xd() { return DiffOp::mono(0, 1, 0, 0, cd(1)); }
inline DiffOp dop_dx() { return DiffOp::mono(0, 0, 1, 0, cd(1)); }
inline DiffOp dop_dxd() { return DiffOp::mono(0, 0, 0, 1, cd(1)); }
// momentum-representation shorthands p = -i dx, p_d = -i dxd
inline DiffOp dop_p() { return DiffOp::mono(0, 0, 1, 0, cd(0, -1)); }
inline DiffOp dop_pd() { return DiffOp::mono(0, 0, 0, 1, cd(0, -1)); }

inline double norm_inf(const DiffOp& a) {
  double m = 0.0;
  for (const auto& [k, c] : a.terms) m = std::max(m, std::abs(c));
  return m;
}

// Time-evolution generator acting on density kernels rho(x, x_d):
//   L = i dx dxd - i x x_d - (d0 + d2 nu^2 - 2 nu beta)/2 x_d^2
//       + i (d2 nu - beta) x_d dx - nu x_d dxd + d2/2 dx^2
// The last term is the trace-conserving reading of the derivative
// decoherence contribution (it vanishes on the x_d = 0 slice).
// pre: generator_ok(p)
DiffOp build_generator(const ModelParams& p);

// Deterministic debug form: one line per monomial, keys sorted,
// "(a,b,c,e): re+imi" with %.17g components.
std::string serialize(const DiffOp& a);

}  // namespace oho
