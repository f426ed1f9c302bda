#pragma once

// Exact arithmetic in the cyclotomic field Q(zeta_8), zeta = e^{i pi/4}.
// Elements are stored as c0 + c1*z + c2*z^2 + c3*z^3 with rational
// coefficients and z^4 = -1.  This field contains i = z^2 and
// sqrt(2) = z - z^3, so every 8th root of unity, the critical coupling
// x = sqrt(2) - 1, and all phases e^{-i*wind/2} with wind a multiple of
// pi/2 are represented exactly.

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace latspin {

using Rational = mpq_class;

class Q8 {
 public:
  Q8() : c_{Rational(0), Rational(0), Rational(0), Rational(0)} {}
  Q8(long v) : Q8() { c_[0] = v; }  // NOLINT: implicit by design
  Q8(const Rational& v) : Q8() {
    c_[0] = v;
    c_[0].canonicalize();
  }
  Q8(Rational a, Rational b, Rational c, Rational d)
      : c_{std::move(a), std::move(b), std::move(c), std::move(d)} {
    for (auto& x : c_) x.canonicalize();
  }

  // zeta^k for any integer k, with zeta^4 = -1 folded into the sign.
  static Q8 zeta_pow(long k) {
    long m = ((k % 8) + 8) % 8;
    Q8 r;
    Rational one(m < 4 ? 1 : -1);
    r.c_[m % 4] = one;
    return r;
  }
  static Q8 zeta() { return zeta_pow(1); }
  static Q8 i() { return zeta_pow(2); }
  static Q8 sqrt2() {
    Q8 r;
    r.c_[1] = 1;
    r.c_[3] = -1;
    return r;
  }
  // x_crit = sqrt(2) - 1, fixed throughout.
  static Q8 x_crit() {
    Q8 r = sqrt2();
    r.c_[0] = -1;
    return r;
  }

  const Rational& coeff(int k) const { return c_[k]; }

  bool is_zero() const {
    return c_[0] == 0 && c_[1] == 0 && c_[2] == 0 && c_[3] == 0;
  }

  friend Q8 operator+(const Q8& a, const Q8& b) {
    return Q8(a.c_[0] + b.c_[0], a.c_[1] + b.c_[1], a.c_[2] + b.c_[2],
              a.c_[3] + b.c_[3]);
  }
  friend Q8 operator-(const Q8& a, const Q8& b) {
    return Q8(a.c_[0] - b.c_[0], a.c_[1] - b.c_[1], a.c_[2] - b.c_[2],
              a.c_[3] - b.c_[3]);
  }
  Q8 operator-() const { return Q8(-c_[0], -c_[1], -c_[2], -c_[3]); }

  friend Q8 operator*(const Q8& a, const Q8& b) {
    // Convolution modulo z^4 = -1.
    std::array<Rational, 4> r{Rational(0), Rational(0), Rational(0),
                              Rational(0)};
    for (int p = 0; p < 4; ++p) {
      if (a.c_[p] == 0) continue;
      for (int q = 0; q < 4; ++q) {
        if (b.c_[q] == 0) continue;
        int s = p + q;
        if (s < 4)
          r[s] += a.c_[p] * b.c_[q];
        else
          r[s - 4] -= a.c_[p] * b.c_[q];
      }
    }
    return Q8(r[0], r[1], r[2], r[3]);
  }

  Q8& operator+=(const Q8& o) { return *this = *this + o; }
  Q8& operator-=(const Q8& o) { return *this = *this - o; }
  Q8& operator*=(const Q8& o) { return *this = *this * o; }

  friend bool operator==(const Q8& a, const Q8& b) {
    return a.c_[0] == b.c_[0] && a.c_[1] == b.c_[1] && a.c_[2] == b.c_[2] &&
           a.c_[3] == b.c_[3];
  }
  friend bool operator!=(const Q8& a, const Q8& b) { return !(a == b); }

  // Complex conjugation is the field automorphism z -> -z^3.
  Q8 conj() const { return Q8(c_[0], -c_[3], -c_[2], -c_[1]); }

  // Real and imaginary parts, both fixed by conjugation.
  Q8 re() const {
    Rational h = (c_[1] - c_[3]) / 2;
    return Q8(c_[0], h, Rational(0), -h);
  }
  Q8 im() const {
    Rational h = (c_[1] + c_[3]) / 2;
    return Q8(c_[2], h, Rational(0), -h);
  }

  bool is_real() const { return c_[2] == 0 && c_[1] == -c_[3]; }

  // A real element is p + q*sqrt(2); returns (p, q).  Requires is_real().
  std::pair<Rational, Rational> as_p_q_sqrt2() const {
    if (!is_real()) throw std::logic_error("Q8: element is not real");
    return {c_[0], c_[1]};
  }

  // Exact sign of a real element p + q*sqrt(2).
  int sign_real() const {
    auto [p, q] = as_p_q_sqrt2();
    int sp = sgn(p), sq = sgn(q);
    if (sp == 0 && sq == 0) return 0;
    if (sp >= 0 && sq >= 0) return 1;
    if (sp <= 0 && sq <= 0) return -1;
    // Mixed signs: (p + q sqrt2)(p - q sqrt2) = p^2 - 2 q^2, and the second
    // factor has the sign of p here.
    Rational d = p * p - 2 * q * q;
    return sp > 0 ? sgn(d) : -sgn(d);
  }

  // Field inverse via conjugations: 1/a = conj(a) * tilde(N) / (N * tilde(N))
  // with N = a*conj(a) = p + q*sqrt(2) and tilde the sqrt(2) -> -sqrt(2) map.
  Q8 inverse() const {
    if (is_zero()) throw std::domain_error("Q8: division by zero");
    Q8 cj = conj();
    Q8 n = *this * cj;
    auto [p, q] = n.as_p_q_sqrt2();
    Q8 nt(p, -q, Rational(0), q);
    Rational den = p * p - 2 * q * q;
    Q8 num = cj * nt;
    return Q8(num.c_[0] / den, num.c_[1] / den, num.c_[2] / den,
              num.c_[3] / den);
  }
  friend Q8 operator/(const Q8& a, const Q8& b) { return a * b.inverse(); }

  // The coefficients of powers of x_crit grow like (1+sqrt2)^k while the
  // value stays small, so the double image must be evaluated in extended
  // precision to survive the cancellation.
  std::complex<double> to_complex() const {
    static const mpf_class sqrt2_f = [] {
      mpf_class two(2, 512), r(0, 512);
      mpf_sqrt(r.get_mpf_t(), two.get_mpf_t());
      return r;
    }();
    auto eval = [](const Rational& p, const Rational& q) {
      mpf_class acc(p, 512);
      acc += mpf_class(q, 512) * sqrt2_f;
      return acc.get_d();
    };
    Rational hr = (c_[1] - c_[3]) / 2;
    Rational hi = (c_[1] + c_[3]) / 2;
    return {eval(c_[0], hr), eval(c_[2], hi)};
  }

  std::array<std::string, 4> coeff_strings() const {
    return {c_[0].get_str(), c_[1].get_str(), c_[2].get_str(),
            c_[3].get_str()};
  }

 private:
  static int sgn(const Rational& r) { return sgn_int(mpq_sgn(r.get_mpq_t())); }
  static int sgn_int(int s) { return s; }
  std::array<Rational, 4> c_;
};

inline Q8 operator*(long a, const Q8& b) { return Q8(a) * b; }

}  // namespace latspin
