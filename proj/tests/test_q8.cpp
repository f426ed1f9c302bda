#include <catch2/catch.hpp>

#include <random>

#include "latspin/q8.hpp"

using namespace latspin;

TEST_CASE("zeta arithmetic basics") {
  Q8 z = Q8::zeta();
  CHECK(z * z.conj() == Q8(1));
  CHECK(Q8::sqrt2() * Q8::sqrt2() == Q8(2));
  // x_crit^2 = 3 - 2 sqrt(2)
  Q8 x2 = Q8::x_crit() * Q8::x_crit();
  CHECK(x2 == Q8(Rational(3), Rational(-2), Rational(0), Rational(2)));
  CHECK(Q8::zeta_pow(4) == -Q8(1));
  CHECK(Q8::zeta_pow(-1) == -Q8::zeta_pow(3));
}

TEST_CASE("real and imaginary parts") {
  Q8 i = Q8::i();
  CHECK(i.re() == Q8(0));
  CHECK(i.im() == Q8(1));
  auto z = Q8::zeta();
  CHECK(z.re() == Q8(Rational(0), Rational(1, 2), Rational(0), Rational(-1, 2)));
  CHECK(Q8::x_crit().to_complex().real() == Approx(0.414213562).epsilon(1e-9));
  CHECK(Q8::x_crit().to_complex().imag() == 0.0);
}

TEST_CASE("conjugation is a field automorphism") {
  std::mt19937 rng(7);
  auto rnd = [&rng]() {
    std::uniform_int_distribution<int> num(-6, 6), den(1, 4);
    return Q8(Rational(num(rng), den(rng)), Rational(num(rng), den(rng)),
              Rational(num(rng), den(rng)), Rational(num(rng), den(rng)));
  };
  for (int t = 0; t < 200; ++t) {
    Q8 a = rnd(), b = rnd();
    CHECK((a * b).conj() == a.conj() * b.conj());
    CHECK(a.conj().conj() == a);
    Q8 n = a * a.conj();
    CHECK(n.im() == Q8(0));
    CHECK(n.to_complex().real() >= -1e-12);
    CHECK(n.sign_real() >= 0);
  }
}

TEST_CASE("float image of exact arithmetic") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> num(-5, 5), den(1, 3), pick(0, 7);
  for (int t = 0; t < 100; ++t) {
    Q8 acc(0);
    std::complex<double> ref(0, 0);
    for (int s = 0; s < 20; ++s) {
      Q8 term = Q8(Rational(num(rng), den(rng))) * Q8::zeta_pow(pick(rng));
      acc += term;
      ref += term.to_complex();
    }
    auto img = acc.to_complex();
    CHECK(std::abs(img - ref) <= 1e-12 * (1.0 + std::abs(ref)));
  }
}

TEST_CASE("division") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> num(-4, 4), den(1, 3);
  for (int t = 0; t < 100; ++t) {
    Q8 a(Rational(num(rng), den(rng)), Rational(num(rng), den(rng)),
         Rational(num(rng), den(rng)), Rational(num(rng), den(rng)));
    if (a.is_zero()) continue;
    CHECK(a * a.inverse() == Q8(1));
  }
  CHECK_THROWS(Q8(0).inverse());
}

TEST_CASE("exact sign of real elements") {
  CHECK(Q8::sqrt2().sign_real() == 1);
  CHECK((Q8(1) - Q8::sqrt2()).sign_real() == -1);
  CHECK((Q8(2) - Q8::sqrt2()).sign_real() == 1);
  CHECK((Q8(3) * Q8::sqrt2() - Q8(4)).sign_real() == 1);   // 3 sqrt2 > 4
  CHECK((Q8(7) - Q8(5) * Q8::sqrt2()).sign_real() == -1);  // 5 sqrt2 > 7
  CHECK(Q8(0).sign_real() == 0);
}
