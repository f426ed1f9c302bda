#pragma once

// Pfaffian of an antisymmetric matrix by recursive first-row expansion,
// templated so it runs both on exact field elements and on doubles.

#include <cmath>
#include <vector>

#include "latspin/domain.hpp"

namespace latspin {

template <typename T>
class SquareMat {
 public:
  SquareMat() = default;
  explicit SquareMat(int n) : n_(n), a_(size_t(n) * n, T(0)) {}
  int n() const { return n_; }
  T& at(int r, int c) { return a_[size_t(r) * n_ + c]; }
  const T& at(int r, int c) const { return a_[size_t(r) * n_ + c]; }

  SquareMat minor_without(const std::vector<int>& drop) const {
    std::vector<int> keep;
    for (int i = 0; i < n_; ++i)
      if (std::find(drop.begin(), drop.end(), i) == drop.end())
        keep.push_back(i);
    SquareMat m(int(keep.size()));
    for (size_t r = 0; r < keep.size(); ++r)
      for (size_t c = 0; c < keep.size(); ++c)
        m.at(int(r), int(c)) = at(keep[r], keep[c]);
    return m;
  }

 private:
  int n_ = 0;
  std::vector<T> a_;
};

namespace detail {
inline bool pf_entries_equal_neg(const Q8& a, const Q8& b) { return a == -b; }
inline bool pf_entries_equal_neg(double a, double b) {
  double scale = std::max({std::abs(a), std::abs(b), 1.0});
  return std::abs(a + b) <= 1e-12 * scale;
}

template <typename T>
T pf_rec(const SquareMat<T>& m, std::vector<int>& alive) {
  if (alive.empty()) return T(1);
  int i0 = alive[0];
  T acc(0);
  int sign = 1;
  for (size_t j = 1; j < alive.size(); ++j) {
    int cj = alive[j];
    std::vector<int> rest;
    for (size_t k = 1; k < alive.size(); ++k)
      if (k != j) rest.push_back(alive[k]);
    T sub = pf_rec(m, rest);
    if (sign > 0)
      acc += m.at(i0, cj) * sub;
    else
      acc -= m.at(i0, cj) * sub;
    sign = -sign;
  }
  return acc;
}
}  // namespace detail

// Pfaffian; odd dimension gives 0 by convention, the empty matrix gives 1.
template <typename T>
T pfaffian(const SquareMat<T>& m) {
  int n = m.n();
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (!detail::pf_entries_equal_neg(m.at(r, c), m.at(c, r)))
        throw Error(Err::NotAntisymmetric, "pfaffian: matrix not antisymmetric");
  if (n % 2) return T(0);
  std::vector<int> alive(n);
  for (int i = 0; i < n; ++i) alive[i] = i;
  return detail::pf_rec(m, alive);
}

}  // namespace latspin
