/* Copyright 2026 The gbloch Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Exact angular-momentum coefficients (Condon-Shortley phases).
//
// Every coefficient is carried as sign * sqrt(rational) with GMP rationals and
// only turned into a double at the boundary. Racah's single-sum formulas are
// used for both Clebsch-Gordan coefficients and 6j symbols.

#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <ostream>
#include <vector>

namespace gbloch {

/// Angular momentum quantum number or projection, stored as twice its value.
class HalfInt {
 public:
  constexpr HalfInt() = default;
  constexpr explicit HalfInt(int integer) : twice_(2 * integer) {}

  static constexpr HalfInt from_twice(int twice) {
    HalfInt h;
    h.twice_ = twice;
    return h;
  }

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }
  /// Value as an integer; only meaningful when is_integer().
  constexpr int as_int() const { return twice_ / 2; }

  constexpr HalfInt operator-() const { return from_twice(-twice_); }
  friend constexpr HalfInt operator+(HalfInt a, HalfInt b) { return from_twice(a.twice_ + b.twice_); }
  friend constexpr HalfInt operator-(HalfInt a, HalfInt b) { return from_twice(a.twice_ - b.twice_); }
  friend constexpr bool operator==(HalfInt, HalfInt) = default;
  friend constexpr auto operator<=>(HalfInt, HalfInt) = default;

  friend std::ostream& operator<<(std::ostream& os, HalfInt h);

 private:
  int twice_ = 0;
};

/// True when `m` is one of the 2j+1 projections of `j`.
constexpr bool is_projection_of(HalfInt m, HalfInt j) {
  const int d = j.twice() - m.twice();
  return j.twice() >= 0 && d >= 0 && d <= 2 * j.twice() && d % 2 == 0;
}

/// Throws InvalidArgument unless j.twice() >= 0.
void require_quantum_number(HalfInt j);
/// Throws InvalidArgument unless j is valid and m is a projection of it.
void require_projection(HalfInt j, HalfInt m);

/// |a-b| <= c <= a+b and a+b+c integral.
bool triangle_ok(HalfInt a, HalfInt b, HalfInt c);

/// sign * sqrt(rational), rational >= 0. Zero is {0, 0}.
struct ExactCoeff {
  int sign = 0;
  mpq_class rational = 0;

  static ExactCoeff zero() { return {}; }
  static ExactCoeff one() { return {1, 1}; }

  bool is_zero() const { return sign == 0; }
  double to_double() const;

  ExactCoeff operator-() const { return {-sign, rational}; }
  friend ExactCoeff operator*(const ExactCoeff& a, const ExactCoeff& b);
  /// Scales by an exact rational factor q.
  friend ExactCoeff operator*(const ExactCoeff& a, const mpq_class& q);
  friend bool operator==(const ExactCoeff& a, const ExactCoeff& b) {
    return a.sign == b.sign && (a.sign == 0 || a.rational == b.rational);
  }
  friend std::ostream& operator<<(std::ostream& os, const ExactCoeff& c);
};

/// Exact finite sum of sign*sqrt(rational) terms.
///
/// Terms whose radicands differ by a rational square are merged, so the sum
/// is stored as sum_i c_i sqrt(r_i) with pairwise square-incommensurable r_i.
/// Square roots of such radicands are linearly independent over Q, hence the
/// value is exactly zero iff every c_i is zero.
class SurdSum {
 public:
  void add(const ExactCoeff& term);
  SurdSum& operator+=(const ExactCoeff& term) {
    add(term);
    return *this;
  }
  SurdSum& operator-=(const ExactCoeff& term) {
    add(-term);
    return *this;
  }

  bool is_zero() const;
  /// Defined when the sum collapsed to at most one radical class.
  bool is_single_term() const;
  /// Value as sign*sqrt(rational); throws if more than one radical class remains.
  ExactCoeff as_coeff() const;
  double to_double() const;

 private:
  struct Term {
    mpq_class coefficient;
    mpq_class radicand;
  };
  std::vector<Term> terms_;
};

/// Largest n for which n! is available from the shared cache.
std::size_t factorial_limit();
/// Resizes the shared factorial cache. The default (128) covers every
/// coefficient needed for j up to 25/2. Safe to call concurrently with
/// readers; readers holding an older table keep using it.
void set_factorial_limit(std::size_t n);
/// n! from the shared cache. Throws InvalidArgument beyond factorial_limit().
mpz_class factorial(int n);

/// <j1 m1 j2 m2 | J M>. Exact zero when M != m1+m2 or the triangle rule fails.
ExactCoeff clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M);

/// Wigner 6j symbol {j1 j2 j3; j4 j5 j6}. Exact zero when a triad fails.
ExactCoeff six_j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6);

/// Floating-point shorthands.
double cg(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M);
double cg(int j1, int m1, int j2, int m2, int J, int M);

}  // namespace gbloch
