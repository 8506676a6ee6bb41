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

#include "gbloch/wigner.hpp"

#include <algorithm>
#include <memory>
#include <mutex>
#include <sstream>

#include "gbloch/errors.hpp"

namespace gbloch {

std::ostream& operator<<(std::ostream& os, HalfInt h) {
  if (h.is_integer()) return os << h.as_int();
  return os << h.twice() << "/2";
}

void require_quantum_number(HalfInt j) {
  if (j.twice() < 0) {
    std::ostringstream msg;
    msg << "angular momentum quantum number must be non-negative, got " << j;
    throw InvalidArgument(msg.str());
  }
}

void require_projection(HalfInt j, HalfInt m) {
  require_quantum_number(j);
  if (!is_projection_of(m, j)) {
    std::ostringstream msg;
    msg << "projection m=" << m << " is not valid for j=" << j;
    throw InvalidArgument(msg.str());
  }
}

bool triangle_ok(HalfInt a, HalfInt b, HalfInt c) {
  if (a.twice() < 0 || b.twice() < 0 || c.twice() < 0) return false;
  if ((a.twice() + b.twice() + c.twice()) % 2 != 0) return false;
  return c.twice() >= std::abs(a.twice() - b.twice()) && c.twice() <= a.twice() + b.twice();
}

// ---------------------------------------------------------------------------
// ExactCoeff / SurdSum

namespace {

// sqrt(q) when q is the square of a rational.
bool exact_sqrt(const mpq_class& q, mpq_class& root) {
  const mpz_class& num = q.get_num();
  const mpz_class& den = q.get_den();
  if (num < 0 || !mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
    return false;
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
  root = mpq_class(rn, rd);
  root.canonicalize();
  return true;
}

double sqrt_to_double(const mpq_class& q) {
  mpf_class x(q, 160);
  mpf_class r(0, 160);
  mpf_sqrt(r.get_mpf_t(), x.get_mpf_t());
  return r.get_d();
}

}  // namespace

double ExactCoeff::to_double() const {
  if (sign == 0) return 0.0;
  return sign * sqrt_to_double(rational);
}

ExactCoeff operator*(const ExactCoeff& a, const ExactCoeff& b) {
  const int s = a.sign * b.sign;
  if (s == 0) return ExactCoeff::zero();
  return {s, a.rational * b.rational};
}

ExactCoeff operator*(const ExactCoeff& a, const mpq_class& q) {
  const int s = a.sign * sgn(q);
  if (s == 0) return ExactCoeff::zero();
  return {s, a.rational * q * q};
}

std::ostream& operator<<(std::ostream& os, const ExactCoeff& c) {
  if (c.sign == 0) return os << "0";
  return os << (c.sign < 0 ? "-" : "") << "sqrt(" << c.rational.get_str() << ")";
}

void SurdSum::add(const ExactCoeff& term) {
  if (term.sign == 0) return;
  for (auto& t : terms_) {
    mpq_class ratio = term.rational / t.radicand;
    mpq_class root;
    if (exact_sqrt(ratio, root)) {
      if (term.sign > 0)
        t.coefficient += root;
      else
        t.coefficient -= root;
      return;
    }
  }
  terms_.push_back({mpq_class(term.sign), term.rational});
}

bool SurdSum::is_zero() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.coefficient == 0; });
}

bool SurdSum::is_single_term() const {
  return std::count_if(terms_.begin(), terms_.end(), [](const Term& t) { return t.coefficient != 0; }) <= 1;
}

ExactCoeff SurdSum::as_coeff() const {
  if (!is_single_term()) throw InvalidArgument("surd sum does not reduce to a single radical");
  for (const auto& t : terms_) {
    if (t.coefficient != 0) return {sgn(t.coefficient), t.coefficient * t.coefficient * t.radicand};
  }
  return ExactCoeff::zero();
}

double SurdSum::to_double() const {
  double acc = 0.0;
  for (const auto& t : terms_) acc += t.coefficient.get_d() * sqrt_to_double(t.radicand);
  return acc;
}

// ---------------------------------------------------------------------------
// Factorial cache

namespace {

using FactorialTable = std::vector<mpz_class>;

struct FactorialCache {
  std::mutex mutex;
  std::shared_ptr<const FactorialTable> table;
};

FactorialCache& cache() {
  static FactorialCache c;
  return c;
}

std::shared_ptr<const FactorialTable> build_table(std::size_t n) {
  auto t = std::make_shared<FactorialTable>(n + 1);
  (*t)[0] = 1;
  for (std::size_t i = 1; i <= n; ++i) (*t)[i] = (*t)[i - 1] * static_cast<unsigned long>(i);
  return t;
}

std::shared_ptr<const FactorialTable> table_snapshot() {
  auto& c = cache();
  std::lock_guard lock(c.mutex);
  if (!c.table) c.table = build_table(128);
  return c.table;
}

// Holds one snapshot for the duration of a coefficient evaluation.
class Factorials {
 public:
  Factorials() : table_(table_snapshot()) {}
  const mpz_class& operator()(int n) const {
    if (n < 0 || static_cast<std::size_t>(n) >= table_->size()) {
      std::ostringstream msg;
      msg << "factorial(" << n << ") outside cache limit " << table_->size() - 1
          << "; raise it with set_factorial_limit";
      throw InvalidArgument(msg.str());
    }
    return (*table_)[static_cast<std::size_t>(n)];
  }

 private:
  std::shared_ptr<const FactorialTable> table_;
};

}  // namespace

std::size_t factorial_limit() { return table_snapshot()->size() - 1; }

void set_factorial_limit(std::size_t n) {
  auto table = build_table(n);
  auto& c = cache();
  std::lock_guard lock(c.mutex);
  c.table = std::move(table);
}

mpz_class factorial(int n) { return Factorials{}(n); }

// ---------------------------------------------------------------------------
// Clebsch-Gordan and 6j

namespace {

// Integer value of a sum of half-integers known to be integral.
int integral(int twice) { return twice / 2; }

ExactCoeff from_sum_and_radicand(const mpq_class& sum, const mpq_class& radicand) {
  const int s = sgn(sum);
  if (s == 0) return ExactCoeff::zero();
  return {s, sum * sum * radicand};
}

// Square of the triangle coefficient Delta(abc).
mpq_class delta_squared(const Factorials& f, int a2, int b2, int c2) {
  mpq_class q(mpz_class(f(integral(a2 + b2 - c2)) * f(integral(a2 - b2 + c2)) * f(integral(-a2 + b2 + c2))),
              f(integral(a2 + b2 + c2) + 1));
  q.canonicalize();
  return q;
}

}  // namespace

ExactCoeff clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M) {
  require_projection(j1, m1);
  require_projection(j2, m2);
  require_projection(J, M);
  if (m1 + m2 != M || !triangle_ok(j1, j2, J)) return ExactCoeff::zero();

  const Factorials f;
  const int a = integral(j1.twice() + j2.twice() - J.twice());  // j1+j2-J
  const int b = integral(j1.twice() - m1.twice());              // j1-m1
  const int c = integral(j2.twice() + m2.twice());              // j2+m2
  const int d = integral(J.twice() - j2.twice() + m1.twice());  // J-j2+m1
  const int e = integral(J.twice() - j1.twice() - m2.twice());  // J-j1-m2

  const int kmin = std::max({0, -d, -e});
  const int kmax = std::min({a, b, c});
  mpq_class sum = 0;
  for (int k = kmin; k <= kmax; ++k) {
    mpz_class den = f(k) * f(a - k) * f(b - k) * f(c - k) * f(d + k) * f(e + k);
    mpq_class term(mpz_class(1), den);
    term.canonicalize();
    if (k % 2 != 0) term = -term;
    sum += term;
  }

  mpq_class radicand = delta_squared(f, j1.twice(), j2.twice(), J.twice());
  radicand *= J.twice() + 1;
  radicand *= f(integral(J.twice() + M.twice())) * f(integral(J.twice() - M.twice())) *
              f(integral(j1.twice() - m1.twice())) * f(integral(j1.twice() + m1.twice())) *
              f(integral(j2.twice() - m2.twice())) * f(integral(j2.twice() + m2.twice()));
  return from_sum_and_radicand(sum, radicand);
}

ExactCoeff six_j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6) {
  for (HalfInt x : {j1, j2, j3, j4, j5, j6}) require_quantum_number(x);
  if (!triangle_ok(j1, j2, j3) || !triangle_ok(j1, j5, j6) || !triangle_ok(j4, j2, j6) ||
      !triangle_ok(j4, j5, j3))
    return ExactCoeff::zero();

  const Factorials f;
  const int t1 = integral(j1.twice() + j2.twice() + j3.twice());
  const int t2 = integral(j1.twice() + j5.twice() + j6.twice());
  const int t3 = integral(j4.twice() + j2.twice() + j6.twice());
  const int t4 = integral(j4.twice() + j5.twice() + j3.twice());
  const int u1 = integral(j1.twice() + j2.twice() + j4.twice() + j5.twice());
  const int u2 = integral(j1.twice() + j3.twice() + j4.twice() + j6.twice());
  const int u3 = integral(j2.twice() + j3.twice() + j5.twice() + j6.twice());

  const int tmin = std::max({t1, t2, t3, t4});
  const int tmax = std::min({u1, u2, u3});
  mpq_class sum = 0;
  for (int t = tmin; t <= tmax; ++t) {
    mpz_class den = f(t - t1) * f(t - t2) * f(t - t3) * f(t - t4) * f(u1 - t) * f(u2 - t) * f(u3 - t);
    mpq_class term(f(t + 1), den);
    term.canonicalize();
    if (t % 2 != 0) term = -term;
    sum += term;
  }

  mpq_class radicand = delta_squared(f, j1.twice(), j2.twice(), j3.twice()) *
                       delta_squared(f, j1.twice(), j5.twice(), j6.twice()) *
                       delta_squared(f, j4.twice(), j2.twice(), j6.twice()) *
                       delta_squared(f, j4.twice(), j5.twice(), j3.twice());
  return from_sum_and_radicand(sum, radicand);
}

double cg(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M) {
  return clebsch_gordan(j1, m1, j2, m2, J, M).to_double();
}

double cg(int j1, int m1, int j2, int m2, int J, int M) {
  return cg(HalfInt(j1), HalfInt(m1), HalfInt(j2), HalfInt(m2), HalfInt(J), HalfInt(M));
}

}  // namespace gbloch
