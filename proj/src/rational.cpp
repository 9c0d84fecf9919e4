// SPDX-License-Identifier: Apache-2.0
#include "fnncert/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace fnncert {

Rational rational_approx(const Rational& value, const Integer& max_den) {
  if (max_den < 1) throw std::invalid_argument("rational_approx: max_den < 1");
  if (value.get_den() <= max_den) return value;

  const bool negative = value < 0;
  Rational x = negative ? Rational(-value) : value;

  // Continued-fraction convergents p_k/q_k, with a final semiconvergent.
  Integer p_prev = 1, q_prev = 0;  // k-1
  Integer p_cur = 0, q_cur = 1;    // k (init so first step gives floor(x))
  Integer num = x.get_num(), den = x.get_den();
  while (true) {
    Integer a = num / den;
    Integer p_next = a * p_cur + p_prev;
    Integer q_next = a * q_cur + q_prev;
    if (q_next > max_den) {
      // best semiconvergent with denominator within the bound
      Integer t = (max_den - q_prev) / q_cur;
      Rational semi(t * p_cur + p_prev, t * q_cur + q_prev);
      semi.canonicalize();
      Rational conv(p_cur, q_cur == 0 ? Integer(1) : q_cur);
      conv.canonicalize();
      Rational best = conv;
      if (t > 0 && abs(semi - x) < abs(conv - x)) best = semi;
      return negative ? Rational(-best) : best;
    }
    p_prev = p_cur; q_prev = q_cur;
    p_cur = p_next; q_cur = q_next;
    Integer rem = num - a * den;
    if (rem == 0) break;  // exact (cannot happen given the den check above)
    num = den;
    den = rem;
  }
  Rational exact(p_cur, q_cur);
  exact.canonicalize();
  return negative ? Rational(-exact) : exact;
}

Rational rational_from_double(double value, const Integer& max_den) {
  if (!std::isfinite(value)) throw std::invalid_argument("rational_from_double: non-finite");
  return rational_approx(Rational(value), max_den);
}

std::string rational_to_string(const Rational& q) { return q.get_str(); }

Rational rational_from_string(const std::string& text) {
  Rational q;
  if (q.set_str(text, 10) != 0)
    throw std::invalid_argument("bad rational literal: " + text);
  q.canonicalize();
  return q;
}

std::vector<Integer> integerize(const std::vector<Rational>& v) {
  Integer lcm_den = 1;
  for (const Rational& q : v) lcm_den = lcm(lcm_den, q.get_den());
  std::vector<Integer> out;
  out.reserve(v.size());
  Integer g = 0;
  for (const Rational& q : v) {
    Integer n = q.get_num() * (lcm_den / q.get_den());
    g = gcd(g, n);
    out.push_back(std::move(n));
  }
  if (g > 1)
    for (Integer& n : out) n /= g;
  return out;
}

}  // namespace fnncert
