// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace fnncert {

// Exact rational arithmetic. mpq_class keeps values in lowest terms with a
// positive denominator, which is exactly the invariant the LP layer relies on.
using Rational = mpq_class;
using Integer = mpz_class;

// Best rational approximation of `value` with denominator <= max_den
// (continued-fraction convergents / semiconvergents). An input that is already
// a rational with denominator <= max_den is returned unchanged.
Rational rational_approx(const Rational& value, const Integer& max_den);

// Exact conversion of a finite double (every double is p * 2^k) followed by
// rational_approx.
Rational rational_from_double(double value, const Integer& max_den);

std::string rational_to_string(const Rational& q);      // "p/q" or "p"
Rational rational_from_string(const std::string& text); // accepts "p/q", "p"

// Scale a rational vector to coprime integers: clear denominators by the lcm,
// then divide by the gcd of the numerators. Zero vectors pass through.
std::vector<Integer> integerize(const std::vector<Rational>& v);

}  // namespace fnncert
