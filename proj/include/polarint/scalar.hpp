#pragma once

// Scalar modes. A whole computation runs in exactly one mode:
//
//   double    IEEE-754 binary64
//   Rational  arbitrary-precision rational (GMP mpq), kept in lowest terms
//             with positive denominator
//
// Every structure in the library is templated on the scalar type, so mixing
// modes is a compile-time error. Rational arithmetic is exact; results that
// are stated "exact" elsewhere rely on that.

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace polarint {

using Rational = mpq_class;

struct scalar_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename S>
struct scalar_traits;

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static constexpr const char* name = "double";
};

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static constexpr const char* name = "rational";
};

inline bool is_zero(double x) { return x == 0.0; }
inline bool is_zero(const Rational& x) { return sgn(x) == 0; }

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.get_d(); }

template <typename S>
S from_long(long v) {
  return S(v);
}

template <typename S>
S from_ratio(long num, long den) {
  if (den == 0) throw scalar_error("zero denominator");
  if constexpr (scalar_traits<S>::exact) {
    Rational r(num, den);
    r.canonicalize();
    return r;
  } else {
    return double(num) / double(den);
  }
}

template <typename S>
S abs_val(const S& x) {
  if constexpr (scalar_traits<S>::exact) {
    Rational r = abs(x);
    return r;
  } else {
    return std::fabs(x);
  }
}

// |a| > |b|, used for pivot selection.
template <typename S>
bool abs_greater(const S& a, const S& b) {
  if constexpr (scalar_traits<S>::exact) {
    Rational aa = abs(a), ab = abs(b);
    return cmp(aa, ab) > 0;
  } else {
    return std::fabs(a) > std::fabs(b);
  }
}

template <typename S>
S pow_int(const S& base, int e) {
  S acc(1);
  for (int i = 0; i < e; ++i) acc *= base;
  return acc;
}

// Exact multinomial coefficient m! / prod(e_i!). Total degrees in this
// library are small; guard against overflow anyway.
inline long multinomial(int m, const std::vector<int>& exps) {
  if (m > 20) throw scalar_error("multinomial: degree too large");
  long fact = 1;
  for (int i = 2; i <= m; ++i) fact *= i;
  for (int e : exps)
    for (int i = 2; i <= e; ++i) fact /= i;
  return fact;
}

inline std::string scalar_to_string(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

inline std::string scalar_to_string(const Rational& x) { return x.get_str(); }

namespace detail {

inline Rational rational_from_decimal(const std::string& s) {
  // [sign]digits[.digits], converted exactly.
  auto dot = s.find('.');
  std::string digits = s;
  size_t frac_len = 0;
  if (dot != std::string::npos) {
    frac_len = s.size() - dot - 1;
    digits = s.substr(0, dot) + s.substr(dot + 1);
  }
  if (digits.empty() || digits == "-" || digits == "+")
    throw scalar_error("bad numeric literal '" + s + "'");
  for (size_t i = 0; i < digits.size(); ++i) {
    if (i == 0 && (digits[i] == '-' || digits[i] == '+')) continue;
    if (!std::isdigit(static_cast<unsigned char>(digits[i])))
      throw scalar_error("bad numeric literal '" + s + "'");
  }
  mpz_class num(digits, 10);
  mpz_class den = 1;
  for (size_t i = 0; i < frac_len; ++i) den *= 10;
  Rational r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace detail

// Parses "p/q", "p", or a plain decimal literal. In rational mode the
// decimal is converted exactly; scientific notation is rejected there.
template <typename S>
S parse_scalar(const std::string& s);

template <>
inline Rational parse_scalar<Rational>(const std::string& s) {
  if (s.empty()) throw scalar_error("empty numeric literal");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    mpz_class num, den;
    try {
      num = mpz_class(s.substr(0, slash), 10);
      den = mpz_class(s.substr(slash + 1), 10);
    } catch (const std::invalid_argument&) {
      throw scalar_error("bad rational literal '" + s + "'");
    }
    if (den == 0) throw scalar_error("zero denominator in '" + s + "'");
    Rational r(num, den);
    r.canonicalize();
    return r;
  }
  return detail::rational_from_decimal(s);
}

template <>
inline double parse_scalar<double>(const std::string& s) {
  if (s.empty()) throw scalar_error("empty numeric literal");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    double num = std::stod(s.substr(0, slash));
    double den = std::stod(s.substr(slash + 1));
    if (den == 0.0) throw scalar_error("zero denominator in '" + s + "'");
    return num / den;
  }
  size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw scalar_error("bad numeric literal '" + s + "'");
  }
  if (pos != s.size()) throw scalar_error("bad numeric literal '" + s + "'");
  return v;
}

// Natural log of an integer magnitude; log(0) counts as 0.
inline double log_magnitude(const mpz_class& z) {
  if (z == 0) return 0.0;
  signed long exp2;
  double d = mpz_get_d_2exp(&exp2, z.get_mpz_t());
  return std::log(std::fabs(d)) + double(exp2) * std::log(2.0);
}

// Arithmetic height of a reduced rational: log max(|num|, |den|).
inline double log_height(const Rational& x) {
  return std::max(log_magnitude(x.get_num()), log_magnitude(x.get_den()));
}

inline size_t height_bits(const Rational& x) {
  size_t nb = mpz_sizeinbase(x.get_num().get_mpz_t(), 2);
  size_t db = mpz_sizeinbase(x.get_den().get_mpz_t(), 2);
  return std::max(nb, db);
}

}  // namespace polarint
