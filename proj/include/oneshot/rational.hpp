#pragma once
// Exact rational arithmetic used throughout: thin helpers around GMP's mpq.
// Probabilities are always exact rationals; doubles are derived views only.

#include <gmpxx.h>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace oneshot {

using Rat = mpq_class;
using Int = mpz_class;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses "n", "n/d" or a plain decimal like "0.25" into an exact rational.
inline Rat rat_parse(const std::string& s) {
  if (s.empty()) throw ParseError("empty rational literal");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Rat q;
    if (q.set_str(s, 10) != 0) throw ParseError("bad rational literal: " + s);
    if (q.get_den() == 0) throw ParseError("zero denominator: " + s);
    q.canonicalize();
    return q;
  }
  auto dot = s.find('.');
  if (dot == std::string::npos) {
    Rat q;
    if (q.set_str(s, 10) != 0) throw ParseError("bad integer literal: " + s);
    return q;
  }
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  size_t frac_len = s.size() - dot - 1;
  if (digits.empty() || digits == "-" || digits == "+")
    throw ParseError("bad decimal literal: " + s);
  Int num;
  if (num.set_str(digits, 10) != 0) throw ParseError("bad decimal literal: " + s);
  Int den = 1;
  for (size_t i = 0; i < frac_len; ++i) den *= 10;
  Rat q(num, den);
  q.canonicalize();
  return q;
}

inline std::string rat_str(const Rat& q) { return q.get_str(); }

inline double rat_double(const Rat& q) { return q.get_d(); }

// Exact dyadic rational from a double (doubles are binary rationals).
inline Rat rat_from_double(double x) {
  if (!std::isfinite(x)) throw PreconditionError("non-finite double to rational");
  Rat q;
  mpq_set_d(q.get_mpq_t(), x);
  return q;
}

// log2 of a positive rational, robust for huge numerators/denominators.
inline double rat_log2(const Rat& q) {
  if (sgn(q) <= 0) throw PreconditionError("log2 of non-positive rational");
  long exp_n = 0, exp_d = 0;
  double mn = mpz_get_d_2exp(&exp_n, q.get_num().get_mpz_t());
  double md = mpz_get_d_2exp(&exp_d, q.get_den().get_mpz_t());
  return (std::log2(mn) + double(exp_n)) - (std::log2(md) + double(exp_d));
}

// 2^e as an exact rational for integer e.
inline Rat rat_pow2(long e) {
  Rat q = 1;
  if (e >= 0)
    mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<unsigned long>(e));
  else
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<unsigned long>(-e));
  return q;
}

// 2^r for real r: exact when r is integral, otherwise the dyadic rational of
// exp2(r). Event thresholds stay exact relative to this frozen value.
inline Rat rat_exp2(double r) {
  if (std::floor(r) == r && std::abs(r) < 1e6) return rat_pow2(long(r));
  return rat_from_double(std::exp2(r));
}

inline Int rat_floor(const Rat& q) {
  Int z;
  mpz_fdiv_q(z.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return z;
}

inline Int rat_ceil(const Rat& q) {
  Int z;
  mpz_cdiv_q(z.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return z;
}

inline long int_to_long(const Int& z, const char* what = "integer") {
  if (!z.fits_slong_p()) throw BudgetError(std::string(what) + " exceeds machine range: " + z.get_str());
  return z.get_si();
}

}  // namespace oneshot
