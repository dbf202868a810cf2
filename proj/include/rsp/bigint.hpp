#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace rsp {

// Arbitrary-precision integer. Collection in polycyclic groups blows
// exponents up past any fixed width, so every exponent-valued quantity
// uses this type.
using Int = mpz_class;

// Floor division: e = q*n + r with 0 <= r < n (n > 0).
inline void fdiv_qr(Int& q, Int& r, const Int& e, const Int& n) {
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), e.get_mpz_t(), n.get_mpz_t());
}

inline Int mod_floor(const Int& e, const Int& n) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), e.get_mpz_t(), n.get_mpz_t());
  return r;
}

// Modular inverse; returns false if gcd(a, m) != 1.
inline bool mod_inverse(Int& out, const Int& a, const Int& m) {
  return mpz_invert(out.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) != 0;
}

inline bool fits_long(const Int& v) { return mpz_fits_slong_p(v.get_mpz_t()); }

inline long to_long(const Int& v) { return mpz_get_si(v.get_mpz_t()); }

inline std::string to_string(const Int& v) { return v.get_str(); }

}  // namespace rsp
