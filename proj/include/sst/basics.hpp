#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace sst {

using Int = std::int64_t;
using Index = Eigen::Index;
using IntMat = Eigen::Matrix<Int, Eigen::Dynamic, Eigen::Dynamic>;
using IntVec = Eigen::Matrix<Int, Eigen::Dynamic, 1>;

/* Problems with user supplied data. The CLI maps these to exit code 1. */
struct InputError : std::runtime_error {
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/* A weight window that is missing, empty, or does not contain 0. */
struct WindowError : InputError {
  explicit WindowError(const std::string& what) : InputError(what) {}
};

/* Internal invariant violations, including int64 overflow. */
struct CalcError : std::logic_error {
  explicit CalcError(const std::string& what) : std::logic_error(what) {}
};

inline Int checked(__int128 v, const char* ctx) {
  if (v > __int128(std::numeric_limits<Int>::max()) ||
      v < __int128(std::numeric_limits<Int>::min()))
    throw CalcError(std::string("integer overflow in ") + ctx);
  return static_cast<Int>(v);
}

inline Int add_ck(Int a, Int b) { return checked(__int128(a) + b, "add"); }
inline Int sub_ck(Int a, Int b) { return checked(__int128(a) - b, "sub"); }
inline Int mul_ck(Int a, Int b) { return checked(__int128(a) * b, "mul"); }
inline Int neg_ck(Int a) { return checked(-__int128(a), "neg"); }

/* a + b*c in one guarded step, the workhorse of row and column operations */
inline Int fma_ck(Int a, Int b, Int c) {
  return checked(__int128(a) + __int128(b) * c, "fma");
}

inline Int abs_ck(Int a) { return a < 0 ? neg_ck(a) : a; }

inline Int gcd_nonneg(Int a, Int b) {
  a = abs_ck(a);
  b = abs_ck(b);
  while (b != 0) {
    Int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

/* g = a*x + b*y with g = gcd(a,b) >= 0 */
inline Int gcdext(Int a, Int b, Int& x, Int& y) {
  Int old_r = a, r = b;
  Int old_x = 1, xx = 0;
  Int old_y = 0, yy = 1;
  while (r != 0) {
    Int q = old_r / r;
    Int t = sub_ck(old_r, mul_ck(q, r));
    old_r = r;
    r = t;
    t = sub_ck(old_x, mul_ck(q, xx));
    old_x = xx;
    xx = t;
    t = sub_ck(old_y, mul_ck(q, yy));
    old_y = yy;
    yy = t;
  }
  if (old_r < 0) {
    old_r = neg_ck(old_r);
    old_x = neg_ck(old_x);
    old_y = neg_ck(old_y);
  }
  x = old_x;
  y = old_y;
  return old_r;
}

inline Int lcm_ck(Int a, Int b) {
  if (a == 0 || b == 0) return 0;
  Int g = gcd_nonneg(a, b);
  return abs_ck(mul_ck(a / g, b));
}

/* representative of a in [0, m), requires m > 0 */
inline Int mod_reduce(Int a, Int m) {
  if (m <= 0) throw CalcError("mod_reduce needs a positive modulus");
  Int r = a % m;
  return r < 0 ? r + m : r;
}

inline Int mod_inverse(Int a, Int m) {
  Int x, y;
  Int g = gcdext(mod_reduce(a, m), m, x, y);
  if (g != 1) throw CalcError("mod_inverse of a non-unit");
  return mod_reduce(x, m);
}

/* floor division, denominator must be positive */
inline Int floor_div(Int a, Int b) {
  if (b <= 0) throw CalcError("floor_div needs a positive denominator");
  Int q = a / b;
  if (a % b < 0) --q;
  return q;
}

inline bool is_prime(Int n) {
  if (n < 2) return false;
  for (Int d = 2; d <= n / d; ++d)
    if (n % d == 0) return false;
  return true;
}

/* distinct prime divisors, ascending; n must be nonzero */
inline std::vector<Int> prime_support(Int n) {
  n = abs_ck(n);
  if (n == 0) throw CalcError("prime_support of 0");
  std::vector<Int> out;
  for (Int d = 2; d <= n / d; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

/* matrix product with overflow checks on every accumulation */
inline IntMat mul_mat(const IntMat& a, const IntMat& b) {
  if (a.cols() != b.rows()) throw CalcError("mul_mat shape mismatch");
  IntMat c(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < b.cols(); ++j) {
      __int128 acc = 0;
      for (Index k = 0; k < a.cols(); ++k) acc += __int128(a(i, k)) * b(k, j);
      c(i, j) = checked(acc, "mul_mat");
    }
  return c;
}

inline IntMat ident(Index n) { return IntMat::Identity(n, n); }

inline IntMat hcat(const IntMat& a, const IntMat& b) {
  if (a.rows() != b.rows()) throw CalcError("hcat shape mismatch");
  IntMat c(a.rows(), a.cols() + b.cols());
  c << a, b;
  return c;
}

inline IntMat vcat(const IntMat& a, const IntMat& b) {
  if (a.cols() != b.cols()) throw CalcError("vcat shape mismatch");
  IntMat c(a.rows() + b.rows(), a.cols());
  c << a, b;
  return c;
}

}  // namespace sst
