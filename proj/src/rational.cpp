#include "maxhom/rational.hpp"

#include "maxhom/error.hpp"

namespace maxhom {

Rational parse_rational(const std::string& s) {
  require_usage(!s.empty(), "empty rational literal");
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      Integer p(s);
      return Rational(p);
    }
    std::string ps = s.substr(0, slash), qs = s.substr(slash + 1);
    require_usage(!ps.empty() && !qs.empty(), "malformed rational: " + s);
    Integer p(ps), q(qs);
    require_usage(q != 0, "zero denominator: " + s);
    return Rational(p, q);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail_usage("malformed rational: " + s);
  }
}

std::string format_rational(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

namespace {

Integer ipow(Integer b, int e) {
  Integer r = 1;
  while (e > 0) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

// Smallest integer n >= 0 with n^k >= x (x a nonnegative rational).
Integer int_root_ceil(const Rational& x, int k) {
  if (x <= 0) return 0;
  Integer lo = 0, hi = 1;
  while (Rational(ipow(hi, k)) < x) hi <<= 1;
  while (lo + 1 < hi) {
    Integer mid = (lo + hi) / 2;
    if (Rational(ipow(mid, k)) >= x)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

} // namespace

Rational rational_sqrt_upper(const Rational& x, long long den_cap) {
  return rational_root_upper(x, 2, den_cap);
}

Rational rational_root_upper(const Rational& x, int k, long long den_cap) {
  require_usage(x >= 0 && k >= 1 && den_cap >= 1, "bad root query");
  if (x == 0) return Rational(0);
  if (k == 1) {
    // Smallest rational >= x with denominator <= cap is x itself when its
    // denominator fits; otherwise walk as below. Exact x always fits tests'
    // use, but handle the general case via the same machinery.
    if (denominator(x) <= Integer(den_cap)) return x;
  }
  {
    // Perfect k-th powers have exact rational roots.
    Integer p = numerator(x), q = denominator(x);
    Integer rp = int_root_ceil(Rational(p), k), rq = int_root_ceil(Rational(q), k);
    if (ipow(rp, k) == p && ipow(rq, k) == q && rq <= Integer(den_cap))
      return Rational(rp, rq);
  }
  auto pow_ge = [&](const Integer& p, const Integer& q) {
    return Rational(ipow(p, k), ipow(q, k)) >= x;
  };
  // Bracket the real root strictly: lo^k < x <= hi^k, hi minimal integer.
  Integer hip = int_root_ceil(x, k), hiq = 1;
  Integer lop = hip - 1, loq = 1;
  Integer cap(den_cap);
  // Stern-Brocot walk with batched mediant steps. Invariant: lo^k < x,
  // hi^k >= x, and every rational strictly between them has denominator
  // > max(loq, hiq) among already-passed candidates. The final hi is the
  // least upper approximation with denominator <= cap.
  while (loq + hiq <= cap) {
    if (pow_ge(lop + hip, loq + hiq)) {
      // hi can move toward the root by absorbing lo; find the largest
      // multiplicity t that keeps hi^k >= x within the cap.
      Integer t_cap = (cap - hiq) / loq;
      Integer lo_t = 1, hi_t = 1;
      while (hi_t * 2 <= t_cap && pow_ge(lop * (hi_t * 2) + hip, loq * (hi_t * 2) + hiq))
        hi_t *= 2;
      lo_t = hi_t;
      Integer upper = boost::multiprecision::min(t_cap, hi_t * 2);
      while (lo_t < upper) {
        Integer mid = (lo_t + upper + 1) / 2;
        if (pow_ge(lop * mid + hip, loq * mid + hiq))
          lo_t = mid;
        else
          upper = mid - 1;
      }
      hip += lop * lo_t;
      hiq += loq * lo_t;
    } else {
      // lo moves toward the root by absorbing hi; largest t keeping lo^k < x.
      Integer t_cap = (cap - loq) / hiq;
      Integer hi_t = 1;
      while (hi_t * 2 <= t_cap && !pow_ge(hip * (hi_t * 2) + lop, hiq * (hi_t * 2) + loq))
        hi_t *= 2;
      Integer lo_t = hi_t;
      Integer upper = boost::multiprecision::min(t_cap, hi_t * 2);
      while (lo_t < upper) {
        Integer mid = (lo_t + upper + 1) / 2;
        if (!pow_ge(hip * mid + lop, hiq * mid + loq))
          lo_t = mid;
        else
          upper = mid - 1;
      }
      lop += hip * lo_t;
      loq += hiq * lo_t;
    }
  }
  return Rational(hip, hiq);
}

long long floor_log(const Rational& base, const Rational& x) {
  require_usage(base > 1 && x > 0, "floor_log needs base > 1, x > 0");
  long long e = 0;
  Rational p(1);
  if (x >= 1) {
    while (p * base <= x) {
      p *= base;
      ++e;
    }
    return e;
  }
  while (p > x) {
    p /= base;
    --e;
  }
  return e;
}

} // namespace maxhom
