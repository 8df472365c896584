#pragma once

#include <mpfr.h>

#include <cmath>
#include <utility>

namespace bfexact::detail {

// Thin owning wrapper over mpfr_t. Precision is fixed per object at
// construction; results take the precision of the left operand.
class MpReal {
 public:
  explicit MpReal(mpfr_prec_t prec, double v = 0.0) {
    mpfr_init2(x_, prec);
    mpfr_set_d(x_, v, MPFR_RNDN);
  }
  MpReal(const MpReal& o) {
    mpfr_init2(x_, mpfr_get_prec(o.x_));
    mpfr_set(x_, o.x_, MPFR_RNDN);
  }
  MpReal(MpReal&& o) noexcept {
    mpfr_init2(x_, mpfr_get_prec(o.x_));
    mpfr_swap(x_, o.x_);
  }
  MpReal& operator=(const MpReal& o) {
    if (this != &o) mpfr_set(x_, o.x_, MPFR_RNDN);
    return *this;
  }
  MpReal& operator=(MpReal&& o) noexcept {
    mpfr_swap(x_, o.x_);
    return *this;
  }
  MpReal& operator=(double v) {
    mpfr_set_d(x_, v, MPFR_RNDN);
    return *this;
  }
  ~MpReal() { mpfr_clear(x_); }

  mpfr_prec_t prec() const { return mpfr_get_prec(x_); }
  double to_double() const { return mpfr_get_d(x_, MPFR_RNDN); }
  int sign() const { return mpfr_sgn(x_); }
  bool is_zero() const { return mpfr_zero_p(x_) != 0; }
  bool is_finite() const { return mpfr_number_p(x_) != 0; }

  mpfr_ptr get() { return x_; }
  mpfr_srcptr get() const { return x_; }

  MpReal& operator+=(const MpReal& o) { mpfr_add(x_, x_, o.x_, MPFR_RNDN); return *this; }
  MpReal& operator-=(const MpReal& o) { mpfr_sub(x_, x_, o.x_, MPFR_RNDN); return *this; }
  MpReal& operator*=(const MpReal& o) { mpfr_mul(x_, x_, o.x_, MPFR_RNDN); return *this; }
  MpReal& operator/=(const MpReal& o) { mpfr_div(x_, x_, o.x_, MPFR_RNDN); return *this; }
  MpReal& operator*=(double v) { mpfr_mul_d(x_, x_, v, MPFR_RNDN); return *this; }
  MpReal& operator/=(double v) { mpfr_div_d(x_, x_, v, MPFR_RNDN); return *this; }
  MpReal& operator+=(double v) { mpfr_add_d(x_, x_, v, MPFR_RNDN); return *this; }
  MpReal& operator-=(double v) { mpfr_sub_d(x_, x_, v, MPFR_RNDN); return *this; }

  friend MpReal operator+(MpReal l, const MpReal& r) { return l += r; }
  friend MpReal operator-(MpReal l, const MpReal& r) { return l -= r; }
  friend MpReal operator*(MpReal l, const MpReal& r) { return l *= r; }
  friend MpReal operator/(MpReal l, const MpReal& r) { return l /= r; }
  friend MpReal operator+(MpReal l, double r) { return l += r; }
  friend MpReal operator-(MpReal l, double r) { return l -= r; }
  friend MpReal operator*(MpReal l, double r) { return l *= r; }
  friend MpReal operator/(MpReal l, double r) { return l /= r; }
  MpReal operator-() const {
    MpReal r(*this);
    mpfr_neg(r.x_, r.x_, MPFR_RNDN);
    return r;
  }

  friend bool operator<(const MpReal& l, const MpReal& r) { return mpfr_less_p(l.x_, r.x_) != 0; }
  friend bool operator>(const MpReal& l, const MpReal& r) { return mpfr_greater_p(l.x_, r.x_) != 0; }

 private:
  mpfr_t x_;
};

inline MpReal abs(const MpReal& v) {
  MpReal r(v);
  mpfr_abs(r.get(), r.get(), MPFR_RNDN);
  return r;
}
inline MpReal log(const MpReal& v) {
  MpReal r(v);
  mpfr_log(r.get(), v.get(), MPFR_RNDN);
  return r;
}
inline MpReal exp(const MpReal& v) {
  MpReal r(v);
  mpfr_exp(r.get(), v.get(), MPFR_RNDN);
  return r;
}
inline MpReal sqrt(const MpReal& v) {
  MpReal r(v);
  mpfr_sqrt(r.get(), v.get(), MPFR_RNDN);
  return r;
}
inline MpReal pow(const MpReal& v, const MpReal& e) {
  MpReal r(v);
  mpfr_pow(r.get(), v.get(), e.get(), MPFR_RNDN);
  return r;
}
inline MpReal gamma(const MpReal& v) {
  MpReal r(v);
  mpfr_gamma(r.get(), v.get(), MPFR_RNDN);
  return r;
}
inline MpReal digamma(const MpReal& v) {
  MpReal r(v);
  mpfr_digamma(r.get(), v.get(), MPFR_RNDN);
  return r;
}
inline MpReal const_pi(mpfr_prec_t prec) {
  MpReal r(prec);
  mpfr_const_pi(r.get(), MPFR_RNDN);
  return r;
}
// ln|x| as a double exponent estimate, for cancellation bookkeeping.
inline double log2_abs(const MpReal& v) {
  if (v.is_zero()) return -1e300;
  long e = 0;
  double m = mpfr_get_d_2exp(&e, v.get(), MPFR_RNDN);
  return static_cast<double>(e) + std::log2(std::abs(m));
}

}  // namespace bfexact::detail
