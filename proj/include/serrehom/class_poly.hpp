#pragma once

#include <mpfr.h>

#include <string>
#include <vector>

#include "serrehom/quad_orders.hpp"

namespace serrehom {

// Arbitrary-precision real with explicit working precision in bits.
class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t prec = 64);
  BigFloat(const BigFloat& o);
  BigFloat(BigFloat&& o) noexcept;
  BigFloat& operator=(const BigFloat& o);
  BigFloat& operator=(BigFloat&& o) noexcept;
  ~BigFloat();

  static BigFloat from_int(const Int& x, mpfr_prec_t prec);
  static BigFloat from_rat(const Rat& x, mpfr_prec_t prec);
  static BigFloat from_ui(unsigned long x, mpfr_prec_t prec);
  static BigFloat pi(mpfr_prec_t prec);

  mpfr_prec_t prec() const { return prec_; }
  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

  BigFloat add(const BigFloat& o) const;
  BigFloat sub(const BigFloat& o) const;
  BigFloat mul(const BigFloat& o) const;
  BigFloat div(const BigFloat& o) const;
  BigFloat neg() const;
  BigFloat abs() const;
  BigFloat sqrt() const;
  BigFloat exp() const;
  void sin_cos(BigFloat& s, BigFloat& c) const;

  int cmp(const BigFloat& o) const { return mpfr_cmp(v_, o.v_); }
  int sign() const { return mpfr_sgn(v_); }
  bool is_zero() const { return mpfr_zero_p(v_); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  // nearest integer and the distance to it
  Int round_to_int() const;
  BigFloat round_residue() const;
  std::string str(std::size_t digits = 30) const;

 private:
  mpfr_t v_;
  mpfr_prec_t prec_;
};

struct BigComplex {
  BigFloat re, im;

  explicit BigComplex(mpfr_prec_t prec = 64) : re(prec), im(prec) {}
  BigComplex(BigFloat r, BigFloat i) : re(std::move(r)), im(std::move(i)) {}

  mpfr_prec_t prec() const { return re.prec(); }

  BigComplex add(const BigComplex& o) const;
  BigComplex sub(const BigComplex& o) const;
  BigComplex mul(const BigComplex& o) const;
  BigComplex div(const BigComplex& o) const;
  BigComplex neg() const;
  BigComplex exp() const;  // e^(re) * (cos im + i sin im)
  BigFloat abs() const;
  std::string str(std::size_t digits = 30) const;
};

// Primitive reduced binary quadratic form of discriminant D < 0; the content
// of the unreduced input is recorded when a lattice is non-primitive.
struct ReducedForm {
  Int a, b, c;
  Int content = 1;

  Int disc() const { return b * b - 4 * a * c; }
  bool operator==(const ReducedForm&) const = default;
};

// Complete duplicate-free list of primitive reduced forms; count = h(D).
std::vector<ReducedForm> reduced_forms(const Int& D);
std::size_t class_number(const Int& D);

// j(tau) by the q-expansion of E4^3 / Delta, with the term count chosen so
// the truncation error stays below the requested precision.
BigComplex j_from_tau(const BigComplex& tau, mpfr_prec_t prec);

struct TauResult {
  BigComplex tau;
  ReducedForm form;
};

// Gauss-reduced homothety representative (1, tau) of a rank-2 lattice,
// with its reduced form.
TauResult tau_of_lattice(const FracIdeal& l, mpfr_prec_t prec);

struct ClassPolynomial {
  Int D;
  std::vector<Int> coeffs;  // constant term first, monic leading 1 included

  std::size_t degree() const { return coeffs.size() - 1; }
  std::string str() const;
};

struct PrecisionPolicy {
  mpfr_prec_t initial_bits = 0;  // 0: estimate from D
  int max_retries = 5;
  // rounding acceptance threshold, |residue| < 10^-residue_digits
  int residue_digits = 10;
  Int max_abs_disc = 1000000;
};

// Hilbert class polynomial: product over reduced forms of (x - j(tau_Q)),
// with coefficients rounded to integers under the residue test and
// doubling retries.  Form evaluations run in parallel; the product is
// assembled in sorted form order, so the result is scheduling-independent.
ClassPolynomial hilbert_class_poly(const Int& D, const PrecisionPolicy& policy = {});
// Serial reference implementation kept for testing and benchmarks.
ClassPolynomial hilbert_class_poly_serial(const Int& D,
                                          const PrecisionPolicy& policy = {});

struct CmVerification {
  Int D;
  std::string j_value;
  std::string abs_residual;
  std::string rel_residual;
  bool pass = false;
};

// Evaluates H_{disc(o)} at j(tau_l) and reports the relative residual;
// passes below 10^-10.
CmVerification verify_cm_j(const FracIdeal& l, const QuadOrder& o,
                           mpfr_prec_t prec,
                           const PrecisionPolicy& policy = {});

mpfr_prec_t prec_bits_for_digits(std::size_t digits);

}  // namespace serrehom
