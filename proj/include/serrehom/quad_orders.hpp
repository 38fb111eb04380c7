#pragma once

#include <string>

#include "serrehom/exact_linalg.hpp"

namespace serrehom {

// Imaginary quadratic field Q(sqrt(d)), d squarefree and negative.  The
// canonical generator is omega = (1+sqrt(d))/2 when d = 1 mod 4 and sqrt(d)
// otherwise; all elements are stored in coordinates over (1, omega).
struct ImQuadField {
  long long d = -1;

  static ImQuadField of(long long d);  // validates squarefree, d < 0

  long long disc() const;          // fundamental discriminant
  int trace_omega() const;         // 1 if d = 1 mod 4, else 0
  Rat norm_omega() const;          // omega * conj(omega)
  // omega^2 = w2a + w2b * omega
  Rat w2a() const;
  int w2b() const;

  bool operator==(const ImQuadField&) const = default;
};

// Exact element a + b*omega of an imaginary quadratic field.
struct FieldElement {
  long long d = -1;
  Rat a, b;

  FieldElement() = default;
  FieldElement(const ImQuadField& f, Rat a_, Rat b_)
      : d(f.d), a(std::move(a_)), b(std::move(b_)) {}

  ImQuadField field() const { return ImQuadField{d}; }
  bool is_zero() const { return a == 0 && b == 0; }
  bool is_rational() const { return b == 0; }
  std::string str() const;

  bool operator==(const FieldElement&) const = default;
};

FieldElement fe_rational(const ImQuadField& f, const Rat& a);
FieldElement fe_omega(const ImQuadField& f);
FieldElement fe_sqrt_d(const ImQuadField& f);  // the element sqrt(d) itself

FieldElement conjugate(const FieldElement& x);
Rat norm(const FieldElement& x);
Rat trace(const FieldElement& x);
FieldElement add(const FieldElement& x, const FieldElement& y);
FieldElement sub(const FieldElement& x, const FieldElement& y);
FieldElement neg(const FieldElement& x);
FieldElement mul(const FieldElement& x, const FieldElement& y);
FieldElement inverse(const FieldElement& x);  // throws DivisionByZero
FieldElement div(const FieldElement& x, const FieldElement& y);

inline FieldElement operator+(const FieldElement& x, const FieldElement& y) { return add(x, y); }
inline FieldElement operator-(const FieldElement& x, const FieldElement& y) { return sub(x, y); }
inline FieldElement operator-(const FieldElement& x) { return neg(x); }
inline FieldElement operator*(const FieldElement& x, const FieldElement& y) { return mul(x, y); }
inline FieldElement operator/(const FieldElement& x, const FieldElement& y) { return div(x, y); }

struct FracIdeal;

// Order Z + f*omega*Z of conductor f inside the maximal order.
struct QuadOrder {
  ImQuadField field;
  Int f = 1;

  static QuadOrder of(const ImQuadField& field, const Int& f);
  static QuadOrder maximal(const ImQuadField& field) { return of(field, 1); }
  // Parses an arbitrary discriminant D < 0, D = 0 or 1 mod 4 into (d, f).
  static QuadOrder from_discriminant(const Int& D);

  Int disc() const;  // f^2 * disc_K
  bool contains(const FieldElement& x) const;
  FracIdeal as_ideal() const;

  bool operator==(const QuadOrder&) const = default;
};

// Full rank-2 lattice in F, stored canonically as a QLattice over the
// coordinate basis (1, omega).
struct FracIdeal {
  ImQuadField field;
  QLattice lat;  // ambient 2, rank 2

  static FracIdeal from_basis(const FieldElement& b1, const FieldElement& b2);
  static FracIdeal from_generators(const ImQuadField& f,
                                   const std::vector<FieldElement>& gens);

  FieldElement basis_element(std::size_t i) const;
  bool contains(const FieldElement& x) const;
  bool is_zero() const { return lat.rank() == 0; }

  bool operator==(const FracIdeal&) const = default;
};

FracIdeal ideal_scale(const FieldElement& c, const FracIdeal& l);
FracIdeal ideal_conj(const FracIdeal& l);
FracIdeal ideal_mul(const FracIdeal& l, const FracIdeal& m);
// (l : m) = { x in F : x*m <= l }
FracIdeal colon_ideal(const FracIdeal& l, const FracIdeal& m);
// The unique order for which l is proper: { x : x*l <= l }.
QuadOrder multiplier_ring(const FracIdeal& l);
// [sup : sub] as an exact positive rational (containment required).
Rat ideal_index(const FracIdeal& sub, const FracIdeal& sup);

// Nonzero alpha in the order with conj(alpha) = -alpha: the primitive
// generator of the trace-zero sublattice, taken with positive omega part.
FieldElement purely_imaginary_generator(const QuadOrder& o);

}  // namespace serrehom
