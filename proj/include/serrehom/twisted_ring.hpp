#pragma once

#include <string>
#include <vector>

#include "serrehom/quad_orders.hpp"

namespace serrehom {

// Coefficient carrier for twisted-ring elements.  Mixing carriers is an
// error, never a coercion.
enum class RingKind { Integers, Order, Field };

struct CoeffRing {
  RingKind kind = RingKind::Integers;
  // For Integers the field tag only supplies coordinates; elements are
  // constrained to rational integers and conjugation fixes them.
  ImQuadField field{-1};
  Int f = 1;  // conductor, meaningful for Order

  static CoeffRing integers();
  static CoeffRing order(const QuadOrder& o);
  static CoeffRing whole_field(const ImQuadField& f);

  QuadOrder as_order() const;  // Order kind only
  bool contains(const FieldElement& x) const;
  // Z-rank of the carrier (1 for Z, 2 for an order); Field is not flattenable.
  std::size_t zrank() const;
  std::string str() const;

  bool operator==(const CoeffRing&) const = default;
};

enum class GroupAction { trivial, conjugation };

// Galois group with its action on coefficients.  The interface accepts any
// finite order but only C1 and C2 are constructible.
struct GaloisGroup {
  int order = 1;
  GroupAction action = GroupAction::trivial;

  static GaloisGroup make(int order, GroupAction action);
  static GaloisGroup c1() { return make(1, GroupAction::trivial); }
  static GaloisGroup c2(GroupAction a) { return make(2, a); }

  // g in {0, 1}: identity or sigma.
  FieldElement apply(int g, const FieldElement& x) const;
  int mul(int g, int h) const { return (g + h) % order; }
  int inv(int g) const { return (order - g) % order; }

  bool operator==(const GaloisGroup&) const = default;
};

// Element sum_g c_g * g of the twisted group ring R<G>.
struct TwistedRingElement {
  CoeffRing ring;
  GaloisGroup group;
  std::vector<FieldElement> c;  // indexed by group element

  TwistedRingElement() = default;
  TwistedRingElement(CoeffRing r, GaloisGroup g);

  static TwistedRingElement zero(const CoeffRing& r, const GaloisGroup& g);
  static TwistedRingElement one(const CoeffRing& r, const GaloisGroup& g);
  static TwistedRingElement scalar(const CoeffRing& r, const GaloisGroup& g,
                                   const FieldElement& x);
  static TwistedRingElement sigma(const CoeffRing& r, const GaloisGroup& g);

  const FieldElement& coeff(int g) const { return c[g]; }
  bool is_zero() const;
  std::string str() const;

  bool operator==(const TwistedRingElement&) const = default;
};

// sigma r = (sigma r) sigma: multiplication twists coefficients through the
// group action.
TwistedRingElement tr_mul(const TwistedRingElement& x, const TwistedRingElement& y);
TwistedRingElement tr_add(const TwistedRingElement& x, const TwistedRingElement& y);
TwistedRingElement tr_sub(const TwistedRingElement& x, const TwistedRingElement& y);
TwistedRingElement tr_neg(const TwistedRingElement& x);
TwistedRingElement tr_scalar(const FieldElement& r, const TwistedRingElement& x);
// Entrywise coefficient action of sigma: sigma * x * sigma^{-1}.
TwistedRingElement tr_twist(const TwistedRingElement& x);

inline TwistedRingElement operator*(const TwistedRingElement& x, const TwistedRingElement& y) { return tr_mul(x, y); }
inline TwistedRingElement operator+(const TwistedRingElement& x, const TwistedRingElement& y) { return tr_add(x, y); }
inline TwistedRingElement operator-(const TwistedRingElement& x, const TwistedRingElement& y) { return tr_sub(x, y); }
inline TwistedRingElement operator-(const TwistedRingElement& x) { return tr_neg(x); }

// Additive isomorphism onto |G| * zrank(R) integer coordinates; requires an
// integral carrier and integral coefficients.
std::vector<Int> tr_flatten(const TwistedRingElement& x);
TwistedRingElement tr_unflatten(const CoeffRing& r, const GaloisGroup& g,
                                const std::vector<Int>& coords);

struct TwistedMatrix {
  CoeffRing ring;
  GaloisGroup group;
  std::size_t rows = 0, cols = 0;
  std::vector<TwistedRingElement> e;

  TwistedMatrix() = default;
  TwistedMatrix(CoeffRing r, GaloisGroup g, std::size_t rows_, std::size_t cols_);
  static TwistedMatrix identity(const CoeffRing& r, const GaloisGroup& g, std::size_t n);

  TwistedRingElement& at(std::size_t i, std::size_t j) { return e[i * cols + j]; }
  const TwistedRingElement& at(std::size_t i, std::size_t j) const { return e[i * cols + j]; }

  bool operator==(const TwistedMatrix&) const = default;
};

// Order of factors respects noncommutativity.
TwistedMatrix tr_matrix_mul(const TwistedMatrix& a, const TwistedMatrix& b);
TwistedMatrix tr_matrix_vstack(const TwistedMatrix& a, const TwistedMatrix& b);

}  // namespace serrehom
