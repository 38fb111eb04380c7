#include "serrehom/twisted_ring.hpp"

#include <sstream>

namespace serrehom {

CoeffRing CoeffRing::integers() { return CoeffRing{RingKind::Integers, ImQuadField{-1}, 1}; }

CoeffRing CoeffRing::order(const QuadOrder& o) {
  return CoeffRing{RingKind::Order, o.field, o.f};
}

CoeffRing CoeffRing::whole_field(const ImQuadField& f) {
  return CoeffRing{RingKind::Field, f, 1};
}

QuadOrder CoeffRing::as_order() const {
  if (kind != RingKind::Order) throw RingMismatch("not an order carrier");
  return QuadOrder::of(field, f);
}

bool CoeffRing::contains(const FieldElement& x) const {
  if (x.d != field.d) return false;
  switch (kind) {
    case RingKind::Integers:
      return x.b == 0 && x.a.get_den() == 1;
    case RingKind::Order:
      return x.a.get_den() == 1 && x.b.get_den() == 1 && x.b.get_num() % f == 0;
    case RingKind::Field:
      return true;
  }
  return false;
}

std::size_t CoeffRing::zrank() const {
  switch (kind) {
    case RingKind::Integers: return 1;
    case RingKind::Order: return 2;
    case RingKind::Field: throw RingMismatch("field carrier has no Z-rank");
  }
  return 0;
}

std::string CoeffRing::str() const {
  std::ostringstream os;
  switch (kind) {
    case RingKind::Integers: os << "Z"; break;
    case RingKind::Order: os << "O(d=" << field.d << ",f=" << f << ")"; break;
    case RingKind::Field: os << "F(d=" << field.d << ")"; break;
  }
  return os.str();
}

GaloisGroup GaloisGroup::make(int order, GroupAction action) {
  if (order != 1 && order != 2)
    throw UnsupportedGroup("only C1 and C2 are constructible");
  if (order == 1) action = GroupAction::trivial;
  return GaloisGroup{order, action};
}

FieldElement GaloisGroup::apply(int g, const FieldElement& x) const {
  if (g % order == 0 || action == GroupAction::trivial) return x;
  return conjugate(x);
}

TwistedRingElement::TwistedRingElement(CoeffRing r, GaloisGroup g)
    : ring(std::move(r)), group(g),
      c(group.order, fe_rational(ring.field, 0)) {}

TwistedRingElement TwistedRingElement::zero(const CoeffRing& r, const GaloisGroup& g) {
  return TwistedRingElement(r, g);
}

TwistedRingElement TwistedRingElement::one(const CoeffRing& r, const GaloisGroup& g) {
  TwistedRingElement x(r, g);
  x.c[0] = fe_rational(r.field, 1);
  return x;
}

TwistedRingElement TwistedRingElement::scalar(const CoeffRing& r, const GaloisGroup& g,
                                              const FieldElement& x) {
  if (!r.contains(x)) throw RingMismatch("scalar outside the carrier");
  TwistedRingElement t(r, g);
  t.c[0] = x;
  return t;
}

TwistedRingElement TwistedRingElement::sigma(const CoeffRing& r, const GaloisGroup& g) {
  if (g.order < 2) throw UnsupportedGroup("no sigma in the trivial group");
  TwistedRingElement t(r, g);
  t.c[1] = fe_rational(r.field, 1);
  return t;
}

bool TwistedRingElement::is_zero() const {
  for (const auto& x : c)
    if (!x.is_zero()) return false;
  return true;
}

std::string TwistedRingElement::str() const {
  std::ostringstream os;
  bool first = true;
  for (int g = 0; g < group.order; ++g) {
    if (c[g].is_zero()) continue;
    if (!first) os << " + ";
    os << "(" << c[g].str() << ")";
    if (g == 1) os << "*s";
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

namespace {
void check_carrier(const TwistedRingElement& x, const TwistedRingElement& y) {
  if (x.group != y.group) throw GroupMismatch();
  if (x.ring != y.ring) throw RingMismatch("twisted elements over different carriers");
}
}  // namespace

TwistedRingElement tr_mul(const TwistedRingElement& x, const TwistedRingElement& y) {
  check_carrier(x, y);
  TwistedRingElement z(x.ring, x.group);
  for (int g = 0; g < x.group.order; ++g) {
    if (x.c[g].is_zero()) continue;
    for (int h = 0; h < y.group.order; ++h) {
      if (y.c[h].is_zero()) continue;
      // (r*g)(s*h) = r * (g s) * (g h)
      int gh = x.group.mul(g, h);
      z.c[gh] = add(z.c[gh], mul(x.c[g], x.group.apply(g, y.c[h])));
    }
  }
  return z;
}

TwistedRingElement tr_add(const TwistedRingElement& x, const TwistedRingElement& y) {
  check_carrier(x, y);
  TwistedRingElement z(x.ring, x.group);
  for (int g = 0; g < x.group.order; ++g) z.c[g] = add(x.c[g], y.c[g]);
  return z;
}

TwistedRingElement tr_sub(const TwistedRingElement& x, const TwistedRingElement& y) {
  return tr_add(x, tr_neg(y));
}

TwistedRingElement tr_neg(const TwistedRingElement& x) {
  TwistedRingElement z(x.ring, x.group);
  for (int g = 0; g < x.group.order; ++g) z.c[g] = neg(x.c[g]);
  return z;
}

TwistedRingElement tr_scalar(const FieldElement& r, const TwistedRingElement& x) {
  TwistedRingElement z(x.ring, x.group);
  for (int g = 0; g < x.group.order; ++g) z.c[g] = mul(r, x.c[g]);
  return z;
}

TwistedRingElement tr_twist(const TwistedRingElement& x) {
  TwistedRingElement z(x.ring, x.group);
  for (int g = 0; g < x.group.order; ++g) z.c[g] = x.group.apply(1, x.c[g]);
  return z;
}

std::vector<Int> tr_flatten(const TwistedRingElement& x) {
  const std::size_t k0 = x.ring.zrank();
  std::vector<Int> out(k0 * x.group.order);
  for (int g = 0; g < x.group.order; ++g) {
    const FieldElement& v = x.c[g];
    if (!x.ring.contains(v)) throw RingMismatch("coefficient outside carrier");
    if (k0 == 1) {
      out[g] = v.a.get_num();
    } else {
      // coordinates over (1, f*omega)
      out[2 * g] = v.a.get_num();
      out[2 * g + 1] = v.b.get_num() / x.ring.f;
    }
  }
  return out;
}

TwistedRingElement tr_unflatten(const CoeffRing& r, const GaloisGroup& g,
                                const std::vector<Int>& coords) {
  const std::size_t k0 = r.zrank();
  if (coords.size() != k0 * (std::size_t)g.order)
    throw DimensionMismatch("tr_unflatten");
  TwistedRingElement x(r, g);
  for (int s = 0; s < g.order; ++s) {
    if (k0 == 1)
      x.c[s] = fe_rational(r.field, Rat(coords[s]));
    else
      x.c[s] = FieldElement(r.field, Rat(coords[2 * s]), Rat(coords[2 * s + 1] * r.f));
  }
  return x;
}

TwistedMatrix::TwistedMatrix(CoeffRing r, GaloisGroup g, std::size_t rows_,
                             std::size_t cols_)
    : ring(std::move(r)), group(g), rows(rows_), cols(cols_),
      e(rows_ * cols_, TwistedRingElement::zero(ring, group)) {}

TwistedMatrix TwistedMatrix::identity(const CoeffRing& r, const GaloisGroup& g,
                                      std::size_t n) {
  TwistedMatrix m(r, g, n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = TwistedRingElement::one(r, g);
  return m;
}

TwistedMatrix tr_matrix_mul(const TwistedMatrix& a, const TwistedMatrix& b) {
  if (a.ring != b.ring) throw RingMismatch("twisted matrix carriers");
  if (a.group != b.group) throw GroupMismatch();
  if (a.cols != b.rows) throw DimensionMismatch("tr_matrix_mul");
  TwistedMatrix c(a.ring, a.group, a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      if (a.at(i, k).is_zero()) continue;
      for (std::size_t j = 0; j < b.cols; ++j)
        c.at(i, j) = tr_add(c.at(i, j), tr_mul(a.at(i, k), b.at(k, j)));
    }
  return c;
}

TwistedMatrix tr_matrix_vstack(const TwistedMatrix& a, const TwistedMatrix& b) {
  if (a.rows == 0) return b;
  if (b.rows == 0) return a;
  if (a.ring != b.ring) throw RingMismatch("twisted matrix carriers");
  if (a.group != b.group) throw GroupMismatch();
  if (a.cols != b.cols) throw DimensionMismatch("tr_matrix_vstack");
  TwistedMatrix c(a.ring, a.group, a.rows + b.rows, a.cols);
  std::copy(a.e.begin(), a.e.end(), c.e.begin());
  std::copy(b.e.begin(), b.e.end(), c.e.begin() + a.e.size());
  return c;
}

}  // namespace serrehom
