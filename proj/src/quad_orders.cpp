#include "serrehom/quad_orders.hpp"

#include <sstream>

namespace serrehom {

namespace {

bool squarefree(long long n) {
  if (n <= 0) return false;
  for (long long p = 2; p * p <= n; ++p)
    if (n % (p * p) == 0) return false;
  return true;
}

long long mod4(long long x) { return ((x % 4) + 4) % 4; }

}  // namespace

ImQuadField ImQuadField::of(long long d) {
  if (d >= 0) throw BadDiscriminant("d must be negative");
  if (!squarefree(-d)) throw BadDiscriminant("d must be squarefree");
  return ImQuadField{d};
}

long long ImQuadField::disc() const { return mod4(d) == 1 ? d : 4 * d; }
int ImQuadField::trace_omega() const { return mod4(d) == 1 ? 1 : 0; }
Rat ImQuadField::norm_omega() const {
  return mod4(d) == 1 ? make_rat(Int(long(1 - d)), Int(4)) : Rat(Int(long(-d)));
}
Rat ImQuadField::w2a() const {
  return mod4(d) == 1 ? make_rat(Int(long(d - 1)), Int(4)) : Rat(Int(long(d)));
}
int ImQuadField::w2b() const { return mod4(d) == 1 ? 1 : 0; }

std::string FieldElement::str() const {
  std::ostringstream os;
  if (b == 0) {
    os << a;
  } else {
    if (a != 0) os << a << (b > 0 ? " + " : " - ");
    else if (b < 0) os << "-";
    Rat ab = abs(b);
    if (ab != 1) os << ab << "*";
    os << "w";
  }
  return os.str();
}

FieldElement fe_rational(const ImQuadField& f, const Rat& a) {
  return FieldElement(f, a, 0);
}

FieldElement fe_omega(const ImQuadField& f) { return FieldElement(f, 0, 1); }

FieldElement fe_sqrt_d(const ImQuadField& f) {
  // sqrt(d) = 2*omega - 1 when d = 1 mod 4, else omega itself
  if (f.trace_omega() == 1) return FieldElement(f, -1, 2);
  return FieldElement(f, 0, 1);
}

namespace {
void check_field(const FieldElement& x, const FieldElement& y) {
  if (x.d != y.d) throw RingMismatch("elements of different fields");
}
}  // namespace

FieldElement conjugate(const FieldElement& x) {
  ImQuadField f = x.field();
  // conj(a + b*omega) = (a + b*tr(omega)) - b*omega
  return FieldElement(f, x.a + x.b * f.trace_omega(), -x.b);
}

Rat trace(const FieldElement& x) { return 2 * x.a + x.b * x.field().trace_omega(); }

Rat norm(const FieldElement& x) {
  ImQuadField f = x.field();
  return x.a * x.a + x.a * x.b * f.trace_omega() + x.b * x.b * f.norm_omega();
}

FieldElement add(const FieldElement& x, const FieldElement& y) {
  check_field(x, y);
  return FieldElement(x.field(), x.a + y.a, x.b + y.b);
}

FieldElement sub(const FieldElement& x, const FieldElement& y) {
  check_field(x, y);
  return FieldElement(x.field(), x.a - y.a, x.b - y.b);
}

FieldElement neg(const FieldElement& x) { return FieldElement(x.field(), -x.a, -x.b); }

FieldElement mul(const FieldElement& x, const FieldElement& y) {
  check_field(x, y);
  ImQuadField f = x.field();
  Rat bb = x.b * y.b;
  return FieldElement(f, x.a * y.a + bb * f.w2a(),
                      x.a * y.b + x.b * y.a + bb * f.w2b());
}

FieldElement inverse(const FieldElement& x) {
  if (x.is_zero()) throw DivisionByZero("field inverse of zero");
  Rat n = norm(x);
  FieldElement c = conjugate(x);
  return FieldElement(x.field(), c.a / n, c.b / n);
}

FieldElement div(const FieldElement& x, const FieldElement& y) {
  return mul(x, inverse(y));
}

QuadOrder QuadOrder::of(const ImQuadField& field, const Int& f) {
  if (f < 1) throw BadDiscriminant("conductor must be positive");
  return QuadOrder{field, f};
}

QuadOrder QuadOrder::from_discriminant(const Int& D) {
  if (D >= 0) throw BadDiscriminant("discriminant must be negative");
  Int m4 = ((D % 4) + 4) % 4;
  if (m4 != 0 && m4 != 1) throw BadDiscriminant("D must be 0 or 1 mod 4");
  // |D| = s^2 * m with m squarefree
  Int n = -D, s = 1, m = 1;
  for (Int p = 2; p * p <= n; ++p) {
    while (n % (p * p) == 0) {
      n /= p * p;
      s *= p;
    }
    if (n % p == 0) {
      n /= p;
      m *= p;
    }
  }
  m *= n;
  long long mll = m.get_si();
  if (((-m) % 4 + 4) % 4 == 1) {
    // disc_K = -m, f = s
    return of(ImQuadField::of(-mll), s);
  }
  // disc_K = -4m; need s even
  if (s % 2 != 0) throw BadDiscriminant("not of the form f^2 * disc_K");
  return of(ImQuadField::of(-mll), s / 2);
}

Int QuadOrder::disc() const { return f * f * Int(long(field.disc())); }

bool QuadOrder::contains(const FieldElement& x) const {
  if (x.d != field.d) return false;
  if (x.a.get_den() != 1 || x.b.get_den() != 1) return false;
  return x.b.get_num() % f == 0;
}

FracIdeal QuadOrder::as_ideal() const {
  return FracIdeal::from_basis(fe_rational(field, 1),
                               FieldElement(field, 0, Rat(f)));
}

FracIdeal FracIdeal::from_basis(const FieldElement& b1, const FieldElement& b2) {
  if (b1.d != b2.d) throw RingMismatch("ideal basis fields");
  return from_generators(b1.field(), {b1, b2});
}

FracIdeal FracIdeal::from_generators(const ImQuadField& f,
                                     const std::vector<FieldElement>& gens) {
  RatMatrix rows(gens.size(), 2);
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (gens[i].d != f.d) throw RingMismatch("ideal generator fields");
    rows.at(i, 0) = gens[i].a;
    rows.at(i, 1) = gens[i].b;
  }
  FracIdeal l;
  l.field = f;
  l.lat = QLattice::from_rows(2, rows);
  return l;
}

FieldElement FracIdeal::basis_element(std::size_t i) const {
  auto r = lat.row(i);
  return FieldElement(field, r[0], r[1]);
}

bool FracIdeal::contains(const FieldElement& x) const {
  if (x.d != field.d) return false;
  return lat.contains({x.a, x.b});
}

FracIdeal ideal_scale(const FieldElement& c, const FracIdeal& l) {
  if (c.is_zero()) throw ZeroIdeal("scaling by zero");
  std::vector<FieldElement> gens;
  for (std::size_t i = 0; i < l.lat.rank(); ++i)
    gens.push_back(mul(c, l.basis_element(i)));
  return FracIdeal::from_generators(l.field, gens);
}

FracIdeal ideal_conj(const FracIdeal& l) {
  std::vector<FieldElement> gens;
  for (std::size_t i = 0; i < l.lat.rank(); ++i)
    gens.push_back(conjugate(l.basis_element(i)));
  return FracIdeal::from_generators(l.field, gens);
}

FracIdeal ideal_mul(const FracIdeal& l, const FracIdeal& m) {
  if (l.field != m.field) throw RingMismatch("ideal fields");
  if (l.is_zero() || m.is_zero()) throw ZeroIdeal();
  std::vector<FieldElement> gens;
  for (std::size_t i = 0; i < l.lat.rank(); ++i)
    for (std::size_t j = 0; j < m.lat.rank(); ++j)
      gens.push_back(mul(l.basis_element(i), m.basis_element(j)));
  return FracIdeal::from_generators(l.field, gens);
}

FracIdeal colon_ideal(const FracIdeal& l, const FracIdeal& m) {
  if (l.field != m.field) throw RingMismatch("ideal fields");
  if (l.lat.rank() != 2 || m.lat.rank() != 2) throw ZeroIdeal("not full rank");
  // (l : m) = (m1^-1 l) meet (m2^-1 l) for a basis m1, m2 of m.
  FracIdeal a = ideal_scale(inverse(m.basis_element(0)), l);
  FracIdeal b = ideal_scale(inverse(m.basis_element(1)), l);
  FracIdeal r;
  r.field = l.field;
  r.lat = lattice_intersect(a.lat, b.lat);
  return r;
}

QuadOrder multiplier_ring(const FracIdeal& l) {
  if (l.is_zero()) throw ZeroIdeal();
  FracIdeal r = colon_ideal(l, l);
  // An order containing 1 has canonical basis [[1,0],[0,f]].
  if (r.lat.den != 1 || r.lat.rank() != 2 || r.lat.basis.at(0, 0) != 1 ||
      r.lat.basis.at(0, 1) != 0 || r.lat.basis.at(1, 0) != 0)
    throw InvariantViolation("multiplier ring is not an order");
  return QuadOrder::of(l.field, r.lat.basis.at(1, 1));
}

Rat ideal_index(const FracIdeal& sub, const FracIdeal& sup) {
  if (sub.field != sup.field) throw RingMismatch("ideal fields");
  return lattice_index(sub.lat, sup.lat);
}

FieldElement purely_imaginary_generator(const QuadOrder& o) {
  const ImQuadField& F = o.field;
  Int f = o.f;
  if (F.trace_omega() == 0) {
    // trace-zero sublattice of Z + f*omega*Z is generated by f*omega
    return FieldElement(F, 0, Rat(f));
  }
  // 2a + bf = 0 with minimal positive b*f
  if (f % 2 == 0) return FieldElement(F, Rat(-f / 2), Rat(f));
  return FieldElement(F, Rat(-f), Rat(2 * f));
}

}  // namespace serrehom
