#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "serrehom/lattice_tori.hpp"

using namespace serrehom;

namespace {

std::vector<Rat> apply_rat(const RatMatrix& a, const std::vector<Rat>& v) {
  std::vector<Rat> r(a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j)
      if (a.at(i, j) != 0) r[i] += a.at(i, j) * v[j];
  return r;
}

// random ideal with multiplier ring exactly o (throws away other draws)
FracIdeal random_proper_ideal(std::mt19937_64& rng, const QuadOrder& o) {
  std::uniform_int_distribution<long> d(-4, 4);
  for (;;) {
    FieldElement x(o.field, Rat(d(rng)), Rat(d(rng)) * Rat(o.f));
    if (x.is_zero()) continue;
    // gamma * O is always proper for O
    auto l = ideal_mul(FracIdeal::from_basis(fe_rational(o.field, 1), x),
                       o.as_ideal());
    if (multiplier_ring(l) == o) return l;
  }
}

// random (ideal, twist) pair: i = gamma * i0 with i0 conj-stable,
// u = gamma / conj(gamma), so that u * conj(i) = i and N(u) = 1.
std::pair<FracIdeal, FieldElement> random_twisted_ideal(std::mt19937_64& rng,
                                                        const QuadOrder& o) {
  std::uniform_int_distribution<long> d(-3, 3);
  for (;;) {
    FieldElement gamma(o.field, Rat(d(rng)), Rat(d(rng)) * Rat(o.f));
    if (gamma.is_zero()) continue;
    FracIdeal i0 = o.as_ideal();
    FracIdeal i = ideal_scale(gamma, i0);
    FieldElement u = div(gamma, conjugate(gamma));
    if (multiplier_ring(i) == o) return {i, u};
  }
}

}  // namespace

TEST_CASE("res_torus") {
  auto F = ImQuadField::of(-1);
  auto o = QuadOrder::maximal(F);

  // |G| = 1: the curve itself, no descent
  auto e1 = CMCurve::principal(o, GaloisGroup::c1());
  auto t1 = res_torus(e1);
  CHECK(t1.ambient_f == 1);
  CHECK(t1.complex_dim() == 1);
  CHECK(!t1.descent.has_value());

  // d = -1, f = 1: Lambda = Z[i] + Z[i], swap-conjugate descent stabilizes
  auto g = GaloisGroup::c2(GroupAction::conjugation);
  auto e = CMCurve::principal(o, g);
  auto t = res_torus(e);
  CHECK(t.ambient_f == 2);
  CHECK(t.complex_dim() == 2);
  REQUIRE(t.descent.has_value());
  RatMatrix ds = flat_of_semilinear(*t.descent);
  for (std::size_t i = 0; i < t.lattice.rank(); ++i)
    CHECK(t.lattice.contains(apply_rat(ds, t.lattice.row(i))));
  // applying the involution twice is the identity
  RatMatrix twice = mul(ds, ds);
  CHECK(twice == RatMatrix::identity(4));
}

TEST_CASE("hom_torus functor unit and regular module") {
  std::mt19937_64 rng(17);
  auto g = GaloisGroup::c2(GroupAction::conjugation);
  for (auto [d, f] : std::vector<std::pair<long, long>>{
           {-1, 1}, {-1, 2}, {-3, 1}, {-7, 2}, {-2, 1}}) {
    auto o = QuadOrder::of(ImQuadField::of(d), f);
    auto ring = CoeffRing::order(o);
    for (int t = 0; t < 3; ++t) {
      auto L = random_proper_ideal(rng, o);
      auto e = CMCurve::make(o, L, g);
      // Hom(R, E) = E: the kernel coefficient lattice is exactly L
      auto res = hom_torus(PresentedModule::base_ring(ring, g), e);
      CHECK(res.torus.complex_dim() == 1);
      CHECK(res.components.order == 1);
      auto ideal = kernel_coefficient_ideal(res, fe_rational(o.field, 1));
      CHECK(ideal == e.lattice);
      // Hom(R<G>, E) = Res E
      auto reg = hom_torus(PresentedModule::regular(ring, g, 1), e);
      CHECK(reg.torus.complex_dim() == 2);
      CHECK(reg.torus.lattice == res_torus(e).lattice);
      CHECK(reg.components.order == 1);
    }
  }
}

TEST_CASE("hom_torus on the conductor quotient") {
  auto g = GaloisGroup::c2(GroupAction::conjugation);
  auto o = QuadOrder::of(ImQuadField::of(-1), 2);
  auto e = CMCurve::principal(o, g);
  auto ses = conductor_ses(o, g);
  auto res = hom_torus(ses.surj.dst, e);
  CHECK(res.torus.complex_dim() == 0);
  CHECK(res.components.order == 2);
  CHECK(res.components.invariants == std::vector<Int>{2});
}

TEST_CASE("hom_ideal examples") {
  auto F = ImQuadField::of(-1);
  auto g = GaloisGroup::c2(GroupAction::conjugation);
  auto o2 = QuadOrder::of(F, 2);
  auto e = CMCurve::principal(o2, g);

  CHECK(hom_ideal(o2.as_ideal(), e).lattice == e.lattice);

  // i = O_F, L = O: lattice 2*Z[i] with maximal multiplier ring
  auto ep = hom_ideal(QuadOrder::maximal(F).as_ideal(), e);
  auto two_zi = ideal_scale(fe_rational(F, 2), QuadOrder::maximal(F).as_ideal());
  CHECK(ep.lattice == two_zi);
  CHECK(ep.order.f == 1);

  // principal ideals scale the lattice
  FieldElement x(F, 3, 2);
  auto principal = ideal_mul(FracIdeal::from_basis(fe_rational(F, 1), x),
                             o2.as_ideal());
  auto scaled = hom_ideal(ideal_scale(x, o2.as_ideal()), e);
  CHECK(scaled.lattice == ideal_scale(inverse(x), e.lattice));
  (void)principal;
}

TEST_CASE("hom_ideal agrees with hom_torus on twisted rank-1 modules") {
  std::mt19937_64 rng(23);
  auto g = GaloisGroup::c2(GroupAction::conjugation);
  int done = 0;
  for (auto [d, f] : std::vector<std::pair<long, long>>{
           {-1, 1}, {-1, 2}, {-3, 2}, {-7, 1}, {-2, 3}}) {
    auto o = QuadOrder::of(ImQuadField::of(d), f);
    for (int t = 0; t < 4; ++t) {
      auto e = CMCurve::make(o, random_proper_ideal(rng, o), g);
      auto [i, u] = random_twisted_ideal(rng, o);
      auto m = module_from_ideal(i, u, o, g);
      auto hres = hom_torus(m, e);
      CHECK(hres.torus.complex_dim() == 1);
      auto lat = kernel_coefficient_ideal(hres, i.basis_element(0));
      CHECK(lat == hom_ideal(i, e).lattice);
      ++done;
    }
  }
  CHECK(done == 20);
}

TEST_CASE("hom_torus dimension equals rank over R") {
  std::mt19937_64 rng(29);
  auto g = GaloisGroup::c2(GroupAction::conjugation);
  std::uniform_int_distribution<long> d(-2, 2);
  auto o = QuadOrder::of(ImQuadField::of(-1), 1);
  auto ring = CoeffRing::order(o);
  auto e = CMCurve::principal(o, g);
  for (int t = 0; t < 12; ++t) {
    auto m = [&] {
      std::uniform_int_distribution<std::size_t> gd(1, 2), rd(0, 2);
      std::size_t n = gd(rng), mr = rd(rng);
      TwistedMatrix pres(ring, g, mr, n);
      for (auto& x : pres.e)
        for (int s = 0; s < 2; ++s)
          x.c[s] = FieldElement(ring.field, Rat(d(rng)), Rat(d(rng)));
      return PresentedModule::make(ring, g, pres);
    }();
    auto res = hom_torus(m, e);
    CHECK(res.torus.complex_dim() == rank_over_R(m));
  }
}

TEST_CASE("descent survives the kernel construction") {
  std::mt19937_64 rng(31);
  auto g = GaloisGroup::c2(GroupAction::conjugation);
  auto o = QuadOrder::of(ImQuadField::of(-3), 2);
  auto ring = CoeffRing::order(o);
  auto e = CMCurve::principal(o, g);
  // sigma-symmetric presentations inherit the involution
  for (const auto& m : {PresentedModule::base_ring(ring, g),
                        PresentedModule::regular(ring, g, 2)}) {
    auto res = hom_torus(m, e);
    REQUIRE(res.torus.descent.has_value());
  }
  // every output that carries descent is stabilized by it
  std::uniform_int_distribution<long> d(-2, 2);
  int with_descent = 0;
  for (int t = 0; t < 12; ++t) {
    TwistedMatrix pres(ring, g, t % 3, 1 + t % 2);
    for (auto& x : pres.e)
      for (int s = 0; s < 2; ++s)
        x.c[s] = FieldElement(ring.field, Rat(d(rng)), Rat(d(rng)) * Rat(o.f));
    auto res = hom_torus(PresentedModule::make(ring, g, pres), e);
    if (!res.torus.descent.has_value()) continue;
    ++with_descent;
    RatMatrix ds = flat_of_semilinear(*res.torus.descent);
    for (std::size_t i = 0; i < res.torus.lattice.rank(); ++i)
      CHECK(res.torus.lattice.contains(apply_rat(ds, res.torus.lattice.row(i))));
  }
  CHECK(with_descent > 0);
}

TEST_CASE("kernel_and_degree examples") {
  auto F = ImQuadField::of(-1);
  auto o = QuadOrder::maximal(F);
  auto e = CMCurve::principal(o, GaloisGroup::c2(GroupAction::conjugation));
  auto t = torus_of_curve(e);

  // multiplication by n has kernel (Z/n)^2 and degree n^2
  for (long n : {2L, 3L, 5L}) {
    auto [k, deg] = kernel_and_degree(
        FMatrix::scalar(F, 1, fe_rational(F, Rat(n))), t, t);
    CHECK(deg == n * n);
    CHECK(k.invariants == std::vector<Int>{n, n});
  }

  // multiplication by (1+i) on Z[i]: degree 2, kernel Z/2
  auto [k2, d2] = kernel_and_degree(
      FMatrix::scalar(F, 1, FieldElement(F, 1, 1)), t, t);
  CHECK(d2 == 2);
  CHECK(k2.invariants == std::vector<Int>{2});

  // identity
  auto [k1, d1] = kernel_and_degree(FMatrix::identity(F, 1), t, t);
  CHECK(d1 == 1);
  CHECK(k1.invariants.empty());

  // non-lattice map rejected
  CHECK_THROWS_AS(kernel_and_degree(
                      FMatrix::scalar(F, 1, fe_rational(F, Rat(1, 2))), t, t),
                  NotLatticeMap);
  // non-injective map rejected
  CHECK_THROWS_AS(kernel_and_degree(FMatrix(F, 1, 1), t, t), NotIsogeny);
}

TEST_CASE("isogeny degrees multiply under composition") {
  std::mt19937_64 rng(37);
  auto F = ImQuadField::of(-7);
  auto o = QuadOrder::maximal(F);
  auto e = CMCurve::principal(o, GaloisGroup::c2(GroupAction::conjugation));
  auto t = torus_of_curve(e);
  std::uniform_int_distribution<long> d(-3, 3);
  for (int k = 0; k < 15; ++k) {
    FieldElement x(F, Rat(d(rng)), Rat(d(rng)));
    FieldElement y(F, Rat(d(rng)), Rat(d(rng)));
    if (x.is_zero() || y.is_zero()) continue;
    if (!o.contains(x) || !o.contains(y)) continue;
    auto dx = kernel_and_degree(FMatrix::scalar(F, 1, x), t, t).second;
    auto dy = kernel_and_degree(FMatrix::scalar(F, 1, y), t, t).second;
    auto dxy = kernel_and_degree(FMatrix::scalar(F, 1, mul(x, y)), t, t).second;
    CHECK(dxy == dx * dy);
  }
}

TEST_CASE("maximal_order_isogeny on the desk-scale pairs") {
  auto g = GaloisGroup::c2(GroupAction::conjugation);
  for (auto [d, f] : std::vector<std::pair<long, long>>{
           {-1, 2}, {-1, 5}, {-3, 2}, {-3, 3}, {-7, 2}, {-2, 3}}) {
    auto o = QuadOrder::of(ImQuadField::of(d), f);
    auto e = CMCurve::principal(o, g);
    auto cert = maximal_order_isogeny(e);
    CHECK(cert.degree == f);
    CHECK(cert.kernel.order == f);
    CHECK(cert.inclusion_degree == f);
    CHECK(multiplier_ring(cert.target.lattice).f == 1);
    // kernel came out cyclic on every tested pair
    CHECK(cert.kernel.invariants == std::vector<Int>{Int(f)});
  }

  // f = 1 gives the identity certificate
  auto o1 = QuadOrder::maximal(ImQuadField::of(-1));
  auto cert1 = maximal_order_isogeny(CMCurve::principal(o1, g));
  CHECK(cert1.degree == 1);
  CHECK(cert1.kernel.order == 1);
}

TEST_CASE("maximal_order_isogeny on non-principal lattices") {
  std::mt19937_64 rng(43);
  auto g = GaloisGroup::c2(GroupAction::conjugation);
  for (auto [d, f] : std::vector<std::pair<long, long>>{{-1, 3}, {-3, 4}, {-2, 2}}) {
    auto o = QuadOrder::of(ImQuadField::of(d), f);
    for (int t = 0; t < 3; ++t) {
      auto e = CMCurve::make(o, random_proper_ideal(rng, o), g);
      auto cert = maximal_order_isogeny(e);
      CHECK(cert.degree == f);
      CHECK(cert.kernel.order == f);
      CHECK(multiplier_ring(cert.target.lattice).f == 1);
    }
  }
}

TEST_CASE("apply_ses on the conductor sequence") {
  auto g = GaloisGroup::c2(GroupAction::conjugation);
  for (auto [d, f] : std::vector<std::pair<long, long>>{
           {-1, 2}, {-1, 5}, {-3, 2}, {-3, 3}, {-7, 2}, {-2, 3}}) {
    auto o = QuadOrder::of(ImQuadField::of(d), f);
    auto e = CMCurve::principal(o, g);
    auto rep = apply_ses(conductor_ses(o, g), e);
    CHECK(rep.exact);
    CHECK(rep.dims == std::array<std::size_t, 3>{0, 1, 1});
    CHECK(rep.component_orders[0] == f);
    CHECK(rep.end_kernel_order == f);
    CHECK(rep.middle_index == 1);
  }
}

TEST_CASE("apply_ses on a split sequence and the identity sequence") {
  auto g = GaloisGroup::c2(GroupAction::conjugation);
  auto o = QuadOrder::of(ImQuadField::of(-1), 1);
  auto ring = CoeffRing::order(o);
  auto e = CMCurve::principal(o, g);

  // 0 -> R -> R<G> -> R<G>/R -> 0 with R embedded along sigma + 1
  auto m2 = PresentedModule::regular(ring, g, 1);
  TwistedMatrix inc(ring, g, 1, 1);
  inc.at(0, 0) = tr_add(TwistedRingElement::sigma(ring, g),
                        TwistedRingElement::one(ring, g));
  PresentedModule m1 = PresentedModule::base_ring(ring, g);
  TwistedMatrix quot_pres(ring, g, 1, 1);
  quot_pres.at(0, 0) = inc.at(0, 0);
  PresentedModule m3 = PresentedModule::make(ring, g, quot_pres);
  ShortExactSeq ses{ModuleMap{m1, m2, inc},
                    ModuleMap{m2, m3, TwistedMatrix::identity(ring, g, 1)}};
  REQUIRE(ses_is_exact(ses));
  auto rep = apply_ses(ses, e);
  CHECK(rep.exact);
  CHECK(rep.dims == std::array<std::size_t, 3>{1, 2, 1});

  // 0 -> M -> M -> 0 -> 0 with the identity map
  PresentedModule zero = PresentedModule::make(
      ring, g, TwistedMatrix::identity(ring, g, 1));
  ShortExactSeq triv{ModuleMap{zero, m2, TwistedMatrix(ring, g, 1, 1)},
                     ModuleMap{m2, m2, TwistedMatrix::identity(ring, g, 1)}};
  // the injection from the zero module is the zero map
  REQUIRE(ses_is_exact(triv));
  auto rep2 = apply_ses(triv, e);
  CHECK(rep2.exact);

  // a non-exact input is rejected
  ShortExactSeq bad{ModuleMap{m2, m2, TwistedMatrix::identity(ring, g, 1)},
                    ModuleMap{m2, m2, TwistedMatrix::identity(ring, g, 1)}};
  CHECK_THROWS_AS(apply_ses(bad, e), NotExactInput);
}

TEST_CASE("contravariance: induced maps compose in reverse order") {
  std::mt19937_64 rng(47);
  auto g = GaloisGroup::c2(GroupAction::conjugation);
  auto o = QuadOrder::of(ImQuadField::of(-1), 1);
  auto ring = CoeffRing::order(o);
  auto e = CMCurve::principal(o, g);
  std::uniform_int_distribution<long> d(-2, 2);
  auto rand_mat = [&](std::size_t r, std::size_t c) {
    TwistedMatrix m(ring, g, r, c);
    for (auto& x : m.e)
      for (int s = 0; s < 2; ++s)
        x.c[s] = FieldElement(ring.field, Rat(d(rng)), Rat(d(rng)));
    return m;
  };
  for (int t = 0; t < 10; ++t) {
    auto A = PresentedModule::regular(ring, g, 2);
    auto B = PresentedModule::regular(ring, g, 2);
    auto C = PresentedModule::regular(ring, g, 2);
    auto phi = ModuleMap{A, B, rand_mat(2, 2)};
    auto psi = ModuleMap{B, C, rand_mat(2, 2)};
    auto chi = ModuleMap{A, C, tr_matrix_mul(phi.mat, psi.mat)};
    CHECK(induced_torus_map(chi, e) ==
          mul(induced_torus_map(phi, e), induced_torus_map(psi, e)));
  }
}

TEST_CASE("component group carries a sigma action") {
  auto g = GaloisGroup::c2(GroupAction::conjugation);
  auto o = QuadOrder::of(ImQuadField::of(-1), 2);
  auto e = CMCurve::principal(o, g);
  auto res = hom_torus(conductor_ses(o, g).surj.dst, e);
  REQUIRE(res.components.sigma_on_gens.has_value());
  // sigma squared is the identity modulo the invariants
  const IntMatrix& s = *res.components.sigma_on_gens;
  const auto& inv = res.components.invariants;
  REQUIRE(s.rows == inv.size());
  IntMatrix s2 = mul(s, s);
  for (std::size_t i = 0; i < s2.rows; ++i)
    for (std::size_t j = 0; j < s2.cols; ++j) {
      Int expect = i == j ? 1 : 0;
      CHECK((s2.at(i, j) - expect) % inv[j] == 0);
    }
}
