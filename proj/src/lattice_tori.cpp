#include "serrehom/lattice_tori.hpp"

namespace serrehom {

namespace {

// 2x2 rational matrix of multiplication by c on the (1, omega) coordinates.
RatMatrix mult2(const FieldElement& c) {
  ImQuadField F = c.field();
  RatMatrix m(2, 2);
  m.at(0, 0) = c.a;
  m.at(1, 0) = c.b;
  m.at(0, 1) = c.b * F.w2a();
  m.at(1, 1) = c.a + c.b * F.w2b();
  return m;
}

RatMatrix conj2(const ImQuadField& F) {
  RatMatrix m(2, 2);
  m.at(0, 0) = 1;
  m.at(0, 1) = F.trace_omega();
  m.at(1, 1) = -1;
  return m;
}

RatMatrix rat_block_diag(const RatMatrix& b, std::size_t n) {
  RatMatrix m(b.rows * n, b.cols * n);
  for (std::size_t q = 0; q < n; ++q)
    for (std::size_t i = 0; i < b.rows; ++i)
      for (std::size_t j = 0; j < b.cols; ++j)
        m.at(q * b.rows + i, q * b.cols + j) = b.at(i, j);
  return m;
}

RatMatrix rat_add(const RatMatrix& a, const RatMatrix& b) {
  RatMatrix c = a;
  for (std::size_t i = 0; i < c.e.size(); ++i) c.e[i] += b.e[i];
  return c;
}

// Swap-conjugate involution on one Res factor (flat 4x4).
RatMatrix res_sigma_flat(const ImQuadField& F) {
  RatMatrix c = conj2(F);
  RatMatrix m(4, 4);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      m.at(i, 2 + j) = c.at(i, j);
      m.at(2 + i, j) = c.at(i, j);
    }
  return m;
}

// Ring element r acts as (r x, theta(r) y) with theta(r) = conj(sigma r);
// this is what the commutation law sigma r = (sigma r) sigma forces on the
// swap-conjugate model.
FieldElement res_theta(const GaloisGroup& g, const FieldElement& r) {
  return conjugate(g.apply(1, r));
}

// Flat matrix of the left action of one twisted-ring element on a single
// Res factor (2|G| F-coordinates).
RatMatrix res_op(const TwistedRingElement& x) {
  const GaloisGroup& g = x.group;
  const ImQuadField& F = x.ring.field;
  if (g.order == 1) return mult2(x.c[0]);
  auto rho = [&](const FieldElement& r) {
    RatMatrix m(4, 4);
    RatMatrix a = mult2(r), b = mult2(res_theta(g, r));
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        m.at(i, j) = a.at(i, j);
        m.at(2 + i, 2 + j) = b.at(i, j);
      }
    return m;
  };
  RatMatrix out = rho(x.c[0]);
  if (!x.c[1].is_zero()) out = rat_add(out, mul(rho(x.c[1]), res_sigma_flat(F)));
  return out;
}

std::vector<Rat> mat_vec_rat(const RatMatrix& a, const std::vector<Rat>& v) {
  std::vector<Rat> r(a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j)
      if (a.at(i, j) != 0) r[i] += a.at(i, j) * v[j];
  return r;
}

// dst-lattice cap (rational row span of image_rows), as a QLattice.
QLattice image_saturation(const RatMatrix& image_rows, const QLattice& dst) {
  // y lies in the row span iff y is orthogonal to the right kernel.
  RatMatrix z = right_kernel(image_rows);
  if (z.rows == 0) return dst;
  // restrict dst to { w * B_dst : (w B_dst) z^T = 0 }
  RatMatrix test = mul(dst.rat_rows(), transpose(z));
  ZLattice w = kernel_saturated(test);
  RatMatrix rows(w.rank(), dst.ambient);
  RatMatrix dr = dst.rat_rows();
  for (std::size_t i = 0; i < w.rank(); ++i)
    for (std::size_t c = 0; c < dst.rank(); ++c) {
      if (w.basis.at(i, c) == 0) continue;
      for (std::size_t j = 0; j < dst.ambient; ++j)
        rows.at(i, j) += Rat(w.basis.at(i, c)) * dr.at(c, j);
    }
  return QLattice::from_rows(dst.ambient, rows);
}

// Image of a J-row under the group action, in ambient coordinates; nullopt
// when no action is available.
using SigmaImage =
    std::function<std::optional<std::vector<Rat>>(const std::vector<Rat>&)>;

// Finite quotient J / I for equal-rank lattices I <= J.
FiniteGroupData finite_quotient(const QLattice& j, const QLattice& i,
                                const SigmaImage& sigma_image) {
  if (i.rank() != j.rank()) throw RankMismatch("finite quotient of unequal ranks");
  FiniteGroupData out;
  const std::size_t r = j.rank();
  if (r == 0) return out;
  IntMatrix coords(i.rank(), r);
  RatMatrix jb = j.rat_rows();
  for (std::size_t k = 0; k < i.rank(); ++k) {
    auto x = solve_row(jb, i.row(k));
    if (!x) throw NotSublattice();
    for (std::size_t c = 0; c < r; ++c) {
      if ((*x)[c].get_den() != 1) throw NotSublattice();
      coords.at(k, c) = (*x)[c].get_num();
    }
  }
  auto s = snf(coords);
  for (const auto& d : s.factors) {
    if (d == 0) throw RankMismatch("quotient is not finite");
    out.order *= d;
    if (d > 1) out.invariants.push_back(d);
  }
  std::sort(out.invariants.begin(), out.invariants.end());

  if (sigma_image && out.order > 1) {
    // sigma in the generator coordinates z = x * v of the SNF.
    RatMatrix sj(r, r);
    for (std::size_t k = 0; k < r; ++k) {
      auto img = sigma_image(j.row(k));
      if (!img) return out;
      auto x = solve_row(jb, *img);
      if (!x) return out;  // sigma does not stabilize J; omit the action
      for (std::size_t c = 0; c < r; ++c) {
        if ((*x)[c].get_den() != 1) return out;
        sj.at(k, c) = (*x)[c];
      }
    }
    RatMatrix v(s.v);
    // z-coordinates transform by v^{-1} S v (row convention); v is
    // unimodular, so invert exactly over Q row by row.
    RatMatrix vinv(v.rows, v.cols);
    for (std::size_t k = 0; k < v.rows; ++k) {
      std::vector<Rat> unit(v.rows);
      unit[k] = 1;
      auto x = solve_row(v, unit);
      if (!x) throw InvariantViolation("SNF transform not invertible");
      for (std::size_t c = 0; c < v.rows; ++c) vinv.at(k, c) = (*x)[c];
    }
    RatMatrix mz = mul(mul(vinv, sj), v);
    // keep only the generators of nontrivial order; entries are reduced
    // modulo the column generator's order
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < s.factors.size(); ++k)
      if (s.factors[k] > 1) keep.push_back(k);
    IntMatrix sig(keep.size(), keep.size());
    for (std::size_t a = 0; a < keep.size(); ++a)
      for (std::size_t b = 0; b < keep.size(); ++b) {
        if (mz.at(keep[a], keep[b]).get_den() != 1) return out;
        Int red;
        mpz_fdiv_r(red.get_mpz_t(), mz.at(keep[a], keep[b]).get_num_mpz_t(),
                   s.factors[keep[b]].get_mpz_t());
        sig.at(a, b) = red;
      }
    out.sigma_on_gens = sig;
  }
  return out;
}

}  // namespace

RatMatrix flat_of_fmatrix(const FMatrix& a) {
  RatMatrix m(2 * a.rows, 2 * a.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) {
      RatMatrix b = mult2(a.at(i, j));
      for (std::size_t p = 0; p < 2; ++p)
        for (std::size_t q = 0; q < 2; ++q)
          m.at(2 * i + p, 2 * j + q) = b.at(p, q);
    }
  return m;
}

RatMatrix flat_of_semilinear(const FMatrix& a) {
  return mul(flat_of_fmatrix(a), rat_block_diag(conj2(a.field), a.cols));
}

CMCurve CMCurve::make(const QuadOrder& o, const FracIdeal& l, const GaloisGroup& g) {
  if (o.field != l.field) throw RingMismatch();
  if (!(multiplier_ring(l) == o))
    throw RingMismatch("lattice is not proper for the stated order");
  return CMCurve{o, l, g};
}

CMCurve CMCurve::principal(const QuadOrder& o, const GaloisGroup& g) {
  return make(o, o.as_ideal(), g);
}

LatticeTorus torus_of_curve(const CMCurve& e) {
  LatticeTorus t;
  t.field = e.order.field;
  t.ambient_f = 1;
  t.lattice = e.lattice.lat;
  return t;
}

LatticeTorus res_torus(const CMCurve& e) {
  if (e.group.order == 1) return torus_of_curve(e);
  if (e.group.order != 2) throw UnsupportedGroup();
  const ImQuadField& F = e.order.field;
  FracIdeal cl = ideal_conj(e.lattice);
  RatMatrix rows(4, 4);
  RatMatrix lr = e.lattice.lat.rat_rows();
  RatMatrix cr = cl.lat.rat_rows();
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      rows.at(i, j) = lr.at(i, j);
      rows.at(2 + i, 2 + j) = cr.at(i, j);
    }
  LatticeTorus t;
  t.field = F;
  t.ambient_f = 2;
  t.lattice = QLattice::from_rows(4, rows);
  FMatrix swap(F, 2, 2);
  swap.at(0, 1) = fe_rational(F, 1);
  swap.at(1, 0) = fe_rational(F, 1);
  t.descent = swap;
  // the descent is an involution and stabilizes the lattice
  RatMatrix ds = flat_of_semilinear(swap);
  for (std::size_t i = 0; i < t.lattice.rank(); ++i)
    if (!t.lattice.contains(mat_vec_rat(ds, t.lattice.row(i))))
      throw InvariantViolation("descent does not stabilize the lattice");
  return t;
}

HomTorusResult hom_torus(const PresentedModule& m, const CMCurve& e) {
  if (m.ring.kind != RingKind::Order || !(m.ring.as_order() == e.order))
    throw RingMismatch("module ring does not match the curve order");
  if (m.group != e.group) throw GroupMismatch();
  const int g = e.group.order;
  const std::size_t blk = 2 * g;  // flat size of one Res factor
  const std::size_t n = m.gens();
  const std::size_t mr = m.pres.rows;
  const ImQuadField& F = e.order.field;

  // flat matrix of the presentation acting on (Res E)^n -> (Res E)^m
  RatMatrix t(mr * blk, n * blk);
  for (std::size_t i = 0; i < mr; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      RatMatrix b = res_op(m.pres.at(i, j));
      for (std::size_t p = 0; p < blk; ++p)
        for (std::size_t q = 0; q < blk; ++q)
          t.at(i * blk + p, j * blk + q) = b.at(p, q);
    }

  // ambient lattice of Res^n
  LatticeTorus res1 = res_torus(e);
  QLattice src;
  {
    RatMatrix one = res1.lattice.rat_rows();
    RatMatrix rows(n * blk, n * blk);
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t i = 0; i < blk; ++i)
        for (std::size_t j = 0; j < blk; ++j)
          rows.at(q * blk + i, q * blk + j) = one.at(i, j);
    src = QLattice::from_rows(n * blk, rows);
  }
  QLattice dst;
  {
    RatMatrix one = res1.lattice.rat_rows();
    RatMatrix rows(mr * blk, mr * blk);
    for (std::size_t q = 0; q < mr; ++q)
      for (std::size_t i = 0; i < blk; ++i)
        for (std::size_t j = 0; j < blk; ++j)
          rows.at(q * blk + i, q * blk + j) = one.at(i, j);
    dst = QLattice::from_rows(mr * blk, rows);
  }

  // identity component: lattice vectors annihilated by t
  RatMatrix bt = mul(src.rat_rows(), transpose(t));
  ZLattice x = kernel_saturated(bt);
  RatMatrix kr(x.rank(), n * blk);
  RatMatrix sr = src.rat_rows();
  for (std::size_t i = 0; i < x.rank(); ++i)
    for (std::size_t c = 0; c < src.rank(); ++c) {
      if (x.basis.at(i, c) == 0) continue;
      for (std::size_t j = 0; j < n * blk; ++j)
        kr.at(i, j) += Rat(x.basis.at(i, c)) * sr.at(c, j);
    }
  QLattice kernel_lat = QLattice::from_rows(n * blk, kr);

  // The group action restricts to the kernel exactly when the sigma-twist
  // of the presentation stays inside the relation span (integrally).
  bool conj_symmetric = false;
  RatMatrix sigma_n;
  if (g == 2) {
    sigma_n = rat_block_diag(res_sigma_flat(F), n);
    conj_symmetric = true;
    FlatModel fm = flatten(m);
    ZLattice relm = ZLattice::from_rows(fm.dim, fm.relations);
    for (std::size_t i = 0; i < mr && conj_symmetric; ++i) {
      std::vector<Int> row;
      for (std::size_t j = 0; j < n; ++j) {
        auto coords = tr_flatten(tr_twist(m.pres.at(i, j)));
        row.insert(row.end(), coords.begin(), coords.end());
      }
      if (!relm.contains(row)) conj_symmetric = false;
    }
  }

  // component group: (Lambda_dst cap im_Q t) / t(Lambda_src), with sigma
  // transported through a preimage under t when available
  FiniteGroupData comp;
  if (mr > 0) {
    RatMatrix image_rows = bt;  // rows: images of src basis
    QLattice img = QLattice::from_rows(mr * blk, image_rows);
    QLattice sat = image_saturation(image_rows, dst);
    SigmaImage sigma_image;
    if (conj_symmetric) {
      RatMatrix tt = transpose(t);
      sigma_image = [tt, sigma_n, t](const std::vector<Rat>& y)
          -> std::optional<std::vector<Rat>> {
        auto v = solve_row(tt, y);  // v * t^T = y, i.e. t v = y
        if (!v) return std::nullopt;
        return mat_vec_rat(t, mat_vec_rat(sigma_n, *v));
      };
    }
    comp = finite_quotient(sat, img, sigma_image);
  }

  HomTorusResult out;
  out.res_factors = n;
  out.torus.field = F;
  out.torus.ambient_f = n * g;
  out.torus.lattice = kernel_lat;
  // attach the restriction of the ambient involution when it stabilizes the
  // kernel lattice
  if (g == 2) {
    bool stable = conj_symmetric;
    for (std::size_t i = 0; i < kernel_lat.rank() && stable; ++i)
      if (!kernel_lat.contains(mat_vec_rat(sigma_n, kernel_lat.row(i))))
        stable = false;
    if (stable) {
      FMatrix swap1(F, 2, 2);
      swap1.at(0, 1) = fe_rational(F, 1);
      swap1.at(1, 0) = fe_rational(F, 1);
      FMatrix a(F, 2 * n, 2 * n);
      for (std::size_t q = 0; q < n; ++q)
        for (std::size_t i = 0; i < 2; ++i)
          for (std::size_t j = 0; j < 2; ++j)
            a.at(2 * q + i, 2 * q + j) = swap1.at(i, j);
      out.torus.descent = a;
    }
  }
  out.components = comp;
  return out;
}

CMCurve hom_ideal(const FracIdeal& i, const CMCurve& e) {
  if (i.is_zero()) throw ZeroIdeal();
  FracIdeal l = colon_ideal(e.lattice, i);
  return CMCurve::make(multiplier_ring(l), l, e.group);
}

FracIdeal kernel_coefficient_ideal(const HomTorusResult& r,
                                   const FieldElement& marked_generator) {
  // slot-x coordinates of the first generator block
  const QLattice& k = r.torus.lattice;
  RatMatrix proj(k.rank(), 2);
  for (std::size_t i = 0; i < k.rank(); ++i) {
    auto row = k.row(i);
    proj.at(i, 0) = row[0];
    proj.at(i, 1) = row[1];
  }
  QLattice p = QLattice::from_rows(2, proj);
  if (p.rank() != 2) throw RankMismatch("kernel does not project to a full lattice");
  FracIdeal ideal;
  ideal.field = r.torus.field;
  ideal.lat = p;
  return ideal_scale(inverse(marked_generator), ideal);
}

std::pair<FiniteGroupData, Int> kernel_and_degree(const FMatrix& map,
                                                  const LatticeTorus& src,
                                                  const LatticeTorus& dst) {
  if (map.rows != dst.ambient_f || map.cols != src.ambient_f)
    throw DimensionMismatch("map shape");
  RatMatrix t = flat_of_fmatrix(map);
  // lattice preservation
  for (std::size_t i = 0; i < src.lattice.rank(); ++i)
    if (!dst.lattice.contains(mat_vec_rat(t, src.lattice.row(i))))
      throw NotLatticeMap();
  if (src.lattice.rank() != dst.lattice.rank()) throw NotIsogeny("dimension mismatch");
  RatMatrix image_rows = mul(src.lattice.rat_rows(), transpose(t));
  QLattice img = QLattice::from_rows(2 * dst.ambient_f, image_rows);
  if (img.rank() != src.lattice.rank()) throw NotIsogeny("map not injective");
  Rat deg = lattice_index(img, dst.lattice);
  if (deg.get_den() != 1) throw InvariantViolation("non-integral degree");
  FiniteGroupData kernel = finite_quotient(dst.lattice, img, SigmaImage{});
  if (kernel.order != deg.get_num())
    throw InvariantViolation("kernel order disagrees with the lattice index");
  return {kernel, deg.get_num()};
}

IsogenyCert maximal_order_isogeny(const CMCurve& e) {
  const ImQuadField& F = e.order.field;
  QuadOrder max = QuadOrder::maximal(F);
  CMCurve ep = hom_ideal(max.as_ideal(), e);
  if (!(ep.order == max))
    throw InvariantViolation("target multiplier ring is not maximal");

  LatticeTorus te = torus_of_curve(e);
  LatticeTorus tep = torus_of_curve(ep);

  // inclusion-induced map E' -> E (identity on coordinates)
  auto incl = kernel_and_degree(FMatrix::identity(F, 1), tep, te);
  // recorded map: multiplication by f, E -> E'
  FMatrix mf = FMatrix::scalar(F, 1, fe_rational(F, Rat(e.order.f)));
  auto dual = kernel_and_degree(mf, te, tep);
  if (incl.second != dual.second)
    throw InvariantViolation("inclusion and dual degrees differ");

  IsogenyCert cert;
  cert.source = CurveDesc{F.d, e.order.f, e.lattice};
  cert.target = CurveDesc{F.d, max.f, ep.lattice};
  cert.map = mf;
  cert.degree = dual.second;
  cert.kernel = dual.first;
  cert.inclusion_degree = incl.second;
  return cert;
}

RatMatrix induced_torus_map(const ModuleMap& f, const CMCurve& e) {
  const int g = e.group.order;
  const std::size_t blk = 2 * g;
  RatMatrix t(f.src.gens() * blk, f.dst.gens() * blk);
  for (std::size_t j = 0; j < f.src.gens(); ++j)
    for (std::size_t l = 0; l < f.dst.gens(); ++l) {
      RatMatrix b = res_op(f.mat.at(j, l));
      for (std::size_t p = 0; p < blk; ++p)
        for (std::size_t q = 0; q < blk; ++q)
          t.at(j * blk + p, l * blk + q) = b.at(p, q);
    }
  return t;
}

SesTorusReport apply_ses(const ShortExactSeq& ses, const CMCurve& e) {
  SesTorusReport rep;
  rep.module_exact = ses_is_exact(ses);
  if (!rep.module_exact) throw NotExactInput("module sequence is not exact");

  // contravariant: A1 = Hom(M3), A2 = Hom(M2), A3 = Hom(M1)
  HomTorusResult a1 = hom_torus(ses.surj.dst, e);
  HomTorusResult a2 = hom_torus(ses.inj.dst, e);
  HomTorusResult a3 = hom_torus(ses.inj.src, e);
  rep.dims = {a1.torus.complex_dim(), a2.torus.complex_dim(),
              a3.torus.complex_dim()};
  rep.component_orders = {a1.components.order, a2.components.order,
                          a3.components.order};

  RatMatrix t_in = induced_torus_map(ses.surj, e);   // A1 -> A2
  RatMatrix t_out = induced_torus_map(ses.inj, e);   // A2 -> A3

  // lattice preservation
  rep.maps_preserve_lattices = true;
  for (std::size_t i = 0; i < a1.torus.lattice.rank(); ++i)
    if (!a2.torus.lattice.contains(mat_vec_rat(t_in, a1.torus.lattice.row(i))))
      rep.maps_preserve_lattices = false;
  for (std::size_t i = 0; i < a2.torus.lattice.rank(); ++i)
    if (!a3.torus.lattice.contains(mat_vec_rat(t_out, a2.torus.lattice.row(i))))
      rep.maps_preserve_lattices = false;

  // composite vanishes on the span of A1
  RatMatrix comp = mul(t_out, t_in);
  rep.composite_zero = true;
  for (std::size_t i = 0; i < a1.torus.lattice.rank(); ++i) {
    auto img = mat_vec_rat(comp, a1.torus.lattice.row(i));
    for (const auto& x : img)
      if (x != 0) rep.composite_zero = false;
  }

  // middle exactness over Q and the finite index
  RatMatrix im_rows = mul(a1.torus.lattice.rat_rows(), transpose(t_in));
  QLattice image = QLattice::from_rows(im_rows.cols, im_rows);
  RatMatrix ker_test = mul(a2.torus.lattice.rat_rows(), transpose(t_out));
  ZLattice w = kernel_saturated(ker_test);
  RatMatrix kr(w.rank(), a2.torus.lattice.ambient);
  RatMatrix a2r = a2.torus.lattice.rat_rows();
  for (std::size_t i = 0; i < w.rank(); ++i)
    for (std::size_t c = 0; c < a2.torus.lattice.rank(); ++c) {
      if (w.basis.at(i, c) == 0) continue;
      for (std::size_t j = 0; j < a2r.cols; ++j)
        kr.at(i, j) += Rat(w.basis.at(i, c)) * a2r.at(c, j);
    }
  QLattice mid_kernel = QLattice::from_rows(kr.cols, kr);
  rep.subspace_exact = image.rank() == mid_kernel.rank();
  if (rep.subspace_exact && image.rank() > 0)
    rep.subspace_exact = mid_kernel.contains(image);
  rep.middle_index = 1;
  if (rep.subspace_exact && image.rank() > 0) {
    Rat idx = lattice_index(image, mid_kernel);
    rep.middle_index = idx.get_num();
  }

  // finite kernel of the right-hand map on identity components
  RatMatrix end_rows = mul(a2.torus.lattice.rat_rows(), transpose(t_out));
  QLattice end_image = QLattice::from_rows(end_rows.cols, end_rows);
  QLattice end_sat = image_saturation(end_rows, a3.torus.lattice);
  rep.end_surjective = end_image.rank() == a3.torus.lattice.rank();
  rep.end_kernel_order = 1;
  if (end_image.rank() > 0) {
    FiniteGroupData q = finite_quotient(end_sat, end_image, SigmaImage{});
    rep.end_kernel_order = q.order;
  }

  rep.exact = rep.module_exact && rep.maps_preserve_lattices &&
              rep.composite_zero && rep.subspace_exact &&
              rep.end_surjective && rep.middle_index == 1 &&
              rep.end_kernel_order == rep.component_orders[0];
  return rep;
}

}  // namespace serrehom
