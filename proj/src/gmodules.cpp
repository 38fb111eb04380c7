#include "serrehom/gmodules.hpp"

#include <algorithm>

namespace serrehom {

namespace {

// k0 x k0 matrix of multiplication by c on the order coordinates (1, f*omega)
// (or the single Z coordinate).
IntMatrix coeff_mult_block(const CoeffRing& r, const FieldElement& c) {
  if (!r.contains(c)) throw RingMismatch("coefficient outside carrier");
  if (r.zrank() == 1) {
    IntMatrix m(1, 1);
    m.at(0, 0) = c.a.get_num();
    return m;
  }
  Int u = c.a.get_num();
  Int v = c.b.get_num() / r.f;
  // (f w)^2 = f^2 w2a + f w2b (f w)
  Rat w2a = r.field.w2a();
  if (w2a.get_den() != 1) throw InvariantViolation("omega^2 not integral");
  IntMatrix m(2, 2);
  m.at(0, 0) = u;
  m.at(0, 1) = v * r.f * r.f * w2a.get_num();
  m.at(1, 0) = v;
  m.at(1, 1) = u + v * r.f * Int(r.field.w2b());
  return m;
}

// Conjugation on the order coordinates.
IntMatrix conj_block(const CoeffRing& r) {
  if (r.zrank() == 1) return IntMatrix::identity(1);
  IntMatrix m(2, 2);
  m.at(0, 0) = 1;
  m.at(0, 1) = r.f * Int(r.field.trace_omega());
  m.at(1, 1) = -1;
  return m;
}

// Block-diagonal copies of `b` (blocks x blocks of size b).
IntMatrix block_diag(const IntMatrix& b, std::size_t blocks) {
  IntMatrix m(b.rows * blocks, b.cols * blocks);
  for (std::size_t q = 0; q < blocks; ++q)
    for (std::size_t i = 0; i < b.rows; ++i)
      for (std::size_t j = 0; j < b.cols; ++j)
        m.at(q * b.rows + i, q * b.cols + j) = b.at(i, j);
  return m;
}

// Left multiplication by sigma on one R<G> coordinate block (size k).
IntMatrix sigma_coeff_block(const CoeffRing& r, const GaloisGroup& g) {
  const std::size_t k0 = r.zrank();
  if (g.order == 1) return IntMatrix::identity(k0);
  IntMatrix a = g.action == GroupAction::conjugation ? conj_block(r)
                                                     : IntMatrix::identity(k0);
  IntMatrix m(2 * k0, 2 * k0);
  for (std::size_t i = 0; i < k0; ++i)
    for (std::size_t j = 0; j < k0; ++j) {
      m.at(i, k0 + j) = a.at(i, j);
      m.at(k0 + i, j) = a.at(i, j);
    }
  return m;
}

// Left multiplication by a twisted-ring element on one coordinate block.
IntMatrix elem_action_block(const TwistedRingElement& x) {
  const CoeffRing& r = x.ring;
  const std::size_t k0 = r.zrank();
  const std::size_t k = k0 * x.group.order;
  IntMatrix acc(k, k);
  IntMatrix sig = sigma_coeff_block(r, x.group);
  IntMatrix pow = IntMatrix::identity(k);  // sigma^s
  for (int s = 0; s < x.group.order; ++s) {
    if (!x.c[s].is_zero()) {
      IntMatrix mult = block_diag(coeff_mult_block(r, x.c[s]), x.group.order);
      IntMatrix term = mul(mult, pow);
      for (std::size_t i = 0; i < acc.e.size(); ++i) acc.e[i] += term.e[i];
    }
    pow = mul(sig, pow);
  }
  return acc;
}

std::vector<Int> flatten_row(const TwistedMatrix& m, std::size_t i) {
  std::vector<Int> out;
  for (std::size_t j = 0; j < m.cols; ++j) {
    auto coords = tr_flatten(m.at(i, j));
    out.insert(out.end(), coords.begin(), coords.end());
  }
  return out;
}

// Rows spanning the relation lattice of the flattened module.
IntMatrix relation_rows(const PresentedModule& m) {
  const std::size_t k0 = m.ring.zrank();
  const std::size_t k = k0 * m.group.order;
  const std::size_t dim = m.gens() * k;
  std::vector<TwistedRingElement> zbasis;
  for (int s = 0; s < m.group.order; ++s)
    for (std::size_t t = 0; t < k0; ++t) {
      FieldElement w = t == 0 ? fe_rational(m.ring.field, 1)
                              : FieldElement(m.ring.field, 0, Rat(m.ring.f));
      auto el = TwistedRingElement::zero(m.ring, m.group);
      el.c[s] = w;
      zbasis.push_back(el);
    }
  IntMatrix rows(m.pres.rows * k, dim);
  for (std::size_t i = 0; i < m.pres.rows; ++i)
    for (std::size_t b = 0; b < zbasis.size(); ++b) {
      std::vector<Int> flat;
      for (std::size_t j = 0; j < m.gens(); ++j) {
        auto coords = tr_flatten(tr_mul(zbasis[b], m.pres.at(i, j)));
        flat.insert(flat.end(), coords.begin(), coords.end());
      }
      for (std::size_t c = 0; c < dim; ++c) rows.at(i * k + b, c) = flat[c];
    }
  return rows;
}

void check_integral_carrier(const PresentedModule& m) {
  if (m.ring.kind == RingKind::Field)
    throw RingMismatch("field carriers have no integral flattening");
}

}  // namespace

PresentedModule PresentedModule::make(const CoeffRing& r, const GaloisGroup& g,
                                      const TwistedMatrix& pres) {
  if (pres.ring != r || pres.group != g)
    throw RingMismatch("presentation carrier mismatch");
  for (const auto& x : pres.e)
    for (const auto& c : x.c)
      if (!r.contains(c)) throw RingMismatch("presentation entry outside ring");
  return PresentedModule{r, g, pres};
}

PresentedModule PresentedModule::regular(const CoeffRing& r, const GaloisGroup& g,
                                         std::size_t n) {
  return PresentedModule{r, g, TwistedMatrix(r, g, 0, n)};
}

PresentedModule PresentedModule::base_ring(const CoeffRing& r, const GaloisGroup& g) {
  if (g.order == 1) return regular(r, g, 1);
  TwistedMatrix pres(r, g, 1, 1);
  pres.at(0, 0) = tr_sub(TwistedRingElement::sigma(r, g),
                         TwistedRingElement::one(r, g));
  return PresentedModule{r, g, pres};
}

Int FlatModel::torsion_order() const {
  Int o = 1;
  for (const auto& t : torsion) o *= t;
  return o;
}

bool FlatModel::same_invariants(const FlatModel& other) const {
  return free_rank == other.free_rank && torsion == other.torsion;
}

std::size_t flat_block_size(const PresentedModule& m) {
  return m.ring.zrank() * m.group.order;
}

FlatModel flatten(const PresentedModule& m, const CancelHook* cancel) {
  check_integral_carrier(m);
  FlatModel out;
  out.dim = m.gens() * flat_block_size(m);
  out.relations = relation_rows(m);
  auto s = snf(out.relations, cancel);
  std::size_t nonzero = 0;
  for (const auto& d : s.factors)
    if (d != 0) {
      ++nonzero;
      if (d > 1) out.torsion.push_back(d);
    }
  std::sort(out.torsion.begin(), out.torsion.end());
  out.free_rank = out.dim - nonzero;

  const std::size_t k = flat_block_size(m);
  if (m.ring.kind == RingKind::Order) {
    FieldElement fw(m.ring.field, 0, Rat(m.ring.f));
    out.omega_action = block_diag(
        block_diag(coeff_mult_block(m.ring, fw), m.group.order), m.gens());
  }
  out.sigma_action = block_diag(sigma_coeff_block(m.ring, m.group), m.gens());
  (void)k;
  return out;
}

std::size_t rank_over_R(const PresentedModule& m) {
  FlatModel f = flatten(m);
  std::size_t k0 = m.ring.zrank();
  if (f.free_rank % k0 != 0)
    throw InvariantViolation("free rank not divisible by the carrier rank");
  return f.free_rank / k0;
}

bool is_torsion_free_over_R(const PresentedModule& m) {
  // Z-torsion-freeness decides O-torsion-freeness: O is a domain of
  // characteristic zero.
  return flatten(m).torsion.empty();
}

PresentedModule restrict_module(const PresentedModule& m) {
  if (m.group.order == 1) return m;
  const CoeffRing& r = m.ring;
  GaloisGroup c1 = GaloisGroup::c1();
  const std::size_t n = m.gens();
  TwistedMatrix pres(r, c1, 2 * m.pres.rows, 2 * n);
  for (std::size_t i = 0; i < m.pres.rows; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const FieldElement& a = m.pres.at(i, j).c[0];
      const FieldElement& b = m.pres.at(i, j).c[1];
      // row i: sum_j a e_j + b (s e_j)
      pres.at(2 * i, j) = TwistedRingElement::scalar(r, c1, a);
      pres.at(2 * i, n + j) = TwistedRingElement::scalar(r, c1, b);
      // sigma * row i: sum_j act(b) e_j + act(a) (s e_j)
      pres.at(2 * i + 1, j) =
          TwistedRingElement::scalar(r, c1, m.group.apply(1, b));
      pres.at(2 * i + 1, n + j) =
          TwistedRingElement::scalar(r, c1, m.group.apply(1, a));
    }
  return PresentedModule{r, c1, pres};
}

PresentedModule induce_module(const PresentedModule& m, const GaloisGroup& g) {
  if (m.group.order != 1) throw GroupMismatch("induce expects a plain R-module");
  TwistedMatrix pres(m.ring, g, m.pres.rows, m.pres.cols);
  for (std::size_t i = 0; i < m.pres.rows; ++i)
    for (std::size_t j = 0; j < m.pres.cols; ++j)
      pres.at(i, j) =
          TwistedRingElement::scalar(m.ring, g, m.pres.at(i, j).c[0]);
  return PresentedModule{m.ring, g, pres};
}

PresentedModule coinduce_module(const PresentedModule& x, const GaloisGroup& g) {
  if (x.group.order != 1) throw GroupMismatch("coinduce expects a plain R-module");
  if (g.order == 1) return x;
  const CoeffRing& r = x.ring;
  TwistedMatrix pres(r, g, 2 * x.pres.rows, x.pres.cols);
  auto sig = TwistedRingElement::sigma(r, g);
  for (std::size_t i = 0; i < x.pres.rows; ++i)
    for (std::size_t j = 0; j < x.pres.cols; ++j) {
      const FieldElement& y = x.pres.at(i, j).c[0];
      pres.at(2 * i, j) = TwistedRingElement::scalar(r, g, y);
      pres.at(2 * i + 1, j) =
          tr_mul(TwistedRingElement::scalar(r, g, g.apply(1, y)), sig);
    }
  return PresentedModule{r, g, pres};
}

namespace {

// Full flat action of left multiplication by gamma on elements of n.
IntMatrix module_elem_action(const PresentedModule& n, const TwistedRingElement& x) {
  return block_diag(elem_action_block(x), n.gens());
}

std::vector<Int> mat_vec(const IntMatrix& a, const std::vector<Int>& v) {
  std::vector<Int> r(a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j)
      if (a.at(i, j) != 0) r[i] += a.at(i, j) * v[j];
  return r;
}

}  // namespace

bool hom_is_valid(const ModuleHom& h) {
  const std::size_t qdim = h.dst.gens() * flat_block_size(h.dst);
  if (h.images.size() != h.src.gens()) return false;
  for (const auto& v : h.images)
    if (v.size() != qdim) return false;
  IntMatrix rn = relation_rows(h.dst);
  ZLattice rel = ZLattice::from_rows(qdim, rn);
  for (std::size_t i = 0; i < h.src.pres.rows; ++i) {
    std::vector<Int> w(qdim);
    for (std::size_t j = 0; j < h.src.gens(); ++j) {
      auto term = mat_vec(module_elem_action(h.dst, h.src.pres.at(i, j)),
                          h.images[j]);
      for (std::size_t c = 0; c < qdim; ++c) w[c] += term[c];
    }
    if (!rel.contains(w)) return false;
  }
  return true;
}

bool hom_equal_on_generators(const ModuleHom& a, const ModuleHom& b) {
  if (a.images.size() != b.images.size()) return false;
  IntMatrix rn = relation_rows(a.dst);
  const std::size_t qdim = a.dst.gens() * flat_block_size(a.dst);
  ZLattice rel = ZLattice::from_rows(qdim, rn);
  for (std::size_t j = 0; j < a.images.size(); ++j) {
    std::vector<Int> diff(qdim);
    for (std::size_t c = 0; c < qdim; ++c)
      diff[c] = a.images[j][c] - b.images[j][c];
    if (!rel.contains(diff)) return false;
  }
  return true;
}

HomSpace solve_hom(const PresentedModule& m, const PresentedModule& n,
                   const CancelHook* cancel) {
  if (m.ring != n.ring || m.group != n.group)
    throw RingMismatch("hom between different carriers");
  check_integral_carrier(m);
  const std::size_t qdim = n.gens() * flat_block_size(n);
  const std::size_t nm = m.gens();
  const std::size_t mm = m.pres.rows;
  IntMatrix rn = relation_rows(n);
  const std::size_t pn = rn.rows;

  // Unknowns: generator images y_j, then auxiliary relation coefficients z_i.
  const std::size_t yvars = nm * qdim;
  const std::size_t unknowns = yvars + mm * pn;
  const std::size_t eqs = mm * qdim;
  RatMatrix eq(unknowns, eqs);
  for (std::size_t i = 0; i < mm; ++i) {
    for (std::size_t j = 0; j < nm; ++j) {
      IntMatrix a = module_elem_action(n, m.pres.at(i, j));
      for (std::size_t cp = 0; cp < qdim; ++cp)
        for (std::size_t c = 0; c < qdim; ++c)
          if (a.at(cp, c) != 0)
            eq.at(j * qdim + c, i * qdim + cp) = Rat(a.at(cp, c));
    }
    for (std::size_t r = 0; r < pn; ++r)
      for (std::size_t cp = 0; cp < qdim; ++cp)
        if (rn.at(r, cp) != 0)
          eq.at(yvars + i * pn + r, i * qdim + cp) = Rat(-rn.at(r, cp));
  }
  if (cancel && *cancel && (*cancel)()) throw OperationCancelled();
  ZLattice sol = kernel_saturated(eq);

  // Generator images per solution row.
  std::vector<ModuleHom> basis;
  IntMatrix p(sol.rank(), yvars);
  for (std::size_t s = 0; s < sol.rank(); ++s) {
    ModuleHom h{m, n, {}};
    for (std::size_t j = 0; j < nm; ++j) {
      std::vector<Int> img(qdim);
      for (std::size_t c = 0; c < qdim; ++c) img[c] = sol.basis.at(s, j * qdim + c);
      h.images.push_back(std::move(img));
    }
    for (std::size_t c = 0; c < yvars; ++c) p.at(s, c) = sol.basis.at(s, c);
    basis.push_back(std::move(h));
  }

  // Hom group = Z^s / { c : c*P lies in the per-generator relation lattice }.
  IntMatrix l(nm * pn, yvars);
  for (std::size_t j = 0; j < nm; ++j)
    for (std::size_t r = 0; r < pn; ++r)
      for (std::size_t c = 0; c < qdim; ++c)
        l.at(j * pn + r, j * qdim + c) = rn.at(r, c);
  IntMatrix neg_l = l;
  for (auto& x : neg_l.e) x = -x;
  ZLattice rel_coeffs_full = kernel_saturated(RatMatrix(vstack(p, neg_l)));
  IntMatrix c(rel_coeffs_full.rank(), sol.rank());
  for (std::size_t i = 0; i < rel_coeffs_full.rank(); ++i)
    for (std::size_t j = 0; j < sol.rank(); ++j)
      c.at(i, j) = rel_coeffs_full.basis.at(i, j);

  FlatModel grp;
  grp.dim = sol.rank();
  grp.relations = c;
  auto sf = snf(c, cancel);
  std::size_t nonzero = 0;
  for (const auto& d : sf.factors)
    if (d != 0) {
      ++nonzero;
      if (d > 1) grp.torsion.push_back(d);
    }
  std::sort(grp.torsion.begin(), grp.torsion.end());
  grp.free_rank = grp.dim - nonzero;
  return HomSpace{std::move(grp), std::move(basis)};
}

FlatModel hom_module(const PresentedModule& m, const PresentedModule& n,
                     const CancelHook* cancel) {
  return solve_hom(m, n, cancel).group;
}

namespace {

// flatten(n) coordinate (gen l, group s, slot t) -> flatten(restrict(n))
// coordinate (gen s*q + l, slot t).
std::vector<std::size_t> restrict_permutation(const PresentedModule& n) {
  const std::size_t k0 = n.ring.zrank();
  const std::size_t q = n.gens();
  const std::size_t g = n.group.order;
  std::vector<std::size_t> perm(q * g * k0);
  for (std::size_t l = 0; l < q; ++l)
    for (std::size_t s = 0; s < g; ++s)
      for (std::size_t t = 0; t < k0; ++t)
        perm[l * g * k0 + s * k0 + t] = (s * q + l) * k0 + t;
  return perm;
}

std::vector<Int> permute(const std::vector<Int>& v,
                         const std::vector<std::size_t>& perm) {
  std::vector<Int> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[perm[i]] = v[i];
  return out;
}

std::vector<std::size_t> invert_permutation(const std::vector<std::size_t>& p) {
  std::vector<std::size_t> inv(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) inv[p[i]] = i;
  return inv;
}

}  // namespace

AdjunctionMaps adjunction_restriction(const PresentedModule& m_plain,
                                      const PresentedModule& n,
                                      const GaloisGroup& g) {
  if (m_plain.group.order != 1) throw GroupMismatch("left side must be plain");
  if (n.group != g) throw GroupMismatch("n must live over G");
  if (m_plain.ring != n.ring) throw RingMismatch();
  PresentedModule ind = induce_module(m_plain, g);
  PresentedModule res = restrict_module(n);
  auto perm = restrict_permutation(n);
  auto inv = invert_permutation(perm);

  AdjunctionMaps maps;
  maps.induced_or_coinduced = ind;
  maps.forward = [m_plain, res, perm](const ModuleHom& h) {
    ModuleHom f{m_plain, res, {}};
    for (const auto& img : h.images) f.images.push_back(permute(img, perm));
    return f;
  };
  maps.backward = [ind, n, inv](const ModuleHom& f) {
    ModuleHom h{ind, n, {}};
    for (const auto& img : f.images) h.images.push_back(permute(img, inv));
    return h;
  };
  return maps;
}

AdjunctionMaps adjunction_coinduction(const PresentedModule& m,
                                      const PresentedModule& x_plain) {
  if (x_plain.group.order != 1) throw GroupMismatch("x must be plain");
  if (m.ring != x_plain.ring) throw RingMismatch();
  GaloisGroup g = m.group;
  PresentedModule coind = coinduce_module(x_plain, g);
  PresentedModule res = restrict_module(m);
  const std::size_t n = m.gens();
  const std::size_t k0 = m.ring.zrank();
  const std::size_t qx = x_plain.gens();
  IntMatrix cb = conj_block(m.ring);
  bool conj_action = g.order == 2 && g.action == GroupAction::conjugation;

  auto coords_act = [cb, conj_action, k0](std::vector<Int> block) {
    if (!conj_action) return block;
    std::vector<Int> out(k0);
    for (std::size_t i = 0; i < k0; ++i)
      for (std::size_t j = 0; j < k0; ++j) out[i] += cb.at(i, j) * block[j];
    return out;
  };

  AdjunctionMaps maps;
  maps.induced_or_coinduced = coind;
  if (g.order == 1) {
    maps.forward = [m, coind](const ModuleHom& f) {
      return ModuleHom{m, coind, f.images};
    };
    maps.backward = [res, x_plain](const ModuleHom& h) {
      return ModuleHom{res, x_plain, h.images};
    };
    return maps;
  }

  // forward: f(e_j), f(s e_j) in x  ->  g(e_j) = (f(e_j), f(s e_j)) in
  // coind(x); the sigma-part coefficient carries the coordinate action.
  maps.forward = [m, coind, n, k0, qx, coords_act](const ModuleHom& f) {
    ModuleHom h{m, coind, {}};
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<Int> img(qx * 2 * k0);
      for (std::size_t l = 0; l < qx; ++l) {
        for (std::size_t t = 0; t < k0; ++t)
          img[l * 2 * k0 + t] = f.images[j][l * k0 + t];
        std::vector<Int> blk(k0);
        for (std::size_t t = 0; t < k0; ++t)
          blk[t] = f.images[n + j][l * k0 + t];
        blk = coords_act(blk);
        for (std::size_t t = 0; t < k0; ++t) img[l * 2 * k0 + k0 + t] = blk[t];
      }
      h.images.push_back(std::move(img));
    }
    return h;
  };
  maps.backward = [res, x_plain, n, k0, qx, coords_act](const ModuleHom& h) {
    ModuleHom f{res, x_plain, std::vector<std::vector<Int>>(2 * n)};
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<Int> fe(qx * k0), fse(qx * k0);
      for (std::size_t l = 0; l < qx; ++l) {
        for (std::size_t t = 0; t < k0; ++t)
          fe[l * k0 + t] = h.images[j][l * 2 * k0 + t];
        std::vector<Int> blk(k0);
        for (std::size_t t = 0; t < k0; ++t)
          blk[t] = h.images[j][l * 2 * k0 + k0 + t];
        blk = coords_act(blk);  // the coordinate action is an involution
        for (std::size_t t = 0; t < k0; ++t) fse[l * k0 + t] = blk[t];
      }
      f.images[j] = std::move(fe);
      f.images[n + j] = std::move(fse);
    }
    return f;
  };
  return maps;
}

namespace {
IntMatrix module_sigma_matrix(const PresentedModule& m) {
  return block_diag(sigma_coeff_block(m.ring, m.group), m.gens());
}
}  // namespace

std::pair<FlatVec, FlatVec> tuple_g_from_f(const PresentedModule& m,
                                           const std::pair<FlatVec, FlatVec>& f) {
  IntMatrix s = module_sigma_matrix(m);
  return {f.first, mat_vec(s, f.second)};  // g_1 = f_1, g_s = s f_s
}

std::pair<FlatVec, FlatVec> tuple_f_from_g(const PresentedModule& m,
                                           const std::pair<FlatVec, FlatVec>& g) {
  IntMatrix s = module_sigma_matrix(m);
  return {g.first, mat_vec(s, g.second)};
}

std::pair<FlatVec, FlatVec> tuple_f_action(const PresentedModule& m,
                                           const std::pair<FlatVec, FlatVec>& f) {
  IntMatrix s = module_sigma_matrix(m);
  // (sigma f)_1 = sigma f_s, (sigma f)_s = sigma f_1
  return {mat_vec(s, f.second), mat_vec(s, f.first)};
}

std::pair<FlatVec, FlatVec> tuple_g_action(const PresentedModule&,
                                           const std::pair<FlatVec, FlatVec>& g) {
  // (sigma g)_s = g_{s tau}: pure index shift
  return {g.second, g.first};
}

RationalGModule RationalGModule::make(const ImQuadField& f, const GaloisGroup& g,
                                      const FMatrix& S) {
  RationalGModule v;
  v.field = f;
  v.group = g;
  v.dim = S.rows;
  v.S = S;
  if (g.order == 2) {
    if (S.rows != S.cols) throw DimensionMismatch("sigma matrix must be square");
    if (fmul(S, fapply(g, S)) != FMatrix::identity(f, S.rows))
      throw InvariantViolation("semilinear involution law fails");
  }
  return v;
}

RationalGModule rationalize(const PresentedModule& m) {
  check_integral_carrier(m);
  const std::size_t dim = m.gens() * flat_block_size(m);
  const ImQuadField& F = m.ring.field;

  // Echelonize the relation rows over Q; quotient coordinates are the
  // non-pivot columns.
  RatMatrix rm(relation_rows(m));
  std::vector<std::size_t> pivots;
  {
    std::size_t r = 0;
    for (std::size_t c = 0; c < rm.cols && r < rm.rows; ++c) {
      std::size_t p = r;
      while (p < rm.rows && rm.at(p, c) == 0) ++p;
      if (p == rm.rows) continue;
      if (p != r)
        for (std::size_t j = 0; j < rm.cols; ++j) std::swap(rm.at(r, j), rm.at(p, j));
      Rat inv = 1 / rm.at(r, c);
      for (std::size_t j = c; j < rm.cols; ++j) rm.at(r, j) *= inv;
      for (std::size_t i = 0; i < rm.rows; ++i) {
        if (i == r || rm.at(i, c) == 0) continue;
        Rat f = rm.at(i, c);
        for (std::size_t j = c; j < rm.cols; ++j) rm.at(i, j) -= f * rm.at(r, j);
      }
      pivots.push_back(c);
      ++r;
    }
  }
  std::vector<bool> is_pivot(dim, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<std::size_t> qcols;
  for (std::size_t c = 0; c < dim; ++c)
    if (!is_pivot[c]) qcols.push_back(c);
  const std::size_t qdim = qcols.size();

  auto reduce = [&](std::vector<Rat> v) {
    for (std::size_t k = 0; k < pivots.size(); ++k) {
      Rat f = v[pivots[k]];
      if (f == 0) continue;
      for (std::size_t j = 0; j < dim; ++j) v[j] -= f * rm.at(k, j);
    }
    std::vector<Rat> out(qdim);
    for (std::size_t i = 0; i < qdim; ++i) out[i] = v[qcols[i]];
    return out;
  };
  auto action_on_quotient = [&](const IntMatrix& a) {
    RatMatrix q(qdim, qdim);
    for (std::size_t j = 0; j < qdim; ++j) {
      std::vector<Rat> col(dim);
      for (std::size_t i = 0; i < dim; ++i) col[i] = Rat(a.at(i, qcols[j]));
      auto red = reduce(std::move(col));
      for (std::size_t i = 0; i < qdim; ++i) q.at(i, j) = red[i];
    }
    return q;
  };

  FlatModel fm;  // only the action matrices are needed here
  IntMatrix sig = block_diag(sigma_coeff_block(m.ring, m.group), m.gens());
  RatMatrix sig_q = action_on_quotient(sig);
  (void)fm;

  const bool has_omega = m.ring.kind == RingKind::Order;
  RatMatrix omega_q;
  if (has_omega) {
    FieldElement fw(F, 0, Rat(m.ring.f));
    IntMatrix om = block_diag(
        block_diag(coeff_mult_block(m.ring, fw), m.group.order), m.gens());
    omega_q = action_on_quotient(om);
    // genuine omega action = (1/f) * (f omega)
    for (auto& x : omega_q.e) x /= Rat(m.ring.f);
  }

  // Greedy F-basis of the quotient: u and omega*u enlarge the Q-span
  // together.
  const std::size_t fdim = has_omega ? qdim / 2 : qdim;
  if (has_omega && qdim % 2 != 0)
    throw InvariantViolation("odd rational dimension over a quadratic field");
  std::vector<std::vector<Rat>> span_rows;
  std::vector<std::vector<Rat>> fbasis;
  auto in_span = [&](const std::vector<Rat>& v) {
    if (span_rows.empty()) return false;
    RatMatrix b(span_rows.size(), qdim);
    for (std::size_t i = 0; i < span_rows.size(); ++i)
      for (std::size_t j = 0; j < qdim; ++j) b.at(i, j) = span_rows[i][j];
    return solve_row(b, v).has_value();
  };
  for (std::size_t c = 0; c < qdim && fbasis.size() < fdim; ++c) {
    std::vector<Rat> u(qdim);
    u[c] = 1;
    if (in_span(u)) continue;
    fbasis.push_back(u);
    span_rows.push_back(u);
    if (has_omega) {
      std::vector<Rat> wu(qdim);
      for (std::size_t i = 0; i < qdim; ++i)
        for (std::size_t j = 0; j < qdim; ++j)
          if (omega_q.at(i, j) != 0) wu[i] += omega_q.at(i, j) * u[j];
      span_rows.push_back(wu);
    }
  }
  if (fbasis.size() != fdim) throw InvariantViolation("F-basis extraction failed");

  // F-coordinates relative to the chosen basis.
  RatMatrix coord_rows(has_omega ? 2 * fdim : fdim, qdim);
  for (std::size_t i = 0; i < fdim; ++i) {
    for (std::size_t j = 0; j < qdim; ++j) coord_rows.at(has_omega ? 2 * i : i, j) = fbasis[i][j];
    if (has_omega) {
      for (std::size_t j = 0; j < qdim; ++j) {
        Rat acc = 0;
        for (std::size_t l = 0; l < qdim; ++l)
          acc += omega_q.at(j, l) * fbasis[i][l];
        coord_rows.at(2 * i + 1, j) = acc;
      }
    }
  }
  auto f_coords = [&](const std::vector<Rat>& v) {
    auto x = solve_row(coord_rows, v);
    if (!x) throw InvariantViolation("vector outside the F-span");
    std::vector<FieldElement> out(fdim);
    for (std::size_t i = 0; i < fdim; ++i)
      out[i] = has_omega ? FieldElement(F, (*x)[2 * i], (*x)[2 * i + 1])
                         : fe_rational(F, (*x)[i]);
    return out;
  };

  FMatrix S(F, fdim, fdim);
  for (std::size_t j = 0; j < fdim; ++j) {
    std::vector<Rat> sv(qdim);
    for (std::size_t i = 0; i < qdim; ++i)
      for (std::size_t l = 0; l < qdim; ++l)
        if (sig_q.at(i, l) != 0) sv[i] += sig_q.at(i, l) * fbasis[j][l];
    auto col = f_coords(sv);
    for (std::size_t i = 0; i < fdim; ++i) S.at(i, j) = col[i];
  }
  return RationalGModule::make(F, m.group, S);
}

FMatrix split_surjection(const RationalGModule& v, const RationalGModule& w,
                         const FMatrix& phi, const FMatrix& s) {
  if (v.field != w.field) throw RingMismatch();
  if (v.group != w.group) throw GroupMismatch();
  if (phi.rows != w.dim || phi.cols != v.dim) throw DimensionMismatch("phi");
  if (s.rows != v.dim || s.cols != w.dim) throw DimensionMismatch("s");
  if (frank(phi) != w.dim) throw NotSurjective();
  if (fmul(phi, s) != FMatrix::identity(v.field, w.dim)) throw NotSection();
  if (v.group.order == 2 &&
      fmul(phi, v.S) != fmul(w.S, fapply(v.group, phi)))
    throw NotEquivariant("phi is not a module map");
  if (v.group.order == 1) return s;

  // pi' = (s + sigma_V s sigma_W^{-1}) / |G|
  FMatrix twisted = fmul(fmul(v.S, fapply(v.group, s)), fapply(v.group, w.S));
  FMatrix sum = fadd(s, twisted);
  FieldElement half = fe_rational(v.field, Rat(1, 2));
  FMatrix result = fscale(half, sum);
  if (fmul(phi, result) != FMatrix::identity(v.field, w.dim))
    throw InvariantViolation("averaged map is not a section");
  if (fmul(result, w.S) != fmul(v.S, fapply(v.group, result)))
    throw InvariantViolation("averaged map is not equivariant");
  return result;
}

Decomposition decompose_C2(const RationalGModule& v) {
  if (v.group.order != 2) throw UnsupportedGroup("decompose_C2 needs |G| = 2");
  const ImQuadField& F = v.field;
  const std::size_t n = v.dim;
  Decomposition out;

  if (v.group.action == GroupAction::trivial) {
    // Linear involution: plus/minus eigenspaces.
    FMatrix sp = v.S, sm = v.S;
    for (std::size_t i = 0; i < n; ++i) {
      sp.at(i, i) = sub(sp.at(i, i), fe_rational(F, 1));
      sm.at(i, i) = add(sm.at(i, i), fe_rational(F, 1));
    }
    FMatrix kp = fright_kernel(sp);  // sigma = +1
    FMatrix km = fright_kernel(sm);  // sigma = -1
    out.r = kp.rows;
    out.r_prime = km.rows;
    if (out.r + out.r_prime != n)
      throw InvariantViolation("involution not diagonalizable");
    out.change_of_basis = FMatrix(F, n, n);
    for (std::size_t c = 0; c < kp.rows; ++c)
      for (std::size_t i = 0; i < n; ++i)
        out.change_of_basis.at(i, c) = kp.at(c, i);
    for (std::size_t c = 0; c < km.rows; ++c)
      for (std::size_t i = 0; i < n; ++i)
        out.change_of_basis.at(i, kp.rows + c) = km.at(c, i);
    return out;
  }

  // Conjugation action: Galois descent.  Fixed vectors S * conj(v) = v form
  // a Q-space of dimension n whose basis is an F-basis of the module; in
  // that basis sigma acts as plain conjugation, so r = dim and r' = 0 after
  // the alpha identification.
  RatMatrix s0(n, n), s1(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      s0.at(i, j) = v.S.at(i, j).a;
      s1.at(i, j) = v.S.at(i, j).b;
    }
  const Rat w2a = F.w2a();
  const int w2b = F.w2b();
  const int t = F.trace_omega();
  // Write x + omega y for the unknown; S(conj(x + omega y)) = x + omega y.
  RatMatrix sys(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      // rational part: S0 x + (t S0 - w2a S1) y = x
      sys.at(i, j) = s0.at(i, j) - (i == j ? 1 : 0);
      sys.at(i, n + j) = t * s0.at(i, j) - w2a * s1.at(i, j);
      // omega part: S1 x + (t S1 - S0 - w2b S1) y = y
      sys.at(n + i, j) = s1.at(i, j);
      sys.at(n + i, n + j) =
          t * s1.at(i, j) - s0.at(i, j) - w2b * s1.at(i, j) - (i == j ? 1 : 0);
    }
  RatMatrix ker = right_kernel(sys);
  if (ker.rows != n) throw InvariantViolation("descent fixed space has wrong dimension");
  out.r = n;
  out.r_prime = 0;
  out.change_of_basis = FMatrix(F, n, n);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t i = 0; i < n; ++i)
      out.change_of_basis.at(i, c) =
          FieldElement(F, ker.at(c, i), ker.at(c, n + i));
  if (frank(out.change_of_basis) != n)
    throw InvariantViolation("descent basis is not an F-basis");
  out.alpha = purely_imaginary_generator(QuadOrder::maximal(F));
  return out;
}

PresentedModule module_from_ideal(const FracIdeal& i, const FieldElement& u,
                                  const QuadOrder& o, const GaloisGroup& g) {
  if (i.is_zero()) throw ZeroIdeal();
  if (i.field != o.field) throw RingMismatch();
  CoeffRing ring = CoeffRing::order(o);
  // i must be an O-module
  if (o.f % multiplier_ring(i).f != 0)
    throw RingMismatch("ideal is not a module over the order");
  FieldElement a = i.basis_element(0);
  FieldElement b = i.basis_element(1);

  // validity of the semilinear structure
  auto act = [&](const FieldElement& x) { return g.apply(1, x); };
  if (g.order == 2) {
    if (mul(u, act(u)) != fe_rational(i.field, 1))
      throw InvariantViolation("sigma^2 != 1 on the ideal module");
    FracIdeal moved = ideal_scale(
        u, g.action == GroupAction::conjugation ? ideal_conj(i) : i);
    if (!(moved == i))
      throw InvariantViolation("twist does not preserve the ideal");
  }

  std::vector<TwistedRingElement> rows;
  // O-syzygies: (O : i) * (-b, a)
  FracIdeal colon = colon_ideal(o.as_ideal(), i);
  for (std::size_t k = 0; k < 2; ++k) {
    FieldElement t = colon.basis_element(k);
    rows.push_back(TwistedRingElement::scalar(ring, g, mul(t, neg(b))));
    rows.push_back(TwistedRingElement::scalar(ring, g, mul(t, a)));
  }
  std::size_t nrows = 2;
  if (g.order == 2) {
    // sigma e_a = u*act(a) expressed in the Z-basis (a, b), same for e_b.
    RatMatrix basis(2, 2);
    basis.at(0, 0) = a.a;
    basis.at(0, 1) = a.b;
    basis.at(1, 0) = b.a;
    basis.at(1, 1) = b.b;
    auto expand = [&](const FieldElement& x) {
      auto sol = solve_row(basis, {x.a, x.b});
      if (!sol || (*sol)[0].get_den() != 1 || (*sol)[1].get_den() != 1)
        throw InvariantViolation("twist image leaves the lattice");
      return std::pair<Int, Int>{(*sol)[0].get_num(), (*sol)[1].get_num()};
    };
    auto [ma, na] = expand(mul(u, act(a)));
    auto [mb, nb] = expand(mul(u, act(b)));
    auto sig = TwistedRingElement::sigma(ring, g);
    auto sc = [&](const Int& x) {
      return TwistedRingElement::scalar(ring, g, fe_rational(i.field, Rat(x)));
    };
    rows.push_back(tr_sub(sig, sc(ma)));
    rows.push_back(tr_neg(sc(na)));
    rows.push_back(tr_neg(sc(mb)));
    rows.push_back(tr_sub(sig, sc(nb)));
    nrows += 2;
  }
  TwistedMatrix pres(ring, g, nrows, 2);
  for (std::size_t r = 0; r < nrows; ++r)
    for (std::size_t c = 0; c < 2; ++c) pres.at(r, c) = rows[2 * r + c];
  return PresentedModule::make(ring, g, pres);
}

namespace {

// Flat matrix (dst-dim x src-dim) of a module map.
IntMatrix flat_map_matrix(const ModuleMap& f) {
  const std::size_t k0 = f.src.ring.zrank();
  const std::size_t k = flat_block_size(f.src);
  const std::size_t sdim = f.src.gens() * k;
  const std::size_t ddim = f.dst.gens() * flat_block_size(f.dst);
  IntMatrix out(ddim, sdim);
  for (std::size_t j = 0; j < f.src.gens(); ++j) {
    for (int s = 0; s < f.src.group.order; ++s)
      for (std::size_t t = 0; t < k0; ++t) {
        // basis element gamma = omega_t sigma^s applied to e_j
        TwistedRingElement gamma = TwistedRingElement::zero(f.src.ring, f.src.group);
        gamma.c[s] = t == 0 ? fe_rational(f.src.ring.field, 1)
                            : FieldElement(f.src.ring.field, 0, Rat(f.src.ring.f));
        std::vector<Int> col;
        for (std::size_t l = 0; l < f.dst.gens(); ++l) {
          auto coords = tr_flatten(tr_mul(gamma, f.mat.at(j, l)));
          col.insert(col.end(), coords.begin(), coords.end());
        }
        std::size_t src_idx = j * k + s * k0 + t;
        for (std::size_t i = 0; i < ddim; ++i) out.at(i, src_idx) = col[i];
      }
  }
  return out;
}

ZLattice relation_lattice(const PresentedModule& m) {
  return ZLattice::from_rows(m.gens() * flat_block_size(m), relation_rows(m));
}

// { a : F a lies in the relation lattice of dst }, as a lattice of flat
// source vectors.
ZLattice preimage_lattice(const IntMatrix& fmat, const PresentedModule& dst) {
  IntMatrix rel = relation_rows(dst);
  IntMatrix neg_rel = rel;
  for (auto& x : neg_rel.e) x = -x;
  RatMatrix stacked(RatMatrix(vstack(transpose(fmat), neg_rel)));
  ZLattice k = kernel_saturated(stacked);
  IntMatrix rows(k.rank(), fmat.cols);
  for (std::size_t i = 0; i < k.rank(); ++i)
    for (std::size_t j = 0; j < fmat.cols; ++j) rows.at(i, j) = k.basis.at(i, j);
  return ZLattice::from_rows(fmat.cols, rows);
}

}  // namespace

bool map_is_valid(const ModuleMap& f) {
  if (f.src.ring != f.dst.ring || f.src.group != f.dst.group) return false;
  if (f.mat.rows != f.src.gens() || f.mat.cols != f.dst.gens()) return false;
  return hom_is_valid(map_as_hom(f));
}

ModuleHom map_as_hom(const ModuleMap& f) {
  ModuleHom h{f.src, f.dst, {}};
  for (std::size_t j = 0; j < f.src.gens(); ++j) {
    std::vector<Int> img;
    for (std::size_t l = 0; l < f.dst.gens(); ++l) {
      auto coords = tr_flatten(f.mat.at(j, l));
      img.insert(img.end(), coords.begin(), coords.end());
    }
    h.images.push_back(std::move(img));
  }
  return h;
}

bool ses_is_exact(const ShortExactSeq& s) {
  if (!(s.inj.dst == s.surj.src)) return false;
  if (!map_is_valid(s.inj) || !map_is_valid(s.surj)) return false;

  // composite is the zero map
  TwistedMatrix comp = tr_matrix_mul(s.inj.mat, s.surj.mat);
  ZLattice rel3 = relation_lattice(s.surj.dst);
  for (std::size_t i = 0; i < comp.rows; ++i) {
    std::vector<Int> row;
    for (std::size_t j = 0; j < comp.cols; ++j) {
      auto coords = tr_flatten(comp.at(i, j));
      row.insert(row.end(), coords.begin(), coords.end());
    }
    if (!rel3.contains(row)) return false;
  }

  IntMatrix f1 = flat_map_matrix(s.inj);
  IntMatrix f2 = flat_map_matrix(s.surj);

  // injectivity: preimage of rel2 equals rel1
  ZLattice rel1 = relation_lattice(s.inj.src);
  ZLattice pre1 = preimage_lattice(f1, s.inj.dst);
  if (!(rel1.contains(pre1) && pre1.contains(rel1))) return false;

  // exactness in the middle: ker(phi2) = im(phi1) + rel2
  ZLattice ker2 = preimage_lattice(f2, s.surj.dst);
  IntMatrix im_rows = vstack(transpose(f1), relation_rows(s.inj.dst));
  ZLattice im1 = ZLattice::from_rows(f1.rows, im_rows);
  if (!(ker2 == im1)) return false;

  // surjectivity
  const std::size_t dim3 =
      s.surj.dst.gens() * flat_block_size(s.surj.dst);
  ZLattice full = ZLattice::full(dim3);
  ZLattice im2 = ZLattice::from_rows(
      dim3, vstack(transpose(f2), relation_rows(s.surj.dst)));
  return im2 == full;
}

ShortExactSeq conductor_ses(const QuadOrder& o, const GaloisGroup& g) {
  const ImQuadField& F = o.field;
  FieldElement one = fe_rational(F, 1);
  QuadOrder maximal = QuadOrder::maximal(F);
  PresentedModule m1 = module_from_ideal(o.as_ideal(), one, o, g);
  PresentedModule m2 = module_from_ideal(maximal.as_ideal(), one, o, g);

  // M3 = O_F / O: quotient by the images of O's generators (1, f*omega).
  CoeffRing ring = CoeffRing::order(o);
  TwistedMatrix extra(ring, g, 2, 2);
  extra.at(0, 0) = TwistedRingElement::one(ring, g);
  extra.at(1, 1) = TwistedRingElement::scalar(ring, g, fe_rational(F, Rat(o.f)));
  PresentedModule m3 =
      PresentedModule::make(ring, g, tr_matrix_vstack(m2.pres, extra));

  // O's Z-basis (1, f*omega) maps to (e1, f*e2) over O_F's basis (1, omega).
  TwistedMatrix phi1(ring, g, 2, 2);
  phi1.at(0, 0) = TwistedRingElement::one(ring, g);
  phi1.at(1, 1) = TwistedRingElement::scalar(ring, g, fe_rational(F, Rat(o.f)));
  ModuleMap inj{m1, m2, phi1};
  ModuleMap surj{m2, m3, TwistedMatrix::identity(ring, g, 2)};
  return ShortExactSeq{inj, surj};
}

}  // namespace serrehom
