#include "serrehom/exact_linalg.hpp"

#include <algorithm>
#include <utility>

namespace serrehom {

IntMatrix::IntMatrix(std::size_t r, std::size_t c, std::vector<Int> entries)
    : rows(r), cols(c), e(std::move(entries)) {
  if (e.size() != rows * cols) throw DimensionMismatch("entry count");
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

bool IntMatrix::is_zero() const {
  return std::all_of(e.begin(), e.end(), [](const Int& x) { return x == 0; });
}

IntMatrix mul(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols != b.rows) throw DimensionMismatch("IntMatrix mul");
  IntMatrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      const Int& aik = a.at(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) c.at(i, j) += aik * b.at(k, j);
    }
  return c;
}

IntMatrix transpose(const IntMatrix& m) {
  IntMatrix t(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) t.at(j, i) = m.at(i, j);
  return t;
}

IntMatrix vstack(const IntMatrix& a, const IntMatrix& b) {
  if (a.rows == 0) return b;
  if (b.rows == 0) return a;
  if (a.cols != b.cols) throw DimensionMismatch("vstack");
  IntMatrix r(a.rows + b.rows, a.cols);
  std::copy(a.e.begin(), a.e.end(), r.e.begin());
  std::copy(b.e.begin(), b.e.end(), r.e.begin() + a.e.size());
  return r;
}

Int det(IntMatrix m) {
  if (m.rows != m.cols) throw DimensionMismatch("det of non-square");
  const std::size_t n = m.rows;
  if (n == 0) return 1;
  // Bareiss: division-free pivoting with exact divisions.
  Int prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m.at(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m.at(p, k) == 0) ++p;
      if (p == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(p, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        Int t = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
        mpz_divexact(m.at(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
    prev = m.at(k, k);
  }
  return sign > 0 ? m.at(n - 1, n - 1) : Int(-m.at(n - 1, n - 1));
}

bool is_unimodular(const IntMatrix& m) {
  if (m.rows != m.cols) return false;
  Int d = det(m);
  return d == 1 || d == -1;
}

RatMatrix::RatMatrix(const IntMatrix& m) : rows(m.rows), cols(m.cols), e(m.e.size()) {
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = Rat(m.e[i]);
}

RatMatrix RatMatrix::identity(std::size_t n) {
  RatMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

RatMatrix mul(const RatMatrix& a, const RatMatrix& b) {
  if (a.cols != b.rows) throw DimensionMismatch("RatMatrix mul");
  RatMatrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      const Rat& aik = a.at(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) c.at(i, j) += aik * b.at(k, j);
    }
  return c;
}

RatMatrix transpose(const RatMatrix& m) {
  RatMatrix t(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) t.at(j, i) = m.at(i, j);
  return t;
}

RatMatrix vstack(const RatMatrix& a, const RatMatrix& b) {
  if (a.rows == 0) return b;
  if (b.rows == 0) return a;
  if (a.cols != b.cols) throw DimensionMismatch("vstack");
  RatMatrix r(a.rows + b.rows, a.cols);
  std::copy(a.e.begin(), a.e.end(), r.e.begin());
  std::copy(b.e.begin(), b.e.end(), r.e.begin() + a.e.size());
  return r;
}

namespace {

// Row echelon over Q; returns pivot columns.  Mutates m in place.
std::vector<std::size_t> echelonize(RatMatrix& m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
    std::size_t p = r;
    while (p < m.rows && m.at(p, c) == 0) ++p;
    if (p == m.rows) continue;
    if (p != r)
      for (std::size_t j = 0; j < m.cols; ++j) std::swap(m.at(r, j), m.at(p, j));
    Rat inv = 1 / m.at(r, c);
    for (std::size_t j = c; j < m.cols; ++j) m.at(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows; ++i) {
      if (i == r || m.at(i, c) == 0) continue;
      Rat f = m.at(i, c);
      for (std::size_t j = c; j < m.cols; ++j) m.at(i, j) -= f * m.at(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

std::size_t rank(RatMatrix m) { return echelonize(m).size(); }

std::optional<std::vector<Rat>> solve_row(const RatMatrix& b,
                                          const std::vector<Rat>& s) {
  if (s.size() != b.cols) throw DimensionMismatch("solve_row");
  // Solve b^T x^T = s^T by elimination on the augmented system.
  RatMatrix aug(b.cols, b.rows + 1);
  for (std::size_t i = 0; i < b.rows; ++i)
    for (std::size_t j = 0; j < b.cols; ++j) aug.at(j, i) = b.at(i, j);
  for (std::size_t j = 0; j < b.cols; ++j) aug.at(j, b.rows) = s[j];
  auto pivots = echelonize(aug);
  std::vector<Rat> x(b.rows, Rat(0));
  for (std::size_t k = 0; k < pivots.size(); ++k) {
    if (pivots[k] == b.rows) return std::nullopt;  // inconsistent
    x[pivots[k]] = aug.at(k, b.rows);
  }
  return x;
}

RatMatrix right_kernel(const RatMatrix& m) {
  RatMatrix w = m;
  auto pivots = echelonize(w);
  std::vector<bool> is_pivot(m.cols, false);
  for (auto c : pivots) is_pivot[c] = true;
  RatMatrix ker(m.cols - pivots.size(), m.cols);
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols; ++c) {
    if (is_pivot[c]) continue;
    ker.at(r, c) = 1;
    for (std::size_t k = 0; k < pivots.size(); ++k)
      ker.at(r, pivots[k]) = -w.at(k, c);
    ++r;
  }
  return ker;
}

namespace {

void swap_rows(IntMatrix& m, std::size_t a, std::size_t b) {
  for (std::size_t j = 0; j < m.cols; ++j) std::swap(m.at(a, j), m.at(b, j));
}

void negate_row(IntMatrix& m, std::size_t r) {
  for (std::size_t j = 0; j < m.cols; ++j) m.at(r, j) = -m.at(r, j);
}

// row_i -= q * row_r
void submul_row(IntMatrix& m, std::size_t i, std::size_t r, const Int& q) {
  if (q == 0) return;
  for (std::size_t j = 0; j < m.cols; ++j) m.at(i, j) -= q * m.at(r, j);
}

Int fdiv(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

}  // namespace

HnfResult hnf(const IntMatrix& m) {
  IntMatrix h = m;
  IntMatrix u = IntMatrix::identity(m.rows);
  std::size_t r = 0;
  for (std::size_t c = 0; c < h.cols && r < h.rows; ++c) {
    // Euclid down the column: repeatedly move the smallest nonzero to the
    // pivot row and reduce the rest.
    for (;;) {
      std::size_t best = h.rows;
      for (std::size_t i = r; i < h.rows; ++i) {
        if (h.at(i, c) == 0) continue;
        if (best == h.rows ||
            cmp(abs(h.at(i, c)), abs(h.at(best, c))) < 0)
          best = i;
      }
      if (best == h.rows) break;  // column clear below r
      if (best != r) {
        swap_rows(h, r, best);
        swap_rows(u, r, best);
      }
      bool clear = true;
      for (std::size_t i = r + 1; i < h.rows; ++i) {
        if (h.at(i, c) == 0) continue;
        Int q = fdiv(h.at(i, c), h.at(r, c));
        submul_row(h, i, r, q);
        submul_row(u, i, r, q);
        if (h.at(i, c) != 0) clear = false;
      }
      if (clear) break;
    }
    if (h.at(r, c) == 0) continue;
    if (h.at(r, c) < 0) {
      negate_row(h, r);
      negate_row(u, r);
    }
    for (std::size_t i = 0; i < r; ++i) {
      Int q = fdiv(h.at(i, c), h.at(r, c));
      submul_row(h, i, r, q);
      submul_row(u, i, r, q);
    }
    ++r;
  }
  return {std::move(h), std::move(u)};
}

SnfResult snf(const IntMatrix& m, const CancelHook* cancel) {
  IntMatrix d = m;
  IntMatrix u = IntMatrix::identity(m.rows);
  IntMatrix v = IntMatrix::identity(m.cols);
  const std::size_t nmin = std::min(m.rows, m.cols);

  auto swap_cols_dv = [&](std::size_t a, std::size_t b) {
    for (std::size_t i = 0; i < d.rows; ++i) std::swap(d.at(i, a), d.at(i, b));
    for (std::size_t i = 0; i < v.rows; ++i) std::swap(v.at(i, a), v.at(i, b));
  };
  auto submul_col_dv = [&](std::size_t j, std::size_t c, const Int& q) {
    if (q == 0) return;
    for (std::size_t i = 0; i < d.rows; ++i) d.at(i, j) -= q * d.at(i, c);
    for (std::size_t i = 0; i < v.rows; ++i) v.at(i, j) -= q * v.at(i, c);
  };

  for (std::size_t k = 0; k < nmin; ++k) {
    for (;;) {
      if (cancel && *cancel && (*cancel)()) throw OperationCancelled();
      // Smallest-absolute nonzero pivot in the trailing block bounds
      // coefficient growth at desk scale.
      std::size_t pi = d.rows, pj = d.cols;
      for (std::size_t i = k; i < d.rows; ++i)
        for (std::size_t j = k; j < d.cols; ++j) {
          if (d.at(i, j) == 0) continue;
          if (pi == d.rows ||
              cmp(abs(d.at(i, j)), abs(d.at(pi, pj))) < 0) {
            pi = i;
            pj = j;
          }
        }
      if (pi == d.rows) break;  // trailing block zero
      if (pi != k) {
        swap_rows(d, k, pi);
        swap_rows(u, k, pi);
      }
      if (pj != k) swap_cols_dv(k, pj);

      bool lone = true;
      for (std::size_t i = k + 1; i < d.rows; ++i) {
        if (d.at(i, k) == 0) continue;
        Int q = fdiv(d.at(i, k), d.at(k, k));
        submul_row(d, i, k, q);
        submul_row(u, i, k, q);
        if (d.at(i, k) != 0) lone = false;
      }
      for (std::size_t j = k + 1; j < d.cols; ++j) {
        if (d.at(k, j) == 0) continue;
        Int q = fdiv(d.at(k, j), d.at(k, k));
        submul_col_dv(j, k, q);
        if (d.at(k, j) != 0) lone = false;
      }
      if (!lone) continue;

      // Enforce divisibility of the trailing block by the pivot.
      bool divides = true;
      for (std::size_t i = k + 1; i < d.rows && divides; ++i)
        for (std::size_t j = k + 1; j < d.cols && divides; ++j)
          if (d.at(i, j) % d.at(k, k) != 0) {
            // Fold the offending row into row k and restart the pivot step.
            for (std::size_t jj = 0; jj < d.cols; ++jj)
              d.at(k, jj) += d.at(i, jj);
            for (std::size_t jj = 0; jj < u.cols; ++jj)
              u.at(k, jj) += u.at(i, jj);
            divides = false;
          }
      if (divides) break;
    }
    if (k < nmin && d.at(k, k) < 0) {
      negate_row(d, k);
      negate_row(u, k);
    }
  }

  std::vector<Int> factors(nmin);
  for (std::size_t k = 0; k < nmin; ++k) factors[k] = d.at(k, k);
  return {std::move(factors), std::move(u), std::move(v)};
}

ZLattice ZLattice::from_rows(std::size_t ambient, const IntMatrix& rows) {
  if (rows.rows != 0 && rows.cols != ambient)
    throw DimensionMismatch("ZLattice ambient");
  auto res = hnf(rows);
  std::size_t r = 0;
  for (std::size_t i = 0; i < res.h.rows; ++i) {
    bool zero = true;
    for (std::size_t j = 0; j < res.h.cols; ++j)
      if (res.h.at(i, j) != 0) zero = false;
    if (!zero) r = i + 1;
  }
  IntMatrix basis(r, ambient);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < ambient; ++j) basis.at(i, j) = res.h.at(i, j);
  ZLattice l;
  l.ambient = ambient;
  l.basis = std::move(basis);
  return l;
}

ZLattice ZLattice::full(std::size_t ambient) {
  ZLattice l;
  l.ambient = ambient;
  l.basis = IntMatrix::identity(ambient);
  return l;
}

bool ZLattice::contains(const std::vector<Int>& v) const {
  std::vector<Rat> s(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) s[i] = Rat(v[i]);
  auto x = solve_row(RatMatrix(basis), s);
  if (!x) return false;
  for (const auto& c : *x)
    if (c.get_den() != 1) return false;
  return true;
}

bool ZLattice::contains(const ZLattice& other) const {
  if (other.ambient != ambient) throw DimensionMismatch("ambient");
  for (std::size_t i = 0; i < other.basis.rows; ++i) {
    std::vector<Int> row(ambient);
    for (std::size_t j = 0; j < ambient; ++j) row[j] = other.basis.at(i, j);
    if (!contains(row)) return false;
  }
  return true;
}

ZLattice kernel_saturated(const RatMatrix& m) {
  // Column scaling clears denominators without changing the left kernel.
  IntMatrix a(m.rows, m.cols);
  for (std::size_t j = 0; j < m.cols; ++j) {
    Int l = 1;
    for (std::size_t i = 0; i < m.rows; ++i)
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m.at(i, j).get_den_mpz_t());
    for (std::size_t i = 0; i < m.rows; ++i) {
      Rat scaled = m.at(i, j) * Rat(l);
      a.at(i, j) = scaled.get_num();
    }
  }
  auto res = hnf(a);
  // Rows of u opposite the zero rows of h span the saturated kernel.
  std::vector<std::size_t> zero_rows;
  for (std::size_t i = 0; i < res.h.rows; ++i) {
    bool zero = true;
    for (std::size_t j = 0; j < res.h.cols; ++j)
      if (res.h.at(i, j) != 0) zero = false;
    if (zero) zero_rows.push_back(i);
  }
  IntMatrix k(zero_rows.size(), m.rows);
  for (std::size_t r = 0; r < zero_rows.size(); ++r)
    for (std::size_t j = 0; j < m.rows; ++j)
      k.at(r, j) = res.u.at(zero_rows[r], j);
  return ZLattice::from_rows(m.rows, k);
}

Int lattice_index(const ZLattice& sub, const ZLattice& sup) {
  if (sub.ambient != sup.ambient) throw RankMismatch("different ambient spaces");
  if (sub.rank() != sup.rank()) throw RankMismatch("ranks differ");
  const std::size_t r = sub.rank();
  if (r == 0) return 1;
  RatMatrix supb(sup.basis);
  RatMatrix change(r, r);
  for (std::size_t i = 0; i < r; ++i) {
    std::vector<Rat> row(sub.ambient);
    for (std::size_t j = 0; j < sub.ambient; ++j) row[j] = Rat(sub.basis.at(i, j));
    auto x = solve_row(supb, row);
    if (!x) throw NotSublattice("not in the rational span");
    for (std::size_t j = 0; j < r; ++j) {
      if ((*x)[j].get_den() != 1) throw NotSublattice("fractional coordinate");
      change.at(i, j) = (*x)[j];
    }
  }
  // |det| of the integral change of basis.
  IntMatrix c(r, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) c.at(i, j) = change.at(i, j).get_num();
  Int d = det(c);
  if (d == 0) throw RankMismatch("degenerate change of basis");
  return abs(d);
}

QLattice QLattice::from_rows(std::size_t ambient, const RatMatrix& rows) {
  Int den = 1;
  for (const auto& x : rows.e)
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
  IntMatrix scaled(rows.rows, rows.cols == 0 ? ambient : rows.cols);
  for (std::size_t i = 0; i < rows.rows; ++i)
    for (std::size_t j = 0; j < rows.cols; ++j) {
      Rat v = rows.at(i, j) * Rat(den);
      scaled.at(i, j) = v.get_num();
    }
  ZLattice z = ZLattice::from_rows(ambient, scaled);
  // Reduce gcd(content, den) so the representation is canonical.
  Int g = den;
  for (const auto& x : z.basis.e) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  if (z.basis.rows == 0) g = den;
  if (g > 1) {
    for (auto& x : z.basis.e) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
    mpz_divexact(den.get_mpz_t(), den.get_mpz_t(), g.get_mpz_t());
  }
  QLattice q;
  q.ambient = ambient;
  q.den = den;
  q.basis = std::move(z.basis);
  return q;
}

QLattice QLattice::from_zlattice(const ZLattice& l) {
  return from_rows(l.ambient, RatMatrix(l.basis));
}

RatMatrix QLattice::rat_rows() const {
  RatMatrix r(basis.rows, ambient);
  for (std::size_t i = 0; i < basis.rows; ++i)
    for (std::size_t j = 0; j < ambient; ++j)
      r.at(i, j) = Rat(basis.at(i, j)) / Rat(den);
  return r;
}

std::vector<Rat> QLattice::row(std::size_t i) const {
  std::vector<Rat> r(ambient);
  for (std::size_t j = 0; j < ambient; ++j) r[j] = Rat(basis.at(i, j)) / Rat(den);
  return r;
}

bool QLattice::contains(const std::vector<Rat>& v) const {
  auto x = solve_row(RatMatrix(basis), [&] {
    std::vector<Rat> s(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) s[i] = v[i] * Rat(den);
    return s;
  }());
  if (!x) return false;
  for (const auto& c : *x)
    if (c.get_den() != 1) return false;
  return true;
}

bool QLattice::contains(const QLattice& other) const {
  for (std::size_t i = 0; i < other.rank(); ++i)
    if (!contains(other.row(i))) return false;
  return true;
}

QLattice lattice_sum(const QLattice& a, const QLattice& b) {
  if (a.ambient != b.ambient) throw DimensionMismatch("lattice_sum");
  return QLattice::from_rows(a.ambient, vstack(a.rat_rows(), b.rat_rows()));
}

QLattice lattice_intersect(const QLattice& a, const QLattice& b) {
  if (a.ambient != b.ambient) throw DimensionMismatch("lattice_intersect");
  RatMatrix bneg = b.rat_rows();
  for (auto& x : bneg.e) x = -x;
  ZLattice k = kernel_saturated(vstack(a.rat_rows(), bneg));
  // u-part of each kernel row combines a's basis into the intersection.
  RatMatrix arows = a.rat_rows();
  RatMatrix rows(k.rank(), a.ambient);
  for (std::size_t i = 0; i < k.rank(); ++i)
    for (std::size_t c = 0; c < a.rank(); ++c) {
      if (k.basis.at(i, c) == 0) continue;
      for (std::size_t j = 0; j < a.ambient; ++j)
        rows.at(i, j) += Rat(k.basis.at(i, c)) * arows.at(c, j);
    }
  return QLattice::from_rows(a.ambient, rows);
}

Rat lattice_index(const QLattice& sub, const QLattice& sup) {
  if (sub.ambient != sup.ambient) throw RankMismatch("different ambient spaces");
  if (sub.rank() != sup.rank()) throw RankMismatch("ranks differ");
  if (!sup.contains(sub)) throw NotSublattice();
  const std::size_t r = sub.rank();
  if (r == 0) return Rat(1);
  RatMatrix supb = sup.rat_rows();
  RatMatrix change(r, r);
  for (std::size_t i = 0; i < r; ++i) {
    auto x = solve_row(supb, sub.row(i));
    if (!x) throw NotSublattice();
    for (std::size_t j = 0; j < r; ++j) change.at(i, j) = (*x)[j];
  }
  // determinant of the (integral) change of basis
  IntMatrix c(r, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      if (change.at(i, j).get_den() != 1) throw NotSublattice();
      c.at(i, j) = change.at(i, j).get_num();
    }
  return Rat(abs(det(c)));
}

}  // namespace serrehom
