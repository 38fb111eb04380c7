#include "serrehom/field_matrix.hpp"

namespace serrehom {

FMatrix FMatrix::identity(const ImQuadField& f, std::size_t n) {
  FMatrix m(f, n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = fe_rational(f, 1);
  return m;
}

FMatrix FMatrix::scalar(const ImQuadField& f, std::size_t n, const FieldElement& x) {
  FMatrix m(f, n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = x;
  return m;
}

namespace {
void check_field(const FMatrix& a, const FMatrix& b) {
  if (a.field != b.field) throw RingMismatch("FMatrix fields");
}
}  // namespace

FMatrix fmul(const FMatrix& a, const FMatrix& b) {
  check_field(a, b);
  if (a.cols != b.rows) throw DimensionMismatch("fmul");
  FMatrix c(a.field, a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      if (a.at(i, k).is_zero()) continue;
      for (std::size_t j = 0; j < b.cols; ++j)
        c.at(i, j) = add(c.at(i, j), mul(a.at(i, k), b.at(k, j)));
    }
  return c;
}

FMatrix fadd(const FMatrix& a, const FMatrix& b) {
  check_field(a, b);
  if (a.rows != b.rows || a.cols != b.cols) throw DimensionMismatch("fadd");
  FMatrix c = a;
  for (std::size_t i = 0; i < c.e.size(); ++i) c.e[i] = add(c.e[i], b.e[i]);
  return c;
}

FMatrix fsub(const FMatrix& a, const FMatrix& b) {
  check_field(a, b);
  if (a.rows != b.rows || a.cols != b.cols) throw DimensionMismatch("fsub");
  FMatrix c = a;
  for (std::size_t i = 0; i < c.e.size(); ++i) c.e[i] = sub(c.e[i], b.e[i]);
  return c;
}

FMatrix fscale(const FieldElement& c, const FMatrix& a) {
  FMatrix r = a;
  for (auto& x : r.e) x = mul(c, x);
  return r;
}

FMatrix ftranspose(const FMatrix& a) {
  FMatrix t(a.field, a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) t.at(j, i) = a.at(i, j);
  return t;
}

FMatrix fconj(const FMatrix& a) {
  FMatrix r = a;
  for (auto& x : r.e) x = conjugate(x);
  return r;
}

FMatrix fapply(const GaloisGroup& g, const FMatrix& a) {
  if (g.action == GroupAction::trivial) return a;
  return fconj(a);
}

namespace {

// Row echelon over the field; returns pivot columns.
std::vector<std::size_t> fechelonize(FMatrix& m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
    std::size_t p = r;
    while (p < m.rows && m.at(p, c).is_zero()) ++p;
    if (p == m.rows) continue;
    if (p != r)
      for (std::size_t j = 0; j < m.cols; ++j) std::swap(m.at(r, j), m.at(p, j));
    FieldElement inv = inverse(m.at(r, c));
    for (std::size_t j = c; j < m.cols; ++j) m.at(r, j) = mul(inv, m.at(r, j));
    for (std::size_t i = 0; i < m.rows; ++i) {
      if (i == r || m.at(i, c).is_zero()) continue;
      FieldElement f = m.at(i, c);
      for (std::size_t j = c; j < m.cols; ++j)
        m.at(i, j) = sub(m.at(i, j), mul(f, m.at(r, j)));
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

std::size_t frank(FMatrix a) { return fechelonize(a).size(); }

FMatrix finverse(const FMatrix& a) {
  if (a.rows != a.cols) throw DimensionMismatch("finverse of non-square");
  FMatrix aug(a.field, a.rows, 2 * a.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) aug.at(i, j) = a.at(i, j);
    aug.at(i, a.cols + i) = fe_rational(a.field, 1);
  }
  auto pivots = fechelonize(aug);
  if (pivots.size() != a.rows || (a.rows && pivots.back() >= a.cols))
    throw DivisionByZero("singular matrix");
  FMatrix inv(a.field, a.rows, a.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) inv.at(i, j) = aug.at(i, a.cols + j);
  return inv;
}

FMatrix fright_kernel(const FMatrix& a) {
  FMatrix w = a;
  auto pivots = fechelonize(w);
  std::vector<bool> is_pivot(a.cols, false);
  for (auto c : pivots) is_pivot[c] = true;
  FMatrix ker(a.field, a.cols - pivots.size(), a.cols);
  std::size_t r = 0;
  for (std::size_t c = 0; c < a.cols; ++c) {
    if (is_pivot[c]) continue;
    ker.at(r, c) = fe_rational(a.field, 1);
    for (std::size_t k = 0; k < pivots.size(); ++k)
      ker.at(r, pivots[k]) = neg(w.at(k, c));
    ++r;
  }
  return ker;
}

std::optional<std::vector<FieldElement>> fsolve_row(
    const FMatrix& b, const std::vector<FieldElement>& s) {
  if (s.size() != b.cols) throw DimensionMismatch("fsolve_row");
  FMatrix aug(b.field, b.cols, b.rows + 1);
  for (std::size_t i = 0; i < b.rows; ++i)
    for (std::size_t j = 0; j < b.cols; ++j) aug.at(j, i) = b.at(i, j);
  for (std::size_t j = 0; j < b.cols; ++j) aug.at(j, b.rows) = s[j];
  auto pivots = fechelonize(aug);
  std::vector<FieldElement> x(b.rows, fe_rational(b.field, 0));
  for (std::size_t k = 0; k < pivots.size(); ++k) {
    if (pivots[k] == b.rows) return std::nullopt;
    x[pivots[k]] = aug.at(k, b.rows);
  }
  return x;
}

std::vector<FieldElement> fapply_vec(const FMatrix& a,
                                     const std::vector<FieldElement>& v) {
  if (v.size() != a.cols) throw DimensionMismatch("fapply_vec");
  std::vector<FieldElement> r(a.rows, fe_rational(a.field, 0));
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j)
      r[i] = add(r[i], mul(a.at(i, j), v[j]));
  return r;
}

}  // namespace serrehom
