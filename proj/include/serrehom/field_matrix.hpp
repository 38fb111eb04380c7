#pragma once

#include <optional>
#include <vector>

#include "serrehom/twisted_ring.hpp"

namespace serrehom {

// Dense matrix over an imaginary quadratic field (or Q via b = 0 entries).
struct FMatrix {
  ImQuadField field{-1};
  std::size_t rows = 0, cols = 0;
  std::vector<FieldElement> e;

  FMatrix() = default;
  FMatrix(const ImQuadField& f, std::size_t r, std::size_t c)
      : field(f), rows(r), cols(c), e(r * c, fe_rational(f, 0)) {}

  static FMatrix identity(const ImQuadField& f, std::size_t n);
  static FMatrix scalar(const ImQuadField& f, std::size_t n, const FieldElement& x);

  FieldElement& at(std::size_t i, std::size_t j) { return e[i * cols + j]; }
  const FieldElement& at(std::size_t i, std::size_t j) const { return e[i * cols + j]; }

  bool operator==(const FMatrix&) const = default;
};

FMatrix fmul(const FMatrix& a, const FMatrix& b);
FMatrix fadd(const FMatrix& a, const FMatrix& b);
FMatrix fsub(const FMatrix& a, const FMatrix& b);
FMatrix fscale(const FieldElement& c, const FMatrix& a);
FMatrix ftranspose(const FMatrix& a);
// Entrywise conjugation.
FMatrix fconj(const FMatrix& a);
// Entrywise group action (conjugation or identity).
FMatrix fapply(const GaloisGroup& g, const FMatrix& a);

std::size_t frank(FMatrix a);
FMatrix finverse(const FMatrix& a);  // throws DimensionMismatch / DivisionByZero
// Rows spanning { x : a * x^T = 0 }.
FMatrix fright_kernel(const FMatrix& a);
std::optional<std::vector<FieldElement>> fsolve_row(const FMatrix& b,
                                                    const std::vector<FieldElement>& s);

std::vector<FieldElement> fapply_vec(const FMatrix& a,
                                     const std::vector<FieldElement>& v);

}  // namespace serrehom
