#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "serrehom/errors.hpp"

namespace serrehom {

using Int = mpz_class;
using Rat = mpq_class;

// mpq_class(p, q) does not canonicalize; this does.
inline Rat make_rat(const Int& num, const Int& den) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

// Cooperative cancellation: long reductions poll the hook and abort with
// OperationCancelled once it returns true.
using CancelHook = std::function<bool()>;

// Dense row-major matrix of arbitrary-precision integers.  All arithmetic in
// this module is exact; no floating point anywhere.
struct IntMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<Int> e;

  IntMatrix() = default;
  IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), e(r * c) {}
  IntMatrix(std::size_t r, std::size_t c, std::vector<Int> entries);

  static IntMatrix identity(std::size_t n);

  Int& at(std::size_t i, std::size_t j) { return e[i * cols + j]; }
  const Int& at(std::size_t i, std::size_t j) const { return e[i * cols + j]; }

  bool is_zero() const;
  bool operator==(const IntMatrix&) const = default;
};

IntMatrix mul(const IntMatrix& a, const IntMatrix& b);
IntMatrix transpose(const IntMatrix& m);
IntMatrix vstack(const IntMatrix& a, const IntMatrix& b);
Int det(IntMatrix m);  // Bareiss fraction-free elimination
bool is_unimodular(const IntMatrix& m);

// Exact rational matrix; every entry kept in lowest terms (mpq_class
// canonicalizes on arithmetic).
struct RatMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<Rat> e;

  RatMatrix() = default;
  RatMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), e(r * c) {}
  explicit RatMatrix(const IntMatrix& m);

  static RatMatrix identity(std::size_t n);

  Rat& at(std::size_t i, std::size_t j) { return e[i * cols + j]; }
  const Rat& at(std::size_t i, std::size_t j) const { return e[i * cols + j]; }

  bool operator==(const RatMatrix&) const = default;
};

RatMatrix mul(const RatMatrix& a, const RatMatrix& b);
RatMatrix transpose(const RatMatrix& m);
RatMatrix vstack(const RatMatrix& a, const RatMatrix& b);
std::size_t rank(RatMatrix m);

// Solves x * b = s for a row vector x, or nullopt when s is outside the row
// space.  b need not be square.
std::optional<std::vector<Rat>> solve_row(const RatMatrix& b,
                                          const std::vector<Rat>& s);

// Basis (rows) of { z : m * z^T = 0 }, i.e. the right kernel, over the
// rationals.
RatMatrix right_kernel(const RatMatrix& m);

// Row-style Hermite normal form: u * m = h with u unimodular, pivots
// positive, entries above each pivot reduced into [0, pivot), zero rows
// trailing.
struct HnfResult {
  IntMatrix h;
  IntMatrix u;
};
HnfResult hnf(const IntMatrix& m);

// Smith normal form: u * m * v diagonal with d_1 | d_2 | ..., zeros trailing,
// u and v unimodular.  `factors` has length min(rows, cols).
struct SnfResult {
  std::vector<Int> factors;
  IntMatrix u;
  IntMatrix v;
};
SnfResult snf(const IntMatrix& m, const CancelHook* cancel = nullptr);

// Full-canonical integer lattice: basis rows in HNF with zero rows dropped.
// Equality of lattices is equality of the canonical basis.
struct ZLattice {
  std::size_t ambient = 0;
  IntMatrix basis;  // rank x ambient, HNF

  static ZLattice from_rows(std::size_t ambient, const IntMatrix& rows);
  static ZLattice full(std::size_t ambient);

  std::size_t rank() const { return basis.rows; }
  bool contains(const std::vector<Int>& v) const;
  bool contains(const ZLattice& other) const;
  bool operator==(const ZLattice&) const = default;
};

// Saturated integer kernel { v : v * m = 0 }.  The result equals its own
// rational closure intersected with the integer lattice.
ZLattice kernel_saturated(const RatMatrix& m);

// Index [sup : sub] for equal-rank lattices with sub contained in sup.
// Throws RankMismatch / NotSublattice.
Int lattice_index(const ZLattice& sub, const ZLattice& sup);

// Fractional lattice (1/den) * ZLattice, canonical: gcd(den, content) = 1.
struct QLattice {
  std::size_t ambient = 0;
  Int den = 1;
  IntMatrix basis;  // HNF, zero rows dropped

  static QLattice from_rows(std::size_t ambient, const RatMatrix& rows);
  static QLattice from_zlattice(const ZLattice& l);

  std::size_t rank() const { return basis.rows; }
  RatMatrix rat_rows() const;
  std::vector<Rat> row(std::size_t i) const;
  bool contains(const std::vector<Rat>& v) const;
  bool contains(const QLattice& other) const;
  bool operator==(const QLattice&) const = default;
};

QLattice lattice_sum(const QLattice& a, const QLattice& b);
QLattice lattice_intersect(const QLattice& a, const QLattice& b);
// [sup : sub] as a positive rational (integral when sub is contained in sup;
// containment is required and checked).
Rat lattice_index(const QLattice& sub, const QLattice& sup);

}  // namespace serrehom
