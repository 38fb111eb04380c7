#pragma once

#include <array>
#include <optional>

#include "serrehom/gmodules.hpp"

namespace serrehom {

// CM elliptic curve as a lattice: E = C/L with End(E) = order.
struct CMCurve {
  QuadOrder order;
  FracIdeal lattice;
  GaloisGroup group;

  static CMCurve make(const QuadOrder& o, const FracIdeal& l, const GaloisGroup& g);
  // C/O for the order itself.
  static CMCurve principal(const QuadOrder& o, const GaloisGroup& g);
};

// Complex torus presented by a full lattice of vectors in F^n, flattened to
// 2n rational coordinates, with an optional semilinear involution
// v -> A * conj(v) stabilizing the lattice.
struct LatticeTorus {
  ImQuadField field{-1};
  std::size_t ambient_f = 0;  // dimension of the ambient F-space
  QLattice lattice;           // ambient 2 * ambient_f
  std::optional<FMatrix> descent;

  std::size_t complex_dim() const { return lattice.rank() / 2; }
};

// Flat 2n x 2n rational matrix of an F-linear map given by an FMatrix.
RatMatrix flat_of_fmatrix(const FMatrix& a);
// Flat matrix of the semilinear map v -> A * conj(v).
RatMatrix flat_of_semilinear(const FMatrix& a);

// Component group of a kernel, with the sigma action on its generators when
// a stable descent is available.
struct FiniteGroupData {
  std::vector<Int> invariants;  // nontrivial invariant factors
  Int order = 1;
  std::optional<IntMatrix> sigma_on_gens;
};

struct CurveDesc {
  long long d = -1;
  Int f = 1;
  FracIdeal lattice;
};

// Verifiable record of an isogeny: map carries source lattice into target
// lattice, degree = index of the image, kernel order = degree.
struct IsogenyCert {
  CurveDesc source, target;
  FMatrix map;
  Int degree = 1;
  FiniteGroupData kernel;
  // degree of the dual inclusion-induced map target' -> source (equal)
  Int inclusion_degree = 1;
  std::optional<std::string> j_source, j_target;
  std::optional<FieldElement> alpha;
};

LatticeTorus torus_of_curve(const CMCurve& e);

// Weil-restriction model: Lambda = L + conj(L), descent (x, y) ->
// (conj y, conj x); the curve itself when |G| = 1.
LatticeTorus res_torus(const CMCurve& e);

struct HomTorusResult {
  LatticeTorus torus;          // identity component, in the Res^n ambient
  FiniteGroupData components;  // torsion part of the kernel
  std::size_t res_factors = 0; // n, the number of Res factors
};

// Kernel of the presentation matrix acting on (Res E)^n: the lattice model
// of Hom_{R<G>}(M, E).
HomTorusResult hom_torus(const PresentedModule& m, const CMCurve& e);

// Rank-1 shortcut: the curve with lattice (L : i).
CMCurve hom_ideal(const FracIdeal& i, const CMCurve& e);

// For modules built from an ideal marked by its first generator: the
// coefficient lattice of a rank-1 kernel, directly comparable with
// hom_ideal.
FracIdeal kernel_coefficient_ideal(const HomTorusResult& r,
                                   const FieldElement& marked_generator);

// Kernel data and degree of an F-linear isogeny between lattice tori.
std::pair<FiniteGroupData, Int> kernel_and_degree(const FMatrix& map,
                                                  const LatticeTorus& src,
                                                  const LatticeTorus& dst);

// E' = Hom(O_F, E) together with the degree-f isogeny data of the conductor
// construction; the certificate records the multiplication-by-f map
// E -> E' whose lattice image realizes the dual of the inclusion E' -> E.
IsogenyCert maximal_order_isogeny(const CMCurve& e);

// Exactness report for applying the Hom functor to a short exact sequence;
// tori appear in the contravariant order A(M3) -> A(M2) -> A(M1).
struct SesTorusReport {
  bool module_exact = false;
  std::array<std::size_t, 3> dims{};      // complex dimensions
  std::array<Int, 3> component_orders{};  // |pi_0| per term
  bool maps_preserve_lattices = false;
  bool composite_zero = false;
  bool subspace_exact = false;  // im = ker at the middle term over Q
  Int middle_index = 0;         // [ker cap Lambda : image lattice]
  Int end_kernel_order = 0;     // |pi_0(ker(A2 -> A1-end))|
  bool end_surjective = false;
  bool exact = false;
};

SesTorusReport apply_ses(const ShortExactSeq& ses, const CMCurve& e);

// Flat matrix of the torus map induced by a module map (contravariant).
RatMatrix induced_torus_map(const ModuleMap& f, const CMCurve& e);

}  // namespace serrehom
