#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "serrehom/field_matrix.hpp"

namespace serrehom {

// Finitely presented left R<G>-module: cokernel of right multiplication by
// the presentation matrix, i.e. relations are the rows of `pres`.
struct PresentedModule {
  CoeffRing ring;
  GaloisGroup group;
  TwistedMatrix pres;  // m x n

  std::size_t gens() const { return pres.cols; }

  static PresentedModule make(const CoeffRing& r, const GaloisGroup& g,
                              const TwistedMatrix& pres);
  // Free module R<G>^n.
  static PresentedModule regular(const CoeffRing& r, const GaloisGroup& g,
                                 std::size_t n = 1);
  // R itself as an R<G>-module (sigma acts through the coefficient action).
  static PresentedModule base_ring(const CoeffRing& r, const GaloisGroup& g);

  bool operator==(const PresentedModule&) const = default;
};

// Z-linear shadow of a presented module: relations flattened to integer
// coordinates, invariants from SNF, and the flat matrices of the ring
// generator and sigma actions.  Action matrices act on column vectors and
// descend to the quotient.
struct FlatModel {
  std::size_t dim = 0;       // ambient Z-rank (gens * zrank(R<G>))
  IntMatrix relations;       // rows span the relation lattice
  std::size_t free_rank = 0;
  std::vector<Int> torsion;  // invariant factors > 1
  std::optional<IntMatrix> omega_action;  // mult by f*omega (Order carrier)
  std::optional<IntMatrix> sigma_action;

  Int torsion_order() const;
  bool same_invariants(const FlatModel& other) const;
};

std::size_t flat_block_size(const PresentedModule& m);  // zrank(R) * |G|
FlatModel flatten(const PresentedModule& m, const CancelHook* cancel = nullptr);

std::size_t rank_over_R(const PresentedModule& m);
bool is_torsion_free_over_R(const PresentedModule& m);

// Forgets the sigma-action: a module over R (group C1) on gens * |G|
// generators.
PresentedModule restrict_module(const PresentedModule& m);
// R<G> tensor_R m for a plain R-module m.
PresentedModule induce_module(const PresentedModule& m, const GaloisGroup& g);
// Hom_R(R<G>, x) with ((tau g)_s = g_{s tau}); x a plain R-module.
PresentedModule coinduce_module(const PresentedModule& x, const GaloisGroup& g);

// An explicit hom src -> dst, stored as flat images of the generators.
struct ModuleHom {
  PresentedModule src, dst;
  std::vector<std::vector<Int>> images;  // src.gens() vectors of flat dim(dst)
};

bool hom_is_valid(const ModuleHom& h);
bool hom_equal_on_generators(const ModuleHom& a, const ModuleHom& b);

// The abelian group Hom_{R<G>}(m, n) together with explicit generating homs.
struct HomSpace {
  FlatModel group;                 // invariants of the hom group
  std::vector<ModuleHom> basis;    // generators (may include torsion reps)
};

HomSpace solve_hom(const PresentedModule& m, const PresentedModule& n,
                   const CancelHook* cancel = nullptr);
FlatModel hom_module(const PresentedModule& m, const PresentedModule& n,
                     const CancelHook* cancel = nullptr);

// Explicit bijection Hom_{R<G>}(induce(m), n) <-> Hom_R(m, restrict(n)).
struct AdjunctionMaps {
  PresentedModule induced_or_coinduced;  // the constructed module
  std::function<ModuleHom(const ModuleHom&)> forward;
  std::function<ModuleHom(const ModuleHom&)> backward;
};

AdjunctionMaps adjunction_restriction(const PresentedModule& m_plain,
                                      const PresentedModule& n,
                                      const GaloisGroup& g);
// Bijection Hom_R(restrict(m), x) <-> Hom_{R<G>}(m, coinduce(x)).
AdjunctionMaps adjunction_coinduction(const PresentedModule& m,
                                      const PresentedModule& x_plain);

// The literal tuple law g_s = s f_{s^{-1}} on tuples over restrict(m), and
// its inverse.  Tuples are pairs (component at 1, component at sigma) of flat
// vectors of m.
using FlatVec = std::vector<Int>;
std::pair<FlatVec, FlatVec> tuple_g_from_f(const PresentedModule& m,
                                           const std::pair<FlatVec, FlatVec>& f);
std::pair<FlatVec, FlatVec> tuple_f_from_g(const PresentedModule& m,
                                           const std::pair<FlatVec, FlatVec>& g);
// The two tuple-space G-actions the law intertwines.
std::pair<FlatVec, FlatVec> tuple_f_action(const PresentedModule& m,
                                           const std::pair<FlatVec, FlatVec>& f);
std::pair<FlatVec, FlatVec> tuple_g_action(const PresentedModule& m,
                                           const std::pair<FlatVec, FlatVec>& g);

// Finite-dimensional F<G>-module: sigma acts by v -> S * act(v) where act is
// the entrywise coefficient action.  Semilinear involution law:
// S * act(S) = identity.
struct RationalGModule {
  ImQuadField field{-1};
  GaloisGroup group;
  std::size_t dim = 0;
  FMatrix S;

  static RationalGModule make(const ImQuadField& f, const GaloisGroup& g,
                              const FMatrix& S);
};

// M tensor Q as an F<G>-module (integral carriers only).
RationalGModule rationalize(const PresentedModule& m);

// Averaged equivariant section of Lemma-style splitting: given an
// equivariant surjection phi: V -> W and any F-linear section s, returns
// (1/|G|) * sum_g g s g^{-1}, an equivariant section.
FMatrix split_surjection(const RationalGModule& v, const RationalGModule& w,
                         const FMatrix& phi, const FMatrix& s);

// Multiplicities of the two simple C2-modules plus an explicit decomposition
// basis.  Under conjugation the minus part is pre-identified with the plus
// part by a purely imaginary element, so r' = 0 and alpha is recorded.
struct Decomposition {
  std::size_t r = 0, r_prime = 0;
  FMatrix change_of_basis;  // columns
  std::optional<FieldElement> alpha;
};

Decomposition decompose_C2(const RationalGModule& v);

// Rank-1 semilinear modules: the ideal i with sigma(x) = u * act(x).
// Validity: u * act(i) = i and u * act(u) = 1.
PresentedModule module_from_ideal(const FracIdeal& i, const FieldElement& u,
                                  const QuadOrder& o, const GaloisGroup& g);

// A module map src -> dst given on generators: e_i -> sum_j mat(i,j) e'_j.
struct ModuleMap {
  PresentedModule src, dst;
  TwistedMatrix mat;  // src.gens() x dst.gens()
};

bool map_is_valid(const ModuleMap& f);
ModuleHom map_as_hom(const ModuleMap& f);

struct ShortExactSeq {
  ModuleMap inj;   // M1 -> M2
  ModuleMap surj;  // M2 -> M3
};

// Exactness of 0 -> M1 -> M2 -> M3 -> 0 verified on the flattened models.
bool ses_is_exact(const ShortExactSeq& s);

// 0 -> O -> O_F -> O_F/O -> 0 with the action induced from the field.
ShortExactSeq conductor_ses(const QuadOrder& o, const GaloisGroup& g);

}  // namespace serrehom
