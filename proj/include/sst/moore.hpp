#pragma once

#include <optional>
#include <vector>

#include "sst/towers.hpp"

namespace sst {

/* gcd of the integer contents of the family, nonnegative; elements
   without content act by zero on complexes and contribute nothing */
Int family_content(const std::vector<RingElement>& fs);

/* iterated cone on the multiplication maps of the family, folded from
   the right so the first element sits outermost. H_0 is the base
   modulo the contents and the unit map induces that quotient. The
   family must be nonempty; towers handle the empty case through the
   base of their input complex. */
FreeComplex moore_smash(const std::vector<RingElement>& fs);
ChainMapF moore_unit(const std::vector<RingElement>& fs);

/* cone on multiplication by f^j, and the map C(f^j) -> C(f^(j-1))
   collapsing one power */
FreeComplex power_cone(const RingElement& f, int j);
ChainMapF power_cone_step(const RingElement& f, int j);

/*
 * Tower with level s = X (x) C(f_1^(s+1)) (x) ... (x) C(f_r^(s+1)), the
 * power collapses as transitions and the smashed unit inclusions as the
 * maps from X. Construction checks that the maps from X descend through
 * the transitions on the nose, and that each single-slot collapse has
 * the expected fibre: its homology must match, degree by degree, the
 * level with that slot replaced by a shifted one-power cone.
 */
struct AdicTower {
  FreeComplex x;
  std::vector<RingElement> fs;
  ComplexTower levels;
  std::vector<ChainMapF> from_x;  // from_x[s] : X -> level s
};

AdicTower adic_tower(const FreeComplex& x, const std::vector<RingElement>& fs, int window);

/*
 * Completion data of one homology degree. The limit is read off the
 * content-adic tower of H_k(X), which the tail rules make definite;
 * window_consistent cross-checks the literal levels: the kernel of the
 * map from H_k(X) into level j must be exactly the (j+1)-st content
 * multiple (exact at every level), and everything outside the image
 * must die down the tower (witness searched inside the window, so this
 * half degrades to Undetermined when the junk outlives the window).
 * The fibre verdicts describe the multiplication tower H <- H <- ... by
 * the content: fibre_zero says the completion map is an equivalence in
 * this degree, fibre_invertible certifies the one-step multiplication
 * as a pro-isomorphism.
 */
struct DegreeCompletion {
  int degree = 0;
  LimResult milnor;
  Verdict window_consistent = Verdict::Undetermined;
  Verdict fibre_invertible = Verdict::Undetermined;
  Verdict fibre_zero = Verdict::Undetermined;
};

struct Completion {
  AdicTower tower;
  Int content = 0;
  std::vector<DegreeCompletion> degrees;
  Verdict consistent = Verdict::Undetermined;  // fold of window_consistent
  Verdict complete = Verdict::Undetermined;    // fold of fibre_zero
};

Completion derived_completion(const FreeComplex& x, const std::vector<RingElement>& fs,
                              int window = 5);

/*
 * Fibre of the completion map along one element, realized as the
 * multiplication tower ... -> X -> X (shifted copies with zero
 * transitions when the element acts by zero). Per homology degree the
 * one-step multiplication pro-map is certified invertible with explicit
 * level witnesses; vanishing of the whole tower says X was already
 * complete at the element.
 */
struct FibreTower {
  ComplexTower levels;
  std::vector<int> degrees;
  std::vector<ModuleTower> homology;
  std::vector<ProMap> mult;
  std::vector<ProIso> certificates;
  Verdict invertible = Verdict::Undetermined;
  Verdict vanishes = Verdict::Undetermined;
};

FibreTower completion_fibre(const FreeComplex& x, const RingElement& f, int window = 5);

/*
 * Base change inverting the integer contents of s. An element acting by
 * zero (or with content zero) forces the zero complex; otherwise the
 * matrices of X are kept over the base with the content primes
 * inverted. homology_localized checks H_k(result) against the localized
 * H_k(X) degreewise, mult_invertible that every element of s acts
 * invertibly on the result's homology.
 */
struct InvertedComplex {
  FreeComplex source;
  std::vector<RingElement> s;
  FreeComplex result;
  Verdict homology_localized = Verdict::Undetermined;
  Verdict mult_invertible = Verdict::Undetermined;
};

InvertedComplex invert(const FreeComplex& x, const std::vector<RingElement>& s);

/*
 * Arithmetic square of X at one element: complete, invert, and do both.
 * When every corner is an honest finitely generated module (limits
 * stabilize inside the window and the inverted homology restricts back
 * to the base) the square is checked to be a pullback degreewise:
 * H_k(X) must map isomorphically onto completed (+) inverted, with the
 * doubly localized corner zero. Otherwise evaluable stays False and the
 * pro-level completion data is the report. relocalization checks that
 * completing the inverted complex at the same element leaves nothing.
 */
struct FractureDegree {
  int degree = 0;
  FGModule at;         // H_k(X)
  FGModule completed;  // stabilized limit corner
  FGModule inverted;   // restricted back to the base of X
  FGModule both;       // doubly localized corner, zero whenever evaluable
  Verdict split = Verdict::Undetermined;
};

struct FractureSquare {
  FreeComplex x;
  RingElement f;
  Completion completion;
  InvertedComplex inverted;
  FreeComplex completed_model;  // deepest tower level; carries pro-trivial
                                // junk in shifted degrees, so corners are
                                // read from the stabilized limits instead
  ChainMapF to_completed;
  InvertedComplex both;
  Verdict evaluable = Verdict::Undetermined;
  std::vector<FractureDegree> degrees;
  Verdict pullback = Verdict::Undetermined;
  Verdict relocalization = Verdict::Undetermined;
};

FractureSquare fracture_square(const FreeComplex& x, const RingElement& f, int window = 5);

/*
 * Certificate that two families generate the same ideal of the graded
 * ring: each element of one written as a combination of the other.
 * acyclicity_equivalence validates the certificate, runs the smash
 * acyclicity test X (x) M(-) = 0 on both families after executing the
 * nilpotency of every content on the smashed homology, and reports
 * whether the two answers agree.
 */
struct IdealCertificate {
  std::vector<std::vector<RingElement>> f_from_g;  // fs[i] = sum_j c[i][j] * gs[j]
  std::vector<std::vector<RingElement>> g_from_f;
};

bool acyclicity_equivalence(const FreeComplex& x, const std::vector<RingElement>& fs,
                            const std::vector<RingElement>& gs, const IdealCertificate& cert);

}  // namespace sst
