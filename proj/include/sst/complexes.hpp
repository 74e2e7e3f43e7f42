#pragma once

#include <map>
#include <vector>

#include "sst/fg_module.hpp"
#include "sst/graded_ring.hpp"

namespace sst {

/*
 * Bounded chain complex with free levels. Level lo+i has one basis
 * element per entry of wts[i], carrying that weight. d[i] is the
 * differential from level lo+i+1 to level lo+i; all differentials are
 * weight preserving and compose to zero (mod m over Z/m).
 */
struct FreeComplex {
  BaseRing base;
  int lo = 0;
  std::vector<std::vector<int>> wts;
  std::vector<IntMat> d;

  int hi() const { return lo + static_cast<int>(wts.size()) - 1; }
  bool in_range(int k) const { return k >= lo && k <= hi(); }
  Index rank(int k) const {
    return in_range(k) ? static_cast<Index>(wts[k - lo].size()) : 0;
  }
  std::vector<int> weights_at(int k) const {
    return in_range(k) ? wts[k - lo] : std::vector<int>{};
  }
  /* differential out of level k, materializing zero blocks at the ends */
  IntMat diff(int k) const;
  std::vector<int> weight_set() const;
  bool operator==(const FreeComplex& o) const;
};

FreeComplex free_complex(BaseRing base, int lo, std::vector<std::vector<int>> wts,
                         std::vector<IntMat> d);
FreeComplex zero_complex(BaseRing base);
FreeComplex unit_complex(BaseRing base);
/* one free generator in homological degree k and weight w */
FreeComplex sphere_complex(BaseRing base, int k, int w);
FreeComplex shift_complex(const FreeComplex& x, int p, int w);

/*
 * Degree-0 chain map between free complexes; comps holds the nonzero
 * level components, each weight preserving.
 */
struct ChainMapF {
  FreeComplex src;
  FreeComplex tgt;
  std::map<int, IntMat> comps;

  IntMat at(int k) const;
  bool is_zero() const { return comps.empty(); }
  bool operator==(const ChainMapF& o) const;
};

ChainMapF chain_map(FreeComplex src, FreeComplex tgt, std::map<int, IntMat> comps);
ChainMapF zero_chain_map(FreeComplex src, FreeComplex tgt);
ChainMapF id_chain_map(const FreeComplex& x);
ChainMapF compose_chain(const ChainMapF& f, const ChainMapF& g);  // f after g
ChainMapF add_chain(const ChainMapF& f, const ChainMapF& g);
ChainMapF negate_chain(const ChainMapF& f);
ChainMapF scale_chain(Int n, const ChainMapF& f);
ChainMapF shift_chain(const ChainMapF& f, int p, int w);

/* mapping cone C(f)_k = X_{k-1} + Y_k with its triangle maps */
FreeComplex cone(const ChainMapF& f);
ChainMapF cone_incl(const ChainMapF& f);  // Y -> C(f)
ChainMapF cone_proj(const ChainMapF& f);  // C(f) -> X[1]

/* map of cones C(f) -> C(g) induced by a strictly commuting square
   beta o f = g o alpha, acting blockwise as (alpha[k-1], beta[k]) */
ChainMapF cone_map(const ChainMapF& f, const ChainMapF& g, const ChainMapF& alpha,
                   const ChainMapF& beta);

/* fibre F(f) = C(f)[-1], so shifting it up gives the cone literally */
FreeComplex fibre(const ChainMapF& f);
ChainMapF fibre_proj(const ChainMapF& f);  // F(f) -> X
ChainMapF fibre_incl(const ChainMapF& f);  // Y[-1] -> F(f)

/*
 * Tensor product over the base. Level k is the sum of X_i (x) Y_{k-i}
 * with i ascending and the left factor outer within each block, and
 * d = d_X (x) 1 + (-1)^i 1 (x) d_Y. The unit complex is a strict unit
 * on either side, and shifting the left factor commutes with tensoring
 * on the nose.
 */
FreeComplex tensor(const FreeComplex& x, const FreeComplex& y);
ChainMapF tensor_chain(const ChainMapF& f, const ChainMapF& g);

/* the braiding X (x) Y -> Y (x) X sending a (x) b to (-1)^(ij) b (x) a
   for generators in levels i and j; an involution, natural in both
   slots on the nose */
ChainMapF tensor_swap(const FreeComplex& x, const FreeComplex& y);

/* multiplication by a ring element: n * id for integer content n in
   bidegree (0, 0), otherwise the zero map shift(X, hdeg, deg) -> X */
ChainMapF multiplication_map(const RingElement& f, const FreeComplex& x);

/* homology of one level and weight, with the cycle basis used to
   present it */
struct HomologyData {
  FGModule mod;
  IntMat cycles;  // level-rank x cycle-count, weight w columns
  IntMat proj;    // module coords of cycle columns
  IntMat lift;    // cycle coords of module generators
};

HomologyData homology_data(const FreeComplex& x, int k, int w);
FGModule homology_at(const FreeComplex& x, int k, int w);
/* all weights of one level combined into one module */
FGModule homology_module(const FreeComplex& x, int k);
ModuleMap induced_map(const ChainMapF& f, int k);

/*
 * Gauss cancellation of unit differential entries. Over the hereditary
 * bases only +-1 pivots are cancelled; over Z/m any entry invertible
 * mod m is. Returns the reduced complex with both transfer maps, and
 * proj * incl is the identity on the reduction.
 */
struct Minimized {
  FreeComplex min;
  ChainMapF incl;  // min -> original
  ChainMapF proj;  // original -> min
};

Minimized minimize(const FreeComplex& x);

/* complexes of presented modules */
struct ModuleComplex {
  BaseRing base;
  int lo = 0;
  std::vector<FGModule> mods;
  std::vector<ModuleMap> maps;  // maps[i]: level lo+i+1 -> level lo+i

  int hi() const { return lo + static_cast<int>(mods.size()) - 1; }
  bool in_range(int k) const { return k >= lo && k <= hi(); }
  FGModule level(int k) const;
  ModuleMap map_at(int k) const;  // differential out of level k
};

ModuleComplex module_complex(BaseRing base, int lo, std::vector<FGModule> mods,
                             std::vector<ModuleMap> maps);
/* view a free complex as a module complex */
ModuleComplex module_view(const FreeComplex& x);

FGModule module_homology(const ModuleComplex& m, int k);

/* chain map between module complexes */
struct ChainMapM {
  ModuleComplex src;
  ModuleComplex tgt;
  std::map<int, ModuleMap> comps;

  ModuleMap at(int k) const;
};

ChainMapM module_chain_map(ModuleComplex src, ModuleComplex tgt,
                           std::map<int, ModuleMap> comps);
ModuleMap induced_module_map(const ChainMapM& f, int k);

ModuleComplex module_cone(const ChainMapM& f);
ModuleComplex module_shift(const ModuleComplex& x, int p, int w);

/* good truncations with their structure maps */
struct TruncationBelow {
  ModuleComplex trunc;  // zero below n, homology preserved at and above n
  ChainMapM incl;       // trunc -> x
};
struct TruncationAbove {
  ModuleComplex trunc;  // zero above n, homology preserved at and below n
  ChainMapM proj;       // x -> trunc
};

TruncationBelow truncate_below(const ModuleComplex& x, int n);
TruncationAbove truncate_above(const ModuleComplex& x, int n);

/* free-level good truncations over hereditary bases; the upper one is
   the cone on the lower inclusion, so its projection is strict */
struct FreeTruncationBelow {
  FreeComplex trunc;
  ChainMapF incl;
};
struct FreeTruncationAbove {
  FreeComplex trunc;
  ChainMapF proj;
};

FreeTruncationBelow truncate_below_free(const FreeComplex& x, int n);
FreeTruncationAbove truncate_above_free(const FreeComplex& x, int n);

/*
 * Free model of a module complex over a hereditary base: levels
 * G_k + R_{k-1} built from the canonical presentations, with a strict
 * chain-map lift for every module chain map.
 */
struct FreeModel {
  FreeComplex model;
  ModuleComplex of;
};

FreeModel free_model(const ModuleComplex& m);
ChainMapF free_model_lift(const ChainMapM& f, const FreeModel& src, const FreeModel& tgt);

/* derived tensor product: free models tensored together */
FreeComplex derived_tensor(const ModuleComplex& x, const ModuleComplex& y);

}  // namespace sst
