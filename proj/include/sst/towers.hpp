#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "sst/complexes.hpp"
#include "sst/verdict.hpp"

namespace sst {

/*
 * Inverse towers X_0 <- X_1 <- X_2 <- ... are stored as a finite window
 * of levels and transitions plus a tail rule saying how the tower
 * continues past the window:
 *
 *   None      nothing is known beyond the window; decision procedures
 *             may answer Undetermined
 *   Periodic  levels and transitions repeat with the given period, i.e.
 *             level(s) = level(s - period) for s > last()
 *   Adic      quotient tower of an endomorphism e, level(s) =
 *             coker(e^(s+1)) with the induced surjections; levels past
 *             the window are computed on demand
 *   ZeroMaps  every transition past the window is zero
 */
enum class TailRule { None, Periodic, Adic, ZeroMaps };

struct ModuleTower {
  BaseRing base;
  std::vector<FGModule> mods;
  std::vector<ModuleMap> maps;  // maps[s]: level s+1 -> level s
  TailRule tail = TailRule::None;
  int period = 0;
  std::optional<ModuleMap> adic_endo;

  int last() const { return static_cast<int>(mods.size()) - 1; }
  /* first level of the repeating zone (Periodic); window end otherwise */
  int zone_start() const;
  FGModule level(int s) const;
  ModuleMap map_at(int s) const;  // transition level s+1 -> level s
  ModuleMap composite(int hi, int lo) const;
  bool operator==(const ModuleTower& o) const;
};

ModuleTower module_tower(std::vector<FGModule> mods, std::vector<ModuleMap> maps);
ModuleTower periodic_module_tower(std::vector<FGModule> mods, std::vector<ModuleMap> maps,
                                  int period);
ModuleTower zero_tail_module_tower(std::vector<FGModule> mods, std::vector<ModuleMap> maps);
/* tower of the cokernels of the powers of an endomorphism */
ModuleTower adic_module_tower(const ModuleMap& endo, int window);
/* window+1 copies of one endomorphism (period one) */
ModuleTower endo_module_tower(const ModuleMap& endo, int window);
ModuleTower constant_module_tower(const FGModule& m, int window);

/*
 * Decision data for the descending chain im(X_{s+j} -> X_s). When the
 * chain is provably eventually constant, `at` is the first j reaching
 * the stable image and `value` is that image. False means the chain is
 * certified to decrease forever.
 */
struct ImageChain {
  Verdict stable = Verdict::Undetermined;
  int at = -1;
  std::optional<Submodule> value;
};

ImageChain image_chain_at(const ModuleTower& t, int s);

/*
 * Image chain of the iterates of one endomorphism, decided exactly: the
 * free quotient either reaches a rank plateau on which the map has unit
 * determinant (then the whole chain stabilizes within a computable
 * bound) or it keeps shrinking forever. plateau records, per weight,
 * the plateau rank and that absolute determinant with inverted primes
 * stripped; any entry >= 2 certifies the chain never stabilizes.
 */
struct EndoChain {
  bool stable = false;
  int at = 0;
  std::optional<Submodule> value;
  std::map<int, std::pair<Index, Int>> plateau;
};

EndoChain endo_image_chain(const ModuleMap& c);

Verdict is_mittag_leffler(const ModuleTower& t);
/* every level eventually receives only the zero image */
Verdict pro_zero(const ModuleTower& t);

/*
 * lim and lim^1 of the tower. When lim is a finitely generated module
 * it is returned in `lim`; when it exists only as a pro-object (adic
 * completions), `lim_tower` carries the defining tower instead. The
 * levels are countable, so lim^1 vanishes exactly in the Mittag-Leffler
 * case and lim1_zero follows the ml verdict.
 */
struct LimResult {
  Verdict ml = Verdict::Undetermined;
  std::optional<FGModule> lim;
  std::optional<ModuleTower> lim_tower;
  Verdict lim1_zero = Verdict::Undetermined;
};

LimResult lim_lim1(const ModuleTower& t);

/*
 * Monotone reindexing k -> at(k) with at(k) >= k, given by an explicit
 * head and an affine continuation slope*k + offset. Closed under
 * composition.
 */
struct ReindexFn {
  std::vector<int> head;
  int slope = 1;
  int offset = 0;

  int at(int k) const {
    return k < static_cast<int>(head.size()) ? head[k] : slope * k + offset;
  }
  bool operator==(const ReindexFn&) const = default;
};

ReindexFn reindex_fn(std::vector<int> head, int slope, int offset);
ReindexFn identity_reindex();
/* k -> n(m(k)) */
ReindexFn compose_reindex(const ReindexFn& n, const ReindexFn& m);

ModuleTower reindex(const ModuleTower& t, const ReindexFn& n);

/*
 * Level representation of a pro-map: levels[k] maps src.level(n(k)) to
 * tgt.level(k). Squares are required to commute after precomposing
 * with a source transition composite (searched within the window), the
 * honest commutation notion for pro-maps; strictly commuting families
 * pass at depth zero. period > 0 declares that the level maps repeat.
 */
struct ProMap {
  ReindexFn n;
  ModuleTower src;
  ModuleTower tgt;
  std::vector<ModuleMap> levels;
  int period = 0;

  ModuleMap level_at(int k) const;
};

ProMap pro_map(ReindexFn n, ModuleTower src, ModuleTower tgt, std::vector<ModuleMap> levels,
               int period);
ProMap identity_pro_map(const ModuleTower& t);
/* canonical map reindex(t, n) -> t given by the transition composites */
ProMap reindex_pro_map(const ModuleTower& t, const ReindexFn& n);
ProMap compose_pro_maps(const ProMap& f, const ProMap& g);  // f after g

/*
 * Pro-isomorphism certificate: for each checked level k a deeper level
 * l and a map h: tgt_l -> src_{n(k)} satisfying both triangle
 * identities. witnesses[k] holds (l, h) for level k.
 */
struct ProIso {
  Verdict verdict = Verdict::Undetermined;
  int failed_level = -1;
  std::vector<std::pair<int, ModuleMap>> witnesses;
};

/* horizon 0 picks the default search depth (prefix + two periods) */
ProIso is_pro_isomorphism(const ProMap& f, int horizon = 0);
ProMap invert_pro_map(const ProMap& f, const ProIso& wit);

/* towers of bounded free complexes; Adic is not used here */
struct ComplexTower {
  BaseRing base;
  std::vector<FreeComplex> xs;
  std::vector<ChainMapF> maps;  // maps[s]: level s+1 -> level s
  TailRule tail = TailRule::None;
  int period = 0;

  int last() const { return static_cast<int>(xs.size()) - 1; }
  int zone_start() const;
  FreeComplex level(int s) const;
  ChainMapF map_at(int s) const;
  ChainMapF composite(int hi, int lo) const;
};

ComplexTower complex_tower(std::vector<FreeComplex> xs, std::vector<ChainMapF> maps);
ComplexTower periodic_complex_tower(std::vector<FreeComplex> xs, std::vector<ChainMapF> maps,
                                    int period);
ComplexTower zero_tail_complex_tower(std::vector<FreeComplex> xs, std::vector<ChainMapF> maps);
ComplexTower constant_complex_tower(const FreeComplex& x, int window);

ComplexTower reindex_complex(const ComplexTower& t, const ReindexFn& n);

/* levelwise homology in one degree, inheriting the tail rule */
ModuleTower homology_tower(const ComplexTower& t, int k);
/* smallest degree range carrying any homology across the window */
std::pair<int, int> homology_degree_range(const ComplexTower& t);
Verdict is_pro_contractible(const ComplexTower& t);

struct ChainProMap {
  ReindexFn n;
  ComplexTower src;
  ComplexTower tgt;
  std::vector<ChainMapF> levels;
  int period = 0;

  ChainMapF level_at(int k) const;
};

ChainProMap chain_pro_map(ReindexFn n, ComplexTower src, ComplexTower tgt,
                          std::vector<ChainMapF> levels, int period);
Verdict is_pro_weak_equivalence(const ChainProMap& f, int horizon = 0);

/* the canonical map cone(incl) -> base of a levelwise fibre sequence;
   throws unless proj o incl = 0 */
ChainMapF cone_to_target(const ChainMapF& incl, const ChainMapF& proj);
bool is_quasi_iso(const ChainMapF& f);

/*
 * For a levelwise fibre sequence of towers F -> T -> B, the fibre tower
 * is pro-contractible exactly when the projection is a pro-weak
 * equivalence. Both sides are computed independently and reported;
 * consistent is false only when both verdicts are definite and
 * disagree, which would indicate a broken input.
 */
struct TwoOfThree {
  Verdict fibre_pro_contractible = Verdict::Undetermined;
  Verdict base_pro_weak_equivalence = Verdict::Undetermined;
  bool consistent = true;
};

TwoOfThree two_of_three_contractible(const ComplexTower& fib, const ComplexTower& tot,
                                     const ComplexTower& base, const std::vector<ChainMapF>& incls,
                                     const std::vector<ChainMapF>& projs);

/*
 * Truncation tower of a bounded complex: level k truncates away the
 * homology above lo(x)+k, with the strict projections from x. Once the
 * cutoff passes the top of x the levels are literally x, so the tower
 * is periodic with period one and the projection is an honest pro-weak
 * equivalence.
 */
struct Postnikov {
  ComplexTower tower;
  ChainProMap proj;  // from the constant tower at x
};

Postnikov postnikov_tower(const FreeComplex& x);

}  // namespace sst
