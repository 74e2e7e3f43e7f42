#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sst/base_ring.hpp"
#include "sst/smith.hpp"

namespace sst {

/*
 * Finitely generated weighted module over a BaseRing, stored as its
 * canonical invariant factors per weight. A factor d >= 2 stands for a
 * Z/d summand, 0 stands for a free summand over the hereditary bases,
 * and over Z/m the factor m plays the free role. Lists are kept in
 * divisibility order with the free factors last, so equal modules
 * compare equal as values.
 *
 * The generators of the module are its factors, in list order, and all
 * matrices at weight w use those generator coordinates.
 */
class FGModule {
 public:
  FGModule() = default;
  explicit FGModule(BaseRing base) : base_(std::move(base)) {}

  static FGModule zero(BaseRing base) { return FGModule(std::move(base)); }
  static FGModule free_module(BaseRing base, const std::vector<int>& gen_weights);
  static FGModule from_factors(BaseRing base, int weight, std::vector<Int> factors);

  const BaseRing& base() const { return base_; }
  const std::map<int, std::vector<Int>>& factors() const { return factors_; }
  std::vector<Int> factors_at(int w) const;
  Index rank_at(int w) const;
  Index free_rank_at(int w) const;
  std::vector<int> weights() const;
  bool is_zero() const { return factors_.empty(); }

  /* diagonal relation columns at weight w (only the nonzero factors) */
  IntMat rel_lattice(int w) const;

  FGModule direct_sum(const FGModule& o) const;

  bool operator==(const FGModule&) const = default;
  std::string str() const;

  /* internal: install an already canonical factor list */
  void set_factors(int w, std::vector<Int> canonical);

 private:
  BaseRing base_;
  std::map<int, std::vector<Int>> factors_;
};

/* canonical divisibility chain of a factor multiset */
std::vector<Int> canonical_chain(const BaseRing& base, std::vector<Int> factors);

/*
 * A module presented by generators and relations, reduced to canonical
 * form. proj maps ambient generator coordinates to module coordinates,
 * lift chooses an ambient representative of each module generator, and
 * proj * lift is the identity on module coordinates.
 */
struct Presented {
  FGModule mod;
  std::map<int, IntMat> proj;
  std::map<int, IntMat> lift;
};

/* weight -> (generator count, relation columns) */
using PresentationParts = std::map<int, std::pair<Index, IntMat>>;

Presented present_module(const BaseRing& base, const PresentationParts& parts);

/* relations given as rows over weighted columns; rows must be weight
   homogeneous */
Presented module_from_presentation(const BaseRing& base, const IntMat& relation_rows,
                                   const std::vector<int>& col_weights);

/*
 * Weight-preserving map between canonical modules. Components are kept
 * only for weights where they are nonzero, with entries reduced mod the
 * target factor of their row (and mod m over Z/m), so equal maps compare
 * equal as values.
 */
struct ModuleMap {
  FGModule src;
  FGModule tgt;
  std::map<int, IntMat> comps;

  IntMat at(int w) const;  // materializes zero blocks
  bool is_zero() const { return comps.empty(); }
  bool operator==(const ModuleMap& o) const;
};

ModuleMap module_map(FGModule src, FGModule tgt, std::map<int, IntMat> comps);
ModuleMap zero_map(FGModule src, FGModule tgt);
ModuleMap identity_map(const FGModule& m);
ModuleMap scalar_map(const FGModule& m, Int a);
ModuleMap compose(const ModuleMap& f, const ModuleMap& g);  // f after g
ModuleMap add_maps(const ModuleMap& f, const ModuleMap& g);
ModuleMap negate_map(const ModuleMap& f);
bool is_iso(const ModuleMap& f);

/*
 * Submodule of a canonical module: per weight an integer lattice H with
 * rel ⊆ H ⊆ Z^g, in Hermite form, saturated at the inverted primes over
 * a localized base. Every weight of the ambient module has an entry.
 */
struct Submodule {
  FGModule of;
  std::map<int, IntMat> lat;
};

Submodule zero_submodule(const FGModule& m);
Submodule full_submodule(const FGModule& m);
Submodule span_submodule(const FGModule& m, const std::map<int, IntMat>& gens);
Submodule sub_sum(const Submodule& a, const Submodule& b);
Submodule sub_intersect(const Submodule& a, const Submodule& b);
bool sub_subset(const Submodule& a, const Submodule& b);
bool sub_eq(const Submodule& a, const Submodule& b);
bool sub_is_zero(const Submodule& a);
Submodule image_under(const ModuleMap& f, const Submodule& s);
Submodule preimage_under(const ModuleMap& f, const Submodule& t);
Submodule kernel_sub(const ModuleMap& f);
Submodule image_sub(const ModuleMap& f);
Submodule torsion_sub(const FGModule& m);

/*
 * Presentation of num/den for nested submodules den ⊆ num. gens holds
 * the ambient representatives (the Hermite basis of num), and proj/lift
 * work on those columns exactly as in Presented.
 */
struct SubquotientPresentation {
  FGModule mod;
  std::map<int, IntMat> gens;
  std::map<int, IntMat> proj;
  std::map<int, IntMat> lift;
};

SubquotientPresentation present_subquotient(const Submodule& num, const Submodule& den);

/* module coordinates of an ambient vector that lies in num */
IntVec subq_class(const SubquotientPresentation& sq, int w, const IntVec& ambient);
/* an ambient representative of a module element */
IntVec subq_rep(const SubquotientPresentation& sq, int w, const IntVec& coords);

struct ModuleWithMap {
  FGModule mod;
  ModuleMap map;
};

ModuleWithMap kernel(const ModuleMap& f);    // map: mod -> src
ModuleWithMap image(const ModuleMap& f);     // map: mod -> tgt
ModuleWithMap cokernel(const ModuleMap& f);  // map: tgt -> mod

/* direct sum with its four structure maps */
struct SumModule {
  FGModule mod;
  ModuleMap in_a, in_b;  // A -> mod, B -> mod
  ModuleMap pr_a, pr_b;  // mod -> A, mod -> B
};

SumModule dsum(const FGModule& a, const FGModule& b);

/* tensor product with the projection from generator pairs; pair (i, j)
   runs with the left factor outer, as column i * rank_b + j per weight
   block of matching total weight */
struct TensorModule {
  FGModule mod;
  /* per total weight: module coords of the generator pairs, kept x pairs;
     pair order: left gens in ambient order outer, right gens inner */
  std::map<int, IntMat> pair_proj;
  std::map<int, IntMat> pair_lift;
};

TensorModule tensor_modules(const FGModule& a, const FGModule& b);
ModuleMap tensor_maps(const ModuleMap& f, const ModuleMap& g, const TensorModule& src,
                      const TensorModule& tgt);

/*
 * Linear solver for an unknown map W: src -> tgt subject to
 * post-composition equations L ∘ W = R and pre-composition equations
 * W ∘ S = T, solved per weight over the base by one congruence system.
 * Over a localized base only integer-matrix solutions are searched.
 */
struct MapConstraints {
  FGModule src;
  FGModule tgt;
  std::vector<std::pair<ModuleMap, ModuleMap>> post;  // L: tgt -> P, R: src -> P
  std::vector<std::pair<ModuleMap, ModuleMap>> pre;   // S: Q -> src, T: Q -> tgt
};

std::optional<ModuleMap> solve_module_map(const MapConstraints& c);

IntMat kron(const IntMat& a, const IntMat& b);

}  // namespace sst
