#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <random>
#include <vector>

#include "sst/towers.hpp"

using namespace sst;

/*
 * Oracles. Image chains and limits of small towers are computed by hand and
 * frozen below: multiplication towers on Z and Z (+) Z/8, a rotation
 * endomorphism of determinant p, and adic towers of injective maps. The
 * decision procedures are then checked against those values and against each
 * other on randomized periodic towers.
 */
namespace {

std::mt19937_64 rng(20260820);

Int rnd(Int lo, Int hi) { return std::uniform_int_distribution<Int>(lo, hi)(rng); }

FGModule rnd_module(const BaseRing& base) {
  static const Int pool[] = {0, 2, 3, 4, 6, 8};
  std::vector<Int> fs;
  Index n = rnd(1, 3);
  for (Index i = 0; i < n; ++i) fs.push_back(pool[rnd(0, 5)]);
  return FGModule::from_factors(base, 0, fs);
}

/* any well formed map between canonical modules in one weight */
ModuleMap rnd_map(const FGModule& a, const FGModule& b) {
  std::map<int, IntMat> comps;
  auto fa = a.factors_at(0);
  auto fb = b.factors_at(0);
  IntMat m(static_cast<Index>(fb.size()), static_cast<Index>(fa.size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) {
      Int di = fb[i], dj = fa[j];
      if (di == 0) {
        m(i, j) = dj == 0 ? rnd(-3, 3) : 0;
      } else {
        Int step = dj == 0 ? 1 : di / gcd_nonneg(di, dj);
        m(i, j) = mul_ck(step, rnd(-2, 2));
      }
    }
  comps[0] = m;
  return module_map(a, b, comps);
}

/* periodic tower whose levels repeat from the very start */
ModuleTower rnd_periodic_tower(const BaseRing& base) {
  int p = static_cast<int>(rnd(1, 3));
  std::vector<FGModule> mods;
  for (int i = 0; i < p; ++i) mods.push_back(rnd_module(base));
  mods.push_back(mods[0]);
  std::vector<ModuleMap> maps;
  for (int i = 0; i < p; ++i) maps.push_back(rnd_map(mods[i + 1], mods[i]));
  return periodic_module_tower(std::move(mods), std::move(maps), p);
}

ReindexFn rnd_reindex(int max_slope) {
  int slope = static_cast<int>(rnd(1, max_slope));
  int offset = static_cast<int>(rnd(0, 3));
  std::vector<int> head;
  if (rnd(0, 1)) {
    int v = static_cast<int>(rnd(0, 2));
    for (int k = 0; k < 3; ++k) {
      v = std::max(v + static_cast<int>(rnd(0, 2)), k);
      head.push_back(v);
    }
    int need = std::max(head.back(), 3) - 3 * slope;
    offset = std::max(offset, need);
  }
  return reindex_fn(std::move(head), slope, offset);
}

FGModule zmod(const BaseRing& base, Int m) { return FGModule::from_factors(base, 0, {m}); }

ModuleMap mult_map(const FGModule& m, Int n) {
  std::map<int, IntMat> comps;
  for (int w : m.weights()) comps[w] = (n * ident(m.rank_at(w))).eval();
  return module_map(m, m, std::move(comps));
}

/* direct sum of two bounded complexes with its block structure maps */
FreeComplex dsum_complex(const FreeComplex& a, const FreeComplex& b) {
  if (a.wts.empty()) return b;
  if (b.wts.empty()) return a;
  int lo = std::min(a.lo, b.lo);
  int hi = std::max(a.hi(), b.hi());
  std::vector<std::vector<int>> wts;
  std::vector<IntMat> d;
  for (int k = lo; k <= hi; ++k) {
    std::vector<int> lvl = a.weights_at(k);
    const auto wb = b.weights_at(k);
    lvl.insert(lvl.end(), wb.begin(), wb.end());
    wts.push_back(std::move(lvl));
  }
  for (int k = lo + 1; k <= hi; ++k) {
    IntMat m = IntMat::Zero(a.rank(k - 1) + b.rank(k - 1), a.rank(k) + b.rank(k));
    if (a.rank(k - 1) > 0 && a.rank(k) > 0)
      m.block(0, 0, a.rank(k - 1), a.rank(k)) = a.diff(k);
    if (b.rank(k - 1) > 0 && b.rank(k) > 0)
      m.block(a.rank(k - 1), a.rank(k), b.rank(k - 1), b.rank(k)) = b.diff(k);
    d.push_back(std::move(m));
  }
  return free_complex(a.base, lo, std::move(wts), std::move(d));
}

ChainMapF dsum_incl(const FreeComplex& a, const FreeComplex& b) {
  FreeComplex s = dsum_complex(a, b);
  std::map<int, IntMat> comps;
  for (int k = a.lo; k <= a.hi(); ++k) {
    if (a.rank(k) == 0) continue;
    IntMat m = IntMat::Zero(s.rank(k), a.rank(k));
    m.block(0, 0, a.rank(k), a.rank(k)) = ident(a.rank(k));
    comps[k] = std::move(m);
  }
  return chain_map(a, std::move(s), std::move(comps));
}

ChainMapF dsum_proj(const FreeComplex& a, const FreeComplex& b) {
  FreeComplex s = dsum_complex(a, b);
  std::map<int, IntMat> comps;
  for (int k = b.lo; k <= b.hi(); ++k) {
    if (b.rank(k) == 0) continue;
    IntMat m = IntMat::Zero(b.rank(k), s.rank(k));
    m.block(0, s.rank(k) - b.rank(k), b.rank(k), b.rank(k)) = ident(b.rank(k));
    comps[k] = std::move(m);
  }
  return chain_map(std::move(s), b, std::move(comps));
}

ChainMapF dsum_chain(const ChainMapF& f, const ChainMapF& g) {
  FreeComplex src = dsum_complex(f.src, g.src);
  FreeComplex tgt = dsum_complex(f.tgt, g.tgt);
  std::map<int, IntMat> comps;
  for (int k = std::min(src.lo, tgt.lo); k <= std::max(src.hi(), tgt.hi()); ++k) {
    if (src.rank(k) == 0 || tgt.rank(k) == 0) continue;
    IntMat m = IntMat::Zero(tgt.rank(k), src.rank(k));
    if (f.tgt.rank(k) > 0 && f.src.rank(k) > 0)
      m.block(0, 0, f.tgt.rank(k), f.src.rank(k)) = f.at(k);
    if (g.tgt.rank(k) > 0 && g.src.rank(k) > 0)
      m.block(f.tgt.rank(k), f.src.rank(k), g.tgt.rank(k), g.src.rank(k)) = g.at(k);
    if (!m.isZero()) comps[k] = std::move(m);
  }
  return chain_map(std::move(src), std::move(tgt), std::move(comps));
}

IntMat rnd_mat(Index r, Index c, Int lo, Int hi) {
  IntMat m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = rnd(lo, hi);
  return m;
}

FreeComplex rnd_two_term(const BaseRing& base) {
  Index a = rnd(1, 2), b = rnd(1, 2);
  int lo = static_cast<int>(rnd(-1, 1));
  return free_complex(base, lo, {std::vector<int>(a, 0), std::vector<int>(b, 0)},
                      {rnd_mat(a, b, -3, 3)});
}

FreeComplex rnd_complex(const BaseRing& base, Index max_rank) {
  for (;;) {
    FreeComplex x = tensor(rnd_two_term(base), rnd_two_term(base));
    Index worst = 0;
    for (int k = x.lo; k <= x.hi(); ++k) worst = std::max(worst, x.rank(k));
    if (worst <= max_rank) return x;
  }
}

ModuleTower tensor_tower(const ModuleTower& t, const FGModule& m) {
  std::vector<FGModule> mods;
  std::vector<ModuleMap> maps;
  for (const FGModule& lvl : t.mods) mods.push_back(tensor_modules(lvl, m).mod);
  ModuleMap im = identity_map(m);
  for (size_t s = 0; s < t.maps.size(); ++s)
    maps.push_back(tensor_maps(t.maps[s], im, tensor_modules(t.mods[s + 1], m),
                               tensor_modules(t.mods[s], m)));
  return periodic_module_tower(std::move(mods), std::move(maps), t.period);
}

}  // namespace

static const BaseRing ZZ = BaseRing::integers();

TEST_CASE("constant towers are stable with the level as limit") {
  for (int i = 0; i < 8; ++i) {
    FGModule m = rnd_module(ZZ);
    ModuleTower t = constant_module_tower(m, 3);
    CHECK(is_mittag_leffler(t) == Verdict::True);
    LimResult lr = lim_lim1(t);
    CHECK(lr.ml == Verdict::True);
    CHECK(lr.lim1_zero == Verdict::True);
    REQUIRE(lr.lim.has_value());
    CHECK(*lr.lim == m);
    CHECK(pro_zero(t) == verdict_of(m.is_zero()));
  }
}

TEST_CASE("multiplication towers on Z fail Mittag-Leffler with zero limit") {
  FGModule z = FGModule::free_module(ZZ, {0});
  for (Int p : {2, 3, 5}) {
    ModuleTower t = endo_module_tower(mult_map(z, p), 3);
    CHECK(is_mittag_leffler(t) == Verdict::False);
    CHECK(pro_zero(t) == Verdict::False);
    ImageChain ch = image_chain_at(t, 0);
    CHECK(ch.stable == Verdict::False);
    LimResult lr = lim_lim1(t);
    CHECK(lr.ml == Verdict::False);
    CHECK(lr.lim1_zero == Verdict::False);
    REQUIRE(lr.lim.has_value());
    CHECK(lr.lim->is_zero());
  }
}

TEST_CASE("adic towers of an injective endomorphism") {
  FGModule z = FGModule::free_module(ZZ, {0});
  ModuleTower t = adic_module_tower(mult_map(z, 2), 3);
  for (int s = 0; s <= 5; ++s) {
    /* levels beyond the stored window are built on demand */
    std::vector<Int> fs = t.level(s).factors_at(0);
    REQUIRE(fs.size() == 1);
    CHECK(fs[0] == (Int(1) << (s + 1)));
  }
  IntMat one(1, 1);
  one << 1;
  CHECK(t.map_at(0) == module_map(t.level(1), t.level(0), {{0, one}}));
  CHECK(sub_eq(image_sub(t.composite(4, 0)), full_submodule(t.level(0))));
  CHECK(is_mittag_leffler(t) == Verdict::True);
  ImageChain ch = image_chain_at(t, 1);
  CHECK(ch.stable == Verdict::True);
  CHECK(ch.at == 0);
  LimResult lr = lim_lim1(t);
  CHECK(lr.ml == Verdict::True);
  CHECK(lr.lim1_zero == Verdict::True);
  CHECK(!lr.lim.has_value());
  /* the completed object is not finitely generated over Z; the tower itself
     is handed back instead */
  REQUIRE(lr.lim_tower.has_value());
  CHECK(*lr.lim_tower == t);

  /* on a finite module the completion stabilizes to the module itself */
  ModuleTower t8 = adic_module_tower(mult_map(zmod(ZZ, 8), 2), 2);
  CHECK(t8.level(0) == zmod(ZZ, 2));
  CHECK(t8.level(1) == zmod(ZZ, 4));
  CHECK(t8.level(2) == zmod(ZZ, 8));
  CHECK(t8.level(7) == zmod(ZZ, 8));
  LimResult lr8 = lim_lim1(t8);
  CHECK(lr8.ml == Verdict::True);
  REQUIRE(lr8.lim.has_value());
  CHECK(*lr8.lim == zmod(ZZ, 8));
  CHECK(lr8.lim1_zero == Verdict::True);
}

TEST_CASE("zero tail towers are pro-trivial") {
  FGModule m = FGModule::from_factors(ZZ, 0, {4, 0});
  ModuleTower t = zero_tail_module_tower({m, m}, {identity_map(m)});
  CHECK(is_mittag_leffler(t) == Verdict::True);
  CHECK(pro_zero(t) == Verdict::True);
  ImageChain ch = image_chain_at(t, 0);
  CHECK(ch.stable == Verdict::True);
  CHECK(ch.at == 2);
  CHECK(sub_is_zero(*ch.value));
  ImageChain far = image_chain_at(t, 5);
  CHECK(far.stable == Verdict::True);
  CHECK(far.at == 1);
  LimResult lr = lim_lim1(t);
  CHECK(lr.ml == Verdict::True);
  REQUIRE(lr.lim.has_value());
  CHECK(lr.lim->is_zero());
  CHECK(lr.lim1_zero == Verdict::True);
}

TEST_CASE("image chain of a mixed free and torsion endomorphism") {
  /* on Z/8 (+) Z the map diag(2, 1) shrinks the torsion part three times
     and then holds: images full, 2T+F, 4T+F, F, F, ... */
  FGModule m = FGModule::from_factors(ZZ, 0, {8, 0});
  IntMat cm(2, 2);
  cm << 2, 0, 0, 1;
  ModuleMap c = module_map(m, m, {{0, cm}});
  EndoChain ec = endo_image_chain(c);
  CHECK(ec.stable);
  CHECK(ec.at == 3);
  REQUIRE(ec.plateau.count(0) == 1);
  CHECK(ec.plateau.at(0).first == 1);
  CHECK(ec.plateau.at(0).second == 1);
  IntMat gen(2, 1);
  gen << 0, 1;
  CHECK(sub_eq(*ec.value, span_submodule(m, {{0, gen}})));

  ModuleTower t = endo_module_tower(c, 3);
  ImageChain ch = image_chain_at(t, 0);
  CHECK(ch.stable == Verdict::True);
  CHECK(ch.at == 3);
  CHECK(sub_eq(*ch.value, span_submodule(m, {{0, gen}})));
  LimResult lr = lim_lim1(t);
  CHECK(lr.ml == Verdict::True);
  REQUIRE(lr.lim.has_value());
  CHECK(lr.lim->factors_at(0) == std::vector<Int>{0});
  CHECK(lr.lim1_zero == Verdict::True);
}

TEST_CASE("rotation endomorphisms of determinant p never stabilize") {
  for (Int p : {2, 3}) {
    IntMat cm(3, 3);
    cm << 0, 0, p, 1, 0, 0, 0, 1, 0;
    FGModule z3 = FGModule::free_module(ZZ, {0, 0, 0});
    ModuleMap c = module_map(z3, z3, {{0, cm}});
    EndoChain ec = endo_image_chain(c);
    CHECK(!ec.stable);
    REQUIRE(ec.plateau.count(0) == 1);
    CHECK(ec.plateau.at(0).first == 3);
    CHECK(ec.plateau.at(0).second == p);

    ModuleTower t = endo_module_tower(c, 2);
    CHECK(is_mittag_leffler(t) == Verdict::False);
    CHECK(pro_zero(t) == Verdict::False);
    LimResult lr = lim_lim1(t);
    CHECK(lr.ml == Verdict::False);
    CHECK(lr.lim1_zero == Verdict::False);
    /* three free directions mix under the rotation, so no evaluation is
       attempted */
    CHECK(!lr.lim.has_value());
  }

  /* a torsion head in front of the same rotation: the pushforward images
     reach zero even though the zone never stabilizes */
  IntMat cm(3, 3);
  cm << 0, 0, 2, 1, 0, 0, 0, 1, 0;
  FGModule z3 = FGModule::free_module(ZZ, {0, 0, 0});
  ModuleMap c = module_map(z3, z3, {{0, cm}});
  FGModule head = zmod(ZZ, 4);
  IntMat pm(1, 3);
  pm << 1, 0, 0;
  ModuleMap phi = module_map(z3, head, {{0, pm}});
  ModuleTower t = periodic_module_tower({head, z3, z3, z3, z3}, {phi, c, c, c}, 1);
  ImageChain ch = image_chain_at(t, 0);
  CHECK(ch.stable == Verdict::True);
  CHECK(ch.at == 5);
  CHECK(sub_is_zero(*ch.value));
  /* level 1 already sits inside the repeating zone, where the rotation never
     lets the image settle */
  CHECK(image_chain_at(t, 1).stable == Verdict::False);
  CHECK(is_mittag_leffler(t) == Verdict::False);
  CHECK(pro_zero(t) == Verdict::False);

  /* change the first transition too, so level 0 lies strictly before the
     zone and its full-rank pushforward stays out of reach */
  ModuleMap dbl = module_map(z3, z3, {{0, (2 * ident(3)).eval()}});
  ModuleTower t2 = periodic_module_tower({z3, z3, z3, z3, z3}, {dbl, c, c, c}, 1);
  CHECK(image_chain_at(t2, 0).stable == Verdict::Undetermined);
  CHECK(image_chain_at(t2, 1).stable == Verdict::False);
}

TEST_CASE("reindexing towers composes and fixes the identity") {
  for (int i = 0; i < 12; ++i) {
    ModuleTower t = rnd_periodic_tower(ZZ);
    CHECK(reindex(t, identity_reindex()) == t);
    ReindexFn n = rnd_reindex(2);
    ReindexFn m = rnd_reindex(2);
    ModuleTower a = reindex(reindex(t, n), m);
    ModuleTower b = reindex(t, compose_reindex(n, m));
    for (int k = 0; k <= 8; ++k) {
      CHECK(a.level(k) == b.level(k));
      CHECK(a.map_at(k) == b.map_at(k));
      CHECK(a.level(k) == t.level(n.at(m.at(k))));
    }
  }
  /* window towers cut instead of extrapolating */
  FGModule m0 = rnd_module(ZZ), m1 = rnd_module(ZZ), m2 = rnd_module(ZZ);
  ModuleTower w = module_tower({m0, m1, m2}, {rnd_map(m1, m0), rnd_map(m2, m1)});
  ModuleTower shifted = reindex(w, reindex_fn({}, 1, 1));
  CHECK(shifted.last() == 1);
  CHECK(shifted.level(0) == m1);
  CHECK_THROWS_AS(reindex(w, reindex_fn({}, 1, 3)), InputError);
}

TEST_CASE("reindex function validation") {
  CHECK_THROWS_AS(reindex_fn({}, 0, 0), InputError);
  CHECK_THROWS_AS(reindex_fn({1, 0}, 1, 0), InputError);
  CHECK_THROWS_AS(reindex_fn({0, 0}, 1, 0), InputError);
  CHECK_THROWS_AS(reindex_fn({0, 1, 5}, 1, 0), InputError);
  ReindexFn n = reindex_fn({0, 2, 4}, 2, 0);
  CHECK(n.at(2) == 4);
  CHECK(n.at(5) == 10);
}

TEST_CASE("pro-isomorphism is an equivalence relation on periodic towers") {
  for (int i = 0; i < 14; ++i) {
    ModuleTower t = rnd_periodic_tower(ZZ);
    ProMap idm = identity_pro_map(t);
    CHECK(is_pro_isomorphism(idm, 64).verdict == Verdict::True);

    ReindexFn n = rnd_reindex(1);
    ProMap f = reindex_pro_map(t, n);
    ProIso wit = is_pro_isomorphism(f, 64);
    CHECK(wit.verdict == Verdict::True);

    ProMap g = invert_pro_map(f, wit);
    CHECK(g.period > 0);
    CHECK(is_pro_isomorphism(g, 64).verdict == Verdict::True);

    ProMap fg = compose_pro_maps(f, g);
    ProMap gf = compose_pro_maps(g, f);
    CHECK(is_pro_isomorphism(fg, 64).verdict == Verdict::True);
    CHECK(is_pro_isomorphism(gf, 64).verdict == Verdict::True);

    /* transitivity along a second reindexing */
    ReindexFn n2 = rnd_reindex(1);
    ProMap f2 = reindex_pro_map(f.src, n2);
    ProMap ff = compose_pro_maps(f, f2);
    CHECK(is_pro_isomorphism(ff, 64).verdict == Verdict::True);
  }
}

TEST_CASE("pro-isomorphism verdicts separate towers") {
  FGModule z = FGModule::free_module(ZZ, {0});
  FGModule zero = FGModule::zero(ZZ);
  ModuleTower mul2 = endo_module_tower(mult_map(z, 2), 2);
  ModuleTower triv = constant_module_tower(zero, 2);
  std::vector<ModuleMap> lv;
  for (int k = 0; k <= mul2.last(); ++k) lv.push_back(zero_map(z, zero));
  ProMap f = pro_map(identity_reindex(), mul2, triv, std::move(lv), 1);
  ProIso iso = is_pro_isomorphism(f, 0);
  CHECK(iso.verdict == Verdict::False);

  /* the zero self-map of a nonzero constant tower has no witness, and the
     search reports where it gave up */
  ModuleTower cz = constant_module_tower(z, 2);
  std::vector<ModuleMap> zl(cz.mods.size(), zero_map(z, z));
  ProMap zf = pro_map(identity_reindex(), cz, cz, std::move(zl), 1);
  ProIso zi = is_pro_isomorphism(zf, 8);
  CHECK(zi.verdict == Verdict::Undetermined);
  CHECK(zi.failed_level == 0);

  /* a tower of zero transitions is pro-isomorphic to the zero tower */
  FGModule m = FGModule::from_factors(ZZ, 0, {6, 0});
  ModuleTower zt = periodic_module_tower({m, m}, {zero_map(m, m)}, 1);
  std::vector<ModuleMap> zlv(zt.mods.size(), zero_map(m, zero));
  ProMap zmap = pro_map(identity_reindex(), zt, triv, std::move(zlv), 1);
  ProIso ziso = is_pro_isomorphism(zmap, 0);
  CHECK(ziso.verdict == Verdict::True);
  CHECK(!ziso.witnesses.empty());
}

TEST_CASE("pro map validation rejects non-commuting squares") {
  FGModule z = FGModule::free_module(ZZ, {0});
  ModuleTower t = constant_module_tower(z, 2);
  std::vector<ModuleMap> lv = {identity_map(z), mult_map(z, -1), identity_map(z)};
  CHECK_THROWS_AS(pro_map(identity_reindex(), t, t, std::move(lv), 1), InputError);
  CHECK_THROWS_AS(periodic_module_tower({z, FGModule::zero(ZZ)},
                                        {zero_map(FGModule::zero(ZZ), z)}, 1),
                  InputError);
}

TEST_CASE("tensoring a pro-isomorphism with a module preserves it") {
  for (int i = 0; i < 8; ++i) {
    ModuleTower t = rnd_periodic_tower(ZZ);
    FGModule m = rnd_module(ZZ);
    ReindexFn n = rnd_reindex(1);
    ProMap f = reindex_pro_map(t, n);
    ModuleTower ts = tensor_tower(f.src, m);
    ModuleTower tt = tensor_tower(f.tgt, m);
    ModuleMap im = identity_map(m);
    std::vector<ModuleMap> lv;
    for (size_t k = 0; k < f.levels.size(); ++k) {
      int kk = static_cast<int>(k);
      lv.push_back(tensor_maps(f.levels[k], im, tensor_modules(f.src.level(f.n.at(kk)), m),
                               tensor_modules(f.tgt.level(kk), m)));
    }
    ProMap ft = pro_map(f.n, ts, tt, std::move(lv), f.period);
    CHECK(is_pro_isomorphism(ft, 64).verdict == Verdict::True);
  }
}

TEST_CASE("truncation towers converge back to the complex") {
  std::vector<FreeComplex> cases = {sphere_complex(ZZ, 0, 0), sphere_complex(ZZ, 2, 1)};
  for (int i = 0; i < 5; ++i) cases.push_back(rnd_complex(ZZ, 4));
  for (const FreeComplex& x : cases) {
    Postnikov pt = postnikov_tower(x);
    /* level k computes homology of x up to degree lo+k and nothing above */
    for (int k = 0; k <= pt.tower.last(); ++k) {
      for (int j = x.lo - 1; j <= x.hi() + 1; ++j) {
        FGModule hj = homology_module(pt.tower.level(k), j);
        if (j <= x.lo + k)
          CHECK(hj == homology_module(x, j));
        else
          CHECK(hj.is_zero());
      }
    }
    CHECK(is_pro_weak_equivalence(pt.proj, 32) == Verdict::True);
  }
}

TEST_CASE("truncation towers tensored with a connective complex") {
  FreeComplex e = free_complex(ZZ, 0, {{0}, {0}}, {(IntMat(1, 1) << 2).finished()});
  for (int i = 0; i < 3; ++i) {
    FreeComplex x = rnd_complex(ZZ, 3);
    Postnikov pt = postnikov_tower(x);
    ChainMapF ide = id_chain_map(e);
    std::vector<FreeComplex> xs;
    std::vector<ChainMapF> maps;
    for (const FreeComplex& lvl : pt.tower.xs) xs.push_back(tensor(lvl, e));
    for (const ChainMapF& u : pt.tower.maps) maps.push_back(tensor_chain(u, ide));
    ComplexTower tw = periodic_complex_tower(std::move(xs), std::move(maps), 1);
    FreeComplex xe = tensor(x, e);
    ComplexTower cst = constant_complex_tower(xe, pt.tower.last());
    std::vector<ChainMapF> projs;
    for (const ChainMapF& p : pt.proj.levels) projs.push_back(tensor_chain(p, ide));
    ChainProMap pm = chain_pro_map(identity_reindex(), std::move(cst), std::move(tw),
                                   std::move(projs), 1);
    CHECK(is_pro_weak_equivalence(pm, 32) == Verdict::True);
  }
}

TEST_CASE("two of three for levelwise split fibre sequences") {
  /* acyclic fibre: the projection must be a pro weak equivalence */
  for (int i = 0; i < 6; ++i) {
    FreeComplex b = rnd_complex(ZZ, 3);
    FreeComplex a = rnd_complex(ZZ, 2);
    FreeComplex fc = cone(id_chain_map(a));
    FreeComplex tot = dsum_complex(fc, b);
    Int n = rnd(1, 3);
    ChainMapF bt = scale_chain(n, id_chain_map(b));
    ChainMapF ft = id_chain_map(fc);
    ChainMapF tt = dsum_chain(ft, bt);
    ComplexTower fib = periodic_complex_tower({fc, fc}, {ft}, 1);
    ComplexTower top = periodic_complex_tower({tot, tot}, {tt}, 1);
    ComplexTower bas = periodic_complex_tower({b, b}, {bt}, 1);
    std::vector<ChainMapF> incls(2, dsum_incl(fc, b));
    std::vector<ChainMapF> projs(2, dsum_proj(fc, b));
    TwoOfThree r = two_of_three_contractible(fib, top, bas, incls, projs);
    CHECK(r.fibre_pro_contractible == Verdict::True);
    CHECK(r.base_pro_weak_equivalence == Verdict::True);
    CHECK(r.consistent);
  }

  /* zero fibre over an arbitrary base */
  FreeComplex b = rnd_complex(ZZ, 3);
  FreeComplex zc = zero_complex(ZZ);
  ChainMapF bt = scale_chain(2, id_chain_map(b));
  ComplexTower fib = periodic_complex_tower({zc, zc}, {id_chain_map(zc)}, 1);
  ComplexTower top = periodic_complex_tower({b, b}, {bt}, 1);
  ComplexTower bas = top;
  std::vector<ChainMapF> incls(2, zero_chain_map(zc, b));
  std::vector<ChainMapF> projs(2, id_chain_map(b));
  TwoOfThree r = two_of_three_contractible(fib, top, bas, incls, projs);
  CHECK(r.fibre_pro_contractible == Verdict::True);
  CHECK(r.base_pro_weak_equivalence == Verdict::True);
  CHECK(r.consistent);

  /* a surviving sphere in the fibre is detected and never contradicts the
     base verdict */
  FreeComplex s0 = sphere_complex(ZZ, 0, 0);
  FreeComplex tot2 = dsum_complex(s0, b);
  ComplexTower fib2 = periodic_complex_tower({s0, s0}, {id_chain_map(s0)}, 1);
  ComplexTower top2 =
      periodic_complex_tower({tot2, tot2}, {dsum_chain(id_chain_map(s0), bt)}, 1);
  std::vector<ChainMapF> incls2(2, dsum_incl(s0, b));
  std::vector<ChainMapF> projs2(2, dsum_proj(s0, b));
  TwoOfThree r2 = two_of_three_contractible(fib2, top2, bas, incls2, projs2);
  CHECK(r2.fibre_pro_contractible == Verdict::False);
  CHECK(r2.base_pro_weak_equivalence != Verdict::True);
  CHECK(r2.consistent);

  /* a broken composite is rejected outright */
  std::vector<ChainMapF> bad(2, id_chain_map(b));
  CHECK_THROWS_AS(two_of_three_contractible(fib, top, bas, bad, projs), InputError);
}

TEST_CASE("pro-contractible towers") {
  FreeComplex zc = zero_complex(ZZ);
  CHECK(is_pro_contractible(constant_complex_tower(zc, 2)) == Verdict::True);
  FreeComplex a = rnd_complex(ZZ, 3);
  CHECK(is_pro_contractible(constant_complex_tower(cone(id_chain_map(a)), 2)) ==
        Verdict::True);
  CHECK(is_pro_contractible(constant_complex_tower(sphere_complex(ZZ, 0, 0), 2)) ==
        Verdict::False);
}

TEST_CASE("homology towers inherit the tail rule") {
  FreeComplex s = sphere_complex(ZZ, 0, 0);
  ChainMapF two = scale_chain(2, id_chain_map(s));
  ComplexTower ct = periodic_complex_tower({s, s, s}, {two, two}, 1);
  ModuleTower ht = homology_tower(ct, 0);
  CHECK(ht.tail == TailRule::Periodic);
  CHECK(ht.period == 1);
  CHECK(ht.level(5) == FGModule::free_module(ZZ, {0}));
  CHECK(is_mittag_leffler(ht) == Verdict::False);
  CHECK(homology_tower(ct, 1).level(0).is_zero());
  auto [lo, hi] = homology_degree_range(ct);
  CHECK(lo == 0);
  CHECK(hi == 0);
}
