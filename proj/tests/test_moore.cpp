#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "sst/moore.hpp"

using namespace sst;

/*
 * Oracles. Every expected homology group below is computed by hand from
 * the two level cone complexes and frozen: M(2), M(2,3), M(6,10) over Z,
 * M(2,2) over Z/4, and the towers they generate. Limits of the adic
 * towers are read off the stabilized image chains, and the fracture
 * corners follow the elementary divisor arithmetic of the fixtures.
 */
namespace {

const BaseRing Z = BaseRing::integers();

GradedRing scalar_ring(const BaseRing& base) {
  return GradedRing::create(base, 0, 0, {}, SignRule::Koszul);
}

/* exterior generator in bidegree (1, 1); no integer content, so it acts
   on complexes by zero with a shift */
RingElement eta_gen(const BaseRing& base) {
  GradedRing r = GradedRing::create(base, 0, 9, {{"e", 1}}, SignRule::Koszul);
  RingElement e = ring_gen(r, "e");
  e.hdegree = 1;
  return e;
}

/* two level complex presenting (+)_i B/tors[i] (+) B^frees in weight 0 */
FreeComplex pres(const BaseRing& base, const std::vector<Int>& tors, int frees = 0) {
  Index nt = static_cast<Index>(tors.size());
  Index n0 = nt + frees;
  std::vector<std::vector<int>> wts{std::vector<int>(static_cast<std::size_t>(n0), 0),
                                    std::vector<int>(static_cast<std::size_t>(nt), 0)};
  IntMat d1 = IntMat::Zero(n0, nt);
  for (Index i = 0; i < nt; ++i) d1(i, i) = tors[i];
  return free_complex(base, 0, std::move(wts), {d1});
}

bool witnesses_invertible(const ProIso& c) {
  for (const auto& [l, h] : c.witnesses)
    if (!is_iso(h)) return false;
  return true;
}

const DegreeCompletion& degree_entry(const Completion& c, int k) {
  for (const auto& dc : c.degrees)
    if (dc.degree == k) return dc;
  REQUIRE(false);
  return c.degrees.front();
}

}  // namespace

TEST_CASE("moore complexes match hand computed homology") {
  GradedRing r = scalar_ring(Z);
  RingElement one = ring_scalar(r, 1);
  RingElement two = ring_scalar(r, 2);
  RingElement three = ring_scalar(r, 3);
  RingElement six = ring_scalar(r, 6);
  RingElement ten = ring_scalar(r, 10);

  FreeComplex m2 = moore_smash({two});
  CHECK(m2.rank(0) == 1);
  CHECK(m2.rank(1) == 1);
  CHECK(m2.diff(1)(0, 0) == -2);
  CHECK(homology_module(m2, 0) == FGModule::from_factors(Z, 0, {2}));
  CHECK(homology_module(m2, 1).is_zero());

  /* 1 generates the unit ideal, so its cone is contractible */
  FreeComplex m1 = moore_smash({one});
  CHECK(homology_module(m1, 0).is_zero());
  CHECK(homology_module(m1, 1).is_zero());

  /* coprime contents: acyclic in every degree */
  FreeComplex m23 = moore_smash({two, three});
  CHECK(m23.rank(0) == 1);
  CHECK(m23.rank(1) == 2);
  CHECK(m23.rank(2) == 1);
  CHECK(m23.diff(1)(0, 0) == -3);
  CHECK(m23.diff(1)(0, 1) == -2);
  CHECK(m23.diff(2)(0, 0) == -2);
  CHECK(m23.diff(2)(1, 0) == 3);
  for (int k = 0; k <= 2; ++k) CHECK(homology_module(m23, k).is_zero());

  /* gcd 2 survives in degrees 0 and 1: ker(-10,-6) = (3,-5)Z while the
     top cell only reaches twice that */
  FreeComplex m610 = moore_smash({six, ten});
  CHECK(homology_module(m610, 0) == FGModule::from_factors(Z, 0, {2}));
  CHECK(homology_module(m610, 1) == FGModule::from_factors(Z, 0, {2}));
  CHECK(homology_module(m610, 2).is_zero());

  /* unit map induces the quotient onto H_0 */
  ChainMapF u = moore_unit({two});
  CHECK(u.src == unit_complex(Z));
  CHECK(u.tgt == m2);
  ModuleMap u0 = induced_map(u, 0);
  CHECK(u0.at(0)(0, 0) == 1);

  ChainMapF u23 = moore_unit({two, three});
  CHECK(u23.tgt == m23);
  CHECK(induced_map(u23, 0).tgt.is_zero());
}

TEST_CASE("moore complexes over quotient and localized bases") {
  /* over Z/4 the element 2 is a zero divisor: its own annihilator shows
     up on top, and the middle is two independent classes */
  BaseRing z4 = BaseRing::mod(4);
  GradedRing r4 = scalar_ring(z4);
  RingElement two = ring_scalar(r4, 2);
  FreeComplex m = moore_smash({two, two});
  CHECK(homology_module(m, 0) == FGModule::from_factors(z4, 0, {2}));
  CHECK(homology_module(m, 1) == FGModule::from_factors(z4, 0, {2, 2}));
  CHECK(homology_module(m, 2) == FGModule::from_factors(z4, 0, {2}));

  /* once 2 is a unit the cone dies */
  BaseRing zh = BaseRing::localized({2});
  RingElement twoh = ring_scalar(scalar_ring(zh), 2);
  FreeComplex mh = moore_smash({twoh});
  CHECK(homology_module(mh, 0).is_zero());
  CHECK(homology_module(mh, 1).is_zero());
}

TEST_CASE("moore complex of a zero acting generator splits into spheres") {
  RingElement e = eta_gen(Z);
  FreeComplex m = moore_smash({e});
  CHECK(homology_module(m, 0) == FGModule::from_factors(Z, 0, {0}));
  CHECK(homology_module(m, 1).is_zero());
  CHECK(homology_module(m, 2) == FGModule::from_factors(Z, 1, {0}));
}

TEST_CASE("moore families are validated") {
  GradedRing r = scalar_ring(Z);
  RingElement two = ring_scalar(r, 2);
  RingElement alien = ring_scalar(scalar_ring(BaseRing::mod(4)), 3);
  CHECK_THROWS_AS(moore_smash({}), InputError);
  CHECK_THROWS_AS(moore_unit({}), InputError);
  CHECK_THROWS_AS(moore_smash({two, alien}), InputError);
}

TEST_CASE("power cones and their collapse steps") {
  GradedRing r = scalar_ring(Z);
  RingElement two = ring_scalar(r, 2);

  FreeComplex c8 = power_cone(two, 3);
  CHECK(c8.rank(0) == 1);
  CHECK(c8.rank(1) == 1);
  CHECK(c8.diff(1)(0, 0) == -8);

  ChainMapF step = power_cone_step(two, 3);
  CHECK(step.src == c8);
  CHECK(step.tgt == power_cone(two, 2));
  CHECK(step.at(0)(0, 0) == 1);
  CHECK(step.at(1)(0, 0) == 2);
  ModuleMap h0 = induced_map(step, 0);
  CHECK(h0.src == FGModule::from_factors(Z, 0, {8}));
  CHECK(h0.tgt == FGModule::from_factors(Z, 0, {4}));
  CHECK(h0.at(0)(0, 0) == 1);

  /* the unit inclusions descend through the collapse */
  FreeComplex unit = unit_complex(Z);
  ChainMapF in8 = cone_incl(multiplication_map(pow_element(two, 3), unit));
  ChainMapF in4 = cone_incl(multiplication_map(pow_element(two, 2), unit));
  CHECK(compose_chain(step, in8) == in4);

  CHECK_THROWS_AS(power_cone(two, -1), InputError);
  CHECK_THROWS_AS(power_cone_step(two, 0), InputError);

  /* zero acting generator: the collapse is the identity on the bottom
     cell and zero above, with the top cell drifting upward */
  RingElement e = eta_gen(Z);
  ChainMapF se = power_cone_step(e, 2);
  CHECK(se.src.rank(0) == 1);
  CHECK(se.src.rank(3) == 1);
  CHECK(se.tgt.rank(2) == 1);
  CHECK(se.at(0)(0, 0) == 1);
}

TEST_CASE("adic tower of the integers at two") {
  FreeComplex x = unit_complex(Z);
  GradedRing r = scalar_ring(Z);
  RingElement two = ring_scalar(r, 2);
  AdicTower t = adic_tower(x, {two}, 4);

  ModuleTower h0 = homology_tower(t.levels, 0);
  CHECK(h0.level(0) == FGModule::from_factors(Z, 0, {2}));
  CHECK(h0.level(1) == FGModule::from_factors(Z, 0, {4}));
  CHECK(h0.level(2) == FGModule::from_factors(Z, 0, {8}));
  CHECK(h0.level(3) == FGModule::from_factors(Z, 0, {16}));
  for (int s = 0; s + 1 < 4; ++s) CHECK(h0.map_at(s).at(0)(0, 0) == 1);

  REQUIRE(t.from_x.size() == 4);
  for (int s = 0; s + 1 < 4; ++s)
    CHECK(compose_chain(t.levels.map_at(s), t.from_x[s + 1]) == t.from_x[s]);
  CHECK(t.from_x[0].src == x);
  CHECK(t.from_x[0].tgt == t.levels.level(0));

  CHECK_THROWS_AS(adic_tower(x, {two}, 0), InputError);
}

TEST_CASE("adic tower with an empty family is constant") {
  FreeComplex x = pres(Z, {6});
  AdicTower t = adic_tower(x, {}, 3);
  for (int s = 0; s < 3; ++s) CHECK(t.levels.level(s) == x);
  CHECK(t.levels.map_at(0) == id_chain_map(x));
  CHECK(t.from_x[2] == id_chain_map(x));
}

TEST_CASE("adic tower at a zero acting generator stacks spheres") {
  FreeComplex x = unit_complex(Z);
  RingElement e = eta_gen(Z);
  AdicTower t = adic_tower(x, {e}, 3);
  for (int s = 0; s < 3; ++s) {
    FreeComplex lv = t.levels.level(s);
    CHECK(homology_module(lv, 0) == FGModule::from_factors(Z, 0, {0}));
    CHECK(homology_module(lv, s + 2) == FGModule::from_factors(Z, s + 1, {0}));
    CHECK(homology_module(lv, 1).is_zero());
  }
}

TEST_CASE("derived completion of the integers at two") {
  FreeComplex x = unit_complex(Z);
  RingElement two = ring_scalar(scalar_ring(Z), 2);
  Completion c = derived_completion(x, {two}, 3);
  CHECK(c.content == 2);
  REQUIRE(c.degrees.size() == 1);
  const DegreeCompletion& dc = c.degrees[0];
  CHECK(dc.degree == 0);
  /* the limit is not finitely generated; it survives as the tower */
  CHECK(!dc.milnor.lim.has_value());
  CHECK(dc.milnor.lim_tower.has_value());
  CHECK(dc.milnor.ml == Verdict::True);
  CHECK(dc.milnor.lim1_zero == Verdict::True);
  CHECK(dc.window_consistent == Verdict::True);
  CHECK(dc.fibre_zero == Verdict::False);
  CHECK(dc.fibre_invertible == Verdict::True);
  CHECK(c.consistent == Verdict::True);
  CHECK(c.complete == Verdict::False);
}

TEST_CASE("derived completion of torsion modules") {
  RingElement three = ring_scalar(scalar_ring(Z), 3);

  /* Z/9 (+) Z/5 at 3: the limit keeps exactly the 3 primary part, and
     the junk in degree 1 outlives any window by one step */
  Completion c = derived_completion(pres(Z, {9, 5}), {three}, 3);
  CHECK(c.content == 3);
  REQUIRE(c.degrees.size() == 2);
  const DegreeCompletion& d0 = degree_entry(c, 0);
  REQUIRE(d0.milnor.lim.has_value());
  CHECK(*d0.milnor.lim == FGModule::from_factors(Z, 0, {9}));
  CHECK(d0.window_consistent == Verdict::True);
  CHECK(d0.fibre_zero == Verdict::False);
  CHECK(d0.fibre_invertible == Verdict::True);
  const DegreeCompletion& d1 = degree_entry(c, 1);
  REQUIRE(d1.milnor.lim.has_value());
  CHECK(d1.milnor.lim->is_zero());
  CHECK(d1.window_consistent == Verdict::Undetermined);
  CHECK(c.consistent == Verdict::Undetermined);
  CHECK(c.complete == Verdict::False);

  /* a single prime of exponent one is already complete, and the degree
     one junk dies after one transition */
  RingElement five = ring_scalar(scalar_ring(Z), 5);
  Completion c5 = derived_completion(pres(Z, {5}), {five}, 3);
  const DegreeCompletion& e0 = degree_entry(c5, 0);
  REQUIRE(e0.milnor.lim.has_value());
  CHECK(*e0.milnor.lim == FGModule::from_factors(Z, 0, {5}));
  CHECK(e0.fibre_zero == Verdict::True);
  CHECK(degree_entry(c5, 1).window_consistent == Verdict::True);
  CHECK(c5.consistent == Verdict::True);
  CHECK(c5.complete == Verdict::True);
}

TEST_CASE("derived completion at the unit ideal vanishes") {
  GradedRing r = scalar_ring(Z);
  Completion c = derived_completion(unit_complex(Z), {ring_scalar(r, 2), ring_scalar(r, 3)}, 3);
  CHECK(c.content == 1);
  REQUIRE(c.degrees.size() == 1);
  REQUIRE(c.degrees[0].milnor.lim.has_value());
  CHECK(c.degrees[0].milnor.lim->is_zero());
  CHECK(c.consistent == Verdict::True);
  CHECK(c.complete == Verdict::False);
}

TEST_CASE("derived completion at a zero acting generator is the identity") {
  FreeComplex x = unit_complex(Z);
  RingElement e = eta_gen(Z);
  Completion c = derived_completion(x, {e}, 3);
  CHECK(c.content == 0);
  /* degree 0 plus one sphere of junk per level, all certified to die */
  REQUIRE(c.degrees.size() == 4);
  const DegreeCompletion& d0 = degree_entry(c, 0);
  REQUIRE(d0.milnor.lim.has_value());
  CHECK(*d0.milnor.lim == FGModule::from_factors(Z, 0, {0}));
  for (const auto& dc : c.degrees) CHECK(dc.window_consistent == Verdict::True);
  CHECK(c.consistent == Verdict::True);
  CHECK(c.complete == Verdict::True);
}

TEST_CASE("derived completion over a base where the content is a unit") {
  BaseRing zh = BaseRing::localized({2});
  FreeComplex x = unit_complex(zh);
  RingElement two = ring_scalar(scalar_ring(zh), 2);
  Completion c = derived_completion(x, {two}, 3);
  REQUIRE(c.degrees.size() == 1);
  REQUIRE(c.degrees[0].milnor.lim.has_value());
  CHECK(c.degrees[0].milnor.lim->is_zero());
  CHECK(c.degrees[0].fibre_invertible == Verdict::True);
  CHECK(c.consistent == Verdict::True);
  CHECK(c.complete == Verdict::False);
}

TEST_CASE("the empty family completes identically") {
  FreeComplex x = pres(Z, {6});
  Completion c = derived_completion(x, {}, 2);
  CHECK(c.content == 0);
  REQUIRE(c.degrees.size() == 1);
  REQUIRE(c.degrees[0].milnor.lim.has_value());
  CHECK(*c.degrees[0].milnor.lim == FGModule::from_factors(Z, 0, {6}));
  CHECK(c.consistent == Verdict::True);
  CHECK(c.complete == Verdict::True);
}

TEST_CASE("completion fibre certificates carry invertible witnesses") {
  GradedRing r = scalar_ring(Z);
  RingElement two = ring_scalar(r, 2);
  RingElement three = ring_scalar(r, 3);

  FibreTower fz = completion_fibre(unit_complex(Z), two, 3);
  CHECK(fz.degrees == std::vector<int>{0});
  CHECK(fz.invertible == Verdict::True);
  CHECK(fz.vanishes == Verdict::False);
  REQUIRE(fz.certificates.size() == 1);
  CHECK(fz.certificates[0].verdict == Verdict::True);
  CHECK(!fz.certificates[0].witnesses.empty());
  CHECK(witnesses_invertible(fz.certificates[0]));

  /* 2 power torsion is already 2 complete: the fibre vanishes, and the
     certificate goes through zero witnesses at a depth where the
     transition composite dies rather than through unit matrices */
  FibreTower f8 = completion_fibre(pres(Z, {8}), two, 3);
  CHECK(f8.invertible == Verdict::True);
  CHECK(f8.vanishes == Verdict::True);
  REQUIRE(f8.certificates.size() == 1);
  CHECK(f8.certificates[0].verdict == Verdict::True);
  CHECK(!f8.certificates[0].witnesses.empty());

  FibreTower f45 = completion_fibre(pres(Z, {9, 5}), three, 3);
  CHECK(f45.invertible == Verdict::True);
  CHECK(f45.vanishes == Verdict::False);
  for (const auto& cert : f45.certificates) {
    CHECK(cert.verdict == Verdict::True);
    CHECK(witnesses_invertible(cert));
  }
}

TEST_CASE("completion fibre of a zero acting element vanishes outright") {
  FreeComplex x = unit_complex(Z);
  RingElement e = eta_gen(Z);
  FibreTower f = completion_fibre(x, e, 3);
  CHECK(f.vanishes == Verdict::True);
  CHECK(f.invertible == Verdict::True);
  CHECK(f.degrees.size() == 4);

  RingElement alien = ring_scalar(scalar_ring(BaseRing::mod(4)), 2);
  CHECK_THROWS_AS(completion_fibre(x, alien, 3), InputError);
  CHECK_THROWS_AS(completion_fibre(x, e, 0), InputError);
}

TEST_CASE("inverting integer contents changes the base ring") {
  GradedRing r = scalar_ring(Z);
  RingElement two = ring_scalar(r, 2);
  RingElement three = ring_scalar(r, 3);

  InvertedComplex a = invert(unit_complex(Z), {three});
  CHECK(a.result.base == BaseRing::localized({3}));
  CHECK(homology_module(a.result, 0) == FGModule::from_factors(a.result.base, 0, {0}));
  CHECK(a.homology_localized == Verdict::True);
  CHECK(a.mult_invertible == Verdict::True);

  /* only the prime being inverted dies in the torsion */
  InvertedComplex b = invert(pres(Z, {12}), {two});
  CHECK(b.result.base == BaseRing::localized({2}));
  CHECK(homology_module(b.result, 0) == FGModule::from_factors(b.result.base, 0, {3}));
  CHECK(b.homology_localized == Verdict::True);
  CHECK(b.mult_invertible == Verdict::True);

  /* over Z/12 inverting 2 peels the 2 part off the modulus */
  InvertedComplex q = invert(unit_complex(BaseRing::mod(12)), {ring_scalar(scalar_ring(BaseRing::mod(12)), 2)});
  CHECK(q.result.base == BaseRing::mod(3));
  CHECK(homology_module(q.result, 0) == FGModule::from_factors(q.result.base, 0, {3}));
  CHECK(q.homology_localized == Verdict::True);

  /* content 4 inverts the same prime as content 2 */
  InvertedComplex u = invert(unit_complex(BaseRing::localized({7})), {ring_scalar(scalar_ring(BaseRing::localized({7})), 3)});
  CHECK(u.result.base == BaseRing::localized({3, 7}));

  /* idempotent: inverting again over the new base changes nothing */
  GradedRing r2 = scalar_ring(b.result.base);
  InvertedComplex b2 = invert(b.result, {ring_scalar(r2, 2)});
  CHECK(b2.result == b.result);

  /* units have empty support */
  InvertedComplex v = invert(pres(Z, {6}), {ring_scalar(r, -1)});
  CHECK(v.result == pres(Z, {6}));
  CHECK(v.mult_invertible == Verdict::True);
}

TEST_CASE("inverting a zero acting or vanishing content kills the complex") {
  RingElement e = eta_gen(Z);
  InvertedComplex k = invert(unit_complex(Z), {e});
  CHECK(k.result == zero_complex(Z));
  CHECK(k.homology_localized == Verdict::True);

  /* 3 is already zero over Z/3, so its content vanishes */
  BaseRing z3 = BaseRing::mod(3);
  RingElement three3 = ring_scalar(scalar_ring(z3), 3);
  InvertedComplex k3 = invert(unit_complex(z3), {three3});
  CHECK(k3.result == zero_complex(z3));
}

TEST_CASE("fracture square of a torsion module splits it") {
  RingElement three = ring_scalar(scalar_ring(Z), 3);
  FractureSquare fs = fracture_square(pres(Z, {9, 5}), three, 3);
  CHECK(fs.evaluable == Verdict::True);
  REQUIRE(fs.degrees.size() == 1);
  const FractureDegree& fd = fs.degrees[0];
  CHECK(fd.degree == 0);
  CHECK(fd.at == FGModule::from_factors(Z, 0, {45}));
  CHECK(fd.completed == FGModule::from_factors(Z, 0, {9}));
  CHECK(fd.inverted == FGModule::from_factors(Z, 0, {5}));
  CHECK(fd.both.is_zero());
  CHECK(fd.split == Verdict::True);
  CHECK(fs.pullback == Verdict::True);
  CHECK(fs.relocalization == Verdict::True);
}

TEST_CASE("fracture square with free homology stays at the pro level") {
  RingElement two = ring_scalar(scalar_ring(Z), 2);
  FractureSquare fs = fracture_square(unit_complex(Z), two, 3);
  CHECK(fs.evaluable == Verdict::False);
  CHECK(fs.degrees.empty());
  CHECK(fs.pullback == Verdict::Undetermined);
  /* the completed corner is still fully described by its tower */
  CHECK(fs.completion.degrees[0].milnor.lim_tower.has_value());
  CHECK(fs.relocalization == Verdict::True);
}

TEST_CASE("fracture square degenerate cases") {
  GradedRing r = scalar_ring(Z);

  FractureSquare z = fracture_square(zero_complex(Z), ring_scalar(r, 2), 2);
  CHECK(z.evaluable == Verdict::True);
  CHECK(z.degrees.empty());
  CHECK(z.pullback == Verdict::True);

  /* a unit content: the completed corner is trivial and the inverted
     corner is the module itself */
  FractureSquare u = fracture_square(pres(Z, {6}), ring_scalar(r, -1), 2);
  CHECK(u.evaluable == Verdict::True);
  REQUIRE(u.degrees.size() == 1);
  CHECK(u.degrees[0].completed.is_zero());
  CHECK(u.degrees[0].inverted == FGModule::from_factors(Z, 0, {6}));
  CHECK(u.degrees[0].both.is_zero());
  CHECK(u.pullback == Verdict::True);
}

TEST_CASE("fracture square recovers the coprime splitting of Z/12") {
  RingElement two = ring_scalar(scalar_ring(Z), 2);
  FractureSquare fs = fracture_square(pres(Z, {12}), two, 4);
  CHECK(fs.evaluable == Verdict::True);
  REQUIRE(fs.degrees.size() == 1);
  CHECK(fs.degrees[0].at == FGModule::from_factors(Z, 0, {12}));
  CHECK(fs.degrees[0].completed == FGModule::from_factors(Z, 0, {4}));
  CHECK(fs.degrees[0].inverted == FGModule::from_factors(Z, 0, {3}));
  CHECK(fs.degrees[0].both.is_zero());
  CHECK(fs.pullback == Verdict::True);
  CHECK(fs.relocalization == Verdict::True);
}

TEST_CASE("acyclicity agrees between families generating the same ideal") {
  GradedRing r = scalar_ring(Z);
  RingElement two = ring_scalar(r, 2);
  RingElement four = ring_scalar(r, 4);
  RingElement six = ring_scalar(r, 6);

  IdealCertificate cert;
  /* 2 = -4 + 6, 4 = 2*2, 6 = 3*2 */
  cert.f_from_g = {{ring_scalar(r, -1), ring_scalar(r, 1)}};
  cert.g_from_f = {{ring_scalar(r, 2)}, {ring_scalar(r, 3)}};
  CHECK(acyclicity_equivalence(unit_complex(Z), {two}, {four, six}, cert));

  /* same ideal over Z[1/2], where both smashes are acyclic */
  BaseRing zh = BaseRing::localized({2});
  GradedRing rh = scalar_ring(zh);
  IdealCertificate crh;
  crh.f_from_g = {{ring_scalar(rh, -1), ring_scalar(rh, 1)}};
  crh.g_from_f = {{ring_scalar(rh, 2)}, {ring_scalar(rh, 3)}};
  CHECK(acyclicity_equivalence(unit_complex(zh), {ring_scalar(rh, 2)},
                               {ring_scalar(rh, 4), ring_scalar(rh, 6)}, crh));

  /* torsion base point: (3) against (3,3) with the obvious certificate */
  IdealCertificate c33;
  c33.f_from_g = {{ring_scalar(r, 1), ring_scalar(r, 0)}};
  c33.g_from_f = {{ring_scalar(r, 1)}, {ring_scalar(r, 1)}};
  RingElement three = ring_scalar(r, 3);
  CHECK(acyclicity_equivalence(pres(Z, {3}), {three}, {three, three}, c33));
}

TEST_CASE("acyclicity comparison validates its certificate") {
  GradedRing r = scalar_ring(Z);
  RingElement two = ring_scalar(r, 2);
  RingElement three = ring_scalar(r, 3);

  IdealCertificate bogus;
  bogus.f_from_g = {{ring_scalar(r, 1)}};
  bogus.g_from_f = {{ring_scalar(r, 1)}};
  CHECK_THROWS_AS(acyclicity_equivalence(unit_complex(Z), {two}, {three}, bogus), InputError);

  IdealCertificate shape;
  shape.f_from_g = {{ring_scalar(r, 1), ring_scalar(r, 0)}};
  shape.g_from_f = {{ring_scalar(r, 1)}};
  CHECK_THROWS_AS(acyclicity_equivalence(unit_complex(Z), {two}, {two}, shape), InputError);

  CHECK_THROWS_AS(acyclicity_equivalence(unit_complex(Z), {}, {two}, IdealCertificate{}),
                  InputError);
}

TEST_CASE("the adic tower does not depend on the family order") {
  FreeComplex x = unit_complex(Z);
  GradedRing r = scalar_ring(Z);
  RingElement two = ring_scalar(r, 2);
  RingElement three = ring_scalar(r, 3);
  AdicTower t1 = adic_tower(x, {two, three}, 3);
  AdicTower t2 = adic_tower(x, {three, two}, 3);

  /* the braiding gives a strictly commuting levelwise iso of towers */
  std::vector<ChainMapF> sig;
  for (int s = 0; s < 3; ++s) {
    ChainMapF sw = tensor_chain(
        id_chain_map(x), tensor_swap(power_cone(two, s + 1), power_cone(three, s + 1)));
    CHECK(sw.src == t1.levels.level(s));
    CHECK(sw.tgt == t2.levels.level(s));
    CHECK(is_quasi_iso(sw));
    sig.push_back(std::move(sw));
  }
  for (int s = 0; s + 1 < 3; ++s)
    CHECK(compose_chain(sig[s], t1.levels.map_at(s)) ==
          compose_chain(t2.levels.map_at(s), sig[s + 1]));
  ChainProMap f = chain_pro_map(identity_reindex(), t1.levels, t2.levels, sig, 0);
  CHECK(f.levels.size() == 3);
  for (int k = 0; k <= 2; ++k)
    for (int s = 0; s < 3; ++s)
      CHECK(homology_module(t1.levels.level(s), k) == homology_module(t2.levels.level(s), k));
}
