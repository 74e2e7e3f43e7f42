#include "sst/towers.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>
#include <sstream>
#include <string>

#include "sst/basics.hpp"

namespace sst {

namespace {

void check_tower_shape(const std::vector<FGModule>& mods, const std::vector<ModuleMap>& maps) {
  if (mods.empty()) throw InputError("a tower needs at least one level");
  if (maps.size() + 1 != mods.size())
    throw InputError("a tower needs one transition per adjacent pair of levels");
  for (size_t s = 0; s < maps.size(); ++s) {
    if (!(maps[s].src == mods[s + 1]) || !(maps[s].tgt == mods[s]))
      throw InputError(fmt::format("tower transition {} does not match its levels", s));
  }
  for (size_t s = 1; s < mods.size(); ++s)
    if (!(mods[s].base() == mods[0].base()))
      throw InputError("tower levels live over different base rings");
}

ModuleMap power_map(const ModuleMap& e, int n) {
  ModuleMap acc = identity_map(e.src);
  for (int i = 0; i < n; ++i) acc = compose(e, acc);
  return acc;
}

SubquotientPresentation adic_presentation(const ModuleMap& e, int s) {
  return present_subquotient(full_submodule(e.src), image_sub(power_map(e, s + 1)));
}

FGModule adic_level_of(const ModuleMap& e, int s) { return adic_presentation(e, s).mod; }

/* induced surjection coker(e^(s+2)) -> coker(e^(s+1)), identity on classes */
ModuleMap adic_transition(const ModuleMap& e, int s) {
  SubquotientPresentation a = adic_presentation(e, s + 1);
  SubquotientPresentation b = adic_presentation(e, s);
  std::map<int, IntMat> comps;
  for (int w : a.mod.weights()) {
    Index n = a.mod.rank_at(w);
    IntMat m(b.mod.rank_at(w), n);
    for (Index j = 0; j < n; ++j) {
      IntVec unit = IntVec::Zero(n);
      unit(j) = 1;
      m.col(j) = subq_class(b, w, subq_rep(a, w, unit));
    }
    comps[w] = std::move(m);
  }
  return module_map(a.mod, b.mod, std::move(comps));
}

/* rank of the free quotient of a submodule */
Index sub_rank(const Submodule& s) {
  Index r = 0;
  for (const auto& [w, h] : s.lat) {
    std::vector<Int> fac = s.of.factors_at(w);
    std::vector<Index> fi;
    for (Index i = 0; i < static_cast<Index>(fac.size()); ++i)
      if (fac[i] == 0) fi.push_back(i);
    if (fi.empty()) continue;
    IntMat fr(static_cast<Index>(fi.size()), h.cols());
    for (Index i = 0; i < static_cast<Index>(fi.size()); ++i) fr.row(i) = h.row(fi[i]);
    r += smith_form(fr).rank;
  }
  return r;
}

Int torsion_exponent(const FGModule& m) {
  Int e = 1;
  for (const auto& [w, fac] : m.factors())
    for (Int d : fac)
      if (d != 0) e = lcm_ck(e, d);
  return e;
}

int torsion_bits(const FGModule& m) {
  int b = 0;
  for (const auto& [w, fac] : m.factors())
    for (Int d : fac)
      for (Int v = d; v > 1; v /= 2) ++b;
  return b;
}

/* class of a submodule lattice modulo e, canonical per weight */
std::string lat_key(const FGModule& m, const Submodule& s, Int e) {
  std::ostringstream os;
  for (int w : m.weights()) {
    IntMat h = hnf_cols(hcat(s.lat.at(w), (e * ident(m.rank_at(w))).eval()));
    os << w << ':';
    for (Index i = 0; i < h.rows(); ++i)
      for (Index j = 0; j < h.cols(); ++j) os << h(i, j) << ',';
    os << ';';
  }
  return os.str();
}

/* first j with im(X_{s+j} -> X_s) equal to val, scanning literally */
int first_match(const ModuleTower& t, int s, const Submodule& val, int jmax) {
  ModuleMap comp = identity_map(t.level(s));
  for (int j = 0; j <= jmax; ++j) {
    if (j > 0) comp = compose(comp, t.map_at(s + j - 1));
    if (sub_eq(image_sub(comp), val)) return j;
  }
  return -1;
}

}  // namespace

int ModuleTower::zone_start() const {
  if (tail != TailRule::Periodic) return static_cast<int>(mods.size());
  /* extend the repeating zone down as far as the stored window repeats */
  int z = last() - period;
  while (z > 0 && mods[z - 1] == mods[z - 1 + period] && maps[z - 1] == maps[z - 1 + period])
    --z;
  return z;
}

FGModule ModuleTower::level(int s) const {
  if (s < 0) throw InputError("negative tower level");
  if (s <= last()) return mods[s];
  switch (tail) {
    case TailRule::Periodic: {
      int r = s;
      while (r > last()) r -= period;
      return mods[r];
    }
    case TailRule::Adic:
      return adic_level_of(*adic_endo, s);
    case TailRule::ZeroMaps:
      return mods.back();
    default:
      throw InputError(fmt::format("tower level {} is beyond the stored window", s));
  }
}

ModuleMap ModuleTower::map_at(int s) const {
  if (s < 0) throw InputError("negative tower level");
  if (s + 1 <= last()) return maps[s];
  switch (tail) {
    case TailRule::Periodic: {
      int r = s;
      while (r + 1 > last()) r -= period;
      return maps[r];
    }
    case TailRule::Adic:
      return adic_transition(*adic_endo, s);
    case TailRule::ZeroMaps:
      return zero_map(level(s + 1), level(s));
    default:
      throw InputError(fmt::format("tower transition {} is beyond the stored window", s));
  }
}

ModuleMap ModuleTower::composite(int hi, int lo) const {
  if (lo < 0 || hi < lo) throw InputError("bad tower composite range");
  ModuleMap acc = identity_map(level(hi));
  for (int j = hi - 1; j >= lo; --j) acc = compose(map_at(j), acc);
  return acc;
}

bool ModuleTower::operator==(const ModuleTower& o) const {
  return base == o.base && mods == o.mods && maps == o.maps && tail == o.tail &&
         period == o.period && adic_endo == o.adic_endo;
}

ModuleTower module_tower(std::vector<FGModule> mods, std::vector<ModuleMap> maps) {
  check_tower_shape(mods, maps);
  BaseRing base = mods[0].base();
  return {std::move(base), std::move(mods), std::move(maps), TailRule::None, 0, std::nullopt};
}

ModuleTower periodic_module_tower(std::vector<FGModule> mods, std::vector<ModuleMap> maps,
                                  int period) {
  check_tower_shape(mods, maps);
  if (period < 1) throw InputError("tower period must be positive");
  if (static_cast<int>(mods.size()) < period + 1)
    throw InputError("a periodic tower must store at least one full period");
  int n = static_cast<int>(mods.size()) - 1;
  if (!(mods[n] == mods[n - period]))
    throw InputError("tower levels do not repeat with the declared period");
  BaseRing base = mods[0].base();
  return {std::move(base), std::move(mods), std::move(maps), TailRule::Periodic, period,
          std::nullopt};
}

ModuleTower zero_tail_module_tower(std::vector<FGModule> mods, std::vector<ModuleMap> maps) {
  check_tower_shape(mods, maps);
  BaseRing base = mods[0].base();
  return {std::move(base), std::move(mods), std::move(maps), TailRule::ZeroMaps, 0, std::nullopt};
}

ModuleTower adic_module_tower(const ModuleMap& endo, int window) {
  if (!(endo.src == endo.tgt)) throw InputError("an adic tower needs an endomorphism");
  if (window < 1) throw InputError("adic tower window must be positive");
  std::vector<FGModule> mods;
  std::vector<ModuleMap> maps;
  for (int s = 0; s < window; ++s) mods.push_back(adic_level_of(endo, s));
  for (int s = 0; s + 1 < window; ++s) maps.push_back(adic_transition(endo, s));
  BaseRing base = endo.src.base();
  return {std::move(base), std::move(mods), std::move(maps), TailRule::Adic, 0, endo};
}

ModuleTower endo_module_tower(const ModuleMap& endo, int window) {
  if (!(endo.src == endo.tgt)) throw InputError("an endomorphism tower needs an endomorphism");
  if (window < 1) throw InputError("tower window must be positive");
  std::vector<FGModule> mods(window + 1, endo.src);
  std::vector<ModuleMap> maps(window, endo);
  return periodic_module_tower(std::move(mods), std::move(maps), 1);
}

ModuleTower constant_module_tower(const FGModule& m, int window) {
  return endo_module_tower(identity_map(m), window);
}

EndoChain endo_image_chain(const ModuleMap& c) {
  if (!(c.src == c.tgt)) throw InputError("an image chain needs an endomorphism");
  const FGModule& m = c.src;
  const BaseRing& base = m.base();
  EndoChain out;
  int max_r0 = 0;
  bool never = false;
  if (base.hereditary()) {
    for (int w : m.weights()) {
      std::vector<Int> fac = m.factors_at(w);
      std::vector<Index> fi;
      for (Index i = 0; i < static_cast<Index>(fac.size()); ++i)
        if (fac[i] == 0) fi.push_back(i);
      if (fi.empty()) continue;
      Index nf = static_cast<Index>(fi.size());
      IntMat cw = c.at(w);
      IntMat cbar(nf, nf);
      for (Index i = 0; i < nf; ++i)
        for (Index j = 0; j < nf; ++j) cbar(i, j) = cw(fi[i], fi[j]);
      /* iterate the free quotient to its rank plateau; rank equality at one
         step is permanent over the rationals */
      IntMat a = cbar;
      Index rk = smith_form(a).rank;
      int r0 = 1;
      while (rk > 0) {
        IntMat nxt = mul_mat(a, cbar);
        Index rn = smith_form(nxt).rank;
        if (rn == rk) break;
        a = std::move(nxt);
        rk = rn;
        ++r0;
      }
      max_r0 = std::max(max_r0, r0);
      if (rk == 0) {
        out.plateau[w] = {0, 1};
        continue;
      }
      /* saturated basis of the plateau span: the first rank columns of the
         inverse of the smith row transform */
      SmithForm sf = smith_form(a);
      auto uinv = solve_exact(sf.u, ident(sf.u.rows()));
      if (!uinv) throw CalcError("smith row transform is not invertible");
      IntMat span = uinv->leftCols(rk).eval();
      auto on_span = solve_exact(span, mul_mat(cbar, span));
      if (!on_span) throw CalcError("plateau span is not invariant");
      Int det = base.strip_inverted(abs_det(*on_span));
      if (det == 0) throw CalcError("plateau endomorphism is singular");
      out.plateau[w] = {rk, det};
      if (det >= 2) never = true;
    }
  }
  if (never) {
    /* a stable image would make the endomorphism bijective on the plateau
       span, forcing unit determinant there */
    out.stable = false;
    return out;
  }
  /* the free layer is constant from the plateau and the torsion layer is a
     descending endo chain inside a finite module, so a single equality step
     proves stability and the bound below is never hit */
  int bound = max_r0 + torsion_bits(m) + 2;
  Submodule l = full_submodule(m);
  for (int r = 0; r <= bound; ++r) {
    Submodule nxt = image_under(c, l);
    if (sub_eq(nxt, l)) {
      out.stable = true;
      out.at = r;
      out.value = std::move(l);
      return out;
    }
    l = std::move(nxt);
  }
  throw CalcError("image chain failed to stabilize within its bound");
}

ImageChain image_chain_at(const ModuleTower& t, int s) {
  if (s < 0) throw InputError("negative tower level");
  ImageChain out;
  switch (t.tail) {
    case TailRule::None: {
      ModuleMap comp = identity_map(t.level(s));
      for (int j = 0; s + j <= t.last(); ++j) {
        if (j > 0) comp = compose(comp, t.map_at(s + j - 1));
        Submodule im = image_sub(comp);
        if (sub_is_zero(im)) return {Verdict::True, j, std::move(im)};
      }
      return out;
    }
    case TailRule::ZeroMaps: {
      int jmax = std::max(0, t.last() - s) + 1;
      ModuleMap comp = identity_map(t.level(s));
      for (int j = 0; j <= jmax; ++j) {
        if (j > 0) comp = compose(comp, t.map_at(s + j - 1));
        Submodule im = image_sub(comp);
        if (sub_is_zero(im)) return {Verdict::True, j, std::move(im)};
      }
      throw CalcError("zero-tail chain did not reach zero");
    }
    case TailRule::Adic:
      /* transitions are surjective by construction */
      return {Verdict::True, 0, full_submodule(t.level(s))};
    case TailRule::Periodic:
      break;
  }
  int z = t.zone_start();
  int p = t.period;
  if (s >= z) {
    EndoChain ec = endo_image_chain(t.composite(s + p, s));
    if (!ec.stable) return {Verdict::False, -1, std::nullopt};
    int j = first_match(t, s, *ec.value, ec.at * p);
    if (j < 0) throw CalcError("stable image was not reached within its bound");
    return {Verdict::True, j, std::move(*ec.value)};
  }
  ModuleMap phi = t.composite(z, s);
  EndoChain ec = endo_image_chain(t.composite(z + p, z));
  if (ec.stable) {
    Submodule val = image_under(phi, *ec.value);
    int j = first_match(t, s, val, (z - s) + ec.at * p + p);
    if (j < 0) throw CalcError("stable image was not reached within its bound");
    return {Verdict::True, j, std::move(val)};
  }
  if (sub_rank(image_sub(phi)) > 0) return out;
  /* the window map has torsion image, so it is killed by the torsion
     exponent e of the head level and only sees the zone lattices mod e.
     Those walk a finite state space, one lag-p endo step per residue, and
     once every residue has repeated a state the pushforward values cycle;
     a descending cycling chain is constant */
  Int e = torsion_exponent(t.level(s));
  const FGModule& mz = t.level(z);
  std::vector<std::map<std::string, int>> seen(p);
  std::vector<bool> closed(p, false);
  int open = p;
  ModuleMap comp = identity_map(mz);
  Submodule cur = full_submodule(mz);
  int tmax = 0;
  for (int tt = 0; open > 0; ++tt) {
    if (tt > 4096) throw CalcError("pushforward state walk did not close");
    if (tt > 0) {
      comp = compose(comp, t.map_at(z + tt - 1));
      cur = image_sub(comp);
    }
    int a = tt % p;
    if (!closed[a] && !seen[a].emplace(lat_key(mz, cur, e), tt).second) {
      closed[a] = true;
      --open;
    }
    tmax = tt;
  }
  Submodule val = image_under(phi, cur);
  int j = first_match(t, s, val, (z - s) + tmax + 1);
  if (j < 0) throw CalcError("stable image was not reached within its bound");
  return {Verdict::True, j, std::move(val)};
}

Verdict is_mittag_leffler(const ModuleTower& t) {
  switch (t.tail) {
    case TailRule::Adic:
    case TailRule::ZeroMaps:
      return Verdict::True;
    case TailRule::None:
      return Verdict::Undetermined;
    case TailRule::Periodic:
      break;
  }
  Verdict acc = Verdict::True;
  for (int s = 0; s < t.zone_start() + t.period; ++s) {
    Verdict v = image_chain_at(t, s).stable;
    if (v == Verdict::False) return Verdict::False;
    acc = verdict_and(acc, v);
  }
  return acc;
}

Verdict pro_zero(const ModuleTower& t) {
  switch (t.tail) {
    case TailRule::Adic:
      /* surjective transitions: the images stay full forever */
      return verdict_of(t.mods[0].is_zero());
    case TailRule::ZeroMaps:
      return Verdict::True;
    case TailRule::None:
      return Verdict::Undetermined;
    case TailRule::Periodic:
      break;
  }
  Verdict acc = Verdict::True;
  for (int s = 0; s < t.zone_start() + t.period; ++s) {
    ImageChain ch = image_chain_at(t, s);
    if (ch.stable == Verdict::False) return Verdict::False;
    if (ch.stable == Verdict::True && !sub_is_zero(*ch.value)) return Verdict::False;
    acc = verdict_and(acc, ch.stable);
  }
  return acc;
}

LimResult lim_lim1(const ModuleTower& t) {
  LimResult out;
  switch (t.tail) {
    case TailRule::None:
      return out;
    case TailRule::ZeroMaps:
      out.ml = Verdict::True;
      out.lim = FGModule::zero(t.base);
      out.lim1_zero = Verdict::True;
      return out;
    case TailRule::Adic: {
      out.ml = Verdict::True;
      out.lim1_zero = Verdict::True;
      EndoChain ec = endo_image_chain(*t.adic_endo);
      if (ec.stable)
        out.lim = t.level(std::max(ec.at - 1, 0));
      else
        out.lim_tower = t;
      return out;
    }
    case TailRule::Periodic:
      break;
  }
  out.ml = is_mittag_leffler(t);
  if (out.ml == Verdict::True) {
    /* the stable images form a subtower whose transitions are surjections
       between levels that repeat, hence isomorphisms; lim is any zone value */
    out.lim1_zero = Verdict::True;
    int z = t.zone_start();
    ImageChain ch = image_chain_at(t, z);
    out.lim = present_subquotient(*ch.value, zero_submodule(t.level(z))).mod;
    return out;
  }
  if (out.ml == Verdict::Undetermined) return out;
  /* the levels are countable, so a Mittag-Leffler failure forces a nonzero
     lim^1 */
  out.lim1_zero = Verdict::False;
  if (t.period == 1) {
    ModuleMap c = t.composite(t.zone_start() + 1, t.zone_start());
    if (sub_is_zero(kernel_sub(c))) {
      EndoChain ec = endo_image_chain(c);
      bool evaluable = true;
      for (const auto& [w, pd] : ec.plateau)
        if (pd.first > 1 || (pd.first == 1 && pd.second < 2)) evaluable = false;
      if (evaluable) {
        /* every free direction shrinks with determinant at least two, so a
           compatible thread is determined by its torsion head and lim is the
           stable part of the chain T >= c(T) >= c^2(T) >= ... */
        const FGModule& mz = t.level(t.zone_start());
        Submodule tor = torsion_sub(mz);
        int bound = torsion_bits(mz) + 2;
        bool settled = false;
        for (int r = 0; r <= bound && !settled; ++r) {
          Submodule nxt = image_under(c, tor);
          settled = sub_eq(nxt, tor);
          if (!settled) tor = std::move(nxt);
        }
        if (!settled) throw CalcError("torsion chain failed to stabilize");
        out.lim = present_subquotient(tor, zero_submodule(mz)).mod;
      }
    }
  }
  return out;
}

/* ---- reindexing ---- */

ReindexFn reindex_fn(std::vector<int> head, int slope, int offset) {
  if (slope < 1) throw InputError("reindexing slope must be positive");
  int prev = -1;
  for (size_t i = 0; i < head.size(); ++i) {
    if (head[i] < static_cast<int>(i) || head[i] < prev)
      throw InputError("a reindexing must be monotone with n(k) >= k");
    prev = head[i];
  }
  int h = static_cast<int>(head.size());
  if (slope * h + offset < std::max(h, prev))
    throw InputError("the reindexing junction breaks monotonicity");
  return {std::move(head), slope, offset};
}

ReindexFn identity_reindex() { return {{}, 1, 0}; }

ReindexFn compose_reindex(const ReindexFn& n, const ReindexFn& m) {
  int cut = static_cast<int>(m.head.size());
  while (m.at(cut) < static_cast<int>(n.head.size())) ++cut;
  std::vector<int> head(cut);
  for (int k = 0; k < cut; ++k) head[k] = n.at(m.at(k));
  return reindex_fn(std::move(head), n.slope * m.slope, n.slope * m.offset + n.offset);
}

ModuleTower reindex(const ModuleTower& t, const ReindexFn& n) {
  reindex_fn(n.head, n.slope, n.offset);
  switch (t.tail) {
    case TailRule::Periodic: {
      int d = t.period / std::gcd(n.slope, t.period);
      int k1 = static_cast<int>(n.head.size());
      while (n.at(k1) < t.zone_start()) ++k1;
      int len = k1 + d + 1;
      std::vector<FGModule> mods;
      std::vector<ModuleMap> maps;
      for (int k = 0; k < len; ++k) mods.push_back(t.level(n.at(k)));
      for (int k = 0; k + 1 < len; ++k) maps.push_back(t.composite(n.at(k + 1), n.at(k)));
      return periodic_module_tower(std::move(mods), std::move(maps), d);
    }
    case TailRule::Adic: {
      int len = std::max(static_cast<int>(t.mods.size()), 2);
      std::vector<FGModule> mods;
      std::vector<ModuleMap> maps;
      for (int k = 0; k < len; ++k) mods.push_back(t.level(n.at(k)));
      for (int k = 0; k + 1 < len; ++k) maps.push_back(t.composite(n.at(k + 1), n.at(k)));
      return module_tower(std::move(mods), std::move(maps));
    }
    case TailRule::ZeroMaps: {
      int k = 0;
      while (n.at(k) <= t.last()) ++k;
      int len = k + 1;
      std::vector<FGModule> mods;
      std::vector<ModuleMap> maps;
      for (int j = 0; j < len; ++j) mods.push_back(t.level(n.at(j)));
      for (int j = 0; j + 1 < len; ++j) maps.push_back(t.composite(n.at(j + 1), n.at(j)));
      return zero_tail_module_tower(std::move(mods), std::move(maps));
    }
    default: {
      if (n.at(0) > t.last()) throw InputError("the reindexing leaves the stored window");
      int len = 1;
      while (n.at(len) <= t.last()) ++len;
      std::vector<FGModule> mods;
      std::vector<ModuleMap> maps;
      for (int k = 0; k < len; ++k) mods.push_back(t.level(n.at(k)));
      for (int k = 0; k + 1 < len; ++k) maps.push_back(t.composite(n.at(k + 1), n.at(k)));
      return module_tower(std::move(mods), std::move(maps));
    }
  }
}

/* ---- pro maps ---- */

ModuleMap ProMap::level_at(int k) const {
  if (k < 0) throw InputError("negative pro map level");
  int size = static_cast<int>(levels.size());
  if (k < size) return levels[k];
  if (period <= 0) throw CalcError("pro map level beyond the stored window");
  int r = k;
  while (r >= size) r -= period;
  return levels[r];
}

namespace {

bool tower_defined_at(const ModuleTower& t, int s) {
  return t.tail != TailRule::None || s <= t.last();
}

/* pro-equality of two maps out of x.level(from): equal after precomposing
   with some transition composite */
bool squares_commute(const ModuleMap& a, const ModuleMap& b, const ModuleTower& x, int from,
                     int depth) {
  for (int l = from; l <= from + depth; ++l) {
    if (!tower_defined_at(x, l)) break;
    ModuleMap comp = x.composite(l, from);
    if (compose(a, comp) == compose(b, comp)) return true;
  }
  return false;
}

}  // namespace

ProMap pro_map(ReindexFn n, ModuleTower src, ModuleTower tgt, std::vector<ModuleMap> levels,
               int period) {
  reindex_fn(n.head, n.slope, n.offset);
  if (levels.empty()) throw InputError("a pro map needs at least one level");
  if (period < 0 || (period > 0 && static_cast<int>(levels.size()) < period))
    throw InputError("pro map period exceeds its stored levels");
  ProMap f{std::move(n), std::move(src), std::move(tgt), std::move(levels), period};
  int size = static_cast<int>(f.levels.size());
  int shape_end = f.period > 0 ? size + f.period : size;
  for (int k = 0; k < shape_end; ++k) {
    ModuleMap lk = f.level_at(k);
    if (!(lk.src == f.src.level(f.n.at(k))) || !(lk.tgt == f.tgt.level(k)))
      throw InputError(fmt::format("pro map level {} has the wrong shape", k));
  }
  int depth = static_cast<int>(f.src.mods.size()) + 2 * std::max(f.src.period, 1) + 6;
  int sq_end = f.period > 0 ? size : size - 1;
  for (int k = 0; k < sq_end; ++k) {
    ModuleMap a = compose(f.level_at(k), f.src.composite(f.n.at(k + 1), f.n.at(k)));
    ModuleMap b = compose(f.tgt.map_at(k), f.level_at(k + 1));
    if (!squares_commute(a, b, f.src, f.n.at(k + 1), depth))
      throw InputError(fmt::format("pro map square at level {} does not commute", k));
  }
  return f;
}

ProMap identity_pro_map(const ModuleTower& t) {
  std::vector<ModuleMap> lv;
  for (const FGModule& m : t.mods) lv.push_back(identity_map(m));
  int period = t.tail == TailRule::Periodic ? t.period : 0;
  return pro_map(identity_reindex(), t, t, std::move(lv), period);
}

ProMap reindex_pro_map(const ModuleTower& t, const ReindexFn& n) {
  ModuleTower rt = reindex(t, n);
  int len = static_cast<int>(rt.mods.size());
  int period = (t.tail == TailRule::Periodic && n.slope == 1) ? t.period : 0;
  std::vector<ModuleMap> lv;
  for (int k = 0; k < len; ++k) lv.push_back(t.composite(n.at(k), k));
  return pro_map(identity_reindex(), std::move(rt), t, std::move(lv), period);
}

ProMap compose_pro_maps(const ProMap& f, const ProMap& g) {
  if (!(g.tgt == f.src)) throw InputError("pro maps do not compose");
  ReindexFn n = compose_reindex(g.n, f.n);
  bool per = f.period > 0 && g.period > 0 && f.n.slope == 1 && g.n.slope == 1;
  int q = per ? std::lcm(f.period, g.period) : 0;
  int len = static_cast<int>(f.levels.size());
  if (per) {
    /* the wrap window must sit inside the zones of both towers, where the
       levels genuinely repeat */
    int j = static_cast<int>(n.head.size());
    while (j < f.tgt.zone_start() || n.at(j) < g.src.zone_start()) ++j;
    len = std::max({len, q + 1, j + q + 1});
  }
  std::vector<ModuleMap> lv;
  for (int k = 0; k < len; ++k) {
    if (f.period == 0 && k >= static_cast<int>(f.levels.size())) break;
    int mid = f.n.at(k);
    if (g.period == 0 && mid >= static_cast<int>(g.levels.size())) break;
    lv.push_back(compose(f.level_at(k), g.level_at(mid)));
  }
  if (lv.empty()) throw InputError("the composite pro map has no computable level");
  if (q > 0 && static_cast<int>(lv.size()) < q) q = 0;
  return pro_map(std::move(n), g.src, f.tgt, std::move(lv), q);
}

namespace {

std::optional<ModuleMap> iso_witness(const ProMap& f, int k, int l) {
  MapConstraints mc;
  mc.src = f.tgt.level(l);
  mc.tgt = f.src.level(f.n.at(k));
  mc.post.push_back({f.level_at(k), f.tgt.composite(l, k)});
  mc.pre.push_back({f.level_at(l), f.src.composite(f.n.at(l), f.n.at(k))});
  return solve_module_map(mc);
}

}  // namespace

ProIso is_pro_isomorphism(const ProMap& f, int horizon) {
  Verdict zs = pro_zero(f.src);
  Verdict zt = pro_zero(f.tgt);
  if (zs == Verdict::True || zt == Verdict::True) {
    if (zs != zt) {
      if (definite(zs) && definite(zt)) return {Verdict::False, 0, {}};
      return {Verdict::Undetermined, -1, {}};
    }
    /* both towers are pro-zero, so the map is an isomorphism in the pro
       category; exhibit zero witnesses at levels with zero composites */
    ProIso out{Verdict::True, -1, {}};
    int kmax = static_cast<int>(f.levels.size());
    int h = horizon > 0 ? horizon : kmax + 8;
    for (int k = 0; k < kmax; ++k) {
      bool found = false;
      for (int l = k; l <= k + h; ++l) {
        if (!tower_defined_at(f.tgt, l) || !tower_defined_at(f.src, f.n.at(l))) break;
        if (f.tgt.composite(l, k).is_zero() &&
            f.src.composite(f.n.at(l), f.n.at(k)).is_zero()) {
          out.witnesses.push_back({l, zero_map(f.tgt.level(l), f.src.level(f.n.at(k)))});
          found = true;
          break;
        }
      }
      if (!found) return {Verdict::Undetermined, k, std::move(out.witnesses)};
    }
    return out;
  }
  if (f.src.tail == TailRule::Periodic && f.tgt.tail == TailRule::Periodic && f.period > 0) {
    int d = std::lcm(std::lcm(f.tgt.period, f.period),
                     f.src.period / std::gcd(f.n.slope, f.src.period));
    int k1 = static_cast<int>(f.n.head.size());
    while (f.n.at(k1) < f.src.zone_start()) ++k1;
    int k0 = std::max({k1, f.tgt.zone_start(), static_cast<int>(f.levels.size()) - f.period});
    int kmax = k0 + d;
    int h = horizon > 0 ? horizon : k0 + 2 * d + 2;
    /* all level situations from kmax on repeat ones already checked, so a
       witness at every level below kmax certifies the whole map */
    ProIso out{Verdict::True, -1, {}};
    for (int k = 0; k < kmax; ++k) {
      bool found = false;
      for (int l = k; l <= k + h; ++l) {
        auto wmap = iso_witness(f, k, l);
        if (wmap) {
          out.witnesses.push_back({l, std::move(*wmap)});
          found = true;
          break;
        }
      }
      if (!found) return {Verdict::Undetermined, k, std::move(out.witnesses)};
    }
    return out;
  }
  /* window-limited: collect witnesses where the data exists, but an unknown
     tail cannot be certified either way */
  ProIso out{Verdict::Undetermined, -1, {}};
  int kmax = static_cast<int>(f.levels.size());
  int h = horizon > 0 ? horizon : kmax;
  for (int k = 0; k < kmax; ++k) {
    bool found = false;
    for (int l = k; l <= k + h; ++l) {
      if (f.period == 0 && l >= kmax) break;
      if (!tower_defined_at(f.tgt, l) || !tower_defined_at(f.src, f.n.at(l))) break;
      auto wmap = iso_witness(f, k, l);
      if (wmap) {
        out.witnesses.push_back({l, std::move(*wmap)});
        found = true;
        break;
      }
    }
    if (!found) {
      out.failed_level = k;
      return out;
    }
  }
  return out;
}

ProMap invert_pro_map(const ProMap& f, const ProIso& wit) {
  if (wit.verdict != Verdict::True)
    throw InputError("inversion needs a certified pro-isomorphism");
  const ModuleTower& x = f.src;
  const ModuleTower& y = f.tgt;
  bool per = f.period > 0 && x.tail == TailRule::Periodic && y.tail == TailRule::Periodic &&
             f.n.slope == 1;
  int d = 1;
  int wg;
  if (per) {
    d = std::lcm(std::lcm(y.period, f.period), x.period);
    int k1 = static_cast<int>(f.n.head.size());
    while (k1 < x.zone_start() || f.n.at(k1) < x.zone_start()) ++k1;
    int k0 = std::max({k1, y.zone_start(), static_cast<int>(f.levels.size()) - f.period});
    wg = k0 + 2 * d + 2;
  } else {
    if (wit.witnesses.empty()) throw InputError("no witnesses to invert through");
    int cover = f.n.at(static_cast<int>(wit.witnesses.size()) - 1);
    wg = std::min(x.last(), cover) + 1;
  }
  int h = wg + 2 * d + 8;
  /* one witness per inverse level, at monotone target depths */
  std::vector<int> ng;
  std::vector<ModuleMap> lv;
  int prev = 0;
  for (int j = 0; j < wg; ++j) {
    int kj = 0;
    while (f.n.at(kj) < j) ++kj;
    bool found = false;
    for (int l = kj; l <= kj + h; ++l) {
      if (f.period == 0 && l >= static_cast<int>(f.levels.size())) break;
      if (!tower_defined_at(y, l) || !tower_defined_at(x, f.n.at(l))) break;
      auto wmap = iso_witness(f, kj, l);
      if (!wmap) continue;
      int nj = std::max({l, j, prev});
      ModuleMap gj = compose(x.composite(f.n.at(kj), j), compose(*wmap, y.composite(nj, l)));
      ng.push_back(nj);
      lv.push_back(std::move(gj));
      prev = nj;
      found = true;
      break;
    }
    if (!found) throw CalcError("pro-isomorphism witnesses vanished during inversion");
  }
  /* deepen levels one step at a time until every square commutes literally;
     the triangle identities guarantee the defect dies after finitely many
     steps along the target tower */
  for (int j = 0; j + 1 < wg; ++j) {
    while (ng[j + 1] < ng[j]) {
      lv[j + 1] = compose(lv[j + 1], y.map_at(ng[j + 1]));
      ++ng[j + 1];
    }
    for (int extra = 0;; ++extra) {
      if (extra > h || !tower_defined_at(y, ng[j + 1] + 1))
        throw CalcError("inverse squares do not close");
      ModuleMap a = compose(lv[j], y.composite(ng[j + 1], ng[j]));
      ModuleMap b = compose(x.map_at(j), lv[j + 1]);
      if (a == b) break;
      lv[j + 1] = compose(lv[j + 1], y.map_at(ng[j + 1]));
      ++ng[j + 1];
    }
  }
  if (per) {
    /* normalize every level to one uniform depth so the reindexing is a pure
       shift; composing with further transitions keeps the squares literal */
    int unif = 0;
    for (int j = 0; j < wg; ++j) unif = std::max(unif, ng[j] - j);
    for (int j = 0; j < wg; ++j) {
      if (ng[j] < j + unif) lv[j] = compose(lv[j], y.composite(j + unif, ng[j]));
      ng[j] = j + unif;
    }
    int gper = d;
    if (wg > d) {
      for (int j = wg - d; j < wg; ++j)
        if (!(lv[j] == lv[j - d])) {
          gper = 0;
          break;
        }
    } else {
      gper = 0;
    }
    return pro_map(reindex_fn({}, 1, unif), y, x, std::move(lv), gper);
  }
  int offset = ng.back() - (wg - 1);
  ReindexFn gn = reindex_fn(std::move(ng), 1, offset);
  return pro_map(std::move(gn), y, x, std::move(lv), 0);
}

/* ---- complex towers ---- */

namespace {

void check_ctower_shape(const std::vector<FreeComplex>& xs, const std::vector<ChainMapF>& maps) {
  if (xs.empty()) throw InputError("a tower needs at least one level");
  if (maps.size() + 1 != xs.size())
    throw InputError("a tower needs one transition per adjacent pair of levels");
  for (size_t s = 0; s < maps.size(); ++s) {
    if (!(maps[s].src == xs[s + 1]) || !(maps[s].tgt == xs[s]))
      throw InputError(fmt::format("tower transition {} does not match its levels", s));
  }
  for (size_t s = 1; s < xs.size(); ++s)
    if (!(xs[s].base == xs[0].base))
      throw InputError("tower levels live over different base rings");
}

}  // namespace

int ComplexTower::zone_start() const {
  if (tail != TailRule::Periodic) return static_cast<int>(xs.size());
  int z = last() - period;
  while (z > 0 && xs[z - 1] == xs[z - 1 + period] && maps[z - 1] == maps[z - 1 + period]) --z;
  return z;
}

FreeComplex ComplexTower::level(int s) const {
  if (s < 0) throw InputError("negative tower level");
  if (s <= last()) return xs[s];
  switch (tail) {
    case TailRule::Periodic: {
      int r = s;
      while (r > last()) r -= period;
      return xs[r];
    }
    case TailRule::ZeroMaps:
      return xs.back();
    default:
      throw InputError(fmt::format("tower level {} is beyond the stored window", s));
  }
}

ChainMapF ComplexTower::map_at(int s) const {
  if (s < 0) throw InputError("negative tower level");
  if (s + 1 <= last()) return maps[s];
  switch (tail) {
    case TailRule::Periodic: {
      int r = s;
      while (r + 1 > last()) r -= period;
      return maps[r];
    }
    case TailRule::ZeroMaps:
      return zero_chain_map(level(s + 1), level(s));
    default:
      throw InputError(fmt::format("tower transition {} is beyond the stored window", s));
  }
}

ChainMapF ComplexTower::composite(int hi, int lo) const {
  if (lo < 0 || hi < lo) throw InputError("bad tower composite range");
  ChainMapF acc = id_chain_map(level(hi));
  for (int j = hi - 1; j >= lo; --j) acc = compose_chain(map_at(j), acc);
  return acc;
}

ComplexTower complex_tower(std::vector<FreeComplex> xs, std::vector<ChainMapF> maps) {
  check_ctower_shape(xs, maps);
  BaseRing base = xs[0].base;
  return {std::move(base), std::move(xs), std::move(maps), TailRule::None, 0};
}

ComplexTower periodic_complex_tower(std::vector<FreeComplex> xs, std::vector<ChainMapF> maps,
                                    int period) {
  check_ctower_shape(xs, maps);
  if (period < 1) throw InputError("tower period must be positive");
  if (static_cast<int>(xs.size()) < period + 1)
    throw InputError("a periodic tower must store at least one full period");
  int n = static_cast<int>(xs.size()) - 1;
  if (!(xs[n] == xs[n - period]))
    throw InputError("tower levels do not repeat with the declared period");
  BaseRing base = xs[0].base;
  return {std::move(base), std::move(xs), std::move(maps), TailRule::Periodic, period};
}

ComplexTower zero_tail_complex_tower(std::vector<FreeComplex> xs, std::vector<ChainMapF> maps) {
  check_ctower_shape(xs, maps);
  BaseRing base = xs[0].base;
  return {std::move(base), std::move(xs), std::move(maps), TailRule::ZeroMaps, 0};
}

ComplexTower constant_complex_tower(const FreeComplex& x, int window) {
  if (window < 1) throw InputError("tower window must be positive");
  std::vector<FreeComplex> xs(window + 1, x);
  std::vector<ChainMapF> maps(window, id_chain_map(x));
  return periodic_complex_tower(std::move(xs), std::move(maps), 1);
}

ComplexTower reindex_complex(const ComplexTower& t, const ReindexFn& n) {
  reindex_fn(n.head, n.slope, n.offset);
  switch (t.tail) {
    case TailRule::Periodic: {
      int d = t.period / std::gcd(n.slope, t.period);
      int k1 = static_cast<int>(n.head.size());
      while (n.at(k1) < t.zone_start()) ++k1;
      int len = k1 + d + 1;
      std::vector<FreeComplex> xs;
      std::vector<ChainMapF> maps;
      for (int k = 0; k < len; ++k) xs.push_back(t.level(n.at(k)));
      for (int k = 0; k + 1 < len; ++k) maps.push_back(t.composite(n.at(k + 1), n.at(k)));
      return periodic_complex_tower(std::move(xs), std::move(maps), d);
    }
    case TailRule::ZeroMaps: {
      int k = 0;
      while (n.at(k) <= t.last()) ++k;
      int len = k + 1;
      std::vector<FreeComplex> xs;
      std::vector<ChainMapF> maps;
      for (int j = 0; j < len; ++j) xs.push_back(t.level(n.at(j)));
      for (int j = 0; j + 1 < len; ++j) maps.push_back(t.composite(n.at(j + 1), n.at(j)));
      return zero_tail_complex_tower(std::move(xs), std::move(maps));
    }
    default: {
      if (n.at(0) > t.last()) throw InputError("the reindexing leaves the stored window");
      int len = 1;
      while (n.at(len) <= t.last()) ++len;
      std::vector<FreeComplex> xs;
      std::vector<ChainMapF> maps;
      for (int k = 0; k < len; ++k) xs.push_back(t.level(n.at(k)));
      for (int k = 0; k + 1 < len; ++k) maps.push_back(t.composite(n.at(k + 1), n.at(k)));
      return complex_tower(std::move(xs), std::move(maps));
    }
  }
}

ModuleTower homology_tower(const ComplexTower& t, int k) {
  std::vector<FGModule> mods;
  std::vector<ModuleMap> maps;
  for (const FreeComplex& x : t.xs) mods.push_back(homology_module(x, k));
  for (const ChainMapF& f : t.maps) maps.push_back(induced_map(f, k));
  switch (t.tail) {
    case TailRule::Periodic:
      return periodic_module_tower(std::move(mods), std::move(maps), t.period);
    case TailRule::ZeroMaps:
      return zero_tail_module_tower(std::move(mods), std::move(maps));
    default:
      return module_tower(std::move(mods), std::move(maps));
  }
}

std::pair<int, int> homology_degree_range(const ComplexTower& t) {
  int lo = 0, hi = -1;
  bool any = false;
  for (const FreeComplex& x : t.xs) {
    if (x.wts.empty()) continue;
    lo = any ? std::min(lo, x.lo) : x.lo;
    hi = any ? std::max(hi, x.hi()) : x.hi();
    any = true;
  }
  return {lo, hi};
}

Verdict is_pro_contractible(const ComplexTower& t) {
  auto [lo, hi] = homology_degree_range(t);
  Verdict acc = Verdict::True;
  for (int k = lo; k <= hi; ++k) {
    Verdict v = pro_zero(homology_tower(t, k));
    if (v == Verdict::False) return Verdict::False;
    acc = verdict_and(acc, v);
  }
  return acc;
}

ChainMapF ChainProMap::level_at(int k) const {
  if (k < 0) throw InputError("negative pro map level");
  int size = static_cast<int>(levels.size());
  if (k < size) return levels[k];
  if (period <= 0) throw CalcError("pro map level beyond the stored window");
  int r = k;
  while (r >= size) r -= period;
  return levels[r];
}

namespace {

bool ctower_defined_at(const ComplexTower& t, int s) {
  return t.tail != TailRule::None || s <= t.last();
}

bool chain_squares_commute(const ChainMapF& a, const ChainMapF& b, const ComplexTower& x,
                           int from, int depth) {
  for (int l = from; l <= from + depth; ++l) {
    if (!ctower_defined_at(x, l)) break;
    ChainMapF comp = x.composite(l, from);
    if (compose_chain(a, comp) == compose_chain(b, comp)) return true;
  }
  return false;
}

}  // namespace

ChainProMap chain_pro_map(ReindexFn n, ComplexTower src, ComplexTower tgt,
                          std::vector<ChainMapF> levels, int period) {
  reindex_fn(n.head, n.slope, n.offset);
  if (levels.empty()) throw InputError("a pro map needs at least one level");
  if (period < 0 || (period > 0 && static_cast<int>(levels.size()) < period))
    throw InputError("pro map period exceeds its stored levels");
  ChainProMap f{std::move(n), std::move(src), std::move(tgt), std::move(levels), period};
  int size = static_cast<int>(f.levels.size());
  int shape_end = f.period > 0 ? size + f.period : size;
  for (int k = 0; k < shape_end; ++k) {
    ChainMapF lk = f.level_at(k);
    if (!(lk.src == f.src.level(f.n.at(k))) || !(lk.tgt == f.tgt.level(k)))
      throw InputError(fmt::format("pro map level {} has the wrong shape", k));
  }
  int depth = static_cast<int>(f.src.xs.size()) + 2 * std::max(f.src.period, 1) + 6;
  int sq_end = f.period > 0 ? size : size - 1;
  for (int k = 0; k < sq_end; ++k) {
    ChainMapF a = compose_chain(f.level_at(k), f.src.composite(f.n.at(k + 1), f.n.at(k)));
    ChainMapF b = compose_chain(f.tgt.map_at(k), f.level_at(k + 1));
    if (!chain_squares_commute(a, b, f.src, f.n.at(k + 1), depth))
      throw InputError(fmt::format("pro map square at level {} does not commute", k));
  }
  return f;
}

Verdict is_pro_weak_equivalence(const ChainProMap& f, int horizon) {
  auto [lo1, hi1] = homology_degree_range(f.src);
  auto [lo2, hi2] = homology_degree_range(f.tgt);
  int lo, hi;
  if (hi1 < lo1) {
    lo = lo2;
    hi = hi2;
  } else if (hi2 < lo2) {
    lo = lo1;
    hi = hi1;
  } else {
    lo = std::min(lo1, lo2);
    hi = std::max(hi1, hi2);
  }
  Verdict acc = Verdict::True;
  for (int k = lo; k <= hi; ++k) {
    std::vector<ModuleMap> lv;
    for (const ChainMapF& c : f.levels) lv.push_back(induced_map(c, k));
    ProMap pf = pro_map(f.n, homology_tower(f.src, k), homology_tower(f.tgt, k), std::move(lv),
                        f.period);
    Verdict v = is_pro_isomorphism(pf, horizon).verdict;
    if (v == Verdict::False) return Verdict::False;
    acc = verdict_and(acc, v);
  }
  return acc;
}

ChainMapF cone_to_target(const ChainMapF& incl, const ChainMapF& proj) {
  if (!(incl.tgt == proj.src)) throw InputError("fibre sequence maps do not match");
  if (!compose_chain(proj, incl).is_zero())
    throw InputError("the composite through the total complex is not zero");
  FreeComplex c = cone(incl);
  std::map<int, IntMat> comps;
  for (int k = c.lo; k <= c.hi(); ++k) {
    Index rows = proj.tgt.in_range(k) ? proj.tgt.rank(k) : 0;
    Index cols = c.rank(k);
    if (rows == 0 || cols == 0) continue;
    Index fcols = incl.src.in_range(k - 1) ? incl.src.rank(k - 1) : 0;
    IntMat pk = proj.at(k);
    IntMat m = IntMat::Zero(rows, cols);
    if (pk.cols() > 0) m.block(0, fcols, rows, pk.cols()) = pk;
    if (!m.isZero()) comps[k] = std::move(m);
  }
  return chain_map(std::move(c), proj.tgt, std::move(comps));
}

bool is_quasi_iso(const ChainMapF& f) {
  int lo = std::min(f.src.lo, f.tgt.lo) - 1;
  int hi = std::max(f.src.hi(), f.tgt.hi()) + 1;
  for (int k = lo; k <= hi; ++k)
    if (!is_iso(induced_map(f, k))) return false;
  return true;
}

TwoOfThree two_of_three_contractible(const ComplexTower& fib, const ComplexTower& tot,
                                     const ComplexTower& base,
                                     const std::vector<ChainMapF>& incls,
                                     const std::vector<ChainMapF>& projs) {
  if (incls.size() != fib.xs.size() || projs.size() != fib.xs.size() ||
      tot.xs.size() != fib.xs.size() || base.xs.size() != fib.xs.size())
    throw InputError("the three towers must share a window");
  for (size_t s = 0; s < incls.size(); ++s) {
    if (!(incls[s].src == fib.xs[s]) || !(incls[s].tgt == tot.xs[s]) ||
        !(projs[s].src == tot.xs[s]) || !(projs[s].tgt == base.xs[s]))
      throw InputError(fmt::format("fibre sequence at level {} has the wrong shape", s));
    /* levelwise: the fibre inclusion and projection must present the base as
       the cofibre of the inclusion up to quasi-isomorphism */
    if (!is_quasi_iso(cone_to_target(incls[s], projs[s])))
      throw InputError(fmt::format("level {} is not a fibre sequence", s));
  }
  for (size_t s = 0; s + 1 < incls.size(); ++s) {
    if (!(compose_chain(incls[s], fib.maps[s]) == compose_chain(tot.maps[s], incls[s + 1])) ||
        !(compose_chain(projs[s], tot.maps[s]) == compose_chain(base.maps[s], projs[s + 1])))
      throw InputError(fmt::format("fibre sequence square at level {} does not commute", s));
  }
  int period = 0;
  if (tot.tail == TailRule::Periodic && base.tail == TailRule::Periodic)
    period = std::lcm(tot.period, base.period);
  if (period > 0 && static_cast<int>(projs.size()) < period) period = 0;
  TwoOfThree out;
  out.fibre_pro_contractible = is_pro_contractible(fib);
  ChainProMap pm = chain_pro_map(identity_reindex(), tot, base, projs, period);
  out.base_pro_weak_equivalence = is_pro_weak_equivalence(pm, 0);
  out.consistent = !(definite(out.fibre_pro_contractible) &&
                     definite(out.base_pro_weak_equivalence) &&
                     out.fibre_pro_contractible != out.base_pro_weak_equivalence);
  return out;
}

/* ---- truncation towers ---- */

Postnikov postnikov_tower(const FreeComplex& x) {
  if (x.wts.empty()) {
    ComplexTower ct = constant_complex_tower(x, 1);
    std::vector<ChainMapF> pr(2, id_chain_map(x));
    ChainProMap proj = chain_pro_map(identity_reindex(), ct, ct, std::move(pr), 1);
    return {ct, std::move(proj)};
  }
  int lo = x.lo;
  int hi = x.hi();
  int w = hi - lo + 2;
  std::vector<FreeComplex> lvls;
  std::vector<ChainMapF> projs;
  for (int k = 0; k < w; ++k) {
    FreeTruncationAbove ta = truncate_above_free(x, lo + k);
    lvls.push_back(std::move(ta.trunc));
    projs.push_back(std::move(ta.proj));
  }
  /* transition P_{k+1} -> P_k: the cone of the inclusion of kernels, which is
     block diagonal in the (shifted kernel, ambient) decomposition */
  std::vector<ChainMapF> trans;
  for (int k = 0; k + 1 < w; ++k) {
    FreeTruncationBelow ta = truncate_below_free(x, lo + k + 2);
    FreeTruncationBelow tb = truncate_below_free(x, lo + k + 1);
    std::map<int, IntMat> icomps;
    for (int j = lo + k + 2; j <= hi; ++j) {
      IntMat m = j == lo + k + 2 ? ta.incl.at(j) : ident(x.rank(j));
      if (m.rows() > 0 && m.cols() > 0 && !m.isZero()) icomps[j] = std::move(m);
    }
    ChainMapF inc = chain_map(ta.trunc, tb.trunc, std::move(icomps));
    const FreeComplex& pk = lvls[k];
    const FreeComplex& pk1 = lvls[k + 1];
    std::map<int, IntMat> ucomps;
    for (int j = pk.lo; j <= pk.hi(); ++j) {
      Index rows = pk.rank(j);
      Index cols = pk1.in_range(j) ? pk1.rank(j) : 0;
      if (rows == 0 || cols == 0) continue;
      Index ra = ta.trunc.in_range(j - 1) ? ta.trunc.rank(j - 1) : 0;
      Index rb = tb.trunc.in_range(j - 1) ? tb.trunc.rank(j - 1) : 0;
      IntMat m = IntMat::Zero(rows, cols);
      if (ra > 0 && rb > 0) m.block(0, 0, rb, ra) = inc.at(j - 1);
      Index rx = x.in_range(j) ? x.rank(j) : 0;
      if (rx > 0) m.block(rb, ra, rx, rx) = ident(rx);
      if (!m.isZero()) ucomps[j] = std::move(m);
    }
    trans.push_back(chain_map(pk1, pk, std::move(ucomps)));
  }
  ComplexTower tower = periodic_complex_tower(std::move(lvls), std::move(trans), 1);
  ComplexTower cst = constant_complex_tower(x, w - 1);
  ChainProMap proj = chain_pro_map(identity_reindex(), std::move(cst), tower, std::move(projs), 1);
  return {std::move(tower), std::move(proj)};
}

}  // namespace sst

