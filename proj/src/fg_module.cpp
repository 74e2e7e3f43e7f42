#include "sst/fg_module.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

namespace sst {

namespace {

IntMat blockdiag(const IntMat& a, const IntMat& b) {
  IntMat r = IntMat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  r.topLeftCorner(a.rows(), a.cols()) = a;
  r.bottomRightCorner(b.rows(), b.cols()) = b;
  return r;
}

IntVec vec_of(const IntMat& m) {
  IntVec v(m.size());
  Index k = 0;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) v[k++] = m(i, j);
  return v;
}

IntMat unvec(const IntVec& v, Index rows, Index cols) {
  IntMat m(rows, cols);
  Index k = 0;
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = v[k++];
  return m;
}

/* flat (weight, index) list of the generators of a module */
std::vector<std::pair<int, Index>> flat_gens(const FGModule& m) {
  std::vector<std::pair<int, Index>> out;
  for (const auto& [w, fs] : m.factors())
    for (Index i = 0; i < static_cast<Index>(fs.size()); ++i) out.emplace_back(w, i);
  return out;
}

}  // namespace

std::vector<Int> canonical_chain(const BaseRing& base, std::vector<Int> factors) {
  std::vector<Int> tors;
  Index frees = 0;
  for (Int f : factors) {
    Int n = base.normalize_factor(f);
    if (n == 1) continue;
    if (n == 0)
      ++frees;
    else
      tors.push_back(n);
  }
  for (int guard = 0;; ++guard) {
    if (guard > 4096) throw CalcError("factor chain did not settle");
    std::sort(tors.begin(), tors.end());
    bool changed = false;
    for (size_t i = 0; i < tors.size() && !changed; ++i)
      for (size_t j = i + 1; j < tors.size() && !changed; ++j)
        if (tors[j] % tors[i] != 0) {
          Int g = gcd_nonneg(tors[i], tors[j]);
          Int l = lcm_ck(tors[i], tors[j]);
          tors[i] = base.normalize_factor(g);
          tors[j] = base.normalize_factor(l);
          changed = true;
        }
    if (!changed) break;
    tors.erase(std::remove(tors.begin(), tors.end(), Int{1}), tors.end());
  }
  tors.insert(tors.end(), frees, Int{0});
  return tors;
}

FGModule FGModule::free_module(BaseRing base, const std::vector<int>& gen_weights) {
  FGModule m(base);
  Int unit = base.kind() == RingKind::ModM ? base.modulus() : Int{0};
  for (int w : gen_weights) m.factors_[w].push_back(unit);
  for (auto& [w, fs] : m.factors_) fs = canonical_chain(base, fs);
  return m;
}

FGModule FGModule::from_factors(BaseRing base, int weight, std::vector<Int> factors) {
  FGModule m(base);
  auto fs = canonical_chain(base, std::move(factors));
  if (!fs.empty()) m.factors_[weight] = std::move(fs);
  return m;
}

std::vector<Int> FGModule::factors_at(int w) const {
  auto it = factors_.find(w);
  return it == factors_.end() ? std::vector<Int>{} : it->second;
}

Index FGModule::rank_at(int w) const {
  auto it = factors_.find(w);
  return it == factors_.end() ? 0 : static_cast<Index>(it->second.size());
}

Index FGModule::free_rank_at(int w) const {
  auto it = factors_.find(w);
  if (it == factors_.end()) return 0;
  return std::count(it->second.begin(), it->second.end(), Int{0});
}

std::vector<int> FGModule::weights() const {
  std::vector<int> ws;
  for (const auto& [w, fs] : factors_) ws.push_back(w);
  return ws;
}

IntMat FGModule::rel_lattice(int w) const {
  auto fs = factors_at(w);
  Index g = static_cast<Index>(fs.size());
  IntMat rel = IntMat::Zero(g, g);
  Index c = 0;
  for (Index i = 0; i < g; ++i)
    if (fs[i] != 0) rel(i, c++) = fs[i];
  return rel.leftCols(c);
}

FGModule FGModule::direct_sum(const FGModule& o) const {
  if (base_ != o.base_) throw InputError("direct sum over different base rings");
  FGModule m(base_);
  m.factors_ = factors_;
  for (const auto& [w, fs] : o.factors_) {
    auto& dst = m.factors_[w];
    dst.insert(dst.end(), fs.begin(), fs.end());
  }
  for (auto& [w, fs] : m.factors_) fs = canonical_chain(base_, fs);
  return m;
}

void FGModule::set_factors(int w, std::vector<Int> canonical) {
  if (!canonical.empty()) factors_[w] = std::move(canonical);
}

std::string FGModule::str() const {
  if (factors_.empty()) return "0";
  std::string out;
  for (const auto& [w, fs] : factors_) {
    if (!out.empty()) out += "; ";
    std::string part;
    for (Int f : fs) {
      if (!part.empty()) part += "+";
      part += f == 0 ? base_.str() : fmt::format("Z/{}", f);
    }
    out += fmt::format("w={}: {}", w, part);
  }
  return out;
}

/* ---- presentations ---- */

Presented present_module(const BaseRing& base, const PresentationParts& parts) {
  Presented out;
  out.mod = FGModule(base);
  for (const auto& [w, part] : parts) {
    Index g = part.first;
    IntMat rels = part.second;
    if (rels.rows() != g) throw InputError("relation rows do not match generator count");
    if (g == 0) continue;
    if (base.kind() == RingKind::Localized) rels = saturate_lattice(rels, base.inverted_primes());
    if (base.kind() == RingKind::ModM)
      rels = hcat(rels, (base.modulus() * IntMat::Identity(g, g)).eval());
    SmithForm sf = smith_form(rels);
    std::vector<Int> diag(g, 0);
    for (Index i = 0; i < sf.rank; ++i) diag[i] = sf.d(i, i);
    auto uinv = solve_exact(sf.u, IntMat::Identity(g, g));
    if (!uinv) throw CalcError("row transform not invertible");
    std::vector<Index> kept;
    std::vector<Int> fs;
    for (Index i = 0; i < g; ++i) {
      Int f = base.normalize_factor(diag[i]);
      if (f == 1) continue;
      kept.push_back(i);
      fs.push_back(f);
    }
    if (kept.empty()) continue;
    Index k = static_cast<Index>(kept.size());
    IntMat proj(k, g), lift(g, k);
    for (Index i = 0; i < k; ++i) {
      proj.row(i) = sf.u.row(kept[i]);
      lift.col(i) = uinv->col(kept[i]);
    }
    out.mod.set_factors(w, fs);
    out.proj[w] = proj;
    out.lift[w] = lift;
  }
  return out;
}

Presented module_from_presentation(const BaseRing& base, const IntMat& relation_rows,
                                   const std::vector<int>& col_weights) {
  if (relation_rows.cols() != static_cast<Index>(col_weights.size()))
    throw InputError(fmt::format("presentation has {} columns but {} weights",
                                 relation_rows.cols(), col_weights.size()));
  /* split the generators by weight, remembering their original columns */
  std::map<int, std::vector<Index>> cols;
  for (Index j = 0; j < relation_rows.cols(); ++j) cols[col_weights[j]].push_back(j);
  PresentationParts parts;
  std::vector<bool> used(relation_rows.rows(), false);
  for (const auto& [w, js] : cols) {
    Index g = static_cast<Index>(js.size());
    std::vector<IntVec> rel_cols;
    for (Index r = 0; r < relation_rows.rows(); ++r) {
      IntVec rc(g);
      bool nonzero = false;
      for (Index t = 0; t < g; ++t) {
        rc[t] = relation_rows(r, js[t]);
        nonzero = nonzero || rc[t] != 0;
      }
      if (!nonzero) continue;
      if (used[r]) throw InputError(fmt::format("relation row {} mixes weights", r));
      used[r] = true;
      rel_cols.push_back(rc);
    }
    IntMat rels(g, static_cast<Index>(rel_cols.size()));
    for (Index c = 0; c < rels.cols(); ++c) rels.col(c) = rel_cols[c];
    parts[w] = {g, rels};
  }
  return present_module(base, parts);
}

/* ---- maps ---- */

IntMat ModuleMap::at(int w) const {
  auto it = comps.find(w);
  if (it != comps.end()) return it->second;
  return IntMat::Zero(tgt.rank_at(w), src.rank_at(w));
}

bool ModuleMap::operator==(const ModuleMap& o) const {
  if (src != o.src || tgt != o.tgt || comps.size() != o.comps.size()) return false;
  for (const auto& [w, m] : comps) {
    auto it = o.comps.find(w);
    if (it == o.comps.end() || it->second.rows() != m.rows() || it->second.cols() != m.cols() ||
        !it->second.cwiseEqual(m).all())
      return false;
  }
  return true;
}

ModuleMap module_map(FGModule src, FGModule tgt, std::map<int, IntMat> comps) {
  ModuleMap f{std::move(src), std::move(tgt), {}};
  if (f.src.base() != f.tgt.base()) throw InputError("map between different base rings");
  for (const auto& [w, mat] : comps) {
    Index n = f.tgt.rank_at(w), m = f.src.rank_at(w);
    if (mat.rows() != n || mat.cols() != m)
      throw InputError(fmt::format("map block at weight {} is {}x{}, expected {}x{}", w,
                                   mat.rows(), mat.cols(), n, m));
    if (n == 0 || m == 0) continue;
    auto ft = f.tgt.factors_at(w);
    auto fs = f.src.factors_at(w);
    IntMat red(n, m);
    for (Index j = 0; j < m; ++j)
      for (Index i = 0; i < n; ++i) {
        if (fs[j] != 0) {
          Int t = mul_ck(fs[j], mat(i, j));
          bool ok = ft[i] == 0 ? t == 0 : t % ft[i] == 0;
          if (!ok)
            throw InputError(fmt::format(
                "entry ({},{}) at weight {} does not define a map of the given modules", i, j,
                w));
        }
        red(i, j) = ft[i] == 0 ? mat(i, j) : mod_reduce(mat(i, j), ft[i]);
      }
    if (!red.isZero()) f.comps[w] = std::move(red);
  }
  return f;
}

ModuleMap zero_map(FGModule src, FGModule tgt) {
  return module_map(std::move(src), std::move(tgt), {});
}

ModuleMap identity_map(const FGModule& m) { return scalar_map(m, 1); }

ModuleMap scalar_map(const FGModule& m, Int a) {
  std::map<int, IntMat> comps;
  for (int w : m.weights()) {
    Index g = m.rank_at(w);
    comps[w] = (a * IntMat::Identity(g, g)).eval();
  }
  return module_map(m, m, std::move(comps));
}

ModuleMap compose(const ModuleMap& f, const ModuleMap& g) {
  if (g.tgt != f.src) throw InputError("composition mismatch");
  std::map<int, IntMat> comps;
  for (const auto& [w, gm] : g.comps) {
    auto it = f.comps.find(w);
    if (it == f.comps.end()) continue;
    comps[w] = mul_mat(it->second, gm);
  }
  return module_map(g.src, f.tgt, std::move(comps));
}

ModuleMap add_maps(const ModuleMap& f, const ModuleMap& g) {
  if (f.src != g.src || f.tgt != g.tgt) throw InputError("sum of maps with different ends");
  std::map<int, IntMat> comps;
  for (const auto& [w, m] : f.comps) comps[w] = m;
  for (const auto& [w, m] : g.comps) {
    auto it = comps.find(w);
    if (it == comps.end())
      comps[w] = m;
    else
      for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i) it->second(i, j) = add_ck(it->second(i, j), m(i, j));
  }
  return module_map(f.src, f.tgt, std::move(comps));
}

ModuleMap negate_map(const ModuleMap& f) {
  std::map<int, IntMat> comps;
  for (const auto& [w, m] : f.comps) comps[w] = -m;
  return module_map(f.src, f.tgt, std::move(comps));
}

bool is_iso(const ModuleMap& f) {
  return kernel(f).mod.is_zero() && cokernel(f).mod.is_zero();
}

/* ---- submodules ---- */

namespace {

IntMat canon_sub_lattice(const BaseRing& base, const IntMat& gens) {
  IntMat l = gens;
  if (base.kind() == RingKind::Localized) l = saturate_lattice(l, base.inverted_primes());
  return hnf_cols(l);
}

void check_ambient(const Submodule& s, const FGModule& m, const char* what) {
  if (s.of != m) throw CalcError(fmt::format("submodule ambient mismatch in {}", what));
}

}  // namespace

Submodule zero_submodule(const FGModule& m) {
  Submodule s{m, {}};
  for (int w : m.weights()) s.lat[w] = canon_sub_lattice(m.base(), m.rel_lattice(w));
  return s;
}

Submodule full_submodule(const FGModule& m) {
  Submodule s{m, {}};
  for (int w : m.weights()) s.lat[w] = IntMat::Identity(m.rank_at(w), m.rank_at(w));
  return s;
}

Submodule span_submodule(const FGModule& m, const std::map<int, IntMat>& gens) {
  Submodule s = zero_submodule(m);
  for (const auto& [w, g] : gens) {
    if (g.rows() != m.rank_at(w))
      throw InputError(fmt::format("span generators at weight {} have {} rows, expected {}", w,
                                   g.rows(), m.rank_at(w)));
    if (g.rows() == 0) continue;
    s.lat[w] = canon_sub_lattice(m.base(), hcat(s.lat[w], g));
  }
  return s;
}

Submodule sub_sum(const Submodule& a, const Submodule& b) {
  check_ambient(b, a.of, "sub_sum");
  Submodule s{a.of, {}};
  for (const auto& [w, l] : a.lat) s.lat[w] = hnf_cols(lattice_sum(l, b.lat.at(w)));
  return s;
}

Submodule sub_intersect(const Submodule& a, const Submodule& b) {
  check_ambient(b, a.of, "sub_intersect");
  Submodule s{a.of, {}};
  for (const auto& [w, l] : a.lat) s.lat[w] = hnf_cols(lattice_intersect(l, b.lat.at(w)));
  return s;
}

bool sub_subset(const Submodule& a, const Submodule& b) {
  check_ambient(b, a.of, "sub_subset");
  for (const auto& [w, l] : a.lat)
    if (!lattice_subset(l, b.lat.at(w))) return false;
  return true;
}

bool sub_eq(const Submodule& a, const Submodule& b) {
  check_ambient(b, a.of, "sub_eq");
  for (const auto& [w, l] : a.lat)
    if (!lattice_eq(l, b.lat.at(w))) return false;
  return true;
}

bool sub_is_zero(const Submodule& a) { return sub_eq(a, zero_submodule(a.of)); }

Submodule image_under(const ModuleMap& f, const Submodule& s) {
  check_ambient(s, f.src, "image_under");
  Submodule out = zero_submodule(f.tgt);
  for (const auto& [w, l] : s.lat) {
    if (f.tgt.rank_at(w) == 0) continue;
    out.lat[w] = canon_sub_lattice(f.tgt.base(), hcat(out.lat[w], mul_mat(f.at(w), l)));
  }
  return out;
}

Submodule preimage_under(const ModuleMap& f, const Submodule& t) {
  check_ambient(t, f.tgt, "preimage_under");
  Submodule out{f.src, {}};
  for (int w : f.src.weights()) {
    if (f.tgt.rank_at(w) == 0) {
      out.lat[w] = IntMat::Identity(f.src.rank_at(w), f.src.rank_at(w));
      continue;
    }
    out.lat[w] = hnf_cols(preimage_lattice(f.at(w), t.lat.at(w)));
  }
  return out;
}

Submodule kernel_sub(const ModuleMap& f) { return preimage_under(f, zero_submodule(f.tgt)); }

Submodule image_sub(const ModuleMap& f) { return image_under(f, full_submodule(f.src)); }

Submodule torsion_sub(const FGModule& m) {
  if (m.base().kind() == RingKind::ModM) return full_submodule(m);
  Submodule s{m, {}};
  for (int w : m.weights()) {
    Int c = 1;
    for (Int f : m.factors_at(w))
      if (f != 0) c = mul_ck(c, f);
    Index g = m.rank_at(w);
    s.lat[w] = hnf_cols(preimage_lattice((c * IntMat::Identity(g, g)).eval(), m.rel_lattice(w)));
  }
  return s;
}

/* ---- subquotients ---- */

SubquotientPresentation present_subquotient(const Submodule& num, const Submodule& den) {
  check_ambient(den, num.of, "present_subquotient");
  if (!sub_subset(den, num)) throw CalcError("subquotient denominator not inside numerator");
  SubquotientPresentation sq;
  PresentationParts parts;
  std::map<int, IntMat> gens;
  for (const auto& [w, n] : num.lat) {
    auto rel = solve_exact(n, den.lat.at(w));
    if (!rel) throw CalcError("subquotient denominator escaped numerator basis");
    parts[w] = {n.cols(), *rel};
    gens[w] = n;
  }
  Presented pres = present_module(num.of.base(), parts);
  sq.mod = pres.mod;
  sq.proj = std::move(pres.proj);
  sq.lift = std::move(pres.lift);
  sq.gens = std::move(gens);
  return sq;
}

IntVec subq_class(const SubquotientPresentation& sq, int w, const IntVec& ambient) {
  if (sq.mod.rank_at(w) == 0) return IntVec(0);
  auto c = solve_exact(sq.gens.at(w), ambient);
  if (!c) throw CalcError("vector not in subquotient numerator");
  IntVec coords = mul_mat(sq.proj.at(w), *c).col(0);
  auto fs = sq.mod.factors_at(w);
  for (Index i = 0; i < coords.size(); ++i)
    if (fs[i] != 0) coords[i] = mod_reduce(coords[i], fs[i]);
  return coords;
}

IntVec subq_rep(const SubquotientPresentation& sq, int w, const IntVec& coords) {
  if (sq.mod.rank_at(w) == 0) return IntVec::Zero(sq.gens.at(w).rows());
  return mul_mat(sq.gens.at(w), mul_mat(sq.lift.at(w), coords).col(0).eval()).col(0);
}

/* ---- kernel, image, cokernel ---- */

namespace {

/* inclusion of a presented subquotient into its ambient module */
ModuleMap subq_inclusion(const SubquotientPresentation& sq, const FGModule& ambient) {
  std::map<int, IntMat> comps;
  for (int w : sq.mod.weights()) comps[w] = mul_mat(sq.gens.at(w), sq.lift.at(w));
  return module_map(sq.mod, ambient, std::move(comps));
}

}  // namespace

ModuleWithMap kernel(const ModuleMap& f) {
  auto sq = present_subquotient(kernel_sub(f), zero_submodule(f.src));
  ModuleMap incl = subq_inclusion(sq, f.src);
  if (!compose(f, incl).is_zero()) throw CalcError("kernel composite is not zero");
  return {sq.mod, incl};
}

ModuleWithMap image(const ModuleMap& f) {
  auto sq = present_subquotient(image_sub(f), zero_submodule(f.tgt));
  ModuleMap incl = subq_inclusion(sq, f.tgt);
  /* the corestriction of f through its image must recover f */
  std::map<int, IntMat> cor;
  for (const auto& [w, m] : f.comps) {
    Index k = sq.mod.rank_at(w);
    IntMat c(k, m.cols());
    for (Index j = 0; j < m.cols(); ++j) c.col(j) = subq_class(sq, w, m.col(j));
    cor[w] = c;
  }
  ModuleMap cores = module_map(f.src, sq.mod, std::move(cor));
  if (!(compose(incl, cores) == module_map(f.src, f.tgt, f.comps)))
    throw CalcError("image factorization failed");
  return {sq.mod, incl};
}

ModuleWithMap cokernel(const ModuleMap& f) {
  auto sq = present_subquotient(full_submodule(f.tgt), image_sub(f));
  std::map<int, IntMat> comps;
  for (int w : f.tgt.weights()) {
    Index g = f.tgt.rank_at(w);
    Index k = sq.mod.rank_at(w);
    if (k == 0) continue;
    IntMat p(k, g);
    for (Index j = 0; j < g; ++j) p.col(j) = subq_class(sq, w, IntVec::Unit(g, j));
    comps[w] = p;
  }
  ModuleMap proj = module_map(f.tgt, sq.mod, std::move(comps));
  if (!compose(proj, f).is_zero()) throw CalcError("cokernel composite is not zero");
  return {sq.mod, proj};
}

/* ---- direct sums with structure maps ---- */

SumModule dsum(const FGModule& a, const FGModule& b) {
  if (a.base() != b.base()) throw InputError("direct sum over different base rings");
  PresentationParts parts;
  std::set<int> ws;
  for (int w : a.weights()) ws.insert(w);
  for (int w : b.weights()) ws.insert(w);
  for (int w : ws)
    parts[w] = {a.rank_at(w) + b.rank_at(w), blockdiag(a.rel_lattice(w), b.rel_lattice(w))};
  Presented pres = present_module(a.base(), parts);
  SumModule s;
  s.mod = pres.mod;
  std::map<int, IntMat> ia, ib, pa, pb;
  for (int w : ws) {
    Index ga = a.rank_at(w), gb = b.rank_at(w), k = pres.mod.rank_at(w);
    if (k == 0) continue;
    const IntMat& proj = pres.proj.at(w);
    const IntMat& lift = pres.lift.at(w);
    if (ga > 0) {
      ia[w] = proj.leftCols(ga);
      pa[w] = lift.topRows(ga);
    }
    if (gb > 0) {
      ib[w] = proj.rightCols(gb);
      pb[w] = lift.bottomRows(gb);
    }
  }
  s.in_a = module_map(a, s.mod, std::move(ia));
  s.in_b = module_map(b, s.mod, std::move(ib));
  s.pr_a = module_map(s.mod, a, std::move(pa));
  s.pr_b = module_map(s.mod, b, std::move(pb));
  if (!(compose(s.pr_a, s.in_a) == identity_map(a)) ||
      !(compose(s.pr_b, s.in_b) == identity_map(b)) || !compose(s.pr_a, s.in_b).is_zero() ||
      !compose(s.pr_b, s.in_a).is_zero())
    throw CalcError("direct sum structure maps failed");
  return s;
}

/* ---- tensor products ---- */

TensorModule tensor_modules(const FGModule& a, const FGModule& b) {
  if (a.base() != b.base()) throw InputError("tensor over different base rings");
  auto ga = flat_gens(a), gb = flat_gens(b);
  /* collect generator pairs per total weight, left factor outer */
  std::map<int, std::vector<std::pair<Index, Index>>> pairs;
  for (Index i = 0; i < static_cast<Index>(ga.size()); ++i)
    for (Index j = 0; j < static_cast<Index>(gb.size()); ++j)
      pairs[ga[i].first + gb[j].first].emplace_back(i, j);
  PresentationParts parts;
  for (const auto& [w, ps] : pairs) {
    Index g = static_cast<Index>(ps.size());
    std::vector<std::pair<Index, Int>> rel_entries;
    for (Index t = 0; t < g; ++t) {
      Int da = a.factors_at(ga[ps[t].first].first)[ga[ps[t].first].second];
      Int db = b.factors_at(gb[ps[t].second].first)[gb[ps[t].second].second];
      if (da != 0) rel_entries.emplace_back(t, da);
      if (db != 0) rel_entries.emplace_back(t, db);
    }
    IntMat rels = IntMat::Zero(g, static_cast<Index>(rel_entries.size()));
    for (Index c = 0; c < rels.cols(); ++c) rels(rel_entries[c].first, c) = rel_entries[c].second;
    parts[w] = {g, rels};
  }
  Presented pres = present_module(a.base(), parts);
  TensorModule t;
  t.mod = pres.mod;
  t.pair_proj = std::move(pres.proj);
  t.pair_lift = std::move(pres.lift);
  return t;
}

ModuleMap tensor_maps(const ModuleMap& f, const ModuleMap& g, const TensorModule& src,
                      const TensorModule& tgt) {
  auto ga = flat_gens(f.src), gb = flat_gens(g.src);
  auto ha = flat_gens(f.tgt), hb = flat_gens(g.tgt);
  std::map<int, std::vector<std::pair<Index, Index>>> spairs, tpairs;
  for (Index i = 0; i < static_cast<Index>(ga.size()); ++i)
    for (Index j = 0; j < static_cast<Index>(gb.size()); ++j)
      spairs[ga[i].first + gb[j].first].emplace_back(i, j);
  for (Index i = 0; i < static_cast<Index>(ha.size()); ++i)
    for (Index j = 0; j < static_cast<Index>(hb.size()); ++j)
      tpairs[ha[i].first + hb[j].first].emplace_back(i, j);
  std::map<int, IntMat> comps;
  for (const auto& [w, sp] : spairs) {
    if (src.mod.rank_at(w) == 0 || tgt.mod.rank_at(w) == 0) continue;
    auto it = tpairs.find(w);
    if (it == tpairs.end()) continue;
    const auto& tp = it->second;
    IntMat m = IntMat::Zero(static_cast<Index>(tp.size()), static_cast<Index>(sp.size()));
    for (Index c = 0; c < m.cols(); ++c) {
      auto [ia, jb] = sp[c];
      int wa = ga[ia].first, wb = gb[jb].first;
      IntMat fw = f.at(wa), gw = g.at(wb);
      for (Index r = 0; r < m.rows(); ++r) {
        auto [ka, lb] = tp[r];
        if (ha[ka].first != wa || hb[lb].first != wb) continue;
        m(r, c) = mul_ck(fw(ha[ka].second, ga[ia].second), gw(hb[lb].second, gb[jb].second));
      }
    }
    comps[w] = mul_mat(tgt.pair_proj.at(w), mul_mat(m, src.pair_lift.at(w)));
  }
  return module_map(src.mod, tgt.mod, std::move(comps));
}

/* ---- solving for maps ---- */

IntMat kron(const IntMat& a, const IntMat& b) {
  IntMat r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      for (Index k = 0; k < b.rows(); ++k)
        for (Index l = 0; l < b.cols(); ++l)
          r(i * b.rows() + k, j * b.cols() + l) = mul_ck(a(i, j), b(k, l));
  return r;
}

std::optional<ModuleMap> solve_module_map(const MapConstraints& c) {
  for (const auto& [l, r] : c.post)
    if (l.src != c.tgt || r.src != c.src || l.tgt != r.tgt)
      throw InputError("post-composition constraint has wrong ends");
  for (const auto& [s, t] : c.pre)
    if (s.tgt != c.src || t.tgt != c.tgt || s.src != t.src)
      throw InputError("pre-composition constraint has wrong ends");

  std::set<int> ws;
  for (int w : c.src.weights()) ws.insert(w);
  for (int w : c.tgt.weights()) ws.insert(w);
  std::map<int, IntMat> comps;
  for (int w : ws) {
    Index m = c.src.rank_at(w), n = c.tgt.rank_at(w);
    if (m == 0 || n == 0) {
      /* nothing to solve, but the constraints must already hold with W = 0 */
      for (const auto& [l, r] : c.post)
        if (r.comps.count(w)) return std::nullopt;
      for (const auto& [s, t] : c.pre)
        if (t.comps.count(w)) return std::nullopt;
      continue;
    }
    auto fs = c.src.factors_at(w);
    IntMat rel_tgt = c.tgt.rel_lattice(w);

    std::vector<IntMat> arows, lrows;
    std::vector<IntVec> brows;
    auto push = [&](const IntMat& a, const IntVec& b, const IntMat& l) {
      arows.push_back(a);
      brows.push_back(b);
      lrows.push_back(l);
    };

    for (Index j = 0; j < m; ++j) {
      if (fs[j] == 0) continue;
      IntMat a = IntMat::Zero(n, n * m);
      a.middleCols(n * j, n) = fs[j] * IntMat::Identity(n, n);
      push(a, IntVec::Zero(n), rel_tgt);
    }
    for (const auto& [l, r] : c.post) {
      Index p = l.tgt.rank_at(w);
      if (p == 0) continue;
      IntMat lw = l.at(w);
      IntMat latp = l.tgt.rel_lattice(w);
      IntMat lat = IntMat::Zero(m * p, m * latp.cols());
      for (Index j = 0; j < m; ++j)
        lat.block(j * p, j * latp.cols(), p, latp.cols()) = latp;
      push(kron(IntMat::Identity(m, m), lw), vec_of(r.at(w)), lat);
    }
    for (const auto& [s, t] : c.pre) {
      Index q = s.src.rank_at(w);
      if (q == 0) continue;
      IntMat sw = s.at(w);
      IntMat lat = IntMat::Zero(q * n, q * rel_tgt.cols());
      for (Index j = 0; j < q; ++j)
        lat.block(j * n, j * rel_tgt.cols(), n, rel_tgt.cols()) = rel_tgt;
      push(kron(sw.transpose().eval(), IntMat::Identity(n, n)), vec_of(t.at(w)), lat);
    }

    if (arows.empty()) continue;  // unconstrained weight: take zero
    Index rows = 0, lcols = 0;
    for (size_t i = 0; i < arows.size(); ++i) {
      rows += arows[i].rows();
      lcols += lrows[i].cols();
    }
    IntMat a = IntMat::Zero(rows, n * m), lat = IntMat::Zero(rows, lcols);
    IntVec b(rows);
    Index r0 = 0, l0 = 0;
    for (size_t i = 0; i < arows.size(); ++i) {
      a.middleRows(r0, arows[i].rows()) = arows[i];
      b.segment(r0, arows[i].rows()) = brows[i];
      lat.block(r0, l0, lrows[i].rows(), lrows[i].cols()) = lrows[i];
      r0 += arows[i].rows();
      l0 += lrows[i].cols();
    }
    auto x = solve_mod_lattice(a, b, lat);
    if (!x) return std::nullopt;
    IntMat wmat = unvec(x->col(0), n, m);
    if (!wmat.isZero()) comps[w] = wmat;
  }
  return module_map(c.src, c.tgt, std::move(comps));
}

}  // namespace sst
