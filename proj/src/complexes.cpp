#include "sst/complexes.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <set>
#include <utility>

#include "sst/smith.hpp"

namespace sst {

namespace {

int parity_sign(int i) { return i % 2 == 0 ? 1 : -1; }

IntMat canon_mat(const BaseRing& base, IntMat m) {
  base.reduce_entries(m);
  return m;
}

std::vector<Index> weight_cols(const FreeComplex& x, int k, int w) {
  std::vector<Index> out;
  const auto ws = x.weights_at(k);
  for (Index i = 0; i < static_cast<Index>(ws.size()); ++i)
    if (ws[i] == w) out.push_back(i);
  return out;
}

IntMat submat(const IntMat& m, const std::vector<Index>& rows, const std::vector<Index>& cols) {
  IntMat out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (Index i = 0; i < out.rows(); ++i)
    for (Index j = 0; j < out.cols(); ++j) out(i, j) = m(rows[i], cols[j]);
  return out;
}

bool mat_eq(const IntMat& a, const IntMat& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

IntMat drop_row(const IntMat& m, Index r) {
  IntMat out(m.rows() - 1, m.cols());
  out.topRows(r) = m.topRows(r);
  out.bottomRows(m.rows() - 1 - r) = m.bottomRows(m.rows() - 1 - r);
  return out;
}

IntMat drop_col(const IntMat& m, Index c) {
  IntMat out(m.rows(), m.cols() - 1);
  out.leftCols(c) = m.leftCols(c);
  out.rightCols(m.cols() - 1 - c) = m.rightCols(m.cols() - 1 - c);
  return out;
}

/* flat generator order of a module: weights ascending, factors in order */
struct Flat {
  std::vector<std::pair<int, Int>> gens;
  std::map<int, Index> start;
};

Flat flatten(const FGModule& m) {
  Flat f;
  Index at = 0;
  for (const auto& [w, fs] : m.factors()) {
    f.start[w] = at;
    for (Int d : fs) f.gens.emplace_back(w, d);
    at += static_cast<Index>(fs.size());
  }
  return f;
}

/* integer matrix of a module map in flat generator coordinates */
IntMat full_matrix(const ModuleMap& f) {
  Flat fs = flatten(f.src), ft = flatten(f.tgt);
  IntMat m = IntMat::Zero(static_cast<Index>(ft.gens.size()), static_cast<Index>(fs.gens.size()));
  for (const auto& [w, block] : f.comps)
    m.block(ft.start.at(w), fs.start.at(w), block.rows(), block.cols()) = block;
  return m;
}

FreeComplex trim_ends(FreeComplex x) {
  while (!x.wts.empty() && x.wts.front().empty()) {
    x.wts.erase(x.wts.begin());
    if (!x.d.empty()) x.d.erase(x.d.begin());
    ++x.lo;
  }
  while (!x.wts.empty() && x.wts.back().empty()) {
    x.wts.pop_back();
    if (!x.d.empty()) x.d.pop_back();
  }
  if (x.wts.empty()) {
    x.lo = 0;
    x.d.clear();
  }
  return x;
}

}  // namespace

IntMat FreeComplex::diff(int k) const {
  int i = k - lo - 1;
  if (i < 0 || i >= static_cast<int>(d.size())) return IntMat::Zero(rank(k - 1), rank(k));
  return d[i];
}

std::vector<int> FreeComplex::weight_set() const {
  std::set<int> ws;
  for (const auto& lvl : wts) ws.insert(lvl.begin(), lvl.end());
  return {ws.begin(), ws.end()};
}

bool FreeComplex::operator==(const FreeComplex& o) const {
  if (base != o.base || lo != o.lo || wts != o.wts) return false;
  for (size_t i = 0; i < d.size(); ++i)
    if (!mat_eq(d[i], o.d[i])) return false;
  return true;
}

FreeComplex free_complex(BaseRing base, int lo, std::vector<std::vector<int>> wts,
                         std::vector<IntMat> d) {
  size_t want = wts.empty() ? 0 : wts.size() - 1;
  if (d.size() != want)
    throw InputError(
        fmt::format("complex with {} levels needs {} differentials, got {}", wts.size(), want, d.size()));
  FreeComplex x{std::move(base), lo, std::move(wts), std::move(d)};
  for (size_t i = 0; i < x.d.size(); ++i) {
    int src = x.lo + static_cast<int>(i) + 1;
    const auto& tw = x.wts[i];
    const auto& sw = x.wts[i + 1];
    if (x.d[i].rows() != static_cast<Index>(tw.size()) ||
        x.d[i].cols() != static_cast<Index>(sw.size()))
      throw InputError(fmt::format("differential out of level {} has shape {}x{}, expected {}x{}",
                                   src, x.d[i].rows(), x.d[i].cols(), tw.size(), sw.size()));
    x.d[i] = canon_mat(x.base, x.d[i]);
    for (Index r = 0; r < x.d[i].rows(); ++r)
      for (Index c = 0; c < x.d[i].cols(); ++c)
        if (x.d[i](r, c) != 0 && tw[r] != sw[c])
          throw InputError(fmt::format(
              "differential entry ({}, {}) out of level {} does not preserve weight", r, c, src));
  }
  for (size_t i = 0; i + 1 < x.d.size(); ++i) {
    IntMat sq = canon_mat(x.base, mul_mat(x.d[i], x.d[i + 1]));
    if (!sq.isZero())
      throw InputError(
          fmt::format("differentials do not compose to zero at level {}", x.lo + static_cast<int>(i) + 2));
  }
  return x;
}

FreeComplex zero_complex(BaseRing base) { return {std::move(base), 0, {}, {}}; }

FreeComplex unit_complex(BaseRing base) { return {std::move(base), 0, {{0}}, {}}; }

FreeComplex sphere_complex(BaseRing base, int k, int w) { return {std::move(base), k, {{w}}, {}}; }

FreeComplex shift_complex(const FreeComplex& x, int p, int w) {
  FreeComplex y = x;
  y.lo += p;
  for (auto& lvl : y.wts)
    for (int& v : lvl) v += w;
  if (p % 2 != 0)
    for (auto& m : y.d) m = canon_mat(y.base, (-m).eval());
  return y;
}

IntMat ChainMapF::at(int k) const {
  auto it = comps.find(k);
  if (it != comps.end()) return it->second;
  return IntMat::Zero(tgt.rank(k), src.rank(k));
}

bool ChainMapF::operator==(const ChainMapF& o) const {
  if (!(src == o.src) || !(tgt == o.tgt)) return false;
  if (comps.size() != o.comps.size()) return false;
  for (const auto& [k, m] : comps) {
    auto it = o.comps.find(k);
    if (it == o.comps.end() || !mat_eq(m, it->second)) return false;
  }
  return true;
}

ChainMapF chain_map(FreeComplex src, FreeComplex tgt, std::map<int, IntMat> comps) {
  if (src.base != tgt.base) throw InputError("chain map between different base rings");
  ChainMapF f{std::move(src), std::move(tgt), {}};
  for (auto& [k, m] : comps) {
    if (m.rows() != f.tgt.rank(k) || m.cols() != f.src.rank(k))
      throw InputError(fmt::format("chain map component at level {} has shape {}x{}, expected {}x{}",
                                   k, m.rows(), m.cols(), f.tgt.rank(k), f.src.rank(k)));
    m = canon_mat(f.src.base, m);
    if (m.isZero()) continue;
    const auto tw = f.tgt.weights_at(k);
    const auto sw = f.src.weights_at(k);
    for (Index r = 0; r < m.rows(); ++r)
      for (Index c = 0; c < m.cols(); ++c)
        if (m(r, c) != 0 && tw[r] != sw[c])
          throw InputError(fmt::format(
              "chain map entry ({}, {}) at level {} does not preserve weight", r, c, k));
    f.comps[k] = m;
  }
  int klo = std::min(f.src.lo, f.tgt.lo);
  int khi = std::max(f.src.hi(), f.tgt.hi()) + 1;
  for (int k = klo; k <= khi; ++k) {
    IntMat a = canon_mat(f.src.base, mul_mat(f.tgt.diff(k), f.at(k)));
    IntMat b = canon_mat(f.src.base, mul_mat(f.at(k - 1), f.src.diff(k)));
    if (!mat_eq(a, b))
      throw InputError(fmt::format("chain map does not commute with the differentials at level {}", k));
  }
  return f;
}

ChainMapF zero_chain_map(FreeComplex src, FreeComplex tgt) {
  return chain_map(std::move(src), std::move(tgt), {});
}

ChainMapF id_chain_map(const FreeComplex& x) {
  std::map<int, IntMat> comps;
  for (int k = x.lo; k <= x.hi(); ++k)
    if (x.rank(k) > 0) comps[k] = ident(x.rank(k));
  return chain_map(x, x, std::move(comps));
}

ChainMapF compose_chain(const ChainMapF& f, const ChainMapF& g) {
  if (!(g.tgt == f.src)) throw InputError("chain map composition mismatch");
  std::map<int, IntMat> comps;
  for (const auto& [k, m] : g.comps) {
    if (f.src.rank(k) == 0 || f.tgt.rank(k) == 0) continue;
    comps[k] = mul_mat(f.at(k), m);
  }
  return chain_map(g.src, f.tgt, std::move(comps));
}

ChainMapF add_chain(const ChainMapF& f, const ChainMapF& g) {
  if (!(f.src == g.src) || !(f.tgt == g.tgt)) throw InputError("chain map sum mismatch");
  std::map<int, IntMat> comps;
  std::set<int> keys;
  for (const auto& [k, m] : f.comps) keys.insert(k);
  for (const auto& [k, m] : g.comps) keys.insert(k);
  for (int k : keys) {
    IntMat a = f.at(k), b = g.at(k);
    IntMat s(a.rows(), a.cols());
    for (Index i = 0; i < s.rows(); ++i)
      for (Index j = 0; j < s.cols(); ++j) s(i, j) = add_ck(a(i, j), b(i, j));
    comps[k] = s;
  }
  return chain_map(f.src, f.tgt, std::move(comps));
}

ChainMapF negate_chain(const ChainMapF& f) { return scale_chain(-1, f); }

ChainMapF scale_chain(Int n, const ChainMapF& f) {
  std::map<int, IntMat> comps;
  for (const auto& [k, m] : f.comps) {
    IntMat s = m;
    for (Index i = 0; i < s.rows(); ++i)
      for (Index j = 0; j < s.cols(); ++j) s(i, j) = mul_ck(n, m(i, j));
    comps[k] = s;
  }
  return chain_map(f.src, f.tgt, std::move(comps));
}

ChainMapF shift_chain(const ChainMapF& f, int p, int w) {
  std::map<int, IntMat> comps;
  for (const auto& [k, m] : f.comps) comps[k + p] = m;
  return chain_map(shift_complex(f.src, p, w), shift_complex(f.tgt, p, w), std::move(comps));
}

FreeComplex cone(const ChainMapF& f) {
  const FreeComplex& x = f.src;
  const FreeComplex& y = f.tgt;
  if (x.wts.empty() && y.wts.empty()) return zero_complex(x.base);
  int lo = y.wts.empty() ? x.lo + 1 : std::min(x.lo + 1, y.lo);
  int hi = y.wts.empty() ? x.hi() + 1 : std::max(x.hi() + 1, y.hi());
  if (x.wts.empty()) {
    lo = y.lo;
    hi = y.hi();
  }
  std::vector<std::vector<int>> wts;
  for (int k = lo; k <= hi; ++k) {
    std::vector<int> lvl = x.weights_at(k - 1);
    const auto yw = y.weights_at(k);
    lvl.insert(lvl.end(), yw.begin(), yw.end());
    wts.push_back(std::move(lvl));
  }
  std::vector<IntMat> d;
  for (int k = lo + 1; k <= hi; ++k) {
    Index rx1 = x.rank(k - 1), rx2 = x.rank(k - 2);
    Index ry1 = y.rank(k), ry2 = y.rank(k - 1);
    IntMat m = IntMat::Zero(rx2 + ry2, rx1 + ry1);
    IntMat dx = x.diff(k - 1);
    for (Index i = 0; i < rx2; ++i)
      for (Index j = 0; j < rx1; ++j) m(i, j) = neg_ck(dx(i, j));
    IntMat fk = f.at(k - 1);
    for (Index i = 0; i < ry2; ++i)
      for (Index j = 0; j < rx1; ++j) m(rx2 + i, j) = neg_ck(fk(i, j));
    m.block(rx2, rx1, ry2, ry1) = y.diff(k);
    d.push_back(std::move(m));
  }
  return free_complex(x.base, lo, std::move(wts), std::move(d));
}

ChainMapF cone_incl(const ChainMapF& f) {
  FreeComplex c = cone(f);
  std::map<int, IntMat> comps;
  for (int k = f.tgt.lo; k <= f.tgt.hi(); ++k) {
    Index ry = f.tgt.rank(k);
    if (ry == 0) continue;
    IntMat m = IntMat::Zero(c.rank(k), ry);
    m.block(f.src.rank(k - 1), 0, ry, ry) = ident(ry);
    comps[k] = m;
  }
  return chain_map(f.tgt, std::move(c), std::move(comps));
}

ChainMapF cone_proj(const ChainMapF& f) {
  FreeComplex c = cone(f);
  FreeComplex sx = shift_complex(f.src, 1, 0);
  std::map<int, IntMat> comps;
  for (int k = sx.lo; k <= sx.hi(); ++k) {
    Index rx = sx.rank(k);
    if (rx == 0) continue;
    IntMat m = IntMat::Zero(rx, c.rank(k));
    m.block(0, 0, rx, rx) = ident(rx);
    comps[k] = m;
  }
  return chain_map(std::move(c), std::move(sx), std::move(comps));
}

ChainMapF cone_map(const ChainMapF& f, const ChainMapF& g, const ChainMapF& alpha,
                   const ChainMapF& beta) {
  if (!(alpha.src == f.src) || !(alpha.tgt == g.src) || !(beta.src == f.tgt) ||
      !(beta.tgt == g.tgt))
    throw InputError("cone_map square has mismatched corners");
  if (!(compose_chain(beta, f) == compose_chain(g, alpha)))
    throw InputError("cone_map square does not commute");
  FreeComplex cf = cone(f);
  FreeComplex cg = cone(g);
  std::map<int, IntMat> comps;
  for (int k = cf.lo; k <= cf.hi(); ++k) {
    if (cf.rank(k) == 0 || cg.rank(k) == 0) continue;
    IntMat m = IntMat::Zero(cg.rank(k), cf.rank(k));
    IntMat a = alpha.at(k - 1);
    IntMat b = beta.at(k);
    if (a.rows() > 0 && a.cols() > 0) m.block(0, 0, a.rows(), a.cols()) = a;
    if (b.rows() > 0 && b.cols() > 0)
      m.block(g.src.rank(k - 1), f.src.rank(k - 1), b.rows(), b.cols()) = b;
    comps[k] = std::move(m);
  }
  return chain_map(std::move(cf), std::move(cg), std::move(comps));
}

FreeComplex fibre(const ChainMapF& f) { return shift_complex(cone(f), -1, 0); }

ChainMapF fibre_proj(const ChainMapF& f) {
  FreeComplex fb = fibre(f);
  std::map<int, IntMat> comps;
  for (int k = f.src.lo; k <= f.src.hi(); ++k) {
    Index rx = f.src.rank(k);
    if (rx == 0) continue;
    IntMat m = IntMat::Zero(rx, fb.rank(k));
    m.block(0, 0, rx, rx) = ident(rx);
    comps[k] = m;
  }
  return chain_map(std::move(fb), f.src, std::move(comps));
}

ChainMapF fibre_incl(const ChainMapF& f) {
  FreeComplex fb = fibre(f);
  FreeComplex sy = shift_complex(f.tgt, -1, 0);
  std::map<int, IntMat> comps;
  for (int k = sy.lo; k <= sy.hi(); ++k) {
    Index ry = sy.rank(k);
    if (ry == 0) continue;
    IntMat m = IntMat::Zero(fb.rank(k), ry);
    m.block(f.src.rank(k), 0, ry, ry) = ident(ry);
    comps[k] = m;
  }
  return chain_map(std::move(sy), std::move(fb), std::move(comps));
}

namespace {

/* block layout of one tensor level: (left level i, column offset) */
std::vector<std::pair<int, Index>> tensor_layout(const FreeComplex& x, const FreeComplex& y, int k) {
  std::vector<std::pair<int, Index>> out;
  Index at = 0;
  for (int i = x.lo; i <= x.hi(); ++i) {
    int j = k - i;
    if (j < y.lo || j > y.hi()) continue;
    out.emplace_back(i, at);
    at += x.rank(i) * y.rank(j);
  }
  return out;
}

}  // namespace

FreeComplex tensor(const FreeComplex& x, const FreeComplex& y) {
  if (x.base != y.base) throw InputError("tensor of complexes over different base rings");
  if (x.wts.empty() || y.wts.empty()) return {x.base, x.lo + y.lo, {}, {}};
  int lo = x.lo + y.lo;
  int hi = x.hi() + y.hi();
  std::vector<std::vector<int>> wts;
  for (int k = lo; k <= hi; ++k) {
    std::vector<int> lvl;
    for (const auto& [i, off] : tensor_layout(x, y, k)) {
      const auto xw = x.weights_at(i);
      const auto yw = y.weights_at(k - i);
      for (int a : xw)
        for (int b : yw) lvl.push_back(a + b);
    }
    wts.push_back(std::move(lvl));
  }
  std::vector<IntMat> d;
  for (int k = lo + 1; k <= hi; ++k) {
    auto src_l = tensor_layout(x, y, k);
    auto tgt_l = tensor_layout(x, y, k - 1);
    std::map<int, Index> tgt_off;
    for (const auto& [i, off] : tgt_l) tgt_off[i] = off;
    IntMat m = IntMat::Zero(static_cast<Index>(wts[k - 1 - lo].size()),
                            static_cast<Index>(wts[k - lo].size()));
    for (const auto& [i, off] : src_l) {
      int j = k - i;
      Index ra = x.rank(i), rb = y.rank(j);
      /* left differential, block (i, j) -> (i-1, j) */
      if (auto it = tgt_off.find(i - 1); it != tgt_off.end() && j >= y.lo && j <= y.hi()) {
        IntMat dx = x.diff(i);
        for (Index a2 = 0; a2 < x.rank(i - 1); ++a2)
          for (Index a = 0; a < ra; ++a) {
            if (dx(a2, a) == 0) continue;
            for (Index b = 0; b < rb; ++b)
              m(it->second + a2 * rb + b, off + a * rb + b) = dx(a2, a);
          }
      }
      /* right differential with the Koszul sign, block (i, j) -> (i, j-1) */
      if (auto it = tgt_off.find(i); it != tgt_off.end()) {
        IntMat dy = y.diff(j);
        Index rb2 = y.rank(j - 1);
        int s = parity_sign(i);
        for (Index b2 = 0; b2 < rb2; ++b2)
          for (Index b = 0; b < rb; ++b) {
            if (dy(b2, b) == 0) continue;
            Int v = mul_ck(s, dy(b2, b));
            for (Index a = 0; a < ra; ++a) m(it->second + a * rb2 + b2, off + a * rb + b) = v;
          }
      }
    }
    d.push_back(std::move(m));
  }
  return free_complex(x.base, lo, std::move(wts), std::move(d));
}

ChainMapF tensor_chain(const ChainMapF& f, const ChainMapF& g) {
  FreeComplex src = tensor(f.src, g.src);
  FreeComplex tgt = tensor(f.tgt, g.tgt);
  std::map<int, IntMat> comps;
  for (int k = src.lo; k <= src.hi(); ++k) {
    if (src.rank(k) == 0 || tgt.rank(k) == 0) continue;
    auto src_l = tensor_layout(f.src, g.src, k);
    auto tgt_l = tensor_layout(f.tgt, g.tgt, k);
    std::map<int, Index> tgt_off;
    for (const auto& [i, off] : tgt_l) tgt_off[i] = off;
    IntMat m = IntMat::Zero(tgt.rank(k), src.rank(k));
    for (const auto& [i, off] : src_l) {
      int j = k - i;
      auto it = tgt_off.find(i);
      if (it == tgt_off.end()) continue;
      IntMat fi = f.at(i), gj = g.at(j);
      Index rb_src = g.src.rank(j), rb_tgt = g.tgt.rank(j);
      for (Index a2 = 0; a2 < fi.rows(); ++a2)
        for (Index a = 0; a < fi.cols(); ++a) {
          if (fi(a2, a) == 0) continue;
          for (Index b2 = 0; b2 < gj.rows(); ++b2)
            for (Index b = 0; b < gj.cols(); ++b) {
              if (gj(b2, b) == 0) continue;
              m(it->second + a2 * rb_tgt + b2, off + a * rb_src + b) = mul_ck(fi(a2, a), gj(b2, b));
            }
        }
    }
    comps[k] = std::move(m);
  }
  return chain_map(std::move(src), std::move(tgt), std::move(comps));
}

ChainMapF tensor_swap(const FreeComplex& x, const FreeComplex& y) {
  FreeComplex src = tensor(x, y);
  FreeComplex tgt = tensor(y, x);
  std::map<int, IntMat> comps;
  for (int k = src.lo; k <= src.hi(); ++k) {
    if (src.rank(k) == 0) continue;
    auto src_l = tensor_layout(x, y, k);
    auto tgt_l = tensor_layout(y, x, k);
    std::map<int, Index> tgt_off;
    for (const auto& [j, off] : tgt_l) tgt_off[j] = off;
    IntMat m = IntMat::Zero(tgt.rank(k), src.rank(k));
    for (const auto& [i, off] : src_l) {
      int j = k - i;
      Index ra = x.rank(i), rb = y.rank(j);
      Index toff = tgt_off.at(j);
      Int s = (i % 2 != 0 && j % 2 != 0) ? -1 : 1;
      for (Index a = 0; a < ra; ++a)
        for (Index b = 0; b < rb; ++b) m(toff + b * ra + a, off + a * rb + b) = s;
    }
    comps[k] = std::move(m);
  }
  return chain_map(std::move(src), std::move(tgt), std::move(comps));
}

ChainMapF multiplication_map(const RingElement& f, const FreeComplex& x) {
  if (f.ring.base() != x.base)
    throw InputError("ring element and complex live over different base rings");
  if (auto n = integer_content(f)) return scale_chain(*n, id_chain_map(x));
  return zero_chain_map(shift_complex(x, f.hdegree, f.degree), x);
}

HomologyData homology_data(const FreeComplex& x, int k, int w) {
  auto ik = weight_cols(x, k, w);
  auto ik1 = weight_cols(x, k - 1, w);
  auto ik2 = weight_cols(x, k + 1, w);
  Index nk = static_cast<Index>(ik.size());
  IntMat a = submat(x.diff(k), ik1, ik);
  IntMat b = submat(x.diff(k + 1), ik, ik2);
  IntMat z;
  if (ik1.empty()) {
    z = ident(nk);
  } else if (x.base.kind() == RingKind::ModM) {
    z = preimage_lattice(a, (x.base.modulus() * IntMat::Identity(a.rows(), a.rows())).eval());
  } else {
    z = kernel_lattice(a);
  }
  auto c = solve_exact(z, b);
  if (!c) throw CalcError("boundary columns are not cycles");
  IntMat rels = *c;
  if (x.base.kind() == RingKind::ModM && nk > 0) {
    /* a cycle-basis column may be m times a non-cycle, so the coordinate
       relations include every combination that lands in m times the ambient
       lattice, not just m times each basis vector */
    IntMat mi = (x.base.modulus() * IntMat::Identity(nk, nk)).eval();
    rels = hcat(rels, preimage_lattice(z, mi));
  }
  Presented pres = present_module(x.base, {{w, {z.cols(), rels}}});
  HomologyData out;
  out.mod = pres.mod;
  out.cycles = z;
  Index kept = out.mod.rank_at(w);
  out.proj = pres.proj.count(w) ? pres.proj.at(w) : IntMat::Zero(kept, z.cols());
  out.lift = pres.lift.count(w) ? pres.lift.at(w) : IntMat::Zero(z.cols(), kept);
  return out;
}

FGModule homology_at(const FreeComplex& x, int k, int w) { return homology_data(x, k, w).mod; }

FGModule homology_module(const FreeComplex& x, int k) {
  FGModule h(x.base);
  std::set<int> ws;
  for (int v : x.weights_at(k)) ws.insert(v);
  for (int w : ws) {
    auto fs = homology_at(x, k, w).factors_at(w);
    if (!fs.empty()) h.set_factors(w, fs);
  }
  return h;
}

ModuleMap induced_map(const ChainMapF& f, int k) {
  FGModule hs = homology_module(f.src, k);
  FGModule ht = homology_module(f.tgt, k);
  std::map<int, IntMat> comps;
  std::set<int> ws;
  for (int v : f.src.weights_at(k)) ws.insert(v);
  for (int w : ws) {
    if (hs.rank_at(w) == 0 || ht.rank_at(w) == 0) continue;
    HomologyData ds = homology_data(f.src, k, w);
    HomologyData dt = homology_data(f.tgt, k, w);
    IntMat fw = submat(f.at(k), weight_cols(f.tgt, k, w), weight_cols(f.src, k, w));
    auto u = solve_exact(dt.cycles, mul_mat(fw, ds.cycles));
    if (!u) throw CalcError("chain map does not carry cycles to cycles");
    comps[w] = mul_mat(dt.proj, mul_mat(*u, ds.lift));
  }
  return module_map(std::move(hs), std::move(ht), std::move(comps));
}

Minimized minimize(const FreeComplex& x) {
  FreeComplex orig = free_complex(x.base, x.lo, x.wts, x.d);
  FreeComplex cur = orig;
  const bool modm = cur.base.kind() == RingKind::ModM;
  const Int m = cur.base.modulus();
  std::map<int, IntMat> icomps, pcomps;
  for (int k = cur.lo; k <= cur.hi(); ++k)
    if (cur.rank(k) > 0) {
      icomps[k] = ident(cur.rank(k));
      pcomps[k] = ident(cur.rank(k));
    }
  for (;;) {
    size_t di = 0;
    Index pr = -1, pc = -1;
    for (size_t i = 0; i < cur.d.size() && pr < 0; ++i)
      for (Index r = 0; r < cur.d[i].rows() && pr < 0; ++r)
        for (Index c = 0; c < cur.d[i].cols(); ++c) {
          Int v = cur.d[i](r, c);
          bool unit = modm ? (v != 0 && gcd_nonneg(v, m) == 1) : (v == 1 || v == -1);
          if (unit) {
            di = i;
            pr = r;
            pc = c;
            break;
          }
        }
    if (pr < 0) break;
    int s = cur.lo + static_cast<int>(di) + 1;
    int t = s - 1;
    const IntMat dmat = cur.d[di];
    Index rs = dmat.cols(), rt = dmat.rows();
    Int u = dmat(pr, pc);
    Int uinv = modm ? mod_inverse(u, m) : u;
    std::vector<Index> keep_s, keep_t;
    for (Index j = 0; j < rs; ++j)
      if (j != pc) keep_s.push_back(j);
    for (Index i = 0; i < rt; ++i)
      if (i != pr) keep_t.push_back(i);

    auto red = [&](Int v) { return modm ? mod_reduce(v, m) : v; };
    IntMat nd(rt - 1, rs - 1);
    for (Index i = 0; i < rt - 1; ++i)
      for (Index j = 0; j < rs - 1; ++j) {
        Int corr = mul_ck(red(mul_ck(dmat(keep_t[i], pc), uinv)), dmat(pr, keep_s[j]));
        nd(i, j) = red(sub_ck(dmat(keep_t[i], keep_s[j]), red(corr)));
      }
    IntMat inc_s = IntMat::Zero(rs, rs - 1);
    IntMat prj_s = IntMat::Zero(rs - 1, rs);
    for (Index j = 0; j < rs - 1; ++j) {
      inc_s(keep_s[j], j) = 1;
      prj_s(j, keep_s[j]) = 1;
      inc_s(pc, j) = red(neg_ck(red(mul_ck(uinv, dmat(pr, keep_s[j])))));
    }
    IntMat inc_t = IntMat::Zero(rt, rt - 1);
    IntMat prj_t = IntMat::Zero(rt - 1, rt);
    for (Index i = 0; i < rt - 1; ++i) {
      inc_t(keep_t[i], i) = 1;
      prj_t(i, keep_t[i]) = 1;
      prj_t(i, pr) = red(neg_ck(red(mul_ck(dmat(keep_t[i], pc), uinv))));
    }

    cur.d[di] = std::move(nd);
    if (di + 1 < cur.d.size()) cur.d[di + 1] = drop_row(cur.d[di + 1], pc);
    if (di >= 1) cur.d[di - 1] = drop_col(cur.d[di - 1], pr);
    cur.wts[s - cur.lo].erase(cur.wts[s - cur.lo].begin() + pc);
    cur.wts[t - cur.lo].erase(cur.wts[t - cur.lo].begin() + pr);

    icomps[s] = mul_mat(icomps[s], inc_s);
    icomps[t] = mul_mat(icomps[t], inc_t);
    pcomps[s] = mul_mat(prj_s, pcomps[s]);
    pcomps[t] = mul_mat(prj_t, pcomps[t]);
  }
  Minimized out;
  out.min = free_complex(cur.base, cur.lo, cur.wts, cur.d);
  out.incl = chain_map(out.min, orig, std::move(icomps));
  out.proj = chain_map(orig, out.min, std::move(pcomps));
  if (!(compose_chain(out.proj, out.incl) == id_chain_map(out.min)))
    throw CalcError("reduction transfers are not a retraction");
  return out;
}

FGModule ModuleComplex::level(int k) const {
  if (in_range(k)) return mods[k - lo];
  return FGModule::zero(base);
}

ModuleMap ModuleComplex::map_at(int k) const {
  int i = k - lo - 1;
  if (i >= 0 && i < static_cast<int>(maps.size())) return maps[i];
  return zero_map(level(k), level(k - 1));
}

ModuleComplex module_complex(BaseRing base, int lo, std::vector<FGModule> mods,
                             std::vector<ModuleMap> maps) {
  size_t want = mods.empty() ? 0 : mods.size() - 1;
  if (maps.size() != want)
    throw InputError(
        fmt::format("complex with {} levels needs {} differentials, got {}", mods.size(), want, maps.size()));
  for (size_t i = 0; i < mods.size(); ++i)
    if (!(mods[i].base() == base))
      throw InputError(fmt::format("level {} is over a different base ring", lo + static_cast<int>(i)));
  for (size_t i = 0; i < maps.size(); ++i)
    if (!(maps[i].src == mods[i + 1]) || !(maps[i].tgt == mods[i]))
      throw InputError(
          fmt::format("differential out of level {} does not match its levels", lo + static_cast<int>(i) + 1));
  for (size_t i = 0; i + 1 < maps.size(); ++i)
    if (!compose(maps[i], maps[i + 1]).is_zero())
      throw InputError(
          fmt::format("differentials do not compose to zero at level {}", lo + static_cast<int>(i) + 2));
  return {std::move(base), lo, std::move(mods), std::move(maps)};
}

ModuleComplex module_view(const FreeComplex& x) {
  std::vector<FGModule> mods;
  for (int k = x.lo; k <= x.hi(); ++k)
    mods.push_back(FGModule::free_module(x.base, x.weights_at(k)));
  std::vector<ModuleMap> maps;
  for (int k = x.lo + 1; k <= x.hi(); ++k) {
    std::map<int, IntMat> comps;
    std::set<int> ws;
    for (int v : x.weights_at(k)) ws.insert(v);
    for (int w : ws) {
      IntMat blk = submat(x.diff(k), weight_cols(x, k - 1, w), weight_cols(x, k, w));
      if (!blk.isZero()) comps[w] = blk;
    }
    maps.push_back(module_map(mods[k - x.lo], mods[k - 1 - x.lo], std::move(comps)));
  }
  return module_complex(x.base, x.lo, std::move(mods), std::move(maps));
}

FGModule module_homology(const ModuleComplex& m, int k) {
  if (!m.in_range(k)) return FGModule::zero(m.base);
  Submodule z = kernel_sub(m.map_at(k));
  Submodule b = image_sub(m.map_at(k + 1));
  return present_subquotient(z, b).mod;
}

ModuleMap ChainMapM::at(int k) const {
  auto it = comps.find(k);
  if (it != comps.end()) return it->second;
  return zero_map(src.level(k), tgt.level(k));
}

ChainMapM module_chain_map(ModuleComplex src, ModuleComplex tgt, std::map<int, ModuleMap> comps) {
  if (!(src.base == tgt.base)) throw InputError("chain map between different base rings");
  ChainMapM f{std::move(src), std::move(tgt), {}};
  for (auto& [k, mp] : comps) {
    if (!(mp.src == f.src.level(k)) || !(mp.tgt == f.tgt.level(k)))
      throw InputError(fmt::format("chain map component at level {} does not match its levels", k));
    if (!mp.is_zero()) f.comps[k] = std::move(mp);
  }
  int klo = std::min(f.src.lo, f.tgt.lo);
  int khi = std::max(f.src.hi(), f.tgt.hi()) + 1;
  for (int k = klo; k <= khi; ++k) {
    if (!(compose(f.tgt.map_at(k), f.at(k)) == compose(f.at(k - 1), f.src.map_at(k))))
      throw InputError(fmt::format("chain map does not commute with the differentials at level {}", k));
  }
  return f;
}

ModuleMap induced_module_map(const ChainMapM& f, int k) {
  SubquotientPresentation sqs =
      present_subquotient(kernel_sub(f.src.map_at(k)), image_sub(f.src.map_at(k + 1)));
  SubquotientPresentation sqt =
      present_subquotient(kernel_sub(f.tgt.map_at(k)), image_sub(f.tgt.map_at(k + 1)));
  ModuleMap fk = f.at(k);
  std::map<int, IntMat> comps;
  for (int w : sqs.mod.weights()) {
    Index n = sqs.mod.rank_at(w);
    Index rt = sqt.mod.rank_at(w);
    if (n == 0 || rt == 0) continue;
    IntMat fw = fk.at(w);
    IntMat comp(rt, n);
    for (Index j = 0; j < n; ++j) {
      IntVec e = IntVec::Zero(n);
      e(j) = 1;
      IntVec rep = subq_rep(sqs, w, e);
      IntVec img(fw.rows());
      for (Index i = 0; i < fw.rows(); ++i) {
        __int128 acc = 0;
        for (Index l = 0; l < rep.size(); ++l) acc += __int128(fw(i, l)) * rep(l);
        img(i) = checked(acc, "induced map");
      }
      comp.col(j) = subq_class(sqt, w, img);
    }
    comps[w] = comp;
  }
  return module_map(sqs.mod, sqt.mod, std::move(comps));
}

ModuleComplex module_cone(const ChainMapM& f) {
  const ModuleComplex& x = f.src;
  const ModuleComplex& y = f.tgt;
  if (x.mods.empty() && y.mods.empty()) return module_complex(x.base, 0, {}, {});
  int lo, hi;
  if (x.mods.empty()) {
    lo = y.lo;
    hi = y.hi();
  } else if (y.mods.empty()) {
    lo = x.lo + 1;
    hi = x.hi() + 1;
  } else {
    lo = std::min(x.lo + 1, y.lo);
    hi = std::max(x.hi() + 1, y.hi());
  }
  std::vector<SumModule> sums;
  for (int k = lo; k <= hi; ++k) sums.push_back(dsum(x.level(k - 1), y.level(k)));
  std::vector<FGModule> mods;
  for (const auto& s : sums) mods.push_back(s.mod);
  std::vector<ModuleMap> maps;
  for (int k = lo + 1; k <= hi; ++k) {
    const SumModule& sk = sums[k - lo];
    const SumModule& st = sums[k - 1 - lo];
    ModuleMap t1 = compose(st.in_a, compose(negate_map(x.map_at(k - 1)), sk.pr_a));
    ModuleMap t2 = compose(st.in_b, compose(negate_map(f.at(k - 1)), sk.pr_a));
    ModuleMap t3 = compose(st.in_b, compose(y.map_at(k), sk.pr_b));
    maps.push_back(add_maps(add_maps(t1, t2), t3));
  }
  return module_complex(x.base, lo, std::move(mods), std::move(maps));
}

ModuleComplex module_shift(const ModuleComplex& x, int p, int w) {
  auto shift_mod = [&](const FGModule& m) {
    FGModule out(m.base());
    for (const auto& [w0, fs] : m.factors()) out.set_factors(w0 + w, fs);
    return out;
  };
  std::vector<FGModule> mods;
  for (const auto& m : x.mods) mods.push_back(shift_mod(m));
  std::vector<ModuleMap> maps;
  for (size_t i = 0; i < x.maps.size(); ++i) {
    std::map<int, IntMat> comps;
    for (const auto& [w0, blk] : x.maps[i].comps) comps[w0 + w] = blk;
    ModuleMap mp = module_map(mods[i + 1], mods[i], std::move(comps));
    maps.push_back(p % 2 == 0 ? mp : negate_map(mp));
  }
  return module_complex(x.base, x.lo + p, std::move(mods), std::move(maps));
}

TruncationBelow truncate_below(const ModuleComplex& x, int n) {
  if (x.mods.empty() || n <= x.lo) {
    std::map<int, ModuleMap> comps;
    for (int k = x.lo; k <= x.hi(); ++k)
      if (!x.level(k).is_zero()) comps[k] = identity_map(x.level(k));
    return {x, module_chain_map(x, x, std::move(comps))};
  }
  if (n > x.hi()) {
    ModuleComplex empty = module_complex(x.base, n, {}, {});
    return {empty, module_chain_map(empty, x, {})};
  }
  ModuleWithMap kern = kernel(x.map_at(n));
  std::vector<FGModule> mods{kern.mod};
  std::vector<ModuleMap> maps;
  if (n < x.hi()) {
    auto w = solve_module_map({x.level(n + 1), kern.mod, {{kern.map, x.map_at(n + 1)}}, {}});
    if (!w) throw CalcError("corestriction to the kernel failed");
    maps.push_back(*w);
  }
  for (int k = n + 1; k <= x.hi(); ++k) {
    mods.push_back(x.level(k));
    if (k < x.hi()) maps.push_back(x.map_at(k + 1));
  }
  ModuleComplex trunc = module_complex(x.base, n, std::move(mods), std::move(maps));
  std::map<int, ModuleMap> comps;
  if (!kern.mod.is_zero()) comps[n] = kern.map;
  for (int k = n + 1; k <= x.hi(); ++k)
    if (!x.level(k).is_zero()) comps[k] = identity_map(x.level(k));
  ChainMapM incl = module_chain_map(trunc, x, std::move(comps));
  return {std::move(trunc), std::move(incl)};
}

TruncationAbove truncate_above(const ModuleComplex& x, int n) {
  if (x.mods.empty() || n >= x.hi()) {
    std::map<int, ModuleMap> comps;
    for (int k = x.lo; k <= x.hi(); ++k)
      if (!x.level(k).is_zero()) comps[k] = identity_map(x.level(k));
    return {x, module_chain_map(x, x, std::move(comps))};
  }
  if (n < x.lo) {
    ModuleComplex empty = module_complex(x.base, n, {}, {});
    return {empty, module_chain_map(x, empty, {})};
  }
  ModuleWithMap cok = cokernel(x.map_at(n + 1));
  std::vector<FGModule> mods;
  std::vector<ModuleMap> maps;
  for (int k = x.lo; k < n; ++k) {
    mods.push_back(x.level(k));
    if (k < n - 1) maps.push_back(x.map_at(k + 1));
  }
  if (n > x.lo) {
    auto w = solve_module_map({cok.mod, x.level(n - 1), {}, {{cok.map, x.map_at(n)}}});
    if (!w) throw CalcError("descent to the cokernel failed");
    maps.push_back(*w);
  }
  mods.push_back(cok.mod);
  ModuleComplex trunc = module_complex(x.base, x.lo, std::move(mods), std::move(maps));
  std::map<int, ModuleMap> comps;
  for (int k = x.lo; k < n; ++k)
    if (!x.level(k).is_zero()) comps[k] = identity_map(x.level(k));
  if (!cok.mod.is_zero()) comps[n] = cok.map;
  ChainMapM proj = module_chain_map(x, trunc, std::move(comps));
  return {std::move(trunc), std::move(proj)};
}

FreeTruncationBelow truncate_below_free(const FreeComplex& x, int n) {
  if (!x.base.hereditary())
    throw InputError("good truncation of free complexes needs a hereditary base");
  if (x.wts.empty() || n <= x.lo) return {x, id_chain_map(x)};
  if (n > x.hi()) {
    FreeComplex empty = zero_complex(x.base);
    return {empty, chain_map(empty, x, {})};
  }
  std::set<int> ws;
  for (int v : x.weights_at(n)) ws.insert(v);
  std::vector<int> kw;
  IntMat k_full = IntMat::Zero(x.rank(n), 0);
  for (int w : ws) {
    auto cols = weight_cols(x, n, w);
    IntMat aw = submat(x.diff(n), weight_cols(x, n - 1, w), cols);
    IntMat kb = kernel_lattice(aw);
    IntMat emb = IntMat::Zero(x.rank(n), kb.cols());
    for (Index i = 0; i < kb.rows(); ++i) emb.row(cols[i]) = kb.row(i);
    k_full = hcat(k_full, emb);
    for (Index j = 0; j < kb.cols(); ++j) kw.push_back(w);
  }
  std::vector<std::vector<int>> wts{kw};
  std::vector<IntMat> d;
  if (n < x.hi()) {
    auto s = solve_exact(k_full, x.diff(n + 1));
    if (!s) throw CalcError("boundaries do not lie in the kernel");
    d.push_back(*s);
  }
  for (int k = n + 1; k <= x.hi(); ++k) {
    wts.push_back(x.weights_at(k));
    if (k < x.hi()) d.push_back(x.diff(k + 1));
  }
  FreeComplex trunc = free_complex(x.base, n, std::move(wts), std::move(d));
  std::map<int, IntMat> comps;
  if (k_full.cols() > 0) comps[n] = k_full;
  for (int k = n + 1; k <= x.hi(); ++k)
    if (x.rank(k) > 0) comps[k] = ident(x.rank(k));
  ChainMapF incl = chain_map(trunc, x, std::move(comps));
  return {std::move(trunc), std::move(incl)};
}

FreeTruncationAbove truncate_above_free(const FreeComplex& x, int n) {
  FreeTruncationBelow tb = truncate_below_free(x, n + 1);
  return {cone(tb.incl), cone_incl(tb.incl)};
}

namespace {

struct LevelData {
  Flat flat;
  std::vector<Index> tor_pos;
  std::vector<Int> tor_d;
  std::vector<int> gw, rw;
};

LevelData level_data(const FGModule& m) {
  LevelData ld;
  ld.flat = flatten(m);
  for (Index i = 0; i < static_cast<Index>(ld.flat.gens.size()); ++i) {
    auto [w, dd] = ld.flat.gens[i];
    ld.gw.push_back(w);
    if (dd != 0) {
      ld.tor_pos.push_back(i);
      ld.tor_d.push_back(dd);
      ld.rw.push_back(w);
    }
  }
  return ld;
}

Int exact_div(Int a, Int b, const char* ctx) {
  if (b == 0 || a % b != 0) throw CalcError(std::string("inexact division in ") + ctx);
  return a / b;
}

}  // namespace

FreeModel free_model(const ModuleComplex& m) {
  if (!m.base.hereditary()) throw InputError("free models need a hereditary base");
  if (m.mods.empty()) return {zero_complex(m.base), m};
  int lo = m.lo, hi = m.hi();
  int n = hi - lo + 1;
  std::vector<LevelData> ld;
  for (const auto& mod : m.mods) ld.push_back(level_data(mod));
  std::vector<IntMat> g(n - 1);
  for (int i = 0; i + 1 < n; ++i) g[i] = full_matrix(m.maps[i]);

  auto lam = [&](int i) {
    IntMat l = IntMat::Zero(static_cast<Index>(ld[i].gw.size()), static_cast<Index>(ld[i].rw.size()));
    for (size_t j = 0; j < ld[i].tor_pos.size(); ++j) l(ld[i].tor_pos[j], static_cast<Index>(j)) = ld[i].tor_d[j];
    return l;
  };
  /* r lifts g through the relation inclusions, h divides g*g through them */
  auto rmat = [&](int i) {
    IntMat r(static_cast<Index>(ld[i].rw.size()), static_cast<Index>(ld[i + 1].rw.size()));
    for (Index a = 0; a < r.rows(); ++a)
      for (Index b = 0; b < r.cols(); ++b)
        r(a, b) = exact_div(mul_ck(g[i](ld[i].tor_pos[a], ld[i + 1].tor_pos[b]), ld[i + 1].tor_d[b]),
                            ld[i].tor_d[a], "free model lift");
    return r;
  };
  auto hmat = [&](int i) {
    IntMat gg = mul_mat(g[i], g[i + 1]);
    IntMat h(static_cast<Index>(ld[i].rw.size()), gg.cols());
    std::set<Index> tor(ld[i].tor_pos.begin(), ld[i].tor_pos.end());
    for (Index p = 0; p < gg.rows(); ++p)
      if (!tor.count(p))
        for (Index j = 0; j < gg.cols(); ++j)
          if (gg(p, j) != 0) throw CalcError("free rows of a composite do not vanish");
    for (Index a = 0; a < h.rows(); ++a)
      for (Index j = 0; j < gg.cols(); ++j)
        h(a, j) = exact_div(gg(ld[i].tor_pos[a], j), ld[i].tor_d[a], "free model witness");
    return h;
  };

  std::vector<std::vector<int>> wts;
  for (int k = lo; k <= hi + 1; ++k) {
    std::vector<int> lvl;
    if (k <= hi) lvl = ld[k - lo].gw;
    if (k - 1 >= lo) lvl.insert(lvl.end(), ld[k - 1 - lo].rw.begin(), ld[k - 1 - lo].rw.end());
    wts.push_back(std::move(lvl));
  }
  std::vector<IntMat> d;
  for (int k = lo + 1; k <= hi + 1; ++k) {
    Index gs = k <= hi ? static_cast<Index>(ld[k - lo].gw.size()) : 0;
    Index rs = static_cast<Index>(ld[k - 1 - lo].rw.size());
    Index gt = static_cast<Index>(ld[k - 1 - lo].gw.size());
    Index rt = k - 2 >= lo ? static_cast<Index>(ld[k - 2 - lo].rw.size()) : 0;
    IntMat dk = IntMat::Zero(gt + rt, gs + rs);
    if (k <= hi) dk.block(0, 0, gt, gs) = g[k - 1 - lo];
    dk.block(0, gs, gt, rs) = lam(k - 1 - lo);
    if (k - 2 >= lo && k <= hi) {
      IntMat h = hmat(k - 2 - lo);
      for (Index i = 0; i < rt; ++i)
        for (Index j = 0; j < gs; ++j) dk(gt + i, j) = neg_ck(h(i, j));
    }
    if (k - 2 >= lo) {
      IntMat r = rmat(k - 2 - lo);
      for (Index i = 0; i < rt; ++i)
        for (Index j = 0; j < rs; ++j) dk(gt + i, gs + j) = neg_ck(r(i, j));
    }
    d.push_back(std::move(dk));
  }
  FreeComplex model = trim_ends({m.base, lo, std::move(wts), std::move(d)});
  return {free_complex(model.base, model.lo, model.wts, model.d), m};
}

ChainMapF free_model_lift(const ChainMapM& f, const FreeModel& src, const FreeModel& tgt) {
  if (src.of.lo != f.src.lo || !(src.of.mods == f.src.mods) || tgt.of.lo != f.tgt.lo ||
      !(tgt.of.mods == f.tgt.mods))
    throw InputError("free model lift of a map between different complexes");
  const ModuleComplex& ms = f.src;
  const ModuleComplex& mt = f.tgt;
  int lo = std::min(ms.lo, mt.lo), hi = std::max(ms.hi(), mt.hi());
  std::map<int, IntMat> comps;
  auto lds = [&](int k) { return level_data(ms.level(k)); };
  auto ldt = [&](int k) { return level_data(mt.level(k)); };
  for (int k = lo; k <= hi + 1; ++k) {
    LevelData sgk = lds(k), sgk1 = lds(k - 1);
    LevelData tgk = ldt(k), tgk1 = ldt(k - 1);
    Index cs = static_cast<Index>(sgk.gw.size()), cr = static_cast<Index>(sgk1.rw.size());
    Index rs = static_cast<Index>(tgk.gw.size()), rr = static_cast<Index>(tgk1.rw.size());
    if ((cs + cr) == 0 || (rs + rr) == 0) continue;
    IntMat phi_k = full_matrix(f.at(k));
    IntMat phi_k1 = full_matrix(f.at(k - 1));
    IntMat blk = IntMat::Zero(rs + rr, cs + cr);
    blk.block(0, 0, rs, cs) = phi_k;
    /* tau: relation lift of phi one level down */
    for (Index a = 0; a < rr; ++a)
      for (Index b = 0; b < cr; ++b)
        blk(rs + a, cs + b) =
            exact_div(mul_ck(phi_k1(tgk1.tor_pos[a], sgk1.tor_pos[b]), sgk1.tor_d[b]),
                      tgk1.tor_d[a], "model lift relations");
    /* sigma: the defect of phi against the generator lifts, divided in */
    if (rr > 0 && cs > 0) {
      IntMat delta = mul_mat(phi_k1, full_matrix(ms.map_at(k)));
      IntMat other = mul_mat(full_matrix(mt.map_at(k)), phi_k);
      std::set<Index> tor(tgk1.tor_pos.begin(), tgk1.tor_pos.end());
      for (Index p = 0; p < delta.rows(); ++p)
        for (Index j = 0; j < delta.cols(); ++j) {
          Int v = sub_ck(delta(p, j), other(p, j));
          if (!tor.count(p) && v != 0) throw CalcError("free rows of a lift defect do not vanish");
          delta(p, j) = v;
        }
      for (Index a = 0; a < rr; ++a)
        for (Index j = 0; j < cs; ++j)
          blk(rs + a, j) = exact_div(delta(tgk1.tor_pos[a], j), tgk1.tor_d[a], "model lift defect");
    }
    if (!blk.isZero()) comps[k] = blk;
  }
  return chain_map(src.model, tgt.model, std::move(comps));
}

namespace {

/* a module complex with genuinely free levels as a free complex */
std::optional<FreeComplex> as_free(const ModuleComplex& m) {
  Int free_factor = m.base.kind() == RingKind::ModM ? m.base.modulus() : 0;
  std::vector<std::vector<int>> wts;
  for (const auto& mod : m.mods) {
    std::vector<int> lvl;
    for (const auto& [w, fs] : mod.factors())
      for (Int dd : fs) {
        if (dd != free_factor) return std::nullopt;
        lvl.push_back(w);
      }
    wts.push_back(std::move(lvl));
  }
  std::vector<IntMat> d;
  for (const auto& mp : m.maps) d.push_back(full_matrix(mp));
  return free_complex(m.base, m.lo, std::move(wts), std::move(d));
}

}  // namespace

FreeComplex derived_tensor(const ModuleComplex& x, const ModuleComplex& y) {
  if (!(x.base == y.base)) throw InputError("tensor of complexes over different base rings");
  if (x.base.hereditary()) return tensor(free_model(x).model, free_model(y).model);
  auto fx = as_free(x), fy = as_free(y);
  if (!fx || !fy) throw InputError("derived tensor over Z/m needs free levels");
  return tensor(*fx, *fy);
}

}  // namespace sst
