#include "sst/smith.hpp"

#include <algorithm>
#include <utility>

namespace sst {

namespace {

/* row dst += c * row src */
void row_axpy(IntMat& m, Index dst, Index src, Int c) {
  for (Index j = 0; j < m.cols(); ++j) m(dst, j) = fma_ck(m(dst, j), c, m(src, j));
}

/* col dst += c * col src */
void col_axpy(IntMat& m, Index dst, Index src, Int c) {
  for (Index i = 0; i < m.rows(); ++i) m(i, dst) = fma_ck(m(i, dst), c, m(i, src));
}

void negate_row(IntMat& m, Index r) {
  for (Index j = 0; j < m.cols(); ++j) m(r, j) = neg_ck(m(r, j));
}

void negate_col(IntMat& m, Index c) {
  for (Index i = 0; i < m.rows(); ++i) m(i, c) = neg_ck(m(i, c));
}

struct SmithWork {
  IntMat& u;
  IntMat& v;
  IntMat& d;

  /* reduce d[t.., t..] to diagonal form, leaving the region above t alone */
  void diagonalize(Index t) {
    const Index m = d.rows(), n = d.cols();
    const Index tmax = std::min(m, n);
    while (t < tmax) {
      Index bi = -1, bj = -1;
      Int best = 0;
      for (Index i = t; i < m; ++i)
        for (Index j = t; j < n; ++j)
          if (d(i, j) != 0) {
            Int a = abs_ck(d(i, j));
            if (bi < 0 || a < best) {
              bi = i;
              bj = j;
              best = a;
            }
          }
      if (bi < 0) break;
      if (bi != t) {
        d.row(t).swap(d.row(bi));
        u.row(t).swap(u.row(bi));
      }
      if (bj != t) {
        d.col(t).swap(d.col(bj));
        v.col(t).swap(v.col(bj));
      }
      bool clean = true;
      for (Index i = t + 1; i < m; ++i) {
        if (d(i, t) == 0) continue;
        Int q = d(i, t) / d(t, t);
        if (q != 0) {
          row_axpy(d, i, t, -q);
          row_axpy(u, i, t, -q);
        }
        if (d(i, t) != 0) clean = false;
      }
      for (Index j = t + 1; j < n; ++j) {
        if (d(t, j) == 0) continue;
        Int q = d(t, j) / d(t, t);
        if (q != 0) {
          col_axpy(d, j, t, -q);
          col_axpy(v, j, t, -q);
        }
        if (d(t, j) != 0) clean = false;
      }
      if (clean) ++t;
    }
  }
};

}  // namespace

SmithForm smith_form(const IntMat& a) {
  SmithForm s;
  s.u = ident(a.rows());
  s.v = ident(a.cols());
  s.d = a;
  SmithWork w{s.u, s.v, s.d};
  w.diagonalize(0);

  const Index tmax = std::min(a.rows(), a.cols());
  for (Index i = 0; i < tmax; ++i)
    if (s.d(i, i) < 0) {
      negate_row(s.d, i);
      negate_row(s.u, i);
    }

  /* enforce the divisibility chain, re-diagonalizing after each fix */
  for (;;) {
    Index bad = -1;
    for (Index i = 0; i + 1 < tmax; ++i)
      if (s.d(i + 1, i + 1) != 0 && (s.d(i, i) == 0 || s.d(i + 1, i + 1) % s.d(i, i) != 0)) {
        bad = i;
        break;
      }
    if (bad < 0) break;
    col_axpy(s.d, bad, bad + 1, 1);
    col_axpy(s.v, bad, bad + 1, 1);
    w.diagonalize(bad);
    for (Index i = bad; i < tmax; ++i)
      if (s.d(i, i) < 0) {
        negate_row(s.d, i);
        negate_row(s.u, i);
      }
  }

  s.rank = 0;
  for (Index i = 0; i < tmax; ++i)
    if (s.d(i, i) != 0) ++s.rank;
  return s;
}

IntMat hnf_cols(const IntMat& a) {
  IntMat h = a;
  const Index m = h.rows(), n = h.cols();
  Index c = 0;
  for (Index row = 0; row < m && c < n; ++row) {
    Index piv = -1;
    for (Index j = c; j < n; ++j) {
      if (h(row, j) == 0) continue;
      if (piv < 0) {
        piv = j;
        continue;
      }
      Int x, y;
      Int aa = h(row, piv), bb = h(row, j);
      Int g = gcdext(aa, bb, x, y);
      Int ag = aa / g, bg = bb / g;
      for (Index i = 0; i < m; ++i) {
        Int ci = h(i, piv), cj = h(i, j);
        h(i, piv) = checked(__int128(x) * ci + __int128(y) * cj, "hnf");
        h(i, j) = checked(__int128(ag) * cj - __int128(bg) * ci, "hnf");
      }
    }
    if (piv < 0) continue;
    if (piv != c) h.col(c).swap(h.col(piv));
    if (h(row, c) < 0) negate_col(h, c);
    for (Index j = 0; j < c; ++j) {
      Int q = floor_div(h(row, j), h(row, c));
      if (q != 0) col_axpy(h, j, c, -q);
    }
    ++c;
  }
  return h.leftCols(c);
}

IntMat kernel_lattice(const IntMat& a) {
  SmithForm s = smith_form(a);
  return hnf_cols(s.v.rightCols(a.cols() - s.rank));
}

std::optional<IntMat> solve_exact(const IntMat& a, const IntMat& b) {
  if (a.rows() != b.rows()) throw CalcError("solve_exact shape mismatch");
  SmithForm s = smith_form(a);
  IntMat y = mul_mat(s.u, b);
  IntMat t = IntMat::Zero(a.cols(), b.cols());
  for (Index i = 0; i < s.rank; ++i) {
    Int dd = s.d(i, i);
    for (Index j = 0; j < b.cols(); ++j) {
      if (y(i, j) % dd != 0) return std::nullopt;
      t(i, j) = y(i, j) / dd;
    }
  }
  for (Index i = s.rank; i < a.rows(); ++i)
    for (Index j = 0; j < b.cols(); ++j)
      if (y(i, j) != 0) return std::nullopt;
  return mul_mat(s.v, t);
}

std::optional<IntMat> solve_mod_lattice(const IntMat& a, const IntMat& b, const IntMat& l) {
  if (l.cols() == 0) return solve_exact(a, b);
  auto s = solve_exact(hcat(a, l), b);
  if (!s) return std::nullopt;
  return IntMat(s->topRows(a.cols()));
}

IntMat preimage_lattice(const IntMat& a, const IntMat& l) {
  if (a.rows() != l.rows()) throw CalcError("preimage_lattice shape mismatch");
  if (l.cols() == 0) return kernel_lattice(a);
  IntMat k = kernel_lattice(hcat(a, l));
  return hnf_cols(k.topRows(a.cols()));
}

bool lattice_subset(const IntMat& a, const IntMat& b) {
  if (a.rows() != b.rows()) throw CalcError("lattice_subset shape mismatch");
  return solve_exact(b, a).has_value();
}

bool lattice_eq(const IntMat& a, const IntMat& b) {
  IntMat ha = hnf_cols(a), hb = hnf_cols(b);
  return ha.rows() == hb.rows() && ha.cols() == hb.cols() && ha == hb;
}

IntMat lattice_sum(const IntMat& a, const IntMat& b) { return hnf_cols(hcat(a, b)); }

IntMat lattice_intersect(const IntMat& a, const IntMat& b) {
  if (a.rows() != b.rows()) throw CalcError("lattice_intersect shape mismatch");
  if (a.cols() == 0 || b.cols() == 0) return IntMat(a.rows(), 0);
  IntMat k = kernel_lattice(hcat(a, b));
  return hnf_cols(mul_mat(a, k.topRows(a.cols())));
}

IntMat saturate_lattice(const IntMat& a, const std::vector<Int>& primes) {
  IntMat h = hnf_cols(a);
  if (primes.empty() || h.cols() == 0) return h;
  bool changed = true;
  while (changed) {
    changed = false;
    for (Int p : primes) {
      IntMat pm = ident(h.rows()) * p;
      IntMat pre = preimage_lattice(pm, h);
      if (!lattice_eq(pre, h)) {
        h = pre;
        changed = true;
      }
    }
  }
  return h;
}

IntVec hnf_reduce(const IntMat& h, const IntVec& v) {
  if (h.rows() != v.rows()) throw CalcError("hnf_reduce shape mismatch");
  IntVec r = v;
  for (Index c = 0; c < h.cols(); ++c) {
    Index pr = -1;
    for (Index i = 0; i < h.rows(); ++i)
      if (h(i, c) != 0) {
        pr = i;
        break;
      }
    if (pr < 0) continue;
    Int q = floor_div(r(pr), h(pr, c));
    if (q != 0)
      for (Index i = 0; i < h.rows(); ++i) r(i) = fma_ck(r(i), -q, h(i, c));
  }
  return r;
}

Int abs_det(const IntMat& a) {
  if (a.rows() != a.cols()) throw CalcError("abs_det needs a square matrix");
  SmithForm s = smith_form(a);
  if (s.rank < a.rows()) return 0;
  Int p = 1;
  for (Index i = 0; i < a.rows(); ++i) p = mul_ck(p, s.d(i, i));
  return p;
}

Int lattice_index(const IntMat& b, const IntMat& a) {
  IntMat hb = hnf_cols(b), ha = hnf_cols(a);
  if (hb.cols() != ha.cols()) return 0;
  auto c = solve_exact(hb, ha);
  if (!c) return 0;
  return abs_det(*c);
}

}  // namespace sst
