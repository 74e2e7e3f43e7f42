#pragma once

#include <optional>
#include <vector>

#include "sst/basics.hpp"

namespace sst {

/*
 * Exact integer linear algebra. Lattices are column spans of integer
 * matrices; every function here is deterministic and works over Z only.
 * Coefficient ring conventions (units mod m, inverted primes) live one
 * layer up.
 */

struct SmithForm {
  IntMat u;  // rows x rows, unimodular
  IntMat v;  // cols x cols, unimodular
  IntMat d;  // u * a * v, diagonal, nonnegative, d(i,i) | d(i+1,i+1)
  Index rank = 0;
};

SmithForm smith_form(const IntMat& a);

/*
 * Canonical column Hermite form of the column lattice of a. Columns are
 * ordered by ascending pivot row, pivots are positive, entries of each
 * pivot row in earlier columns are reduced into [0, pivot), and later
 * columns vanish on the pivot row. Zero columns are dropped, so the
 * result has exactly rank(a) columns and is unique for the lattice.
 */
IntMat hnf_cols(const IntMat& a);

/* basis of {x : a x = 0}, in canonical Hermite form */
IntMat kernel_lattice(const IntMat& a);

/* some x with a x = b, one column of x per column of b */
std::optional<IntMat> solve_exact(const IntMat& a, const IntMat& b);

/* some x with a x = b modulo the column lattice of l */
std::optional<IntMat> solve_mod_lattice(const IntMat& a, const IntMat& b, const IntMat& l);

/* basis of {x : a x lies in the column lattice of l} */
IntMat preimage_lattice(const IntMat& a, const IntMat& l);

bool lattice_subset(const IntMat& a, const IntMat& b);
bool lattice_eq(const IntMat& a, const IntMat& b);
IntMat lattice_sum(const IntMat& a, const IntMat& b);
IntMat lattice_intersect(const IntMat& a, const IntMat& b);

/* smallest superlattice closed under dividing by the given primes */
IntMat saturate_lattice(const IntMat& a, const std::vector<Int>& primes);

/* canonical representative of v modulo the lattice, h in hnf_cols form */
IntVec hnf_reduce(const IntMat& h, const IntVec& v);

/* |det| of a square matrix, via its Smith form */
Int abs_det(const IntMat& a);

/* index [b : a] for sublattice a of b with equal rank, 0 when infinite */
Int lattice_index(const IntMat& b, const IntMat& a);

}  // namespace sst
