#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sst/fg_module.hpp"

namespace sst {

enum class SignRule { Commutative, Koszul };

/*
 * Graded ring presented by generators and homogeneous relations, with
 * all arithmetic restricted to a finite degree window containing 0.
 * Generator degrees are nonzero and all of one sign, so every degree
 * has a finite monomial basis. Products whose degree leaves the window
 * raise WindowError rather than truncating.
 *
 * The value is a shared immutable handle: with_relations returns a new
 * ring, and elements remember which ring they belong to.
 */
class GradedRing {
 public:
  GradedRing() = default;

  static GradedRing create(BaseRing base, int wlo, int whi,
                           std::vector<std::pair<std::string, int>> gens, SignRule rule);
  GradedRing with_relations(const std::vector<struct RingElement>& rels) const;

  const BaseRing& base() const;
  int window_lo() const;
  int window_hi() const;
  SignRule sign_rule() const;
  Index gen_count() const;
  const std::string& gen_name(Index i) const;
  int gen_degree(Index i) const;
  std::ptrdiff_t gen_index(const std::string& name) const;  // -1 when absent

  bool in_window(int d) const;
  /* monomial basis of a degree, as exponent vectors in lex order */
  const std::vector<std::vector<int>>& basis(int d) const;
  /* canonical relation lattice on the basis of a degree */
  const IntMat& relation_lattice(int d) const;

  bool same(const GradedRing& o) const { return data_ == o.data_; }
  std::string str() const;

  struct Data;
  const Data& data() const { return *data_; }

 private:
  std::shared_ptr<const Data> data_;
};

/*
 * Homogeneous element: ring degree plus an extra homological degree
 * used when the element acts on complexes. Coefficients are over the
 * monomial basis of the degree, always reduced modulo the relation
 * lattice.
 */
struct RingElement {
  GradedRing ring;
  int degree = 0;
  int hdegree = 0;
  IntVec coeffs;

  bool is_zero() const { return coeffs.isZero(); }
};

RingElement ring_zero(const GradedRing& r, int degree);
RingElement ring_one(const GradedRing& r);
RingElement ring_scalar(const GradedRing& r, Int n);
RingElement ring_gen(const GradedRing& r, const std::string& name);
RingElement ring_element(const GradedRing& r, int degree, int hdegree, IntVec coeffs);

RingElement add_elements(const RingElement& a, const RingElement& b);
RingElement negate_element(const RingElement& a);
RingElement scale_element(Int n, const RingElement& a);
RingElement mul_elements(const RingElement& a, const RingElement& b);
RingElement pow_element(const RingElement& a, int n);
bool elements_equal(const RingElement& a, const RingElement& b);

/* n when the element is n * 1 in bidegree (0, 0), otherwise nullopt */
std::optional<Int> integer_content(const RingElement& a);

/* "2*x^2 + 3*x*y - 4*y^2" style strings */
RingElement parse_element(const GradedRing& r, const std::string& s);
std::string element_str(const RingElement& a);

/* the coefficient module of one degree, presented on its monomial
   basis and placed at weight equal to the degree */
Presented ring_degree_module(const GradedRing& r, int d);

}  // namespace sst
