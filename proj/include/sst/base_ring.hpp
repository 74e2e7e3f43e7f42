#pragma once

#include <string>
#include <vector>

#include "sst/basics.hpp"

namespace sst {

enum class RingKind { Integers, ModM, Localized };

/*
 * The coefficient ring everything is linear over: Z, Z/m, or Z with a set
 * of primes inverted. Modules and complexes keep integer matrices in all
 * three cases; this class owns the unit and factor normalization rules
 * that make the encoding canonical.
 */
class BaseRing {
 public:
  BaseRing() = default;

  static BaseRing integers();
  static BaseRing mod(Int m);
  static BaseRing localized(std::vector<Int> primes);

  RingKind kind() const { return kind_; }
  Int modulus() const { return m_; }
  const std::vector<Int>& inverted_primes() const { return primes_; }

  bool operator==(const BaseRing& o) const = default;

  bool is_unit(Int a) const;

  /* divide out every inverted prime, result is nonnegative */
  Int strip_inverted(Int a) const;

  /* canonical invariant factor: |d| over Z, gcd with m (0 -> m) over Z/m,
     inverted primes stripped over a localization */
  Int normalize_factor(Int d) const;

  /* canonical matrix entry: reduced into [0, m) over Z/m, unchanged else */
  Int reduce_entry(Int a) const;
  void reduce_entries(IntMat& a) const;

  /* finite global dimension, where free resolutions of length 1 exist */
  bool hereditary() const { return kind_ != RingKind::ModM; }

  std::string str() const;
  static BaseRing parse(const std::string& text);

 private:
  RingKind kind_ = RingKind::Integers;
  Int m_ = 0;
  std::vector<Int> primes_;
};

}  // namespace sst
