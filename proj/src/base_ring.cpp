#include "sst/base_ring.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace sst {

BaseRing BaseRing::integers() { return BaseRing{}; }

BaseRing BaseRing::mod(Int m) {
  if (m < 2) throw InputError(fmt::format("modulus must be at least 2, got {}", m));
  BaseRing r;
  r.kind_ = RingKind::ModM;
  r.m_ = m;
  return r;
}

BaseRing BaseRing::localized(std::vector<Int> primes) {
  std::sort(primes.begin(), primes.end());
  primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
  for (Int p : primes)
    if (!is_prime(p)) throw InputError(fmt::format("{} is not prime", p));
  if (primes.empty()) return integers();
  BaseRing r;
  r.kind_ = RingKind::Localized;
  r.primes_ = std::move(primes);
  return r;
}

bool BaseRing::is_unit(Int a) const {
  switch (kind_) {
    case RingKind::Integers:
      return a == 1 || a == -1;
    case RingKind::ModM:
      return gcd_nonneg(a, m_) == 1;
    case RingKind::Localized:
      return a != 0 && strip_inverted(a) == 1;
  }
  return false;
}

Int BaseRing::strip_inverted(Int a) const {
  a = abs_ck(a);
  if (a == 0) return 0;
  for (Int p : primes_)
    while (a % p == 0) a /= p;
  return a;
}

Int BaseRing::normalize_factor(Int d) const {
  switch (kind_) {
    case RingKind::Integers:
      return abs_ck(d);
    case RingKind::ModM:
      return d == 0 ? m_ : gcd_nonneg(d, m_);
    case RingKind::Localized:
      return strip_inverted(d);
  }
  return 0;
}

Int BaseRing::reduce_entry(Int a) const {
  return kind_ == RingKind::ModM ? mod_reduce(a, m_) : a;
}

void BaseRing::reduce_entries(IntMat& a) const {
  if (kind_ != RingKind::ModM) return;
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) a(i, j) = mod_reduce(a(i, j), m_);
}

std::string BaseRing::str() const {
  switch (kind_) {
    case RingKind::Integers:
      return "Z";
    case RingKind::ModM:
      return fmt::format("Z/{}", m_);
    case RingKind::Localized: {
      std::string s = "Z[";
      for (size_t i = 0; i < primes_.size(); ++i) {
        if (i) s += ",";
        s += fmt::format("1/{}", primes_[i]);
      }
      return s + "]";
    }
  }
  return "?";
}

BaseRing BaseRing::parse(const std::string& text) {
  if (text == "Z") return integers();
  if (text.rfind("Z/", 0) == 0) {
    try {
      size_t used = 0;
      Int m = std::stoll(text.substr(2), &used);
      if (used != text.size() - 2) throw InputError("bad ring: " + text);
      return mod(m);
    } catch (const std::logic_error&) {
      throw InputError("bad ring: " + text);
    }
  }
  if (text.rfind("Z[", 0) == 0 && text.back() == ']') {
    std::vector<Int> primes;
    std::string body = text.substr(2, text.size() - 3);
    size_t pos = 0;
    while (pos < body.size()) {
      size_t comma = body.find(',', pos);
      std::string item = body.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      if (item.rfind("1/", 0) != 0) throw InputError("bad ring: " + text);
      try {
        size_t used = 0;
        primes.push_back(std::stoll(item.substr(2), &used));
        if (used != item.size() - 2) throw InputError("bad ring: " + text);
      } catch (const std::logic_error&) {
        throw InputError("bad ring: " + text);
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (primes.empty()) throw InputError("bad ring: " + text);
    return localized(std::move(primes));
  }
  throw InputError("bad ring: " + text);
}

}  // namespace sst
