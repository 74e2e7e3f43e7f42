#include "sst/graded_ring.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include <fmt/format.h>

namespace sst {

struct GradedRing::Data {
  BaseRing base;
  int wlo = 0, whi = 0;
  std::vector<std::pair<std::string, int>> gens;
  SignRule rule = SignRule::Commutative;
  std::map<int, std::vector<std::vector<int>>> bases;
  std::map<int, std::map<std::vector<int>, Index>> index;
  std::map<int, IntMat> lattices;
};

namespace {

using Expvec = std::vector<int>;

void enumerate_monomials(const std::vector<int>& absdeg, int target, size_t at, Expvec& cur,
                         std::vector<Expvec>& out) {
  if (at == absdeg.size()) {
    if (target == 0) out.push_back(cur);
    return;
  }
  for (int e = 0; e * absdeg[at] <= target; ++e) {
    cur[at] = e;
    enumerate_monomials(absdeg, target - e * absdeg[at], at + 1, cur, out);
  }
  cur[at] = 0;
}

int koszul_exponent(const GradedRing::Data& d, const Expvec& e, const Expvec& f) {
  int total = 0;
  for (size_t j = 0; j < f.size(); ++j) {
    int pj = std::abs(d.gens[j].second) % 2;
    if (pj == 0 || f[j] == 0) continue;
    int later = 0;
    for (size_t i = j + 1; i < e.size(); ++i)
      later += e[i] * (std::abs(d.gens[i].second) % 2);
    total += f[j] * later;
  }
  return total;
}

IntMat canon_ring_lattice(const BaseRing& base, Index g, IntMat cols) {
  if (base.kind() == RingKind::ModM)
    cols = hcat(cols, (base.modulus() * IntMat::Identity(g, g)).eval());
  if (base.kind() == RingKind::Localized) cols = saturate_lattice(cols, base.inverted_primes());
  return hnf_cols(cols);
}

/* raw product of a monomial with an element vector, no reduction */
IntVec mono_mul_raw(const GradedRing::Data& d, const Expvec& mono, int mdeg, int edeg,
                    const IntVec& ecoeffs) {
  int out_deg = mdeg + edeg;
  const auto& out_basis = d.bases.at(out_deg);
  const auto& in_basis = d.bases.at(edeg);
  IntVec out = IntVec::Zero(static_cast<Index>(out_basis.size()));
  for (Index t = 0; t < ecoeffs.size(); ++t) {
    if (ecoeffs[t] == 0) continue;
    const Expvec& f = in_basis[t];
    Expvec merged(mono.size());
    for (size_t i = 0; i < mono.size(); ++i) merged[i] = mono[i] + f[i];
    Int c = ecoeffs[t];
    if (d.rule == SignRule::Koszul && koszul_exponent(d, mono, f) % 2 != 0) c = neg_ck(c);
    Index k = d.index.at(out_deg).at(merged);
    out[k] = add_ck(out[k], c);
  }
  return out;
}

}  // namespace

GradedRing GradedRing::create(BaseRing base, int wlo, int whi,
                              std::vector<std::pair<std::string, int>> gens, SignRule rule) {
  if (wlo > 0 || whi < 0) throw InputError("degree window must contain 0");
  auto data = std::make_shared<Data>();
  data->base = std::move(base);
  data->wlo = wlo;
  data->whi = whi;
  data->rule = rule;
  int sign = 0;
  for (const auto& [name, deg] : gens) {
    if (deg == 0) throw InputError(fmt::format("generator {} has degree 0", name));
    if (deg < wlo || deg > whi)
      throw InputError(fmt::format("generator {} does not fit the window", name));
    int s = deg > 0 ? 1 : -1;
    if (sign == 0) sign = s;
    if (s != sign) throw InputError("generator degrees must share a sign");
    if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_'))
      throw InputError(fmt::format("bad generator name '{}'", name));
    for (char c : name)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
        throw InputError(fmt::format("bad generator name '{}'", name));
    for (const auto& [other, od] : data->gens)
      if (other == name) throw InputError(fmt::format("duplicate generator {}", name));
    data->gens.emplace_back(name, deg);
  }
  std::vector<int> absdeg;
  for (const auto& [name, deg] : data->gens) absdeg.push_back(std::abs(deg));
  for (int d = wlo; d <= whi; ++d) {
    std::vector<Expvec> monos;
    int target = sign >= 0 ? d : -d;
    if (target >= 0) {
      Expvec cur(absdeg.size(), 0);
      enumerate_monomials(absdeg, target, 0, cur, monos);
    }
    for (Index i = 0; i < static_cast<Index>(monos.size()); ++i)
      data->index[d][monos[i]] = i;
    Index g = static_cast<Index>(monos.size());
    data->bases[d] = std::move(monos);
    data->lattices[d] = canon_ring_lattice(data->base, g, IntMat::Zero(g, 0));
  }
  GradedRing r;
  r.data_ = std::move(data);
  return r;
}

GradedRing GradedRing::with_relations(const std::vector<RingElement>& rels) const {
  auto data = std::make_shared<Data>(*data_);
  for (const RingElement& rel : rels) {
    if (!rel.ring.same(*this)) throw InputError("relation from a different ring");
    if (rel.hdegree != 0) throw InputError("ring relations cannot carry a homological degree");
  }
  for (int d = data->wlo; d <= data->whi; ++d) {
    Index g = static_cast<Index>(data->bases.at(d).size());
    std::vector<IntVec> cols;
    for (const RingElement& rel : rels) {
      int s = d - rel.degree;
      if (s < data->wlo || s > data->whi) continue;
      for (const Expvec& m : data->bases.at(s))
        cols.push_back(mono_mul_raw(*data, m, s, rel.degree, rel.coeffs));
    }
    IntMat add = IntMat::Zero(g, static_cast<Index>(cols.size()));
    for (Index c = 0; c < add.cols(); ++c) add.col(c) = cols[c];
    data->lattices[d] = canon_ring_lattice(data->base, g, hcat(data->lattices.at(d), add));
  }
  GradedRing r;
  r.data_ = std::move(data);
  return r;
}

const BaseRing& GradedRing::base() const { return data_->base; }
int GradedRing::window_lo() const { return data_->wlo; }
int GradedRing::window_hi() const { return data_->whi; }
SignRule GradedRing::sign_rule() const { return data_->rule; }
Index GradedRing::gen_count() const { return static_cast<Index>(data_->gens.size()); }
const std::string& GradedRing::gen_name(Index i) const { return data_->gens[i].first; }
int GradedRing::gen_degree(Index i) const { return data_->gens[i].second; }

std::ptrdiff_t GradedRing::gen_index(const std::string& name) const {
  for (size_t i = 0; i < data_->gens.size(); ++i)
    if (data_->gens[i].first == name) return static_cast<std::ptrdiff_t>(i);
  return -1;
}

bool GradedRing::in_window(int d) const { return d >= data_->wlo && d <= data_->whi; }

const std::vector<std::vector<int>>& GradedRing::basis(int d) const {
  if (!in_window(d)) throw WindowError(fmt::format("degree {} outside window [{}, {}]", d,
                                                   data_->wlo, data_->whi));
  return data_->bases.at(d);
}

const IntMat& GradedRing::relation_lattice(int d) const {
  if (!in_window(d)) throw WindowError(fmt::format("degree {} outside window [{}, {}]", d,
                                                   data_->wlo, data_->whi));
  return data_->lattices.at(d);
}

std::string GradedRing::str() const {
  std::string gens;
  for (const auto& [name, deg] : data_->gens) {
    if (!gens.empty()) gens += ",";
    gens += fmt::format("{}({})", name, deg);
  }
  return fmt::format("{}[{}] window [{},{}]", data_->base.str(), gens, data_->wlo, data_->whi);
}

/* ---- elements ---- */

RingElement ring_zero(const GradedRing& r, int degree) {
  if (!r.in_window(degree))
    throw WindowError(fmt::format("degree {} outside window", degree));
  return {r, degree, 0, IntVec::Zero(static_cast<Index>(r.basis(degree).size()))};
}

RingElement ring_one(const GradedRing& r) { return ring_scalar(r, 1); }

RingElement ring_scalar(const GradedRing& r, Int n) {
  IntVec v = IntVec::Zero(1);
  v[0] = n;
  return ring_element(r, 0, 0, std::move(v));
}

RingElement ring_gen(const GradedRing& r, const std::string& name) {
  auto i = r.gen_index(name);
  if (i < 0) throw InputError(fmt::format("unknown generator {}", name));
  int d = r.gen_degree(i);
  std::vector<int> exp(r.gen_count(), 0);
  exp[i] = 1;
  IntVec v = IntVec::Zero(static_cast<Index>(r.basis(d).size()));
  v[r.data().index.at(d).at(exp)] = 1;
  return ring_element(r, d, 0, v);
}

RingElement ring_element(const GradedRing& r, int degree, int hdegree, IntVec coeffs) {
  if (!r.in_window(degree))
    throw WindowError(fmt::format("degree {} outside window", degree));
  if (coeffs.size() != static_cast<Index>(r.basis(degree).size()))
    throw InputError("coefficient vector does not match the basis");
  IntVec v = coeffs;
  if (r.base().kind() == RingKind::ModM)
    for (Index i = 0; i < v.size(); ++i) v[i] = mod_reduce(v[i], r.base().modulus());
  const IntMat& lat = r.relation_lattice(degree);
  if (lat.cols() > 0) v = hnf_reduce(lat, v);
  return {r, degree, hdegree, std::move(v)};
}

RingElement add_elements(const RingElement& a, const RingElement& b) {
  if (!a.ring.same(b.ring)) throw InputError("elements of different rings");
  if (a.degree != b.degree || a.hdegree != b.hdegree)
    throw InputError("sum of elements in different degrees");
  IntVec v(a.coeffs.size());
  for (Index i = 0; i < v.size(); ++i) v[i] = add_ck(a.coeffs[i], b.coeffs[i]);
  return ring_element(a.ring, a.degree, a.hdegree, std::move(v));
}

RingElement negate_element(const RingElement& a) { return scale_element(-1, a); }

RingElement scale_element(Int n, const RingElement& a) {
  IntVec v(a.coeffs.size());
  for (Index i = 0; i < v.size(); ++i) v[i] = mul_ck(n, a.coeffs[i]);
  return ring_element(a.ring, a.degree, a.hdegree, std::move(v));
}

RingElement mul_elements(const RingElement& a, const RingElement& b) {
  if (!a.ring.same(b.ring)) throw InputError("elements of different rings");
  const auto& d = a.ring.data();
  int deg = a.degree + b.degree;
  if (!a.ring.in_window(deg))
    throw WindowError(fmt::format("product degree {} outside window [{}, {}]", deg, d.wlo,
                                  d.whi));
  const auto& abasis = d.bases.at(a.degree);
  IntVec out = IntVec::Zero(static_cast<Index>(d.bases.at(deg).size()));
  for (Index i = 0; i < a.coeffs.size(); ++i) {
    if (a.coeffs[i] == 0) continue;
    IntVec part = mono_mul_raw(d, abasis[i], a.degree, b.degree, b.coeffs);
    for (Index k = 0; k < out.size(); ++k) out[k] = fma_ck(out[k], a.coeffs[i], part[k]);
  }
  return ring_element(a.ring, deg, a.hdegree + b.hdegree, std::move(out));
}

RingElement pow_element(const RingElement& a, int n) {
  if (n < 0) throw InputError("negative power");
  RingElement acc = ring_one(a.ring);
  for (int i = 0; i < n; ++i) acc = mul_elements(acc, a);
  return acc;
}

bool elements_equal(const RingElement& a, const RingElement& b) {
  return a.ring.same(b.ring) && a.degree == b.degree && a.hdegree == b.hdegree &&
         a.coeffs == b.coeffs;
}

std::optional<Int> integer_content(const RingElement& a) {
  if (a.degree != 0 || a.hdegree != 0) return std::nullopt;
  return a.coeffs[0];
}

/* ---- parsing and printing ---- */

namespace {

struct Lexer {
  const std::string& s;
  size_t pos = 0;

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  char peek() {
    skip();
    return pos < s.size() ? s[pos] : '\0';
  }
  bool eat(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }
  Int number() {
    skip();
    size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) throw InputError(fmt::format("expected a number at position {}", pos));
    try {
      return std::stoll(s.substr(start, pos - start));
    } catch (const std::out_of_range&) {
      throw InputError("number out of range");
    }
  }
  std::string name() {
    skip();
    size_t start = pos;
    while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
      ++pos;
    return s.substr(start, pos - start);
  }
};

RingElement parse_term(const GradedRing& r, Lexer& lx) {
  RingElement acc = ring_one(r);
  bool first = true;
  while (true) {
    char c = lx.peek();
    if (std::isdigit(static_cast<unsigned char>(c))) {
      acc = scale_element(lx.number(), acc);
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string n = lx.name();
      RingElement g = ring_gen(r, n);
      int e = 1;
      if (lx.eat('^')) e = static_cast<int>(lx.number());
      acc = mul_elements(acc, pow_element(g, e));
    } else if (first) {
      throw InputError(fmt::format("expected a term at position {}", lx.pos));
    } else {
      return acc;
    }
    first = false;
    if (!lx.eat('*')) return acc;
  }
}

}  // namespace

RingElement parse_element(const GradedRing& r, const std::string& s) {
  Lexer lx{s};
  std::optional<RingElement> sum;
  bool neg = lx.eat('-');
  while (true) {
    RingElement t = parse_term(r, lx);
    if (neg) t = negate_element(t);
    if (!t.is_zero()) {
      if (!sum)
        sum = t;
      else if (sum->degree != t.degree)
        throw InputError("terms of different degrees");
      else
        sum = add_elements(*sum, t);
    }
    if (lx.eat('+'))
      neg = false;
    else if (lx.eat('-'))
      neg = true;
    else if (lx.peek() == '\0')
      break;
    else
      throw InputError(fmt::format("unexpected character '{}' at position {}", lx.peek(), lx.pos));
  }
  return sum ? *sum : ring_zero(r, 0);
}

std::string element_str(const RingElement& a) {
  const auto& basis = a.ring.basis(a.degree);
  std::string out;
  for (Index i = 0; i < a.coeffs.size(); ++i) {
    Int c = a.coeffs[i];
    if (c == 0) continue;
    std::string mono;
    for (size_t j = 0; j < basis[i].size(); ++j) {
      if (basis[i][j] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += a.ring.gen_name(static_cast<Index>(j));
      if (basis[i][j] > 1) mono += fmt::format("^{}", basis[i][j]);
    }
    std::string body;
    Int ac = c < 0 ? -c : c;
    if (mono.empty())
      body = fmt::format("{}", ac);
    else if (ac == 1)
      body = mono;
    else
      body = fmt::format("{}*{}", ac, mono);
    if (out.empty())
      out = (c < 0 ? "-" : "") + body;
    else
      out += (c < 0 ? " - " : " + ") + body;
  }
  return out.empty() ? "0" : out;
}

Presented ring_degree_module(const GradedRing& r, int d) {
  Index g = static_cast<Index>(r.basis(d).size());
  PresentationParts parts;
  parts[d] = {g, r.relation_lattice(d)};
  return present_module(r.base(), parts);
}

}  // namespace sst
