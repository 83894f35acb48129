#pragma once

// Symbolic ordinal-valued functions of an index n: CNF terms whose
// coefficients are integer polynomials in n.  These carry hyperdistances
// and drive the growth analysis behind the limited-distance verdicts.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tg/error.hpp"
#include "tg/ordinal.hpp"

namespace tg {

// Integer polynomial in one variable, dense ascending coefficients.
class IntPoly {
 public:
  IntPoly() = default;

  explicit IntPoly(std::vector<long long> coeffs) : c_(std::move(coeffs)) { normalize(); }

  static IntPoly constant(long long v) { return IntPoly({v}); }
  static IntPoly affine(long long slope, long long intercept) {
    return IntPoly({intercept, slope});
  }

  const std::vector<long long>& coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  bool is_constant() const { return c_.size() <= 1; }
  long long constant_value() const { return c_.empty() ? 0 : c_[0]; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  long long leading() const { return c_.empty() ? 0 : c_.back(); }

  long long eval(long long n) const {
    __int128 acc = 0;
    for (std::size_t i = c_.size(); i-- > 0;) {
      acc = acc * n + c_[i];
      if (acc > kLimit || acc < -kLimit) fail(errc::overflow, "polynomial evaluation overflow");
    }
    return static_cast<long long>(acc);
  }

  IntPoly operator+(const IntPoly& o) const {
    std::vector<long long> r(std::max(c_.size(), o.c_.size()), 0);
    for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
    for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
    return IntPoly(std::move(r));
  }

  IntPoly operator-(const IntPoly& o) const {
    std::vector<long long> r(std::max(c_.size(), o.c_.size()), 0);
    for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
    for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] -= o.c_[i];
    return IntPoly(std::move(r));
  }

  IntPoly operator*(const IntPoly& o) const {
    if (is_zero() || o.is_zero()) return IntPoly();
    std::vector<long long> r(c_.size() + o.c_.size() - 1, 0);
    for (std::size_t i = 0; i < c_.size(); ++i)
      for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    return IntPoly(std::move(r));
  }

  // p(s*k + t) as a polynomial in k.
  IntPoly compose_affine(long long s, long long t) const {
    IntPoly result;
    const IntPoly arg = affine(s, t);
    for (std::size_t i = c_.size(); i-- > 0;) {
      result = result * arg + constant(c_[i]);
    }
    return result;
  }

  // Sign of p(n) for all large n: -1, 0 or +1.
  int eventual_sign() const {
    if (c_.empty()) return 0;
    return c_.back() > 0 ? 1 : -1;
  }

  // Least n0 >= 0 with p(n) >= 0 for all n >= n0; nullopt if eventually negative.
  std::optional<long long> nonneg_from() const {
    if (eventual_sign() < 0) return std::nullopt;
    if (is_zero()) return 0;
    long long sum = 0;
    for (long long v : c_) sum += v < 0 ? -v : v;
    long long bound = sum + 1;  // |lead|*n^d dominates the rest beyond this
    long long n0 = bound;
    while (n0 > 0 && eval(n0 - 1) >= 0) --n0;
    return n0;
  }

  friend bool operator==(const IntPoly&, const IntPoly&) = default;

  std::string to_string(const std::string& var = "n") const {
    if (c_.empty()) return "0";
    std::string out;
    for (std::size_t i = c_.size(); i-- > 0;) {
      long long v = c_[i];
      if (v == 0) continue;
      if (!out.empty()) out += v > 0 ? "+" : "-";
      else if (v < 0) out += "-";
      const long long a = v < 0 ? -v : v;
      if (i == 0) {
        out += std::to_string(a);
      } else {
        if (a != 1) out += std::to_string(a);
        out += var;
        if (i > 1) out += "^" + std::to_string(i);
      }
    }
    return out.empty() ? "0" : out;
  }

 private:
  static constexpr __int128 kLimit = static_cast<__int128>(1) << 100;

  void normalize() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }

  std::vector<long long> c_;
};

struct RankDesc {
  bool operator()(const Rank& a, const Rank& b) const { return a > b; }
};

// A residue class n = modulus*k + residue (modulus 1, residue 0 is all n).
struct ResidueClass {
  std::uint64_t modulus = 1;
  std::uint64_t residue = 0;

  bool all() const { return modulus == 1; }

  std::string to_string() const {
    if (all()) return "all n";
    return "n=" + std::to_string(residue) + " (mod " + std::to_string(modulus) + ")";
  }

  friend bool operator==(const ResidueClass&, const ResidueClass&) = default;
  friend auto operator<=>(const ResidueClass&, const ResidueClass&) = default;
};

// Growth classification of an OrdinalPoly against the threshold w^rho:
// either a least witness mu with f(n) <= w^rho * mu for all large n
// (for rank warrow, the least mu with f(n) <= w^mu), or unbounded.
struct Growth {
  bool bounded = false;
  std::uint64_t mu = 0;

  static Growth bounded_by(std::uint64_t mu) { return {true, mu}; }
  static Growth unbounded() { return {false, 0}; }

  friend bool operator==(const Growth&, const Growth&) = default;

  std::string to_string() const {
    return bounded ? "BoundedBy(" + std::to_string(mu) + ")" : "Unbounded";
  }
};

using TermPolys = std::map<Rank, IntPoly, RankDesc>;

// CNF ordinal with integer-polynomial coefficients, valid as an ordinal
// for all n >= valid_from.
class OrdinalPoly {
 public:
  OrdinalPoly() = default;

  static OrdinalPoly make(TermPolys terms, std::uint64_t valid_from = 0) {
    OrdinalPoly f;
    for (auto& [exp, p] : terms) {
      if (p.is_zero()) continue;
      if (!(exp.is_fin() || exp.is_omega()))
        fail(errc::parse, "ordinal-poly exponent must be finite or w");
      const auto n0 = p.nonneg_from();
      if (!n0) fail(errc::fit_failure, "coefficient polynomial eventually negative");
      valid_from = std::max<std::uint64_t>(valid_from, static_cast<std::uint64_t>(*n0));
      f.terms_.emplace(exp, std::move(p));
    }
    f.valid_from_ = valid_from;
    return f;
  }

  static OrdinalPoly constant(const Ordinal& o) {
    TermPolys t;
    for (const auto& term : o.terms())
      t.emplace(term.exp, IntPoly::constant(static_cast<long long>(term.coeff)));
    return make(std::move(t));
  }

  const TermPolys& terms() const { return terms_; }
  std::uint64_t valid_from() const { return valid_from_; }
  bool is_zero() const { return terms_.empty(); }

  Ordinal evaluate(std::uint64_t n) const {
    if (n < valid_from_)
      fail(errc::below_valid_from,
           "n=" + std::to_string(n) + " below validFrom=" + std::to_string(valid_from_));
    std::vector<Ordinal::Term> terms;
    for (const auto& [exp, p] : terms_) {
      const long long v = p.eval(static_cast<long long>(n));
      if (v < 0) fail(errc::internal, "negative coefficient inside valid range");
      if (v > 0) terms.push_back({exp, static_cast<std::uint64_t>(v)});
    }
    return Ordinal::from_terms(std::move(terms));
  }

  friend bool operator==(const OrdinalPoly&, const OrdinalPoly&) = default;

  std::string to_string(const std::string& var = "n") const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [exp, p] : terms_) {
      if (!out.empty()) out += " + ";
      std::string coeff = p.to_string(var);
      const bool wrap = !p.is_constant() || coeff.find('-') != std::string::npos;
      if (exp == Rank::fin(0)) {
        out += wrap ? "(" + coeff + ")" : coeff;
        continue;
      }
      if (exp == Rank::fin(1)) out += "w";
      else if (exp.is_omega()) out += "w^w";
      else out += "w^" + std::to_string(exp.fin_value());
      if (!(p.is_constant() && p.constant_value() == 1))
        out += "*" + (wrap ? "(" + coeff + ")" : coeff);
    }
    return out;
  }

 private:
  TermPolys terms_;
  std::uint64_t valid_from_ = 0;
};

// Decides whether f(n) stays below the rho threshold for all large n,
// returning the least witness.  For Fin(k) and omega the threshold is
// w^rho * mu; for warrow it is f(n) < w^w, with the least mu such that
// f(n) <= w^mu reported as witness.
inline Growth poly_growth_class(const OrdinalPoly& f, Rank rho) {
  if (rho.is_minus_one()) fail(errc::rank_mismatch, "growth threshold needs rank >= 0");

  if (rho.is_arrow_omega()) {
    for (const auto& [exp, p] : f.terms())
      if (exp.is_omega()) return Growth::unbounded();
    if (f.is_zero()) return Growth::bounded_by(0);
    const auto& [top, p] = *f.terms().begin();
    const std::uint32_t k = top.fin_value();
    const bool exactly_omega_pow = p.is_constant() && p.constant_value() == 1 &&
                                   f.terms().size() == 1;
    return Growth::bounded_by(exactly_omega_pow ? k : k + 1);
  }

  std::uint64_t mu = 0;
  bool lower_present = false;
  for (const auto& [exp, p] : f.terms()) {
    if (exp > rho) return Growth::unbounded();
    if (exp == rho) {
      if (!p.is_constant()) return Growth::unbounded();
      mu = static_cast<std::uint64_t>(p.constant_value());
    } else {
      lower_present = true;
    }
  }
  return Growth::bounded_by(mu + (lower_present ? 1 : 0));
}

// Termwise signed difference f - g, used by the closeness analysis.
inline TermPolys term_delta(const OrdinalPoly& f, const OrdinalPoly& g) {
  TermPolys d;
  for (const auto& [exp, p] : f.terms()) d[exp] = p;
  for (const auto& [exp, p] : g.terms()) {
    auto it = d.find(exp);
    if (it == d.end()) d[exp] = IntPoly() - p;
    else {
      it->second = it->second - p;
      if (it->second.is_zero()) d.erase(it);
    }
  }
  for (auto it = d.begin(); it != d.end();) {
    if (it->second.is_zero()) it = d.erase(it);
    else ++it;
  }
  return d;
}

// Eventual ordering of f(n) vs g(n): decided at the highest exponent
// whose coefficient polynomials eventually differ.
inline Cmp compare_eventually(const OrdinalPoly& f, const OrdinalPoly& g) {
  const TermPolys d = term_delta(f, g);
  for (const auto& [exp, p] : d) {
    const int s = p.eventual_sign();
    if (s > 0) return Cmp::GT;
    if (s < 0) return Cmp::LT;
  }
  return Cmp::EQ;
}

// True iff f(n) - g(n) >= w^rho * m for every m, for all large n: the
// signed difference must either keep a positive term above rho, or have
// an unbounded positive coefficient at rho itself.
inline bool delta_exceeds_every_multiple(const OrdinalPoly& f, const OrdinalPoly& g, Rank rho) {
  const TermPolys d = term_delta(f, g);
  for (const auto& [exp, p] : d) {
    const int s = p.eventual_sign();
    if (s == 0) continue;
    if (s < 0) return false;
    if (exp > rho) return true;
    if (exp == rho) return !p.is_constant();
    return false;  // top surviving term below the threshold
  }
  return false;
}

}  // namespace tg
