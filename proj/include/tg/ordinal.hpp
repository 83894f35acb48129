#pragma once

// Exact ordinal arithmetic in Cantor normal form, capped below w^(w+1).
// Exponents are either finite naturals or the single limit exponent w,
// which is all the rank ceiling nu <= w ever needs.

#include <algorithm>
#include <compare>
#include <cctype>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tg/error.hpp"

namespace tg {

// Rank of a wnode, wtip or wsection: -1, 0, 1, 2, ..., warrow, omega.
// The -1 rank only ever appears as a tip rank (a branch extremity).
class Rank {
 public:
  enum class Kind : std::uint8_t { MinusOne = 0, Fin = 1, ArrowOmega = 2, Omega = 3 };

  constexpr Rank() : kind_(Kind::Fin), k_(0) {}

  static constexpr Rank minus_one() { return Rank(Kind::MinusOne, 0); }
  static constexpr Rank fin(std::uint32_t k) { return Rank(Kind::Fin, k); }
  static constexpr Rank arrow_omega() { return Rank(Kind::ArrowOmega, 0); }
  static constexpr Rank omega() { return Rank(Kind::Omega, 0); }

  constexpr Kind kind() const { return kind_; }
  constexpr bool is_minus_one() const { return kind_ == Kind::MinusOne; }
  constexpr bool is_fin() const { return kind_ == Kind::Fin; }
  constexpr bool is_arrow_omega() const { return kind_ == Kind::ArrowOmega; }
  constexpr bool is_omega() const { return kind_ == Kind::Omega; }
  constexpr std::uint32_t fin_value() const { return k_; }

  // Successor in the rank order; used for tip-traversal costs (alpha -> alpha+1).
  Rank succ() const {
    switch (kind_) {
      case Kind::MinusOne: return fin(0);
      case Kind::Fin: return fin(k_ + 1);
      case Kind::ArrowOmega: return omega();
      case Kind::Omega: fail(errc::rank_above_graph, "rank omega has no successor here");
    }
    fail(errc::internal, "bad rank");
  }

  // Predecessor: the "rho-1" of the sections machinery; pred(omega) = warrow.
  Rank pred() const {
    switch (kind_) {
      case Kind::MinusOne: fail(errc::rank_mismatch, "rank -1 has no predecessor");
      case Kind::Fin:
        if (k_ == 0) return minus_one();
        return fin(k_ - 1);
      case Kind::ArrowOmega: fail(errc::arrow_omega_rank, "rank warrow has no predecessor");
      case Kind::Omega: return arrow_omega();
    }
    fail(errc::internal, "bad rank");
  }

  friend constexpr bool operator==(const Rank& a, const Rank& b) {
    return a.kind_ == b.kind_ && a.k_ == b.k_;
  }
  friend constexpr auto operator<=>(const Rank& a, const Rank& b) {
    if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
    return a.k_ <=> b.k_;
  }

  std::string to_string() const {
    switch (kind_) {
      case Kind::MinusOne: return "-1";
      case Kind::Fin: return std::to_string(k_);
      case Kind::ArrowOmega: return "warrow";
      case Kind::Omega: return "omega";
    }
    return "?";
  }

  static Rank parse(std::string_view s) {
    if (s == "-1") return minus_one();
    if (s == "warrow") return arrow_omega();
    if (s == "omega") return omega();
    if (!s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit((unsigned char)c); })) {
      return fin(static_cast<std::uint32_t>(std::stoul(std::string(s))));
    }
    fail(errc::parse, "bad rank '" + std::string(s) + "'");
  }

 private:
  constexpr Rank(Kind kind, std::uint32_t k) : kind_(kind), k_(k) {}

  Kind kind_;
  std::uint32_t k_;
};

enum class Cmp { LT, EQ, GT };

// Ordinal below w^(w+1), held in Cantor normal form: a strictly
// descending list of (exponent, positive coefficient) terms.  The empty
// list is 0.  Exponents are Fin(k) or Omega; warrow is a rank, not an
// exponent.
class Ordinal {
 public:
  struct Term {
    Rank exp;
    std::uint64_t coeff;
    friend bool operator==(const Term&, const Term&) = default;
  };

  Ordinal() = default;

  static Ordinal zero() { return Ordinal(); }

  static Ordinal finite(std::uint64_t n) {
    Ordinal o;
    if (n > 0) o.terms_.push_back({Rank::fin(0), n});
    return o;
  }

  static Ordinal single(Rank exp, std::uint64_t coeff) {
    check_exponent(exp);
    Ordinal o;
    if (coeff > 0) o.terms_.push_back({exp, coeff});
    return o;
  }

  // From arbitrary (exp, coeff) pairs: sorts and merges.
  static Ordinal from_terms(std::vector<Term> terms) {
    for (const auto& t : terms) check_exponent(t.exp);
    std::sort(terms.begin(), terms.end(),
              [](const Term& a, const Term& b) { return a.exp > b.exp; });
    Ordinal o;
    for (const auto& t : terms) {
      if (t.coeff == 0) continue;
      if (!o.terms_.empty() && o.terms_.back().exp == t.exp) {
        o.terms_.back().coeff = checked_add(o.terms_.back().coeff, t.coeff);
      } else {
        o.terms_.push_back(t);
      }
    }
    return o;
  }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  bool is_finite() const {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].exp == Rank::fin(0));
  }

  std::uint64_t finite_value() const {
    if (is_zero()) return 0;
    if (!is_finite()) fail(errc::internal, "ordinal is not finite");
    return terms_[0].coeff;
  }

  std::uint64_t coeff_at(Rank exp) const {
    for (const auto& t : terms_)
      if (t.exp == exp) return t.coeff;
    return 0;
  }

  Rank leading_exp() const {
    if (is_zero()) fail(errc::internal, "zero ordinal has no leading exponent");
    return terms_[0].exp;
  }

  friend bool operator==(const Ordinal& a, const Ordinal& b) { return a.terms_ == b.terms_; }

  friend std::strong_ordering operator<=>(const Ordinal& a, const Ordinal& b) {
    const std::size_t n = std::min(a.terms_.size(), b.terms_.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (auto c = a.terms_[i].exp <=> b.terms_[i].exp; c != 0) return c;
      if (auto c = a.terms_[i].coeff <=> b.terms_[i].coeff; c != 0) return c;
    }
    return a.terms_.size() <=> b.terms_.size();
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (i) out += "+";
      const auto& t = terms_[i];
      if (t.exp == Rank::fin(0)) {
        out += std::to_string(t.coeff);
        continue;
      }
      if (t.exp == Rank::fin(1)) {
        out += "w";
      } else if (t.exp.is_omega()) {
        out += "w^w";
      } else {
        out += "w^" + std::to_string(t.exp.fin_value());
      }
      if (t.coeff != 1) out += "*" + std::to_string(t.coeff);
    }
    return out;
  }

  static std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    if (a > std::numeric_limits<std::uint64_t>::max() - b)
      fail(errc::overflow, "ordinal coefficient overflow");
    return a + b;
  }

  static std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    if (b != 0 && a > std::numeric_limits<std::uint64_t>::max() / b)
      fail(errc::overflow, "ordinal coefficient overflow");
    return a * b;
  }

 private:
  static void check_exponent(Rank exp) {
    if (!(exp.is_fin() || exp.is_omega()))
      fail(errc::parse, "ordinal exponent must be finite or w, got " + exp.to_string());
  }

  std::vector<Term> terms_;
};

inline Cmp compare(const Ordinal& a, const Ordinal& b) {
  const auto c = a <=> b;
  if (c < 0) return Cmp::LT;
  if (c > 0) return Cmp::GT;
  return Cmp::EQ;
}

// Natural (Hessenberg) sum: coefficient-wise addition of CNF terms.
inline Ordinal nat_sum(const Ordinal& a, const Ordinal& b) {
  std::vector<Ordinal::Term> merged;
  const auto& ta = a.terms();
  const auto& tb = b.terms();
  std::size_t i = 0, j = 0;
  while (i < ta.size() || j < tb.size()) {
    if (j == tb.size() || (i < ta.size() && ta[i].exp > tb[j].exp)) {
      merged.push_back(ta[i++]);
    } else if (i == ta.size() || tb[j].exp > ta[i].exp) {
      merged.push_back(tb[j++]);
    } else {
      merged.push_back({ta[i].exp, Ordinal::checked_add(ta[i].coeff, tb[j].coeff)});
      ++i, ++j;
    }
  }
  return Ordinal::from_terms(std::move(merged));
}

inline Ordinal operator+(const Ordinal& a, const Ordinal& b) { return nat_sum(a, b); }

// Scale by a natural: every coefficient multiplied by k.
inline Ordinal nat_mul(const Ordinal& a, std::uint64_t k) {
  if (k == 0) return Ordinal::zero();
  std::vector<Ordinal::Term> terms;
  terms.reserve(a.terms().size());
  for (const auto& t : a.terms()) terms.push_back({t.exp, Ordinal::checked_mul(t.coeff, k)});
  return Ordinal::from_terms(std::move(terms));
}

// w^r as an ordinal; r must not be warrow (it is a rank, never an
// exponent in the distance bounds) nor -1.
inline Ordinal omega_pow(Rank r) {
  if (r.is_arrow_omega()) fail(errc::arrow_omega_rank, "w^warrow is not a CNF exponent");
  if (r.is_minus_one()) fail(errc::rank_mismatch, "w^-1 is not an ordinal");
  return Ordinal::single(r, 1);
}

inline bool dominates(const Ordinal& a, const Ordinal& b) {
  for (const auto& t : b.terms())
    if (a.coeff_at(t.exp) < t.coeff) return false;
  return true;
}

// Coefficient-wise truncated difference, defined only when every
// coefficient of b is <= the matching coefficient of a.  Failure means a
// closeness comparison has to fall back to symbolic growth analysis.
inline Ordinal nat_diff(const Ordinal& a, const Ordinal& b) {
  if (!dominates(a, b))
    fail(errc::dominance, a.to_string() + " does not dominate " + b.to_string());
  std::vector<Ordinal::Term> terms;
  for (const auto& t : a.terms()) {
    const std::uint64_t sub = b.coeff_at(t.exp);
    if (t.coeff > sub) terms.push_back({t.exp, t.coeff - sub});
  }
  return Ordinal::from_terms(std::move(terms));
}

inline Ordinal min_ordinal(std::span<const Ordinal> s) {
  if (s.empty()) fail(errc::empty_set, "min of empty ordinal set");
  return *std::min_element(s.begin(), s.end());
}

inline Ordinal min_ordinal(std::initializer_list<Ordinal> s) {
  return min_ordinal(std::span<const Ordinal>(s.begin(), s.size()));
}

namespace detail {

// Strict parser for the canonical ordinal text syntax: terms "w^k*c"
// joined by '+', highest exponent first, "w" short for "w^1", "w^w" for
// the limit exponent, plain integers for the finite part, "0" alone for
// zero.  Round-trips with Ordinal::to_string bit-exactly.
class OrdinalParser {
 public:
  explicit OrdinalParser(std::string_view s) : s_(s) {}

  Ordinal parse() {
    if (s_ == "0") return Ordinal::zero();
    std::vector<Ordinal::Term> terms;
    while (true) {
      terms.push_back(term());
      if (pos_ == s_.size()) break;
      expect('+');
    }
    for (std::size_t i = 1; i < terms.size(); ++i) {
      if (!(terms[i - 1].exp > terms[i].exp))
        fail(errc::parse, "ordinal terms out of order in '" + std::string(s_) + "'");
    }
    return Ordinal::from_terms(std::move(terms));
  }

 private:
  Ordinal::Term term() {
    if (peek() == 'w') {
      ++pos_;
      Rank exp = Rank::fin(1);
      if (pos_ < s_.size() && s_[pos_] == '^') {
        ++pos_;
        if (peek() == 'w') {
          ++pos_;
          exp = Rank::omega();
        } else {
          const std::uint64_t k = integer();
          if (k < 2) fail(errc::parse, "non-canonical exponent w^" + std::to_string(k));
          exp = Rank::fin(static_cast<std::uint32_t>(k));
        }
      }
      std::uint64_t coeff = 1;
      if (pos_ < s_.size() && s_[pos_] == '*') {
        ++pos_;
        coeff = integer();
        if (coeff < 2) fail(errc::parse, "non-canonical coefficient *" + std::to_string(coeff));
      }
      return {exp, coeff};
    }
    const std::uint64_t c = integer();
    if (c == 0) fail(errc::parse, "zero term in ordinal");
    return {Rank::fin(0), c};
  }

  std::uint64_t integer() {
    if (pos_ >= s_.size() || !std::isdigit((unsigned char)s_[pos_]))
      fail(errc::parse, "expected integer at offset " + std::to_string(pos_) + " in '" +
                            std::string(s_) + "'");
    if (s_[pos_] == '0' && pos_ + 1 < s_.size() && std::isdigit((unsigned char)s_[pos_ + 1]))
      fail(errc::parse, "leading zero in integer");
    std::uint64_t v = 0;
    while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) {
      v = Ordinal::checked_mul(v, 10);
      v = Ordinal::checked_add(v, static_cast<std::uint64_t>(s_[pos_] - '0'));
      ++pos_;
    }
    return v;
  }

  char peek() {
    if (pos_ >= s_.size()) fail(errc::parse, "unexpected end of ordinal '" + std::string(s_) + "'");
    return s_[pos_];
  }

  void expect(char c) {
    if (peek() != c)
      fail(errc::parse, std::string("expected '") + c + "' at offset " + std::to_string(pos_));
    ++pos_;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Ordinal parse_ordinal(std::string_view s) { return detail::OrdinalParser(s).parse(); }

}  // namespace tg
