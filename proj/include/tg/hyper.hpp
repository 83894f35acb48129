#pragma once

// Computable stand-ins for hypernodes: finitely presented wnode
// sequences.  Verdicts follow Frechet semantics: a property holds (Yes)
// when it holds cofinitely, fails (No) when its negation holds
// cofinitely, and is reported ultrafilter-dependent otherwise, split
// into the residue classes where each answer holds.

#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "tg/error.hpp"
#include "tg/metric.hpp"
#include "tg/ordinal_poly.hpp"
#include "tg/sections.hpp"
#include "tg/unroll.hpp"
#include "tg/wgraph.hpp"

namespace tg {

// Index map n -> max(lo, floor((a*n + b) / c)); c = 1, lo = 0 is plain affine.
struct IndexMap {
  std::uint64_t a = 1, b = 0, c = 1, lo = 0;

  std::uint64_t at(std::uint64_t n) const { return std::max(lo, (a * n + b) / c); }
  bool plain_affine() const { return c == 1 && lo == 0; }
  friend bool operator==(const IndexMap&, const IndexMap&) = default;
};

class Hypernode;

namespace hyperdetail {
struct Standard {
  NodeRef node;
};
struct Indexed {
  IndexedNodes fam;
  IndexMap map;
};
struct Mix {
  std::uint64_t modulus = 2;
  std::vector<Hypernode> branches;
};
struct Patch {
  std::shared_ptr<const Hypernode> base;
  std::map<std::uint64_t, NodeRef> overrides;
};
}  // namespace hyperdetail

class Hypernode {
 public:
  using Standard = hyperdetail::Standard;
  using Indexed = hyperdetail::Indexed;
  using Mix = hyperdetail::Mix;
  using Patch = hyperdetail::Patch;

  Hypernode() : v_(Standard{}) {}
  explicit Hypernode(Standard s) : v_(std::move(s)) {}
  explicit Hypernode(Indexed i) : v_(std::move(i)) {}
  explicit Hypernode(Mix m) : v_(std::move(m)) {}
  explicit Hypernode(Patch p) : v_(std::move(p)) {}

  static Hypernode std_node(NodeRef n) { return Hypernode(Standard{std::move(n)}); }
  static Hypernode arm_indexed(std::string arm, IndexMap map, std::string local) {
    return Hypernode(Indexed{IndexedNodes::arm_block(std::move(arm), std::move(local)), map});
  }
  static Hypernode ray_indexed(IndexedNodes fam, IndexMap map) {
    return Hypernode(Indexed{std::move(fam), map});
  }
  static Hypernode interleave(std::uint64_t m, std::vector<Hypernode> branches) {
    if (m < 2 || branches.size() != m)
      fail(errc::parse, "interleave needs modulus >= 2 and one branch per residue");
    return Hypernode(Mix{m, std::move(branches)});
  }
  static Hypernode patch(Hypernode base, std::map<std::uint64_t, NodeRef> overrides) {
    return Hypernode(
        Patch{std::make_shared<const Hypernode>(std::move(base)), std::move(overrides)});
  }

  const std::variant<Standard, Indexed, Mix, Patch>& v() const { return v_; }

  NodeRef at(std::uint64_t n) const {
    if (const auto* p = std::get_if<Patch>(&v_)) {
      if (const auto it = p->overrides.find(n); it != p->overrides.end()) return it->second;
      return p->base->at(n);
    }
    if (const auto* m = std::get_if<Mix>(&v_)) return m->branches[n % m->modulus].at(n);
    if (const auto* i = std::get_if<Indexed>(&v_)) return i->fam.at(i->map.at(n));
    return std::get<Standard>(v_).node;
  }

  // Least common refinement of all interleave moduli and floor divisors.
  std::uint64_t modulus() const {
    std::uint64_t m = 1;
    const auto mix = [&](std::uint64_t v) { m = std::lcm(m, v); };
    if (const auto* p = std::get_if<Patch>(&v_)) mix(p->base->modulus());
    if (const auto* mx = std::get_if<Mix>(&v_)) {
      mix(mx->modulus);
      for (const auto& b : mx->branches) mix(b.modulus());
    }
    if (const auto* i = std::get_if<Indexed>(&v_)) mix(i->map.c);
    if (m > 4096) fail(errc::parse, "presentation residue refinement too large");
    return m;
  }

  std::uint64_t max_patch_index() const {
    std::uint64_t mx = 0;
    if (const auto* p = std::get_if<Patch>(&v_)) {
      mx = p->base->max_patch_index();
      if (!p->overrides.empty()) mx = std::max(mx, p->overrides.rbegin()->first + 1);
    }
    if (const auto* m = std::get_if<Mix>(&v_))
      for (const auto& b : m->branches) mx = std::max(mx, b.max_patch_index());
    return mx;
  }

  std::string to_string() const;

 private:
  std::variant<Standard, Indexed, Mix, Patch> v_;
};

// A sequence restricted to one residue class n = M*k + r, reduced to
// either a fixed node or an affine index family in k.
struct ResolvedSeq {
  bool constant = true;
  NodeRef node;
  IndexedNodes fam;
  std::uint64_t slope = 0, intercept = 0;
  std::uint64_t valid_k = 0;  // exact description for all k >= valid_k

  std::uint64_t index_at(std::uint64_t k) const { return slope * k + intercept; }
  NodeRef at_k(std::uint64_t k) const { return constant ? node : fam.at(index_at(k)); }
};

inline ResolvedSeq resolve_residue(const Hypernode& p, std::uint64_t M, std::uint64_t r) {
  if (const auto* pa = std::get_if<Hypernode::Patch>(&p.v())) {
    ResolvedSeq s = resolve_residue(*pa->base, M, r);
    const std::uint64_t mx = p.max_patch_index();
    if (mx > 0) s.valid_k = std::max(s.valid_k, mx / M + 1);
    return s;
  }
  if (const auto* m = std::get_if<Hypernode::Mix>(&p.v())) {
    if (M % m->modulus != 0) fail(errc::internal, "refinement modulus misses an interleave");
    return resolve_residue(m->branches[r % m->modulus], M, r);
  }
  if (const auto* i = std::get_if<Hypernode::Indexed>(&p.v())) {
    const auto& map = i->map;
    ResolvedSeq s;
    if (map.a == 0) {
      s.constant = true;
      s.node = i->fam.at(map.at(0));
      return s;
    }
    if ((map.a * M) % map.c != 0) fail(errc::internal, "refinement modulus misses a divisor");
    s.constant = false;
    s.fam = i->fam;
    s.slope = map.a * M / map.c;
    s.intercept = (map.a * r + map.b) / map.c;
    s.valid_k = 0;
    while (s.index_at(s.valid_k) < map.lo) ++s.valid_k;  // clamp region
    if (map.lo > 0) s.intercept = s.index_at(s.valid_k) - s.slope * s.valid_k;
    return s;
  }
  ResolvedSeq s;
  s.constant = true;
  s.node = std::get<Hypernode::Standard>(p.v()).node;
  return s;
}

// ---------------------------------------------------------------------
// Verdicts

struct Verdict {
  enum class Kind { Yes, No, Mixed };

  Kind kind = Kind::No;
  std::uint64_t mu = 0;  // witness for Yes

  struct PerResidue {
    ResidueClass cls;
    bool yes = false;
    std::uint64_t mu = 0;
  };
  std::vector<PerResidue> residues;  // filled for Mixed

  bool yes() const { return kind == Kind::Yes; }
  bool no() const { return kind == Kind::No; }
  bool mixed() const { return kind == Kind::Mixed; }

  static Verdict make_yes(std::uint64_t mu) { return {Kind::Yes, mu, {}}; }
  static Verdict make_no() { return {Kind::No, 0, {}}; }

  static Verdict merge(const std::vector<PerResidue>& residues) {
    bool any_yes = false, any_no = false;
    std::uint64_t mu = 0;
    for (const auto& pr : residues) {
      (pr.yes ? any_yes : any_no) = true;
      if (pr.yes) mu = std::max(mu, pr.mu);
    }
    if (any_yes && !any_no) return make_yes(mu);
    if (!any_yes && any_no) return make_no();
    Verdict v;
    v.kind = Kind::Mixed;
    v.residues = residues;
    return v;
  }

  std::string to_string() const {
    switch (kind) {
      case Kind::Yes: return "Yes(mu=" + std::to_string(mu) + ")";
      case Kind::No: return "No";
      case Kind::Mixed: {
        std::string out = "UltrafilterDependent[";
        for (std::size_t i = 0; i < residues.size(); ++i) {
          if (i) out += "; ";
          out += residues[i].cls.to_string() + ": " +
                 (residues[i].yes ? "Yes(mu=" + std::to_string(residues[i].mu) + ")" : "No");
        }
        return out + "]";
      }
    }
    return "?";
  }
};

// ---------------------------------------------------------------------
// Context: a graph plus named presentations.

struct Context {
  const WGraph* graph = nullptr;
  std::map<std::string, Hypernode> named;
  std::shared_ptr<Analyzer> metric;
  std::shared_ptr<SectionAnalyzer> section;

  explicit Context(const WGraph& g)
      : graph(&g),
        metric(std::make_shared<Analyzer>(g)),
        section(std::make_shared<SectionAnalyzer>(*metric)) {}

  Analyzer& an() const { return *metric; }
  SectionAnalyzer& sec() const { return *section; }
};

inline std::uint64_t common_modulus(const Hypernode& p, const Hypernode& q) {
  return std::lcm(p.modulus(), q.modulus());
}

// Whether two presentations name the same wnode for almost all n.
inline Verdict equivalent(const Context& ctx, const Hypernode& p, const Hypernode& q) {
  (void)ctx;
  const std::uint64_t M = common_modulus(p, q);
  std::vector<Verdict::PerResidue> residues;
  for (std::uint64_t r = 0; r < M; ++r) {
    const ResolvedSeq a = resolve_residue(p, M, r);
    const ResolvedSeq b = resolve_residue(q, M, r);
    bool eq;
    if (a.constant && b.constant) {
      eq = a.node == b.node;
    } else if (a.constant != b.constant) {
      eq = false;  // a moving family meets a fixed node at most once
    } else {
      eq = a.fam.same_carrier(b.fam) && a.slope == b.slope && a.intercept == b.intercept;
    }
    residues.push_back({{M, r}, eq, 0});
  }
  return Verdict::merge(residues);
}

struct ResiduePoly {
  ResidueClass cls;
  OrdinalPoly poly;  // distance in terms of k, where n = cls.modulus * k + cls.residue
};

// d(p_n, q_n) per residue class, as ordinal polynomials in the class
// parameter, built from affine distance fits and exact core distances.
inline std::vector<ResiduePoly> hyperdistance(const Context& ctx, const Hypernode& p,
                                              const Hypernode& q,
                                              const SectionScope* scope = nullptr) {
  Analyzer& an = ctx.an();
  const std::uint64_t M = common_modulus(p, q);
  std::vector<ResiduePoly> out;
  for (std::uint64_t r = 0; r < M; ++r) {
    const ResolvedSeq a = resolve_residue(p, M, r);
    const ResolvedSeq b = resolve_residue(q, M, r);
    OrdinalPoly poly;
    std::uint64_t vk = std::max(a.valid_k, b.valid_k);
    if (a.constant && b.constant) {
      poly = OrdinalPoly::constant(an.distance(a.node, b.node, scope));
    } else if (a.constant != b.constant) {
      const ResolvedSeq& fixed = a.constant ? a : b;
      const ResolvedSeq& fam = a.constant ? b : a;
      const OrdinalPoly f = an.fit_1d(fixed.node, fam.fam, scope);
      TermPolys t;
      for (const auto& [exp, pe] : f.terms())
        t[exp] = pe.compose_affine(static_cast<long long>(fam.slope),
                                   static_cast<long long>(fam.intercept));
      while (fam.index_at(vk) < f.valid_from()) ++vk;
      poly = OrdinalPoly::make(std::move(t), vk);
    } else if (a.fam.same_carrier(b.fam)) {
      const long long ds = static_cast<long long>(b.slope) - static_cast<long long>(a.slope);
      const long long di =
          static_cast<long long>(b.intercept) - static_cast<long long>(a.intercept);
      if (ds == 0 && di == 0) {
        poly = OrdinalPoly();
      } else {
        const int sign = ds != 0 ? (ds > 0 ? 1 : -1) : (di > 0 ? 1 : -1);
        const OrdinalPoly gap = an.fit_delta(a.fam, scope);
        TermPolys t;
        for (const auto& [exp, pe] : gap.terms())
          t[exp] = pe.compose_affine(sign * ds, sign * di);
        while (static_cast<long long>(vk) * ds + di < 0 && sign > 0) ++vk;
        while (static_cast<long long>(vk) * ds + di > 0 && sign < 0) ++vk;
        const std::uint64_t base = 3;  // gap fit anchored at index 3
        while (a.index_at(vk) < base || b.index_at(vk) < base) ++vk;
        poly = OrdinalPoly::make(std::move(t), vk);
      }
    } else {
      const Analyzer::Fit2D fit = an.fit_2d(a.fam, b.fam, scope);
      TermPolys t;
      for (const auto& [exp, coef] : fit.terms) {
        const auto [alpha, beta, gamma] = coef;
        const long long slope = alpha * static_cast<long long>(a.slope) +
                                beta * static_cast<long long>(b.slope);
        const long long inter = alpha * static_cast<long long>(a.intercept) +
                                beta * static_cast<long long>(b.intercept) + gamma;
        t[exp] = IntPoly::affine(slope, inter);
      }
      while (a.index_at(vk) < fit.start || b.index_at(vk) < fit.start) ++vk;
      poly = OrdinalPoly::make(std::move(t), vk);
    }
    out.push_back({{M, r}, std::move(poly)});
  }
  return out;
}

// rho-limited distance: per residue class, the growth class of the
// hyperdistance against the w^rho threshold.
inline Verdict limitedly_distant(const Context& ctx, const Hypernode& p, const Hypernode& q,
                                 Rank rho, const SectionScope* scope = nullptr) {
  if (rho.is_minus_one()) fail(errc::rank_mismatch, "limited distance needs rank >= 0");
  std::vector<Verdict::PerResidue> residues;
  for (const auto& rp : hyperdistance(ctx, p, q, scope)) {
    const Growth g = poly_growth_class(rp.poly, rho);
    residues.push_back({rp.cls, g.bounded, g.mu});
  }
  return Verdict::merge(residues);
}

// Maximality of the carried wnodes for almost all n.
inline Verdict is_maximal_hypernode(const Context& ctx, const Hypernode& p) {
  const std::uint64_t M = p.modulus();
  std::vector<Verdict::PerResidue> residues;
  for (std::uint64_t r = 0; r < M; ++r) {
    const ResolvedSeq s = resolve_residue(p, M, r);
    bool maximal;
    if (s.constant) {
      maximal = is_maximal(*ctx.graph, s.node);
    } else {
      // periodic: probe a few mid indices, which must agree
      std::optional<bool> agreed;
      for (std::uint64_t i = 3; i <= 5; ++i) {
        const bool m = is_maximal(*ctx.graph, s.fam.at(i));
        if (agreed && *agreed != m)
          fail(errc::internal, "maximality not periodic along " + s.fam.key());
        agreed = m;
      }
      maximal = *agreed;
    }
    residues.push_back({{M, r}, maximal, 0});
  }
  return Verdict::merge(residues);
}

// Samples the triangle inequality d(p,r) <= d(p,q) + d(q,r) pointwise.
inline bool triangle_check(const Context& ctx, const Hypernode& p, const Hypernode& q,
                           const Hypernode& r, std::uint64_t samples) {
  for (const Hypernode* h : {&p, &q, &r})
    if (!is_maximal_hypernode(ctx, *h).yes())
      fail(errc::not_maximal, "triangle check needs maximal hypernodes");
  Analyzer& an = ctx.an();
  for (std::uint64_t n = 0; n < samples; ++n) {
    const Ordinal dxz = an.distance(p.at(n), r.at(n));
    const Ordinal via = nat_sum(an.distance(p.at(n), q.at(n)), an.distance(q.at(n), r.at(n)));
    if (dxz > via) return false;
  }
  return true;
}

// ---------------------------------------------------------------------
// Presentation text syntax:
//   std(node) | arm(armId, a, b, localId) | arm(armId, a, b, c, lo, localId)
//   ray(rayRef, a, b) | ray(rayRef, a, b, c, lo)
//   interleave(m, p0, ..., pm-1) | patch(p, {n: node, ...})

namespace hyperdetail {

class PresParser {
 public:
  PresParser(const WGraph& g, std::string_view s) : g_(g), s_(s) {}

  Hypernode parse() {
    Hypernode h = node();
    skip_ws();
    if (pos_ != s_.size()) fail(errc::parse, "trailing input in presentation '" + str() + "'");
    return h;
  }

 private:
  Hypernode node() {
    skip_ws();
    const std::string head = ident();
    expect('(');
    Hypernode out = [&]() -> Hypernode {
      if (head == "std") return Hypernode::std_node(parse_ref(g_, ident_or_ref()));
      if (head == "arm") return arm();
      if (head == "ray") return ray();
      if (head == "interleave") return interleave();
      if (head == "patch") return patch();
      fail(errc::parse, "unknown presentation form '" + head + "'");
    }();
    expect(')');
    return out;
  }

  Hypernode arm() {
    const std::string arm_id = ident_or_ref();
    std::vector<std::uint64_t> nums;
    std::vector<std::string> toks;
    while (true) {
      expect(',');
      skip_ws();
      if (std::isdigit((unsigned char)peek())) {
        nums.push_back(integer());
      } else {
        toks.push_back(ident_or_ref());
        break;
      }
    }
    if (toks.size() != 1 || (nums.size() != 2 && nums.size() != 4))
      fail(errc::parse, "arm(...) takes (arm, a, b, local) or (arm, a, b, c, lo, local)");
    IndexMap map;
    map.a = nums[0];
    map.b = nums[1];
    if (nums.size() == 4) {
      map.c = nums[2];
      map.lo = nums[3];
      if (map.c == 0) fail(errc::parse, "divisor must be positive");
    }
    if (!g_.find_arm(arm_id)) fail(errc::unknown_node, "no arm '" + arm_id + "'");
    const NodeRef probe = NodeRef::arm_node(arm_id, 0, toks[0]);
    (void)probe;
    return Hypernode::arm_indexed(arm_id, map, toks[0]);
  }

  Hypernode ray() {
    const std::string ray_ref = ident_or_ref();
    std::vector<std::uint64_t> nums;
    while (true) {
      skip_ws();
      if (peek() != ',') break;
      expect(',');
      nums.push_back(integer());
    }
    if (nums.size() != 2 && nums.size() != 4)
      fail(errc::parse, "ray(...) takes (ray, a, b) or (ray, a, b, c, lo)");
    IndexMap map;
    map.a = nums[0];
    map.b = nums[1];
    if (nums.size() == 4) {
      map.c = nums[2];
      map.lo = nums[3];
      if (map.c == 0) fail(errc::parse, "divisor must be positive");
    }
    return Hypernode::ray_indexed(ray_family(g_, ray_ref), map);
  }

  Hypernode interleave() {
    const std::uint64_t m = integer();
    std::vector<Hypernode> branches;
    for (std::uint64_t i = 0; i < m; ++i) {
      expect(',');
      branches.push_back(node());
    }
    return Hypernode::interleave(m, std::move(branches));
  }

  Hypernode patch() {
    Hypernode base = node();
    expect(',');
    skip_ws();
    expect('{');
    std::map<std::uint64_t, NodeRef> overrides;
    skip_ws();
    if (peek() != '}') {
      while (true) {
        const std::uint64_t n = integer();
        expect(':');
        overrides[n] = parse_ref(g_, ident_or_ref());
        skip_ws();
        if (peek() == '}') break;
        expect(',');
      }
    }
    expect('}');
    return Hypernode::patch(std::move(base), std::move(overrides));
  }

  // --- lexing helpers ---
  std::string str() const { return std::string(s_); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace((unsigned char)s_[pos_])) ++pos_;
  }

  char peek() {
    skip_ws();
    if (pos_ >= s_.size()) fail(errc::parse, "unexpected end of presentation '" + str() + "'");
    return s_[pos_];
  }

  void expect(char c) {
    if (peek() != c)
      fail(errc::parse, std::string("expected '") + c + "' at offset " + std::to_string(pos_) +
                            " in '" + str() + "'");
    ++pos_;
  }

  std::string ident() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum((unsigned char)s_[pos_]) || s_[pos_] == '_')) ++pos_;
    if (pos_ == start) fail(errc::parse, "expected identifier at offset " + std::to_string(pos_));
    return std::string(s_.substr(start, pos_ - start));
  }

  // node references may contain [] and .
  std::string ident_or_ref() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum((unsigned char)s_[pos_]) || s_[pos_] == '_' || s_[pos_] == '[' ||
            s_[pos_] == ']' || s_[pos_] == '.'))
      ++pos_;
    if (pos_ == start) fail(errc::parse, "expected reference at offset " + std::to_string(pos_));
    return std::string(s_.substr(start, pos_ - start));
  }

  std::uint64_t integer() {
    skip_ws();
    if (pos_ >= s_.size() || !std::isdigit((unsigned char)s_[pos_]))
      fail(errc::parse, "expected number at offset " + std::to_string(pos_));
    std::uint64_t v = 0;
    while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_]))
      v = v * 10 + (s_[pos_++] - '0');
    return v;
  }

  static IndexedNodes ray_family(const WGraph& g, const std::string& text) {
    // "P" core ray, "P2" arm ray block 2, "A[2].P" explicit
    if (const auto dot = text.find("]."); dot != std::string::npos) {
      std::string arm;
      std::uint64_t block = 0;
      if (!detail::split_indexed(text.substr(0, dot + 1), arm, block))
        fail(errc::parse, "bad ray reference '" + text + "'");
      const Arm* a = g.find_arm(arm);
      if (!a || !detail::has_ray(a->cell, text.substr(dot + 2)))
        fail(errc::unknown_node, "no ray '" + text + "'");
      return IndexedNodes::ray_pos(arm, block, text.substr(dot + 2));
    }
    if (detail::has_ray(g.core, text)) return IndexedNodes::ray_pos("", 0, text);
    std::string local;
    std::uint64_t block = 0;
    if (detail::split_compact(text, local, block)) {
      for (const auto& a : g.arms)
        if (detail::has_ray(a.cell, local)) return IndexedNodes::ray_pos(a.id, block, local);
    }
    fail(errc::unknown_node, "no ray '" + text + "'");
  }

  const WGraph& g_;
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace hyperdetail

inline Hypernode parse_hypernode(const WGraph& g, std::string_view s) {
  return hyperdetail::PresParser(g, s).parse();
}

inline std::string Hypernode::to_string() const {
  if (const auto* s = std::get_if<Standard>(&v_)) return "std(" + ref_text(s->node) + ")";
  if (const auto* i = std::get_if<Indexed>(&v_)) {
    const auto& m = i->map;
    const std::string nums = m.plain_affine()
                                 ? std::to_string(m.a) + ", " + std::to_string(m.b)
                                 : std::to_string(m.a) + ", " + std::to_string(m.b) + ", " +
                                       std::to_string(m.c) + ", " + std::to_string(m.lo);
    if (i->fam.kind == IndexedNodes::Kind::ArmBlock)
      return "arm(" + i->fam.arm + ", " + nums + ", " + i->fam.local + ")";
    const std::string ray_ref = i->fam.arm.empty()
                                    ? i->fam.local
                                    : i->fam.local + std::to_string(i->fam.block);
    return "ray(" + ray_ref + ", " + nums + ")";
  }
  if (const auto* m = std::get_if<Mix>(&v_)) {
    std::string out = "interleave(" + std::to_string(m->modulus);
    for (const auto& b : m->branches) out += ", " + b.to_string();
    return out + ")";
  }
  const auto& p = std::get<Patch>(v_);
  std::string out = "patch(" + p.base->to_string() + ", {";
  bool first = true;
  for (const auto& [n, node] : p.overrides) {
    if (!first) out += ", ";
    first = false;
    out += std::to_string(n) + ": " + ref_text(node);
  }
  return out + "})";
}

}  // namespace tg
