#pragma once

// Finite presentations of (possibly infinite) transfinite wgraphs of
// rank nu <= omega: a core block plus one-ended repeating arms.  Rays
// are the primitive one-way-infinite 0-paths; each carries its own
// 0-wtip.  Higher-rank wnodes collect tips of lower-rank structures and
// may sit on 0-nodes through (-1)-tips.

#include <array>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tg/error.hpp"
#include "tg/ordinal.hpp"

namespace tg {

struct TipDecl {
  enum class Source { Ray, At, ArmEnd };
  Rank rank;
  Source source;
  std::string target;  // ray id | node expr | arm id ("." = own arm on an apex)
};

struct WNodeDecl {
  std::string id;
  Rank rank;
  std::vector<std::string> embraces;  // lower-rank wnode ids, same scope
  std::vector<TipDecl> tips;
};

struct RayDecl {
  std::string id;
};

// One block of structure: either the core or the repeating cell of an arm.
// Node exprs inside a block are "a" (declared 0-node) or "P[3]" (ray position).
struct Block {
  std::vector<std::string> nodes;
  std::vector<std::array<std::string, 2>> branches;
  std::vector<RayDecl> rays;
  std::vector<WNodeDecl> wnodes;
  std::map<std::string, std::string> ports;  // port name -> node expr
};

struct Arm {
  std::string id;
  Block cell;
  std::map<std::string, std::string> glue;    // right port -> next copy's left port
  std::optional<WNodeDecl> apex;              // collects the arm's end tip
  std::map<std::string, std::string> attach;  // cell port -> core node expr
};

struct WGraph {
  Rank rank = Rank::fin(0);
  Block core;
  std::vector<Arm> arms;

  const Arm* find_arm(std::string_view id) const {
    for (const auto& a : arms)
      if (a.id == id) return &a;
    return nullptr;
  }
};

// Name of one wnode / 0-node of the virtually unrolled graph.
struct NodeRef {
  enum class Kind { CoreNode, CoreRay, ArmNode, ArmRay };

  Kind kind = Kind::CoreNode;
  std::string arm;          // ArmNode / ArmRay
  std::uint64_t block = 0;  // ArmNode / ArmRay
  std::string local;        // node id, wnode id or ray id
  std::uint64_t pos = 0;    // ray position

  static NodeRef core(std::string id) { return {Kind::CoreNode, "", 0, std::move(id), 0}; }
  static NodeRef core_ray(std::string ray, std::uint64_t pos) {
    return {Kind::CoreRay, "", 0, std::move(ray), pos};
  }
  static NodeRef arm_node(std::string arm, std::uint64_t block, std::string id) {
    return {Kind::ArmNode, std::move(arm), block, std::move(id), 0};
  }
  static NodeRef arm_ray(std::string arm, std::uint64_t block, std::string ray, std::uint64_t pos) {
    return {Kind::ArmRay, std::move(arm), block, std::move(ray), pos};
  }

  friend bool operator==(const NodeRef&, const NodeRef&) = default;
  friend auto operator<=>(const NodeRef&, const NodeRef&) = default;

  std::uint64_t max_block() const {
    return (kind == Kind::ArmNode || kind == Kind::ArmRay) ? block : 0;
  }
  std::uint64_t max_ray_pos() const {
    return (kind == Kind::CoreRay || kind == Kind::ArmRay) ? pos : 0;
  }
};

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit((unsigned char)c)) return false;
  return true;
}

inline const WNodeDecl* find_wnode(const Block& b, std::string_view id) {
  for (const auto& w : b.wnodes)
    if (w.id == id) return &w;
  return nullptr;
}

inline bool has_node(const Block& b, std::string_view id) {
  for (const auto& n : b.nodes)
    if (n == id) return true;
  return false;
}

inline bool has_ray(const Block& b, std::string_view id) {
  for (const auto& r : b.rays)
    if (r.id == id) return true;
  return false;
}

inline const WNodeDecl* find_apex(const WGraph& g, std::string_view id) {
  for (const auto& a : g.arms)
    if (a.apex && a.apex->id == id) return &*a.apex;
  return nullptr;
}

// Splits "P[12]" into ("P", 12); returns false if not of that shape.
inline bool split_indexed(std::string_view s, std::string& name, std::uint64_t& idx) {
  const auto lb = s.find('[');
  if (lb == std::string_view::npos || s.back() != ']') return false;
  const std::string_view inner = s.substr(lb + 1, s.size() - lb - 2);
  if (!all_digits(inner)) return false;
  name = std::string(s.substr(0, lb));
  idx = std::stoull(std::string(inner));
  return true;
}

// Splits a compact arm-node name "x12" into ("x", 12).
inline bool split_compact(std::string_view s, std::string& name, std::uint64_t& idx) {
  std::size_t i = s.size();
  while (i > 0 && std::isdigit((unsigned char)s[i - 1])) --i;
  if (i == 0 || i == s.size()) return false;
  name = std::string(s.substr(0, i));
  idx = std::stoull(std::string(s.substr(i)));
  return true;
}

}  // namespace detail

// Canonical text for a node reference.  Arm-local names must not end in a
// digit, so the compact forms "x3" and "P3[5]" stay unambiguous.
inline std::string ref_text(const NodeRef& r) {
  switch (r.kind) {
    case NodeRef::Kind::CoreNode: return r.local;
    case NodeRef::Kind::CoreRay: return r.local + "[" + std::to_string(r.pos) + "]";
    case NodeRef::Kind::ArmNode: return r.local + std::to_string(r.block);
    case NodeRef::Kind::ArmRay:
      return r.local + std::to_string(r.block) + "[" + std::to_string(r.pos) + "]";
  }
  return "?";
}

// Parses a node reference against a presentation.  Accepts the compact
// forms plus the explicit "A[3].x" and "A[3].P[5]".
inline NodeRef parse_ref(const WGraph& g, std::string_view text) {
  using detail::split_compact;
  using detail::split_indexed;

  // explicit arm-qualified form
  if (const auto dot = text.find("]."); dot != std::string_view::npos) {
    std::string arm_name;
    std::uint64_t block = 0;
    if (!split_indexed(text.substr(0, dot + 1), arm_name, block))
      fail(errc::parse, "bad node reference '" + std::string(text) + "'");
    const Arm* arm = g.find_arm(arm_name);
    if (!arm) fail(errc::unknown_node, "no arm '" + arm_name + "'");
    const std::string_view rest = text.substr(dot + 2);
    std::string ray;
    std::uint64_t pos = 0;
    if (split_indexed(rest, ray, pos)) {
      if (!detail::has_ray(arm->cell, ray))
        fail(errc::unknown_node, "no ray '" + ray + "' in arm " + arm_name);
      return NodeRef::arm_ray(arm_name, block, ray, pos);
    }
    const std::string local(rest);
    if (!detail::has_node(arm->cell, local) && !detail::find_wnode(arm->cell, local))
      fail(errc::unknown_node, "no node '" + local + "' in arm " + arm_name);
    return NodeRef::arm_node(arm_name, block, local);
  }

  // core node / apex
  if (detail::has_node(g.core, text) || detail::find_wnode(g.core, std::string(text)) ||
      detail::find_apex(g, text)) {
    return NodeRef::core(std::string(text));
  }

  // core ray position or compact arm ray "P3[5]"
  std::string name;
  std::uint64_t pos = 0;
  if (split_indexed(text, name, pos)) {
    if (detail::has_ray(g.core, name)) return NodeRef::core_ray(name, pos);
    std::string ray;
    std::uint64_t block = 0;
    if (split_compact(name, ray, block)) {
      const Arm* found = nullptr;
      for (const auto& a : g.arms)
        if (detail::has_ray(a.cell, ray)) {
          if (found) fail(errc::parse, "ambiguous ray reference '" + std::string(text) + "'");
          found = &a;
        }
      if (found) return NodeRef::arm_ray(found->id, block, ray, pos);
    }
    fail(errc::unknown_node, "unknown ray reference '" + std::string(text) + "'");
  }

  // compact arm node "x3"
  std::string local;
  std::uint64_t block = 0;
  if (split_compact(text, local, block)) {
    const Arm* found = nullptr;
    for (const auto& a : g.arms)
      if (detail::has_node(a.cell, local) || detail::find_wnode(a.cell, local)) {
        if (found) fail(errc::parse, "ambiguous node reference '" + std::string(text) + "'");
        found = &a;
      }
    if (found) return NodeRef::arm_node(found->id, block, local);
  }

  fail(errc::unknown_node, "unknown node reference '" + std::string(text) + "'");
}

struct Violation {
  std::string code;
  std::string subject;
  std::string detail;

  std::string to_string() const { return code + "(" + subject + "): " + detail; }
};

}  // namespace tg
