#pragma once

// Structural validation of wgraph presentations.  Violations are data,
// not exceptions: callers decide what to do with an invalid presentation.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "tg/unroll.hpp"
#include "tg/wgraph.hpp"

namespace tg {

namespace detail {

inline bool ends_in_digit(const std::string& s) {
  return !s.empty() && std::isdigit((unsigned char)s.back());
}

inline void check_block_ids(const Block& b, const std::string& scope, bool is_cell,
                            std::vector<Violation>& out) {
  std::set<std::string> seen;
  const auto claim = [&](const std::string& id, const char* what) {
    if (!seen.insert(id).second)
      out.push_back({"DuplicateId", id, std::string(what) + " reuses an id in " + scope});
    if (is_cell && ends_in_digit(id))
      out.push_back({"BadLocalName", id,
                     "arm-local ids must not end in a digit (compact references)"});
  };
  for (const auto& n : b.nodes) claim(n, "node");
  for (const auto& r : b.rays) claim(r.id, "ray");
  for (const auto& w : b.wnodes) claim(w.id, "wnode");
  for (const auto& [port, expr] : b.ports) {
    if (seen.count(port))
      out.push_back({"DuplicateId", port, "port shadows a node id in " + scope});
    (void)expr;
  }
}

}  // namespace detail

inline std::vector<Violation> validate(const WGraph& g) {
  std::vector<Violation> out;

  if (g.rank.is_minus_one()) {
    out.push_back({"RankViolation", "-1", "graph rank must be >= 0"});
    return out;
  }

  detail::check_block_ids(g.core, "core", false, out);
  std::set<std::string> arm_ids;
  for (const auto& a : g.arms) {
    if (!arm_ids.insert(a.id).second)
      out.push_back({"DuplicateId", a.id, "duplicate arm id"});
    detail::check_block_ids(a.cell, "arm " + a.id, true, out);
  }

  // Scope-level checks per block.
  const auto check_block = [&](const Block& b, const std::string& scope, int arm_idx) {
    const detail::ExprScope sc{&g, &b, arm_idx, 1};
    const auto resolvable = [&](const std::string& expr) {
      try {
        sc.resolve(expr);
        return true;
      } catch (const error&) {
        return false;
      }
    };

    for (const auto& [x, y] : b.branches) {
      if (!resolvable(x) || !resolvable(y)) {
        out.push_back({"UnknownNode", x + "," + y, "branch endpoint unresolvable in " + scope});
        continue;
      }
      if (sc.resolve(x) == sc.resolve(y))
        out.push_back({"BranchNotTwoElement", x + "," + y,
                       "branch must join two distinct 0-nodes in " + scope});
    }
    for (const auto& [port, expr] : b.ports)
      if (!resolvable(expr))
        out.push_back({"UnknownNode", port, "port target '" + expr + "' unresolvable in " + scope});

    std::map<std::string, Rank> wrank;
    for (const auto& w : b.wnodes) wrank[w.id] = w.rank;
    if (arm_idx >= 0 && g.arms[arm_idx].apex) wrank[g.arms[arm_idx].apex->id] = g.arms[arm_idx].apex->rank;

    const auto check_wnode = [&](const WNodeDecl& w) {
      if (w.rank < Rank::fin(1))
        out.push_back({"WNodeRankViolation", w.id, "wnode rank must be >= 1 in " + scope});
      if (w.rank > g.rank)
        out.push_back({"RankAboveGraph", w.id,
                       "wnode rank " + w.rank.to_string() + " above graph rank " +
                           g.rank.to_string()});
      for (const auto& emb : w.embraces) {
        const auto it = wrank.find(emb);
        if (it == wrank.end()) {
          out.push_back({"UnknownNode", w.id, "embraced wnode '" + emb + "' not in " + scope});
        } else if (!(it->second < w.rank)) {
          out.push_back({"EmbraceRankViolation", w.id,
                         "embraced wnode '" + emb + "' must have strictly lower rank"});
        }
      }
      bool has_pred_tip = false;
      const bool needs_pred = w.rank >= Rank::fin(1) && !w.rank.is_arrow_omega();
      for (const auto& tip : w.tips) {
        if (!(tip.rank < w.rank))
          out.push_back({"TipRankViolation", w.id, "tip rank must be below the wnode rank"});
        switch (tip.source) {
          case TipDecl::Source::At:
            if (!tip.rank.is_minus_one())
              out.push_back({"TipRankViolation", w.id, "node-extremity tips have rank -1"});
            if (!resolvable(tip.target))
              out.push_back({"UnknownNode", w.id, "tip target '" + tip.target + "' unresolvable"});
            break;
          case TipDecl::Source::Ray:
            if (tip.rank != Rank::fin(0))
              out.push_back({"TipRankViolation", w.id, "ray tips have rank 0"});
            if (!detail::has_ray(b, tip.target))
              out.push_back({"UnknownNode", w.id, "no ray '" + tip.target + "' in " + scope});
            break;
          case TipDecl::Source::ArmEnd: {
            if (tip.rank.is_minus_one() || tip.rank.is_omega())
              out.push_back({"TipRankViolation", w.id, "arm-end tips have rank >= 0, < omega"});
            const std::string target = tip.target == "." && arm_idx >= 0
                                           ? g.arms[arm_idx].id
                                           : tip.target;
            if (tip.target != "." && !g.find_arm(target))
              out.push_back({"UnknownNode", w.id, "no arm '" + target + "' for end tip"});
            break;
          }
        }
        if (needs_pred && tip.rank == w.rank.pred()) has_pred_tip = true;
        if (w.rank.is_arrow_omega() && !tip.rank.is_minus_one()) has_pred_tip = true;
      }
      if (w.rank >= Rank::fin(1) && !has_pred_tip)
        out.push_back({"MissingLowerTip", w.id,
                       "a wnode of rank " + w.rank.to_string() +
                           " needs a tip of the predecessor rank"});
    };
    for (const auto& w : b.wnodes) check_wnode(w);
    if (arm_idx >= 0 && g.arms[arm_idx].apex) {
      // Apex is core-scoped for node exprs but may point at its own arm.
      check_wnode(*g.arms[arm_idx].apex);
    }
    return;
  };

  check_block(g.core, "core", -1);
  for (std::size_t ai = 0; ai < g.arms.size(); ++ai) {
    const Arm& a = g.arms[ai];
    check_block(a.cell, "arm " + a.id, static_cast<int>(ai));
    for (const auto& [rp, lp] : a.glue) {
      if (!a.cell.ports.count(rp))
        out.push_back({"UnknownPort", a.id, "glue source '" + rp + "' is not a cell port"});
      if (!a.cell.ports.count(lp))
        out.push_back({"UnknownPort", a.id, "glue target '" + lp + "' is not a cell port"});
    }
    std::set<std::string> glue_targets;
    for (const auto& [rp, lp] : a.glue)
      if (!glue_targets.insert(lp).second)
        out.push_back({"GlueNotBijective", a.id, "two glue entries share target '" + lp + "'"});
    for (const auto& [cp, ce] : a.attach) {
      if (!a.cell.ports.count(cp))
        out.push_back({"UnknownPort", a.id, "attach source '" + cp + "' is not a cell port"});
      try {
        detail::ExprScope{&g, &g.core, -1, 0}.resolve(ce);
      } catch (const error&) {
        out.push_back({"UnknownNode", a.id, "attach target '" + ce + "' unresolvable in core"});
      }
    }
  }

  if (!out.empty()) return out;  // structural errors block the unroll checks

  Unrolled u;
  try {
    u = unroll_raw(g, {3, 12});
  } catch (const error& e) {
    out.push_back({"UnrollError", "-", e.what()});
    return out;
  }

  // Embrace relation must be a forest: at most one parent per node.
  std::map<int, int> parent_count;
  for (const auto& e : u.embraces) ++parent_count[e.child];
  for (const auto& [child, count] : parent_count)
    if (count > 1)
      out.push_back({"EmbraceNotForest", u.positions[child].text,
                     "embraced by " + std::to_string(count) + " wnodes"});

  // Every rank up to nu inhabited (warrow may be empty).  For rank-omega
  // graphs only the declared finite ranks are required to be contiguous:
  // a finite presentation of bounded cell rank cannot inhabit every
  // finite rank below omega.
  std::set<Rank> present;
  bool any_zero = !g.core.nodes.empty() || !g.core.rays.empty();
  for (const auto& a : g.arms)
    any_zero = any_zero || !a.cell.nodes.empty() || !a.cell.rays.empty();
  if (any_zero) present.insert(Rank::fin(0));
  std::uint32_t max_fin = 0;
  const auto note = [&](const WNodeDecl& w) {
    present.insert(w.rank);
    if (w.rank.is_fin()) max_fin = std::max(max_fin, w.rank.fin_value());
  };
  for (const auto& w : g.core.wnodes) note(w);
  for (const auto& a : g.arms) {
    if (a.apex) note(*a.apex);
    for (const auto& w : a.cell.wnodes) note(w);
  }
  std::vector<Rank> required;
  if (g.rank.is_fin()) {
    for (std::uint32_t k = 0; k <= g.rank.fin_value(); ++k) required.push_back(Rank::fin(k));
  } else {
    for (std::uint32_t k = 0; k <= max_fin; ++k) required.push_back(Rank::fin(k));
    if (g.rank.is_omega()) required.push_back(Rank::omega());
  }
  for (const Rank r : required)
    if (!present.count(r))
      out.push_back({"NonemptyRankViolation", r.to_string(),
                     "no wnode of rank " + r.to_string() + " is presented"});

  // Wconnectedness on the unrolling.
  const SearchGraph sg = build_search(u);
  if (!sg.class_members.empty()) {
    std::vector<char> seen(sg.class_members.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      for (const auto& e : sg.adj[c])
        if (!seen[e.to]) {
          seen[e.to] = 1;
          ++reached;
          stack.push_back(e.to);
        }
    }
    if (reached != sg.class_members.size())
      out.push_back({"NotWConnected", "-",
                     std::to_string(sg.class_members.size() - reached) +
                         " component(s) unreachable on the depth-3 unrolling"});
  }

  return out;
}

}  // namespace tg
