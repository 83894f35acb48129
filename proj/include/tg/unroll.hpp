#pragma once

// Materializes a finite truncation of a presented wgraph: arms unrolled
// to a block depth, rays cut at a position bound, port gluings resolved
// into node identifications, and wtips of truncated structures kept as
// markers with their landing zones.  Walk search runs on the quotient by
// embrace classes, since a wnode and everything it embraces are at
// wdistance zero from each other.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tg/error.hpp"
#include "tg/ordinal.hpp"
#include "tg/wgraph.hpp"

namespace tg {

struct Unrolled {
  struct Pos {
    NodeRef ref;
    std::string text;
    bool is_wnode = false;
    Rank rank = Rank::fin(0);  // wnode rank; Fin(0) for plain 0-nodes
    bool cut = false;          // dangling glue port at the truncation edge
  };

  struct Branch {
    int u = -1, v = -1;
    std::string id;
    int arm = -1;  // -1 = core
    std::uint64_t block = 0;
    std::string unit;    // ray id, or "a|b" local key for declared branches
    bool is_ray = false;
  };

  struct RayInst {
    int arm = -1;  // -1 = core
    std::uint64_t block = 0;
    std::string ray;
    std::string text;
    std::vector<int> members;  // positions, ascending
  };

  struct EmbraceEdge {
    int parent = -1, child = -1;
  };

  struct Tip {
    int owner = -1;  // wnode position
    Rank rank = Rank::fin(0);
    std::string id;
    std::vector<int> zone;  // landing positions, deduped, sorted
    bool truncated = true;
    int arm = -1;           // ArmEnd tips: arm index; Ray tips: owner arm of the ray
    int ray_inst = -1;      // Ray tips: index into rays
    bool arm_end = false;
  };

  const WGraph* graph = nullptr;
  std::uint64_t depth = 0;
  std::uint64_t ray_len = 0;

  std::vector<Pos> positions;
  std::map<std::string, int> by_key;  // raw key -> canonical position
  std::vector<Branch> branches;
  std::vector<RayInst> rays;
  std::vector<EmbraceEdge> embraces;
  std::vector<Tip> tips;
  std::vector<std::vector<int>> branches_at;  // position -> branch indices

  int find_position(const NodeRef& r) const {
    const auto it = by_key.find(raw_key(r));
    if (it == by_key.end()) return -1;
    return it->second;
  }

  int require_position(const NodeRef& r) const {
    const int p = find_position(r);
    if (p < 0) fail(errc::unknown_node, "node " + ref_text(r) + " not materialized");
    return p;
  }

  static std::string raw_key(const NodeRef& r) {
    switch (r.kind) {
      case NodeRef::Kind::CoreNode: return "c:" + r.local;
      case NodeRef::Kind::CoreRay: return "c:" + r.local + "[" + std::to_string(r.pos) + "]";
      case NodeRef::Kind::ArmNode:
        return "a:" + r.arm + ":" + std::to_string(r.block) + ":" + r.local;
      case NodeRef::Kind::ArmRay:
        return "a:" + r.arm + ":" + std::to_string(r.block) + ":" + r.local + "[" +
               std::to_string(r.pos) + "]";
    }
    return "?";
  }
};

namespace detail {

// Union-find over raw node keys with an explicitly preferred root, so
// identified nodes keep their structural name (core nodes win over arm
// nodes, ray starts win over glue placeholders).
class Aliases {
 public:
  void declare(const std::string& key) { parent_.try_emplace(key, key); }

  bool known(const std::string& key) const { return parent_.count(key) > 0; }

  const std::string& find(const std::string& key) {
    auto it = parent_.find(key);
    if (it == parent_.end()) fail(errc::internal, "unknown raw node " + key);
    if (it->second == key) return it->first;
    const std::string root = find(it->second);
    it->second = root;
    return parent_.find(root)->first;
  }

  void unite(const std::string& other, const std::string& preferred) {
    const std::string ro = find(other), rp = find(preferred);
    if (ro != rp) parent_[ro] = rp;
  }

 private:
  std::map<std::string, std::string> parent_;
};

struct ExprScope {
  const WGraph* g;
  const Block* block;
  int arm = -1;  // -1 = core
  std::uint64_t block_index = 0;

  NodeRef resolve(const std::string& expr, int port_hops = 0) const {
    std::string name;
    std::uint64_t pos = 0;
    if (split_indexed(expr, name, pos)) {
      if (!has_ray(*block, name))
        fail(errc::unknown_node, "no ray '" + name + "' for expr '" + expr + "'");
      if (arm < 0) return NodeRef::core_ray(name, pos);
      return NodeRef::arm_ray(g->arms[arm].id, block_index, name, pos);
    }
    if (has_node(*block, expr) || find_wnode(*block, expr)) {
      if (arm < 0) return NodeRef::core(expr);
      return NodeRef::arm_node(g->arms[arm].id, block_index, expr);
    }
    const auto port = block->ports.find(expr);
    if (port != block->ports.end()) {
      if (port_hops > 2) fail(errc::parse, "port alias cycle at '" + expr + "'");
      return resolve(port->second, port_hops + 1);
    }
    fail(errc::unknown_node, "unresolvable node expr '" + expr + "'");
  }
};

}  // namespace detail

struct UnrollOptions {
  std::uint64_t depth = 3;
  std::uint64_t ray_len = 24;  // spec-level unroll uses depth * ray_unit
};

inline Unrolled unroll_raw(const WGraph& g, const UnrollOptions& opt) {
  if (opt.depth < 1) fail(errc::bad_depth, "unroll depth must be >= 1");
  Unrolled u;
  u.graph = &g;
  u.depth = opt.depth;
  u.ray_len = std::max<std::uint64_t>(opt.ray_len, 2);

  detail::Aliases alias;
  std::vector<std::pair<std::string, NodeRef>> raw;  // key -> ref, declaration order

  const auto declare = [&](const NodeRef& r) {
    const std::string key = Unrolled::raw_key(r);
    if (!alias.known(key)) {
      alias.declare(key);
      raw.emplace_back(key, r);
    }
  };

  // Declare core structure.
  for (const auto& n : g.core.nodes) declare(NodeRef::core(n));
  for (const auto& w : g.core.wnodes) declare(NodeRef::core(w.id));
  for (const auto& r : g.core.rays)
    for (std::uint64_t p = 0; p < u.ray_len; ++p) declare(NodeRef::core_ray(r.id, p));

  // Declare arm blocks and apexes.
  for (const auto& a : g.arms) {
    if (a.apex) declare(NodeRef::core(a.apex->id));
    for (std::uint64_t b = 0; b < u.depth; ++b) {
      for (const auto& n : a.cell.nodes) declare(NodeRef::arm_node(a.id, b, n));
      for (const auto& w : a.cell.wnodes) declare(NodeRef::arm_node(a.id, b, w.id));
      for (const auto& r : a.cell.rays)
        for (std::uint64_t p = 0; p < u.ray_len; ++p)
          declare(NodeRef::arm_ray(a.id, b, r.id, p));
    }
  }

  // Identifications: attach (block 0 to core) and glue (block b to b+1).
  std::set<std::string> cut_keys;
  const detail::ExprScope core_scope{&g, &g.core, -1, 0};
  for (std::size_t ai = 0; ai < g.arms.size(); ++ai) {
    const Arm& a = g.arms[ai];
    for (const auto& [cell_port, core_expr] : a.attach) {
      const detail::ExprScope sc{&g, &a.cell, static_cast<int>(ai), 0};
      alias.unite(Unrolled::raw_key(sc.resolve(cell_port)),
                  Unrolled::raw_key(core_scope.resolve(core_expr)));
    }
    for (std::uint64_t b = 0; b < u.depth; ++b) {
      for (const auto& [right_port, left_port] : a.glue) {
        const detail::ExprScope here{&g, &a.cell, static_cast<int>(ai), b};
        if (b + 1 < u.depth) {
          const detail::ExprScope next{&g, &a.cell, static_cast<int>(ai), b + 1};
          alias.unite(Unrolled::raw_key(here.resolve(right_port)),
                      Unrolled::raw_key(next.resolve(left_port)));
        } else {
          cut_keys.insert(alias.find(Unrolled::raw_key(here.resolve(right_port))));
        }
      }
    }
  }

  // Materialize canonical positions.
  std::map<std::string, NodeRef> ref_of;
  for (const auto& [key, ref] : raw) ref_of.emplace(key, ref);
  std::map<std::string, int> canon_index;
  for (const auto& [key, ref] : raw) {
    const std::string root = alias.find(key);
    auto [it, fresh] = canon_index.try_emplace(root, -1);
    if (fresh) {
      it->second = static_cast<int>(u.positions.size());
      const NodeRef& root_ref = ref_of.at(root);
      u.positions.push_back({root_ref, ref_text(root_ref), false, Rank::fin(0),
                             cut_keys.count(root) > 0});
    }
    u.by_key[key] = it->second;
  }

  const auto pos_of = [&](const NodeRef& r) { return u.by_key.at(Unrolled::raw_key(r)); };

  // Wnode instances: mark rank, collect embraces and tips.
  struct WInst {
    const WNodeDecl* decl;
    detail::ExprScope scope;
    int pos;
  };
  std::vector<WInst> winsts;
  const auto add_winst = [&](const WNodeDecl& w, const detail::ExprScope& sc, const NodeRef& ref) {
    const int p = pos_of(ref);
    u.positions[p].is_wnode = true;
    u.positions[p].rank = w.rank;
    winsts.push_back({&w, sc, p});
  };
  for (const auto& w : g.core.wnodes) add_winst(w, core_scope, NodeRef::core(w.id));
  for (std::size_t ai = 0; ai < g.arms.size(); ++ai) {
    const Arm& a = g.arms[ai];
    if (a.apex) add_winst(*a.apex, core_scope, NodeRef::core(a.apex->id));
    for (std::uint64_t b = 0; b < u.depth; ++b) {
      const detail::ExprScope sc{&g, &a.cell, static_cast<int>(ai), b};
      for (const auto& w : a.cell.wnodes)
        add_winst(w, sc, NodeRef::arm_node(a.id, b, w.id));
    }
  }

  // Ray instances and their internal branches.
  const auto add_ray = [&](int arm, std::uint64_t block, const std::string& ray,
                           const std::string& text) {
    Unrolled::RayInst inst{arm, block, ray, text, {}};
    for (std::uint64_t p = 0; p < u.ray_len; ++p) {
      const NodeRef r = arm < 0 ? NodeRef::core_ray(ray, p)
                                : NodeRef::arm_ray(g.arms[arm].id, block, ray, p);
      inst.members.push_back(pos_of(r));
    }
    u.rays.push_back(std::move(inst));
  };
  for (const auto& r : g.core.rays) add_ray(-1, 0, r.id, r.id);
  for (std::size_t ai = 0; ai < g.arms.size(); ++ai)
    for (std::uint64_t b = 0; b < u.depth; ++b)
      for (const auto& r : g.arms[ai].cell.rays)
        add_ray(static_cast<int>(ai), b, r.id, r.id + std::to_string(b));

  // Branches: declared plus ray-internal.
  const auto add_branch = [&](int pu, int pv, int arm, std::uint64_t block,
                              const std::string& unit, bool is_ray) {
    if (pu == pv) fail(errc::parse, "branch endpoints identify to one node");
    Unrolled::Branch br;
    br.u = pu;
    br.v = pv;
    const std::string &tu = u.positions[pu].text, &tv = u.positions[pv].text;
    br.id = tu < tv ? tu + "-" + tv : tv + "-" + tu;
    br.arm = arm;
    br.block = block;
    br.unit = unit;
    br.is_ray = is_ray;
    u.branches.push_back(std::move(br));
  };
  for (const auto& [x, y] : g.core.branches)
    add_branch(pos_of(core_scope.resolve(x)), pos_of(core_scope.resolve(y)), -1, 0,
               x < y ? x + "|" + y : y + "|" + x, false);
  for (std::size_t ai = 0; ai < g.arms.size(); ++ai)
    for (std::uint64_t b = 0; b < u.depth; ++b) {
      const detail::ExprScope sc{&g, &g.arms[ai].cell, static_cast<int>(ai), b};
      for (const auto& [x, y] : g.arms[ai].cell.branches)
        add_branch(pos_of(sc.resolve(x)), pos_of(sc.resolve(y)), static_cast<int>(ai), b,
                   x < y ? x + "|" + y : y + "|" + x, false);
    }
  for (std::size_t ri = 0; ri < u.rays.size(); ++ri) {
    const auto& inst = u.rays[ri];
    for (std::size_t p = 0; p + 1 < inst.members.size(); ++p)
      add_branch(inst.members[p], inst.members[p + 1], inst.arm, inst.block, inst.ray, true);
  }

  u.branches_at.assign(u.positions.size(), {});
  for (std::size_t bi = 0; bi < u.branches.size(); ++bi) {
    u.branches_at[u.branches[bi].u].push_back(static_cast<int>(bi));
    u.branches_at[u.branches[bi].v].push_back(static_cast<int>(bi));
  }

  // Embrace edges and tips.
  const auto ray_index = [&](int arm, std::uint64_t block, const std::string& ray) {
    for (std::size_t ri = 0; ri < u.rays.size(); ++ri)
      if (u.rays[ri].arm == arm && u.rays[ri].block == block && u.rays[ri].ray == ray)
        return static_cast<int>(ri);
    fail(errc::unknown_node, "no ray '" + ray + "'");
  };

  for (const auto& wi : winsts) {
    for (const auto& emb : wi.decl->embraces) {
      const NodeRef target = wi.scope.arm < 0
                                 ? NodeRef::core(emb)
                                 : NodeRef::arm_node(g.arms[wi.scope.arm].id,
                                                     wi.scope.block_index, emb);
      u.embraces.push_back({wi.pos, pos_of(target)});
    }
    for (const auto& tip : wi.decl->tips) {
      switch (tip.source) {
        case TipDecl::Source::At:
          u.embraces.push_back({wi.pos, pos_of(wi.scope.resolve(tip.target))});
          break;
        case TipDecl::Source::Ray: {
          Unrolled::Tip t;
          t.owner = wi.pos;
          t.rank = tip.rank;
          const int ri = ray_index(wi.scope.arm, wi.scope.block_index, tip.target);
          t.ray_inst = ri;
          t.arm = u.rays[ri].arm;
          t.id = u.rays[ri].text + "~tip";
          t.zone = u.rays[ri].members;
          u.tips.push_back(std::move(t));
          break;
        }
        case TipDecl::Source::ArmEnd: {
          Unrolled::Tip t;
          t.owner = wi.pos;
          t.rank = tip.rank;
          std::string arm_id = tip.target;
          if (arm_id == ".") {
            // apex shorthand for its own arm
            for (std::size_t ai = 0; ai < g.arms.size(); ++ai)
              if (g.arms[ai].apex && g.arms[ai].apex->id == wi.decl->id) arm_id = g.arms[ai].id;
          }
          const Arm* arm = g.find_arm(arm_id);
          if (!arm) fail(errc::unknown_node, "no arm '" + arm_id + "' for end tip");
          int arm_idx = -1;
          for (std::size_t ai = 0; ai < g.arms.size(); ++ai)
            if (&g.arms[ai] == arm) arm_idx = static_cast<int>(ai);
          t.arm = arm_idx;
          t.arm_end = true;
          t.id = arm_id + "~end";
          std::set<int> zone;
          for (const auto& [key, ref] : raw) {
            if (ref.kind != NodeRef::Kind::ArmNode && ref.kind != NodeRef::Kind::ArmRay) continue;
            if (ref.arm != arm_id) continue;
            zone.insert(u.by_key.at(key));
          }
          t.zone.assign(zone.begin(), zone.end());
          u.tips.push_back(std::move(t));
          break;
        }
      }
    }
  }

  return u;
}

// Spec-level unroll: rays truncated at depth * ray_unit.
inline Unrolled unroll(const WGraph& g, std::uint64_t depth, std::uint64_t ray_unit = 8) {
  return unroll_raw(g, {depth, depth * ray_unit});
}

// ---------------------------------------------------------------------
// Search graph: embrace-class quotient plus weighted move edges.

// Restriction of the searchable structure to one wsection, produced by
// the sections layer.  Indices refer to the Unrolled being filtered.
struct ScopeSets {
  Rank rank = Rank::omega();
  std::vector<char> branch_in;  // per branch index
  std::vector<char> tip_in;     // per tip index
};

struct SearchGraph {
  struct Edge {
    int to = -1;
    int kind = 0;  // 0 = branch, 1 = tip
    int index = -1;
    Ordinal cost;
  };

  const Unrolled* u = nullptr;
  std::vector<int> cls_of;  // position -> class
  std::vector<std::vector<int>> class_members;
  std::vector<int> class_root;  // representative position (max rank, then lex text)
  std::vector<char> class_cut;
  std::vector<std::vector<Edge>> adj;

  int cls(int pos) const { return cls_of[pos]; }
};

inline SearchGraph build_search(const Unrolled& u, const ScopeSets* scope = nullptr) {
  SearchGraph sg;
  sg.u = &u;
  const int n = static_cast<int>(u.positions.size());

  const auto wnode_kept = [&](int pos) {
    if (!u.positions[pos].is_wnode) return true;
    if (!scope) return true;
    return u.positions[pos].rank <= scope->rank;
  };

  // Embrace-class union-find.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<int>* pp = &parent;
  const auto find = [&](int x) {
    while ((*pp)[x] != x) {
      (*pp)[x] = (*pp)[(*pp)[x]];
      x = (*pp)[x];
    }
    return x;
  };
  for (const auto& e : u.embraces) {
    if (!wnode_kept(e.parent) || !wnode_kept(e.child)) continue;
    const int a = find(e.parent), b = find(e.child);
    if (a != b) parent[a] = b;
  }

  std::map<int, int> cls_index;
  sg.cls_of.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    auto [it, fresh] = cls_index.try_emplace(r, -1);
    if (fresh) {
      it->second = static_cast<int>(sg.class_members.size());
      sg.class_members.emplace_back();
    }
    sg.cls_of[i] = it->second;
    sg.class_members[it->second].push_back(i);
  }

  const int nc = static_cast<int>(sg.class_members.size());
  sg.class_root.assign(nc, -1);
  sg.class_cut.assign(nc, 0);
  for (int c = 0; c < nc; ++c) {
    int best = -1;
    for (int p : sg.class_members[c]) {
      if (u.positions[p].cut) sg.class_cut[c] = 1;
      if (best < 0) {
        best = p;
        continue;
      }
      const auto& bp = u.positions[best];
      const auto& pp2 = u.positions[p];
      const auto key = [](const Unrolled::Pos& q) {
        return std::make_tuple(q.is_wnode ? q.rank : Rank::minus_one(), q.is_wnode);
      };
      if (key(pp2) > key(bp) || (key(pp2) == key(bp) && pp2.text < bp.text)) best = p;
    }
    sg.class_root[c] = best;
  }

  sg.adj.assign(nc, {});
  for (std::size_t bi = 0; bi < u.branches.size(); ++bi) {
    if (scope && !scope->branch_in[bi]) continue;
    const auto& br = u.branches[bi];
    const int cu = sg.cls_of[br.u], cv = sg.cls_of[br.v];
    if (cu == cv) continue;
    sg.adj[cu].push_back({cv, 0, static_cast<int>(bi), Ordinal::finite(1)});
    sg.adj[cv].push_back({cu, 0, static_cast<int>(bi), Ordinal::finite(1)});
  }
  for (std::size_t ti = 0; ti < u.tips.size(); ++ti) {
    const auto& tip = u.tips[ti];
    if (!wnode_kept(tip.owner)) continue;
    if (scope && !scope->tip_in[ti]) continue;
    const Ordinal cost = tip.rank.is_arrow_omega() ? omega_pow(Rank::omega())
                                                   : omega_pow(tip.rank.succ());
    const int co = sg.cls_of[tip.owner];
    std::set<int> zone_classes;
    for (int z : tip.zone) zone_classes.insert(sg.cls_of[z]);
    for (int cz : zone_classes) {
      if (cz == co) continue;
      sg.adj[co].push_back({cz, 1, static_cast<int>(ti), cost});
      sg.adj[cz].push_back({co, 1, static_cast<int>(ti), cost});
    }
  }
  for (auto& edges : sg.adj)
    std::sort(edges.begin(), edges.end(), [](const SearchGraph::Edge& a, const SearchGraph::Edge& b) {
      return std::tie(a.to, a.kind, a.index) < std::tie(b.to, b.kind, b.index);
    });
  return sg;
}

// True iff no materialized wnode embraces the node, directly or through
// the gluing.  Plain 0-nodes count as maximal unless embraced.
inline bool is_maximal_in(const Unrolled& u, const NodeRef& x) {
  const int p = u.require_position(x);
  for (const auto& e : u.embraces)
    if (e.child == p) return false;
  return true;
}

inline bool is_maximal(const WGraph& g, const NodeRef& x) {
  const Unrolled u = unroll_raw(g, {std::max<std::uint64_t>(3, x.max_block() + 3),
                                    std::max<std::uint64_t>(8, x.max_ray_pos() + 3)});
  return is_maximal_in(u, x);
}

}  // namespace tg
