#pragma once

// rho-wsections of a presented wgraph.  Sections are maximal
// rho-wconnected pieces: branches joined through shared 0-nodes and
// through wnodes whose embraced tips can be crossed by walks of rank at
// most rho.  Arms make the partition symbolic: a section is either
// concrete (finitely many units, possibly whole rays), a per-block
// family (one section per arm block), or spanning (absorbing every block
// of one or more arms).

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tg/error.hpp"
#include "tg/metric.hpp"
#include "tg/ordinal.hpp"
#include "tg/unroll.hpp"
#include "tg/wgraph.hpp"

namespace tg {

struct LocalUnits {
  std::set<std::string> branches;  // cell-local branch keys "a|b"
  std::set<std::string> rays;      // cell-local ray ids

  bool empty() const { return branches.empty() && rays.empty(); }
  bool contains(const std::string& unit, bool is_ray) const {
    return is_ray ? rays.count(unit) > 0 : branches.count(unit) > 0;
  }
  bool includes(const LocalUnits& o) const {
    for (const auto& b : o.branches)
      if (!branches.count(b)) return false;
    for (const auto& r : o.rays)
      if (!rays.count(r)) return false;
    return true;
  }
  friend auto operator<=>(const LocalUnits&, const LocalUnits&) = default;
};

struct Section {
  enum class Kind { Concrete, Family };

  Rank rank = Rank::fin(0);
  Kind kind = Kind::Concrete;
  std::string id;  // least member branch id; family instances append "@n"

  LocalUnits core;                                          // core branches and rays
  std::map<std::string, std::map<std::uint64_t, LocalUnits>> at_blocks;  // arm -> block -> units
  std::map<std::string, std::pair<std::uint64_t, LocalUnits>> per_block;  // arm -> (from, units)

  // family descriptor: one section per block n >= fam_from
  std::string fam_arm;
  LocalUnits fam_units;
  std::uint64_t fam_from = 0;
  std::optional<std::uint64_t> fam_instance;

  bool spanning() const { return !per_block.empty(); }
  bool is_family() const { return kind == Kind::Family; }

  Section instantiate(std::uint64_t n) const {
    if (!is_family()) fail(errc::internal, "only families instantiate");
    if (n < fam_from) fail(errc::internal, "family instance below start");
    Section s = *this;
    s.fam_instance = n;
    s.id = id + "@" + std::to_string(n);
    return s;
  }

  bool contains_unit(int arm /* -1 = core */, const std::string& arm_id, std::uint64_t block,
                     const std::string& unit, bool is_ray) const {
    if (is_family()) {
      if (arm < 0 || arm_id != fam_arm) return false;
      if (fam_instance ? block != *fam_instance : block < fam_from) return false;
      return fam_units.contains(unit, is_ray);
    }
    if (arm < 0) return core.contains(unit, is_ray);
    if (const auto it = at_blocks.find(arm_id); it != at_blocks.end())
      if (const auto jt = it->second.find(block); jt != it->second.end())
        if (jt->second.contains(unit, is_ray)) return true;
    if (const auto it = per_block.find(arm_id); it != per_block.end())
      if (block >= it->second.first && it->second.second.contains(unit, is_ray)) return true;
    return false;
  }

  bool contains_branch(const Unrolled& u, const Unrolled::Branch& br) const {
    const std::string arm_id = br.arm < 0 ? "" : u.graph->arms[br.arm].id;
    return contains_unit(br.arm, arm_id, br.block, br.unit, br.is_ray);
  }

  // Whole tail of an arm inside this section (needed for arm-end tips).
  bool contains_arm_tail(const WGraph& g, const std::string& arm_id) const {
    const Arm* a = g.find_arm(arm_id);
    if (!a) return false;
    LocalUnits all;
    for (const auto& r : a->cell.rays) all.rays.insert(r.id);
    for (const auto& [x, y] : a->cell.branches)
      all.branches.insert(x < y ? x + "|" + y : y + "|" + x);
    if (is_family()) return false;  // one block never holds a tail
    const auto it = per_block.find(arm_id);
    return it != per_block.end() && it->second.second.includes(all);
  }

  std::string describe() const {
    std::string out = "rank " + rank.to_string() + " section " + id;
    if (is_family() && !fam_instance) out += " (one per block n>=" + std::to_string(fam_from) + ")";
    if (spanning()) out += " (spanning)";
    return out;
  }
};

namespace detail {

struct BranchUF {
  std::vector<int> parent;
  explicit BranchUF(std::size_t n) : parent(n) {
    for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[a] = b;
  }
};

// True iff a walk of rank <= rho may cross this tip: the traversal of an
// alpha-tip contributes rank alpha+1.
inline bool tip_crossable(Rank tip_rank, Rank rho) {
  if (tip_rank.is_minus_one()) return true;
  if (tip_rank.is_arrow_omega()) return rho.is_omega();
  if (rho.is_arrow_omega()) return tip_rank.is_fin();  // any finite rank, not warrow
  return tip_rank.succ() <= rho;
}

// Branch partition into rho-wconnected components on one unrolling.
inline std::vector<int> branch_components(const Unrolled& u, const SearchGraph& sg, Rank rho) {
  BranchUF uf(u.branches.size());
  for (std::size_t p = 0; p < u.positions.size(); ++p) {
    const auto& at = u.branches_at[p];
    for (std::size_t i = 1; i < at.size(); ++i) uf.unite(at[0], at[i]);
  }
  // group tips and embraced nodes per embrace class
  std::vector<std::vector<int>> reps(sg.class_members.size());
  for (std::size_t c = 0; c < sg.class_members.size(); ++c)
    for (int p : sg.class_members[c])
      if (!u.branches_at[p].empty()) reps[c].push_back(u.branches_at[p][0]);
  for (const auto& tip : u.tips) {
    if (!tip_crossable(tip.rank, rho)) continue;
    const int c = sg.cls(tip.owner);
    if (tip.arm_end) {
      int first = -1;
      for (std::size_t bi = 0; bi < u.branches.size(); ++bi)
        if (u.branches[bi].arm == tip.arm) {
          if (first < 0) first = static_cast<int>(bi);
          uf.unite(first, static_cast<int>(bi));
        }
      if (first >= 0) reps[c].push_back(first);
    } else {
      const auto& ray = u.rays[tip.ray_inst];
      for (int p : ray.members)
        if (!u.branches_at[p].empty()) {
          reps[c].push_back(u.branches_at[p][0]);
          break;
        }
    }
  }
  for (const auto& r : reps)
    for (std::size_t i = 1; i < r.size(); ++i) uf.unite(r[0], r[i]);

  std::vector<int> comp(u.branches.size());
  for (std::size_t b = 0; b < u.branches.size(); ++b) comp[b] = uf.find(static_cast<int>(b));
  return comp;
}

}  // namespace detail

// Section computation and queries, cached per rank on top of an Analyzer.
class SectionAnalyzer {
 public:
  explicit SectionAnalyzer(Analyzer& an) : an_(&an) {}

  Analyzer& analyzer() { return *an_; }
  const WGraph& graph() const { return an_->graph(); }

  const std::vector<Section>& sections(Rank rho) {
    if (rho > graph().rank)
      fail(errc::rank_above_graph,
           "section rank " + rho.to_string() + " above graph rank " + graph().rank.to_string());
    auto it = cache_.find(rho);
    if (it == cache_.end()) it = cache_.emplace(rho, compute(rho)).first;
    return it->second;
  }

  // Distinct sections of the predecessor rank that x is incident to,
  // keyed by (section index, family instance).
  std::set<std::pair<int, std::uint64_t>> incident_keys(const NodeRef& x) {
    const Rank rx = rank_of(x);
    if (rx < Rank::fin(1))
      fail(errc::rank_mismatch, ref_text(x) + " has rank 0; incidence needs rank >= 1");
    return incident_keys_at(x, rx.pred());
  }

  bool incident(const NodeRef& x, const Section& s) {
    const Rank rx = rank_of(x);
    if (rx < Rank::fin(1))
      fail(errc::rank_mismatch, ref_text(x) + " has rank 0; incidence needs rank >= 1");
    if (s.rank != rx.pred())
      fail(errc::rank_mismatch, "section rank " + s.rank.to_string() +
                                    " is not the predecessor of " + rx.to_string());
    if (s.is_family() && !s.fam_instance)
      fail(errc::rank_mismatch, "incidence needs a family instance; call instantiate(n)");
    for (const auto& att : attachments(x))
      if (attachment_in(att, s)) return true;
    return false;
  }

  bool wadjacent(const NodeRef& x, const NodeRef& y) {
    if (rank_of(x) != rank_of(y))
      fail(errc::rank_mismatch,
           ref_text(x) + " and " + ref_text(y) + " have different ranks");
    const auto kx = incident_keys(x);
    for (const auto& k : incident_keys(y))
      if (kx.count(k)) return true;
    return false;
  }

  bool is_boundary(const NodeRef& x) { return incident_keys(x).size() >= 2; }

  // Every (rho-1)-wsection inside s has finitely many incident boundary
  // rho-wnodes.  Only a spanning lower section fed by a per-cell
  // boundary wnode can fail.
  bool locally_rho_finite(const Section& s) {
    const Rank rho = s.rank;
    if (rho.is_arrow_omega())
      fail(errc::arrow_omega_rank, "local finiteness is not defined at rank warrow");
    if (rho == Rank::fin(0)) return true;
    const auto& lower = sections(rho.pred());
    for (std::size_t si = 0; si < lower.size(); ++si) {
      if (!section_inside(lower[si], s)) continue;
      if (!lower[si].spanning()) continue;
      if (!cell_boundary_contribution(lower[si], rho).empty()) return false;
    }
    return true;
  }

  // Structural test: some arm cell contributes a boundary rho-wnode per
  // copy inside s.
  bool infinitely_many_boundary(const Section& s, Rank rho) {
    for (const auto& fam : boundary_families(rho))
      if (node_in_section(fam.at(kProbeBlock), s)) return true;
    return false;
  }

  std::vector<std::pair<NodeRef, Ordinal>> escape_walk(const Section& s, const NodeRef& x0,
                                                       std::uint64_t K) {
    const Rank rho = s.rank;
    if (rho.is_arrow_omega()) fail(errc::arrow_omega_rank, "escape walk needs rank != warrow");
    if (!locally_rho_finite(s))
      fail(errc::hypothesis_violated, "section " + s.id + " is not locally " + rho.to_string() +
                                          "-finite");
    if (!infinitely_many_boundary(s, rho))
      fail(errc::hypothesis_violated,
           "section " + s.id + " has only finitely many boundary wnodes");
    std::vector<std::pair<NodeRef, Ordinal>> out;
    if (K == 0) return out;
    const auto families = boundary_families(rho);
    const Ordinal step = rho.is_omega() ? omega_pow(Rank::omega()) : omega_pow(rho);
    std::uint64_t block = 0;
    for (std::uint64_t k = 1; k <= K; ++k) {
      const Ordinal need = nat_mul(step, k);
      bool found = false;
      for (std::uint64_t guard = 0; guard < 8 * K + 64 && !found; ++guard) {
        for (const auto& fam : families) {
          const NodeRef cand = fam.at(block);
          const Ordinal d = an_->distance(x0, cand);
          if (!(d < need)) {
            out.emplace_back(cand, d);
            found = true;
            break;
          }
        }
        ++block;
      }
      if (!found) fail(errc::internal, "escape walk stalled hunting step " + std::to_string(k));
    }
    return out;
  }

  // The constructive walk between two wnodes incident to one section:
  // a leg from x into the section, a walk inside it, a leg out to y.
  Walk connecting_walk(const NodeRef& x, const NodeRef& y, const Section& s) {
    if (!incident(x, s))
      fail(errc::not_incident, ref_text(x) + " is not incident to section " + s.id);
    if (!incident(y, s))
      fail(errc::not_incident, ref_text(y) + " is not incident to section " + s.id);
    if (x == y) return Walk{{x}, {}};

    const auto [leg_x, u_x] = entry_leg(x, s);
    const auto [leg_y, u_y] = entry_leg(y, s);
    const SectionScope scope = section_scope(s);
    const Walk mid = an_->geodesic(u_x, u_y, &scope);

    Walk w = leg_x;
    const auto append = [&w](const Walk& part, bool reversed) {
      const auto join = [&](const NodeRef& n, const WalkStep& st) {
        w.steps.push_back(st);
        w.nodes.push_back(n);
      };
      if (reversed) {
        for (std::size_t i = part.steps.size(); i-- > 0;) join(part.nodes[i], part.steps[i]);
      } else {
        for (std::size_t i = 0; i < part.steps.size(); ++i) join(part.nodes[i + 1], part.steps[i]);
      }
    };
    if (w.nodes.back() != mid.nodes.front())
      append(Walk{{w.nodes.back(), mid.nodes.front()},
                  {{WalkStep::Kind::Tip, Rank::minus_one(), ""}}},
             false);
    append(mid, false);
    if (w.nodes.back() != leg_y.nodes.back())
      append(Walk{{w.nodes.back(), leg_y.nodes.back()},
                  {{WalkStep::Kind::Tip, Rank::minus_one(), ""}}},
             false);
    append(leg_y, true);
    return w;
  }

  // Scope restriction for searches inside one section.
  SectionScope section_scope(const Section& s) const {
    SectionScope scope;
    scope.id = "sec:" + s.rank.to_string() + ":" + s.id;
    scope.rank = s.rank;
    const WGraph* g = &graph();
    scope.build = [s, g](const Unrolled& u) {
      ScopeSets sets;
      sets.rank = s.rank;
      sets.branch_in.assign(u.branches.size(), 0);
      for (std::size_t bi = 0; bi < u.branches.size(); ++bi)
        sets.branch_in[bi] = s.contains_branch(u, u.branches[bi]) ? 1 : 0;
      sets.tip_in.assign(u.tips.size(), 0);
      for (std::size_t ti = 0; ti < u.tips.size(); ++ti) {
        const auto& tip = u.tips[ti];
        if (tip.arm_end) {
          sets.tip_in[ti] =
              tip.arm >= 0 && s.contains_arm_tail(*g, g->arms[tip.arm].id) ? 1 : 0;
        } else {
          const auto& ray = u.rays[tip.ray_inst];
          const std::string arm_id = ray.arm < 0 ? "" : g->arms[ray.arm].id;
          sets.tip_in[ti] = s.contains_unit(ray.arm, arm_id, ray.block, ray.ray, true) ? 1 : 0;
        }
      }
      return sets;
    };
    return scope;
  }

  // Is every branch of sa inside sb?  sa must be concrete or an
  // instantiated family.
  bool section_inside(const Section& sa, const Section& sb) {
    if (sa.is_family() && !sa.fam_instance) {
      // whole family inside sb iff a representative instance is
      return section_inside(sa.instantiate(std::max(sa.fam_from, kProbeBlock)), sb);
    }
    if (sa.is_family()) {
      const std::string& arm = sa.fam_arm;
      for (const auto& b : sa.fam_units.branches)
        if (!sb.contains_unit(0, arm, *sa.fam_instance, b, false)) return false;
      for (const auto& r : sa.fam_units.rays)
        if (!sb.contains_unit(0, arm, *sa.fam_instance, r, true)) return false;
      return true;
    }
    for (const auto& b : sa.core.branches)
      if (!sb.contains_unit(-1, "", 0, b, false)) return false;
    for (const auto& r : sa.core.rays)
      if (!sb.contains_unit(-1, "", 0, r, true)) return false;
    for (const auto& [arm, blocks] : sa.at_blocks)
      for (const auto& [blk, units] : blocks) {
        for (const auto& b : units.branches)
          if (!sb.contains_unit(0, arm, blk, b, false)) return false;
        for (const auto& r : units.rays)
          if (!sb.contains_unit(0, arm, blk, r, true)) return false;
      }
    for (const auto& [arm, rule] : sa.per_block) {
      const auto it = sb.per_block.find(arm);
      if (it == sb.per_block.end()) return false;
      if (it->second.first > rule.first) return false;
      if (!it->second.second.includes(rule.second)) return false;
    }
    return true;
  }

  bool node_in_section(const NodeRef& n, const Section& s) {
    const Unrolled& u = probe();
    const int p = u.find_position(n);
    if (p < 0) fail(errc::unknown_node, ref_text(n) + " outside the probe unrolling");
    for (int bi : u.branches_at[p])
      if (s.contains_branch(u, u.branches[bi])) return true;
    if (u.positions[p].is_wnode)
      for (const auto& att : attachments(n))
        if (attachment_in(att, s)) return true;
    return false;
  }

  Rank rank_of(const NodeRef& x) {
    const Unrolled& u = probe();
    const int p = u.find_position(x);
    if (p < 0) fail(errc::unknown_node, ref_text(x) + " outside the probe unrolling");
    return u.positions[p].is_wnode ? u.positions[p].rank : Rank::fin(0);
  }

  // Boundary rho-wnode families: one entry per arm-cell wnode whose
  // instances are boundary (checked at a middle block), plus bound core
  // wnodes are reported separately by boundary_core.
  std::vector<IndexedNodes> boundary_families(Rank rho) {
    std::vector<IndexedNodes> out;
    for (const auto& a : graph().arms)
      for (const auto& w : a.cell.wnodes) {
        if (w.rank != rho) continue;
        const NodeRef probe_ref = NodeRef::arm_node(a.id, kProbeBlock, w.id);
        if (is_boundary(probe_ref)) out.push_back(IndexedNodes::arm_block(a.id, w.id));
      }
    return out;
  }

  std::vector<NodeRef> boundary_core(Rank rho) {
    std::vector<NodeRef> out;
    const auto consider = [&](const WNodeDecl& w) {
      if (w.rank != rho) return;
      const NodeRef r = NodeRef::core(w.id);
      if (is_boundary(r)) out.push_back(r);
    };
    for (const auto& w : graph().core.wnodes) consider(w);
    for (const auto& a : graph().arms)
      if (a.apex) consider(*a.apex);
    return out;
  }

 private:
  static constexpr std::uint64_t kProbeBlock = 3;
  static constexpr std::uint64_t kDepth = 5;

  struct Attachment {
    enum class Kind { Node, Ray, ArmEnd } kind;
    int pos = -1;       // Node: embraced 0-node position (probe unrolling)
    int ray_inst = -1;  // Ray
    int arm = -1;       // ArmEnd
  };

  const Unrolled& probe() {
    if (!probe_u_) {
      probe_u_ = std::make_unique<Unrolled>(unroll_raw(graph(), {kDepth + 2, 16}));
      probe_sg_ = std::make_unique<SearchGraph>(build_search(*probe_u_));
    }
    return *probe_u_;
  }

  const SearchGraph& probe_search() {
    probe();
    return *probe_sg_;
  }

  // Embrace subtree of x: x plus everything it (transitively) embraces.
  std::vector<Attachment> attachments(const NodeRef& x) {
    const Unrolled& u = probe();
    const int px = u.require_position(x);
    std::set<int> subtree{px};
    bool grew = true;
    while (grew) {
      grew = false;
      for (const auto& e : u.embraces)
        if (subtree.count(e.parent) && !subtree.count(e.child)) {
          subtree.insert(e.child);
          grew = true;
        }
    }
    std::vector<Attachment> out;
    for (int p : subtree)
      if (!u.positions[p].is_wnode) out.push_back({Attachment::Kind::Node, p, -1, -1});
    for (std::size_t ti = 0; ti < u.tips.size(); ++ti) {
      const auto& tip = u.tips[ti];
      if (!subtree.count(tip.owner)) continue;
      if (tip.arm_end)
        out.push_back({Attachment::Kind::ArmEnd, -1, -1, tip.arm});
      else
        out.push_back({Attachment::Kind::Ray, -1, tip.ray_inst, -1});
    }
    return out;
  }

  bool attachment_in(const Attachment& att, const Section& s) {
    const Unrolled& u = probe();
    switch (att.kind) {
      case Attachment::Kind::Node:
        for (int bi : u.branches_at[att.pos])
          if (s.contains_branch(u, u.branches[bi])) return true;
        return false;
      case Attachment::Kind::Ray: {
        const auto& ray = u.rays[att.ray_inst];
        const std::string arm_id = ray.arm < 0 ? "" : graph().arms[ray.arm].id;
        return s.contains_unit(ray.arm, arm_id, ray.block, ray.ray, true);
      }
      case Attachment::Kind::ArmEnd:
        return att.arm >= 0 && s.contains_arm_tail(graph(), graph().arms[att.arm].id);
    }
    return false;
  }

  std::set<std::pair<int, std::uint64_t>> incident_keys_at(const NodeRef& x, Rank low) {
    const auto& secs = sections(low);
    std::set<std::pair<int, std::uint64_t>> keys;
    const Unrolled& u = probe();
    for (const auto& att : attachments(x)) {
      for (std::size_t si = 0; si < secs.size(); ++si) {
        const Section& s = secs[si];
        if (s.is_family()) {
          // the instance is determined by the attachment's block
          std::optional<std::uint64_t> blk;
          if (att.kind == Attachment::Kind::Node) {
            for (int bi : u.branches_at[att.pos]) {
              const auto& br = u.branches[bi];
              if (s.contains_branch(u, br)) blk = br.block;
            }
          } else if (att.kind == Attachment::Kind::Ray) {
            const auto& ray = u.rays[att.ray_inst];
            const std::string arm_id = ray.arm < 0 ? "" : graph().arms[ray.arm].id;
            if (s.contains_unit(ray.arm, arm_id, ray.block, ray.ray, true)) blk = ray.block;
          }
          if (blk) keys.insert({static_cast<int>(si), *blk});
        } else if (attachment_in(att, s)) {
          keys.insert({static_cast<int>(si), 0});
        }
      }
    }
    return keys;
  }

  // Arm-cell wnodes of rank rho that are boundary and incident to the
  // given spanning lower section (checked at the probe block).
  std::vector<IndexedNodes> cell_boundary_contribution(const Section& lower, Rank rho) {
    std::vector<IndexedNodes> out;
    for (const auto& fam : boundary_families(rho)) {
      const NodeRef probe_ref = fam.at(kProbeBlock);
      bool touches = false;
      for (const auto& att : attachments(probe_ref))
        if (attachment_in(att, lower)) touches = true;
      if (touches) out.push_back(fam);
    }
    return out;
  }

  // Leg from x into the section through its first qualifying attachment:
  // ends at an interior node u of the section not embraced by x.
  std::pair<Walk, NodeRef> entry_leg(const NodeRef& x, const Section& s) {
    const Unrolled& u = probe();
    const SearchGraph& sg = probe_search();
    const int px = u.require_position(x);
    const int cx = sg.cls(px);

    std::optional<std::pair<Walk, NodeRef>> best;
    const auto offer = [&](std::pair<Walk, NodeRef> cand) {
      if (!best || ref_text(cand.second) < ref_text(best->second)) best = std::move(cand);
    };
    for (const auto& att : attachments(x)) {
      if (!attachment_in(att, s)) continue;
      if (att.kind == Attachment::Kind::Node) {
        // step off the embraced node to a branch neighbour outside x's class
        int via = att.pos;
        int interior = -1;
        std::string interior_branch;
        for (int bi : u.branches_at[via]) {
          const auto& br = u.branches[bi];
          if (!s.contains_branch(u, br)) continue;
          const int other = br.u == via ? br.v : br.u;
          if (sg.cls(other) == cx) continue;
          if (interior < 0 || u.positions[other].text < u.positions[interior].text) {
            interior = other;
            interior_branch = br.id;
          }
        }
        if (interior < 0) continue;
        Walk leg;
        leg.nodes = {x, u.positions[via].ref, u.positions[interior].ref};
        leg.steps = {{WalkStep::Kind::Tip, Rank::minus_one(), ""},
                     {WalkStep::Kind::Branch, Rank::minus_one(), interior_branch}};
        offer({std::move(leg), u.positions[interior].ref});
      } else if (att.kind == Attachment::Kind::Ray) {
        const auto& ray = u.rays[att.ray_inst];
        int interior = -1;
        for (int p : ray.members)
          if (sg.cls(p) != cx) {
            interior = p;
            break;
          }
        if (interior < 0) continue;
        Walk leg;
        leg.nodes = {x, u.positions[interior].ref};
        leg.steps = {{WalkStep::Kind::Tip, Rank::fin(0), ray.text + "~tip"}};
        offer({std::move(leg), u.positions[interior].ref});
      } else {
        for (std::size_t ti = 0; ti < u.tips.size(); ++ti) {
          const auto& tip = u.tips[ti];
          if (!tip.arm_end || tip.arm != att.arm || sg.cls(tip.owner) != cx) continue;
          int interior = -1;
          for (int z : tip.zone)
            if (sg.cls(z) != cx &&
                (interior < 0 || u.positions[z].text < u.positions[interior].text))
              interior = z;
          if (interior < 0) continue;
          Walk leg;
          leg.nodes = {x, u.positions[interior].ref};
          leg.steps = {{WalkStep::Kind::Tip, tip.rank, tip.id}};
          offer({std::move(leg), u.positions[interior].ref});
        }
      }
    }
    if (!best) fail(errc::not_incident, ref_text(x) + " has no entry into section " + s.id);
    return *best;
  }

  std::vector<Section> compute(Rank rho);

  Analyzer* an_;
  std::map<Rank, std::vector<Section>> cache_;
  std::unique_ptr<Unrolled> probe_u_;
  std::unique_ptr<SearchGraph> probe_sg_;
};

inline std::vector<Section> SectionAnalyzer::compute(Rank rho) {
  const WGraph& g = graph();
  const Unrolled u = unroll_raw(g, {kDepth + 1, 12});
  const SearchGraph sg = build_search(u);
  const std::vector<int> comp = detail::branch_components(u, sg, rho);
  const std::uint64_t last = kDepth;  // block indices run 0..kDepth

  struct Raw {
    LocalUnits core;
    std::map<std::string, std::map<std::uint64_t, LocalUnits>> arm_units;
    std::string least_branch;
    std::uint64_t min_block = ~0ull, max_block = 0;
    bool touches_core = false;
  };
  std::map<int, Raw> raws;
  for (std::size_t bi = 0; bi < u.branches.size(); ++bi) {
    const auto& br = u.branches[bi];
    Raw& r = raws[comp[bi]];
    if (r.least_branch.empty() || br.id < r.least_branch) r.least_branch = br.id;
    if (br.arm < 0) {
      r.touches_core = true;
      if (br.is_ray) r.core.rays.insert(br.unit);
      else r.core.branches.insert(br.unit);
    } else {
      const std::string arm_id = g.arms[br.arm].id;
      LocalUnits& lu = r.arm_units[arm_id][br.block];
      if (br.is_ray) lu.rays.insert(br.unit);
      else lu.branches.insert(br.unit);
      r.min_block = std::min(r.min_block, br.block);
      r.max_block = std::max(r.max_block, br.block);
    }
  }

  // Group single-block components into families.
  using FamilyKey = std::pair<std::string, LocalUnits>;  // (arm, units)
  std::map<FamilyKey, std::map<std::uint64_t, std::string>> family_blocks;  // -> least branch
  std::vector<Section> out;

  for (const auto& [cid, raw] : raws) {
    const bool single_block = !raw.touches_core && raw.arm_units.size() == 1 &&
                              raw.arm_units.begin()->second.size() == 1;
    if (single_block) {
      const auto& [arm, blocks] = *raw.arm_units.begin();
      family_blocks[{arm, blocks.begin()->second}][blocks.begin()->first] = raw.least_branch;
      continue;
    }
    Section s;
    s.rank = rho;
    s.kind = Section::Kind::Concrete;
    s.core = raw.core;
    s.id = raw.least_branch;
    const bool reaches_last = raw.max_block == last && !raw.arm_units.empty();
    for (const auto& [arm, blocks] : raw.arm_units) {
      if (reaches_last && blocks.count(last) && blocks.size() >= 2) {
        // spanning along this arm: find the periodic pattern
        const LocalUnits& pattern = blocks.at(last - 1);
        std::uint64_t from = last;
        while (from > 0 && blocks.count(from - 1) && blocks.at(from - 1) == pattern) --from;
        s.per_block[arm] = {from, pattern};
        for (const auto& [blk, units] : blocks)
          if (blk < from) s.at_blocks[arm][blk] = units;
      } else {
        for (const auto& [blk, units] : blocks) s.at_blocks[arm][blk] = units;
      }
    }
    out.push_back(std::move(s));
  }

  for (const auto& [key, blocks] : family_blocks) {
    const bool contiguous_to_last = blocks.count(last) > 0 &&
                                    blocks.size() == last - blocks.begin()->first + 1;
    if (contiguous_to_last) {
      Section s;
      s.rank = rho;
      s.kind = Section::Kind::Family;
      s.fam_arm = key.first;
      s.fam_units = key.second;
      s.fam_from = blocks.begin()->first;
      s.id = blocks.begin()->second;
      out.push_back(std::move(s));
    } else {
      for (const auto& [blk, least] : blocks) {
        Section s;
        s.rank = rho;
        s.kind = Section::Kind::Concrete;
        s.at_blocks[key.first][blk] = key.second;
        s.id = least;
        out.push_back(std::move(s));
      }
    }
  }

  std::sort(out.begin(), out.end(), [](const Section& a, const Section& b) { return a.id < b.id; });
  return out;
}

}  // namespace tg
