#pragma once

// Ordinal walk lengths and wdistances.  Distances run least-first search
// over the embrace-class quotient of a truncated unrolling; the
// truncation is certified exact by comparing the best label against the
// cheapest escape through a truncation cut, doubling the depth until the
// certificate holds.  A brute-force bounded walk enumeration serves as
// the independent oracle.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "tg/error.hpp"
#include "tg/ordinal.hpp"
#include "tg/ordinal_poly.hpp"
#include "tg/unroll.hpp"
#include "tg/wgraph.hpp"

namespace tg {

struct WalkStep {
  enum class Kind { Branch, Tip };
  Kind kind = Kind::Branch;
  Rank tip_rank = Rank::minus_one();
  std::string id;  // branch id or tip id; empty for embrace hops

  std::string to_string() const {
    if (kind == Kind::Branch) return "-[" + id + "]-";
    if (tip_rank.is_minus_one()) return "~(-1)~";
    return "~(" + tip_rank.to_string() + "-tip " + id + ")~";
  }
};

// A two-ended walk as a finite alternating node/step list.  A tip
// traversal stands for the whole one-ended sub-walk out to the tip and
// across into (or out of) the wnode that embraces it.
struct Walk {
  std::vector<NodeRef> nodes;
  std::vector<WalkStep> steps;

  bool trivial() const { return steps.empty(); }

  std::string to_string() const {
    if (nodes.empty()) return "<empty>";
    std::string out = ref_text(nodes[0]);
    for (std::size_t i = 0; i < steps.size(); ++i)
      out += " " + steps[i].to_string() + " " + ref_text(nodes[i + 1]);
    return out;
  }
};

inline Ordinal step_cost(const WalkStep& s) {
  if (s.kind == WalkStep::Kind::Branch) return Ordinal::finite(1);
  if (s.tip_rank.is_minus_one()) return Ordinal::zero();
  if (s.tip_rank.is_arrow_omega()) return omega_pow(Rank::omega());
  return omega_pow(s.tip_rank.succ());
}

// Named restriction of the searchable structure to one wsection.
struct SectionScope {
  std::string id;
  Rank rank = Rank::omega();
  std::function<ScopeSets(const Unrolled&)> build;
};

namespace detail {

struct QCmp {
  bool operator()(const std::pair<Ordinal, int>& a, const std::pair<Ordinal, int>& b) const {
    if (a.first != b.first) return a.first > b.first;
    return a.second > b.second;
  }
};

inline std::vector<std::optional<Ordinal>> dijkstra(const SearchGraph& sg, int src) {
  std::vector<std::optional<Ordinal>> dist(sg.class_members.size());
  std::vector<char> settled(sg.class_members.size(), 0);
  std::priority_queue<std::pair<Ordinal, int>, std::vector<std::pair<Ordinal, int>>, QCmp> pq;
  dist[src] = Ordinal::zero();
  pq.push({Ordinal::zero(), src});
  while (!pq.empty()) {
    const auto [d, c] = pq.top();
    pq.pop();
    if (settled[c]) continue;
    settled[c] = 1;
    for (const auto& e : sg.adj[c]) {
      const Ordinal nd = nat_sum(d, e.cost);
      if (!dist[e.to] || nd < *dist[e.to]) {
        dist[e.to] = nd;
        pq.push({nd, e.to});
      }
    }
  }
  return dist;
}

}  // namespace detail

// Node families indexed by one natural parameter: the wnodes (or
// 0-nodes) of an arm cell across blocks, or the positions of one ray.
struct IndexedNodes {
  enum class Kind { ArmBlock, RayPos };
  Kind kind = Kind::ArmBlock;
  std::string arm;          // ArmBlock: the arm; RayPos: owner arm ("" = core)
  std::uint64_t block = 0;  // RayPos in an arm: fixed block
  std::string local;        // node/wnode id, or ray id

  static IndexedNodes arm_block(std::string arm, std::string local) {
    return {Kind::ArmBlock, std::move(arm), 0, std::move(local)};
  }
  static IndexedNodes ray_pos(std::string arm, std::uint64_t block, std::string ray) {
    return {Kind::RayPos, std::move(arm), block, std::move(ray)};
  }

  NodeRef at(std::uint64_t i) const {
    if (kind == Kind::ArmBlock) return NodeRef::arm_node(arm, i, local);
    if (arm.empty()) return NodeRef::core_ray(local, i);
    return NodeRef::arm_ray(arm, block, local, i);
  }

  std::string key() const {
    return (kind == Kind::ArmBlock ? "b:" : "r:") + arm + ":" + std::to_string(block) + ":" +
           local;
  }

  bool same_carrier(const IndexedNodes& o) const {
    return kind == o.kind && arm == o.arm && block == o.block && local == o.local;
  }

  friend bool operator==(const IndexedNodes&, const IndexedNodes&) = default;
};

// Distance engine with unrolling, distance and fit caches.  Pure queries
// over an immutable presentation; results do not depend on cache state.
class Analyzer {
 public:
  explicit Analyzer(const WGraph& g) : g_(&g) {}

  const WGraph& graph() const { return *g_; }

  Ordinal distance(const NodeRef& x, const NodeRef& y, const SectionScope* scope = nullptr) {
    const std::string kx = Unrolled::raw_key(x), ky = Unrolled::raw_key(y);
    const auto key = std::make_tuple(scope ? scope->id : std::string(), std::min(kx, ky),
                                     std::max(kx, ky));
    if (const auto it = dist_memo_.find(key); it != dist_memo_.end()) return it->second;
    const Ordinal d = compute_distance(x, y, scope);
    dist_memo_.emplace(key, d);
    return d;
  }

  Walk geodesic(const NodeRef& x, const NodeRef& y, const SectionScope* scope = nullptr) {
    const auto [u, sg] = certified(x, y, scope);
    return lex_geodesic(*u, *sg, x, y);
  }

  Ordinal oracle(const NodeRef& x, const NodeRef& y, std::uint64_t max_tips,
                 std::uint64_t max_steps) {
    const std::uint64_t depth =
        std::min<std::uint64_t>(64, std::max<std::uint64_t>({3, x.max_block() + 2,
                                                             y.max_block() + 2}) +
                                        max_steps);
    const std::uint64_t ray = std::max<std::uint64_t>(
        {8, x.max_ray_pos() + 2, y.max_ray_pos() + 2}) + max_steps;
    const Prepared& prep = prepare(nullptr, depth, ray);
    const int px = prep.u->require_position(x), py = prep.u->require_position(y);
    const int cx = prep.sg.cls(px), cy = prep.sg.cls(py);

    std::optional<Ordinal> best;
    std::map<std::tuple<int, std::uint64_t, std::uint64_t>, Ordinal> seen;
    struct Frame {
      int cls;
      Ordinal len;
      std::uint64_t steps, tips;
    };
    std::vector<Frame> stack{{cx, Ordinal::zero(), 0, 0}};
    while (!stack.empty()) {
      const Frame f = stack.back();
      stack.pop_back();
      if (best && !(f.len < *best)) continue;
      if (f.cls == cy && (!best || f.len < *best)) best = f.len;
      const auto key = std::make_tuple(f.cls, f.steps, f.tips);
      if (const auto it = seen.find(key); it != seen.end() && !(f.len < it->second)) continue;
      seen[key] = f.len;
      for (const auto& e : prep.sg.adj[f.cls]) {
        if (e.kind == 0) {
          if (f.steps + 1 > max_steps) continue;
          stack.push_back({e.to, nat_sum(f.len, e.cost), f.steps + 1, f.tips});
        } else {
          if (f.tips + 1 > max_tips) continue;
          stack.push_back({e.to, nat_sum(f.len, e.cost), f.steps, f.tips + 1});
        }
      }
    }
    if (!best)
      fail(errc::bound_too_small, "no walk from " + ref_text(x) + " to " + ref_text(y) +
                                      " within " + std::to_string(max_tips) + " tip crossings and " +
                                      std::to_string(max_steps) + " branch steps");
    return *best;
  }

  // Affine fit of i -> distance(base, fam(i)), per CNF exponent, fitted
  // on three consecutive block indices and verified on two more.
  OrdinalPoly fit_1d(const NodeRef& base, const IndexedNodes& fam,
                     const SectionScope* scope = nullptr) {
    const auto key = std::make_tuple(scope ? scope->id : std::string(), Unrolled::raw_key(base),
                                     fam.key());
    if (const auto it = fit1_memo_.find(key); it != fit1_memo_.end()) return it->second;
    const std::uint64_t start =
        std::max<std::uint64_t>({2, base.max_block() + 2, base.max_ray_pos() + 2});
    std::vector<Ordinal> samples;
    for (std::uint64_t i = start; i < start + 5; ++i)
      samples.push_back(distance(base, fam.at(i), scope));
    const OrdinalPoly f = affine_fit(samples, start, "distance along " + fam.key());
    fit1_memo_.emplace(key, f);
    return f;
  }

  // Affine fit of delta -> distance(fam(i0), fam(i0+delta)), verified to
  // be translation invariant by refitting one block further in.
  OrdinalPoly fit_delta(const IndexedNodes& fam, const SectionScope* scope = nullptr) {
    const auto key = std::make_tuple(scope ? scope->id : std::string(), fam.key(), std::string());
    if (const auto it = fit1_memo_.find(key); it != fit1_memo_.end()) return it->second;
    const std::uint64_t i0 = 3;
    std::vector<Ordinal> samples, shifted;
    for (std::uint64_t d = 0; d < 5; ++d) {
      samples.push_back(distance(fam.at(i0), fam.at(i0 + d), scope));
      shifted.push_back(distance(fam.at(i0 + 1), fam.at(i0 + 1 + d), scope));
    }
    for (std::size_t d = 0; d < samples.size(); ++d)
      if (samples[d] != shifted[d])
        fail(errc::fit_failure, "distances along " + fam.key() + " are not translation invariant");
    const OrdinalPoly f = affine_fit(samples, 0, "distance gap along " + fam.key());
    fit1_memo_.emplace(key, f);
    return f;
  }

  // Affine fit of (i, j) -> distance(famA(i), famB(j)) for families on
  // different carriers; returns per-exponent (alpha, beta, gamma).
  struct Fit2D {
    std::map<Rank, std::array<long long, 3>, RankDesc> terms;  // alpha*i + beta*j + gamma
    std::uint64_t start = 2;
  };

  Fit2D fit_2d(const IndexedNodes& fa, const IndexedNodes& fb,
               const SectionScope* scope = nullptr) {
    const auto key = std::make_tuple(scope ? scope->id : std::string(), fa.key(), fb.key());
    if (const auto it = fit2_memo_.find(key); it != fit2_memo_.end()) return it->second;
    const std::uint64_t s = 2;
    const auto val = [&](std::uint64_t i, std::uint64_t j) {
      return distance(fa.at(i), fb.at(j), scope);
    };
    std::map<std::pair<int, int>, Ordinal> v;
    for (int di = 0; di <= 2; ++di)
      for (int dj = 0; dj <= 2; ++dj) v[{di, dj}] = val(s + di, s + dj);

    std::set<Rank> exps;
    for (const auto& [ij, o] : v)
      for (const auto& t : o.terms()) exps.insert(t.exp);

    Fit2D fit;
    fit.start = s;
    for (const Rank e : exps) {
      const auto c = [&](int di, int dj) {
        return static_cast<long long>(v[{di, dj}].coeff_at(e));
      };
      const long long alpha = c(1, 0) - c(0, 0);
      const long long beta = c(0, 1) - c(0, 0);
      const long long gamma = c(0, 0) - alpha * static_cast<long long>(s) -
                              beta * static_cast<long long>(s);
      for (int di = 0; di <= 2; ++di)
        for (int dj = 0; dj <= 2; ++dj)
          if (c(di, dj) != alpha * static_cast<long long>(s + di) +
                               beta * static_cast<long long>(s + dj) + gamma)
            fail(errc::fit_failure,
                 "cross-family distance " + fa.key() + " x " + fb.key() + " is not affine");
      fit.terms[e] = {alpha, beta, gamma};
    }
    fit2_memo_.emplace(key, fit);
    return fit;
  }

 private:
  struct Prepared {
    std::unique_ptr<Unrolled> u;
    std::unique_ptr<ScopeSets> sets;
    SearchGraph sg;
  };

  const Prepared& prepare(const SectionScope* scope, std::uint64_t depth, std::uint64_t ray) {
    const auto key = std::make_tuple(scope ? scope->id : std::string(), depth, ray);
    auto it = prepared_.find(key);
    if (it == prepared_.end()) {
      Prepared p;
      p.u = std::make_unique<Unrolled>(unroll_raw(*g_, {depth, ray}));
      if (scope) p.sets = std::make_unique<ScopeSets>(scope->build(*p.u));
      p.sg = build_search(*p.u, p.sets.get());
      it = prepared_.emplace(key, std::move(p)).first;
    }
    return it->second;
  }

  // A walk can leave the truncation only into the tail of one arm,
  // through that arm's glue cut; it can come back only through the same
  // cut or by ascending one of that arm's end tips into its materialized
  // owner.  The cheapest such excursion bounds every walk that uses
  // unmaterialized structure, so best <= bound certifies exactness.
  std::pair<const Unrolled*, const SearchGraph*> certified(const NodeRef& x, const NodeRef& y,
                                                           const SectionScope* scope) {
    std::uint64_t depth = std::max<std::uint64_t>({3, x.max_block() + 2, y.max_block() + 2});
    const std::uint64_t ray =
        std::max<std::uint64_t>({8, x.max_ray_pos() + 4, y.max_ray_pos() + 4});
    while (true) {
      const Prepared& prep = prepare(scope, depth, ray);
      const Unrolled& u = *prep.u;
      const SearchGraph& sg = prep.sg;
      const auto dx = detail::dijkstra(sg, sg.cls(u.require_position(x)));
      const auto& best = dx[sg.cls(u.require_position(y))];
      if (!best) fail(errc::disconnected, ref_text(x) + " -/- " + ref_text(y));
      const auto dy = detail::dijkstra(sg, sg.cls(u.require_position(y)));

      std::map<std::string, std::vector<int>> arm_cuts;  // arm id -> cut classes
      for (std::size_t c = 0; c < sg.class_members.size(); ++c)
        if (sg.class_cut[c])
          for (int p : sg.class_members[c])
            if (u.positions[p].cut) arm_cuts[u.positions[p].ref.arm].push_back(static_cast<int>(c));

      bool ok = true;
      for (const auto& [arm_id, cuts] : arm_cuts) {
        std::optional<Ordinal> exit_x, back_y;
        for (int c : cuts) {
          if (dx[c] && (!exit_x || *dx[c] < *exit_x)) exit_x = dx[c];
          if (dy[c] && (!back_y || *dy[c] < *back_y)) back_y = dy[c];
        }
        if (!exit_x) continue;  // the tail of this arm is unreachable from x
        for (std::size_t ti = 0; ti < u.tips.size(); ++ti) {
          const auto& tip = u.tips[ti];
          if (!tip.arm_end || tip.arm < 0 || u.graph->arms[tip.arm].id != arm_id) continue;
          if (prep.sets && !prep.sets->tip_in[ti]) continue;
          const int oc = sg.cls(tip.owner);
          if (!dy[oc]) continue;
          const Ordinal cost = tip.rank.is_arrow_omega() ? omega_pow(Rank::omega())
                                                         : omega_pow(tip.rank.succ());
          const Ordinal via = nat_sum(cost, *dy[oc]);
          if (!back_y || via < *back_y) back_y = via;
        }
        if (!back_y) continue;  // no way back to y from this tail
        if (nat_sum(*exit_x, *back_y) < *best) {
          ok = false;
          break;
        }
      }
      if (ok) return {prep.u.get(), &prep.sg};
      if (depth >= 4096)
        fail(errc::internal, "distance between " + ref_text(x) + " and " + ref_text(y) +
                                 " not certified at depth 4096");
      depth *= 2;
    }
  }

  Ordinal compute_distance(const NodeRef& x, const NodeRef& y, const SectionScope* scope) {
    const auto [u, sg] = certified(x, y, scope);
    const auto dist = detail::dijkstra(*sg, sg->cls(u->require_position(x)));
    return *dist[sg->cls(u->require_position(y))];
  }

  // Deterministic geodesic: among minimum-length walks, the one whose
  // class-representative name sequence is lexicographically least.
  Walk lex_geodesic(const Unrolled& u, const SearchGraph& sg, const NodeRef& x,
                    const NodeRef& y) {
    const int cx = sg.cls(u.require_position(x)), cy = sg.cls(u.require_position(y));
    std::vector<std::string> text(sg.class_members.size());
    for (std::size_t c = 0; c < text.size(); ++c) text[c] = u.positions[sg.class_root[c]].text;

    struct Entry {
      Ordinal d;
      std::vector<int> path;   // classes visited
      std::vector<int> edges;  // (edge position in adj list of path[k])
    };
    const auto lex_less = [&](const std::vector<int>& a, const std::vector<int>& b) {
      const std::size_t n = std::min(a.size(), b.size());
      for (std::size_t i = 0; i < n; ++i)
        if (text[a[i]] != text[b[i]]) return text[a[i]] < text[b[i]];
      return a.size() < b.size();
    };
    const auto better = [&](const Entry& a, const Entry& b) {
      if (a.d != b.d) return a.d < b.d;
      return lex_less(a.path, b.path);
    };

    std::vector<std::optional<Entry>> settled(sg.class_members.size());
    std::vector<Entry> heap{{Ordinal::zero(), {cx}, {}}};
    const auto cmp = [&](const Entry& a, const Entry& b) { return better(b, a); };
    while (!heap.empty()) {
      std::pop_heap(heap.begin(), heap.end(), cmp);
      Entry e = std::move(heap.back());
      heap.pop_back();
      const int c = e.path.back();
      if (settled[c]) continue;
      settled[c] = e;
      if (c == cy) break;
      for (std::size_t ei = 0; ei < sg.adj[c].size(); ++ei) {
        const auto& edge = sg.adj[c][ei];
        if (settled[edge.to]) continue;
        Entry next{nat_sum(e.d, edge.cost), e.path, e.edges};
        next.path.push_back(edge.to);
        next.edges.push_back(static_cast<int>(ei));
        heap.push_back(std::move(next));
        std::push_heap(heap.begin(), heap.end(), cmp);
      }
    }
    if (!settled[cy]) fail(errc::disconnected, ref_text(x) + " -/- " + ref_text(y));
    return emit_walk(u, sg, settled[cy]->path, settled[cy]->edges, x, y);
  }

  // Renders a class path as an explicit alternating walk; movement inside
  // one embrace class shows up as a 0-cost (-1)-tip hop.
  Walk emit_walk(const Unrolled& u, const SearchGraph& sg, const std::vector<int>& path,
                 const std::vector<int>& edges, const NodeRef& x, const NodeRef& y) {
    Walk w;
    int cur = u.require_position(x);
    w.nodes.push_back(u.positions[cur].ref);
    const auto hop_to = [&](int pos) {
      if (pos == cur) return;
      w.steps.push_back({WalkStep::Kind::Tip, Rank::minus_one(), ""});
      w.nodes.push_back(u.positions[pos].ref);
      cur = pos;
    };
    const auto move_to = [&](int pos, WalkStep step) {
      w.steps.push_back(std::move(step));
      w.nodes.push_back(u.positions[pos].ref);
      cur = pos;
    };
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const auto& edge = sg.adj[path[k]][edges[k]];
      if (edge.kind == 0) {
        const auto& br = u.branches[edge.index];
        const int enter = sg.cls(br.u) == path[k] ? br.u : br.v;
        const int exit = enter == br.u ? br.v : br.u;
        hop_to(enter);
        move_to(exit, {WalkStep::Kind::Branch, Rank::minus_one(), br.id});
      } else {
        const auto& tip = u.tips[edge.index];
        const WalkStep step{WalkStep::Kind::Tip, tip.rank, tip.id};
        if (sg.cls(tip.owner) == path[k]) {
          // descending from the embracing wnode into the tip's structure
          hop_to(tip.owner);
          int land = -1;
          for (int z : tip.zone)
            if (sg.cls(z) == edge.to &&
                (land < 0 || u.positions[z].text < u.positions[land].text))
              land = z;
          move_to(land, step);
        } else {
          int from = -1;
          if (sg.cls(cur) == path[k]) {
            for (int z : tip.zone)
              if (z == cur) from = cur;
          }
          if (from < 0)
            for (int z : tip.zone)
              if (sg.cls(z) == path[k] &&
                  (from < 0 || u.positions[z].text < u.positions[from].text))
                from = z;
          hop_to(from);
          move_to(tip.owner, step);
        }
      }
    }
    hop_to(u.require_position(y));
    return w;
  }

  const WGraph* g_;
  std::map<std::tuple<std::string, std::string, std::string>, Ordinal> dist_memo_;
  std::map<std::tuple<std::string, std::string, std::string>, OrdinalPoly> fit1_memo_;
  std::map<std::tuple<std::string, std::string, std::string>, Fit2D> fit2_memo_;
  std::map<std::tuple<std::string, std::uint64_t, std::uint64_t>, Prepared> prepared_;

  OrdinalPoly affine_fit(const std::vector<Ordinal>& samples, std::uint64_t start,
                         const std::string& what) {
    std::set<Rank> exps;
    for (const auto& o : samples)
      for (const auto& t : o.terms()) exps.insert(t.exp);
    TermPolys terms;
    for (const Rank e : exps) {
      std::vector<long long> v;
      for (const auto& o : samples) v.push_back(static_cast<long long>(o.coeff_at(e)));
      const long long slope = v[1] - v[0];
      for (std::size_t k = 0; k + 1 < v.size(); ++k)
        if (v[k + 1] - v[k] != slope) fail(errc::fit_failure, what + " is not affine");
      terms[e] = IntPoly::affine(slope, v[0] - slope * static_cast<long long>(start));
    }
    OrdinalPoly f = OrdinalPoly::make(std::move(terms), start);
    if (f.valid_from() != start && f.valid_from() > start + 4)
      fail(errc::fit_failure, what + " fit not valid on the sampled window");
    return f;
  }
};

// Validates a walk against the presentation and returns its length: the
// natural sum of 1 per branch step, w^(alpha+1) per alpha-wtip traversal
// (w^w for a warrow tip) and 0 per (-1)-tip hop.
inline Ordinal walk_length(const WGraph& g, const Walk& w) {
  if (w.nodes.empty()) fail(errc::invalid_walk, "a walk has at least one node");
  if (w.nodes.size() != w.steps.size() + 1)
    fail(errc::invalid_walk, "walk must alternate nodes and steps");
  std::uint64_t depth = 3, ray = 8;
  for (const auto& n : w.nodes) {
    depth = std::max(depth, n.max_block() + 3);
    ray = std::max(ray, n.max_ray_pos() + 3);
  }
  const Unrolled u = unroll_raw(g, {depth, ray});
  const SearchGraph sg = build_search(u);

  Ordinal total;
  for (std::size_t i = 0; i < w.steps.size(); ++i) {
    const int a = u.require_position(w.nodes[i]);
    const int b = u.require_position(w.nodes[i + 1]);
    const auto& step = w.steps[i];
    if (step.kind == WalkStep::Kind::Branch) {
      bool found = false;
      for (int bi : u.branches_at[a]) {
        const auto& br = u.branches[bi];
        if ((br.u == a && br.v == b) || (br.u == b && br.v == a)) {
          if (step.id.empty() || step.id == br.id) found = true;
        }
      }
      if (!found)
        fail(errc::invalid_walk, "no branch between " + ref_text(w.nodes[i]) + " and " +
                                     ref_text(w.nodes[i + 1]));
    } else if (step.tip_rank.is_minus_one()) {
      if (sg.cls(a) != sg.cls(b))
        fail(errc::invalid_walk, ref_text(w.nodes[i]) + " and " + ref_text(w.nodes[i + 1]) +
                                     " are not in one embrace class");
    } else {
      bool found = false;
      for (const auto& tip : u.tips) {
        if (tip.rank != step.tip_rank) continue;
        if (!step.id.empty() && step.id != tip.id) continue;
        const int co = sg.cls(tip.owner);
        const auto in_zone = [&](int p) {
          for (int z : tip.zone)
            if (sg.cls(z) == sg.cls(p)) return true;
          return false;
        };
        if ((co == sg.cls(a) && in_zone(b)) || (co == sg.cls(b) && in_zone(a))) {
          found = true;
          break;
        }
      }
      if (!found)
        fail(errc::invalid_walk, "no " + step.tip_rank.to_string() + "-tip joins " +
                                     ref_text(w.nodes[i]) + " and " + ref_text(w.nodes[i + 1]));
    }
    total = nat_sum(total, step_cost(step));
  }
  return total;
}

inline Ordinal wdistance(const WGraph& g, const NodeRef& x, const NodeRef& y) {
  return Analyzer(g).distance(x, y);
}

inline Walk geodesic(const WGraph& g, const NodeRef& x, const NodeRef& y) {
  return Analyzer(g).geodesic(x, y);
}

inline Ordinal wdistance_oracle(const WGraph& g, const NodeRef& x, const NodeRef& y,
                                std::uint64_t max_tips, std::uint64_t max_steps) {
  return Analyzer(g).oracle(x, y, max_tips, max_steps);
}

// Closed-form distance from a base node along an arm-indexed family with
// an affine index map n -> a*n + b.
inline OrdinalPoly arm_distance_poly(Analyzer& an, const NodeRef& base, const IndexedNodes& fam,
                                     std::uint64_t a, std::uint64_t b,
                                     const SectionScope* scope = nullptr) {
  if (a == 0) return OrdinalPoly::constant(an.distance(base, fam.at(b), scope));
  const OrdinalPoly f = an.fit_1d(base, fam, scope);
  TermPolys composed;
  for (const auto& [exp, p] : f.terms())
    composed[exp] = p.compose_affine(static_cast<long long>(a), static_cast<long long>(b));
  const std::uint64_t vf = f.valid_from() > b ? (f.valid_from() - b + a - 1) / a : 0;
  return OrdinalPoly::make(std::move(composed), vf);
}

inline OrdinalPoly arm_distance_poly(const WGraph& g, const NodeRef& base,
                                     const IndexedNodes& fam, std::uint64_t a, std::uint64_t b) {
  Analyzer an(g);
  return arm_distance_poly(an, base, fam, a, b);
}

}  // namespace tg
