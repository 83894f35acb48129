#pragma once

// Galaxy classification of hypernode presentations: union-find over
// Yes verdicts of the rho-limited-distance relation, the principal
// galaxy anchored at the lexicographically least standard presentation,
// the closeness preorder towards it, and the witness constructions that
// replicate the ordered-chain and partial-order structure.

#include <atomic>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "tg/error.hpp"
#include "tg/hyper.hpp"
#include "tg/ordinal_poly.hpp"
#include "tg/sections.hpp"

namespace tg {

struct GalaxyClass {
  std::vector<std::string> members;  // presentation names, sorted
  bool principal = false;
};

struct PairVerdict {
  std::string a, b;
  Verdict verdict;
};

struct Partition {
  Rank rank = Rank::fin(0);
  std::vector<GalaxyClass> classes;  // sorted by least member name
  std::vector<PairVerdict> matrix;   // every unordered pair
  std::vector<PairVerdict> ambiguous;
  std::map<std::string, Hypernode> pool;  // presentations incl. any auto-added standard
  std::string auto_standard;              // name of the auto-added one ("" if none)
  int principal_index = -1;

  int class_of(const std::string& name) const {
    for (std::size_t i = 0; i < classes.size(); ++i)
      for (const auto& m : classes[i].members)
        if (m == name) return static_cast<int>(i);
    return -1;
  }
};

namespace galaxydetail {

inline bool is_standard(const Hypernode& h) {
  return std::holds_alternative<Hypernode::Standard>(h.v());
}

// Deterministic fallback standard hypernode: the least-named 0-node.
inline NodeRef default_standard_ref(const WGraph& g) {
  const Unrolled u = unroll_raw(g, {1, 2});
  std::optional<int> best;
  for (std::size_t p = 0; p < u.positions.size(); ++p) {
    if (u.positions[p].is_wnode) continue;
    if (!best || u.positions[p].text < u.positions[*best].text) best = static_cast<int>(p);
  }
  if (!best) fail(errc::internal, "presentation has no 0-nodes");
  return u.positions[*best].ref;
}

inline std::string least_standard_name(const std::map<std::string, Hypernode>& pool) {
  for (const auto& [name, h] : pool)
    if (is_standard(h)) return name;
  return "";
}

}  // namespace galaxydetail

inline Partition classify_pool(Context& ctx, std::map<std::string, Hypernode> pool, Rank rho,
                               const SectionScope* scope = nullptr, int jobs = 1) {
  Partition part;
  part.rank = rho;
  part.auto_standard = "";
  if (galaxydetail::least_standard_name(pool).empty()) {
    part.auto_standard = "__std";
    pool.emplace("__std",
                 Hypernode::std_node(galaxydetail::default_standard_ref(*ctx.graph)));
  }
  part.pool = pool;

  std::vector<std::string> names;
  for (const auto& [name, h] : pool) names.push_back(name);

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < names.size(); ++i)
    for (std::size_t j = i + 1; j < names.size(); ++j) pairs.emplace_back(i, j);

  std::vector<Verdict> verdicts(pairs.size());
  if (jobs <= 1 || pairs.size() < 2) {
    for (std::size_t k = 0; k < pairs.size(); ++k)
      verdicts[k] = limitedly_distant(ctx, pool.at(names[pairs[k].first]),
                                      pool.at(names[pairs[k].second]), rho, scope);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    const int n_workers = std::min<int>(jobs, static_cast<int>(pairs.size()));
    for (int t = 0; t < n_workers; ++t)
      workers.emplace_back([&] {
        Context local(*ctx.graph);
        for (std::size_t k = next.fetch_add(1); k < pairs.size(); k = next.fetch_add(1))
          verdicts[k] = limitedly_distant(local, pool.at(names[pairs[k].first]),
                                          pool.at(names[pairs[k].second]), rho, scope);
      });
    for (auto& w : workers) w.join();
  }

  // union-find on Yes verdicts; ultrafilter-dependent pairs never merge
  std::vector<std::size_t> parent(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) parent[i] = i;
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    part.matrix.push_back({names[pairs[k].first], names[pairs[k].second], verdicts[k]});
    if (verdicts[k].yes()) {
      const std::size_t a = find(pairs[k].first), b = find(pairs[k].second);
      if (a != b) parent[a] = b;
    } else if (verdicts[k].mixed()) {
      part.ambiguous.push_back({names[pairs[k].first], names[pairs[k].second], verdicts[k]});
    }
  }

  std::map<std::size_t, std::vector<std::string>> groups;
  for (std::size_t i = 0; i < names.size(); ++i) groups[find(i)].push_back(names[i]);
  for (auto& [root, members] : groups) {
    GalaxyClass cls;
    cls.members = members;  // names iterate sorted already
    part.classes.push_back(std::move(cls));
  }
  std::sort(part.classes.begin(), part.classes.end(),
            [](const GalaxyClass& a, const GalaxyClass& b) { return a.members[0] < b.members[0]; });

  const std::string anchor = galaxydetail::least_standard_name(part.pool);
  for (std::size_t i = 0; i < part.classes.size(); ++i)
    for (const auto& m : part.classes[i].members)
      if (m == anchor) {
        part.classes[i].principal = true;
        part.principal_index = static_cast<int>(i);
      }
  return part;
}

inline Partition classify(Context& ctx, Rank rho, const SectionScope* scope = nullptr,
                          int jobs = 1) {
  return classify_pool(ctx, ctx.named, rho, scope, jobs);
}

// Every alpha-class contained in a single rho-class.
inline bool refinement_check(Context& ctx, Rank alpha, Rank rho) {
  if (!(alpha < rho))
    fail(errc::rank_order, "refinement needs alpha < rho");
  const Partition pa = classify(ctx, alpha);
  const Partition pr = classify(ctx, rho);
  for (const auto& cls : pa.classes) {
    const int target = pr.class_of(cls.members[0]);
    for (const auto& m : cls.members)
      if (pr.class_of(m) != target) return false;
  }
  return true;
}

// Whether class a sits strictly closer to the principal galaxy than
// class b: the hyperdistance difference d(b_n, x_n) - d(a_n, x_n) must
// exceed w^rho * m for every m, eventually, per residue class.
inline Verdict closer_than(Context& ctx, const Partition& part, int ia, int ib, Rank rho,
                           const SectionScope* scope = nullptr) {
  if (rho.is_arrow_omega())
    fail(errc::arrow_omega_rank, "closeness order is not defined at rank warrow");
  if (ia == ib) return Verdict::make_no();
  const std::string anchor = galaxydetail::least_standard_name(part.pool);
  if (anchor.empty()) fail(errc::no_principal_reference, "no standard presentation to anchor");
  const Hypernode& x = part.pool.at(anchor);

  const auto evaluate = [&](const std::string& na, const std::string& nb) {
    const Hypernode& y = part.pool.at(na);  // candidate closer
    const Hypernode& z = part.pool.at(nb);  // candidate farther
    const std::uint64_t M =
        std::lcm(common_modulus(y, x), common_modulus(z, x));
    // force a common refinement by mixing in an interleave of the needed modulus
    const auto polys_at = [&](const Hypernode& h) {
      std::vector<ResiduePoly> out;
      for (const auto& rp : hyperdistance(ctx, h, x, scope)) {
        if (rp.cls.modulus == M) {
          out.push_back(rp);
          continue;
        }
        const std::uint64_t f = M / rp.cls.modulus;
        for (std::uint64_t t = 0; t < f; ++t) {
          // n = m*k' + r with k' = f*k + t collapses to modulus M
          TermPolys terms;
          for (const auto& [exp, pe] : rp.poly.terms())
            terms[exp] = pe.compose_affine(static_cast<long long>(f), static_cast<long long>(t));
          ResiduePoly sub;
          sub.cls = {M, rp.cls.modulus * t + rp.cls.residue};
          const std::uint64_t vf = rp.poly.valid_from() > t
                                       ? (rp.poly.valid_from() - t + f - 1) / f
                                       : 0;
          sub.poly = OrdinalPoly::make(std::move(terms), vf);
          out.push_back(std::move(sub));
        }
      }
      std::sort(out.begin(), out.end(),
                [](const ResiduePoly& a, const ResiduePoly& b) { return a.cls < b.cls; });
      return out;
    };
    const auto fy = polys_at(y), fz = polys_at(z);
    if (fy.size() != fz.size()) fail(errc::internal, "residue refinement mismatch");
    std::vector<Verdict::PerResidue> residues;
    for (std::size_t i = 0; i < fy.size(); ++i) {
      const bool yes = delta_exceeds_every_multiple(fz[i].poly, fy[i].poly, rho);
      residues.push_back({fy[i].cls, yes, 0});
    }
    return Verdict::merge(residues);
  };

  const auto& ca = part.classes[ia].members;
  const auto& cb = part.classes[ib].members;
  const Verdict v = evaluate(ca[0], cb[0]);
  // representative independence, checked against second members when present
  if (ca.size() > 1) {
    const Verdict v2 = evaluate(ca[1], cb[0]);
    if (v2.kind != v.kind) fail(errc::internal, "closeness depends on the representative of a");
  }
  if (cb.size() > 1) {
    const Verdict v2 = evaluate(ca[0], cb[1]);
    if (v2.kind != v.kind) fail(errc::internal, "closeness depends on the representative of b");
  }
  return v;
}

struct OrderReport {
  Rank rank = Rank::fin(0);
  std::vector<std::pair<int, int>> edges;         // (closer, farther)
  std::vector<std::pair<int, int>> incomparable;  // unordered, i < j
  std::vector<std::pair<int, int>> ambiguous;     // verdict depends on the ultrafilter
  bool antisymmetry_ok = true;
  bool transitivity_ok = true;
  bool principal_least_ok = true;

  bool has_edge(int a, int b) const {
    for (const auto& [x, y] : edges)
      if (x == a && y == b) return true;
    return false;
  }
};

// The strict closeness digraph over the classes of a partition, with
// exhaustive antisymmetry and transitivity audits.
inline OrderReport order_partition(Context& ctx, const Partition& part,
                                   const SectionScope* scope = nullptr) {
  OrderReport rep;
  rep.rank = part.rank;
  const int n = static_cast<int>(part.classes.size());
  std::vector<std::vector<Verdict::Kind>> v(n, std::vector<Verdict::Kind>(n, Verdict::Kind::No));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      v[a][b] = closer_than(ctx, part, a, b, part.rank, scope).kind;
      if (v[a][b] == Verdict::Kind::Yes) rep.edges.emplace_back(a, b);
    }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      if (v[a][b] == Verdict::Kind::Yes && v[b][a] == Verdict::Kind::Yes)
        rep.antisymmetry_ok = false;
      if (v[a][b] == Verdict::Kind::Mixed || v[b][a] == Verdict::Kind::Mixed)
        rep.ambiguous.emplace_back(a, b);
      else if (v[a][b] == Verdict::Kind::No && v[b][a] == Verdict::Kind::No)
        rep.incomparable.emplace_back(a, b);
    }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        if (a == b || b == c || a == c) continue;
        if (v[a][b] == Verdict::Kind::Yes && v[b][c] == Verdict::Kind::Yes &&
            v[a][c] != Verdict::Kind::Yes)
          rep.transitivity_ok = false;
      }
  if (part.principal_index >= 0 && n > 1) {
    for (int b = 0; b < n; ++b) {
      if (b == part.principal_index) continue;
      if (v[part.principal_index][b] != Verdict::Kind::Yes) rep.principal_least_ok = false;
    }
  }
  return rep;
}

struct WitnessChain {
  std::vector<std::string> order;  // names, closest first; v in the middle
  Partition partition;
  OrderReport report;
};

// Builds 2K+1 pairwise-ordered galaxy classes around a non-principal
// arm-indexed presentation: the closer side contracts the index map by
// powers of two, the farther side dilates it, and every ordering claim
// is re-verified through closer_than.
inline WitnessChain witness_chain(Context& ctx, const std::string& around, std::uint64_t K,
                                  Rank rho, int jobs = 1) {
  if (rho.is_arrow_omega())
    fail(errc::arrow_omega_rank, "witness chains need rank != warrow");
  const auto it = ctx.named.find(around);
  if (it == ctx.named.end()) fail(errc::unknown_node, "no presentation named '" + around + "'");
  const Hypernode& v = it->second;

  {
    const Partition base = classify(ctx, rho);
    const int vc = base.class_of(around);
    if (vc >= 0 && base.classes[vc].principal)
      fail(errc::hypothesis_violated, "'" + around + "' lies in the principal galaxy");
  }

  const auto* idx = std::get_if<Hypernode::Indexed>(&v.v());
  if (!idx || !idx->map.plain_affine() || idx->map.a < 1)
    fail(errc::not_arm_indexed,
         "'" + around + "' must be arm-indexed with a plain affine map of slope >= 1");

  std::map<std::string, Hypernode> pool = ctx.named;
  std::vector<std::string> order;
  const std::uint64_t a = idx->map.a, b = idx->map.b;
  for (std::uint64_t j = K; j >= 1; --j) {
    const std::string name = around + "/u" + std::to_string(j);
    IndexMap m{a, b, std::uint64_t(1) << j, 1};
    pool.emplace(name, Hypernode(Hypernode::Indexed{idx->fam, m}));
    order.push_back(name);
    if (j == 1) break;
  }
  order.push_back(around);
  for (std::uint64_t j = 1; j <= K; ++j) {
    const std::string name = around + "/w" + std::to_string(j);
    IndexMap m{a * (j + 1) + 1, b * (j + 1), 1, 0};
    pool.emplace(name, Hypernode(Hypernode::Indexed{idx->fam, m}));
    order.push_back(name);
  }

  WitnessChain chain;
  chain.order = order;
  chain.partition = classify_pool(ctx, pool, rho, nullptr, jobs);
  chain.report = order_partition(ctx, chain.partition);

  // every chain member in its own non-principal class, ordered as built
  std::vector<int> cls;
  for (const auto& name : order) {
    const int c = chain.partition.class_of(name);
    if (c < 0 || chain.partition.classes[c].principal)
      fail(errc::internal, "witness member " + name + " landed in the principal galaxy");
    cls.push_back(c);
  }
  for (std::size_t i = 0; i < cls.size(); ++i)
    for (std::size_t j = i + 1; j < cls.size(); ++j) {
      if (cls[i] == cls[j])
        fail(errc::internal, "witness members " + order[i] + " and " + order[j] + " coincide");
      if (!chain.report.has_edge(cls[i], cls[j]) || chain.report.has_edge(cls[j], cls[i]))
        fail(errc::internal,
             "witness order not confirmed between " + order[i] + " and " + order[j]);
    }
  return chain;
}

// Every presentation carried by the lower section lands in the principal
// galaxy of the enlargement of the enclosing section.
inline bool section_containment(Context& ctx, const Section& s_low, const Section& s_high,
                                const std::vector<std::string>& names) {
  if (!(s_low.rank < s_high.rank))
    fail(errc::rank_order, "containment needs a lower section inside a higher one");
  SectionAnalyzer& sa = ctx.sec();
  if (!sa.section_inside(s_low, s_high))
    fail(errc::section_not_nested, s_low.id + " is not inside " + s_high.id);

  std::map<std::string, Hypernode> pool;
  for (const auto& name : names) {
    const auto it = ctx.named.find(name);
    if (it == ctx.named.end()) fail(errc::unknown_node, "no presentation named '" + name + "'");
    // every residue must stay inside the lower section
    const std::uint64_t M = it->second.modulus();
    for (std::uint64_t r = 0; r < M; ++r) {
      const ResolvedSeq seq = resolve_residue(it->second, M, r);
      const bool inside = seq.constant
                              ? sa.node_in_section(seq.node, s_low)
                              : sa.node_in_section(seq.fam.at(3), s_low) &&
                                    sa.node_in_section(seq.fam.at(4), s_low);
      if (!inside)
        fail(errc::section_not_nested,
             "presentation '" + name + "' leaves section " + s_low.id);
    }
    pool.emplace(name, it->second);
  }
  if (galaxydetail::least_standard_name(pool).empty()) {
    // anchor inside the lower section: its least 0-node
    const Unrolled u = unroll_raw(*ctx.graph, {6, 12});
    std::optional<int> best;
    for (std::size_t bi = 0; bi < u.branches.size(); ++bi) {
      const auto& br = u.branches[bi];
      if (!s_low.contains_branch(u, br)) continue;
      for (const int p : {br.u, br.v})
        if (!u.positions[p].is_wnode &&
            (!best || u.positions[p].text < u.positions[*best].text))
          best = p;
    }
    if (!best) fail(errc::internal, "lower section has no nodes in the probe unrolling");
    pool.emplace("__std", Hypernode::std_node(u.positions[*best].ref));
  }

  const SectionScope scope = sa.section_scope(s_high);
  const Partition part = classify_pool(ctx, pool, s_high.rank, &scope);
  for (const auto& [name, h] : part.pool) {
    const int c = part.class_of(name);
    if (c < 0 || !part.classes[c].principal) return false;
  }
  return true;
}

struct Propagation {
  bool value = true;
  bool vacuous = false;  // precondition (single class at rho) not met
};

// One galaxy at rho forces one galaxy at every rank above.
inline Propagation single_galaxy_propagation(Context& ctx, Rank rho) {
  const Partition base = classify(ctx, rho);
  if (base.classes.size() != 1) return {true, true};
  std::vector<Rank> above;
  const Rank nu = ctx.graph->rank;
  if (rho.is_fin()) {
    const std::uint32_t top = nu.is_fin() ? nu.fin_value() : rho.fin_value() + 2;
    for (std::uint32_t k = rho.fin_value() + 1; k <= top; ++k) above.push_back(Rank::fin(k));
  }
  if (rho < Rank::arrow_omega() && Rank::arrow_omega() <= nu) above.push_back(Rank::arrow_omega());
  if (rho < Rank::omega() && Rank::omega() <= nu) above.push_back(Rank::omega());
  for (const Rank sigma : above)
    if (classify(ctx, sigma).classes.size() != 1) return {false, false};
  return {true, false};
}

// Hyperbranch rule: the two 0-hypernodes of any hyperbranch are at
// hyperdistance 1, so they co-classify at every rank.
inline bool hyperbranch_endpoints_co_classified(Context& ctx, Rank rho,
                                                std::size_t sample_limit = 24) {
  const Unrolled u = unroll_raw(*ctx.graph, {3, 6});
  std::size_t used = 0;
  for (const auto& br : u.branches) {
    if (used++ >= sample_limit) break;
    const Hypernode pu = Hypernode::std_node(u.positions[br.u].ref);
    const Hypernode pv = Hypernode::std_node(u.positions[br.v].ref);
    if (!limitedly_distant(ctx, pu, pv, rho).yes()) return false;
  }
  return true;
}

}  // namespace tg
