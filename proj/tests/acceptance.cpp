// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Usage: tg_acceptance <path-to-tgalaxy> <data-dir>

#include <array>
#include <cstdio>
#include <cstdint>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "suite.hpp"
#include "tg/galaxy.hpp"
#include "tg/hyper.hpp"
#include "tg/io.hpp"
#include "tg/metric.hpp"
#include "tg/ordinal.hpp"
#include "tg/sections.hpp"
#include "tg/validate.hpp"

namespace {

using tg::Analyzer;
using tg::Context;
using tg::Hypernode;
using tg::NodeRef;
using tg::Ordinal;
using tg::Rank;
using tg::Verdict;
using tg::WGraph;

int g_criterion = 0;
int g_failures = 0;

void report(bool ok, const std::string& what) {
  ++g_criterion;
  if (!ok) ++g_failures;
  std::printf("[%2d/10] %s - %s\n", g_criterion, ok ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
}

std::vector<Ordinal> small_ordinals() {
  std::vector<Ordinal> out;
  std::array<std::uint64_t, 4> coeffs{0, 0, 0, 0};
  while (true) {
    std::vector<Ordinal::Term> terms;
    for (std::uint32_t e = 0; e < 4; ++e)
      if (coeffs[e] > 0) terms.push_back({Rank::fin(e), coeffs[e]});
    out.push_back(Ordinal::from_terms(std::move(terms)));
    std::size_t i = 0;
    while (i < 4 && coeffs[i] == 3) coeffs[i++] = 0;
    if (i == 4) break;
    ++coeffs[i];
  }
  return out;
}

std::vector<NodeRef> sample_refs(const WGraph& g, std::uint64_t max_block,
                                 std::uint64_t max_pos) {
  std::vector<NodeRef> out;
  for (const auto& n : g.core.nodes) out.push_back(NodeRef::core(n));
  for (const auto& w : g.core.wnodes) out.push_back(NodeRef::core(w.id));
  for (const auto& r : g.core.rays)
    for (std::uint64_t p = 0; p <= max_pos; ++p) out.push_back(NodeRef::core_ray(r.id, p));
  for (const auto& a : g.arms) {
    if (a.apex) out.push_back(NodeRef::core(a.apex->id));
    for (std::uint64_t b = 0; b <= max_block; ++b) {
      for (const auto& n : a.cell.nodes) out.push_back(NodeRef::arm_node(a.id, b, n));
      for (const auto& w : a.cell.wnodes) out.push_back(NodeRef::arm_node(a.id, b, w.id));
      for (const auto& r : a.cell.rays)
        for (std::uint64_t p = 0; p <= max_pos; ++p)
          out.push_back(NodeRef::arm_ray(a.id, b, r.id, p));
    }
  }
  return out;
}

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& cli, const std::string& args) {
  const std::string cmd = "TG_COLOR=never " + cli + " " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

// ---------------------------------------------------------------------

void criterion_ordinal_laws() {
  const auto all = small_ordinals();
  std::uint64_t fails = 0, triples = 0;
  for (const auto& a : all) {
    if (tg::nat_sum(a, Ordinal::zero()) != a) ++fails;
    for (const auto& b : all) {
      const Ordinal ab = tg::nat_sum(a, b);
      if (ab != tg::nat_sum(b, a)) ++fails;
      const bool a_lt_b = a < b;
      for (const auto& c : all) {
        ++triples;
        if (tg::nat_sum(ab, c) != tg::nat_sum(a, tg::nat_sum(b, c))) ++fails;
        if (a_lt_b && !(tg::nat_sum(a, c) < tg::nat_sum(b, c))) ++fails;
      }
    }
  }
  report(fails == 0 && all.size() == 256,
         "ordinal laws: commutativity, associativity, strict monotonicity over " +
             std::to_string(triples) + " CNF triples, " + std::to_string(fails) + " failures");
}

void criterion_metric_axioms() {
  std::mt19937_64 rng(1);
  std::uint64_t checked = 0, fails = 0;
  for (const WGraph& g : {suite::path5(), suite::ladder(), suite::ladder_apex(),
                          suite::two_arms(), suite::star(), suite::omega_star()}) {
    Analyzer an(g);
    const auto refs = sample_refs(g, 3, 4);
    std::uniform_int_distribution<std::size_t> pick(0, refs.size() - 1);
    for (int i = 0; i < 500; ++i) {
      const NodeRef x = refs[pick(rng)], y = refs[pick(rng)], z = refs[pick(rng)];
      const Ordinal dxy = an.distance(x, y);
      if (an.distance(y, x) != dxy) ++fails;
      if (an.distance(x, z) > tg::nat_sum(dxy, an.distance(y, z))) ++fails;
      ++checked;
    }
  }
  report(fails == 0, "metric axioms: symmetry and the triangle inequality on " +
                         std::to_string(checked) + " random triples over 6 presentations, " +
                         std::to_string(fails) + " violations");
}

void criterion_oracle_equivalence() {
  std::uint64_t checked = 0, fails = 0;

  // every node pair of small unrollings (<= 12 branches)
  for (const WGraph& g : {suite::path5(), suite::ladder(), suite::star(), suite::ray_apex()}) {
    const tg::Unrolled u = tg::unroll_raw(g, {1, 4});
    if (u.branches.size() > 12) {
      ++fails;
      continue;
    }
    Analyzer an(g);
    for (std::size_t i = 0; i < u.positions.size(); ++i)
      for (std::size_t j = i + 1; j < u.positions.size(); ++j) {
        const NodeRef x = u.positions[i].ref, y = u.positions[j].ref;
        ++checked;
        if (an.distance(x, y) != an.oracle(x, y, 8, 12)) ++fails;
      }
  }

  // randomized larger cases at certified depths
  std::mt19937_64 rng(2);
  std::uint64_t randomized = 0;
  for (const WGraph& g : {suite::path5(), suite::ladder(), suite::two_arms(), suite::star(),
                          suite::omega_star()}) {
    Analyzer an(g);
    const auto refs = sample_refs(g, 2, 2);
    std::uniform_int_distribution<std::size_t> pick(0, refs.size() - 1);
    for (int i = 0; i < 100; ++i) {
      const NodeRef x = refs[pick(rng)], y = refs[pick(rng)];
      ++checked;
      ++randomized;
      if (an.distance(x, y) != an.oracle(x, y, 8, 14)) ++fails;
    }
  }
  report(fails == 0 && randomized >= 500,
         "oracle equivalence: search distance equals bounded enumeration on " +
             std::to_string(checked) + " pairs (" + std::to_string(randomized) +
             " randomized), " + std::to_string(fails) + " mismatches");
}

void criterion_separation_bounds() {
  std::uint64_t fails = 0, checked = 0;

  // cross-section pairs through boundary 1-wnodes sit at >= w
  const auto cross_check = [&](const WGraph& g, const std::vector<NodeRef>& left,
                               const std::vector<NodeRef>& right, const Ordinal& bound) {
    Analyzer an(g);
    for (const auto& x : left)
      for (const auto& y : right) {
        ++checked;
        if (an.distance(x, y) < bound) ++fails;
      }
  };
  const Ordinal w1 = tg::omega_pow(Rank::fin(1));
  for (const WGraph& g : {suite::ladder(), suite::ladder_apex()}) {
    std::vector<NodeRef> p1, p2;
    for (std::uint64_t p = 0; p <= 4; ++p) {
      p1.push_back(NodeRef::arm_ray("A", 1, "P", p));
      p2.push_back(NodeRef::arm_ray("A", 2, "P", p));
    }
    cross_check(g, p1, p2, w1);
  }
  {
    const WGraph g = suite::two_arms();
    std::vector<NodeRef> pa, qb;
    for (std::uint64_t p = 1; p <= 4; ++p) {
      pa.push_back(NodeRef::arm_ray("A", 1, "P", p));
      qb.push_back(NodeRef::arm_ray("B", 1, "Q", p));
    }
    cross_check(g, pa, qb, w1);
  }
  {
    const WGraph g = suite::omega_star();
    std::vector<NodeRef> a_side, b_side;
    for (std::uint64_t b = 0; b <= 2; ++b) {
      a_side.push_back(NodeRef::arm_node("A", b, "a"));
      b_side.push_back(NodeRef::arm_node("B", b, "b"));
    }
    cross_check(g, a_side, b_side, tg::omega_pow(Rank::omega()));
  }

  // non-wadjacent same-rank wnodes sit at >= w^rho
  for (const WGraph& g : {suite::ladder(), suite::ladder_apex(), suite::two_arms()}) {
    Analyzer an(g);
    tg::SectionAnalyzer sa(an);
    std::vector<NodeRef> wnodes;
    for (const auto& a : g.arms)
      for (std::uint64_t b = 0; b <= 4; ++b)
        for (const auto& w : a.cell.wnodes) wnodes.push_back(NodeRef::arm_node(a.id, b, w.id));
    for (std::size_t i = 0; i < wnodes.size(); ++i)
      for (std::size_t j = i + 1; j < wnodes.size(); ++j) {
        if (sa.wadjacent(wnodes[i], wnodes[j])) continue;
        ++checked;
        if (an.distance(wnodes[i], wnodes[j]) < w1) ++fails;
      }
  }
  report(fails == 0, "separation bounds: cross-section walks and non-wadjacent pairs at " +
                         std::to_string(checked) + " samples never undercut w^rho, " +
                         std::to_string(fails) + " exceptions");
}

void criterion_containment() {
  std::uint64_t pairs = 0, fails = 0;
  const auto run = [&](const WGraph& g, const std::vector<std::pair<std::string, std::string>>&
                                            presentations) {
    Context ctx(g);
    for (const auto& [name, text] : presentations)
      ctx.named.emplace(name, tg::parse_hypernode(g, text));
    tg::SectionAnalyzer& sa = ctx.sec();
    std::vector<Rank> ranks{Rank::fin(0)};
    if (g.rank >= Rank::fin(1)) ranks.push_back(Rank::fin(1));
    if (g.rank >= Rank::fin(2) && g.rank.is_fin()) ranks.push_back(Rank::fin(2));
    if (!g.rank.is_fin()) {
      ranks.push_back(Rank::arrow_omega());
      if (g.rank.is_omega()) ranks.push_back(Rank::omega());
    }
    for (std::size_t lo = 0; lo < ranks.size(); ++lo)
      for (std::size_t hi = lo + 1; hi < ranks.size(); ++hi)
        for (const tg::Section& low_raw : sa.sections(ranks[lo])) {
          std::vector<tg::Section> lows;
          if (low_raw.is_family()) {
            lows.push_back(low_raw.instantiate(low_raw.fam_from + 1));
            lows.push_back(low_raw.instantiate(low_raw.fam_from + 2));
          } else {
            lows.push_back(low_raw);
          }
          for (const tg::Section& low : lows)
            for (const tg::Section& high : sa.sections(ranks[hi])) {
              if (!sa.section_inside(low, high)) continue;
              std::vector<std::string> carried;
              for (const auto& [name, h] : ctx.named) {
                const std::uint64_t M = h.modulus();
                bool inside = true;
                for (std::uint64_t r = 0; r < M && inside; ++r) {
                  const tg::ResolvedSeq seq = tg::resolve_residue(h, M, r);
                  inside = seq.constant ? sa.node_in_section(seq.node, low)
                                        : sa.node_in_section(seq.fam.at(3), low);
                }
                if (inside) carried.push_back(name);
              }
              ++pairs;
              if (!tg::section_containment(ctx, low, high, carried)) ++fails;
            }
        }
  };
  run(suite::ladder(), {{"pk", "ray(P2, 1, 0)"}, {"p5", "std(P2[5])"}});
  run(suite::ladder_apex(), {{"pk", "ray(P2, 1, 0)"}, {"xN", "arm(A, 1, 0, x)"}});
  run(suite::two_arms(), {{"pk", "ray(P1, 1, 0)"}, {"qk", "ray(Q2, 1, 0)"}});
  run(suite::omega_star(), {{"aN", "arm(A, 1, 0, a)"}, {"pk", "ray(P2, 1, 0)"}});
  report(fails == 0 && pairs >= 10,
         "containment: enlargements of lower sections land in the principal galaxy for " +
             std::to_string(pairs) + " nested pairs, " + std::to_string(fails) + " failures");
}

void criterion_escape() {
  const WGraph g = suite::ladder();
  Context ctx(g);
  tg::SectionAnalyzer& sa = ctx.sec();
  const tg::Section& whole = sa.sections(Rank::fin(1))[0];
  const NodeRef x0 = tg::parse_ref(g, "x0");
  bool ok = true;
  std::string note;
  try {
    const auto walk = sa.escape_walk(whole, x0, 10);
    ok = walk.size() == 10;
    const Ordinal w1 = tg::omega_pow(Rank::fin(1));
    for (std::uint64_t k = 1; k <= walk.size(); ++k) {
      const auto& [node, dist] = walk[k - 1];
      if (dist < tg::nat_mul(w1, k)) ok = false;
      if (dist != ctx.an().distance(x0, node)) ok = false;
    }
    // the escape subsequence is x_1, x_2, ...: classify it as a presentation
    std::map<std::string, Hypernode> pool;
    pool.emplace("ref", Hypernode::std_node(x0));
    pool.emplace("escape",
                 Hypernode(Hypernode::Indexed{tg::IndexedNodes::arm_block("A", "x"),
                                              tg::IndexMap{walk[1].first.block -
                                                               walk[0].first.block,
                                                           walk[0].first.block, 1, 0}}));
    const tg::Partition part = tg::classify_pool(ctx, pool, Rank::fin(1));
    const int c = part.class_of("escape");
    if (c < 0 || part.classes[c].principal) ok = false;
    note = "escape walk of 10 certified steps, derived presentation outside the principal galaxy";
  } catch (const tg::error& e) {
    ok = false;
    note = std::string("escape walk failed: ") + e.what();
  }
  report(ok, note);
}

void criterion_chain() {
  const WGraph g = suite::ladder();
  Context ctx(g);
  ctx.named.emplace("x1s", tg::parse_hypernode(g, "std(x1)"));
  ctx.named.emplace("xN", tg::parse_hypernode(g, "arm(A, 1, 0, x)"));
  bool ok = true;
  std::string note;
  try {
    const tg::WitnessChain chain = tg::witness_chain(ctx, "xN", 5, Rank::fin(1));
    std::set<int> classes;
    for (const auto& name : chain.order) classes.insert(chain.partition.class_of(name));
    ok = chain.order.size() == 11 && classes.size() == 11;
    // all 55 unordered pairs comparable, antisymmetric, transitive
    std::uint64_t compared = 0;
    for (std::size_t i = 0; i < chain.order.size(); ++i)
      for (std::size_t j = i + 1; j < chain.order.size(); ++j) {
        const int a = chain.partition.class_of(chain.order[i]);
        const int b = chain.partition.class_of(chain.order[j]);
        const bool fwd = chain.report.has_edge(a, b), bwd = chain.report.has_edge(b, a);
        if (!(fwd && !bwd)) ok = false;
        ++compared;
      }
    if (compared != 55) ok = false;
    if (!chain.report.antisymmetry_ok || !chain.report.transitivity_ok) ok = false;
    note = "witness chain of 11 pairwise-distinct galaxies, 55 ordered pairs verified";
  } catch (const tg::error& e) {
    ok = false;
    note = std::string("witness chain failed: ") + e.what();
  }
  report(ok, note);
}

void criterion_partial_order() {
  const WGraph g = suite::two_arms();
  Context ctx(g);
  for (const auto& [name, text] :
       std::vector<std::pair<std::string, std::string>>{{"anchor", "std(c)"},
                                                        {"aN", "arm(A, 1, 0, a)"},
                                                        {"a2N", "arm(A, 2, 0, a)"},
                                                        {"a3N", "arm(A, 3, 1, a)"},
                                                        {"bN", "arm(B, 1, 0, b)"},
                                                        {"b2N", "arm(B, 2, 0, b)"}})
    ctx.named.emplace(name, tg::parse_hypernode(g, text));

  const tg::Partition part = tg::classify(ctx, Rank::fin(1));
  const tg::OrderReport rep = tg::order_partition(ctx, part);
  bool ok = part.classes.size() == 6;
  ok = ok && rep.antisymmetry_ok && rep.transitivity_ok && rep.principal_least_ok;

  const auto cls = [&](const std::string& name) { return part.class_of(name); };
  const auto unordered_pair = [&](const std::string& x, const std::string& y) {
    return std::make_pair(std::min(cls(x), cls(y)), std::max(cls(x), cls(y)));
  };
  const std::set<std::pair<int, int>> expect_incomparable{unordered_pair("aN", "bN"),
                                                          unordered_pair("a2N", "b2N")};
  const std::set<std::pair<int, int>> got_incomparable(rep.incomparable.begin(),
                                                       rep.incomparable.end());
  ok = ok && got_incomparable == expect_incomparable;

  std::set<std::pair<int, int>> expect_edges;
  for (const std::string far : {"aN", "a2N", "a3N", "bN", "b2N"})
    expect_edges.insert({cls("anchor"), cls(far)});
  for (const auto& [near, far] : std::vector<std::pair<std::string, std::string>>{
           {"aN", "a2N"}, {"aN", "a3N"}, {"aN", "b2N"},
           {"bN", "b2N"}, {"bN", "a2N"}, {"bN", "a3N"},
           {"a2N", "a3N"}, {"b2N", "a3N"}})
    expect_edges.insert({cls(near), cls(far)});
  const std::set<std::pair<int, int>> got_edges(rep.edges.begin(), rep.edges.end());
  ok = ok && got_edges == expect_edges;

  report(ok, "partial order on 6 galaxies: audits pass, 2 incomparable pairs, " +
                 std::to_string(rep.edges.size()) + " order edges, no false edges");
}

void criterion_frechet() {
  std::uint64_t cases = 0, fails = 0;
  const WGraph g = suite::ladder();
  Context ctx(g);
  const auto expect_mixed = [&](const std::string& p, const std::string& q, Rank rho,
                                const std::vector<bool>& residue_yes) {
    ++cases;
    const Verdict v = tg::limitedly_distant(ctx, tg::parse_hypernode(g, p),
                                            tg::parse_hypernode(g, q), rho);
    if (!v.mixed() || v.residues.size() != residue_yes.size()) {
      ++fails;
      return;
    }
    for (std::size_t i = 0; i < residue_yes.size(); ++i)
      if (v.residues[i].yes != residue_yes[i]) ++fails;
  };

  expect_mixed("interleave(2, std(x1), arm(A, 1, 0, x))", "std(x0)", Rank::fin(1),
               {true, false});
  expect_mixed("interleave(2, arm(A, 1, 0, x), std(x1))", "std(x0)", Rank::fin(1),
               {false, true});
  expect_mixed("interleave(2, std(x2), arm(A, 2, 0, x))", "std(x1)", Rank::fin(1),
               {true, false});
  expect_mixed("interleave(3, std(x1), arm(A, 1, 0, x), std(x3))", "std(x0)", Rank::fin(1),
               {true, false, true});
  expect_mixed("interleave(3, arm(A, 1, 0, x), arm(A, 1, 1, x), std(x4))", "arm(A, 1, 0, x)",
               Rank::fin(1), {true, true, false});
  expect_mixed("interleave(4, std(x1), arm(A, 1, 0, x), std(x2), arm(A, 2, 0, x))", "std(x0)",
               Rank::fin(1), {true, false, true, false});
  expect_mixed("patch(interleave(2, std(x1), arm(A, 1, 0, x)), {3: c})", "std(x0)",
               Rank::fin(1), {true, false});
  expect_mixed("interleave(2, ray(P1, 1, 0), arm(A, 1, 0, x))", "std(x0)", Rank::fin(1),
               {true, false});
  expect_mixed("interleave(2, std(x1), arm(A, 1, 0, x))", "arm(A, 1, 0, x)", Rank::fin(1),
               {false, true});
  expect_mixed("interleave(2, ray(P2, 1, 0), arm(A, 3, 0, x))", "std(x1)", Rank::fin(1),
               {true, false});

  report(cases == 10 && fails == 0,
         "ultrafilter-dependent mixes: 10 interleave constructions, exact per-residue "
         "verdicts, " + std::to_string(fails) + " mismatches");
}

void criterion_determinism(const std::string& cli, const std::string& data) {
  bool ok = true;
  std::string note = "determinism: classify/order/witness-chain byte-identical across runs "
                     "and across --jobs 1 vs 4";
  const std::vector<std::string> commands = {
      "--format json --jobs 1 classify --rank 1 " + data + "/two_arms.json",
      "--format json --jobs 4 classify --rank 1 " + data + "/two_arms.json",
      "--format json --jobs 1 order --rank 1 " + data + "/two_arms.json",
      "--format json --jobs 4 order --rank 1 " + data + "/two_arms.json",
      "--format json --jobs 1 witness-chain --rank 1 --around xN --depth 2 " + data +
          "/ladder.json",
      "--format json --jobs 4 witness-chain --rank 1 --around xN --depth 2 " + data +
          "/ladder.json",
  };
  for (std::size_t i = 0; i + 1 < commands.size(); i += 2) {
    const RunResult a1 = run_cli(cli, commands[i]);
    const RunResult a2 = run_cli(cli, commands[i]);      // repeat run
    const RunResult b = run_cli(cli, commands[i + 1]);   // jobs 4
    if (a1.exit_code != 0 || a2.exit_code != 0 || b.exit_code != 0) ok = false;
    if (a1.output != a2.output || a1.output != b.output) ok = false;
    if (a1.output.empty()) ok = false;
  }
  report(ok, note);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: tg_acceptance <tgalaxy-binary> <data-dir>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const std::string data = argv[2];

  criterion_ordinal_laws();
  criterion_metric_axioms();
  criterion_oracle_equivalence();
  criterion_separation_bounds();
  criterion_containment();
  criterion_escape();
  criterion_chain();
  criterion_partial_order();
  criterion_frechet();
  criterion_determinism(cli, data);

  if (g_failures == 0) {
    std::printf("acceptance: all %d criteria pass\n", g_criterion);
    return 0;
  }
  std::printf("acceptance: %d of %d criteria FAILED\n", g_failures, g_criterion);
  return 1;
}
