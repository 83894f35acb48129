#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "suite.hpp"
#include "tg/unroll.hpp"
#include "tg/validate.hpp"

using tg::NodeRef;
using tg::Rank;
using tg::Unrolled;
using tg::WGraph;

namespace {

bool has_violation(const std::vector<tg::Violation>& v, const std::string& code) {
  for (const auto& x : v)
    if (x.code == code) return true;
  return false;
}

std::set<std::string> position_texts(const Unrolled& u) {
  std::set<std::string> out;
  for (const auto& p : u.positions) out.insert(p.text);
  return out;
}

std::set<std::string> branch_ids(const Unrolled& u) {
  std::set<std::string> out;
  for (const auto& b : u.branches) out.insert(b.id);
  return out;
}

}  // namespace

TEST_CASE("suite presentations validate cleanly") {
  CHECK(tg::validate(suite::path5()).empty());
  CHECK(tg::validate(suite::ladder()).empty());
  CHECK(tg::validate(suite::ladder_apex()).empty());
  CHECK(tg::validate(suite::two_arms()).empty());
  CHECK(tg::validate(suite::star()).empty());
  CHECK(tg::validate(suite::omega_star()).empty());
  CHECK(tg::validate(suite::ray_apex()).empty());
}

TEST_CASE("validate reports uninhabited ranks") {
  WGraph g = suite::path5();
  g.rank = Rank::fin(1);  // claims rank 1 but presents no 1-wnodes
  const auto v = tg::validate(g);
  CHECK(has_violation(v, "NonemptyRankViolation"));
}

TEST_CASE("validate rejects degenerate branches") {
  WGraph g = suite::path5();
  g.core.branches.push_back({"a", "a"});
  CHECK(has_violation(tg::validate(g), "BranchNotTwoElement"));
}

TEST_CASE("validate flags structural slips") {
  WGraph g = suite::ladder();
  g.core.branches.push_back({{"c", "zz"}});
  CHECK(has_violation(tg::validate(g), "UnknownNode"));

  WGraph g2 = suite::ladder();
  g2.rank = Rank::fin(0);
  CHECK(has_violation(tg::validate(g2), "RankAboveGraph"));

  WGraph g3 = suite::ladder();
  g3.core.nodes.push_back("iso");
  CHECK(has_violation(tg::validate(g3), "NotWConnected"));

  // two wnodes embracing the same 0-node break the embrace forest
  WGraph g4 = suite::ladder();
  g4.core.nodes.push_back("u");
  g4.core.branches.push_back({{"c", "u"}});
  g4.core.wnodes.push_back(
      {"w1", Rank::fin(1), {}, {{Rank::minus_one(), tg::TipDecl::Source::At, "u"}}});
  g4.core.wnodes.push_back(
      {"w2", Rank::fin(1), {}, {{Rank::minus_one(), tg::TipDecl::Source::At, "u"}}});
  const auto v4 = tg::validate(g4);
  CHECK((has_violation(v4, "EmbraceNotForest") || has_violation(v4, "MissingLowerTip")));
}

TEST_CASE("unroll materializes the ladder") {
  const WGraph g = suite::ladder();
  const Unrolled u = tg::unroll(g, 2);
  CHECK(u.depth == 2);
  CHECK(u.ray_len == 16);

  const auto texts = position_texts(u);
  CHECK(texts.count("c"));      // core anchor, identified with P0[0]
  CHECK(texts.count("x0"));     // first 1-wnode
  CHECK(texts.count("x1"));
  CHECK(texts.count("P0[1]"));
  CHECK(texts.count("P1[0]"));  // nx0 identifies with the next ray start
  CHECK(!texts.count("nx0"));
  CHECK(texts.count("nx1"));    // dangling glue port at the cut
  CHECK(!texts.count("x2"));

  CHECK(u.find_position(NodeRef::arm_ray("A", 0, "P", 0)) ==
        u.find_position(NodeRef::core("c")));
  CHECK(u.find_position(NodeRef::arm_node("A", 0, "nx")) ==
        u.find_position(NodeRef::arm_ray("A", 1, "P", 0)));

  const int nx1 = u.find_position(NodeRef::arm_node("A", 1, "nx"));
  REQUIRE(nx1 >= 0);
  CHECK(u.positions[nx1].cut);

  // one ray instance per block, each carrying its 0-wtip marker
  REQUIRE(u.rays.size() == 2);
  CHECK(u.tips.size() == 2);
  CHECK(u.tips[0].rank == Rank::fin(0));
  CHECK(u.tips[0].truncated);
}

TEST_CASE("unroll is idempotent on finite graphs") {
  const WGraph g = suite::path5();
  const Unrolled u = tg::unroll(g, 10);
  CHECK(position_texts(u) == std::set<std::string>{"a", "b", "c", "d", "e"});
  CHECK(branch_ids(u) == std::set<std::string>{"a-b", "b-c", "c-d", "d-e"});
}

TEST_CASE("unroll depth must be positive") {
  CHECK_THROWS_AS(tg::unroll(suite::path5(), 0), tg::error);
}

TEST_CASE("unrollings are monotone in depth") {
  for (const WGraph& g : {suite::ladder(), suite::two_arms(), suite::star()}) {
    const Unrolled u3 = tg::unroll(g, 3);
    const Unrolled u4 = tg::unroll(g, 4);
    const auto t3 = position_texts(u3), t4 = position_texts(u4);
    std::size_t missing_nodes = 0;
    for (const auto& t : t3) missing_nodes += t4.count(t) ? 0 : 1;
    CHECK(missing_nodes <= 2);  // only cut aliases rename as the cut moves out
    const auto b3 = branch_ids(u3), b4 = branch_ids(u4);
    std::size_t missing = 0;
    for (const auto& b : b3) missing += b4.count(b) ? 0 : 1;
    CHECK(missing <= 1);  // only a spine branch touching the cut alias renames
  }
}

TEST_CASE("embrace relation is a rank-increasing forest") {
  for (const WGraph& g :
       {suite::ladder(), suite::ladder_apex(), suite::star(), suite::omega_star()}) {
    const Unrolled u = tg::unroll(g, 3);
    std::map<int, int> parents;
    for (const auto& e : u.embraces) {
      CHECK(parents.insert({e.child, e.parent}).second);  // at most one parent
      const auto& par = u.positions[e.parent];
      const auto& chi = u.positions[e.child];
      const Rank child_rank = chi.is_wnode ? chi.rank : Rank::minus_one();
      CHECK(par.is_wnode);
      CHECK(child_rank < par.rank);
    }
  }
}

TEST_CASE("maximality of wnodes") {
  const WGraph g = suite::ladder();
  CHECK(tg::is_maximal(g, tg::parse_ref(g, "x1")));
  CHECK(!tg::is_maximal(g, tg::parse_ref(g, "P2[0]")));  // embraced by x1
  CHECK(tg::is_maximal(g, tg::parse_ref(g, "c")));
  CHECK(tg::is_maximal(g, tg::parse_ref(g, "P2[5]")));

  const WGraph p = suite::path5();
  CHECK(tg::is_maximal(p, tg::parse_ref(p, "a")));  // plain node of a 0-graph
  CHECK_THROWS_AS(tg::parse_ref(p, "zz"), tg::error);
}

TEST_CASE("reference parsing round-trips") {
  const WGraph g = suite::ladder();
  for (const std::string t : {"c", "x3", "P2[5]", "nx1"}) {
    const NodeRef r = tg::parse_ref(g, t);
    CHECK(tg::ref_text(r) == t);
  }
  CHECK(tg::parse_ref(g, "A[3].x") == NodeRef::arm_node("A", 3, "x"));
  CHECK(tg::parse_ref(g, "A[2].P[5]") == NodeRef::arm_ray("A", 2, "P", 5));
  const WGraph o = suite::omega_star();
  CHECK(tg::parse_ref(o, "Z") == NodeRef::core("Z"));
  CHECK(tg::parse_ref(o, "b4") == NodeRef::arm_node("B", 4, "b"));
}
