#include <catch2/catch_amalgamated.hpp>

#include "suite.hpp"
#include "tg/hyper.hpp"

using tg::Context;
using tg::Hypernode;
using tg::NodeRef;
using tg::Ordinal;
using tg::Rank;
using tg::Verdict;
using tg::WGraph;

namespace {

Ordinal ord(const std::string& s) { return tg::parse_ordinal(s); }

Hypernode pres(const Context& ctx, const std::string& s) {
  return tg::parse_hypernode(*ctx.graph, s);
}

}  // namespace

TEST_CASE("presentation syntax round-trips") {
  const WGraph g = suite::ladder();
  Context ctx(g);
  for (const std::string s :
       {"std(x1)", "std(P2[5])", "arm(A, 1, 0, x)", "arm(A, 2, 3, x)", "arm(A, 1, 0, 4, 1, x)",
        "ray(P2, 1, 0)", "ray(P2, 2, 1, 2, 0)", "interleave(2, std(x1), arm(A, 1, 0, x))",
        "patch(std(x1), {3: x5, 7: c})", "patch(arm(A, 1, 0, x), {})"}) {
    const Hypernode h = pres(ctx, s);
    CHECK(h.to_string() == s);
    CHECK(pres(ctx, h.to_string()).to_string() == s);
  }
  CHECK(pres(ctx, " interleave( 2 , std( x1 ) , arm( A , 1 , 0 , x ) ) ").to_string() ==
        "interleave(2, std(x1), arm(A, 1, 0, x))");
  CHECK_THROWS_AS(pres(ctx, "std(zz)"), tg::error);
  CHECK_THROWS_AS(pres(ctx, "arm(B, 1, 0, x)"), tg::error);
  CHECK_THROWS_AS(pres(ctx, "interleave(1, std(x1))"), tg::error);
  CHECK_THROWS_AS(pres(ctx, "std(x1) trailing"), tg::error);
}

TEST_CASE("pointwise evaluation of presentations") {
  const WGraph g = suite::ladder();
  Context ctx(g);
  CHECK(pres(ctx, "arm(A, 2, 1, x)").at(3) == NodeRef::arm_node("A", 7, "x"));
  CHECK(pres(ctx, "arm(A, 1, 0, 4, 1, x)").at(11) == NodeRef::arm_node("A", 2, "x"));
  CHECK(pres(ctx, "arm(A, 1, 0, 4, 1, x)").at(2) == NodeRef::arm_node("A", 1, "x"));  // clamped
  CHECK(pres(ctx, "ray(P2, 2, 1)").at(4) == NodeRef::arm_ray("A", 2, "P", 9));
  CHECK(pres(ctx, "interleave(2, std(x1), std(x2))").at(4) == NodeRef::arm_node("A", 1, "x"));
  CHECK(pres(ctx, "interleave(2, std(x1), std(x2))").at(5) == NodeRef::arm_node("A", 2, "x"));
  CHECK(pres(ctx, "patch(std(x1), {4: c})").at(4) == NodeRef::core("c"));
  CHECK(pres(ctx, "patch(std(x1), {4: c})").at(5) == NodeRef::arm_node("A", 1, "x"));
}

TEST_CASE("equivalence of presentations") {
  const WGraph g = suite::ladder();
  Context ctx(g);
  const Hypernode p = pres(ctx, "arm(A, 1, 0, x)");

  // a finite patch never changes the class
  CHECK(tg::equivalent(ctx, p, pres(ctx, "patch(arm(A, 1, 0, x), {3: x9})")).yes());
  CHECK(tg::equivalent(ctx, pres(ctx, "std(x1)"), pres(ctx, "std(x2)")).no());
  CHECK(tg::equivalent(ctx, p, p).yes());
  CHECK(tg::equivalent(ctx, p, pres(ctx, "arm(A, 1, 1, x)")).no());
  CHECK(tg::equivalent(ctx, p, pres(ctx, "std(x2)")).no());

  const Verdict v =
      tg::equivalent(ctx, pres(ctx, "interleave(2, arm(A, 1, 0, x), std(x1))"), p);
  REQUIRE(v.mixed());
  REQUIRE(v.residues.size() == 2);
  CHECK(v.residues[0].cls.residue == 0);
  CHECK(v.residues[0].yes);
  CHECK(!v.residues[1].yes);
}

TEST_CASE("hyperdistance polynomials") {
  const WGraph g = suite::ladder();
  Context ctx(g);

  const auto d1 = tg::hyperdistance(ctx, pres(ctx, "std(x0)"), pres(ctx, "arm(A, 1, 0, x)"));
  REQUIRE(d1.size() == 1);
  CHECK(d1[0].cls.all());
  for (std::uint64_t n = d1[0].poly.valid_from(); n < d1[0].poly.valid_from() + 4; ++n)
    CHECK(d1[0].poly.evaluate(n) == ord("w*" + std::to_string(n)));

  const auto d2 = tg::hyperdistance(ctx, pres(ctx, "arm(A, 1, 0, x)"), pres(ctx, "arm(A, 1, 0, x)"));
  REQUIRE(d2.size() == 1);
  CHECK(d2[0].poly.is_zero());

  const auto d3 = tg::hyperdistance(ctx, pres(ctx, "std(x1)"), pres(ctx, "std(x3)"));
  REQUIRE(d3.size() == 1);
  CHECK(d3[0].poly.evaluate(5) == ord("w*2"));

  // both endpoints moving: d(x_n, x_2n) = w*n
  const auto d4 = tg::hyperdistance(ctx, pres(ctx, "arm(A, 1, 0, x)"), pres(ctx, "arm(A, 2, 0, x)"));
  REQUIRE(d4.size() == 1);
  for (std::uint64_t n = d4[0].poly.valid_from(); n < d4[0].poly.valid_from() + 4; ++n)
    CHECK(d4[0].poly.evaluate(n) == ctx.an().distance(NodeRef::arm_node("A", n, "x"),
                                                      NodeRef::arm_node("A", 2 * n, "x")));

  // residue split via a floor map: d(x_n, x_{max(1, n/2)})
  const auto d5 = tg::hyperdistance(ctx, pres(ctx, "arm(A, 1, 0, x)"),
                                    pres(ctx, "arm(A, 1, 0, 2, 1, x)"));
  REQUIRE(d5.size() == 2);
  for (const auto& rp : d5)
    for (std::uint64_t k = rp.poly.valid_from(); k < rp.poly.valid_from() + 3; ++k) {
      const std::uint64_t n = rp.cls.modulus * k + rp.cls.residue;
      const std::uint64_t half = std::max<std::uint64_t>(1, n / 2);
      CHECK(rp.poly.evaluate(k) == ctx.an().distance(NodeRef::arm_node("A", n, "x"),
                                                     NodeRef::arm_node("A", half, "x")));
    }

  // cross-arm distances
  const WGraph t = suite::two_arms();
  Context ct(t);
  const auto d6 = tg::hyperdistance(ct, pres(ct, "arm(A, 1, 0, a)"), pres(ct, "arm(B, 2, 0, b)"));
  REQUIRE(d6.size() == 1);
  for (std::uint64_t n = d6[0].poly.valid_from(); n < d6[0].poly.valid_from() + 3; ++n)
    CHECK(d6[0].poly.evaluate(n) == ord("w*" + std::to_string(3 * n + 2)));

  // ray-position sequences
  const auto d7 = tg::hyperdistance(ctx, pres(ctx, "std(x1)"), pres(ctx, "ray(P2, 1, 0)"));
  REQUIRE(d7.size() == 1);
  for (std::uint64_t n = std::max<std::uint64_t>(1, d7[0].poly.valid_from());
       n < d7[0].poly.valid_from() + 4; ++n)
    CHECK(d7[0].poly.evaluate(n) ==
          ctx.an().distance(tg::parse_ref(g, "x1"), NodeRef::arm_ray("A", 2, "P", n)));
}

TEST_CASE("limited distance verdicts") {
  const WGraph g = suite::ladder();
  Context ctx(g);

  const Verdict v1 =
      tg::limitedly_distant(ctx, pres(ctx, "std(x1)"), pres(ctx, "std(x3)"), Rank::fin(1));
  CHECK(v1.yes());
  CHECK(v1.mu == 2);

  const Verdict v2 =
      tg::limitedly_distant(ctx, pres(ctx, "std(x0)"), pres(ctx, "arm(A, 1, 0, x)"), Rank::fin(1));
  CHECK(v2.no());

  const Verdict v3 = tg::limitedly_distant(ctx, pres(ctx, "std(x0)"), pres(ctx, "arm(A, 1, 0, x)"),
                                           Rank::arrow_omega());
  CHECK(v3.yes());
  CHECK(v3.mu == 2);  // w*n < w^2

  // mixing a bounded and an unbounded branch splits by residue
  const Verdict v4 = tg::limitedly_distant(
      ctx, pres(ctx, "interleave(2, std(x1), arm(A, 1, 0, x))"), pres(ctx, "std(x0)"),
      Rank::fin(1));
  REQUIRE(v4.mixed());
  REQUIRE(v4.residues.size() == 2);
  CHECK(v4.residues[0].yes);   // even: d(x1, x0) = w
  CHECK(v4.residues[0].mu == 1);
  CHECK(!v4.residues[1].yes);  // odd: d(x_n, x0) = w*n
}

TEST_CASE("limited distance at rank 0 and on the omega star") {
  const WGraph g = suite::ladder();
  Context ctx(g);
  // ray positions drift apart at finite distance: 0-limited still holds
  const Verdict v0 = tg::limitedly_distant(ctx, pres(ctx, "ray(P2, 1, 0)"),
                                           pres(ctx, "ray(P2, 2, 0)"), Rank::fin(0));
  CHECK(v0.no());  // d = n grows beyond every 1*mu
  const Verdict v1 = tg::limitedly_distant(ctx, pres(ctx, "ray(P2, 1, 0)"),
                                           pres(ctx, "ray(P2, 2, 0)"), Rank::fin(1));
  CHECK(v1.yes());
  CHECK(v1.mu == 1);  // n < w

  const WGraph o = suite::omega_star();
  Context co(o);
  const Verdict va = tg::limitedly_distant(co, pres(co, "std(cA)"), pres(co, "std(cB)"),
                                           Rank::omega());
  CHECK(va.yes());
  CHECK(va.mu == 2);  // d = w^w * 2
  const Verdict vb = tg::limitedly_distant(co, pres(co, "std(cA)"), pres(co, "std(cB)"),
                                           Rank::arrow_omega());
  CHECK(vb.no());
}

TEST_CASE("maximality of hypernodes") {
  const WGraph g = suite::ladder();
  Context ctx(g);
  CHECK(tg::is_maximal_hypernode(ctx, pres(ctx, "arm(A, 1, 0, x)")).yes());
  CHECK(tg::is_maximal_hypernode(ctx, pres(ctx, "arm(A, 1, 0, nx)")).no());  // nx_n = P_{n+1}[0]
  const Verdict v = tg::is_maximal_hypernode(
      ctx, pres(ctx, "interleave(2, arm(A, 1, 0, x), arm(A, 1, 0, nx))"));
  REQUIRE(v.mixed());
  CHECK(v.residues[0].yes);
  CHECK(!v.residues[1].yes);
}

TEST_CASE("sampled triangle inequality for hypernodes") {
  const WGraph g = suite::ladder();
  Context ctx(g);
  CHECK(tg::triangle_check(ctx, pres(ctx, "std(x0)"), pres(ctx, "arm(A, 1, 0, x)"),
                           pres(ctx, "arm(A, 2, 0, x)"), 8));
  CHECK(tg::triangle_check(ctx, pres(ctx, "std(x1)"), pres(ctx, "std(x1)"),
                           pres(ctx, "std(x1)"), 4));
  CHECK_THROWS_AS(tg::triangle_check(ctx, pres(ctx, "arm(A, 1, 0, nx)"), pres(ctx, "std(x1)"),
                                     pres(ctx, "std(x2)"), 4),
                  tg::error);

  const WGraph p = suite::path5();
  Context cp(p);
  CHECK(tg::triangle_check(cp, pres(cp, "std(a)"), pres(cp, "std(c)"), pres(cp, "std(e)"), 6));
}

TEST_CASE("verdicts are blind to finite patches") {
  const WGraph g = suite::ladder();
  Context ctx(g);
  const Hypernode p = pres(ctx, "arm(A, 1, 0, x)");
  const Hypernode patched = pres(ctx, "patch(arm(A, 1, 0, x), {2: c, 5: P1[3]})");
  const Hypernode q = pres(ctx, "arm(A, 3, 1, x)");

  CHECK(tg::equivalent(ctx, p, patched).yes());
  for (const Rank rho : {Rank::fin(0), Rank::fin(1), Rank::arrow_omega()}) {
    const Verdict a = tg::limitedly_distant(ctx, p, q, rho);
    const Verdict b = tg::limitedly_distant(ctx, patched, q, rho);
    CHECK(a.kind == b.kind);
    CHECK(a.mu == b.mu);
  }
  CHECK(tg::is_maximal_hypernode(ctx, patched).yes() == tg::is_maximal_hypernode(ctx, p).yes());
}

TEST_CASE("verdict soundness against pointwise sampling") {
  const WGraph g = suite::ladder();
  Context ctx(g);
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"std(x1)", "std(x9)"},
      {"std(x0)", "arm(A, 1, 0, x)"},
      {"arm(A, 1, 0, x)", "arm(A, 2, 0, x)"},
      {"arm(A, 1, 0, x)", "arm(A, 1, 3, x)"},
      {"std(x1)", "ray(P2, 1, 0)"},
  };
  for (const auto& [ps, qs] : pairs) {
    const Hypernode p = pres(ctx, ps), q = pres(ctx, qs);
    for (const Rank rho : {Rank::fin(1), Rank::arrow_omega()}) {
      const Verdict v = tg::limitedly_distant(ctx, p, q, rho);
      const Ordinal bound = rho.is_arrow_omega()
                                ? tg::omega_pow(Rank::fin(static_cast<std::uint32_t>(v.mu)))
                                : tg::nat_mul(tg::omega_pow(rho), v.mu);
      if (v.yes()) {
        for (std::uint64_t n = 8; n < 28; ++n)
          CHECK(!(ctx.an().distance(p.at(n), q.at(n)) > bound));
      } else if (v.no()) {
        // for each small m some sampled n beats w^rho * m
        for (std::uint64_t m = 0; m <= 3; ++m) {
          const Ordinal b = tg::nat_mul(tg::omega_pow(rho), m);
          bool exceeded = false;
          for (std::uint64_t n = 0; n < 40 && !exceeded; ++n)
            if (ctx.an().distance(p.at(n), q.at(n)) > b) exceeded = true;
          CHECK(exceeded);
        }
      }
    }
  }
}

TEST_CASE("limited distance is monotone in the rank") {
  const WGraph g = suite::ladder_apex();
  Context ctx(g);
  const std::vector<std::string> ps = {"std(x1)", "std(Z)", "arm(A, 1, 0, x)", "arm(A, 2, 1, x)"};
  const std::vector<Rank> ranks = {Rank::fin(0), Rank::fin(1), Rank::fin(2), Rank::arrow_omega()};
  for (const auto& a : ps)
    for (const auto& b : ps) {
      bool seen_yes = false;
      for (const Rank rho : ranks) {
        const Verdict v = tg::limitedly_distant(ctx, pres(ctx, a), pres(ctx, b), rho);
        if (seen_yes) CHECK(v.yes());
        if (v.yes()) seen_yes = true;
      }
    }
}

TEST_CASE("warrow limited distance bridges the finite ranks") {
  const WGraph g = suite::ladder();
  Context ctx(g);
  const std::vector<std::string> ps = {"std(x1)", "std(x9)", "arm(A, 1, 0, x)", "arm(A, 2, 0, x)"};
  for (const auto& a : ps)
    for (const auto& b : ps) {
      // on a rank-1 graph every hyperdistance stays below w^w
      CHECK(tg::limitedly_distant(ctx, pres(ctx, a), pres(ctx, b), Rank::arrow_omega()).yes());
    }
}
