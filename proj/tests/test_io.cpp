#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "suite.hpp"
#include "tg/hyper.hpp"
#include "tg/io.hpp"
#include "tg/validate.hpp"

using tg::io::Document;
using tg::io::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string data_file(const std::string& name) { return std::string(TG_DATA_DIR) + "/" + name; }

}  // namespace

TEST_CASE("graph documents round-trip through JSON") {
  for (const tg::WGraph& g : {suite::path5(), suite::ladder(), suite::ladder_apex(),
                              suite::two_arms(), suite::star(), suite::omega_star(),
                              suite::ray_apex()}) {
    Document doc;
    doc.graph = g;
    doc.presentations = {{"p", "std(" + (g.core.nodes.empty() ? "P[0]" : g.core.nodes[0]) + ")"}};
    const std::string text = tg::io::document_to_string(doc);
    const Document back = tg::io::document_from_string(text);
    CHECK(tg::io::document_to_string(back) == text);
    CHECK(tg::validate(back.graph).empty());
  }
}

TEST_CASE("shipped data files match the built-in suite") {
  const std::vector<std::pair<std::string, tg::WGraph>> files = {
      {"path5.json", suite::path5()},
      {"ladder.json", suite::ladder()},
      {"ladder_apex.json", suite::ladder_apex()},
      {"two_arms.json", suite::two_arms()},
      {"star.json", suite::star()},
      {"omega_star.json", suite::omega_star()},
      {"ray_apex.json", suite::ray_apex()},
  };
  for (const auto& [name, g] : files) {
    const Document doc = tg::io::document_from_string(slurp(data_file(name)));
    Document expect;
    expect.graph = g;
    expect.presentations = doc.presentations;  // presentations live in the file
    CHECK(tg::io::document_to_string(expect) == slurp(data_file(name)));
    for (const auto& [pname, ptext] : doc.presentations)
      CHECK(tg::parse_hypernode(doc.graph, ptext).to_string() == ptext);
  }
}

TEST_CASE("unknown keys are rejected") {
  const std::string good = tg::io::document_to_string([] {
    Document d;
    d.graph = suite::path5();
    return d;
  }());
  json j = json::parse(good);
  j["extra"] = 1;
  CHECK_THROWS_AS(tg::io::document_from_json(j), tg::error);

  json j2 = json::parse(good);
  j2["core"]["bogus"] = json::array();
  CHECK_THROWS_AS(tg::io::document_from_json(j2), tg::error);

  json j3 = json::parse(good);
  j3["core"]["wnodes"] = json::array({{{"id", "w"}, {"rank", 1}, {"oops", 1}}});
  CHECK_THROWS_AS(tg::io::document_from_json(j3), tg::error);
}

TEST_CASE("parse errors carry position information") {
  try {
    tg::io::document_from_string("{ \"rank\": 1, ");
    FAIL("expected a parse error");
  } catch (const tg::error& e) {
    CHECK(e.code() == tg::errc::parse);
    CHECK(std::string(e.what()).find("parse error") != std::string::npos);
  }
}

TEST_CASE("rank encodings in JSON") {
  CHECK(tg::io::rank_from_json(json(3), "t") == tg::Rank::fin(3));
  CHECK(tg::io::rank_from_json(json("warrow"), "t") == tg::Rank::arrow_omega());
  CHECK(tg::io::rank_from_json(json("omega"), "t") == tg::Rank::omega());
  CHECK(tg::io::rank_from_json(json(-1), "t") == tg::Rank::minus_one());
  CHECK_THROWS_AS(tg::io::rank_from_json(json(-2), "t"), tg::error);
  CHECK(tg::io::rank_to_json(tg::Rank::omega()) == json("omega"));
  CHECK(tg::io::rank_to_json(tg::Rank::fin(2)) == json(2));
}

TEST_CASE("report validation accepts the CLI shape") {
  json report;
  report["command"] = "classify";
  report["ok"] = true;
  report["result"] = json::object();
  CHECK_NOTHROW(tg::io::validate_report(report));
  report["surprise"] = 1;
  CHECK_THROWS_AS(tg::io::validate_report(report), tg::error);
}
