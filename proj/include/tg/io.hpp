#pragma once

// JSON file format for wgraph presentations plus named hypernode
// presentations, and the machine-readable report validator used by the
// CLI round-trip tests.  Unknown keys are rejected everywhere.

#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tg/error.hpp"
#include "tg/wgraph.hpp"

namespace tg::io {

using json = nlohmann::ordered_json;

inline void check_keys(const json& j, const std::set<std::string>& allowed,
                       const std::string& where) {
  if (!j.is_object()) fail(errc::parse, where + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) fail(errc::parse, "unknown key '" + key + "' in " + where);
}

inline json rank_to_json(Rank r) {
  if (r.is_fin()) return json(r.fin_value());
  if (r.is_minus_one()) return json(-1);
  return json(r.to_string());
}

inline Rank rank_from_json(const json& j, const std::string& where) {
  if (j.is_number_integer()) {
    const long long v = j.get<long long>();
    if (v == -1) return Rank::minus_one();
    if (v < 0) fail(errc::parse, "bad rank " + std::to_string(v) + " in " + where);
    return Rank::fin(static_cast<std::uint32_t>(v));
  }
  if (j.is_string()) return Rank::parse(j.get<std::string>());
  fail(errc::parse, "rank must be an integer or name in " + where);
}

inline json wnode_to_json(const WNodeDecl& w) {
  json j;
  j["id"] = w.id;
  j["rank"] = rank_to_json(w.rank);
  if (!w.embraces.empty()) j["embraces"] = w.embraces;
  json tips = json::array();
  for (const auto& t : w.tips) {
    json tip;
    tip["rank"] = rank_to_json(t.rank);
    switch (t.source) {
      case TipDecl::Source::Ray: tip["ray"] = t.target; break;
      case TipDecl::Source::At: tip["at"] = t.target; break;
      case TipDecl::Source::ArmEnd: tip["armEnd"] = t.target; break;
    }
    tips.push_back(std::move(tip));
  }
  if (!tips.empty()) j["tips"] = std::move(tips);
  return j;
}

inline WNodeDecl wnode_from_json(const json& j, const std::string& where) {
  check_keys(j, {"id", "rank", "embraces", "tips"}, where);
  WNodeDecl w;
  if (!j.contains("id") || !j.contains("rank"))
    fail(errc::parse, where + " needs 'id' and 'rank'");
  w.id = j.at("id").get<std::string>();
  w.rank = rank_from_json(j.at("rank"), where);
  if (j.contains("embraces")) w.embraces = j.at("embraces").get<std::vector<std::string>>();
  if (j.contains("tips")) {
    for (const auto& tj : j.at("tips")) {
      check_keys(tj, {"rank", "ray", "at", "armEnd"}, where + ".tips");
      TipDecl t;
      t.rank = rank_from_json(tj.at("rank"), where + ".tips");
      const int sources = tj.contains("ray") + tj.contains("at") + tj.contains("armEnd");
      if (sources != 1)
        fail(errc::parse, "each tip needs exactly one of ray/at/armEnd in " + where);
      if (tj.contains("ray")) {
        t.source = TipDecl::Source::Ray;
        t.target = tj.at("ray").get<std::string>();
      } else if (tj.contains("at")) {
        t.source = TipDecl::Source::At;
        t.target = tj.at("at").get<std::string>();
      } else {
        t.source = TipDecl::Source::ArmEnd;
        t.target = tj.at("armEnd").get<std::string>();
      }
      w.tips.push_back(std::move(t));
    }
  }
  return w;
}

inline json block_to_json(const Block& b) {
  json j;
  if (!b.nodes.empty()) j["nodes"] = b.nodes;
  if (!b.branches.empty()) {
    json arr = json::array();
    for (const auto& [x, y] : b.branches) arr.push_back(json::array({x, y}));
    j["branches"] = std::move(arr);
  }
  if (!b.rays.empty()) {
    json arr = json::array();
    for (const auto& r : b.rays) arr.push_back(r.id);
    j["rays"] = std::move(arr);
  }
  if (!b.wnodes.empty()) {
    json arr = json::array();
    for (const auto& w : b.wnodes) arr.push_back(wnode_to_json(w));
    j["wnodes"] = std::move(arr);
  }
  if (!b.ports.empty()) j["ports"] = b.ports;
  if (j.is_null()) j = json::object();
  return j;
}

inline Block block_from_json(const json& j, const std::string& where) {
  check_keys(j, {"nodes", "branches", "rays", "wnodes", "ports"}, where);
  Block b;
  if (j.contains("nodes")) b.nodes = j.at("nodes").get<std::vector<std::string>>();
  if (j.contains("branches")) {
    for (const auto& bj : j.at("branches")) {
      if (!bj.is_array() || bj.size() != 2)
        fail(errc::parse, "branches are two-element arrays in " + where);
      b.branches.push_back({bj[0].get<std::string>(), bj[1].get<std::string>()});
    }
  }
  if (j.contains("rays"))
    for (const auto& rj : j.at("rays")) b.rays.push_back({rj.get<std::string>()});
  if (j.contains("wnodes"))
    for (const auto& wj : j.at("wnodes"))
      b.wnodes.push_back(wnode_from_json(wj, where + ".wnodes"));
  if (j.contains("ports"))
    b.ports = j.at("ports").get<std::map<std::string, std::string>>();
  return b;
}

struct Document {
  WGraph graph;
  std::map<std::string, std::string> presentations;
};

inline json document_to_json(const Document& doc) {
  json j;
  j["rank"] = rank_to_json(doc.graph.rank);
  j["core"] = block_to_json(doc.graph.core);
  json arms = json::array();
  for (const auto& a : doc.graph.arms) {
    json aj;
    aj["id"] = a.id;
    aj["cell"] = block_to_json(a.cell);
    if (!a.glue.empty()) aj["glue"] = a.glue;
    if (a.apex) aj["apex"] = wnode_to_json(*a.apex);
    if (!a.attach.empty()) aj["attach"] = a.attach;
    arms.push_back(std::move(aj));
  }
  j["arms"] = std::move(arms);
  if (!doc.presentations.empty()) j["presentations"] = doc.presentations;
  return j;
}

inline Document document_from_json(const json& j) {
  check_keys(j, {"rank", "core", "arms", "presentations"}, "document");
  if (!j.contains("rank") || !j.contains("core"))
    fail(errc::parse, "document needs 'rank' and 'core'");
  Document doc;
  doc.graph.rank = rank_from_json(j.at("rank"), "document");
  doc.graph.core = block_from_json(j.at("core"), "core");
  if (j.contains("arms")) {
    for (const auto& aj : j.at("arms")) {
      check_keys(aj, {"id", "cell", "glue", "apex", "attach"}, "arm");
      Arm a;
      if (!aj.contains("id") || !aj.contains("cell"))
        fail(errc::parse, "each arm needs 'id' and 'cell'");
      a.id = aj.at("id").get<std::string>();
      a.cell = block_from_json(aj.at("cell"), "arm " + a.id);
      if (aj.contains("glue")) a.glue = aj.at("glue").get<std::map<std::string, std::string>>();
      if (aj.contains("apex")) a.apex = wnode_from_json(aj.at("apex"), "arm " + a.id + ".apex");
      if (aj.contains("attach"))
        a.attach = aj.at("attach").get<std::map<std::string, std::string>>();
      doc.graph.arms.push_back(std::move(a));
    }
  }
  if (j.contains("presentations"))
    doc.presentations = j.at("presentations").get<std::map<std::string, std::string>>();
  return doc;
}

inline std::string document_to_string(const Document& doc) {
  return document_to_json(doc).dump(2) + "\n";
}

inline Document document_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(errc::parse, std::string(e.what()));
  }
  return document_from_json(j);
}

// Minimal structural validation of the CLI's machine-readable reports.
inline void validate_report(const json& j) {
  check_keys(j, {"command", "ok", "graph", "result"}, "report");
  for (const char* key : {"command", "ok", "result"})
    if (!j.contains(key)) fail(errc::parse, std::string("report misses '") + key + "'");
  if (!j.at("command").is_string()) fail(errc::parse, "report command must be a string");
  if (!j.at("ok").is_boolean()) fail(errc::parse, "report ok must be a boolean");
}

}  // namespace tg::io
