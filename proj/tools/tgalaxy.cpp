// tgalaxy: analyzer for finitely presented transfinite wgraphs.
// Computes ordinal wdistances, rho-wsections, boundary structure and the
// galaxy classification of hypernode presentations in the enlargement,
// with built-in consistency checks for the structural theorems.

#include <unistd.h>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tg/galaxy.hpp"
#include "tg/io.hpp"
#include "tg/metric.hpp"
#include "tg/sections.hpp"
#include "tg/validate.hpp"

namespace {

using tg::io::json;

struct Options {
  std::string format = "text";
  int jobs = 1;
  std::uint64_t seed = 0;
};

bool use_color() {
  const char* env = std::getenv("TG_COLOR");
  if (env && std::string(env) == "never") return false;
  if (env && std::string(env) == "always") return true;
  return isatty(1);
}

std::string pass_fail(bool ok) {
  if (!use_color()) return ok ? "PASS" : "FAIL";
  return ok ? "\x1b[32mPASS\x1b[0m" : "\x1b[31mFAIL\x1b[0m";
}

tg::io::Document load_document(const std::string& path) {
  std::string text;
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    text = ss.str();
  } else {
    std::ifstream in(path);
    if (!in) tg::fail(tg::errc::parse, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return tg::io::document_from_string(text);
}

struct Loaded {
  tg::io::Document doc;
  std::unique_ptr<tg::Context> ctx;
};

Loaded load_context(const std::string& path) {
  Loaded l;
  l.doc = load_document(path);
  l.ctx = std::make_unique<tg::Context>(l.doc.graph);
  for (const auto& [name, text] : l.doc.presentations)
    l.ctx->named.emplace(name, tg::parse_hypernode(l.doc.graph, text));
  return l;
}

void emit(const Options& opt, const std::string& command, bool ok, const json& result,
          const std::vector<std::string>& text_lines) {
  if (opt.format == "json") {
    json report;
    report["command"] = command;
    report["ok"] = ok;
    report["result"] = result;
    tg::io::validate_report(report);
    std::cout << report.dump(2) << "\n";
  } else {
    for (const auto& line : text_lines) std::cout << line << "\n";
  }
}

std::string verdict_text(const tg::Verdict& v) { return v.to_string(); }

json verdict_json(const tg::Verdict& v) {
  json j;
  switch (v.kind) {
    case tg::Verdict::Kind::Yes:
      j["verdict"] = "yes";
      j["mu"] = v.mu;
      break;
    case tg::Verdict::Kind::No: j["verdict"] = "no"; break;
    case tg::Verdict::Kind::Mixed: {
      j["verdict"] = "ultrafilter-dependent";
      json residues = json::array();
      for (const auto& pr : v.residues) {
        json r;
        r["mod"] = pr.cls.modulus;
        r["res"] = pr.cls.residue;
        r["yes"] = pr.yes;
        if (pr.yes) r["mu"] = pr.mu;
        residues.push_back(std::move(r));
      }
      j["residues"] = std::move(residues);
      break;
    }
  }
  return j;
}

std::string section_units_text(const tg::Section& s) {
  std::string out;
  const auto add_units = [&](const std::string& where, const tg::LocalUnits& u) {
    for (const auto& r : u.rays) out += " " + where + "ray:" + r;
    for (const auto& b : u.branches) out += " " + where + b;
  };
  add_units("core/", s.core);
  if (s.is_family()) {
    const std::string binder =
        s.fam_instance ? std::to_string(*s.fam_instance) : "n>=" + std::to_string(s.fam_from);
    add_units(s.fam_arm + "[" + binder + "]/", s.fam_units);
  }
  for (const auto& [arm, blocks] : s.at_blocks)
    for (const auto& [blk, units] : blocks)
      add_units(arm + "[" + std::to_string(blk) + "]/", units);
  for (const auto& [arm, rule] : s.per_block)
    add_units(arm + "[n>=" + std::to_string(rule.first) + "]/", rule.second);
  return out;
}

json section_json(const tg::Section& s) {
  json j;
  j["id"] = s.id;
  j["rank"] = tg::io::rank_to_json(s.rank);
  j["kind"] = s.is_family() ? "family" : (s.spanning() ? "spanning" : "concrete");
  j["units"] = section_units_text(s);
  return j;
}

json partition_json(const tg::Partition& part) {
  json j;
  j["rank"] = tg::io::rank_to_json(part.rank);
  json classes = json::array();
  for (const auto& cls : part.classes) {
    json c;
    c["members"] = cls.members;
    c["principal"] = cls.principal;
    classes.push_back(std::move(c));
  }
  j["classes"] = std::move(classes);
  json matrix = json::array();
  for (const auto& pv : part.matrix) {
    json e = verdict_json(pv.verdict);
    e["pair"] = json::array({pv.a, pv.b});
    matrix.push_back(std::move(e));
  }
  j["verdicts"] = std::move(matrix);
  json amb = json::array();
  for (const auto& pv : part.ambiguous) amb.push_back(json::array({pv.a, pv.b}));
  j["ambiguous"] = std::move(amb);
  if (!part.auto_standard.empty()) j["autoStandard"] = part.auto_standard;
  return j;
}

std::vector<std::string> partition_text(const tg::Partition& part) {
  std::vector<std::string> lines;
  lines.push_back("galaxies at rank " + part.rank.to_string() + ": " +
                  std::to_string(part.classes.size()));
  for (std::size_t i = 0; i < part.classes.size(); ++i) {
    std::string line = "  class " + std::to_string(i);
    if (part.classes[i].principal) line += " (principal)";
    line += ":";
    for (const auto& m : part.classes[i].members) line += " " + m;
    lines.push_back(line);
  }
  for (const auto& pv : part.ambiguous)
    lines.push_back("  ultrafilter-dependent: " + pv.a + " ~ " + pv.b + "  " +
                    verdict_text(pv.verdict));
  return lines;
}

// ---------------------------------------------------------------------
// Structural checks exposed through `check --theorem`.

struct CheckResult {
  std::vector<std::pair<bool, std::string>> lines;
  bool ok() const {
    for (const auto& [good, text] : lines)
      if (!good) return false;
    return true;
  }
};

// Nested-section containment: the enlargement of a lower section lies in
// the principal galaxy of every enclosing section's enlargement.
CheckResult check_containment(tg::Context& ctx) {
  CheckResult out;
  tg::SectionAnalyzer& sa = ctx.sec();
  const tg::Rank nu = ctx.graph->rank;
  std::vector<tg::Rank> ranks;
  if (nu.is_fin()) {
    for (std::uint32_t k = 0; k <= nu.fin_value(); ++k) ranks.push_back(tg::Rank::fin(k));
  } else {
    for (std::uint32_t k = 0; k <= 1; ++k) ranks.push_back(tg::Rank::fin(k));
    ranks.push_back(tg::Rank::arrow_omega());
    if (nu.is_omega()) ranks.push_back(tg::Rank::omega());
  }
  std::size_t pairs = 0;
  for (std::size_t lo = 0; lo < ranks.size(); ++lo)
    for (std::size_t hi = lo + 1; hi < ranks.size(); ++hi) {
      for (const tg::Section& low_raw : sa.sections(ranks[lo])) {
        std::vector<tg::Section> lows;
        if (low_raw.is_family()) {
          lows.push_back(low_raw.instantiate(low_raw.fam_from + 1));
          lows.push_back(low_raw.instantiate(low_raw.fam_from + 2));
        } else {
          lows.push_back(low_raw);
        }
        for (const tg::Section& low : lows) {
          for (const tg::Section& high : sa.sections(ranks[hi])) {
            if (!sa.section_inside(low, high)) continue;
            std::vector<std::string> carried;
            for (const auto& [name, h] : ctx.named) {
              try {
                const std::uint64_t M = h.modulus();
                bool inside = true;
                for (std::uint64_t r = 0; r < M && inside; ++r) {
                  const tg::ResolvedSeq seq = tg::resolve_residue(h, M, r);
                  inside = seq.constant ? sa.node_in_section(seq.node, low)
                                        : sa.node_in_section(seq.fam.at(3), low);
                }
                if (inside) carried.push_back(name);
              } catch (const tg::error&) {
              }
            }
            ++pairs;
            bool good = false;
            std::string note;
            try {
              good = tg::section_containment(ctx, low, high, carried);
            } catch (const tg::error& e) {
              note = std::string(" (") + e.what() + ")";
            }
            out.lines.push_back({good, "containment " + low.id + " < " + high.id +
                                           " at rank " + ranks[hi].to_string() + note});
          }
        }
      }
    }
  if (pairs == 0) out.lines.push_back({true, "no nested section pairs to check"});
  return out;
}

// Escape growth plus its corollary: the escape subsequence, read as a
// presentation, leaves the principal galaxy.
CheckResult check_escape(tg::Context& ctx, tg::Rank rho, const std::string& from,
                         std::uint64_t count) {
  CheckResult out;
  tg::SectionAnalyzer& sa = ctx.sec();
  const tg::NodeRef x0 = tg::parse_ref(*ctx.graph, from);
  const tg::Section* host = nullptr;
  for (const tg::Section& s : sa.sections(rho)) {
    if (s.is_family()) continue;
    if (sa.node_in_section(x0, s)) {
      host = &s;
      break;
    }
  }
  if (!host) {
    out.lines.push_back({false, "no rank-" + rho.to_string() + " section contains " + from});
    return out;
  }
  const auto walk = sa.escape_walk(*host, x0, count);
  const tg::Ordinal step = tg::omega_pow(rho);
  for (std::size_t k = 1; k <= walk.size(); ++k) {
    const auto& [node, dist] = walk[k - 1];
    const bool good =
        !(dist < tg::nat_mul(step, k)) && dist == ctx.an().distance(x0, node);
    out.lines.push_back({good, "escape " + std::to_string(k) + ": d(" + from + ", " +
                                   tg::ref_text(node) + ") = " + dist.to_string() +
                                   " >= " + tg::nat_mul(step, k).to_string()});
  }

  if (walk.size() >= 3) {
    bool affine = true;
    std::vector<std::uint64_t> idx;
    for (const auto& [node, dist] : walk) {
      if (node.kind != tg::NodeRef::Kind::ArmNode) affine = false;
      idx.push_back(node.block);
    }
    std::uint64_t slope = 0, inter = 0;
    if (affine && idx.size() >= 2) {
      slope = idx[1] - idx[0];
      for (std::size_t i = 0; i + 1 < idx.size(); ++i)
        if (idx[i + 1] - idx[i] != slope) affine = false;
      inter = idx[0];
    }
    if (affine && slope >= 1) {
      std::map<std::string, tg::Hypernode> pool = ctx.named;
      pool.emplace("__escape",
                   tg::Hypernode(tg::Hypernode::Indexed{
                       tg::IndexedNodes::arm_block(walk[0].first.arm, walk[0].first.local),
                       tg::IndexMap{slope, inter, 1, 0}}));
      const tg::Partition part = tg::classify_pool(ctx, pool, rho);
      const int c = part.class_of("__escape");
      const bool outside = c >= 0 && !part.classes[c].principal;
      out.lines.push_back(
          {outside, "escape presentation arm(" + walk[0].first.arm + ", " +
                        std::to_string(slope) + ", " + std::to_string(inter) + ", " +
                        walk[0].first.local + ") classifies outside the principal galaxy"});
    } else {
      out.lines.push_back({false, "escape subsequence is not arm-affine"});
    }
  }
  return out;
}

CheckResult check_chain(tg::Context& ctx, tg::Rank rho, const std::string& around,
                        std::uint64_t depth) {
  CheckResult out;
  try {
    const tg::WitnessChain chain = tg::witness_chain(ctx, around, depth, rho);
    out.lines.push_back({true, "chain of " + std::to_string(chain.order.size()) +
                                   " galaxies around " + around + " verified"});
    std::string seq;
    for (const auto& name : chain.order) seq += (seq.empty() ? "" : " < ") + name;
    out.lines.push_back({true, "order (closest first): " + seq});
    out.lines.push_back({chain.report.antisymmetry_ok, "antisymmetry audit"});
    out.lines.push_back({chain.report.transitivity_ok, "transitivity audit"});
  } catch (const tg::error& e) {
    out.lines.push_back({false, std::string("chain construction failed: ") + e.what()});
  }
  return out;
}

CheckResult check_order(tg::Context& ctx, tg::Rank rho, int jobs) {
  CheckResult out;
  const tg::Partition part = tg::classify(ctx, rho, nullptr, jobs);
  const tg::OrderReport rep = tg::order_partition(ctx, part);
  out.lines.push_back(
      {true, "classified " + std::to_string(part.classes.size()) + " galaxies"});
  out.lines.push_back({rep.antisymmetry_ok, "antisymmetry audit over all pairs"});
  out.lines.push_back({rep.transitivity_ok, "transitivity audit over all triples"});
  out.lines.push_back({rep.principal_least_ok, "principal galaxy is the least element"});
  out.lines.push_back(
      {true, "incomparable pairs: " + std::to_string(rep.incomparable.size())});
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"analyzer for finitely presented transfinite wgraphs"};
  app.require_subcommand(1);

  Options opt;
  app.add_option("--format", opt.format, "output: text or json")
      ->check(CLI::IsMember({"text", "json"}));
  app.add_option("--jobs", opt.jobs, "parallel verdict workers")->check(CLI::Range(1, 64));
  app.add_option("--seed", opt.seed, "seed for randomized cross-checks");

  std::string file = "-";
  std::string rank_text = "0", from, to, around, theorem;
  std::uint64_t depth = 3, ray_unit = 8, count = 10, max_tips = 8, max_steps = 12, samples = 60;
  bool with_oracle = false;

  const auto add_file = [&](CLI::App* cmd) {
    cmd->add_option("file", file, "graph document (- for stdin)")->required();
  };

  auto* c_validate = app.add_subcommand("validate", "check a presentation against its invariants");
  add_file(c_validate);

  auto* c_unroll = app.add_subcommand("unroll", "materialize a finite truncation");
  c_unroll->add_option("--depth", depth, "arm blocks to materialize")->required();
  c_unroll->add_option("--ray-unit", ray_unit, "ray truncation unit (default 8)");
  add_file(c_unroll);

  auto* c_distance = app.add_subcommand("distance", "wdistance and a geodesic walk");
  c_distance->add_option("--from", from)->required();
  c_distance->add_option("--to", to)->required();
  c_distance->add_flag("--oracle", with_oracle, "cross-check against bounded enumeration");
  c_distance->add_option("--max-tips", max_tips);
  c_distance->add_option("--max-steps", max_steps);
  add_file(c_distance);

  auto* c_sections = app.add_subcommand("sections", "rho-wsection partition");
  c_sections->add_option("--rank", rank_text)->required();
  add_file(c_sections);

  auto* c_boundary = app.add_subcommand("boundary", "boundary wnodes of one rank");
  c_boundary->add_option("--rank", rank_text)->required();
  add_file(c_boundary);

  auto* c_locfin = app.add_subcommand("locally-finite", "local finiteness per section");
  c_locfin->add_option("--rank", rank_text)->required();
  add_file(c_locfin);

  auto* c_escape = app.add_subcommand("escape-walk", "boundary wnodes at certified distances");
  c_escape->add_option("--rank", rank_text)->required();
  c_escape->add_option("--from", from)->required();
  c_escape->add_option("--count", count)->required();
  add_file(c_escape);

  auto* c_classify = app.add_subcommand("classify", "galaxy classification of presentations");
  c_classify->add_option("--rank", rank_text)->required();
  add_file(c_classify);

  auto* c_order = app.add_subcommand("order", "closeness order over the galaxies");
  c_order->add_option("--rank", rank_text)->required();
  add_file(c_order);

  auto* c_chain = app.add_subcommand("witness-chain", "ordered chain around a presentation");
  c_chain->add_option("--rank", rank_text)->required();
  c_chain->add_option("--around", around)->required();
  c_chain->add_option("--depth", depth)->required();
  add_file(c_chain);

  auto* c_check = app.add_subcommand("check", "structural consistency checks");
  c_check->add_option("--theorem", theorem, "one of 3.2, 4.3, 5.1, 5.2")
      ->required()
      ->check(CLI::IsMember({"3.2", "4.3", "5.1", "5.2"}));
  c_check->add_option("--rank", rank_text);
  c_check->add_option("--around", around);
  c_check->add_option("--depth", depth);
  c_check->add_option("--from", from);
  c_check->add_option("--count", count);
  add_file(c_check);

  auto* c_oracle = app.add_subcommand("oracle-check", "search distance vs enumeration oracle");
  c_oracle->add_option("--max-tips", max_tips);
  c_oracle->add_option("--max-steps", max_steps);
  c_oracle->add_option("--samples", samples);
  add_file(c_oracle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    if (c_validate->parsed()) {
      Loaded l = load_context(file);
      const auto violations = tg::validate(l.doc.graph);
      json arr = json::array();
      std::vector<std::string> lines;
      for (const auto& v : violations) {
        json e;
        e["code"] = v.code;
        e["subject"] = v.subject;
        e["detail"] = v.detail;
        arr.push_back(std::move(e));
        lines.push_back(v.to_string());
      }
      if (violations.empty()) lines.push_back("ok: presentation satisfies all invariants");
      emit(opt, "validate", violations.empty(), arr, lines);
      return violations.empty() ? 0 : 3;
    }

    if (c_unroll->parsed()) {
      Loaded l = load_context(file);
      const tg::Unrolled u = tg::unroll(l.doc.graph, depth, ray_unit);
      std::vector<std::string> nodes, branches, tips;
      for (const auto& p : u.positions) nodes.push_back(p.text + (p.cut ? " (cut)" : ""));
      for (const auto& b : u.branches) branches.push_back(b.id);
      for (const auto& t : u.tips)
        tips.push_back(t.id + " rank " + t.rank.to_string() + " at " +
                       u.positions[t.owner].text);
      std::sort(nodes.begin(), nodes.end());
      std::sort(branches.begin(), branches.end());
      std::sort(tips.begin(), tips.end());
      json result;
      result["nodes"] = nodes;
      result["branches"] = branches;
      result["tips"] = tips;
      std::vector<std::string> lines;
      lines.push_back("nodes: " + std::to_string(nodes.size()));
      for (const auto& n : nodes) lines.push_back("  " + n);
      lines.push_back("branches: " + std::to_string(branches.size()));
      for (const auto& b : branches) lines.push_back("  " + b);
      lines.push_back("tips: " + std::to_string(tips.size()));
      for (const auto& t : tips) lines.push_back("  " + t);
      emit(opt, "unroll", true, result, lines);
      return 0;
    }

    if (c_distance->parsed()) {
      Loaded l = load_context(file);
      const tg::NodeRef x = tg::parse_ref(l.doc.graph, from);
      const tg::NodeRef y = tg::parse_ref(l.doc.graph, to);
      tg::Analyzer& an = l.ctx->an();
      const tg::Ordinal d = an.distance(x, y);
      const tg::Walk w = an.geodesic(x, y);
      json result;
      result["distance"] = d.to_string();
      result["geodesic"] = w.to_string();
      std::vector<std::string> lines{"distance " + d.to_string(), "geodesic " + w.to_string()};
      bool ok = true;
      if (with_oracle) {
        const tg::Ordinal od = an.oracle(x, y, max_tips, max_steps);
        result["oracle"] = od.to_string();
        ok = od == d;
        lines.push_back("oracle " + od.to_string() + (ok ? " (agrees)" : " (MISMATCH)"));
      }
      emit(opt, "distance", ok, result, lines);
      return ok ? 0 : 2;
    }

    if (c_sections->parsed()) {
      Loaded l = load_context(file);
      const tg::Rank rho = tg::Rank::parse(rank_text);
      const auto& secs = l.ctx->sec().sections(rho);
      json arr = json::array();
      std::vector<std::string> lines;
      lines.push_back(std::to_string(secs.size()) + " section(s) at rank " + rho.to_string());
      for (const auto& s : secs) {
        arr.push_back(section_json(s));
        lines.push_back("  " + s.describe() + ":" + section_units_text(s));
      }
      emit(opt, "sections", true, arr, lines);
      return 0;
    }

    if (c_boundary->parsed()) {
      Loaded l = load_context(file);
      const tg::Rank rho = tg::Rank::parse(rank_text);
      tg::SectionAnalyzer& sa = l.ctx->sec();
      const auto core = sa.boundary_core(rho);
      const auto families = sa.boundary_families(rho);
      json result;
      json jcore = json::array(), jfam = json::array();
      std::vector<std::string> lines;
      for (const auto& r : core) {
        jcore.push_back(tg::ref_text(r));
        lines.push_back("boundary " + tg::ref_text(r));
      }
      for (const auto& f : families) {
        json e;
        e["arm"] = f.arm;
        e["local"] = f.local;
        jfam.push_back(std::move(e));
        lines.push_back("boundary " + f.local + "<n> (arm " + f.arm + ", every block)");
      }
      result["core"] = std::move(jcore);
      result["families"] = std::move(jfam);
      if (lines.empty()) lines.push_back("no boundary wnodes at rank " + rho.to_string());
      emit(opt, "boundary", true, result, lines);
      return 0;
    }

    if (c_locfin->parsed()) {
      Loaded l = load_context(file);
      const tg::Rank rho = tg::Rank::parse(rank_text);
      tg::SectionAnalyzer& sa = l.ctx->sec();
      json arr = json::array();
      std::vector<std::string> lines;
      for (const tg::Section& raw : sa.sections(rho)) {
        const tg::Section s = raw.is_family() ? raw.instantiate(raw.fam_from) : raw;
        const bool fin = sa.locally_rho_finite(s);
        json e;
        e["section"] = s.id;
        e["locallyFinite"] = fin;
        arr.push_back(std::move(e));
        lines.push_back(std::string(fin ? "locally-finite " : "NOT locally-finite ") + s.id);
      }
      emit(opt, "locally-finite", true, arr, lines);
      return 0;
    }

    if (c_escape->parsed()) {
      Loaded l = load_context(file);
      const tg::Rank rho = tg::Rank::parse(rank_text);
      tg::SectionAnalyzer& sa = l.ctx->sec();
      const tg::NodeRef x0 = tg::parse_ref(l.doc.graph, from);
      const tg::Section* host = nullptr;
      for (const tg::Section& s : sa.sections(rho))
        if (!s.is_family() && sa.node_in_section(x0, s)) {
          host = &s;
          break;
        }
      if (!host)
        tg::fail(tg::errc::unknown_node,
                 "no rank-" + rho.to_string() + " section holds " + from);
      const auto walk = sa.escape_walk(*host, x0, count);
      json arr = json::array();
      std::vector<std::string> lines;
      for (std::size_t k = 0; k < walk.size(); ++k) {
        json e;
        e["node"] = tg::ref_text(walk[k].first);
        e["distance"] = walk[k].second.to_string();
        arr.push_back(std::move(e));
        lines.push_back(std::to_string(k + 1) + ": " + tg::ref_text(walk[k].first) + " at " +
                        walk[k].second.to_string());
      }
      emit(opt, "escape-walk", true, arr, lines);
      return 0;
    }

    if (c_classify->parsed()) {
      Loaded l = load_context(file);
      const tg::Rank rho = tg::Rank::parse(rank_text);
      const tg::Partition part = tg::classify(*l.ctx, rho, nullptr, opt.jobs);
      emit(opt, "classify", true, partition_json(part), partition_text(part));
      return 0;
    }

    if (c_order->parsed()) {
      Loaded l = load_context(file);
      const tg::Rank rho = tg::Rank::parse(rank_text);
      const tg::Partition part = tg::classify(*l.ctx, rho, nullptr, opt.jobs);
      const tg::OrderReport rep = tg::order_partition(*l.ctx, part);
      json result = partition_json(part);
      json edges = json::array();
      std::vector<std::string> lines = partition_text(part);
      for (const auto& [a, b] : rep.edges) {
        edges.push_back(json::array({a, b}));
        lines.push_back("  class " + std::to_string(a) + " closer than class " +
                        std::to_string(b));
      }
      result["edges"] = std::move(edges);
      json inc = json::array();
      for (const auto& [a, b] : rep.incomparable) {
        inc.push_back(json::array({a, b}));
        lines.push_back("  incomparable: class " + std::to_string(a) + " ~ class " +
                        std::to_string(b));
      }
      result["incomparable"] = std::move(inc);
      result["antisymmetry"] = rep.antisymmetry_ok;
      result["transitivity"] = rep.transitivity_ok;
      result["principalLeast"] = rep.principal_least_ok;
      const bool ok = rep.antisymmetry_ok && rep.transitivity_ok && rep.principal_least_ok;
      lines.push_back(std::string("audits: ") + (ok ? "all pass" : "FAILED"));
      emit(opt, "order", ok, result, lines);
      return ok ? 0 : 2;
    }

    if (c_chain->parsed()) {
      Loaded l = load_context(file);
      const tg::Rank rho = tg::Rank::parse(rank_text);
      const tg::WitnessChain chain = tg::witness_chain(*l.ctx, around, depth, rho, opt.jobs);
      json result;
      result["order"] = chain.order;
      json maps = json::array();
      std::vector<std::string> lines;
      lines.push_back("verified chain of " + std::to_string(chain.order.size()) + " galaxies");
      for (const auto& name : chain.order) {
        const auto& h = chain.partition.pool.at(name);
        json e;
        e["name"] = name;
        e["presentation"] = h.to_string();
        maps.push_back(std::move(e));
        lines.push_back("  " + name + " = " + h.to_string());
      }
      result["presentations"] = std::move(maps);
      result["classes"] = partition_json(chain.partition)["classes"];
      emit(opt, "witness-chain", true, result, lines);
      return 0;
    }

    if (c_check->parsed()) {
      Loaded l = load_context(file);
      CheckResult res;
      if (theorem == "3.2") {
        res = check_containment(*l.ctx);
      } else if (theorem == "4.3") {
        const tg::Rank rho = tg::Rank::parse(rank_text == "0" ? "1" : rank_text);
        if (from.empty()) tg::fail(tg::errc::unknown_node, "check 4.3 needs --from");
        res = check_escape(*l.ctx, rho, from, count);
      } else if (theorem == "5.1") {
        const tg::Rank rho = tg::Rank::parse(rank_text == "0" ? "1" : rank_text);
        if (around.empty()) tg::fail(tg::errc::unknown_node, "check 5.1 needs --around");
        res = check_chain(*l.ctx, rho, around, depth);
      } else {
        const tg::Rank rho = tg::Rank::parse(rank_text == "0" ? "1" : rank_text);
        res = check_order(*l.ctx, rho, opt.jobs);
      }
      json arr = json::array();
      std::vector<std::string> lines;
      for (const auto& [good, text] : res.lines) {
        json e;
        e["pass"] = good;
        e["check"] = text;
        arr.push_back(std::move(e));
        lines.push_back(pass_fail(good) + " " + text);
      }
      emit(opt, "check", res.ok(), arr, lines);
      return res.ok() ? 0 : 2;
    }

    if (c_oracle->parsed()) {
      Loaded l = load_context(file);
      tg::Analyzer& an = l.ctx->an();
      const tg::WGraph& g = l.doc.graph;
      std::vector<tg::NodeRef> refs;
      for (const auto& n : g.core.nodes) refs.push_back(tg::NodeRef::core(n));
      for (const auto& r : g.core.rays)
        for (std::uint64_t p = 0; p <= 2; ++p) refs.push_back(tg::NodeRef::core_ray(r.id, p));
      for (const auto& a : g.arms)
        for (std::uint64_t b = 0; b <= 2; ++b) {
          for (const auto& w : a.cell.wnodes)
            refs.push_back(tg::NodeRef::arm_node(a.id, b, w.id));
          for (const auto& r : a.cell.rays)
            for (std::uint64_t p = 0; p <= 2; ++p)
              refs.push_back(tg::NodeRef::arm_ray(a.id, b, r.id, p));
        }
      std::mt19937_64 rng(opt.seed);
      std::uniform_int_distribution<std::size_t> pick(0, refs.size() - 1);
      std::size_t agreed = 0, mismatched = 0;
      std::vector<std::string> lines;
      for (std::uint64_t i = 0; i < samples; ++i) {
        const tg::NodeRef x = refs[pick(rng)], y = refs[pick(rng)];
        const tg::Ordinal d = an.distance(x, y);
        const tg::Ordinal od = an.oracle(x, y, max_tips, max_steps);
        if (d == od) {
          ++agreed;
        } else {
          ++mismatched;
          lines.push_back("MISMATCH d(" + tg::ref_text(x) + ", " + tg::ref_text(y) + ") = " +
                          d.to_string() + " vs oracle " + od.to_string());
        }
      }
      json result;
      result["samples"] = samples;
      result["agreed"] = agreed;
      result["mismatched"] = mismatched;
      lines.push_back(std::to_string(agreed) + "/" + std::to_string(samples) +
                      " samples agree with the enumeration oracle");
      emit(opt, "oracle-check", mismatched == 0, result, lines);
      return mismatched == 0 ? 0 : 2;
    }
  } catch (const tg::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}
