#pragma once

#include <stdexcept>
#include <string>

namespace tg {

enum class errc {
  parse,
  dominance,
  empty_set,
  below_valid_from,
  unknown_node,
  invalid_walk,
  disconnected,
  bound_too_small,
  fit_failure,
  rank_above_graph,
  rank_mismatch,
  not_incident,
  arrow_omega_rank,
  hypothesis_violated,
  context_mismatch,
  not_maximal,
  rank_order,
  no_principal_reference,
  not_arm_indexed,
  section_not_nested,
  bad_depth,
  overflow,
  internal,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::parse: return "ParseError";
    case errc::dominance: return "DominanceError";
    case errc::empty_set: return "EmptySet";
    case errc::below_valid_from: return "BelowValidFrom";
    case errc::unknown_node: return "UnknownNode";
    case errc::invalid_walk: return "InvalidWalk";
    case errc::disconnected: return "Disconnected";
    case errc::bound_too_small: return "BoundTooSmall";
    case errc::fit_failure: return "FitFailure";
    case errc::rank_above_graph: return "RankAboveGraph";
    case errc::rank_mismatch: return "RankMismatch";
    case errc::not_incident: return "NotIncident";
    case errc::arrow_omega_rank: return "ArrowOmegaRank";
    case errc::hypothesis_violated: return "HypothesisViolated";
    case errc::context_mismatch: return "ContextMismatch";
    case errc::not_maximal: return "NotMaximal";
    case errc::rank_order: return "RankOrder";
    case errc::no_principal_reference: return "NoPrincipalReference";
    case errc::not_arm_indexed: return "NotArmIndexed";
    case errc::section_not_nested: return "SectionNotNested";
    case errc::bad_depth: return "BadDepth";
    case errc::overflow: return "Overflow";
    case errc::internal: return "Internal";
  }
  return "Unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw error(code, msg); }

}  // namespace tg
