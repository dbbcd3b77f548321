#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ktag/tasks.hpp"
#include "ktag/types.hpp"
#include "ktag/verdict.hpp"

namespace ktag {

enum class OracleMode { General, Consistent, Sham };
enum class PolicyKind { Prefer0, Prefer1, Seeded };

const char* oracle_mode_str(OracleMode m);
const char* policy_kind_str(PolicyKind k);
OracleMode oracle_mode_from(const std::string& s);
PolicyKind policy_kind_from(const std::string& s);

struct OraclePolicy {
  PolicyKind kind{PolicyKind::Prefer0};
  std::uint64_t seed{0};
  bool operator==(const OraclePolicy&) const = default;
};

/// Static description of an oracle (what the trace header records).
struct OracleSpecInfo {
  std::string sanctuary;
  std::vector<ProcessId> consultants;  // Gamma; may exceed the system set
  ProblemSpec problem;                 // over the consultants
  int f{0};
  OracleMode mode{OracleMode::General};
  OraclePolicy policy;
};

/// One grouped round of queries sharing a single committed answer value.
struct Consultation {
  int index{1};
  std::vector<std::pair<ProcessId, std::pair<int, Time>>> queries;  // in order
  std::vector<std::pair<ProcessId, std::pair<int, Time>>> answers;
  std::optional<int> committed;
  Time commit_time{-1};
  PartialVector commit_vector;

  PartialVector query_vector() const {
    PartialVector w;
    for (auto& [p, vt] : queries) w.set(p, vt.first);
    return w;
  }
  bool has_query(ProcessId p) const {
    for (auto& [q, vt] : queries)
      if (q == p) return true;
    return false;
  }
  bool has_answer(ProcessId p) const {
    for (auto& [q, vt] : answers)
      if (q == p) return true;
    return false;
  }
  int query_count() const { return static_cast<int>(queries.size()); }
};

/// How answer values are produced when the engine services an A event.
/// Normal: quorum + allowed-set + policy (the operational oracle).
/// Echo: answer immediately with the committed value, else the querier's
/// own query value (the deterministic fair-extension recipe).
enum class AnswerRule { Normal, Echo };

/// Sequential oracle state machine for one sanctuary.
class OracleInstance {
 public:
  explicit OracleInstance(OracleSpecInfo spec);

  const OracleSpecInfo& spec() const { return spec_; }
  const std::string& sanctuary() const { return spec_.sanctuary; }
  const std::vector<Consultation>& consultations() const { return consultations_; }

  /// Force every subsequent commit to this value (adversary steering).
  /// The value must still be in the allowed set; otherwise the engine
  /// raises InternalInvariant.
  void force_answer(std::optional<int> v) { forced_ = v; }

  /// Record p's query at time t. Throws ProtocolViolation on a duplicate
  /// query without an intervening answer.
  void submit_query(ProcessId p, int value, Time t);

  /// Value that could be answered to p at `now`, or nullopt (wait).
  std::optional<int> pending_answer_for(ProcessId p, const FailurePattern& full,
                                        Time now, AnswerRule rule = AnswerRule::Normal) const;

  /// Record the answer to p (committing the consultation on first use).
  /// When `full` is given, asserts the value is still in the allowed set
  /// under the mode's view at time t; replay passes nullptr.
  void record_answer(ProcessId p, int value, Time t,
                     const FailurePattern* full = nullptr);

  /// Batch form: answers every currently-answerable querier of the
  /// earliest consultation with unanswered queriers.
  std::vector<std::pair<ProcessId, int>> poll_answers(const FailurePattern& full,
                                                      Time now);

  int failure_view(const FailurePattern& full, Time now) const;

 private:
  const Consultation* consultation_of(ProcessId p) const;
  Consultation* consultation_of(ProcessId p);
  std::optional<int> committable_value(const Consultation& c,
                                       const FailurePattern& full, Time now) const;
  DecisionSet allowed_now(const Consultation& c, const FailurePattern& full,
                          Time now) const;
  int pick_by_policy(const DecisionSet& allowed) const;
  int consistent_value(const Consultation& c, const FailurePattern& full,
                       Time now) const;

  OracleSpecInfo spec_;
  std::vector<Consultation> consultations_;
  std::vector<std::pair<PartialVector, int>> memory_;  // Consistent mode
  std::optional<int> forced_;
  mutable std::mt19937_64 rng_;
};

/// Standalone validator for the Q/A sub-history of one sanctuary.
/// Checks (a) well-formedness, (b) per-consultation agreement,
/// (c) suitability under the mode's failure view, (d) f-resiliency,
/// (e) consistency across comparable consultations, (f) the sham
/// frozen-prefix view (folded into (c) when mode is Sham).
Verdict validate_oracle_history(const std::vector<Event>& events,
                                const FailurePattern& pattern,
                                const OracleSpecInfo& spec, bool hit_bound = false);

}  // namespace ktag
