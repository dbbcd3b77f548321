#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ktag/automaton.hpp"
#include "ktag/oracle.hpp"
#include "ktag/tasks.hpp"
#include "ktag/types.hpp"
#include "ktag/verdict.hpp"

namespace ktag {

struct SchedulerSpec {
  enum class Kind { FairRR, Random, Script } kind{Kind::FairRR};
  std::uint64_t seed{0};
  std::vector<ProcessId> script;  // Script only; falls back to FairRR after

  static SchedulerSpec fair() { return {}; }
  static SchedulerSpec random(std::uint64_t seed) {
    return {Kind::Random, seed, {}};
  }
};

/// Explicit crash list; compiles to a FailurePattern.
struct CrashSchedule {
  std::vector<std::pair<ProcessId, Time>> crashes;

  FailurePattern compile() const {
    FailurePattern f;
    for (auto& [p, t] : crashes) f.set_crash(p, t);
    return f;
  }
  static CrashSchedule parse(const std::string& s);  // "2@5,3@0"
  std::string str() const;
};

/// Protocol = automaton factory + required oracle wiring + the task the
/// protocol claims to solve over the system set {1..n}.
struct ProtocolSpec {
  std::string name;
  int n{0};
  TaskSpec solves;
  std::vector<OracleSpecInfo> oracles;  // default mode/policy, overridable
  AutomatonFactory make;
  std::map<std::string, int> params;  // for reconstruction from a trace
};

struct RunMeta {
  std::string protocol;
  std::map<std::string, int> params;
  SchedulerSpec sched;
  long step_bound{10000};
};

/// A run <F, I, H> plus the static context needed to validate it.
struct Run {
  int n{0};
  InputVector inputs;
  FailurePattern pattern;
  std::vector<OracleSpecInfo> oracles;
  std::vector<Event> history;
  bool hit_bound{false};
  RunMeta meta;

  Time last_time() const { return history.empty() ? 0 : history.back().t; }
  std::map<ProcessId, std::vector<std::pair<int, long>>> decisions() const;
  std::optional<Time> first_decision_time_of(ProcessId p) const;
  std::vector<Event> events_at(const std::string& loc) const;
};

struct SimOptions {
  InputVector inputs;
  FailurePattern pattern;  // system crashes; phantom consultants added inside
  SchedulerSpec sched;
  long step_bound{10000};
  Time start_time{0};  // first event lands at start_time + 1
  long seq_start{0};   // first message sequence number
  std::optional<OracleMode> mode_override;
  std::optional<OraclePolicy> policy_override;
  std::optional<int> forced_answer;  // steer every oracle commit
};

/// Deterministic discrete-event execution: one event per tick, alternating
/// scheduler picks, automaton steps, buffer updates and oracle answers.
Run simulate(const ProtocolSpec& proto, const SimOptions& opt);

/// Drop every event after t0 (inclusive cut).
Run truncate_run(const Run& run, Time t0);

/// Same F and H, inputs of flip_set replaced; only legal when the flipped
/// processes take no step in H.
Run flip_inputs(const Run& run, const std::vector<ProcessId>& flip_set,
                int new_bit);

/// Extend a structurally valid prefix under the failure-free pattern by the
/// deterministic recipe: round-robin queue, earliest message first, oracle
/// echoes the committed answer or else the querier's own value.
Run fair_extension(const Run& prefix, const ProtocolSpec& proto, long step_bound);

struct ResumeOptions {
  FailurePattern pattern;  // replaces the run's pattern
  AnswerRule answer_rule{AnswerRule::Normal};
  std::optional<int> forced_answer;
  std::optional<OracleMode> mode_override;
  long step_bound{10000};
};

/// Replay base.history into a fresh engine, then continue round-robin under
/// the given pattern/answer rule until quiescence or the bound.
Run resume_run(const Run& base, const ProtocolSpec& proto,
               const ResumeOptions& opt);

/// Structural checks R1..R6 (operational forms): per-process well-formedness,
/// send/receive accounting, deterministic replay, liveness at desk scale,
/// silence after crashes, and per-sanctuary oracle history validity.
Verdict validate_run_structure(const Run& run, const ProtocolSpec& proto);

}  // namespace ktag
