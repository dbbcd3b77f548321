#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ktag/checker.hpp"
#include "ktag/protocols.hpp"

namespace ktag {

struct SweepConfig {
  ProtocolSpec proto;
  TaskSpec task;                       // target task to judge against
  bool exhaustive_inputs{true};
  int input_samples{64};               // when not exhaustive
  int crash_samples{200};
  int seeds{5};
  std::vector<OraclePolicy> policies{{PolicyKind::Prefer0, 0},
                                     {PolicyKind::Prefer1, 0}};
  std::optional<OracleMode> mode_override;
  long bound{10000};
  std::uint64_t master_seed{1};
  Time crash_time_range{120};
  int max_crashes{-1};                 // default: task.f
};

struct SweepOutcome {
  long trials{0};
  long pass{0};
  long fail{0};
  long inconclusive{0};
  int max_round{1};
  std::string first_bad;  // human-readable description of the first non-pass
};

/// Grid of (inputs x crash schedules x scheduler seeds x policies); every
/// run goes through the full structural + oracle + task check.
SweepOutcome run_sweep(const SweepConfig& cfg,
                       const std::function<void(const Run&, const Verdict&)>&
                           on_trial = nullptr);

}  // namespace ktag
