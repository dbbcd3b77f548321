#pragma once

#include "ktag/runtime.hpp"
#include "ktag/verdict.hpp"

namespace ktag {

/// Judge a run against a task: termination, agreement, irrevocability and
/// the two validity parts, judged black-box from F, I and decide events.
/// With more than f failures every condition is vacuous.
Verdict check_task_conditions(const Run& run, const TaskSpec& task);

/// Structural validation + per-sanctuary oracle histories + task conditions.
Verdict check_all(const Run& run, const TaskSpec& task, const ProtocolSpec& proto);

}  // namespace ktag
