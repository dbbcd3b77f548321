#include "ktag/checker.hpp"

namespace ktag {

Verdict check_task_conditions(const Run& run, const TaskSpec& task) {
  Verdict v;
  const ProblemSpec& prob = task.problem;
  const int m = run.pattern.faulty_count_within(prob.members);

  if (m > task.f) {
    const std::string note = "resiliency bound exceeded: " + std::to_string(m) +
                             " > f=" + std::to_string(task.f);
    for (const char* name : {"termination", "agreement", "irrevocability",
                             "validity1", "validity2"})
      v.add(name, Status::Vacuous, {}, note);
    return v;
  }

  auto dec = run.decisions();

  // Termination: every correct process decided.
  {
    Status st = Status::Pass;
    std::string note;
    for (ProcessId p : prob.members) {
      if (run.pattern.is_faulty(p) || dec.count(p)) continue;
      st = run.hit_bound ? Status::Inconclusive : Status::Fail;
      note = "correct process " + std::to_string(p) + " undecided" +
             (run.hit_bound ? " at the step bound" : "");
    }
    v.add("termination", st, {}, note);
  }

  // Agreement over all decide events, including by later-crashed processes.
  {
    std::vector<long> ev;
    int first_val = -1;
    long first_idx = -1;
    for (auto& [p, ds] : dec) {
      for (auto& [val, i] : ds) {
        if (first_val < 0) {
          first_val = val;
          first_idx = i;
        } else if (val != first_val) {
          if (ev.empty()) ev.push_back(first_idx);
          ev.push_back(i);
        }
      }
    }
    v.add("agreement", ev.empty() ? Status::Pass : Status::Fail, ev);
  }

  // Irrevocability: per-process decision values constant.
  {
    std::vector<long> ev;
    for (auto& [p, ds] : dec)
      for (auto& [val, i] : ds)
        if (val != ds.front().first) ev.push_back(i);
    v.add("irrevocability", ev.empty() ? Status::Pass : Status::Fail, ev);
  }

  auto all_decide = [&](int want, std::vector<long>& ev) {
    for (auto& [p, ds] : dec)
      for (auto& [val, i] : ds)
        if (val != want) ev.push_back(i);
  };

  if (prob.kind == ProblemKind::KTag) {
    // Part 1: at least k zero inputs force decision 0.
    if (run.inputs.zeros() >= prob.k) {
      std::vector<long> ev;
      all_decide(0, ev);
      v.add("validity1", ev.empty() ? Status::Pass : Status::Fail, ev);
    } else {
      v.add("validity1", Status::Vacuous);
    }
    // Part 2: all-ones inputs with at most k-1 failures force decision 1.
    if (run.inputs.all_equal(1) && m <= prob.k - 1) {
      std::vector<long> ev;
      all_decide(1, ev);
      v.add("validity2", ev.empty() ? Status::Pass : Status::Fail, ev);
    } else {
      v.add("validity2", Status::Vacuous);
    }
  } else {  // WAg
    if (run.inputs.all_equal(0) && m == 0) {
      std::vector<long> ev;
      all_decide(0, ev);
      v.add("validity1", ev.empty() ? Status::Pass : Status::Fail, ev);
    } else {
      v.add("validity1", Status::Vacuous);
    }
    if (run.inputs.all_equal(1) && m == 0) {
      std::vector<long> ev;
      all_decide(1, ev);
      v.add("validity2", ev.empty() ? Status::Pass : Status::Fail, ev);
    } else {
      v.add("validity2", Status::Vacuous);
    }
  }

  return v;
}

Verdict check_all(const Run& run, const TaskSpec& task,
                  const ProtocolSpec& proto) {
  Verdict v = validate_run_structure(run, proto);
  v.merge(check_task_conditions(run, task), "task.");
  return v;
}

}  // namespace ktag
