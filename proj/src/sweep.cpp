#include "ktag/sweep.hpp"

#include <random>

namespace ktag {

namespace {

int max_round_in(const Run& run) {
  int r = 1;
  for (const auto& e : run.history)
    if (e.kind == EventKind::Send && (e.msg.tag == "R" || e.msg.tag == "P"))
      r = std::max(r, e.msg.vals.at(1));
  return r;
}

FailurePattern sample_crashes(std::mt19937_64& rng, int n, int max_crashes,
                              Time range) {
  FailurePattern f;
  int c = static_cast<int>(rng() % static_cast<std::uint64_t>(max_crashes + 1));
  std::vector<ProcessId> pool;
  for (int p = 1; p <= n; ++p) pool.push_back(p);
  for (int i = 0; i < c; ++i) {
    size_t j = static_cast<size_t>(rng() % pool.size());
    ProcessId victim = pool[j];
    pool.erase(pool.begin() + static_cast<long>(j));
    f.set_crash(victim, static_cast<Time>(rng() % static_cast<std::uint64_t>(range + 1)));
  }
  return f;
}

}  // namespace

SweepOutcome run_sweep(const SweepConfig& cfg,
                       const std::function<void(const Run&, const Verdict&)>&
                           on_trial) {
  SweepOutcome out;
  const int n = cfg.proto.n;
  const int maxc = cfg.max_crashes >= 0 ? cfg.max_crashes : cfg.task.f;
  std::mt19937_64 master(cfg.master_seed);

  std::vector<InputVector> inputs;
  if (cfg.exhaustive_inputs) {
    for (size_t mask = 0; mask < (size_t{1} << n); ++mask) {
      InputVector iv = InputVector::all(n, 0);
      for (int i = 0; i < n; ++i)
        iv.bits[static_cast<size_t>(i)] = static_cast<int>((mask >> i) & 1u);
      inputs.push_back(iv);
    }
  } else {
    for (int s = 0; s < cfg.input_samples; ++s) {
      InputVector iv = InputVector::all(n, 0);
      for (int i = 0; i < n; ++i)
        iv.bits[static_cast<size_t>(i)] = static_cast<int>(master() & 1u);
      inputs.push_back(iv);
    }
  }

  std::vector<FailurePattern> crash_sets;
  for (int s = 0; s < cfg.crash_samples; ++s)
    crash_sets.push_back(sample_crashes(master, n, maxc, cfg.crash_time_range));

  for (const auto& iv : inputs) {
    for (size_t ci = 0; ci < crash_sets.size(); ++ci) {
      for (int s = 0; s < cfg.seeds; ++s) {
        for (const auto& pol : cfg.policies) {
          SimOptions opt;
          opt.inputs = iv;
          opt.pattern = crash_sets[ci];
          opt.sched = s == 0 ? SchedulerSpec::fair()
                             : SchedulerSpec::random(cfg.master_seed * 1315423911u +
                                                     ci * 2654435761u + s);
          opt.step_bound = cfg.bound;
          opt.mode_override = cfg.mode_override;
          opt.policy_override = pol;
          Run run = simulate(cfg.proto, opt);
          Verdict v = check_all(run, cfg.task, cfg.proto);
          out.trials += 1;
          out.max_round = std::max(out.max_round, max_round_in(run));
          Status st = v.overall();
          if (st == Status::Pass) out.pass += 1;
          else if (st == Status::Fail) out.fail += 1;
          else out.inconclusive += 1;
          if (st != Status::Pass && out.first_bad.empty()) {
            out.first_bad = cfg.proto.name + " inputs=" + iv.str() + " crashes=" +
                            [&] {
                              std::string cs;
                              for (auto& [p, t] : crash_sets[ci].crashes()) {
                                if (!cs.empty()) cs += ",";
                                cs += std::to_string(p) + "@" + std::to_string(t);
                              }
                              return cs.empty() ? std::string("-") : cs;
                            }() +
                            " seed=" + std::to_string(s) + " policy=" +
                            policy_kind_str(pol.kind) + " -> " + v.summary();
          }
          if (on_trial) on_trial(run, v);
        }
      }
    }
  }
  return out;
}

}  // namespace ktag
